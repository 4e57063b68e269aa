#pragma once

#include "lfact/grad_check.hpp"
#include "lfact/seq2seq.hpp"

namespace lfact {

/// Gradient check through a tiny model (H=8, L=3, T=3) on a fixed synthetic
/// sample, with the halting pattern pinned: every perturbed evaluation must
/// reproduce the unperturbed n_t sequence, otherwise the check aborts. The
/// loss includes the ponder term and, for the layer-flexible cell, the
/// intermediate-output term, so gradients flow through every parameter
/// group.
GradCheckResult model_grad_check(CellKind kind, Strategy strategy = Strategy::all,
                                 Combiner combiner = Combiner::affine, double step = 1e-4,
                                 const GradCheckOptions& options = {});

}  // namespace lfact
