#pragma once

#include <string>
#include <vector>

#include "lfact/param_store.hpp"

namespace lfact {

// GRU gate weights under a name prefix: <prefix>.{wz,uz,bz,wr,ur,br,wc,uc,bc}
// with W_*: H x D, U_*: H x H, b_*: H.
struct GruDims {
  std::size_t input = 0;
  std::size_t hidden = 0;
};

void init_gru(ParamStore& store, Rng& rng, const std::string& prefix, GruDims dims);

struct GruParams {
  Var wz, uz, bz;
  Var wr, ur, br;
  Var wc, uc, bc;
};

GruParams bind_gru(const BoundParams& bound, const std::string& prefix);

/// z = sigmoid(Wz x + Uz h + bz), r = sigmoid(Wr x + Ur h + br),
/// c = tanh(Wc x + Uc (r*h) + bc), h' = h + z*(c - h).
Var gru_step(Tape& tape, Var x, Var h, const GruParams& p);

enum class HeadActivation { softmax, sigmoid };

// Independent output heads sharing the hidden state: <prefix>.w<k>/<prefix>.b<k>
// with W_o: K x H, b_o: K per head.
struct HeadDims {
  std::size_t hidden = 0;
  std::size_t classes = 0;
  std::size_t heads = 1;
  HeadActivation activation = HeadActivation::softmax;
};

void init_head(ParamStore& store, Rng& rng, const std::string& prefix, HeadDims dims);

struct HeadParams {
  std::vector<std::pair<Var, Var>> heads;  // (W_o, b_o)
  HeadActivation activation = HeadActivation::softmax;
};

HeadParams bind_head(const BoundParams& bound, const std::string& prefix, std::size_t heads,
                     HeadActivation activation);

/// One probability vector per head; softmax heads sum to 1.
std::vector<Var> head_forward(Tape& tape, Var u, const HeadParams& p);

/// Appends the round flag channel: 1.0 on the first round, 0.0 after.
Var augment_flag(Tape& tape, Var x, bool first_round);

}  // namespace lfact
