#include "lfact/lfact_cell.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace lfact {

void init_lfact(ParamStore& store, Rng& rng, const std::string& prefix, LfactDims dims) {
  const std::size_t h = dims.hidden;
  init_gru(store, rng, prefix + ".cell", GruDims{dims.input, h});
  HeadDims head = dims.head;
  head.hidden = h;
  init_head(store, rng, prefix + ".head", head);

  store.add(prefix + ".g.w1", glorot_init(rng, h, h));
  store.add(prefix + ".g.w2", glorot_init(rng, h, h));
  store.add(prefix + ".g.b", Tensor::zeros({h}));
  if (dims.combiner == Combiner::mlp) {
    store.add(prefix + ".g.wo", glorot_init(rng, h, h));
    store.add(prefix + ".g.bo", Tensor::zeros({h}));
  }

  store.add(prefix + ".attn.wq", glorot_init(rng, h, h));
  store.add(prefix + ".attn.vq", glorot_init(rng, h, h));
  store.add(prefix + ".attn.bq", Tensor::zeros({h}));
  store.add(prefix + ".attn.v", glorot_init(rng, static_cast<std::size_t>(dims.max_layers), h));

  store.add(prefix + ".halt.w", glorot_init(rng, 1, h));
  store.add(prefix + ".halt.v", glorot_init(rng, 1, h));
  store.add(prefix + ".halt.b", Tensor::zeros({1}));
}

Var combine_g(Tape& tape, Var transmission, Var prev_output, const CombinerParams& p) {
  Var pre = tape.add(tape.add(tape.matmul(p.w1, transmission), tape.matmul(p.w2, prev_output)),
                     p.b);
  switch (p.kind) {
    case Combiner::affine:
      return tape.sigmoid(pre);
    case Combiner::mlp:
      return tape.sigmoid(tape.add(tape.matmul(p.wo, tape.tanh(pre)), p.bo));
  }
  throw std::invalid_argument("combine_g: unknown combiner variant");
}

Var transmission_state(Tape& tape, std::span<const Var> primaries, Var query, int layer_n,
                       Strategy strategy, const AttentionParams& p, Var* alpha_out) {
  if (primaries.empty()) throw std::invalid_argument("transmission_state: no primary states");
  if (layer_n < 1 || layer_n > p.max_layers)
    throw std::invalid_argument("transmission_state: layer " + std::to_string(layer_n) +
                                " outside 1.." + std::to_string(p.max_layers));

  const std::size_t available = primaries.size();
  const std::size_t c = (strategy == Strategy::ltd)
                            ? std::min(available, static_cast<std::size_t>(layer_n))
                            : available;

  const std::size_t hidden = tape.value(primaries[0]).numel();
  Var v_row = tape.slice(p.v_rows, (static_cast<std::size_t>(layer_n) - 1) * hidden, hidden);
  Var q_proj = tape.matmul(p.w_q, query);

  std::vector<Var> betas;
  betas.reserve(c);
  for (std::size_t i = 0; i < c; ++i) {
    Var s = tape.sigmoid(tape.add(tape.add(q_proj, tape.matmul(p.v_q, primaries[i])), p.b_q));
    betas.push_back(tape.sum(tape.mul(v_row, s)));
  }
  Var alpha = tape.softmax(tape.concat(betas));
  if (alpha_out) *alpha_out = alpha;

  Var out = tape.mul(tape.slice(alpha, 0, 1), primaries[0]);
  for (std::size_t i = 1; i < c; ++i)
    out = tape.add(out, tape.mul(tape.slice(alpha, i, 1), primaries[i]));
  return out;
}

LfactParams bind_lfact(const BoundParams& bound, const std::string& prefix,
                       const LfactDims& dims) {
  LfactParams p;
  p.cell = bind_gru(bound, prefix + ".cell");
  p.head = bind_head(bound, prefix + ".head", dims.head.heads, dims.head.activation);
  p.g.kind = dims.combiner;
  p.g.w1 = bound.at(prefix + ".g.w1");
  p.g.w2 = bound.at(prefix + ".g.w2");
  p.g.b = bound.at(prefix + ".g.b");
  if (dims.combiner == Combiner::mlp) {
    p.g.wo = bound.at(prefix + ".g.wo");
    p.g.bo = bound.at(prefix + ".g.bo");
  }
  p.attn.w_q = bound.at(prefix + ".attn.wq");
  p.attn.v_q = bound.at(prefix + ".attn.vq");
  p.attn.b_q = bound.at(prefix + ".attn.bq");
  p.attn.v_rows = bound.at(prefix + ".attn.v");
  p.attn.max_layers = dims.max_layers;
  p.w_h = bound.at(prefix + ".halt.w");
  p.v_h = bound.at(prefix + ".halt.v");
  p.b_h = bound.at(prefix + ".halt.b");
  return p;
}

StepTrace initial_trace(Tape& tape, std::size_t hidden) {
  StepTrace t;
  t.primaries.push_back(tape.leaf(Tensor::zeros({hidden})));
  t.record.n_t = 1;
  return t;
}

StepTrace lfact_step(Tape& tape, Var x, const StepTrace& prev, const LfactParams& params,
                     double epsilon, int max_layers, Strategy strategy) {
  if (prev.primaries.empty())
    throw std::invalid_argument("lfact_step: previous trace has no primary states");

  StepTrace out;
  std::vector<Var> h_vars;

  auto run_layer = [&](int n) -> double {
    Var query = (n == 1) ? prev.primaries.back() : out.primaries[static_cast<std::size_t>(n) - 2];
    Var u_bar = transmission_state(tape, prev.primaries, query, n, strategy, params.attn);
    out.transmission_used.push_back(u_bar);
    Var u_hat = combine_g(tape, u_bar, query, params.g);
    Var u = gru_step(tape, x, u_hat, params.cell);
    out.primaries.push_back(u);
    out.outputs.push_back(head_forward(tape, u, params.head));
    Var h = tape.sigmoid(tape.add(
        tape.add(tape.matmul(params.w_h, u), tape.matmul(params.v_h, u_bar)), params.b_h));
    h_vars.push_back(h);
    return clamp_open_unit(tape.value(h)[0]);
  };

  out.record = halt_schedule(run_layer, epsilon, max_layers);
  out.p = halting_probability_vars(tape, h_vars, out.record.n_t);
  return out;
}

std::vector<StepTrace> run_sequence(Tape& tape, std::span<const Var> inputs,
                                    const LfactParams& params, double epsilon, int max_layers,
                                    Strategy strategy) {
  if (inputs.empty()) throw std::invalid_argument("run_sequence: no inputs");
  const std::size_t hidden = tape.value(params.g.b).numel();
  std::vector<StepTrace> traces;
  traces.reserve(inputs.size());
  StepTrace prev = initial_trace(tape, hidden);
  for (Var x : inputs) {
    traces.push_back(lfact_step(tape, x, prev, params, epsilon, max_layers, strategy));
    prev = traces.back();
  }
  return traces;
}

double lfact_loss(double task_loss, const std::vector<std::vector<double>>& intermediate_losses,
                  std::span<const HaltingRecord> records, double tau, double mu) {
  if (mu < 0.0) throw std::invalid_argument("lfact_loss: mu must be nonnegative");
  double loss = act_loss(task_loss, records, tau);
  if (mu != 0.0) {
    double extra = 0.0;
    for (const auto& step : intermediate_losses)
      for (double v : step) extra += v;
    loss += mu * extra;
  }
  return loss;
}

}  // namespace lfact
