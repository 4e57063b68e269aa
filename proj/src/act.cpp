#include "lfact/act.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lfact {

HaltingRecord halt_schedule(const std::function<double(int)>& h_stream, double epsilon,
                            int max_layers) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("halt_schedule: epsilon must lie in (0, 1)");
  if (max_layers < 1) throw std::invalid_argument("halt_schedule: L must be at least 1");

  HaltingRecord rec;
  double accum = 0.0;
  for (int n = 1; n <= max_layers; ++n) {
    const double h = h_stream(n);
    if (!(h > 0.0 && h < 1.0))
      throw std::invalid_argument("halt_schedule: h[" + std::to_string(n) + "] = " +
                                  std::to_string(h) + " outside (0, 1)");
    rec.h_values.push_back(h);
    accum += h;
    if (accum >= 1.0 - epsilon || n == max_layers) {
      rec.n_t = n;
      break;
    }
  }
  for (int i = 0; i + 1 < rec.n_t; ++i) rec.p.push_back(rec.h_values[i]);
  double below = 0.0;
  for (int i = 0; i + 1 < rec.n_t; ++i) below += rec.h_values[i];
  rec.remainder = 1.0 - below;
  rec.p.push_back(rec.remainder);
  return rec;
}

void init_act(ParamStore& store, Rng& rng, const std::string& prefix, ActDims dims) {
  init_gru(store, rng, prefix + ".cell", GruDims{dims.input + 1, dims.hidden});
  HeadDims head = dims.head;
  head.hidden = dims.hidden;
  init_head(store, rng, prefix + ".head", head);
  store.add(prefix + ".halt.w", glorot_init(rng, 1, dims.hidden));
  store.add(prefix + ".halt.b", Tensor::zeros({1}));
}

ActParams bind_act(const BoundParams& bound, const std::string& prefix, const ActDims& dims) {
  ActParams p;
  p.cell = bind_gru(bound, prefix + ".cell");
  p.head = bind_head(bound, prefix + ".head", dims.head.heads, dims.head.activation);
  p.w_h = bound.at(prefix + ".halt.w");
  p.b_h = bound.at(prefix + ".halt.b");
  return p;
}

double clamp_open_unit(double v) {
  const double lo = 1e-300;
  const double hi = 1.0 - 0x1.0p-53;
  return v < lo ? lo : (v > hi ? hi : v);
}

std::vector<Var> halting_probability_vars(Tape& tape, std::span<const Var> h_vars, int n_t) {
  std::vector<Var> p;
  for (int i = 0; i + 1 < n_t; ++i) p.push_back(h_vars[i]);
  if (n_t == 1) {
    p.push_back(tape.scalar(1.0));
  } else {
    Var acc = h_vars[0];
    for (int i = 1; i + 1 < n_t; ++i) acc = tape.add(acc, h_vars[i]);
    p.push_back(tape.add(tape.scalar(1.0), tape.neg(acc)));
  }
  return p;
}

ActStep act_step(Tape& tape, Var x, Var u_prev, const ActParams& params, double epsilon,
                 int max_layers) {
  std::vector<Var> states;
  std::vector<std::vector<Var>> round_outputs;
  std::vector<Var> h_vars;

  auto run_round = [&](int n) -> double {
    Var input = augment_flag(tape, x, n == 1);
    Var prev = (n == 1) ? u_prev : states.back();
    Var u = gru_step(tape, input, prev, params.cell);
    states.push_back(u);
    round_outputs.push_back(head_forward(tape, u, params.head));
    Var h = tape.sigmoid(tape.add(tape.matmul(params.w_h, u), params.b_h));
    h_vars.push_back(h);
    return clamp_open_unit(tape.value(h)[0]);
  };

  ActStep step;
  step.record = halt_schedule(run_round, epsilon, max_layers);
  const int n_t = step.record.n_t;
  step.p = halting_probability_vars(tape, h_vars, n_t);

  step.state = tape.mul(step.p[0], states[0]);
  for (int i = 1; i < n_t; ++i)
    step.state = tape.add(step.state, tape.mul(step.p[i], states[i]));

  const std::size_t heads = round_outputs[0].size();
  for (std::size_t k = 0; k < heads; ++k) {
    Var y = tape.mul(step.p[0], round_outputs[0][k]);
    for (int i = 1; i < n_t; ++i)
      y = tape.add(y, tape.mul(step.p[i], round_outputs[i][k]));
    step.outputs.push_back(y);
  }
  return step;
}

double ponder_cost(std::span<const HaltingRecord> records) {
  if (records.empty()) throw std::invalid_argument("ponder_cost: no records");
  double total = 0.0;
  for (const HaltingRecord& r : records) total += static_cast<double>(r.n_t) + r.remainder;
  return total;
}

double act_loss(double task_loss, std::span<const HaltingRecord> records, double tau) {
  if (tau < 0.0) throw std::invalid_argument("act_loss: tau must be nonnegative");
  return task_loss + tau * ponder_cost(records);
}

}  // namespace lfact
