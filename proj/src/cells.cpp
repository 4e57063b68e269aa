#include "lfact/cells.hpp"

namespace lfact {

void init_gru(ParamStore& store, Rng& rng, const std::string& prefix, GruDims dims) {
  const auto [d, h] = dims;
  for (const char* gate : {"z", "r", "c"}) {
    store.add(prefix + ".w" + gate, glorot_init(rng, h, d));
    store.add(prefix + ".u" + gate, glorot_init(rng, h, h));
    store.add(prefix + ".b" + gate, Tensor::zeros({h}));
  }
}

GruParams bind_gru(const BoundParams& bound, const std::string& prefix) {
  GruParams p;
  p.wz = bound.at(prefix + ".wz");
  p.uz = bound.at(prefix + ".uz");
  p.bz = bound.at(prefix + ".bz");
  p.wr = bound.at(prefix + ".wr");
  p.ur = bound.at(prefix + ".ur");
  p.br = bound.at(prefix + ".br");
  p.wc = bound.at(prefix + ".wc");
  p.uc = bound.at(prefix + ".uc");
  p.bc = bound.at(prefix + ".bc");
  return p;
}

Var gru_step(Tape& tape, Var x, Var h, const GruParams& p) {
  Var z = tape.sigmoid(tape.add(tape.add(tape.matmul(p.wz, x), tape.matmul(p.uz, h)), p.bz));
  Var r = tape.sigmoid(tape.add(tape.add(tape.matmul(p.wr, x), tape.matmul(p.ur, h)), p.br));
  Var c = tape.tanh(
      tape.add(tape.add(tape.matmul(p.wc, x), tape.matmul(p.uc, tape.mul(r, h))), p.bc));
  // h' = (1-z)*h + z*c, written as h + z*(c - h)
  return tape.add(h, tape.mul(z, tape.add(c, tape.neg(h))));
}

void init_head(ParamStore& store, Rng& rng, const std::string& prefix, HeadDims dims) {
  for (std::size_t k = 0; k < dims.heads; ++k) {
    store.add(prefix + ".w" + std::to_string(k), glorot_init(rng, dims.classes, dims.hidden));
    store.add(prefix + ".b" + std::to_string(k), Tensor::zeros({dims.classes}));
  }
}

HeadParams bind_head(const BoundParams& bound, const std::string& prefix, std::size_t heads,
                     HeadActivation activation) {
  HeadParams p;
  p.activation = activation;
  for (std::size_t k = 0; k < heads; ++k)
    p.heads.emplace_back(bound.at(prefix + ".w" + std::to_string(k)),
                         bound.at(prefix + ".b" + std::to_string(k)));
  return p;
}

std::vector<Var> head_forward(Tape& tape, Var u, const HeadParams& p) {
  std::vector<Var> out;
  out.reserve(p.heads.size());
  for (const auto& [w, b] : p.heads) {
    Var logits = tape.add(tape.matmul(w, u), b);
    out.push_back(p.activation == HeadActivation::softmax ? tape.softmax(logits)
                                                          : tape.sigmoid(logits));
  }
  return out;
}

Var augment_flag(Tape& tape, Var x, bool first_round) {
  Var flag = tape.scalar(first_round ? 1.0 : 0.0);
  const Var parts[] = {x, flag};
  return tape.concat(parts);
}

}  // namespace lfact
