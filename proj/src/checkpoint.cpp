#include "lfact/checkpoint.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <vector>

namespace lfact {

namespace {

constexpr char kMagic[4] = {'L', 'F', 'C', 'K'};

void put_bytes(std::string& out, const void* p, std::size_t n) {
  out.append(static_cast<const char*>(p), n);
}

void put_u16(std::string& out, std::uint16_t v) {
  const unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
  put_bytes(out, b, 2);
}

void put_u32(std::string& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  put_bytes(out, b, 4);
}

void put_u64(std::string& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  put_bytes(out, b, 8);
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

void put_tensor(std::string& out, const std::string& name, const Tensor& t) {
  if (name.size() > std::numeric_limits<std::uint16_t>::max())
    throw std::invalid_argument("checkpoint: tensor name too long: " + name);
  put_u16(out, static_cast<std::uint16_t>(name.size()));
  put_bytes(out, name.data(), name.size());
  out.push_back(static_cast<char>(t.rank()));
  for (std::size_t d : t.shape()) put_u64(out, d);
  for (std::size_t i = 0; i < t.numel(); ++i) put_f64(out, t[i]);
}

class Reader {
public:
  explicit Reader(std::string bytes) : bytes_(std::move(bytes)) {}

  bool at_end() const { return pos_ == bytes_.size(); }

  void need(std::size_t n, const char* what) {
    if (pos_ + n > bytes_.size())
      throw std::runtime_error(std::string("checkpoint truncated while reading ") + what);
  }

  std::uint16_t u16(const char* what) {
    need(2, what);
    std::uint16_t v = 0;
    for (int i = 0; i < 2; ++i)
      v |= static_cast<std::uint16_t>(static_cast<unsigned char>(bytes_[pos_++])) << (8 * i);
    return v;
  }

  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_++])) << (8 * i);
    return v;
  }

  std::uint64_t u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_++])) << (8 * i);
    return v;
  }

  double f64(const char* what) { return std::bit_cast<double>(u64(what)); }

  std::uint8_t u8(const char* what) {
    need(1, what);
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }

  std::string str(std::size_t n, const char* what) {
    need(n, what);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

private:
  std::string bytes_;
  std::size_t pos_ = 0;
};

std::pair<std::string, Tensor> read_tensor(Reader& r) {
  const std::uint16_t name_len = r.u16("tensor name length");
  std::string name = r.str(name_len, "tensor name");
  const std::uint8_t rank = r.u8("tensor rank");
  std::vector<std::size_t> shape;
  std::size_t numel = 1;
  for (int d = 0; d < rank; ++d) {
    shape.push_back(static_cast<std::size_t>(r.u64("tensor dims")));
    numel *= shape.back();
  }
  std::vector<double> data(numel);
  for (std::size_t i = 0; i < numel; ++i) data[i] = r.f64("tensor payload");
  return {std::move(name), Tensor(std::move(shape), std::move(data))};
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::string out;
  put_bytes(out, kMagic, 4);
  put_u32(out, ckpt.version);
  put_u32(out, static_cast<std::uint32_t>(ckpt.config_text.size()));
  put_bytes(out, ckpt.config_text.data(), ckpt.config_text.size());

  put_u32(out, static_cast<std::uint32_t>(ckpt.params.tensors.size()));
  for (const auto& [name, tensor] : ckpt.params.tensors) put_tensor(out, name, tensor);

  if (ckpt.has_optimizer) {
    put_u32(out, static_cast<std::uint32_t>(ckpt.adam.m.size() + ckpt.adam.v.size() + 1));
    Tensor meta({6}, {static_cast<double>(ckpt.adam.step), ckpt.adam.cfg.lr,
                      ckpt.adam.cfg.beta1, ckpt.adam.cfg.beta2, ckpt.adam.cfg.eps,
                      ckpt.best_metric.value_or(std::numeric_limits<double>::quiet_NaN())});
    put_tensor(out, "__adam__", meta);
    for (const auto& [name, tensor] : ckpt.adam.m) put_tensor(out, "m:" + name, tensor);
    for (const auto& [name, tensor] : ckpt.adam.v) put_tensor(out, "v:" + name, tensor);
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot write checkpoint: " + path);
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw std::runtime_error("short write on checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open checkpoint: " + path);
  std::string bytes((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  Reader r(std::move(bytes));

  const std::string magic = r.str(4, "magic");
  if (std::memcmp(magic.data(), kMagic, 4) != 0)
    throw std::runtime_error("not a checkpoint file (bad magic): " + path);

  Checkpoint ckpt;
  ckpt.version = r.u32("format version");
  if (ckpt.version != kCheckpointVersion)
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(ckpt.version) +
                             " (expected " + std::to_string(kCheckpointVersion) + ")");

  const std::uint32_t config_len = r.u32("config length");
  ckpt.config_text = r.str(config_len, "config text");

  const std::uint32_t tensor_count = r.u32("tensor count");
  for (std::uint32_t i = 0; i < tensor_count; ++i) {
    auto [name, tensor] = read_tensor(r);
    ckpt.params.add(name, std::move(tensor));
  }

  if (!r.at_end()) {
    const std::uint32_t opt_count = r.u32("optimizer tensor count");
    ckpt.has_optimizer = true;
    bool saw_meta = false;
    for (std::uint32_t i = 0; i < opt_count; ++i) {
      auto [name, tensor] = read_tensor(r);
      if (name == "__adam__") {
        if (tensor.numel() != 6)
          throw std::runtime_error("checkpoint: malformed optimizer metadata");
        ckpt.adam.step = static_cast<std::int64_t>(tensor[0]);
        ckpt.adam.cfg.lr = tensor[1];
        ckpt.adam.cfg.beta1 = tensor[2];
        ckpt.adam.cfg.beta2 = tensor[3];
        ckpt.adam.cfg.eps = tensor[4];
        if (!std::isnan(tensor[5])) ckpt.best_metric = tensor[5];
        saw_meta = true;
      } else if (name.rfind("m:", 0) == 0) {
        ckpt.adam.m.emplace(name.substr(2), std::move(tensor));
      } else if (name.rfind("v:", 0) == 0) {
        ckpt.adam.v.emplace(name.substr(2), std::move(tensor));
      } else {
        throw std::runtime_error("checkpoint: unexpected optimizer tensor '" + name + "'");
      }
    }
    if (!saw_meta) throw std::runtime_error("checkpoint: optimizer section missing metadata");
    if (!r.at_end()) throw std::runtime_error("checkpoint: trailing bytes after optimizer section");
  }
  return ckpt;
}

}  // namespace lfact
