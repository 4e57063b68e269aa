#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace lfact {

/// xoshiro256** with splitmix64 seeding. Hand-rolled so that a given seed
/// produces the same stream on every platform (std:: distributions do not
/// guarantee that).
class Rng {
public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64();

  /// Uniform in [0, 1), 53-bit resolution.
  double next_double();
  double uniform(double lo, double hi);

  /// Standard normal via Box-Muller; the spare deviate is cached so the
  /// stream stays deterministic.
  double normal();

  /// Uniform integer in [0, n); unbiased via rejection.
  std::uint64_t next_below(std::uint64_t n);

private:
  std::array<std::uint64_t, 4> state_{};
  std::uint64_t seed_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace lfact
