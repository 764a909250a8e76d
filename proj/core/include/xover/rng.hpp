#pragma once

#include <cstdint>
#include <random>

#include "xover/errors.hpp"
#include "xover/numerics.hpp"

namespace xover::rng {

// splitmix64 finalizer; used to decorrelate derived seeds.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Deterministic child seed for stream `index` under `master`.  Replications
// and grid cells each get their own stream so that results do not depend on
// scheduling or thread count.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 0x632BE59BD9B4E019ull));
}

// A self-contained random stream.  mt19937_64 is fully specified by the
// standard, so sequences are reproducible across platforms and compilers.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t bits() { return eng_(); }

  // Uniform on the open interval (0,1); never returns an endpoint, which
  // keeps quantile-based transforms finite.
  double uniform01() {
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() { return numerics::normal_quantile_fast(uniform01()); }

  bool bernoulli(double p) {
    if (!(p >= 0.0) || !(p <= 1.0))
      throw InvalidInput("bernoulli probability outside [0,1]");
    return uniform01() < p;
  }

  // Uniform index in [0, n).
  std::size_t uniform_below(std::size_t n) {
    if (n == 0) throw InvalidInput("uniform_below(0)");
    auto idx = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
    return idx < n ? idx : n - 1;  // guards the rounding edge at u ~ 1
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace xover::rng
