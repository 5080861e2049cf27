#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace spca {

// Counter-based generator (Philox4x32-10). The output stream is a pure
// function of (seed, stream, counter), so independent streams can be derived
// for parallel work without sharing state.
//
// Gaussian variates use the inverse normal CDF (Wichura AS241) applied to one
// open-interval uniform per draw. This is part of the reproducibility
// contract: changing it changes every regression value downstream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  // Independent generator on a stream derived from this one and `id`.
  Rng split(std::uint64_t id) const;

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1).
  double uniform();
  double gaussian();
  // Gamma(shape, 1) by Marsaglia-Tsang; shape > 0.
  double gamma(double shape);
  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  // UniformRandomBitGenerator interface.
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return next_u64(); }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

// n i.i.d. standard normal draws.
std::vector<double> gauss(Rng& rng, std::size_t n);

// Standard normal quantile, accurate to about 1e-16 relative.
double normal_quantile(double u);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace spca
