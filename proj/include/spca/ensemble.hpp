#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "spca/numerics.hpp"
#include "spca/rng.hpp"

namespace spca {

// Rank-one spiked covariance Σ = β z* z*ᵀ + Γ, where z* has entries ±1/√k on
// `support` and Γ is the identity on the support and `gamma` (or the identity
// when absent) on the complement. Support positions are arbitrary; the
// complement block is indexed in increasing order of the off-support indices.
class SpikedModel {
 public:
  // Throws InvalidInput for inconsistent sizes, duplicate or out-of-range
  // support indices, signs outside {−1, +1}, or β ≤ 0.
  SpikedModel(int p, int k, double beta, std::vector<int> support, std::vector<int> signs,
              std::optional<SymMatrix> gamma = std::nullopt);

  // Support {0..k−1} with all-positive signs and identity base.
  static SpikedModel identity_leading(int p, int k, double beta);

  // Uniformly random support and signs drawn from `rng`, identity base.
  static SpikedModel random_identity(int p, int k, double beta, Rng& rng);

  int p() const noexcept { return p_; }
  int k() const noexcept { return k_; }
  double beta() const noexcept { return beta_; }
  // Sorted ascending; signs()[i] belongs to support()[i].
  const std::vector<int>& support() const noexcept { return support_; }
  const std::vector<int>& signs() const noexcept { return signs_; }
  const std::vector<int>& complement() const noexcept { return complement_; }
  const std::optional<SymMatrix>& gamma() const noexcept { return gamma_; }
  bool identity_base() const noexcept { return !gamma_.has_value(); }

  Vector z_star() const;
  bool in_support(int i) const;

 private:
  int p_;
  int k_;
  double beta_;
  std::vector<int> support_;
  std::vector<int> signs_;
  std::vector<int> complement_;
  std::optional<SymMatrix> gamma_;
};

struct AssumptionReport {
  double inf_op_norm_sqrt_gamma;  // ‖√Γ_{p−k}‖_{∞,∞}
  bool eig_gap_ok;                // λ_max ≤ min{1, λ_min + β/8}
  double lambda_max;
  double lambda_min;
};

struct SampleBatch {
  int n = 0;
  Matrix data;  // n × p, one sample per row
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  int p() const { return static_cast<int>(data.cols()); }
};

// Population covariance; throws ModelInvalid when the base violates the
// eigenvalue assumption.
SymMatrix build_covariance(const SpikedModel& m);

AssumptionReport validate_assumptions(const SpikedModel& m);

// Row i is √β vⁱ z* + √Γ gⁱ. Per row the draws are vⁱ first, then gⁱ in
// coordinate order.
SampleBatch sample(const SpikedModel& m, int n, Rng& rng);

// (1/n) Σ xⁱ xⁱᵀ, no centring.
SymMatrix sample_covariance(const SampleBatch& b);

// Σ̂ − Σ.
SymMatrix noise_matrix(const SampleBatch& b, const SpikedModel& m);

// Covariance of the uniform mixture over supports containing {0..k−2} plus
// one further index (all-positive signs). Requires 1 ≤ k < p.
SymMatrix mixture_covariance(int p, int k, double beta);

// Closed-form spectrum of mixture_covariance, descending, with multiplicities
// 1, p − k and k − 1.
Vector mixture_spectrum(int p, int k, double beta);

// Closed-form log det of mixture_covariance.
double mixture_log_det(int p, int k, double beta);

}  // namespace spca
