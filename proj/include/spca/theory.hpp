#pragma once

#include <cstdint>

namespace spca {

// (n, p, k) triplet; requires n ≥ 1, 1 ≤ k and p − k ≥ 2.
struct ScalingPoint {
  double n;
  int p;
  int k;
};

// n / (k² ln(p − k)).
double theta_dia(const ScalingPoint& s);
// n / (k ln(p − k)).
double theta_sdp(const ScalingPoint& s);

// (1 + β)/β²: below this θ_sdp every decoder errs with probability ≥ 1/2.
double fano_threshold(double beta);

// fano_threshold(β) · k · ln(p − k).
double min_samples_info(int p, int k, double beta);

// Central χ²_d deviations that each have probability at most e^{−x}:
//   P[X − d ≥ 2√(dx) + 2x] ≤ e^{−x},  P[X − d ≤ −2√(dx)] ≤ e^{−x}.
struct ChiSquareBounds {
  double upper_dev;
  double lower_dev;
  double bound;
};
ChiSquareBounds chisq_upper_bounds(double d, double x);

// P[X − d ≥ d·x] ≤ exp(−(3/16) d x²) for 0 ≤ x < 1/2.
struct TailBound {
  double threshold;
  double bound;
};
TailBound chisq_relative_bound(double d, double x);

// Noncentral χ²_d(ν):
//   P[X ≥ (d + ν) + 2√((d + 2ν)x) + 2x] ≤ e^{−x}
//   P[X ≤ (d + ν) − 2√((d + 2ν)x)]      ≤ e^{−x}
struct NoncentralBounds {
  double upper_threshold;
  double lower_threshold;
  double bound;
};
NoncentralBounds noncentral_chisq_bounds(double d, double nu, double x);

// Weakened upper form valid for ν ≤ C·d and δ ∈ (0, 1):
//   P[X ≥ (d + ν) + 4d√δ] ≤ exp(−δ d / (1 + 2C)).
TailBound noncentral_weakened_bound(double d, double nu, double delta, double c);

// Exact P[χ²_n / n > 1 + t] for even n via the finite Poisson-type series,
// summed in the log domain.
double chisq_survival_even(int n, double t);

// survival(n, t) ≥ (c/√n) exp(−n t²/2).
bool lemma4_lower_bound_check(int n, double t, double c);

}  // namespace spca
