#include "spca/theory.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "spca/error.hpp"

namespace spca {

namespace {

double log_complement(const ScalingPoint& s) {
  if (!(s.n >= 1.0) || s.k < 1 || s.p - s.k < 2)
    throw Error(ErrorCode::InvalidInput, "scaling point requires n >= 1, k >= 1, p - k >= 2");
  return std::log(static_cast<double>(s.p - s.k));
}

}  // namespace

double theta_dia(const ScalingPoint& s) {
  const double lg = log_complement(s);
  return s.n / (static_cast<double>(s.k) * s.k * lg);
}

double theta_sdp(const ScalingPoint& s) {
  const double lg = log_complement(s);
  return s.n / (s.k * lg);
}

double fano_threshold(double beta) {
  if (!(beta > 0.0)) throw Error(ErrorCode::InvalidInput, "fano_threshold: beta must be > 0");
  return (1.0 + beta) / (beta * beta);
}

double min_samples_info(int p, int k, double beta) {
  const double lg = log_complement({1.0, p, k});
  return fano_threshold(beta) * k * lg;
}

ChiSquareBounds chisq_upper_bounds(double d, double x) {
  if (!(d >= 1.0) || !(x >= 0.0)) throw Error(ErrorCode::InvalidInput, "chisq bounds: need d >= 1, x >= 0");
  const double root = 2.0 * std::sqrt(d * x);
  return {root + 2.0 * x, root, std::exp(-x)};
}

TailBound chisq_relative_bound(double d, double x) {
  if (!(d >= 1.0) || !(x >= 0.0 && x < 0.5))
    throw Error(ErrorCode::InvalidInput, "chisq relative bound: need d >= 1, 0 <= x < 1/2");
  return {d * x, std::exp(-3.0 / 16.0 * d * x * x)};
}

NoncentralBounds noncentral_chisq_bounds(double d, double nu, double x) {
  if (!(d >= 1.0) || !(nu >= 0.0) || !(x > 0.0))
    throw Error(ErrorCode::InvalidInput, "noncentral bounds: need d >= 1, nu >= 0, x > 0");
  const double spread = 2.0 * std::sqrt((d + 2.0 * nu) * x);
  return {d + nu + spread + 2.0 * x, d + nu - spread, std::exp(-x)};
}

TailBound noncentral_weakened_bound(double d, double nu, double delta, double c) {
  if (!(d >= 1.0) || !(nu >= 0.0) || !(c > 0.0) || !(delta > 0.0 && delta < 1.0))
    throw Error(ErrorCode::InvalidInput, "weakened bound: need d >= 1, nu >= 0, C > 0, 0 < delta < 1");
  if (nu > c * d) throw Error(ErrorCode::InvalidInput, "weakened bound: requires nu <= C d");
  return {d + nu + 4.0 * d * std::sqrt(delta), std::exp(-delta * d / (1.0 + 2.0 * c))};
}

double chisq_survival_even(int n, double t) {
  if (n < 2 || n % 2 != 0) throw Error(ErrorCode::InvalidInput, "chisq_survival_even: n must be even and >= 2");
  if (!(t > -1.0)) throw Error(ErrorCode::InvalidInput, "chisq_survival_even: t must be > -1");
  const double x = 0.5 * n * (1.0 + t);
  const int terms = n / 2;
  const double log_x = std::log(x);
  auto log_term = [&](int i) { return -x + i * log_x - std::lgamma(i + 1.0); };

  if (x < terms) {
    // Below the mean the survival is close to one; sum the complementary
    // Poisson tail Σ_{i ≥ n/2} instead, whose terms shrink by x / i.
    const double first = log_term(terms);
    double sum = 0.0, term = 1.0;
    for (int i = terms; term > 1e-18 * sum; ++i) {
      sum += term;
      term *= x / (i + 1);
    }
    return std::clamp(1.0 - std::exp(first + std::log(sum)), 0.0, 1.0);
  }

  std::vector<double> logs(terms);
  for (int i = 0; i < terms; ++i) logs[i] = log_term(i);
  const double peak = *std::max_element(logs.begin(), logs.end());
  double sum = 0.0;
  for (double l : logs) sum += std::exp(l - peak);
  return std::clamp(std::exp(peak + std::log(sum)), 0.0, 1.0);
}

bool lemma4_lower_bound_check(int n, double t, double c) {
  return chisq_survival_even(n, t) >= c / std::sqrt(static_cast<double>(n)) * std::exp(-0.5 * n * t * t);
}

}  // namespace spca
