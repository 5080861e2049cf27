#include "spca/decoders.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spca/error.hpp"

namespace spca {

SignedSupport SignedSupport::negated() const {
  SignedSupport out{values};
  for (auto& v : out.values) v = -v;
  return out;
}

SignedSupport signed_support(const Vector& u, double zero_tol) {
  if (!(zero_tol >= 0.0)) throw Error(ErrorCode::InvalidInput, "signed_support: zero_tol must be >= 0");
  SignedSupport out;
  out.values.resize(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i)
    out.values[i] = std::fabs(u[i]) > zero_tol ? (u[i] > 0.0 ? 1 : -1) : 0;
  return out;
}

std::vector<int> top_k_indices(const Vector& values, int k) {
  const int p = static_cast<int>(values.size());
  if (k < 1 || k > p) throw Error(ErrorCode::InvalidInput, "top_k: requires 1 <= k <= p");
  std::vector<int> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return values[a] > values[b]; });
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

DecodeResult diag_threshold_decode(const SymMatrix& sigma_hat, int k) {
  const Vector d = sigma_hat.matrix().diagonal();
  DecodeResult result;
  result.support = top_k_indices(d, k);
  ThresholdDiagnostics diag;
  if (k == sigma_hat.dim()) {
    diag.margin = INFINITY;
  } else {
    std::vector<double> sorted(d.data(), d.data() + d.size());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    diag.margin = sorted[k - 1] - sorted[k];
  }
  result.diagnostics = diag;
  return result;
}

double default_rho(double beta, int k) {
  if (!(beta > 0.0) || k < 1) throw Error(ErrorCode::InvalidInput, "default_rho: need beta > 0 and k >= 1");
  return beta / (2.0 * k);
}

int rank_estimate(const SymMatrix& z, double rel_tol) {
  const Vector values = eig_sym(z).values;
  const double cutoff = rel_tol * values[0];
  int rank = 0;
  for (Eigen::Index j = 0; j < values.size(); ++j)
    if (values[j] > cutoff) ++rank;
  return rank;
}

DecodeResult sdp_decode(const SymMatrix& sigma_hat, int k, double beta, const SdpDecodeOptions& opts) {
  if (!(beta > 0.0)) throw Error(ErrorCode::InvalidInput, "sdp_decode: beta must be > 0");
  if (k < 1 || k > sigma_hat.dim()) throw Error(ErrorCode::InvalidInput, "sdp_decode: requires 1 <= k <= p");

  SolverOptions solver = opts.solver;
  solver.rho = opts.rho.value_or(default_rho(beta, k));
  const SdpSolution sol = solve(sigma_hat, solver);
  if (!sol.converged)
    throw SolverFailed("sdp_decode: solver did not converge", sol.primal_residual, sol.dual_residual,
                       sol.iterations);

  const EigenDecomposition eig = eig_sym(sol.z_matrix);
  const Vector z_hat = eig.vectors.col(0);
  int rank = 0;
  for (Eigen::Index j = 0; j < eig.values.size(); ++j)
    if (eig.values[j] > opts.rank_tol * eig.values[0]) ++rank;

  DecodeResult result;
  result.support = top_k_indices(z_hat.cwiseAbs(), k);
  result.signed_support = signed_support(z_hat, opts.zero_tol.value_or(0.5 / std::sqrt(static_cast<double>(k))));
  SdpDiagnostics diag;
  diag.rank = rank;
  diag.iterations = sol.iterations;
  diag.primal_residual = sol.primal_residual;
  diag.dual_residual = sol.dual_residual;
  diag.objective = sol.objective;
  diag.rho = solver.rho;
  diag.z_hat = z_hat;
  diag.z_matrix = sol.z_matrix;
  result.diagnostics = std::move(diag);
  return result;
}

bool score(const DecodeResult& result, const SpikedModel& truth, ScoreMode mode) {
  if (mode == ScoreMode::Support) return result.support == truth.support();
  if (!result.signed_support)
    throw Error(ErrorCode::InvalidInput, "score: signed mode needs a signed support");
  const SignedSupport& got = *result.signed_support;
  if (static_cast<int>(got.values.size()) != truth.p())
    throw Error(ErrorCode::InvalidInput, "score: dimension mismatch");
  const SignedSupport expected = signed_support(truth.z_star());
  return got == expected || got == expected.negated();
}

}  // namespace spca
