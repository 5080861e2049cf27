#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "spca/ensemble.hpp"
#include "spca/numerics.hpp"
#include "spca/sdp.hpp"

namespace spca {

// Entries in {−1, 0, +1}.
struct SignedSupport {
  std::vector<int> values;

  bool operator==(const SignedSupport&) const = default;
  SignedSupport negated() const;
};

struct ThresholdDiagnostics {
  double margin = 0.0;  // D_(p−k+1) − D_(p−k); +inf when k = p
};

struct SdpDiagnostics {
  int rank = 0;  // eigenvalues of Ẑ above rank_tol · λ_max(Ẑ)
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double objective = 0.0;
  double rho = 0.0;
  Vector z_hat;  // leading eigenvector of Ẑ
  SymMatrix z_matrix{SymMatrix::zero(1)};
};

struct DecodeResult {
  std::vector<int> support;  // size k, ascending
  std::optional<SignedSupport> signed_support;
  std::variant<ThresholdDiagnostics, SdpDiagnostics> diagnostics;
};

// Entry i is sign(u_i) when |u_i| > zero_tol, else 0.
SignedSupport signed_support(const Vector& u, double zero_tol = 0.0);

// Indices of the k largest values, ties broken towards the lower index,
// returned ascending.
std::vector<int> top_k_indices(const Vector& values, int k);

// Keeps the k largest diagonal entries of Σ̂.
DecodeResult diag_threshold_decode(const SymMatrix& sigma_hat, int k);

struct SdpDecodeOptions {
  SolverOptions solver;               // solver.rho is replaced by `rho`
  std::optional<double> rho;          // default β/(2k)
  std::optional<double> zero_tol;     // default 1/(2√k)
  double rank_tol = 1e-6;             // relative to λ_max(Ẑ)
};

double default_rho(double beta, int k);

// Solves the penalized SDP and reads the support off ẑ = v_max(Ẑ). Throws
// SolverFailed when the solver does not converge.
DecodeResult sdp_decode(const SymMatrix& sigma_hat, int k, double beta,
                        const SdpDecodeOptions& opts = {});

enum class ScoreMode { Support, Signed };

// Support: exact set equality with S(z*). Signed: equality with S±(z*) or its
// global negation; throws InvalidInput if the result carries no signs.
bool score(const DecodeResult& result, const SpikedModel& truth, ScoreMode mode);

// Number of eigenvalues of `z` above rel_tol · λ_max.
int rank_estimate(const SymMatrix& z, double rel_tol);

}  // namespace spca
