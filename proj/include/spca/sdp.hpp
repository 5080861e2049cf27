#pragma once

#include <vector>

#include "spca/ensemble.hpp"
#include "spca/numerics.hpp"

namespace spca {

struct SolverOptions {
  double rho = 0.0;      // ℓ1 penalty weight
  double step = 1.0;     // ADMM penalty τ
  int max_iters = 20000;
  double tol_primal = 1e-7;
  double tol_dual = 1e-7;
  bool record_trace = false;

  // Throws InvalidInput unless rho ≥ 0, step > 0, max_iters ≥ 1 and both
  // tolerances are positive.
  void validate() const;
};

struct IterationRecord {
  double objective;
  double primal_residual;
  double dual_residual;
};

struct SdpSolution {
  SymMatrix z_matrix{SymMatrix::zero(1)};
  double objective = 0.0;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  bool converged = false;
  std::vector<IterationRecord> trace;  // filled when record_trace is set
};

// tr(ΣZ) − ρ Σ_ij |Z_ij|.
double sdp_objective(const SymMatrix& sigma, const SymMatrix& z, double rho);

// Maximizes tr(Σ̂Z) − ρ‖Z‖₁ over the spectrahedron by ADMM on the split
// Z (spectrahedron) = W (ℓ1 prox), starting from Z = W = I/p, U = 0:
//
//   Z ← Proj(W − U)
//   W ← soft(Z + U + Σ̂/τ, ρ/τ)
//   U ← U + Z − W
//
// Residuals are ‖Z − W‖ and τ‖W − W_prev‖, both over (1 + ‖Z‖), in the
// Hilbert–Schmidt norm. The reported matrix and objective are the projected
// (feasible) iterate. Throws SolverFailed if an iterate goes non-finite;
// running out of iterations returns converged = false.
SdpSolution solve(const SymMatrix& sigma_hat, const SolverOptions& opts);

enum class CertificateMode { Strong, RankOnly };

struct Certificate {
  CertificateMode mode = CertificateMode::RankOnly;
  SymMatrix u_matrix{SymMatrix::zero(1)};
  Vector z_hat;  // (ẑ_S, 0) in the original index space
  bool blocks_valid = false;
  bool eigvec_check = false;
  double max_abs_offblock = 0.0;
  double eigvec_residual = 0.0;
  // False in strong mode: the complement block depends on the test vector
  // and is left at zero.
  bool complement_block_assembled = false;
};

// Leading eigenvector of Σ̂_SS − ρ sign(z*_S) sign(z*_S)ᵀ, ordered like
// model.support(), sign-aligned with z*_S.
Vector certificate_support_vector(const SymMatrix& sigma_hat, const SpikedModel& model, double rho);

// Assembles the sign matrix Û around ẑ = (z_hat_s, 0):
//   Û_SS   = sign(z*_S) sign(z*_S)ᵀ
//   strong:   Û_ScS = (1/ρ)(Δ_ScS ẑ_S/‖ẑ_S‖₁) sign(ẑ_S)ᵀ
//   rankonly: Û_ScS = Δ_ScS/ρ,  Û_ScSc = Δ_ScSc/ρ
// with Δ = Σ̂ − Σ. Throws InvalidInput when ρ ≤ 0, z_hat_s has the wrong
// length, or ‖ẑ_S‖₁ = 0.
Certificate build_certificate(const SymMatrix& sigma_hat, const SpikedModel& model,
                              const Vector& z_hat_s, double rho, CertificateMode mode);

struct OptimalityReport {
  bool applicable = false;        // rankonly certificate with matching dims
  bool sign_pattern_ok = false;   // Û_ij = sign(ẑ_i)sign(ẑ_j) on ẑ's support
  bool sign_bound_ok = false;     // ‖Û‖_max ≤ 1 + 1e−9
  double max_abs_entry = 0.0;
  bool eigvec_ok = false;         // ẑ is an eigenvector of Σ̂ − ρÛ
  bool maximal_ok = false;        // ... for its largest eigenvalue
  double eigvec_residual = 0.0;
  double top_eigenvalue = 0.0;
  double rayleigh = 0.0;          // ẑᵀ(Σ̂ − ρÛ)ẑ
  double eigengap = 0.0;
  bool degenerate_top = false;
  double certified_objective = 0.0;  // objective at ẑẑᵀ
  double solution_objective = 0.0;   // objective at the supplied Z
  double solution_gap = 0.0;         // ‖Z − ẑẑᵀ‖_HS

  bool passed() const { return applicable && sign_pattern_ok && sign_bound_ok && eigvec_ok && maximal_ok; }
};

OptimalityReport verify_optimality(const SymMatrix& sigma_hat, const SymMatrix& z_solution,
                                   double rho, const Certificate& cert);

}  // namespace spca
