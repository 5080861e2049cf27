#include "spca/sdp.hpp"

#include <cmath>
#include <string>

#include "spca/error.hpp"

namespace spca {

void SolverOptions::validate() const {
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw Error(ErrorCode::InvalidInput, "solver: rho must be >= 0");
  if (!(step > 0.0) || !std::isfinite(step)) throw Error(ErrorCode::InvalidInput, "solver: step must be > 0");
  if (max_iters < 1) throw Error(ErrorCode::InvalidInput, "solver: max_iters must be >= 1");
  if (!(tol_primal > 0.0) || !(tol_dual > 0.0))
    throw Error(ErrorCode::InvalidInput, "solver: tolerances must be > 0");
}

double sdp_objective(const SymMatrix& sigma, const SymMatrix& z, double rho) {
  return sigma.matrix().cwiseProduct(z.matrix()).sum() - rho * z.matrix().cwiseAbs().sum();
}

SdpSolution solve(const SymMatrix& sigma_hat, const SolverOptions& opts) {
  opts.validate();
  if (!sigma_hat.matrix().allFinite()) throw Error(ErrorCode::InvalidInput, "solve: non-finite covariance");
  const int p = sigma_hat.dim();
  const double tau = opts.step;
  const Matrix scaled_sigma = sigma_hat.matrix() / tau;
  const double shrink = opts.rho / tau;

  Matrix w = Matrix::Identity(p, p) / p;
  Matrix u = Matrix::Zero(p, p);
  Matrix basis;
  SdpSolution out;
  out.z_matrix = SymMatrix(w);

  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    const SymMatrix target(w - u);
    const EigenDecomposition eig = basis.size() == 0 ? eig_sym(target) : eig_sym(target, basis);
    basis = eig.vectors;
    const SymMatrix z = project_spectrahedron(eig);

    const SymMatrix w_next = soft_threshold(SymMatrix(z.matrix() + u + scaled_sigma), shrink);
    const Matrix gap = z.matrix() - w_next.matrix();
    u += gap;

    const double scale = 1.0 + z.hs_norm();
    const double r_primal = gap.norm() / scale;
    const double r_dual = tau * (w_next.matrix() - w).norm() / scale;
    w = w_next.matrix();

    if (!std::isfinite(r_primal) || !std::isfinite(r_dual) || !u.allFinite())
      throw SolverFailed("solve: non-finite iterate at iteration " + std::to_string(iter), r_primal,
                         r_dual, iter);

    out.z_matrix = z;
    out.iterations = iter;
    out.primal_residual = r_primal;
    out.dual_residual = r_dual;
    if (opts.record_trace) out.trace.push_back({sdp_objective(sigma_hat, z, opts.rho), r_primal, r_dual});
    if (r_primal <= opts.tol_primal && r_dual <= opts.tol_dual) {
      out.converged = true;
      break;
    }
  }
  out.objective = sdp_objective(sigma_hat, out.z_matrix, opts.rho);
  return out;
}

Vector certificate_support_vector(const SymMatrix& sigma_hat, const SpikedModel& model, double rho) {
  const int k = model.k();
  const auto& support = model.support();
  Matrix block(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      block(a, b) = sigma_hat(support[a], support[b]) - rho * model.signs()[a] * model.signs()[b];
  Vector v = max_eigvec(SymMatrix(block)).second;
  Vector s(k);
  for (int a = 0; a < k; ++a) s[a] = model.signs()[a];
  if (v.dot(s) < 0.0) v = -v;
  return v;
}

Certificate build_certificate(const SymMatrix& sigma_hat, const SpikedModel& model,
                              const Vector& z_hat_s, double rho, CertificateMode mode) {
  if (!(rho > 0.0)) throw Error(ErrorCode::InvalidInput, "build_certificate: rho must be > 0");
  if (sigma_hat.dim() != model.p()) throw Error(ErrorCode::InvalidInput, "build_certificate: dimension mismatch");
  if (z_hat_s.size() != model.k()) throw Error(ErrorCode::InvalidInput, "build_certificate: z_hat_s must have k entries");
  const double l1 = z_hat_s.lpNorm<1>();
  if (!(l1 > 0.0)) throw Error(ErrorCode::InvalidInput, "build_certificate: z_hat_s has zero l1 norm");

  const int p = model.p();
  const auto& support = model.support();
  const auto& comp = model.complement();
  const Matrix delta = (sigma_hat - build_covariance(model)).matrix();

  Matrix u = Matrix::Zero(p, p);
  for (std::size_t a = 0; a < support.size(); ++a)
    for (std::size_t b = 0; b < support.size(); ++b)
      u(support[a], support[b]) = model.signs()[a] * model.signs()[b];

  double offblock = 0.0;
  if (mode == CertificateMode::Strong) {
    const Vector z_tilde = z_hat_s / l1;
    for (int c : comp) {
      double projected = 0.0;
      for (std::size_t a = 0; a < support.size(); ++a) projected += delta(c, support[a]) * z_tilde[a];
      for (std::size_t a = 0; a < support.size(); ++a) {
        const double sgn = z_hat_s[a] > 0.0 ? 1.0 : (z_hat_s[a] < 0.0 ? -1.0 : 0.0);
        const double entry = projected * sgn / rho;
        u(c, support[a]) = u(support[a], c) = entry;
        offblock = std::max(offblock, std::fabs(entry));
      }
    }
  } else {
    for (int c : comp) {
      for (int s : support) {
        const double entry = delta(c, s) / rho;
        u(c, s) = u(s, c) = entry;
        offblock = std::max(offblock, std::fabs(entry));
      }
      for (int c2 : comp) {
        const double entry = delta(c, c2) / rho;
        u(c, c2) = entry;
        offblock = std::max(offblock, std::fabs(entry));
      }
    }
  }

  Certificate cert;
  cert.mode = mode;
  cert.u_matrix = SymMatrix(u);
  cert.complement_block_assembled = mode == CertificateMode::RankOnly;
  cert.max_abs_offblock = offblock;
  cert.z_hat = Vector::Zero(p);
  for (std::size_t a = 0; a < support.size(); ++a) cert.z_hat[support[a]] = z_hat_s[a];

  bool pattern = true;
  for (std::size_t a = 0; a < support.size(); ++a) {
    for (std::size_t b = 0; b < support.size(); ++b) {
      if (z_hat_s[a] == 0.0 || z_hat_s[b] == 0.0) continue;
      const double expected = (z_hat_s[a] > 0.0) == (z_hat_s[b] > 0.0) ? 1.0 : -1.0;
      if (u(support[a], support[b]) != expected) pattern = false;
    }
  }
  cert.blocks_valid = pattern && max_abs(cert.u_matrix.matrix()) <= 1.0 + 1e-9;

  // ẑ vanishes off the support, so only the S columns of Σ̂ − ρÛ matter.
  const Matrix m = sigma_hat.matrix() - rho * cert.u_matrix.matrix();
  const Vector mz = m * cert.z_hat;
  const double norm2 = cert.z_hat.squaredNorm();
  const double rayleigh = cert.z_hat.dot(mz) / norm2;
  cert.eigvec_residual = (mz - rayleigh * cert.z_hat).norm() / std::sqrt(norm2);
  cert.eigvec_check = cert.eigvec_residual <= 1e-6;
  return cert;
}

OptimalityReport verify_optimality(const SymMatrix& sigma_hat, const SymMatrix& z_solution, double rho,
                                   const Certificate& cert) {
  OptimalityReport report;
  const int p = sigma_hat.dim();
  if (cert.mode != CertificateMode::RankOnly || !cert.complement_block_assembled ||
      cert.u_matrix.dim() != p || cert.z_hat.size() != p || z_solution.dim() != p)
    return report;
  report.applicable = true;

  const Matrix& u = cert.u_matrix.matrix();
  Vector z = cert.z_hat;
  const double norm = z.norm();
  if (norm > 0.0) z /= norm;

  report.sign_pattern_ok = true;
  for (int i = 0; i < p; ++i) {
    if (std::fabs(z[i]) <= 1e-12) continue;
    for (int j = 0; j < p; ++j) {
      if (std::fabs(z[j]) <= 1e-12) continue;
      const double expected = (z[i] > 0.0) == (z[j] > 0.0) ? 1.0 : -1.0;
      if (std::fabs(u(i, j) - expected) > 1e-12) report.sign_pattern_ok = false;
    }
  }
  report.max_abs_entry = max_abs(u);
  report.sign_bound_ok = report.max_abs_entry <= 1.0 + 1e-9;

  const SymMatrix m(sigma_hat.matrix() - rho * u);
  const Vector mz = m.matrix() * z;
  report.rayleigh = z.dot(mz);
  report.eigvec_residual = (mz - report.rayleigh * z).norm();
  report.eigvec_ok = report.eigvec_residual <= 1e-6;

  const EigenDecomposition eig = eig_sym(m);
  report.top_eigenvalue = eig.values[0];
  report.eigengap = p > 1 ? eig.values[0] - eig.values[1] : INFINITY;
  report.degenerate_top = report.eigengap < 1e-9;
  Eigen::Index top = 1;
  if (report.degenerate_top)
    while (top < p && eig.values[0] - eig.values[top] < 1e-9) ++top;
  const auto v = eig.vectors.leftCols(top);
  const double outside = (z - v * (v.transpose() * z)).norm();
  report.maximal_ok = outside <= 1e-6 && report.rayleigh >= report.top_eigenvalue - 1e-6;

  const SymMatrix zz(z * z.transpose());
  report.certified_objective = sdp_objective(sigma_hat, zz, rho);
  report.solution_objective = sdp_objective(sigma_hat, z_solution, rho);
  report.solution_gap = (z_solution.matrix() - zz.matrix()).norm();
  return report;
}

}  // namespace spca
