#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "spca/ensemble.hpp"
#include "spca/error.hpp"
#include "spca/sdp.hpp"
#include "support/oracles.hpp"

namespace spca {
namespace {

SolverOptions with_rho(double rho) {
  SolverOptions o;
  o.rho = rho;
  o.tol_primal = o.tol_dual = 1e-9;
  o.max_iters = 100000;
  return o;
}

void expect_feasible(const SymMatrix& z) {
  EXPECT_NEAR(z.trace(), 1.0, 1e-6);
  EXPECT_GE(eig_sym(z).values.minCoeff(), -1e-6);
}

TEST(SolverOptions, Validation) {
  SolverOptions o;
  EXPECT_NO_THROW(o.validate());
  o.rho = -0.1;
  EXPECT_THROW(o.validate(), Error);
  o = {};
  o.step = 0.0;
  EXPECT_THROW(o.validate(), Error);
  o = {};
  o.max_iters = 0;
  EXPECT_THROW(o.validate(), Error);
  o = {};
  o.tol_dual = 0.0;
  EXPECT_THROW(o.validate(), Error);
  EXPECT_THROW(solve(SymMatrix::identity(2), o), Error);
}

TEST(Objective, Definition) {
  Matrix s(2, 2), z(2, 2);
  s << 2, 1, 1, 3;
  z << 0.5, -0.25, -0.25, 0.5;
  EXPECT_DOUBLE_EQ(sdp_objective(SymMatrix(s), SymMatrix(z), 0.2), 2.5 - 0.5 - 0.2 * 1.5);
}

// Z = diag(1, 0) attains 2 − ρ, and tr(ΣZ) − ρ‖Z‖₁ ≤ tr(ΣZ) − ρ tr(Z) ≤ 2 − ρ on the spectrahedron.
TEST(Solve, TwoByTwoAnalytic) {
  const SdpSolution sol = solve(SymMatrix::diagonal(oracle::vec({2, 1})), with_rho(0.1));
  ASSERT_TRUE(sol.converged);
  EXPECT_NEAR(sol.objective, 1.9, 1e-5);
  EXPECT_LE((sol.z_matrix.matrix() - Matrix(oracle::vec({1, 0}).asDiagonal())).norm(), 1e-5);
}

// Brute-force grid over the 2×2 spectrahedron parametrized by (a, b, c):
// Z = [[a, c], [c, 1 − a]] with c² ≤ a(1 − a).
TEST(Solve, TwoByTwoGridOracle) {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix s = oracle::random_covariance(rng, 2, 3);
    const double rho = 0.05 + 0.4 * rng.uniform();
    double best = -1e300;
    const int grid = 400;
    for (int i = 0; i <= grid; ++i) {
      const double a = double(i) / grid;
      const double cmax = std::sqrt(a * (1 - a));
      for (int j = -grid; j <= grid; ++j) {
        const double c = cmax * j / grid;
        Matrix z(2, 2);
        z << a, c, c, 1 - a;
        best = std::max(best, oracle::penalized_objective(s, z, rho));
      }
    }
    const SdpSolution sol = solve(SymMatrix(s), with_rho(rho));
    ASSERT_TRUE(sol.converged);
    // The grid optimum is a lower bound within O(grid⁻¹) of the truth.
    EXPECT_GE(sol.objective, best - 1e-9);
    EXPECT_LE(sol.objective, best + 1e-2 * std::max(1.0, std::fabs(best)));
  }
}

TEST(Solve, IdentityHasUnitObjective) {
  const SdpSolution sol = solve(SymMatrix::identity(5), with_rho(0.0));
  EXPECT_TRUE(sol.converged);
  EXPECT_NEAR(sol.objective, 1.0, 1e-6);
  expect_feasible(sol.z_matrix);
}

TEST(Solve, ZeroPenaltyGivesTopEigenvectorOuterProduct) {
  Rng rng(44);
  for (int trial = 0; trial < 10; ++trial) {
    const int p = 2 + static_cast<int>(rng.below(14));
    const Matrix s = oracle::random_symmetric(rng, p);
    const auto [lambda, v] = oracle::power_iteration(s);
    const SdpSolution sol = solve(SymMatrix(s), with_rho(0.0));
    ASSERT_TRUE(sol.converged);
    EXPECT_NEAR(sol.objective, lambda, 1e-6);
    EXPECT_LE((sol.z_matrix.matrix() - v * v.transpose()).norm(), 1e-6);
  }
}

TEST(Solve, MatchesInteriorPointReferences) {
  const auto refs = oracle::load_sdp_references(std::string(SPCA_TEST_DATA_DIR) + "/sdp_reference_8x8.csv");
  ASSERT_EQ(refs.size(), 20u);
  for (const auto& r : refs) {
    const SdpSolution sol = solve(SymMatrix(r.sigma), with_rho(r.rho));
    ASSERT_TRUE(sol.converged) << r.id;
    EXPECT_NEAR(sol.objective, r.objective, 1e-5) << r.id;
    expect_feasible(sol.z_matrix);
  }
}

TEST(Solve, SubgradientOracleNeverBeatsSolver) {
  const auto refs = oracle::load_sdp_references(std::string(SPCA_TEST_DATA_DIR) + "/sdp_reference_8x8.csv");
  for (int i = 0; i < 3; ++i) {
    const auto& r = refs[i];
    const double sub = oracle::projected_subgradient(r.sigma, r.rho, 3000);
    const SdpSolution sol = solve(SymMatrix(r.sigma), with_rho(r.rho));
    EXPECT_LE(sub, sol.objective + 1e-9);
    EXPECT_GE(sub, sol.objective - 5e-2);
  }
}

// The window is the last 100 iterations, clipped to the second half of the
// run so that short runs exclude their initial transient.
TEST(Solve, ObjectiveSettlesOverLastIterations) {
  Rng rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix s = oracle::random_covariance(rng, 12, 20);
    SolverOptions o = with_rho(0.1 + 0.1 * trial);
    o.record_trace = true;
    const SdpSolution sol = solve(SymMatrix(s), o);
    ASSERT_TRUE(sol.converged);
    ASSERT_EQ(static_cast<int>(sol.trace.size()), sol.iterations);
    const std::size_t start = sol.trace.size() - std::min<std::size_t>(100, sol.trace.size() / 2);
    for (std::size_t t = start + 1; t < sol.trace.size(); ++t)
      EXPECT_GE(sol.trace[t].objective, sol.trace[t - 1].objective - 1e-9) << trial << " " << t;
  }
}

TEST(Solve, L1MassNonincreasingInRho) {
  Rng rng(13);
  for (int trial = 0; trial < 3; ++trial) {
    const Matrix s = oracle::random_covariance(rng, 10, 15);
    double prev = 1e300;
    for (int i = 0; i <= 10; ++i) {
      const SdpSolution sol = solve(SymMatrix(s), with_rho(0.05 * i));
      ASSERT_TRUE(sol.converged);
      const double mass = sol.z_matrix.matrix().cwiseAbs().sum();
      EXPECT_LE(mass, prev + 1e-6) << trial << " " << i;
      prev = mass;
    }
  }
}

TEST(Solve, FeasibleOnRandomInstances) {
  Rng rng(90);
  for (int trial = 0; trial < 20; ++trial) {
    const int p = 3 + static_cast<int>(rng.below(15));
    const SdpSolution sol = solve(SymMatrix(oracle::random_symmetric(rng, p)), with_rho(rng.uniform()));
    expect_feasible(sol.z_matrix);
  }
}

TEST(Solve, IterationCapReportsNonConvergence) {
  Rng rng(2);
  SolverOptions o = with_rho(0.2);
  o.max_iters = 2;
  const SdpSolution sol = solve(SymMatrix(oracle::random_covariance(rng, 10, 12)), o);
  EXPECT_FALSE(sol.converged);
  EXPECT_EQ(sol.iterations, 2);
  expect_feasible(sol.z_matrix);
}

TEST(Solve, NonFiniteInputFails) {
  Matrix s = Matrix::Identity(3, 3);
  s(0, 1) = s(1, 0) = std::nan("");
  try {
    solve(SymMatrix(s), with_rho(0.1));
    FAIL() << "expected SolverFailed";
  } catch (const SolverFailed& e) {
    EXPECT_EQ(e.code(), ErrorCode::SolverFailed);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidInput);
  }
}

TEST(Certificate, NoiselessRankOnly) {
  const SpikedModel m(8, 3, 3.0, {1, 4, 6}, {1, -1, 1});
  const SymMatrix sigma = build_covariance(m);
  const double rho = 0.5;
  const Vector zs = certificate_support_vector(sigma, m, rho);
  Vector zstar(3);
  for (int a = 0; a < 3; ++a) zstar[a] = m.signs()[a] / std::sqrt(3.0);
  EXPECT_LE((zs - zstar).norm(), 1e-12);

  const Certificate c = build_certificate(sigma, m, zs, rho, CertificateMode::RankOnly);
  EXPECT_TRUE(c.blocks_valid);
  EXPECT_TRUE(c.eigvec_check);
  EXPECT_TRUE(c.complement_block_assembled);
  EXPECT_EQ(c.max_abs_offblock, 0.0);
  for (int i : m.complement())
    for (int j = 0; j < 8; ++j) EXPECT_EQ(c.u_matrix(i, j), 0.0);
  EXPECT_EQ(max_abs(c.u_matrix.matrix()), 1.0);

  const SdpSolution sol = solve(sigma, with_rho(rho));
  const OptimalityReport r = verify_optimality(sigma, sol.z_matrix, rho, c);
  EXPECT_TRUE(r.passed());
  EXPECT_GE(r.certified_objective, r.solution_objective - 1e-5);
  EXPECT_LE(r.solution_gap, 1e-5);
}

TEST(Certificate, SupportBlockIsSignOuterProduct) {
  Rng rng(17);
  const SpikedModel m = SpikedModel::random_identity(12, 4, 3.0, rng);
  const SymMatrix sh = sample_covariance(sample(m, 200, rng));
  for (auto mode : {CertificateMode::Strong, CertificateMode::RankOnly}) {
    const Certificate c = build_certificate(sh, m, certificate_support_vector(sh, m, 0.375), 0.375, mode);
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = 0; b < 4; ++b)
        EXPECT_EQ(c.u_matrix(m.support()[a], m.support()[b]), m.signs()[a] * m.signs()[b]);
  }
}

TEST(Certificate, StrongModeOffBlockFormula) {
  Rng rng(5);
  const SpikedModel m = SpikedModel::random_identity(10, 3, 3.0, rng);
  const SymMatrix sh = sample_covariance(sample(m, 150, rng));
  const double rho = 0.5;
  const Vector zs = certificate_support_vector(sh, m, rho);
  const Certificate c = build_certificate(sh, m, zs, rho, CertificateMode::Strong);
  EXPECT_FALSE(c.complement_block_assembled);
  const Matrix delta = (sh - build_covariance(m)).matrix();
  double largest = 0.0;
  for (int r : m.complement()) {
    double proj = 0.0;
    for (int a = 0; a < 3; ++a) proj += delta(r, m.support()[a]) * zs[a] / zs.lpNorm<1>();
    for (int a = 0; a < 3; ++a) {
      const double expected = proj * (zs[a] > 0 ? 1.0 : -1.0) / rho;
      EXPECT_NEAR(c.u_matrix(r, m.support()[a]), expected, 1e-14);
      largest = std::max(largest, std::fabs(expected));
    }
    for (int r2 : m.complement()) EXPECT_EQ(c.u_matrix(r, r2), 0.0);
  }
  EXPECT_NEAR(c.max_abs_offblock, largest, 1e-14);
  EXPECT_FALSE(verify_optimality(sh, 0.1 * SymMatrix::identity(10), rho, c).applicable);
}

TEST(Certificate, LargeSampleOffBlockIsValid) {
  Rng rng(61);
  const SpikedModel m = SpikedModel::random_identity(20, 3, 3.0, rng);
  const SymMatrix sh = sample_covariance(sample(m, 20000, rng));
  const double rho = 0.5;
  const Certificate c = build_certificate(sh, m, certificate_support_vector(sh, m, rho), rho, CertificateMode::Strong);
  EXPECT_TRUE(c.blocks_valid);
  EXPECT_LT(c.max_abs_offblock, 1.0);
}

TEST(Certificate, ConstructedViolationIsReported) {
  const SpikedModel m(6, 2, 3.0, {0, 1}, {1, 1});
  const SymMatrix sigma = build_covariance(m);
  Certificate c = build_certificate(sigma, m, certificate_support_vector(sigma, m, 0.5), 0.5, CertificateMode::RankOnly);
  Matrix u = c.u_matrix.matrix();
  u(3, 4) = u(4, 3) = 1.5;
  c.u_matrix = SymMatrix(u);
  const OptimalityReport r = verify_optimality(sigma, SymMatrix(c.z_hat * c.z_hat.transpose()), 0.5, c);
  EXPECT_FALSE(r.sign_bound_ok);
  EXPECT_DOUBLE_EQ(r.max_abs_entry, 1.5);
  EXPECT_FALSE(r.passed());
}

TEST(Certificate, WrongSignPatternIsReported) {
  const SpikedModel m(6, 2, 3.0, {0, 1}, {1, 1});
  const SymMatrix sigma = build_covariance(m);
  Vector zs = oracle::vec({1, -1}) / std::sqrt(2.0);
  const Certificate c = build_certificate(sigma, m, zs, 0.5, CertificateMode::RankOnly);
  EXPECT_FALSE(c.blocks_valid);
  EXPECT_FALSE(verify_optimality(sigma, SymMatrix(c.z_hat * c.z_hat.transpose()), 0.5, c).sign_pattern_ok);
}

TEST(Certificate, InputErrors) {
  const SpikedModel m(6, 2, 3.0, {0, 1}, {1, 1});
  const SymMatrix sigma = build_covariance(m);
  EXPECT_THROW(build_certificate(sigma, m, oracle::vec({0, 0}), 0.5, CertificateMode::RankOnly), Error);
  EXPECT_THROW(build_certificate(sigma, m, oracle::vec({1, 0}), 0.0, CertificateMode::RankOnly), Error);
  EXPECT_THROW(build_certificate(sigma, m, oracle::vec({1, 0, 0}), 0.5, CertificateMode::RankOnly), Error);
}

// Whenever the certificate passes, ẑẑᵀ is at least as good as the solver's Ẑ.
TEST(Certificate, PassingCertificateIsOptimal) {
  Rng base(300);
  int passed = 0;
  for (int trial = 0; trial < 20; ++trial) {
    Rng rng = base.split(trial);
    const SpikedModel m = SpikedModel::random_identity(20, 3, 3.0, rng);
    const SymMatrix sh = sample_covariance(sample(m, 2000, rng));
    const double rho = 0.5;
    const Certificate c = build_certificate(sh, m, certificate_support_vector(sh, m, rho), rho, CertificateMode::RankOnly);
    const SdpSolution sol = solve(sh, with_rho(rho));
    const OptimalityReport r = verify_optimality(sh, sol.z_matrix, rho, c);
    if (!r.passed()) continue;
    ++passed;
    EXPECT_GE(r.certified_objective, sol.objective - 1e-5);
  }
  EXPECT_GT(passed, 0);
}

}  // namespace
}  // namespace spca
