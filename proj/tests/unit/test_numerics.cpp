#include <gtest/gtest.h>

#include <cmath>

#include "spca/ensemble.hpp"
#include "spca/error.hpp"
#include "spca/numerics.hpp"
#include "support/oracles.hpp"

namespace spca {
namespace {

void expect_valid_decomposition(const SymMatrix& a, const EigenDecomposition& e) {
  const int n = a.dim();
  const Matrix rebuilt = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
  EXPECT_LE((rebuilt - a.matrix()).norm(), 1e-10 * (1.0 + a.hs_norm()));
  EXPECT_LE((e.vectors.transpose() * e.vectors - Matrix::Identity(n, n)).norm(), 1e-10);
  for (int j = 0; j + 1 < n; ++j) EXPECT_GE(e.values[j], e.values[j + 1]);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (std::fabs(e.vectors(i, j)) > 1e-12) {
        EXPECT_GT(e.vectors(i, j), 0.0);
        break;
      }
    }
  }
}

TEST(EigSym, Identity) {
  const auto e = eig_sym(SymMatrix::identity(3));
  EXPECT_EQ(e.values, Vector::Ones(3));
  expect_valid_decomposition(SymMatrix::identity(3), e);
}

TEST(EigSym, DiagonalIsPermutedBasis) {
  const SymMatrix a = SymMatrix::diagonal(oracle::vec({3, 1, 2}));
  const auto e = eig_sym(a);
  EXPECT_EQ(e.values, oracle::vec({3, 2, 1}));
  EXPECT_EQ(e.vectors.col(0), oracle::vec({1, 0, 0}));
  EXPECT_EQ(e.vectors.col(1), oracle::vec({0, 0, 1}));
  EXPECT_EQ(e.vectors.col(2), oracle::vec({0, 1, 0}));
}

TEST(EigSym, MixtureCovarianceSpectrum) {
  const auto e = eig_sym(mixture_covariance(5, 2, 3.0));
  const double expected[] = {2.875, 1.375, 1.375, 1.375, 1.0};
  for (int j = 0; j < 5; ++j) EXPECT_NEAR(e.values[j], expected[j], 1e-12);
}

TEST(EigSym, RandomMatricesSatisfyInvariants) {
  Rng rng(101);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(50));
    const SymMatrix a(oracle::random_symmetric(rng, n));
    expect_valid_decomposition(a, eig_sym(a));
    if (HasFailure()) FAIL() << "trial " << trial << " n=" << n;
  }
}

TEST(EigSym, RepeatedEigenvaluesStillOrthonormal) {
  Rng rng(7);
  const Matrix q = Eigen::HouseholderQR<Matrix>(oracle::random_matrix(rng, 8, 8)).householderQ();
  Vector d(8);
  d << 2, 2, 2, 1, 1, 0, 0, 0;
  const SymMatrix a(q * d.asDiagonal() * q.transpose());
  const auto e = eig_sym(a);
  expect_valid_decomposition(a, e);
  for (int j = 0; j < 8; ++j) EXPECT_NEAR(e.values[j], (j < 3 ? 2.0 : j < 5 ? 1.0 : 0.0), 1e-12);
}

TEST(EigSym, WarmStartMatchesColdStart) {
  Rng rng(8);
  const SymMatrix a(oracle::random_symmetric(rng, 20));
  const SymMatrix nearby(a.matrix() + 1e-3 * oracle::random_symmetric(rng, 20));
  const auto cold = eig_sym(nearby);
  const auto warm = eig_sym(nearby, eig_sym(a).vectors);
  EXPECT_LE((cold.values - warm.values).norm(), 1e-12);
  expect_valid_decomposition(nearby, warm);
}

TEST(EigSym, Deterministic) {
  Rng rng(9);
  const SymMatrix a(oracle::random_symmetric(rng, 15));
  const auto e1 = eig_sym(a);
  const auto e2 = eig_sym(a);
  EXPECT_EQ(e1.values, e2.values);
  EXPECT_EQ(e1.vectors, e2.vectors);
}

TEST(EigSym, RejectsNonFinite) {
  Matrix m = Matrix::Identity(3, 3);
  m(1, 2) = NAN;
  try {
    eig_sym(SymMatrix(m));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidInput);
  }
}

TEST(SymMatrix, ConstructionSymmetrizesExactly) {
  Rng rng(10);
  const SymMatrix a(oracle::random_matrix(rng, 9, 9));
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) EXPECT_EQ(a(i, j), a(j, i));
  EXPECT_THROW(SymMatrix(Matrix(2, 3)), Error);
  EXPECT_THROW(SymMatrix(Matrix(0, 0)), Error);
}

TEST(MaxEigvec, Diagonal) {
  const auto [lambda, v] = max_eigvec(SymMatrix::diagonal(oracle::vec({3, 1, 2})));
  EXPECT_EQ(lambda, 3.0);
  EXPECT_EQ(v, oracle::vec({1, 0, 0}));
}

TEST(MaxEigvec, RankOneShiftOfIdentity) {
  const Vector z = SpikedModel(6, 3, 3.0, {1, 3, 4}, {1, -1, 1}).z_star();
  const auto [lambda, v] = max_eigvec(SymMatrix(3.0 * z * z.transpose() + Matrix::Identity(6, 6)));
  EXPECT_NEAR(lambda, 4.0, 1e-12);
  // First nonzero entry of z is positive, so the sign convention agrees.
  EXPECT_LE((v - z).norm(), 1e-12);
}

TEST(MaxEigvec, MatchesPowerIteration) {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const SymMatrix a(oracle::random_symmetric(rng, 6));
    const auto [lambda, v] = max_eigvec(a);
    const auto [ref_lambda, ref_v] = oracle::power_iteration(a.matrix());
    EXPECT_NEAR(lambda, ref_lambda, 1e-8);
    EXPECT_LE(std::min((v - ref_v).norm(), (v + ref_v).norm()), 1e-6);
    EXPECT_NEAR(v.norm(), 1.0, 1e-12);
    EXPECT_LE(std::fabs(v.dot(a.matrix() * v) - lambda), 1e-10 * (1.0 + std::fabs(lambda)));
  }
}

TEST(ProjectSimplex, Examples) {
  EXPECT_LE((project_simplex(oracle::vec({0.5, 0.5})) - oracle::vec({0.5, 0.5})).norm(), 1e-15);
  // Brute-force active-set oracle gives (1, 0).
  EXPECT_LE((project_simplex(oracle::vec({2, 0})) - oracle::simplex_projection_bruteforce(oracle::vec({2, 0}))).norm(), 1e-15);
  EXPECT_LE((project_simplex(oracle::vec({2, 0})) - oracle::vec({1, 0})).norm(), 1e-15);
  const Vector third = Vector::Constant(3, 1.0 / 3.0);
  EXPECT_LE((project_simplex(Vector::Constant(3, 0.3)) - third).norm(), 1e-15);
  EXPECT_THROW(project_simplex(Vector()), Error);
}

TEST(ProjectSimplex, MatchesActiveSetEnumeration) {
  Rng rng(13);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(8));
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = 2.0 * rng.gaussian();
    const Vector w = project_simplex(v);
    EXPECT_NEAR(w.sum(), 1.0, 1e-12);
    EXPECT_GE(w.minCoeff(), 0.0);
    EXPECT_LE((w - oracle::simplex_projection_bruteforce(v)).norm(), 1e-12);
  }
}

TEST(ProjectSpectrahedron, FeasiblePointsAreFixed) {
  const SymMatrix scaled_identity(Matrix::Identity(4, 4) / 4.0);
  EXPECT_LE((project_spectrahedron(scaled_identity).matrix() - scaled_identity.matrix()).norm(), 1e-14);
  Vector z(3);
  z << 0.6, -0.8, 0.0;
  const SymMatrix extreme(z * z.transpose());
  EXPECT_LE((project_spectrahedron(extreme).matrix() - extreme.matrix()).norm(), 1e-14);
}

TEST(ProjectSpectrahedron, DiagonalUsesSimplexOnSpectrum) {
  const SymMatrix out = project_spectrahedron(SymMatrix::diagonal(oracle::vec({2, 0})));
  EXPECT_LE((out.matrix() - Matrix(oracle::vec({1, 0}).asDiagonal())).norm(), 1e-15);
}

TEST(ProjectSpectrahedron, FeasibleIdempotentAndNearest) {
  Rng rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(10));
    const SymMatrix a(oracle::random_symmetric(rng, n));
    const SymMatrix proj = project_spectrahedron(a);
    EXPECT_NEAR(proj.trace(), 1.0, 1e-10);
    EXPECT_GE(eig_sym(proj).values.minCoeff(), -1e-10);
    EXPECT_LE((project_spectrahedron(proj).matrix() - proj.matrix()).norm(), 1e-9);
    // No random feasible point is closer.
    const double dist = (proj.matrix() - a.matrix()).norm();
    for (int probe = 0; probe < 20; ++probe) {
      const Matrix g = oracle::random_matrix(rng, n, n);
      Matrix feasible = g * g.transpose();
      feasible /= feasible.trace();
      EXPECT_GE((feasible - a.matrix()).norm(), dist - 1e-12);
    }
    // Nor is a small feasible perturbation of the answer.
    const Matrix g = oracle::random_matrix(rng, n, n);
    Matrix dir = g * g.transpose();
    dir /= dir.trace();
    const Matrix nudged = 0.99 * proj.matrix() + 0.01 * dir;
    EXPECT_GE((nudged - a.matrix()).norm(), dist - 1e-12);
  }
}

TEST(SoftThreshold, Examples) {
  Rng rng(15);
  const SymMatrix a(oracle::random_symmetric(rng, 5));
  EXPECT_EQ(soft_threshold(a, 0.0).matrix(), a.matrix());
  EXPECT_EQ(soft_threshold(SymMatrix(Matrix::Constant(3, 3, 0.2)), 0.5).matrix(), Matrix::Zero(3, 3));
  const Matrix shrunk = soft_threshold(SymMatrix(Matrix::Ones(2, 2)), 0.3).matrix();
  EXPECT_LE((shrunk - Matrix::Constant(2, 2, 0.7)).norm(), 1e-15);
  const Matrix neg = soft_threshold(SymMatrix(-Matrix::Ones(2, 2)), 0.3).matrix();
  EXPECT_LE((neg + Matrix::Constant(2, 2, 0.7)).norm(), 1e-15);
  EXPECT_THROW(soft_threshold(a, -0.1), Error);
}

TEST(OpNorm, SmallExample) {
  Matrix a(2, 2);
  a << 1, -2, 3, 4;
  EXPECT_EQ(op_norm(a, NormIndex::Inf, NormIndex::Inf), 7.0);
  EXPECT_EQ(op_norm(a, NormIndex::One, NormIndex::One), 6.0);
  EXPECT_EQ(oracle::inf_inf_norm_enumerated(a), 7.0);
  EXPECT_EQ(oracle::one_one_norm_enumerated(a), 6.0);
}

TEST(OpNorm, Identity) {
  const Matrix eye = Matrix::Identity(4, 4);
  EXPECT_EQ(op_norm(eye, NormIndex::One, NormIndex::One), 1.0);
  EXPECT_EQ(op_norm(eye, NormIndex::Inf, NormIndex::Inf), 1.0);
  EXPECT_NEAR(op_norm(eye, NormIndex::Two, NormIndex::Two), 1.0, 1e-15);
  EXPECT_EQ(op_norm(eye, NormIndex::Inf, NormIndex::Two), 1.0);
}

TEST(OpNorm, RankOneSpectralNorm) {
  Rng rng(16);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector a = oracle::random_matrix(rng, 5, 1).col(0);
    const Vector b = oracle::random_matrix(rng, 7, 1).col(0);
    EXPECT_NEAR(op_norm(a * b.transpose(), NormIndex::Two, NormIndex::Two), a.norm() * b.norm(),
                1e-12 * a.norm() * b.norm());
  }
}

TEST(OpNorm, MatchesEnumerationAndPowerIteration) {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const int rows = 1 + static_cast<int>(rng.below(6));
    const int cols = 1 + static_cast<int>(rng.below(6));
    const Matrix a = oracle::random_matrix(rng, rows, cols);
    EXPECT_NEAR(op_norm(a, NormIndex::Inf, NormIndex::Inf), oracle::inf_inf_norm_enumerated(a), 1e-12);
    EXPECT_NEAR(op_norm(a, NormIndex::One, NormIndex::One), oracle::one_one_norm_enumerated(a), 1e-12);
    const double spectral = std::sqrt(oracle::power_iteration(a.transpose() * a).first);
    EXPECT_NEAR(op_norm(a, NormIndex::Two, NormIndex::Two), spectral, 1e-7);
    // (∞,2) is attained at x = row_i/‖row_i‖ and bounded by Cauchy–Schwarz.
    double best = 0.0;
    for (int i = 0; i < rows; ++i) {
      const Vector x = a.row(i).transpose().normalized();
      best = std::max(best, (a * x).cwiseAbs().maxCoeff());
    }
    EXPECT_NEAR(op_norm(a, NormIndex::Inf, NormIndex::Two), best, 1e-12);
  }
}

TEST(OpNorm, UnsupportedPair) {
  try {
    op_norm(Matrix::Identity(2, 2), NormIndex::One, NormIndex::Two);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Unsupported);
  }
  EXPECT_THROW(op_norm(Matrix::Identity(2, 2), NormIndex::Two, NormIndex::Inf), Error);
}

TEST(OpNorm, InequalitiesOnRandomMatrices) {
  Rng rng(18);
  const NormIndex one = NormIndex::One, two = NormIndex::Two, inf = NormIndex::Inf;
  const std::vector<std::array<NormIndex, 3>> triples = {
      {one, one, one}, {inf, inf, inf}, {two, two, two}, {inf, inf, two}, {inf, two, two}};
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 1 + static_cast<int>(rng.below(6));
    const int n = 1 + static_cast<int>(rng.below(6));
    const int r = 1 + static_cast<int>(rng.below(6));
    const Matrix a = oracle::random_matrix(rng, m, n);
    const Matrix b = oracle::random_matrix(rng, n, r);
    for (const auto& [p, mid, q] : triples)
      EXPECT_LE(op_norm(a * b, p, q), op_norm(a, p, mid) * op_norm(b, mid, q) * (1 + 1e-12) + 1e-12);
    EXPECT_LE(max_abs(a * b), op_norm(a, inf, inf) * max_abs(b) * (1 + 1e-12));
    const Vector x = oracle::random_matrix(rng, n, 1).col(0);
    for (const auto& [p, q] : std::vector<std::pair<NormIndex, NormIndex>>{{one, one}, {inf, inf}, {two, two}, {inf, two}})
      EXPECT_LE(vector_norm(a * x, p), op_norm(a, p, q) * vector_norm(x, q) * (1 + 1e-12) + 1e-12);
    const Matrix s = oracle::random_symmetric(rng, n);
    EXPECT_NEAR(op_norm(s, one, one), op_norm(s, inf, inf), 1e-12);
  }
}

TEST(SqrtPsd, SquaresBackAndRejectsIndefinite) {
  Rng rng(19);
  const SymMatrix a(oracle::random_covariance(rng, 6, 10));
  const SymMatrix root = sqrt_psd(a);
  EXPECT_LE((root.matrix() * root.matrix() - a.matrix()).norm(), 1e-12);
  try {
    sqrt_psd(SymMatrix::diagonal(oracle::vec({1, -0.1})));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ModelInvalid);
  }
  // Tiny negative eigenvalues are clamped.
  EXPECT_NO_THROW(sqrt_psd(SymMatrix::diagonal(oracle::vec({1, -1e-12}))));
}

}  // namespace
}  // namespace spca
