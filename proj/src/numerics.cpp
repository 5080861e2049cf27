#include "spca/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "spca/error.hpp"

namespace spca {

namespace {

void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) throw Error(ErrorCode::InvalidInput, std::string(what) + ": non-finite entries");
}

// Cyclic Jacobi on `a` (overwritten), accumulating rotations into `v`.
void jacobi_sweeps(Matrix& a, Matrix& v) {
  const int n = static_cast<int>(a.rows());
  const double scale = a.norm();
  if (n < 2 || scale == 0.0) return;
  const double stop = 1e-14 * scale;
  const double negligible = 1e-17 * scale;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int q = 1; q < n; ++q)
      for (int p = 0; p < q; ++p) off += a(p, q) * a(p, q);
    if (std::sqrt(off) <= stop) return;

    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::fabs(apq) <= negligible) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const double theta = 0.5 * (a(q, q) - a(p, p)) / apq;
        double t = 1.0 / (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        double* cp = a.col(p).data();
        double* cq = a.col(q).data();
        for (int r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double g = cp[r];
          const double h = cq[r];
          const double np = g - s * (h + g * tau);
          const double nq = h + s * (g - h * tau);
          cp[r] = np;
          cq[r] = nq;
          a(p, r) = np;
          a(q, r) = nq;
        }
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = a(q, p) = 0.0;

        double* vp = v.col(p).data();
        double* vq = v.col(q).data();
        const int m = static_cast<int>(v.rows());
        for (int r = 0; r < m; ++r) {
          const double g = vp[r];
          const double h = vq[r];
          vp[r] = g - s * (h + g * tau);
          vq[r] = h + s * (g - h * tau);
        }
      }
    }
  }
}

EigenDecomposition sorted_decomposition(const Matrix& diag_form, const Matrix& v) {
  const int n = static_cast<int>(diag_form.rows());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return diag_form(i, i) > diag_form(j, j); });
  EigenDecomposition out{Vector(n), Matrix(v.rows(), n)};
  for (int j = 0; j < n; ++j) {
    out.values[j] = diag_form(order[j], order[j]);
    out.vectors.col(j) = v.col(order[j]);
    canonicalize_sign(out.vectors.col(j));
  }
  return out;
}

}  // namespace

SymMatrix::SymMatrix(const Matrix& a) {
  if (a.rows() < 1 || a.rows() != a.cols())
    throw Error(ErrorCode::InvalidInput, "SymMatrix requires a non-empty square matrix");
  m_ = 0.5 * (a + a.transpose());
}

SymMatrix SymMatrix::identity(int dim) { return SymMatrix(Matrix::Identity(dim, dim)); }
SymMatrix SymMatrix::zero(int dim) { return SymMatrix(Matrix::Zero(dim, dim)); }
SymMatrix SymMatrix::diagonal(const Vector& d) { return SymMatrix(Matrix(d.asDiagonal())); }

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
  return SymMatrix(a.matrix() + b.matrix());
}
SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
  return SymMatrix(a.matrix() - b.matrix());
}
SymMatrix operator*(double s, const SymMatrix& a) { return SymMatrix(s * a.matrix()); }

void canonicalize_sign(Eigen::Ref<Vector> v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::fabs(v[i]) > 1e-12) {
      if (v[i] < 0.0) v = -v;
      return;
    }
  }
}

EigenDecomposition eig_sym(const SymMatrix& a) {
  require_finite(a.matrix(), "eig_sym");
  Matrix work = a.matrix();
  Matrix v = Matrix::Identity(a.dim(), a.dim());
  jacobi_sweeps(work, v);
  return sorted_decomposition(work, v);
}

EigenDecomposition eig_sym(const SymMatrix& a, const Matrix& basis) {
  require_finite(a.matrix(), "eig_sym");
  if (basis.rows() != a.dim() || basis.cols() != a.dim())
    throw Error(ErrorCode::InvalidInput, "eig_sym: basis dimension mismatch");
  Matrix work = basis.transpose() * a.matrix() * basis;
  work = 0.5 * (work + work.transpose()).eval();
  Matrix v = basis;
  jacobi_sweeps(work, v);
  return sorted_decomposition(work, v);
}

std::pair<double, Vector> max_eigvec(const SymMatrix& a) {
  EigenDecomposition eig = eig_sym(a);
  return {eig.values[0], eig.vectors.col(0)};
}

Vector project_simplex(const Vector& v) {
  if (v.size() == 0) throw Error(ErrorCode::InvalidInput, "project_simplex: empty vector");
  if (!v.allFinite()) throw Error(ErrorCode::InvalidInput, "project_simplex: non-finite input");
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double shift = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) shift = candidate;
  }
  Vector w = (v.array() - shift).max(0.0).matrix();
  // Remove the rounding drift in the sum across the active set.
  const double total = w.sum();
  if (total > 0.0) w /= total;
  return w;
}

SymMatrix project_spectrahedron(const EigenDecomposition& eig) {
  const Vector weights = project_simplex(eig.values);
  Eigen::Index active = 0;
  for (Eigen::Index j = 0; j < weights.size(); ++j)
    if (weights[j] > 0.0) active = j + 1;
  const auto v = eig.vectors.leftCols(active);
  Matrix out = v * weights.head(active).asDiagonal() * v.transpose();
  return SymMatrix(out);
}

SymMatrix project_spectrahedron(const SymMatrix& a) { return project_spectrahedron(eig_sym(a)); }

SymMatrix soft_threshold(const SymMatrix& a, double tau) {
  if (!(tau >= 0.0)) throw Error(ErrorCode::InvalidInput, "soft_threshold: tau must be >= 0");
  const Matrix& m = a.matrix();
  Matrix out = (m.array().abs() - tau).max(0.0) * m.array().sign();
  return SymMatrix(out);
}

double vector_norm(const Vector& x, NormIndex p) {
  switch (p) {
    case NormIndex::One: return x.lpNorm<1>();
    case NormIndex::Two: return x.norm();
    case NormIndex::Inf: return x.size() == 0 ? 0.0 : x.lpNorm<Eigen::Infinity>();
  }
  return 0.0;
}

double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

double op_norm(const Matrix& a, NormIndex p, NormIndex q) {
  require_finite(a, "op_norm");
  if (a.size() == 0) return 0.0;
  if (p == NormIndex::One && q == NormIndex::One) return a.cwiseAbs().colwise().sum().maxCoeff();
  if (p == NormIndex::Inf && q == NormIndex::Inf) return a.cwiseAbs().rowwise().sum().maxCoeff();
  if (p == NormIndex::Inf && q == NormIndex::Two) return a.rowwise().norm().maxCoeff();
  if (p == NormIndex::Two && q == NormIndex::Two) {
    // Use the smaller Gram matrix; both share the nonzero spectrum.
    const Matrix gram = a.rows() < a.cols() ? Matrix(a * a.transpose()) : Matrix(a.transpose() * a);
    const double top = eig_sym(SymMatrix(gram)).values[0];
    return std::sqrt(std::max(top, 0.0));
  }
  throw Error(ErrorCode::Unsupported, "op_norm: unsupported (p, q) pair");
}

SymMatrix sqrt_psd(const SymMatrix& a) {
  EigenDecomposition eig = eig_sym(a);
  for (Eigen::Index j = 0; j < eig.values.size(); ++j) {
    if (eig.values[j] < -1e-10) throw Error(ErrorCode::ModelInvalid, "matrix is not positive semidefinite");
    eig.values[j] = std::sqrt(std::max(eig.values[j], 0.0));
  }
  return SymMatrix(eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose());
}

}  // namespace spca
