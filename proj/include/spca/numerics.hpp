#pragma once

#include <Eigen/Dense>
#include <utility>

#include "spca/rng.hpp"

namespace spca {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Dense symmetric matrix. Construction symmetrizes the input as (A + Aᵀ)/2,
// which is exactly symmetric in floating point.
class SymMatrix {
 public:
  explicit SymMatrix(const Matrix& a);

  static SymMatrix identity(int dim);
  static SymMatrix zero(int dim);
  static SymMatrix diagonal(const Vector& d);

  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const noexcept { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  double trace() const { return m_.trace(); }
  double hs_norm() const { return m_.norm(); }

 private:
  Matrix m_;
};

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator*(double s, const SymMatrix& a);
inline SymMatrix operator*(const SymMatrix& a, double s) { return s * a; }

struct EigenDecomposition {
  Vector values;   // descending
  Matrix vectors;  // column j belongs to values[j]
};

// Cyclic Jacobi eigendecomposition. Eigenvalues are sorted descending and
// every eigenvector has a positive first component above 1e-12 in magnitude.
EigenDecomposition eig_sym(const SymMatrix& a);

// Same decomposition, but the Jacobi sweeps start from Qᵀ A Q for an
// orthonormal `basis` Q. With a basis close to the eigenvectors of `a` this
// needs one or two sweeps instead of a full solve.
EigenDecomposition eig_sym(const SymMatrix& a, const Matrix& basis);

// Largest eigenvalue and its unit eigenvector (sign convention applied).
std::pair<double, Vector> max_eigvec(const SymMatrix& a);

// Euclidean projection onto the probability simplex {w ≥ 0, Σw = 1}.
Vector project_simplex(const Vector& v);

// Hilbert–Schmidt projection onto {Z ⪰ 0, tr Z = 1}.
SymMatrix project_spectrahedron(const SymMatrix& a);
SymMatrix project_spectrahedron(const EigenDecomposition& eig);

// Entrywise sign(a)·max(|a| − tau, 0).
SymMatrix soft_threshold(const SymMatrix& a, double tau);

enum class NormIndex { One, Two, Inf };

// Induced operator norm max_{‖x‖_q = 1} ‖Ax‖_p for the pairs (1,1), (∞,∞),
// (2,2) and (∞,2). Other pairs throw Unsupported.
double op_norm(const Matrix& a, NormIndex p, NormIndex q);

// Elementwise max-abs norm ‖A‖_∞ (matrix treated as a vector).
double max_abs(const Matrix& a);

double vector_norm(const Vector& x, NormIndex p);

// Symmetric PSD square root V diag(√λ) Vᵀ. Eigenvalues in [−1e−10, 0) are
// clamped to zero; anything below throws ModelInvalid.
SymMatrix sqrt_psd(const SymMatrix& a);

// Applies the sign convention in place: first entry with |v_i| > 1e−12 is
// made positive.
void canonicalize_sign(Eigen::Ref<Vector> v);

}  // namespace spca
