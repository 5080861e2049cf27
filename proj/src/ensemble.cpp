#include "spca/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "spca/error.hpp"

namespace spca {

namespace {

void invalid(const std::string& what) { throw Error(ErrorCode::InvalidInput, what); }

}  // namespace

SpikedModel::SpikedModel(int p, int k, double beta, std::vector<int> support,
                         std::vector<int> signs, std::optional<SymMatrix> gamma)
    : p_(p), k_(k), beta_(beta), gamma_(std::move(gamma)) {
  if (p < 1) invalid("model: p must be >= 1");
  if (k < 1 || k > p) invalid("model: k must satisfy 1 <= k <= p");
  if (!(beta > 0.0) || !std::isfinite(beta)) invalid("model: beta must be finite and > 0");
  if (static_cast<int>(support.size()) != k || static_cast<int>(signs.size()) != k)
    invalid("model: support and signs must both have k entries");

  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return support[a] < support[b]; });
  for (int i = 0; i < k; ++i) {
    const int idx = support[order[i]];
    const int sgn = signs[order[i]];
    if (idx < 0 || idx >= p) invalid("model: support index out of range");
    if (i > 0 && idx == support_.back()) invalid("model: duplicate support index");
    if (sgn != 1 && sgn != -1) invalid("model: signs must be -1 or +1");
    support_.push_back(idx);
    signs_.push_back(sgn);
  }
  for (int i = 0, s = 0; i < p; ++i) {
    if (s < k && support_[s] == i) {
      ++s;
    } else {
      complement_.push_back(i);
    }
  }
  if (gamma_) {
    if (gamma_->dim() != p - k) invalid("model: gamma must be (p-k) x (p-k)");
    if (!gamma_->matrix().allFinite()) invalid("model: gamma has non-finite entries");
  }
}

SpikedModel SpikedModel::identity_leading(int p, int k, double beta) {
  std::vector<int> support(k);
  std::iota(support.begin(), support.end(), 0);
  return SpikedModel(p, k, beta, support, std::vector<int>(k, 1));
}

SpikedModel SpikedModel::random_identity(int p, int k, double beta, Rng& rng) {
  if (k < 1 || k > p) invalid("model: k must satisfy 1 <= k <= p");
  // Partial Fisher–Yates for a uniform k-subset.
  std::vector<int> pool(p);
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(p - i)));
    std::swap(pool[i], pool[j]);
  }
  std::vector<int> support(pool.begin(), pool.begin() + k);
  std::vector<int> signs(k);
  for (auto& s : signs) s = (rng.next_u64() >> 63) ? 1 : -1;
  return SpikedModel(p, k, beta, support, signs);
}

Vector SpikedModel::z_star() const {
  Vector z = Vector::Zero(p_);
  const double mag = 1.0 / std::sqrt(static_cast<double>(k_));
  for (int i = 0; i < k_; ++i) z[support_[i]] = signs_[i] * mag;
  return z;
}

bool SpikedModel::in_support(int i) const {
  return std::binary_search(support_.begin(), support_.end(), i);
}

AssumptionReport validate_assumptions(const SpikedModel& m) {
  if (m.identity_base() || m.p() == m.k()) {
    return {1.0, true, 1.0, 1.0};
  }
  const SymMatrix& gamma = *m.gamma();
  const EigenDecomposition eig = eig_sym(gamma);
  const double lmax = eig.values[0];
  const double lmin = eig.values[eig.values.size() - 1];
  const SymMatrix root = sqrt_psd(gamma);
  const bool gap_ok = lmax <= std::min(1.0, lmin + m.beta() / 8.0);
  return {op_norm(root.matrix(), NormIndex::Inf, NormIndex::Inf), gap_ok, lmax, lmin};
}

SymMatrix build_covariance(const SpikedModel& m) {
  const int p = m.p();
  Matrix sigma = Matrix::Identity(p, p);
  if (m.gamma()) {
    const AssumptionReport report = validate_assumptions(m);
    if (!report.eig_gap_ok)
      throw Error(ErrorCode::ModelInvalid, "base covariance violates lambda_max <= min{1, lambda_min + beta/8}");
    const Matrix& g = m.gamma()->matrix();
    const auto& comp = m.complement();
    for (std::size_t a = 0; a < comp.size(); ++a)
      for (std::size_t b = 0; b < comp.size(); ++b) sigma(comp[a], comp[b]) = g(a, b);
  }
  const Vector z = m.z_star();
  sigma.noalias() += m.beta() * z * z.transpose();
  return SymMatrix(sigma);
}

SampleBatch sample(const SpikedModel& m, int n, Rng& rng) {
  if (n < 1) invalid("sample: n must be >= 1");
  const int p = m.p();
  const Vector z = m.z_star();
  const double root_beta = std::sqrt(m.beta());
  std::optional<Matrix> root_gamma;
  if (m.gamma()) {
    if (!validate_assumptions(m).eig_gap_ok)
      throw Error(ErrorCode::ModelInvalid, "base covariance violates the eigenvalue assumption");
    root_gamma = sqrt_psd(*m.gamma()).matrix();
  }

  SampleBatch batch;
  batch.n = n;
  batch.seed = rng.seed();
  batch.stream = rng.stream();
  batch.data.resize(n, p);
  Vector g(p);
  for (int i = 0; i < n; ++i) {
    const double v = rng.gaussian();
    for (int j = 0; j < p; ++j) g[j] = rng.gaussian();
    if (root_gamma) {
      const auto& comp = m.complement();
      Vector off(static_cast<Eigen::Index>(comp.size()));
      for (std::size_t a = 0; a < comp.size(); ++a) off[a] = g[comp[a]];
      const Vector mixed = (*root_gamma) * off;
      for (std::size_t a = 0; a < comp.size(); ++a) g[comp[a]] = mixed[a];
    }
    batch.data.row(i) = (root_beta * v * z + g).transpose();
  }
  return batch;
}

SymMatrix sample_covariance(const SampleBatch& b) {
  if (b.n < 1 || b.data.rows() != b.n) invalid("sample_covariance: empty or inconsistent batch");
  Matrix s = Matrix::Zero(b.p(), b.p());
  s.selfadjointView<Eigen::Lower>().rankUpdate(b.data.transpose(), 1.0 / b.n);
  s.triangularView<Eigen::StrictlyUpper>() = s.transpose();
  return SymMatrix(s);
}

SymMatrix noise_matrix(const SampleBatch& b, const SpikedModel& m) {
  if (b.p() != m.p()) invalid("noise_matrix: dimension mismatch");
  return sample_covariance(b) - build_covariance(m);
}

SymMatrix mixture_covariance(int p, int k, double beta) {
  if (k < 1 || k >= p) invalid("mixture_covariance: requires 1 <= k < p");
  if (!(beta > 0.0)) invalid("mixture_covariance: beta must be > 0");
  const int shared = k - 1;
  const double choices = static_cast<double>(p - k + 1);
  Matrix y = Matrix::Zero(p, p);
  y.topLeftCorner(shared, shared).setConstant(choices);
  y.topRightCorner(shared, p - shared).setOnes();
  y.bottomLeftCorner(p - shared, shared).setOnes();
  y.bottomRightCorner(p - shared, p - shared).setIdentity();
  return SymMatrix(Matrix::Identity(p, p) + (beta / (k * choices)) * y);
}

Vector mixture_spectrum(int p, int k, double beta) {
  if (k < 1 || k >= p) invalid("mixture_spectrum: requires 1 <= k < p");
  const double unit = beta / (k * static_cast<double>(p - k + 1));
  Vector out(p);
  out[0] = 1.0 + beta * (k - 1) / k + unit;
  out.segment(1, p - k).setConstant(1.0 + unit);
  out.tail(k - 1).setConstant(1.0);
  return out;
}

double mixture_log_det(int p, int k, double beta) {
  if (k < 1 || k >= p) invalid("mixture_log_det: requires 1 <= k < p");
  const double denom = k * static_cast<double>(p - k + 1);
  return std::log1p(beta) + std::log1p(-(beta / (1.0 + beta)) * (p - k) / denom) +
         (p - k) * std::log1p(beta / denom);
}

}  // namespace spca
