#include "cvghz/entanglement.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace cvghz {

Partition::Partition(std::vector<int> transposed_modes, int num_modes)
    : modes_(std::move(transposed_modes)), num_modes_(num_modes) {
  std::sort(modes_.begin(), modes_.end());
  if (std::adjacent_find(modes_.begin(), modes_.end()) != modes_.end()) {
    throw std::invalid_argument("partition lists a mode twice");
  }
  if (modes_.empty() || static_cast<int>(modes_.size()) >= num_modes) {
    throw std::invalid_argument("partition must be a nonempty proper subset of the modes");
  }
  if (modes_.front() < 0 || modes_.back() >= num_modes) {
    throw std::invalid_argument(fmt::format("partition mode out of range for {} modes", num_modes));
  }
}

std::vector<Real> symplectic_eigenvalues(const Matrix& v) {
  if (v.rows() != v.cols() || v.rows() % 2 != 0 || v.rows() == 0) {
    throw std::invalid_argument("symplectic_eigenvalues needs a square even-sized matrix");
  }
  const Real scale = std::max<Real>(1, v.cwiseAbs().maxCoeff());
  if ((v - v.transpose()).cwiseAbs().maxCoeff() > 1e-12L * scale) {
    throw std::invalid_argument("symplectic_eigenvalues needs a symmetric matrix");
  }
  const int n = static_cast<int>(v.rows() / 2);
  const Matrix ov = symplectic_form(n) * v;
  const Matrix sq = -ov * ov;
  Eigen::EigenSolver<Matrix> solver(sq, false);
  if (solver.info() != Eigen::Success) throw PhysicsError("eigen-decomposition failed");
  std::vector<Real> lambdas;
  lambdas.reserve(2 * n);
  const Real tol = 1e-9L * std::max<Real>(1, scale * scale);
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
    const auto ev = solver.eigenvalues()(k);
    if (std::abs(ev.imag()) > tol) throw PhysicsError("complex symplectic spectrum; input is not positive definite");
    lambdas.push_back(std::max<Real>(ev.real(), 0));
  }
  std::sort(lambdas.begin(), lambdas.end());
  std::vector<Real> nu;
  nu.reserve(n);
  for (int k = 0; k < n; ++k) nu.push_back(std::sqrt((lambdas[2 * k] + lambdas[2 * k + 1]) / 2));
  return nu;
}

std::vector<Real> symplectic_eigenvalues(const CovarianceMatrix& v) { return symplectic_eigenvalues(v.matrix()); }

Matrix partial_transpose(const Matrix& v, const Partition& partition) {
  if (v.rows() != 2 * partition.num_modes()) throw std::invalid_argument("partition does not match matrix size");
  Matrix out = v;
  for (int m : partition.transposed_modes()) {
    out.row(2 * m + 1) *= -1;
    out.col(2 * m + 1) *= -1;
  }
  return out;
}

Real squared_log_negativity(const CovarianceMatrix& v, const Partition& partition) {
  Real log_neg = 0;
  for (Real nu : symplectic_eigenvalues(partial_transpose(v.matrix(), partition))) {
    log_neg += std::max<Real>(0, -std::log2(2 * nu));
  }
  return log_neg * log_neg;
}

Real TangleBreakdown::value() const { return *std::min_element(residual.begin(), residual.end()); }

std::vector<int> TangleBreakdown::minimizers(Real tol) const {
  const Real best = value();
  std::vector<int> out;
  for (int i = 0; i < 3; ++i) {
    if (residual[i] <= best + tol) out.push_back(i);
  }
  return out;
}

TangleBreakdown tangle_breakdown(const CovarianceMatrix& v) {
  if (v.num_modes() != 3) {
    throw std::invalid_argument(fmt::format("Gaussian tangle needs a three-mode covariance, got {} modes", v.num_modes()));
  }
  TangleBreakdown out{};
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    const int k = (i + 2) % 3;
    const Partition pair(std::vector<int>{0}, 2);
    const Real whole = squared_log_negativity(v, Partition({i}, 3));
    const Real with_j = squared_log_negativity(CovarianceMatrix(select_modes(v.matrix(), {i, j})), pair);
    const Real with_k = squared_log_negativity(CovarianceMatrix(select_modes(v.matrix(), {i, k})), pair);
    out.residual[i] = whole - with_j - with_k;
  }
  return out;
}

Real gaussian_tangle(const CovarianceMatrix& v) { return tangle_breakdown(v).value(); }

Real tangle_of_state(const GaussianMixtureState& state) { return gaussian_tangle(effective_covariance(state)); }

}  // namespace cvghz
