#include "cvghz/phasespace.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include <fmt/format.h>

namespace cvghz {

namespace {

constexpr Real kPi = std::numbers::pi_v<Real>;

Real max_abs(const Matrix& m) { return m.size() == 0 ? 0 : m.cwiseAbs().maxCoeff(); }

void check_modes(int num_modes) {
  if (num_modes < 1 || num_modes > kMaxModes) {
    throw std::invalid_argument(fmt::format("num_modes must be in [1, {}], got {}", kMaxModes, num_modes));
  }
}

void check_pair(int mode_i, int mode_j, int num_modes) {
  check_modes(num_modes);
  if (mode_i < 0 || mode_j < 0 || mode_i >= num_modes || mode_j >= num_modes || mode_i == mode_j) {
    throw std::invalid_argument(
        fmt::format("invalid mode pair ({}, {}) for {} modes", mode_i, mode_j, num_modes));
  }
}

void set_block(Matrix& m, int bi, int bj, const Eigen::Matrix<Real, 2, 2>& block) {
  m.block<2, 2>(2 * bi, 2 * bj) = block;
}

Matrix symmetrized(const Matrix& m) { return (m + m.transpose()) / 2; }

}  // namespace

Matrix symplectic_form(int num_modes) {
  Matrix omega = Matrix::Zero(2 * num_modes, 2 * num_modes);
  for (int k = 0; k < num_modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1;
    omega(2 * k + 1, 2 * k) = -1;
  }
  return omega;
}

CovarianceMatrix::CovarianceMatrix(Matrix v) : v_(std::move(v)) {
  if (v_.rows() != v_.cols() || v_.rows() == 0 || v_.rows() % 2 != 0) {
    throw std::invalid_argument(fmt::format("covariance must be square with even size, got {}x{}", v_.rows(), v_.cols()));
  }
  const Real scale = std::max<Real>(1, max_abs(v_));
  if (max_abs(v_ - v_.transpose()) > 1e-12L * scale) {
    throw std::invalid_argument("covariance matrix is not symmetric");
  }
}

CovarianceMatrix CovarianceMatrix::physical(Matrix v) {
  CovarianceMatrix cov(std::move(v));
  if (!cov.satisfies_uncertainty()) {
    throw std::invalid_argument(
        fmt::format("covariance violates the uncertainty relation (margin {})", static_cast<double>(cov.uncertainty_margin())));
  }
  return cov;
}

CovarianceMatrix CovarianceMatrix::vacuum(int num_modes) {
  check_modes(num_modes);
  return CovarianceMatrix(Matrix::Identity(2 * num_modes, 2 * num_modes) / 2);
}

Real CovarianceMatrix::uncertainty_margin() const {
  using Complex = std::complex<Real>;
  using CMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;
  const Matrix omega = symplectic_form(num_modes());
  CMatrix h = v_.cast<Complex>() + Complex(0, 0.5L) * omega.cast<Complex>();
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

SymplecticMatrix::SymplecticMatrix(Matrix s) : s_(std::move(s)) {
  if (s_.rows() != s_.cols() || s_.rows() == 0 || s_.rows() % 2 != 0) {
    throw std::invalid_argument("symplectic matrix must be square with even size");
  }
  const Real scale = std::max<Real>(1, max_abs(s_) * max_abs(s_));
  if (symplectic_defect() > 1e-12L * scale) {
    throw std::invalid_argument(fmt::format("matrix is not symplectic (defect {})", static_cast<double>(symplectic_defect())));
  }
}

SymplecticMatrix SymplecticMatrix::identity(int num_modes) {
  check_modes(num_modes);
  return SymplecticMatrix(Matrix::Identity(2 * num_modes, 2 * num_modes));
}

Real SymplecticMatrix::symplectic_defect() const {
  const Matrix omega = symplectic_form(num_modes());
  return max_abs(s_ * omega * s_.transpose() - omega);
}

GaussianTerm::GaussianTerm(Real w, Vector mu, CovarianceMatrix c)
    : weight(w), mean(std::move(mu)), cov(std::move(c)) {
  if (!std::isfinite(weight) || weight == 0) {
    throw std::invalid_argument("term weight must be finite and nonzero");
  }
  if (mean.size() != cov.matrix().rows()) {
    throw std::invalid_argument("term mean and covariance dimensions differ");
  }
}

GaussianMixtureState::GaussianMixtureState(int num_modes, std::vector<GaussianTerm> terms)
    : num_modes_(num_modes), terms_(std::move(terms)) {
  check_modes(num_modes);
  for (const auto& t : terms_) {
    if (t.cov.num_modes() != num_modes) {
      throw std::invalid_argument(
          fmt::format("term has {} modes, state has {}", t.cov.num_modes(), num_modes));
    }
  }
}

bool GaussianMixtureState::zero_mean() const {
  for (const auto& t : terms_) {
    if (!t.mean.isZero(0)) return false;
  }
  return true;
}

GaussianMixtureState vacuum_state(int num_modes) {
  check_modes(num_modes);
  std::vector<GaussianTerm> terms;
  terms.emplace_back(1, Vector::Zero(2 * num_modes), CovarianceMatrix::vacuum(num_modes));
  return GaussianMixtureState(num_modes, std::move(terms));
}

SymplecticMatrix beam_splitter(Real t, int mode_i, int mode_j, int num_modes) {
  check_pair(mode_i, mode_j, num_modes);
  if (!(t > 0 && t <= 1)) throw std::invalid_argument("beam splitter amplitude t must lie in (0, 1]");
  const Real r = std::sqrt(1 - t * t);
  using B = Eigen::Matrix<Real, 2, 2>;
  Matrix s = Matrix::Identity(2 * num_modes, 2 * num_modes);
  set_block(s, mode_i, mode_i, t * B::Identity());
  set_block(s, mode_i, mode_j, -r * B::Identity());
  set_block(s, mode_j, mode_i, r * B::Identity());
  set_block(s, mode_j, mode_j, t * B::Identity());
  return SymplecticMatrix(std::move(s));
}

SymplecticMatrix ndpa(Real s_param, int mode_i, int mode_j, int num_modes) {
  check_pair(mode_i, mode_j, num_modes);
  if (!(s_param >= 0) || !std::isfinite(s_param)) throw std::invalid_argument("amplifier strength must be >= 0");
  using B = Eigen::Matrix<Real, 2, 2>;
  B sigma_z;
  sigma_z << 1, 0, 0, -1;
  Matrix s = Matrix::Identity(2 * num_modes, 2 * num_modes);
  set_block(s, mode_i, mode_i, std::cosh(s_param) * B::Identity());
  set_block(s, mode_i, mode_j, std::sinh(s_param) * sigma_z);
  set_block(s, mode_j, mode_i, std::sinh(s_param) * sigma_z);
  set_block(s, mode_j, mode_j, std::cosh(s_param) * B::Identity());
  return SymplecticMatrix(std::move(s));
}

SymplecticMatrix single_mode_squeezer(Real r, int mode, int num_modes) {
  check_modes(num_modes);
  if (mode < 0 || mode >= num_modes) throw std::invalid_argument("invalid mode index");
  Matrix s = Matrix::Identity(2 * num_modes, 2 * num_modes);
  s(2 * mode, 2 * mode) = std::exp(r);
  s(2 * mode + 1, 2 * mode + 1) = std::exp(-r);
  return SymplecticMatrix(std::move(s));
}

SymplecticMatrix phase_rotation(Real theta, int mode, int num_modes) {
  check_modes(num_modes);
  if (mode < 0 || mode >= num_modes) throw std::invalid_argument("invalid mode index");
  Eigen::Matrix<Real, 2, 2> rot;
  rot << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
  Matrix s = Matrix::Identity(2 * num_modes, 2 * num_modes);
  set_block(s, mode, mode, rot);
  return SymplecticMatrix(std::move(s));
}

GaussianMixtureState apply_symplectic(const GaussianMixtureState& state, const SymplecticMatrix& s) {
  if (s.num_modes() != state.num_modes()) {
    throw std::invalid_argument(
        fmt::format("symplectic acts on {} modes, state has {}", s.num_modes(), state.num_modes()));
  }
  const Matrix& m = s.matrix();
  std::vector<GaussianTerm> out;
  out.reserve(state.size());
  for (const auto& t : state.terms()) {
    out.emplace_back(t.weight, m * t.mean, CovarianceMatrix(symmetrized(m * t.cov.matrix() * m.transpose())));
  }
  return GaussianMixtureState(state.num_modes(), std::move(out));
}

GaussianMixtureState attach_vacuum(const GaussianMixtureState& state, int count) {
  if (count < 1) throw std::invalid_argument("attach_vacuum count must be positive");
  const int n = state.num_modes() + count;
  check_modes(n);
  const int old_dim = state.dim();
  std::vector<GaussianTerm> out;
  out.reserve(state.size());
  for (const auto& t : state.terms()) {
    Matrix v = Matrix::Identity(2 * n, 2 * n) / 2;
    v.topLeftCorner(old_dim, old_dim) = t.cov.matrix();
    Vector mu = Vector::Zero(2 * n);
    mu.head(old_dim) = t.mean;
    out.emplace_back(t.weight, std::move(mu), CovarianceMatrix(std::move(v)));
  }
  return GaussianMixtureState(n, std::move(out));
}

GaussianMixtureState condition_on_click(const GaussianMixtureState& state, int ancilla_mode) {
  const int n = state.num_modes();
  if (ancilla_mode < 0 || ancilla_mode >= n) throw std::invalid_argument("invalid ancilla mode");
  if (n < 2) throw std::invalid_argument("conditioning needs at least one system mode besides the ancilla");
  if (!state.zero_mean()) {
    throw std::invalid_argument("condition_on_click supports zero-mean terms only");
  }
  std::vector<int> system;
  for (int k = 0; k < n; ++k) {
    if (k != ancilla_mode) system.push_back(k);
  }
  const int sys_dim = 2 * (n - 1);
  const Eigen::Matrix<Real, 2, 2> half_identity = Eigen::Matrix<Real, 2, 2>::Identity() / 2;

  std::vector<GaussianTerm> out;
  out.reserve(2 * state.size());
  for (const auto& t : state.terms()) {
    const Matrix& v = t.cov.matrix();
    Matrix gamma(sys_dim, sys_dim);
    Matrix coupling(sys_dim, 2);
    for (int a = 0; a < n - 1; ++a) {
      for (int b = 0; b < n - 1; ++b) {
        gamma.block<2, 2>(2 * a, 2 * b) = v.block<2, 2>(2 * system[a], 2 * system[b]);
      }
      coupling.block<2, 2>(2 * a, 0) = v.block<2, 2>(2 * system[a], 2 * ancilla_mode);
    }
    const Eigen::Matrix<Real, 2, 2> detector = v.block<2, 2>(2 * ancilla_mode, 2 * ancilla_mode) + half_identity;
    const Real det = detector.determinant();
    if (!(std::abs(det) >= kSingularDet)) throw PhysicsError("singular ancilla block in click conditioning");
    const Matrix schur = symmetrized(gamma - coupling * detector.inverse() * coupling.transpose());
    out.emplace_back(t.weight, Vector::Zero(sys_dim), CovarianceMatrix(gamma));
    out.emplace_back(-t.weight / std::sqrt(det), Vector::Zero(sys_dim), CovarianceMatrix(schur));
  }
  return GaussianMixtureState(n - 1, std::move(out));
}

GaussianMixtureState apply_loss(const GaussianMixtureState& state, Real eta) {
  if (!(eta >= 0 && eta <= 1)) throw std::invalid_argument("loss efficiency eta must lie in [0, 1]");
  const Matrix noise = Matrix::Identity(state.dim(), state.dim()) * ((1 - eta) / 2);
  const Real amp = std::sqrt(eta);
  std::vector<GaussianTerm> out;
  out.reserve(state.size());
  for (const auto& t : state.terms()) {
    out.emplace_back(t.weight, amp * t.mean, CovarianceMatrix(eta * t.cov.matrix() + noise));
  }
  return GaussianMixtureState(state.num_modes(), std::move(out));
}

Real mixture_norm(const GaussianMixtureState& state) {
  Real sum = 0;
  for (const auto& t : state.terms()) sum += t.weight;
  return sum;
}

void require_positive_norm(const GaussianMixtureState& state, const char* what) {
  Real sum = 0;
  Real abs_sum = 0;
  for (const auto& t : state.terms()) {
    sum += t.weight;
    abs_sum += std::abs(t.weight);
  }
  // Below this the signed sum is indistinguishable from rounding noise.
  const Real floor = 64 * std::numeric_limits<Real>::epsilon() * abs_sum;
  if (!(sum > floor)) {
    throw ZeroProbabilityError(fmt::format("{}: zero success probability (norm {})", what, static_cast<double>(sum)));
  }
}

Real log_det_spd(const Matrix& v) {
  Eigen::LLT<Matrix> llt(v);
  if (llt.info() != Eigen::Success) throw PhysicsError("covariance matrix is not positive definite");
  const auto& l = llt.matrixLLT();
  Real sum = 0;
  for (Eigen::Index k = 0; k < l.rows(); ++k) sum += std::log(l(k, k));
  return 2 * sum;
}

namespace {

Real gaussian_density(const Vector& point, const Vector& mean, const Matrix& cov) {
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) throw PhysicsError("covariance matrix is not positive definite");
  const Vector d = point - mean;
  const Real quad = d.dot(llt.solve(d));
  Real log_det = 0;
  for (Eigen::Index k = 0; k < cov.rows(); ++k) log_det += std::log(llt.matrixLLT()(k, k));
  log_det *= 2;
  const Real n = static_cast<Real>(cov.rows());
  return std::exp(-quad / 2 - log_det / 2 - n / 2 * std::log(2 * kPi));
}

}  // namespace

Real wigner_value(const GaussianMixtureState& state, const Vector& point, bool normalized) {
  if (point.size() != state.dim()) throw std::invalid_argument("point dimension does not match state");
  if (normalized) require_positive_norm(state, "wigner_value");
  Real sum = 0;
  for (const auto& t : state.terms()) sum += t.weight * gaussian_density(point, t.mean, t.cov.matrix());
  return normalized ? sum / mixture_norm(state) : sum;
}

CovarianceMatrix effective_covariance(const GaussianMixtureState& state) {
  require_positive_norm(state, "effective_covariance");
  const Real norm = mixture_norm(state);
  Matrix second = Matrix::Zero(state.dim(), state.dim());
  Vector first = Vector::Zero(state.dim());
  for (const auto& t : state.terms()) {
    second += t.weight * (t.cov.matrix() + t.mean * t.mean.transpose());
    first += t.weight * t.mean;
  }
  second /= norm;
  first /= norm;
  return CovarianceMatrix(symmetrized(second - first * first.transpose()));
}

WignerEvaluator::WignerEvaluator(const GaussianMixtureState& state) : dim_(state.dim()) {
  require_positive_norm(state, "WignerEvaluator");
  const Real norm = mixture_norm(state);
  const Real log_2pi = std::log(2 * kPi);
  terms_.reserve(state.size());
  for (const auto& t : state.terms()) {
    const Matrix& v = t.cov.matrix();
    Eigen::LLT<Matrix> llt(v);
    if (llt.info() != Eigen::Success) throw PhysicsError("covariance matrix is not positive definite");
    const Real log_det = log_det_spd(v) + dim_ * log_2pi;
    Matrix inverse = llt.solve(Matrix::Identity(dim_, dim_));
    terms_.push_back(Term{t.weight / norm * std::exp(-log_det / 2), t.mean, symmetrized(inverse)});
  }
}

Real WignerEvaluator::operator()(const Vector& point) const {
  if (point.size() != dim_) throw std::invalid_argument("point dimension does not match state");
  Real sum = 0;
  for (const auto& t : terms_) {
    const Vector d = point - t.mean;
    sum += t.coeff * std::exp(-d.dot(t.inverse * d) / 2);
  }
  return sum;
}

Matrix select_modes(const Matrix& v, const std::vector<int>& modes) {
  const int k = static_cast<int>(modes.size());
  Matrix out(2 * k, 2 * k);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      out.block<2, 2>(2 * a, 2 * b) = v.block<2, 2>(2 * modes[a], 2 * modes[b]);
    }
  }
  return out;
}

}  // namespace cvghz
