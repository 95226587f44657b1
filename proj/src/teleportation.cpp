#include "cvghz/teleportation.hpp"

#include "cvghz/optimize.hpp"

#include <cmath>

#include <fmt/format.h>

namespace cvghz {

namespace {

constexpr Real kClassicalFidelity = 0.5L;
constexpr double kMaxGain = 1.5;

void require_resource(const CovarianceMatrix& v) {
  if (v.num_modes() != 3) throw std::invalid_argument("teleportation resource must have three modes");
}

Matrix inverse_checked(const Matrix& v) {
  Eigen::PartialPivLU<Matrix> lu(v);
  if (!(std::abs(lu.determinant()) >= kSingularDet)) throw PhysicsError("singular resource covariance");
  return lu.inverse();
}

}  // namespace

FidelityMatrices fidelity_matrices(const CovarianceMatrix& v, Real gain) {
  require_resource(v);
  FidelityMatrices m{Matrix::Zero(8, 8), Matrix::Zero(8, 8), Matrix::Zero(8, 8)};
  m.l1.block<2, 2>(0, 0).setIdentity();
  m.l1.block<2, 2>(6, 6).setIdentity();
  m.l1 *= 2;
  m.l2.bottomRightCorner(6, 6) = inverse_checked(v.matrix());
  // Rows 0-1 vanish; rows 2-5 copy the A and B quadratures; rows 6-7 form
  // the receiver's argument of the resource Wigner function.
  m.k.block<4, 4>(2, 2).setIdentity();
  m.k.block<2, 2>(6, 0) = -Eigen::Matrix<Real, 2, 2>::Identity();
  m.k(6, 2) = 1;
  m.k(7, 3) = -1;
  m.k(7, 5) = -gain;
  m.k.block<2, 2>(6, 6).setIdentity();
  return m;
}

Real fidelity_gaussian(const CovarianceMatrix& v, Real gain) {
  const FidelityMatrices m = fidelity_matrices(v, gain);
  const Real det_v = v.matrix().determinant();
  const Real det_l = (m.l1 + m.k.transpose() * m.l2 * m.k).determinant();
  const Real prod = det_v * det_l;
  if (!(prod > 0)) throw PhysicsError("fidelity determinant is not positive");
  return 4 / std::sqrt(prod);
}

Eigen::Matrix<Real, 2, 6> output_noise_map(Real gain) {
  Eigen::Matrix<Real, 2, 6> a;
  a << -1, 0, 0, 0, 1, 0,  //
      0, 1, 0, gain, 0, 1;
  return a;
}

namespace {

Eigen::Matrix<Real, 2, 2> output_covariance(const Matrix& v, Real gain) {
  const auto a = output_noise_map(gain);
  return Eigen::Matrix<Real, 2, 2>::Identity() / 2 + a * v * a.transpose();
}

}  // namespace

Real fidelity_two_path_check(const CovarianceMatrix& v, Real gain) {
  require_resource(v);
  const Eigen::Matrix<Real, 2, 2> overlap = output_covariance(v.matrix(), gain) + Eigen::Matrix<Real, 2, 2>::Identity() / 2;
  return 1 / std::sqrt(overlap.determinant());
}

Real fidelity_state(const GaussianMixtureState& state, Real gain) {
  require_positive_norm(state, "fidelity_state");
  Real sum = 0;
  for (const auto& t : state.terms()) sum += t.weight * fidelity_gaussian(t.cov, gain);
  return sum / mixture_norm(state);
}

GainOptimum optimal_gain(const GaussianMixtureState& state) {
  require_positive_norm(state, "optimal_gain");
  const auto f = [&](double g) { return static_cast<double>(fidelity_state(state, g)); };
  const Maximum best = grid_refined_max(f, 0.0, kMaxGain, 31, 1e-8);
  return GainOptimum{best.arg, fidelity_state(state, best.arg)};
}

Real scheme_fidelity(Real r, const Scheme& ops, GainMode mode) {
  const auto state = prepare_state(r, ops);
  return mode == GainMode::Unit ? fidelity_state(state, 1) : optimal_gain(state).fidelity;
}

Real threshold_squeezing(const Scheme& ops, GainMode mode, double tol) {
  constexpr double kStart = 0.001;
  constexpr double kStep = 0.005;
  constexpr double kEnd = 2.0;
  const auto excess = [&](double r) -> double {
    return static_cast<double>(scheme_fidelity(r, ops, mode) - kClassicalFidelity);
  };
  bool have_below = false;
  double below = 0;
  for (double r = kStart; r <= kEnd + 1e-12; r += kStep) {
    double value;
    try {
      value = excess(r);
    } catch (const ZeroProbabilityError&) {
      continue;
    }
    if (value < 0) {
      have_below = true;
      below = r;
    } else if (have_below) {
      return bisect_predicate([&](double x) { return excess(x) >= 0; }, below, r, tol);
    }
  }
  throw std::domain_error(fmt::format("{}: fidelity has no crossing of 1/2 from below on (0, 2)", scheme_label(ops)));
}

GaussianMixtureState output_state(const GaussianMixtureState& resource, const TeleportConfig& config) {
  if (resource.num_modes() != 3) throw std::invalid_argument("teleportation resource must have three modes");
  require_positive_norm(resource, "output_state");
  const auto a = output_noise_map(config.gain);
  Vector mean(2);
  mean << std::sqrt(Real{2}) * config.input_alpha.real(), std::sqrt(Real{2}) * config.input_alpha.imag();
  std::vector<GaussianTerm> terms;
  terms.reserve(resource.size());
  for (const auto& t : resource.terms()) {
    Matrix cov = output_covariance(t.cov.matrix(), config.gain);
    terms.emplace_back(t.weight, mean + a * t.mean, CovarianceMatrix(std::move(cov)));
  }
  return GaussianMixtureState(1, std::move(terms));
}

std::vector<Real> AxisGrid::nodes() const {
  if (!(step > 0) || !(max >= min)) throw std::invalid_argument("grid needs min <= max and step > 0");
  const auto count = static_cast<long>(std::floor((max - min) / step + 1e-9L)) + 1;
  std::vector<Real> out;
  out.reserve(count);
  for (long k = 0; k < count; ++k) out.push_back(min + k * step);
  return out;
}

WignerField output_wigner(const GaussianMixtureState& resource, const TeleportConfig& config, const AxisGrid& grid) {
  const WignerEvaluator wigner(output_state(resource, config));
  WignerField field{grid.nodes(), grid.nodes(), {}};
  field.values.reserve(field.xs.size() * field.ps.size());
  Vector point(2);
  for (Real x : field.xs) {
    for (Real p : field.ps) {
      point << x, p;
      field.values.push_back(wigner(point));
    }
  }
  return field;
}

Real epr_sum(const GaussianMixtureState& state, int mode_i, int mode_j) {
  const int n = state.num_modes();
  if (mode_i < 0 || mode_j < 0 || mode_i >= n || mode_j >= n || mode_i == mode_j) {
    throw std::invalid_argument("epr_sum needs two distinct valid modes");
  }
  const Matrix v = effective_covariance(state).matrix();
  const Real x_diff = v(2 * mode_i, 2 * mode_i) + v(2 * mode_j, 2 * mode_j) - 2 * v(2 * mode_i, 2 * mode_j);
  Real p_total = 0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) p_total += v(2 * a + 1, 2 * b + 1);
  }
  return x_diff + p_total;
}

}  // namespace cvghz
