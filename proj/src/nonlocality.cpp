#include "cvghz/nonlocality.hpp"

#include "cvghz/optimize.hpp"
#include "cvghz/parallel.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace cvghz {

namespace {

constexpr Real kPiCubed = std::numbers::pi_v<Real> * std::numbers::pi_v<Real> * std::numbers::pi_v<Real>;

// Primed-mode patterns of the four correlators, in B3 order; the last one
// enters with a minus sign.
constexpr int kPattern[4][3] = {{0, 0, 1}, {0, 1, 0}, {1, 0, 0}, {1, 1, 1}};
constexpr Real kSign[4] = {1, 1, 1, -1};

Vector setting_point(Real x, const int (&pattern)[3]) {
  Vector p = Vector::Zero(6);
  const Real q = std::sqrt(Real{2}) * x;
  for (int m = 0; m < 3; ++m) p(2 * m + 1) = pattern[m] * q;
  return p;
}

void require_three_modes(const GaussianMixtureState& state) {
  if (state.num_modes() != 3) throw std::invalid_argument("B3 is defined for three-mode states");
}

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

Real b3_value(const GaussianMixtureState& state, MKSetting setting) {
  require_three_modes(state);
  const WignerEvaluator wigner(state);
  Real sum = 0;
  for (int k = 0; k < 4; ++k) sum += kSign[k] * wigner(setting_point(setting.x, kPattern[k]));
  return kPiCubed * sum;
}

B3Profile::B3Profile(const GaussianMixtureState& state) {
  require_three_modes(state);
  if (!state.zero_mean()) throw std::invalid_argument("B3Profile needs zero-mean terms");
  const WignerEvaluator wigner(state);
  terms_.reserve(wigner.terms().size());
  for (const auto& t : wigner.terms()) {
    Term term{kPiCubed * t.coeff, {}};
    for (int k = 0; k < 4; ++k) {
      // Unit-x point; the exponent at x is x^2 * quad (q^2/2 = x^2).
      const Vector u = setting_point(1, kPattern[k]) / std::sqrt(Real{2});
      term.quad[k] = u.dot(t.inverse * u);
    }
    terms_.push_back(term);
  }
}

Real B3Profile::operator()(Real x) const {
  const Real x2 = x * x;
  Real sum = 0;
  for (const auto& t : terms_) {
    Real inner = 0;
    for (int k = 0; k < 4; ++k) inner += kSign[k] * std::exp(-x2 * t.quad[k]);
    sum += t.coeff * inner;
  }
  return sum;
}

B3Max maximize_b3(const GaussianMixtureState& state, const SearchGrid& grid) {
  const B3Profile profile(state);
  const auto magnitude = [&](double x) { return static_cast<double>(std::abs(profile(x))); };
  const Maximum best = grid_refined_max(magnitude, 0.0, grid.x_max, grid.x_points, grid.x_tol);
  return B3Max{best.arg, profile(best.arg)};
}

B3Optimum max_b3_over_r(const Scheme& ops, Real eta, const SearchGrid& grid, int threads) {
  if (!(eta >= 0 && eta <= 1)) throw std::invalid_argument("eta must lie in [0, 1]");
  const auto at_r = [&](double r) -> B3Max {
    return maximize_b3(prepare_state(r, ops, eta), grid);
  };
  const auto magnitude_at = [&](double r) -> double {
    try {
      return static_cast<double>(at_r(r).magnitude());
    } catch (const ZeroProbabilityError&) {
      return kNegInf;
    }
  };

  const int n = grid.r_points;
  const double step = (grid.r_max - grid.r_min) / (n - 1);
  std::vector<double> values(n);
  parallel_for(n, threads, [&](int k) { values[k] = magnitude_at(grid.r_min + k * step); });

  int best = 0;
  for (int k = 1; k < n; ++k) {
    if (values[k] > values[best]) best = k;
  }
  if (values[best] == kNegInf) throw ZeroProbabilityError("max_b3_over_r: no r point with nonzero success probability");

  const double lo = best > 0 ? grid.r_min + (best - 1) * step : grid.r_min;
  const double hi = best < n - 1 ? grid.r_min + (best + 1) * step : grid.r_max;
  const Maximum refined = golden_section_max(magnitude_at, lo, hi, grid.r_tol);
  const double r_star = refined.value > values[best] ? refined.arg : grid.r_min + best * step;
  const B3Max inner = at_r(r_star);
  return B3Optimum{r_star, inner.x, inner.b3};
}

Real threshold_efficiency(const Scheme& ops, const SearchGrid& grid, double tol, int threads) {
  constexpr Real kLocalBound = 2;
  const auto violates = [&](double eta) {
    return max_b3_over_r(ops, eta, grid, threads).magnitude() > kLocalBound + 1e-9L;
  };
  if (!violates(1.0)) throw std::domain_error("scheme does not violate the MK inequality at unit efficiency");
  return bisect_predicate(violates, 0.0, 1.0, tol);
}

}  // namespace cvghz
