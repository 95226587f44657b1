#include "cvghz/nonlocality.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cvghz {
namespace {

constexpr double kQuantumBound = 2.8284271247461903;

Real pi_cubed() { return std::numbers::pi_v<Real> * std::numbers::pi_v<Real> * std::numbers::pi_v<Real>; }

// Conditioned mixtures cancel down to their norm, so rounding grows like
// epsilon / norm. Additions sit near 1e-8, triple subtractions far lower.
double rounding_tol(const GaussianMixtureState& state, double floor = 1e-13) {
  return std::max(floor, 1e-17 / double(mixture_norm(state)));
}

TEST(B3, OriginIsTwiceScaledWigner) {
  for (const auto& ops : {Scheme{}, make_scheme(PhotonOp::Subtract, {0}), make_scheme(PhotonOp::Add, {0, 2})}) {
    const auto state = prepare_state(0.4L, ops);
    const Real w0 = wigner_value(state, Vector::Zero(6));
    EXPECT_NEAR(double(b3_value(state, MKSetting{0})), double(2 * pi_cubed() * w0), rounding_tol(state));
  }
}

TEST(B3, PureGaussianAtOriginIsTwo) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 5; ++k) {
    const Matrix s = testing::random_symplectic(3, rng).matrix();
    const auto state = testing::single_term(CovarianceMatrix(Matrix(s * s.transpose() / 2)));
    EXPECT_NEAR(double(b3_value(state, MKSetting{0})), 2.0, 1e-10);
  }
}

TEST(B3, VacuumNeverViolates) {
  const auto vac = ghz_state(GHZParams::biased(0));
  for (int k = 0; k <= 40; ++k) EXPECT_LE(std::abs(double(b3_value(vac, MKSetting{0.05L * k}))), 2.0 + 1e-12);
  const B3Max m = maximize_b3(vac);
  EXPECT_NEAR(double(m.b3), 2.0, 1e-12);
  EXPECT_EQ(double(m.x), 0.0);
}

TEST(B3, ProfileMatchesDirectEvaluation) {
  const auto state = prepare_state(0.6L, make_scheme(PhotonOp::Subtract, {0, 1}));
  const B3Profile profile(state);
  for (int k = 0; k <= 20; ++k) {
    const Real x = 0.1L * k;
    EXPECT_NEAR(double(profile(x)), double(b3_value(state, MKSetting{x})), 1e-13);
  }
}

TEST(B3, RejectsWrongModeCount) {
  EXPECT_THROW(b3_value(vacuum_state(2), MKSetting{0.1L}), std::invalid_argument);
}

TEST(B3, FrozenHighPrecisionValues) {
  // Triple subtraction at t^2 = 0.99, x = 0.25, against 40-digit arithmetic.
  // At these squeezings the success probability is 1e-15 .. 1e-9 and the
  // mixture is a near-total cancellation of eight Gaussians, so long double
  // keeps only about -log10(1e-17 / norm) digits. The reference values are
  // magnitudes; an odd number of subtractions makes B3 itself negative.
  const auto ops = make_scheme(PhotonOp::Subtract, {0, 1, 2});
  const struct {
    Real r, b3, norm;
  } frozen[] = {
      {0.005L, 2.240086562975614236L, 8.29215678486003e-16L},
      {0.01L, 2.246214358433165789L, 1.3269803604298999e-14L},
      {0.05L, 2.291612066487391585L, 8.340772004312801e-12L},
  };
  for (const auto& f : frozen) {
    const auto state = prepare_state(f.r, ops);
    EXPECT_NEAR(double(mixture_norm(state) / f.norm), 1.0, rounding_tol(state)) << double(f.r);
    EXPECT_NEAR(double(std::abs(b3_value(state, MKSetting{0.25L}))), double(f.b3), rounding_tol(state)) << double(f.r);
  }
  const struct {
    Real r, x, b3;
  } more[] = {
      {0.1L, 0.26L, 2.340045928319151L},
      {0.2L, 0.239L, 2.397220814009197L},
      {0.3L, 0.216L, 2.422844091535651L},
      {0.4L, 0.194L, 2.427033607023842L},
  };
  for (const auto& f : more) {
    const auto state = prepare_state(f.r, ops);
    EXPECT_LT(b3_value(state, MKSetting{f.x}), 0);
    EXPECT_NEAR(double(std::abs(b3_value(state, MKSetting{f.x}))), double(f.b3), rounding_tol(state)) << double(f.r);
  }
}

TEST(B3, QuantumBoundHolds) {
  const std::vector<Scheme> schemes = {{},
                                       make_scheme(PhotonOp::Subtract, {0}),
                                       make_scheme(PhotonOp::Subtract, {0, 1}),
                                       make_scheme(PhotonOp::Subtract, {0, 1, 2}),
                                       make_scheme(PhotonOp::Add, {0}),
                                       make_scheme(PhotonOp::Add, {0, 1}),
                                       make_scheme(PhotonOp::Add, {0, 1, 2})};
  for (const auto& ops : schemes) {
    for (int i = 1; i <= 20; ++i) {
      const B3Profile profile(prepare_state(0.1L * i, ops));
      for (int k = 0; k <= 40; ++k) EXPECT_LE(std::abs(double(profile(0.05L * k))), kQuantumBound + 1e-6);
    }
  }
}

TEST(B3, SymmetricUnderModeChoice) {
  for (PhotonOp kind : {PhotonOp::Subtract, PhotonOp::Add}) {
    const B3Profile a(prepare_state(0.5L, make_scheme(kind, {0})));
    const B3Profile b(prepare_state(0.5L, make_scheme(kind, {1})));
    const B3Profile c(prepare_state(0.5L, make_scheme(kind, {2})));
    const B3Profile ab(prepare_state(0.5L, make_scheme(kind, {0, 1})));
    const B3Profile bc(prepare_state(0.5L, make_scheme(kind, {1, 2})));
    const double tol = rounding_tol(prepare_state(0.5L, make_scheme(kind, {0, 1})), 1e-12);
    for (int k = 0; k <= 20; ++k) {
      const Real x = 0.07L * k;
      EXPECT_NEAR(double(a(x)), double(b(x)), tol);
      EXPECT_NEAR(double(a(x)), double(c(x)), tol);
      EXPECT_NEAR(double(ab(x)), double(bc(x)), tol);
    }
  }
}

TEST(MaxOverR, GhzAndSingleSubtraction) {
  const B3Optimum ghz = max_b3_over_r({}, 1);
  EXPECT_NEAR(double(ghz.magnitude()), 2.324, 0.01);
  const B3Optimum sub = max_b3_over_r(make_scheme(PhotonOp::Subtract, {0}), 1);
  EXPECT_NEAR(double(sub.magnitude()), 2.301, 0.01);
  const B3Optimum add = max_b3_over_r(make_scheme(PhotonOp::Add, {0, 1, 2}), 1);
  EXPECT_NEAR(double(add.magnitude()), 2.495, 0.01);
}

TEST(MaxOverR, FullLossGivesVacuum) {
  const B3Optimum m = max_b3_over_r(make_scheme(PhotonOp::Subtract, {0}), 0);
  EXPECT_NEAR(double(m.b3), 2.0, 1e-9);
}

TEST(MaxOverR, NondecreasingInEfficiency) {
  for (const auto& ops : {Scheme{}, make_scheme(PhotonOp::Subtract, {0, 1})}) {
    Real prev = 0;
    for (int k = 0; k <= 10; ++k) {
      const Real m = max_b3_over_r(ops, 0.5L + 0.05L * k).magnitude();
      EXPECT_GE(m, prev - 1e-9L);
      prev = m;
    }
  }
}

TEST(MaxOverR, ThreadCountDoesNotChangeResult) {
  const auto ops = make_scheme(PhotonOp::Add, {0, 1});
  const B3Optimum one = max_b3_over_r(ops, 0.95L, SearchGrid{}, 1);
  const B3Optimum four = max_b3_over_r(ops, 0.95L, SearchGrid{}, 4);
  EXPECT_EQ(one.r, four.r);
  EXPECT_EQ(one.x, four.x);
  EXPECT_EQ(one.b3, four.b3);
}

TEST(Threshold, Examples) {
  EXPECT_NEAR(double(threshold_efficiency({})), 0.694, 0.01);
  EXPECT_NEAR(double(threshold_efficiency(make_scheme(PhotonOp::Subtract, {0, 1}))), 0.750, 0.01);
  EXPECT_NEAR(double(threshold_efficiency(make_scheme(PhotonOp::Add, {0, 1, 2}))), 0.986, 0.01);
}

TEST(Threshold, NoViolationIsReported) {
  SearchGrid weak;
  // B3 - 2 is of order r^2 for the GHZ state, far below the detection margin.
  weak.r_min = 0;
  weak.r_max = 1e-6;
  weak.r_points = 3;
  EXPECT_THROW(threshold_efficiency({}, weak), std::domain_error);
}

}  // namespace
}  // namespace cvghz
