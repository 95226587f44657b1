#pragma once

// Mermin-Klyshko test of three-mode states with displaced parity observables.
//
// The MK polynomial is built recursively,
//   B2 = a1 (a2 + a2') + a1' (a2 - a2'),
//   Bn = (an + an') B(n-1) / 2 + (an - an') B(n-1)' / 2,
// with local-realistic bound |Bn| <= 2 and quantum bound 2^((n+1)/2). Only
// n = 3 is implemented: with displaced parities as the dichotomic
// observables <B3> is pi^3 times a signed sum of four Wigner values.

#include "cvghz/ghz.hpp"

namespace cvghz {

/// Settings alpha = 0 and alpha' = i x on every mode. With
/// x = (a + a^dag)/sqrt2 the displacement i x sits at p = sqrt2 x.
struct MKSetting {
  Real x = 0;
};

/// pi^3 [W(0,0,a') + W(0,a',0) + W(a',0,0) - W(a',a',a')] of the normalised
/// state. Signed: states with odd photon parity give negative values.
Real b3_value(const GaussianMixtureState& state, MKSetting setting);

/// B3 as a function of x for one zero-mean three-mode state, with the
/// quadratic forms precomputed.
class B3Profile {
 public:
  explicit B3Profile(const GaussianMixtureState& state);
  Real operator()(Real x) const;

 private:
  struct Term {
    Real coeff;
    Real quad[4];
  };
  std::vector<Term> terms_;
};

struct SearchGrid {
  double x_max = 2.0;
  int x_points = 401;
  double x_tol = 1e-8;
  double r_min = 0.005;
  double r_max = 2.0;
  int r_points = 200;
  double r_tol = 1e-6;
};

/// Maximiser of |B3| over x in [0, x_max]; `b3` keeps the sign.
struct B3Max {
  Real x;
  Real b3;
  Real magnitude() const { return b3 < 0 ? -b3 : b3; }
};

B3Max maximize_b3(const GaussianMixtureState& state, const SearchGrid& grid = {});

struct B3Optimum {
  Real r;
  Real x;
  Real b3;
  Real magnitude() const { return b3 < 0 ? -b3 : b3; }
};

/// Joint maximum of |B3| over (r, x) for GHZ(r) + ops followed by loss eta on
/// every mode. r points with zero success probability are skipped.
B3Optimum max_b3_over_r(const Scheme& ops, Real eta, const SearchGrid& grid = {}, int threads = 1);

/// Efficiency below which the scheme no longer violates |B3| <= 2, by
/// bisection to `tol`. Throws std::domain_error if the lossless maximum
/// does not exceed 2.
Real threshold_efficiency(const Scheme& ops, const SearchGrid& grid = {}, double tol = 1e-4, int threads = 1);

}  // namespace cvghz
