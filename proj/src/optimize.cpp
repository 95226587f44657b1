#include "cvghz/optimize.hpp"

#include <cmath>
#include <stdexcept>

namespace cvghz {

Maximum golden_section_max(const std::function<double(double)>& f, double lo, double hi, double tol) {
  if (!(hi >= lo)) throw std::invalid_argument("golden_section_max: empty bracket");
  const double inv_phi = (std::sqrt(5.0) - 1) / 2;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? Maximum{c, fc} : Maximum{d, fd};
}

Maximum grid_refined_max(const std::function<double(double)>& f, double lo, double hi, int points, double tol) {
  if (points < 2) throw std::invalid_argument("grid_refined_max needs at least two points");
  const double step = (hi - lo) / (points - 1);
  int best = 0;
  double best_value = f(lo);
  for (int k = 1; k < points; ++k) {
    const double v = f(lo + k * step);
    if (v > best_value) {
      best = k;
      best_value = v;
    }
  }
  const double best_arg = lo + best * step;
  const double a = best > 0 ? best_arg - step : lo;
  const double b = best < points - 1 ? best_arg + step : hi;
  const Maximum refined = golden_section_max(f, a, b, tol);
  if (refined.value > best_value) return refined;
  return Maximum{best_arg, best_value};
}

double bisect_predicate(const std::function<bool(double)>& pred, double lo, double hi, double tol) {
  while (hi - lo > tol) {
    const double mid = (lo + hi) / 2;
    if (pred(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return (lo + hi) / 2;
}

}  // namespace cvghz
