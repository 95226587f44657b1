#pragma once

// One-dimensional searches used by the sweeps: grid scan plus golden-section
// refinement, and bracketed bisection.

#include <functional>

namespace cvghz {

struct Maximum {
  double arg;
  double value;
};

/// Golden-section search for a maximum of `f` on [lo, hi] until the bracket
/// is narrower than `tol`. Assumes unimodality inside the bracket.
Maximum golden_section_max(const std::function<double(double)>& f, double lo, double hi, double tol);

/// Evaluate `f` on `points` equally spaced nodes of [lo, hi], then refine
/// around the best node with golden-section search. Ties go to the smallest
/// argument. The result is never worse than the best grid node.
Maximum grid_refined_max(const std::function<double(double)>& f, double lo, double hi, int points, double tol);

/// Bisection on a predicate that is false at `lo` and true at `hi`; returns
/// the midpoint of the final bracket (width < tol).
double bisect_predicate(const std::function<bool(double)>& pred, double lo, double hi, double tol);

}  // namespace cvghz
