#pragma once

// Symplectic spectra, logarithmic negativity and the Gaussian tangle.

#include "cvghz/phasespace.hpp"

#include <array>
#include <vector>

namespace cvghz {

/// The transposed side of a bipartition: a nonempty proper subset of modes.
class Partition {
 public:
  Partition(std::vector<int> transposed_modes, int num_modes);

  const std::vector<int>& transposed_modes() const { return modes_; }
  int num_modes() const { return num_modes_; }

 private:
  std::vector<int> modes_;
  int num_modes_;
};

/// Ascending symplectic eigenvalues: square roots of the (doubly degenerate)
/// eigenvalues of -(omega v)^2.
std::vector<Real> symplectic_eigenvalues(const Matrix& v);
std::vector<Real> symplectic_eigenvalues(const CovarianceMatrix& v);

/// Flip the p rows/columns of the transposed modes.
Matrix partial_transpose(const Matrix& v, const Partition& partition);

/// (-log2 ||rho^T||_1)^2 for a Gaussian state, always >= 0.
Real squared_log_negativity(const CovarianceMatrix& v, const Partition& partition);

/// E^{i|jk} - E^{i|j} - E^{i|k} for each choice of i.
struct TangleBreakdown {
  std::array<Real, 3> residual;
  Real value() const;
  /// Modes i whose residual equals the minimum to `tol`.
  std::vector<int> minimizers(Real tol = 1e-10L) const;
};

TangleBreakdown tangle_breakdown(const CovarianceMatrix& v);

/// Gaussian tangle of a three-mode covariance: min over i of the residual.
Real gaussian_tangle(const CovarianceMatrix& v);

/// Tangle of the effective (second-moment) covariance of a mixture.
Real tangle_of_state(const GaussianMixtureState& state);

}  // namespace cvghz
