#pragma once

// Three-party teleportation network: A sends, B measures p and feeds it
// forward with gain g, C receives. Input states are coherent states.

#include "cvghz/ghz.hpp"

#include <complex>
#include <vector>

namespace cvghz {

struct TeleportConfig {
  Real gain = 1;
  std::complex<Real> input_alpha{0, 0};
};

/// 8x8 matrices of the closed-form fidelity
/// F = 4 {det V det(L1 + K^T L2 K)}^(-1/2).
struct FidelityMatrices {
  Matrix l1;
  Matrix l2;
  Matrix k;
};

FidelityMatrices fidelity_matrices(const CovarianceMatrix& v, Real gain);

/// Average fidelity for a Gaussian zero-mean resource with covariance v,
/// through the determinant formula. Independent of the input amplitude.
Real fidelity_gaussian(const CovarianceMatrix& v, Real gain);

/// 2x6 map taking resource quadratures to the noise added to the input:
/// x_out += x3 - x1, p_out += p1 + g p2 + p3.
Eigen::Matrix<Real, 2, 6> output_noise_map(Real gain);

/// Same fidelity through the output covariance I/2 + A v A^T and the overlap
/// 1/sqrt(det(Sigma_out + I/2)).
Real fidelity_two_path_check(const CovarianceMatrix& v, Real gain);

/// Weighted average of fidelity_gaussian over the mixture terms.
Real fidelity_state(const GaussianMixtureState& state, Real gain);

struct GainOptimum {
  Real gain;
  Real fidelity;
};

/// Maximise fidelity_state over g in [0, 1.5].
GainOptimum optimal_gain(const GaussianMixtureState& state);

enum class GainMode { Unit, Optimal };

/// Smallest r in (0, 2) where the fidelity of GHZ(r) + ops first reaches 1/2,
/// by bisection to `tol`. Throws std::domain_error if there is no crossing
/// from below.
Real threshold_squeezing(const Scheme& ops, GainMode mode, double tol = 1e-4);

/// Fidelity of GHZ(r) + ops at unit gain or at the optimal gain.
Real scheme_fidelity(Real r, const Scheme& ops, GainMode mode);

/// Receiver's output as a single-mode mixture: one term per resource term,
/// mean (sqrt2 Re alpha, sqrt2 Im alpha), covariance I/2 + A V_i A^T.
GaussianMixtureState output_state(const GaussianMixtureState& resource, const TeleportConfig& config);

struct AxisGrid {
  Real min;
  Real max;
  Real step;
  std::vector<Real> nodes() const;
};

struct WignerField {
  std::vector<Real> xs;
  std::vector<Real> ps;
  std::vector<Real> values;  // row-major over (x, p): values[i * ps.size() + j]
  Real at(std::size_t i, std::size_t j) const { return values[i * ps.size() + j]; }
};

WignerField output_wigner(const GaussianMixtureState& resource, const TeleportConfig& config, const AxisGrid& grid);

/// <[Delta(x_i - x_j)]^2> + <(Delta sum_k p_k)^2> of the effective covariance.
Real epr_sum(const GaussianMixtureState& state, int mode_i, int mode_j);

}  // namespace cvghz
