#pragma once

// Multimode Gaussian phase space: covariance matrices, symplectic maps and
// signed Gaussian mixtures.
//
// Quadratures are ordered (x1, p1, ..., xN, pN) with x = (a + a^dag)/sqrt(2),
// so the vacuum covariance is I/2. Mixture arithmetic runs in long double:
// conditioned states at weak squeezing are differences of nearly equal
// Gaussians and double precision is not enough for them.

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvghz {

using Real = long double;

/// Largest supported mode count, including transient ancillas.
inline constexpr int kMaxModes = 4;
inline constexpr int kMaxDim = 2 * kMaxModes;

using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;
using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

/// Degenerate physics: zero success probability, singular covariance, ...
class PhysicsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ZeroProbabilityError : public PhysicsError {
 public:
  using PhysicsError::PhysicsError;
};

/// |det| below this is treated as singular.
inline constexpr Real kSingularDet = 1e-300L;

/// Block-diagonal symplectic form with blocks [[0,1],[-1,0]].
Matrix symplectic_form(int num_modes);

/// Real symmetric 2N x 2N matrix of quadrature second moments.
class CovarianceMatrix {
 public:
  /// Throws std::invalid_argument unless `v` is square, even-sized and
  /// symmetric to 1e-12 (relative to its largest entry).
  explicit CovarianceMatrix(Matrix v);

  /// Like the constructor but also requires the uncertainty relation.
  static CovarianceMatrix physical(Matrix v);
  static CovarianceMatrix vacuum(int num_modes);

  const Matrix& matrix() const { return v_; }
  int num_modes() const { return static_cast<int>(v_.rows() / 2); }
  Real operator()(Eigen::Index i, Eigen::Index j) const { return v_(i, j); }

  /// Smallest eigenvalue of the Hermitian matrix v + (i/2) omega. Physical
  /// covariances give a value >= 0 (up to rounding).
  Real uncertainty_margin() const;
  bool satisfies_uncertainty(Real tol = 1e-9L) const { return uncertainty_margin() >= -tol; }

 private:
  Matrix v_;
};

/// Real 2N x 2N matrix with S omega S^T = omega.
class SymplecticMatrix {
 public:
  /// Throws std::invalid_argument if `s` is not symplectic to 1e-12.
  explicit SymplecticMatrix(Matrix s);

  static SymplecticMatrix identity(int num_modes);

  const Matrix& matrix() const { return s_; }
  int num_modes() const { return static_cast<int>(s_.rows() / 2); }

  /// max_ij |S omega S^T - omega|_ij
  Real symplectic_defect() const;

 private:
  Matrix s_;
};

/// One signed Gaussian component w * N(xi; mean, cov).
struct GaussianTerm {
  Real weight;
  Vector mean;
  CovarianceMatrix cov;

  GaussianTerm(Real weight, Vector mean, CovarianceMatrix cov);
};

/// Unnormalised state as a finite signed sum of Gaussian Wigner functions.
/// The total weight is the success probability of every conditioning that
/// produced it.
class GaussianMixtureState {
 public:
  GaussianMixtureState(int num_modes, std::vector<GaussianTerm> terms);

  int num_modes() const { return num_modes_; }
  int dim() const { return 2 * num_modes_; }
  const std::vector<GaussianTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool zero_mean() const;

 private:
  int num_modes_;
  std::vector<GaussianTerm> terms_;
};

GaussianMixtureState vacuum_state(int num_modes);

/// Eq. 7 pattern on modes (i, j): [[t, -r], [r, t]] (x) I2 with r = sqrt(1 - t^2).
SymplecticMatrix beam_splitter(Real t, int mode_i, int mode_j, int num_modes);

/// Nondegenerate parametric amplifier: I2 cosh(s) on the diagonal blocks and
/// sigma_z sinh(s) on the off-diagonal blocks.
SymplecticMatrix ndpa(Real s, int mode_i, int mode_j, int num_modes);

/// diag(e^r, e^-r) on one mode; r > 0 squeezes p, r < 0 squeezes x.
SymplecticMatrix single_mode_squeezer(Real r, int mode, int num_modes);

/// Phase rotation by `theta` on one mode.
SymplecticMatrix phase_rotation(Real theta, int mode, int num_modes);

GaussianMixtureState apply_symplectic(const GaussianMixtureState& state, const SymplecticMatrix& s);

/// Append `count` vacuum modes after the existing ones.
GaussianMixtureState attach_vacuum(const GaussianMixtureState& state, int count = 1);

/// Project `ancilla_mode` onto an on/off detector click (I - |0><0|) and trace
/// it out. Each input term yields two output terms, so the result has twice
/// as many terms and norm = click probability * input norm. A zero or
/// negative norm is returned as is; normalising consumers reject it.
GaussianMixtureState condition_on_click(const GaussianMixtureState& state, int ancilla_mode);

/// Pure-loss channel with efficiency eta on every mode.
GaussianMixtureState apply_loss(const GaussianMixtureState& state, Real eta);

Real mixture_norm(const GaussianMixtureState& state);

/// sum_i w_i N(point; mean_i, cov_i), divided by the norm when `normalized`.
Real wigner_value(const GaussianMixtureState& state, const Vector& point, bool normalized = true);

/// Second moments of the normalised mixture (requires zero means).
CovarianceMatrix effective_covariance(const GaussianMixtureState& state);

/// Throws ZeroProbabilityError when the norm is not resolvably positive
/// given the cancellation between term weights.
void require_positive_norm(const GaussianMixtureState& state, const char* what);

/// Precomputed inverse covariances and prefactors for repeated evaluation of
/// the normalised Wigner function.
class WignerEvaluator {
 public:
  explicit WignerEvaluator(const GaussianMixtureState& state);

  Real operator()(const Vector& point) const;
  int dim() const { return dim_; }

  struct Term {
    Real coeff;  // w / (norm * sqrt(det(2 pi V)))
    Vector mean;
    Matrix inverse;
  };
  const std::vector<Term>& terms() const { return terms_; }

 private:
  int dim_;
  std::vector<Term> terms_;
};

/// Rows/columns of `v` belonging to `modes`, in the given order.
Matrix select_modes(const Matrix& v, const std::vector<int>& modes);

Real log_det_spd(const Matrix& v);

}  // namespace cvghz
