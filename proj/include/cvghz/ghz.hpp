#pragma once

// CV GHZ states and conditional photon subtraction/addition pipelines.

#include "cvghz/phasespace.hpp"

#include <string>
#include <vector>

namespace cvghz {

/// GHZ squeezings: r1 squeezes p of the seed mode, r2 squeezes x of the
/// other N-1 modes.
struct GHZParams {
  int num_modes = 3;
  Real r1 = 0;
  Real r2 = 0;

  /// Biased state with r1 = r2 = r.
  static GHZParams biased(Real r, int num_modes = 3) { return GHZParams{num_modes, r, r}; }
  void validate() const;
};

/// Closed-form entries of the GHZ covariance: a, c on the x block and b, d
/// on the p block.
struct GHZEntries {
  Real a, b, c, d;
};
GHZEntries ghz_entries(const GHZParams& params);

CovarianceMatrix ghz_covariance(const GHZParams& params);

/// One p-squeezed and two x-squeezed vacua through a tritter
/// (BS(0,1; 1/sqrt3) followed by BS(1,2; 1/sqrt2)). Three modes only.
GaussianMixtureState ghz_circuit(const GHZParams& params);

/// Single-term state with the closed-form covariance, any N.
GaussianMixtureState ghz_state(const GHZParams& params);

enum class PhotonOp { Subtract, Add };

/// Modes A, B, C are 0, 1, 2. In the teleportation network A sends, B helps
/// and C receives.
inline constexpr int kModeA = 0;
inline constexpr int kModeB = 1;
inline constexpr int kModeC = 2;

inline constexpr Real kDefaultTransmittance = 0.99L;
inline constexpr Real kDefaultAmplifierStrength = 0.01L;

/// One conditional photon operation. For Subtract, `coupling` is the
/// intensity transmittance |t|^2 of the tapping beam splitter; for Add it is
/// the amplifier interaction strength s.
struct PhotonOpSpec {
  PhotonOp kind = PhotonOp::Subtract;
  int mode = kModeA;
  Real coupling = kDefaultTransmittance;

  static PhotonOpSpec subtract(int mode, Real transmittance = kDefaultTransmittance) {
    return {PhotonOp::Subtract, mode, transmittance};
  }
  static PhotonOpSpec add(int mode, Real strength = kDefaultAmplifierStrength) {
    return {PhotonOp::Add, mode, strength};
  }
  void validate(int num_modes) const;
};

using Scheme = std::vector<PhotonOpSpec>;

/// Same operation on every listed mode.
Scheme make_scheme(PhotonOp kind, const std::vector<int>& modes, Real coupling);
Scheme make_scheme(PhotonOp kind, const std::vector<int>& modes);

/// "GHZ", "sub:A,C", "add:B", ...
std::string scheme_label(const Scheme& scheme);

/// Sequentially attach an ancilla, couple it to the target mode, condition on
/// a click and drop it. Result has 2^k terms for k operations and norm equal
/// to the joint success probability. Throws ZeroProbabilityError if that
/// probability vanishes and std::invalid_argument if a mode is operated on
/// twice.
GaussianMixtureState apply_photon_ops(const GaussianMixtureState& state, const Scheme& ops);

/// Biased three-mode GHZ(r), then `ops`, then loss `eta` on every mode.
GaussianMixtureState prepare_state(Real r, const Scheme& ops, Real eta = 1);

}  // namespace cvghz
