#pragma once

// Truncated Fock-space simulator used as a brute-force cross-check of the
// phase-space results. Amplitudes are stored densely for up to four modes
// (three system modes plus one transient ancilla).

#include "cvghz/ghz.hpp"

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

namespace cvghz::fock {

using Complex = std::complex<double>;

/// Default photon-number cutoff per mode (levels 0 .. cutoff-1).
inline constexpr int kDefaultCutoff = 14;
/// Mass tolerated on the top level of any mode before a state counts as
/// unconverged.
inline constexpr double kDefaultEdgeMass = 1e-8;

class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense amplitude tensor psi(n_1, ..., n_k), mode 0 most significant.
class FockArray {
 public:
  FockArray(int num_modes, int cutoff);

  static FockArray vacuum(int num_modes, int cutoff);

  int num_modes() const { return num_modes_; }
  int cutoff() const { return cutoff_; }
  std::size_t size() const { return amp_.size(); }

  Complex& operator[](std::size_t flat) { return amp_[flat]; }
  const Complex& operator[](std::size_t flat) const { return amp_[flat]; }
  Complex at(std::span<const int> occupation) const;
  Complex& at(std::span<const int> occupation);
  Complex at(std::initializer_list<int> occupation) const;

  std::size_t stride(int mode) const { return strides_[mode]; }
  int occupation(std::size_t flat, int mode) const {
    return static_cast<int>((flat / strides_[mode]) % static_cast<std::size_t>(cutoff_));
  }

  std::span<Complex> data() { return amp_; }
  std::span<const Complex> data() const { return amp_; }

  double norm_squared() const;
  void normalize();

  /// Probability mass on the top level (n = cutoff - 1) of `mode`.
  double edge_mass(int mode) const;
  double max_edge_mass() const;

 private:
  int num_modes_;
  int cutoff_;
  std::vector<std::size_t> strides_;
  std::vector<Complex> amp_;
};

/// Single-mode squeezed vacuum; r > 0 squeezes x, r < 0 squeezes p.
/// Throws TruncationError when more than `max_edge_mass` of the state lies
/// on or beyond the top level.
FockArray squeezed_vacuum_fock(double r, int cutoff, double max_edge_mass = kDefaultEdgeMass);

FockArray tensor_product(const FockArray& a, const FockArray& b);

/// Append one vacuum mode as the last mode.
FockArray append_vacuum(const FockArray& state);

/// exp(theta (a_i a_j^dag - a_i^dag a_j)) with cos(theta) = t, matching the
/// phase-space beam_splitter(t, i, j).
FockArray beam_splitter_fock(const FockArray& state, double t, int mode_i, int mode_j,
                             double max_edge_mass = kDefaultEdgeMass);

/// exp(s (a_i^dag a_j^dag - a_i a_j)), matching the phase-space ndpa(s, i, j).
FockArray two_mode_squeezer_fock(const FockArray& state, double s, int mode_i, int mode_j,
                                 double max_edge_mass = kDefaultEdgeMass);

/// One pure component of a mixed state; `state` is normalised.
struct FockBranch {
  double weight;
  FockArray state;
};

/// rho = sum_b weight_b |psi_b><psi_b|, unnormalised; total weight is the
/// success probability of the conditionings that produced it.
struct FockBranchMixture {
  std::vector<FockBranch> branches;

  static FockBranchMixture pure(FockArray state);
  double probability() const;
  int num_modes() const { return branches.empty() ? 0 : branches.front().state.num_modes(); }
  int cutoff() const { return branches.empty() ? 0 : branches.front().state.cutoff(); }
};

/// Project the ancilla onto n >= 1 and trace it out; one branch per n with
/// nonzero weight.
FockBranchMixture condition_click_fock(const FockArray& state, int ancilla_mode);

/// Fock-space mirror of apply_photon_ops. Branches lighter than
/// `prune` times the running total are dropped.
FockBranchMixture apply_photon_ops_fock(const FockBranchMixture& state, const Scheme& ops,
                                        double max_edge_mass = kDefaultEdgeMass, double prune = 1e-16);

/// Biased or unbiased three-mode GHZ through the same tritter as ghz_circuit.
FockArray ghz_fock(const GHZParams& params, int cutoff, double max_edge_mass = kDefaultEdgeMass);
FockArray ghz_fock(double r, int cutoff, double max_edge_mass = kDefaultEdgeMass);

/// Covariance of the normalised mixture from truncated ladder operators.
Matrix covariance_from_fock(const FockBranchMixture& state);

/// Normalised Wigner function through the displaced-parity identity
/// W(xi) = <D(alpha) Pi D(alpha)^dag> / pi^N. Throws std::domain_error if
/// any |alpha_k|^2 exceeds cutoff/4.
double wigner_point_from_fock(const FockBranchMixture& state, std::span<const double> point);

/// <n|D(beta)|m> for n < rows, m < cols, exact (no truncation of the rows).
std::vector<Complex> displacement_matrix(Complex beta, int rows, int cols);

}  // namespace cvghz::fock
