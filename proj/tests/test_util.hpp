#pragma once

#include "cvghz/phasespace.hpp"

#include <random>

namespace cvghz::testing {

inline Real max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

/// Random symplectic matrix built from local squeezers, rotations and beam
/// splitters, so it is symplectic independently of any closed form.
inline SymplecticMatrix random_symplectic(int num_modes, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> sq(-0.8, 0.8);
  std::uniform_real_distribution<double> angle(0, 6.283185307179586);
  std::uniform_real_distribution<double> amp(0.05, 1.0);
  Matrix s = Matrix::Identity(2 * num_modes, 2 * num_modes);
  for (int round = 0; round < 3; ++round) {
    for (int m = 0; m < num_modes; ++m) {
      s = single_mode_squeezer(sq(rng), m, num_modes).matrix() * s;
      s = phase_rotation(angle(rng), m, num_modes).matrix() * s;
    }
    for (int m = 0; m + 1 < num_modes; ++m) s = beam_splitter(amp(rng), m, m + 1, num_modes).matrix() * s;
  }
  return SymplecticMatrix(s);
}

/// Random mixed covariance S diag(nu) S^T with nu >= 1/2.
inline CovarianceMatrix random_covariance(int num_modes, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> thermal(0.5, 1.5);
  Matrix d = Matrix::Zero(2 * num_modes, 2 * num_modes);
  for (int m = 0; m < num_modes; ++m) d(2 * m, 2 * m) = d(2 * m + 1, 2 * m + 1) = thermal(rng);
  const Matrix s = random_symplectic(num_modes, rng).matrix();
  const Matrix v = s * d * s.transpose();
  return CovarianceMatrix((v + v.transpose()) / 2);
}

inline GaussianMixtureState single_term(const CovarianceMatrix& v) {
  std::vector<GaussianTerm> terms;
  terms.emplace_back(1, Vector::Zero(v.matrix().rows()), v);
  return GaussianMixtureState(v.num_modes(), std::move(terms));
}

}  // namespace cvghz::testing
