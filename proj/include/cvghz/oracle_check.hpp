#pragma once

// Cross-checks between the Gaussian-mixture pipeline and the truncated Fock
// simulator.

#include <cstdint>
#include <string>
#include <vector>

namespace cvghz {

struct OracleOptions {
  int cutoff = 20;
  std::uint64_t seed = 20240601;
  int wigner_points = 20;
  double tolerance = 1e-5;
  double ghz_tolerance = 1e-12;
  double ratio_tolerance = 0.05;
  int threads = 1;
};

struct OracleCheck {
  std::string name;
  double error;
  double tolerance;
  bool passed() const { return error <= tolerance; }
};

struct OracleReport {
  std::vector<OracleCheck> checks;
  bool all_passed() const;
  int failures() const;
};

/// Six schemes (sub/add on A, AB, ABC) at r = 0.1 and 0.3: success probability
/// (relative error), effective covariance and random Wigner values (absolute
/// error). Plus the GHZ circuit against the closed form and the small-r Fock
/// amplitude ratios.
OracleReport run_oracle_suite(const OracleOptions& options = {});

}  // namespace cvghz
