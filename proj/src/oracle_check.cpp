#include "cvghz/oracle_check.hpp"

#include "cvghz/fock.hpp"
#include "cvghz/parallel.hpp"

#include <cmath>
#include <optional>
#include <random>

#include <fmt/format.h>

namespace cvghz {

namespace {

struct SchemeCase {
  PhotonOp kind;
  std::vector<int> modes;
};

const std::vector<SchemeCase>& scheme_cases() {
  static const std::vector<SchemeCase> cases = {
      {PhotonOp::Subtract, {kModeA}}, {PhotonOp::Subtract, {kModeA, kModeB}}, {PhotonOp::Subtract, {kModeA, kModeB, kModeC}},
      {PhotonOp::Add, {kModeA}},      {PhotonOp::Add, {kModeA, kModeB}},      {PhotonOp::Add, {kModeA, kModeB, kModeC}},
  };
  return cases;
}

constexpr double kRadii[] = {0.1, 0.3};

double max_abs_diff(const Matrix& a, const Matrix& b) { return static_cast<double>((a - b).cwiseAbs().maxCoeff()); }

std::vector<OracleCheck> compare_scheme(const SchemeCase& sc, double r, const OracleOptions& opt, std::uint64_t seed) {
  const Scheme ops = make_scheme(sc.kind, sc.modes);
  const std::string label = fmt::format("{} r={}", scheme_label(ops), r);
  std::vector<OracleCheck> out;

  const GaussianMixtureState gaussian = prepare_state(r, ops);
  const auto fock_state =
      fock::apply_photon_ops_fock(fock::FockBranchMixture::pure(fock::ghz_fock(r, opt.cutoff)), ops);

  const double p_gauss = static_cast<double>(mixture_norm(gaussian));
  const double p_fock = fock_state.probability();
  out.push_back({label + " probability", std::abs(p_gauss - p_fock) / std::abs(p_gauss), opt.tolerance});

  const Matrix v_gauss = effective_covariance(gaussian).matrix();
  const Matrix v_fock = fock::covariance_from_fock(fock_state);
  out.push_back({label + " covariance", max_abs_diff(v_gauss, v_fock), opt.tolerance});

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-1.5, 1.5);
  const WignerEvaluator wigner(gaussian);
  double worst = 0;
  for (int k = 0; k < opt.wigner_points; ++k) {
    std::vector<double> point(6);
    Vector xi(6);
    for (int q = 0; q < 6; ++q) {
      point[q] = coord(rng);
      xi(q) = point[q];
    }
    const double w_gauss = static_cast<double>(wigner(xi));
    const double w_fock = fock::wigner_point_from_fock(fock_state, point);
    worst = std::max(worst, std::abs(w_gauss - w_fock));
  }
  out.push_back({fmt::format("{} wigner x{}", label, opt.wigner_points), worst, opt.tolerance});
  return out;
}

struct Ratio {
  std::vector<int> numerator;
  double coefficient;
  int power = 1;  // expected ratio is coefficient * r^power
};

struct RatioCase {
  std::string name;
  std::optional<SchemeCase> scheme;
  std::vector<int> reference;
  std::vector<Ratio> ratios;
};

std::vector<RatioCase> ratio_cases() {
  const double s2 = std::sqrt(2.0);
  const double s3 = std::sqrt(3.0);
  const double ghz2 = -s2 / 6;
  return {
      {"GHZ", std::nullopt, {0, 0, 0}, {{{2, 0, 0}, ghz2}, {{0, 2, 0}, ghz2}, {{0, 0, 2}, ghz2}, {{1, 1, 0}, 2.0 / 3}, {{0, 1, 1}, 2.0 / 3}, {{1, 0, 1}, 2.0 / 3}}},
      {"sub:A", SchemeCase{PhotonOp::Subtract, {kModeA}}, {1, 0, 0}, {{{0, 1, 0}, -2, 0}, {{0, 0, 1}, -2, 0}}},
      {"sub:A,B,C", SchemeCase{PhotonOp::Subtract, {kModeA, kModeB, kModeC}}, {1, 0, 0}, {{{0, 1, 0}, 1, 0}, {{0, 0, 1}, 1, 0}}},
      {"add:A", SchemeCase{PhotonOp::Add, {kModeA}}, {1, 0, 0},
       {{{3, 0, 0}, ghz2 * s3}, {{1, 2, 0}, ghz2}, {{1, 0, 2}, ghz2}, {{2, 1, 0}, 2 * s2 / 3}, {{1, 1, 1}, 2.0 / 3}, {{2, 0, 1}, 2 * s2 / 3}}},
      {"add:A,B", SchemeCase{PhotonOp::Add, {kModeA, kModeB}}, {1, 1, 0},
       {{{3, 1, 0}, ghz2 * s3}, {{1, 3, 0}, ghz2 * s3}, {{1, 1, 2}, ghz2}, {{2, 2, 0}, 4.0 / 3}, {{1, 2, 1}, 2 * s2 / 3}, {{2, 1, 1}, 2 * s2 / 3}}},
      {"add:A,B,C", SchemeCase{PhotonOp::Add, {kModeA, kModeB, kModeC}}, {1, 1, 1},
       {{{3, 1, 1}, -1 / std::sqrt(6.0)}, {{1, 3, 1}, -1 / std::sqrt(6.0)}, {{1, 1, 3}, -1 / std::sqrt(6.0)}, {{1, 2, 2}, 4.0 / 3}, {{2, 1, 2}, 4.0 / 3}, {{2, 2, 1}, 4.0 / 3}}},
  };
}

std::string ket(const std::vector<int>& n) { return fmt::format("|{}{}{}>", n[0], n[1], n[2]); }

std::vector<OracleCheck> small_r_ratios(const OracleOptions& opt) {
  constexpr double kSmallR = 0.01;
  std::vector<OracleCheck> out;
  const fock::FockArray ghz = fock::ghz_fock(kSmallR, opt.cutoff);
  for (const auto& rc : ratio_cases()) {
    // The leading branch (one photon at every detector) carries the ideal
    // ladder-operator action up to corrections in t and s.
    fock::FockArray state = ghz;
    if (rc.scheme) {
      const auto mixed = fock::apply_photon_ops_fock(fock::FockBranchMixture::pure(ghz),
                                                     make_scheme(rc.scheme->kind, rc.scheme->modes));
      state = mixed.branches.front().state;
    }
    const fock::Complex ref = state.at(std::span<const int>(rc.reference));
    for (const auto& ratio : rc.ratios) {
      const double expected = ratio.coefficient * std::pow(kSmallR, ratio.power);
      const double measured = (state.at(std::span<const int>(ratio.numerator)) / ref).real();
      out.push_back({fmt::format("ratio {} {}/{}", rc.name, ket(ratio.numerator), ket(rc.reference)),
                     std::abs(measured - expected) / std::abs(expected), opt.ratio_tolerance});
    }
  }
  // Double subtraction collapses onto the vacuum at leading order.
  const auto ab = fock::apply_photon_ops_fock(fock::FockBranchMixture::pure(ghz),
                                              make_scheme(PhotonOp::Subtract, {kModeA, kModeB}));
  const auto& lead = ab.branches.front().state;
  out.push_back({"ratio sub:A,B vacuum overlap", 1 - std::norm(lead.at({0, 0, 0})), opt.ratio_tolerance});
  return out;
}

std::vector<OracleCheck> ghz_closed_form(const OracleOptions& opt) {
  std::vector<OracleCheck> out;
  for (double r : {0.0, 0.1, 0.3, 0.7, 1.2, 2.0}) {
    const Matrix circuit = effective_covariance(ghz_circuit(GHZParams::biased(r))).matrix();
    const Matrix closed = ghz_covariance(GHZParams::biased(r)).matrix();
    out.push_back({fmt::format("GHZ circuit r={}", r), max_abs_diff(circuit, closed), opt.ghz_tolerance});
  }
  const GHZParams unbiased{3, 0.4L, 0.9L};
  out.push_back({"GHZ circuit r1=0.4 r2=0.9",
                 max_abs_diff(effective_covariance(ghz_circuit(unbiased)).matrix(), ghz_covariance(unbiased).matrix()),
                 opt.ghz_tolerance});
  return out;
}

}  // namespace

bool OracleReport::all_passed() const { return failures() == 0; }

int OracleReport::failures() const {
  int n = 0;
  for (const auto& c : checks) n += c.passed() ? 0 : 1;
  return n;
}

OracleReport run_oracle_suite(const OracleOptions& opt) {
  const auto& cases = scheme_cases();
  const int jobs = static_cast<int>(cases.size() * std::size(kRadii));
  std::vector<std::vector<OracleCheck>> slots(jobs);
  parallel_for(jobs, opt.threads, [&](int k) {
    const auto& sc = cases[k / std::size(kRadii)];
    const double r = kRadii[k % std::size(kRadii)];
    slots[k] = compare_scheme(sc, r, opt, opt.seed + k);
  });

  OracleReport report;
  for (auto& s : slots) report.checks.insert(report.checks.end(), s.begin(), s.end());
  for (auto& c : ghz_closed_form(opt)) report.checks.push_back(std::move(c));
  for (auto& c : small_r_ratios(opt)) report.checks.push_back(std::move(c));
  return report;
}

}  // namespace cvghz
