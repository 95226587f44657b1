// Acceptance run: one PASS/FAIL line per criterion, with the measured values
// listed above it. Exit status is the number of failed criteria.

#include "cvghz/entanglement.hpp"
#include "cvghz/nonlocality.hpp"
#include "cvghz/oracle_check.hpp"
#include "cvghz/teleportation.hpp"
#include "test_util.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace cvghz {
namespace {

struct Criterion {
  int id;
  std::string title;
  std::function<bool(std::vector<std::string>&)> check;
};

Scheme sub(std::vector<int> modes) { return make_scheme(PhotonOp::Subtract, modes); }
Scheme add(std::vector<int> modes) { return make_scheme(PhotonOp::Add, modes); }

struct Target {
  Scheme ops;
  double expected;
};

bool within(std::vector<std::string>& log, const std::string& what, double value, double expected, double tol) {
  const bool ok = std::abs(value - expected) <= tol;
  log.push_back(fmt::format("{:<28} {:>12.6f}  expected {:.3f} +- {}  {}", what, value, expected, tol, ok ? "ok" : "MISS"));
  return ok;
}

bool fidelity_anchor(std::vector<std::string>& log) {
  const double f = double(fidelity_gaussian(CovarianceMatrix::vacuum(3), 1));
  log.push_back(fmt::format("F(vacuum, g=1) = {:.15f}, 1/sqrt5 = {:.15f}", f, 1 / std::sqrt(5.0)));
  return std::abs(f - 1 / std::sqrt(5.0)) <= 1e-9;
}

bool mk_maxima(std::vector<std::string>& log) {
  const std::vector<Target> targets = {{{}, 2.324},          {sub({0}), 2.301}, {sub({0, 1}), 2.293}, {sub({0, 1, 2}), 2.428},
                                       {add({0}), 2.368},    {add({0, 1}), 2.412}, {add({0, 1, 2}), 2.495}};
  bool ok = true;
  for (const auto& t : targets) {
    const B3Optimum m = max_b3_over_r(t.ops, 1);
    ok &= within(log, fmt::format("{} (r*={:.3f}, x*={:.3f})", scheme_label(t.ops), double(m.r), double(m.x)),
                 double(m.magnitude()), t.expected, 0.01);
  }
  return ok;
}

bool efficiency_thresholds(std::vector<std::string>& log) {
  const std::vector<Target> targets = {{{}, 0.694},          {sub({0}), 0.972}, {sub({0, 1}), 0.750}, {sub({0, 1, 2}), 0.931},
                                       {add({0}), 0.972},    {add({0, 1}), 0.982}, {add({0, 1, 2}), 0.986}};
  bool ok = true;
  for (const auto& t : targets) {
    ok &= within(log, scheme_label(t.ops), double(threshold_efficiency(t.ops)), t.expected, 0.01);
  }
  return ok;
}

bool threshold_list(std::vector<std::string>& log, const std::vector<Target>& targets, GainMode mode) {
  bool ok = true;
  for (const auto& t : targets) {
    double r = std::nan("");
    try {
      r = double(threshold_squeezing(t.ops, mode));
    } catch (const std::domain_error& e) {
      log.push_back(fmt::format("{}: {}", scheme_label(t.ops), e.what()));
    }
    ok &= within(log, scheme_label(t.ops), r, t.expected, 0.01);
  }
  return ok;
}

bool unit_gain_thresholds(std::vector<std::string>& log) {
  return threshold_list(log,
                        {{{}, 0.107},
                         {sub({0}), 0.481},
                         {sub({2}), 0.481},
                         {sub({1}), 0.291},
                         {sub({0, 1}), 0.080},
                         {sub({1, 2}), 0.080},
                         {sub({0, 2}), 0.060},
                         {sub({0, 1, 2}), 0.469},
                         {add({0}), 0.477},
                         {add({2}), 0.477},
                         {add({1}), 0.289},
                         {add({0, 1}), 0.443},
                         {add({1, 2}), 0.443},
                         {add({0, 2}), 0.426},
                         {add({0, 1, 2}), 0.484}},
                        GainMode::Unit);
}

bool optimal_gain_thresholds(std::vector<std::string>& log) {
  bool ok = threshold_list(log,
                           {{sub({0}), 0.338},
                            {sub({1}), 0.264},
                            {sub({0, 1, 2}), 0.384},
                            {add({0}), 0.471},
                            {add({0, 1}), 0.436},
                            {add({0, 2}), 0.422},
                            {add({0, 1, 2}), 0.450}},
                           GainMode::Optimal);
  double worst = 0;
  for (int k = 0; k <= 95; ++k) {
    const Real r = 0.05L + 0.01L * k;
    const Real e = std::exp(4 * r);
    const Real g = optimal_gain(ghz_state(GHZParams::biased(r))).gain;
    worst = std::max(worst, std::abs(double(g - (e - 1) / (e + 0.5L))));
  }
  log.push_back(fmt::format("GHZ optimal gain vs closed form, r in [0.05, 1]: max deviation {:.2e} (tol 1e-4)", worst));
  return ok && worst <= 1e-4;
}

bool role_symmetry(std::vector<std::string>& log) {
  double worst = 0;
  for (PhotonOp kind : {PhotonOp::Subtract, PhotonOp::Add}) {
    for (int k = 1; k <= 100; ++k) {
      const Real r = 0.015L * k;
      const auto pair = [&](std::vector<int> a, std::vector<int> b) {
        const auto sa = prepare_state(r, make_scheme(kind, a));
        const auto sb = prepare_state(r, make_scheme(kind, b));
        worst = std::max(worst, std::abs(double(fidelity_state(sa, 1) - fidelity_state(sb, 1))));
        worst = std::max(worst, std::abs(double(optimal_gain(sa).fidelity - optimal_gain(sb).fidelity)));
      };
      pair({0}, {2});
      pair({0, 1}, {1, 2});
    }
  }
  log.push_back(fmt::format("max |F_A - F_C|, |F_AB - F_BC| over 100 r values, unit and optimal gain: {:.2e}", worst));
  return worst <= 1e-10;
}

bool tangle_orderings(std::vector<std::string>& log) {
  bool ok = true;
  for (Real r : {0.1L, 0.2L}) {
    const Real ghz = gaussian_tangle(ghz_covariance(GHZParams::biased(r)));
    log.push_back(fmt::format("r={:.1f}  GHZ {:.6f}", double(r), double(ghz)));
    const auto report = [&](const Scheme& ops, bool should_exceed) {
      const Real t = tangle_of_state(prepare_state(r, ops));
      const bool pass = should_exceed ? t > ghz : t <= ghz;
      log.push_back(fmt::format("      {:<10} {:.6f}  {} GHZ  {}", scheme_label(ops), double(t), should_exceed ? ">" : "<=",
                                pass ? "ok" : "MISS"));
      ok &= pass;
    };
    report(sub({0, 1}), true);
    report(sub({0}), false);
    report(sub({0, 1, 2}), false);
    report(add({0}), false);
    report(add({0, 1}), false);
    report(add({0, 1, 2}), false);
  }
  double worst = 0;
  for (PhotonOp kind : {PhotonOp::Subtract, PhotonOp::Add}) {
    for (Real r : {0.1L, 0.2L, 0.5L}) {
      const Real one = tangle_of_state(prepare_state(r, make_scheme(kind, {0})));
      const Real two = tangle_of_state(prepare_state(r, make_scheme(kind, {0, 1})));
      for (int m : {1, 2}) worst = std::max(worst, std::abs(double(one - tangle_of_state(prepare_state(r, make_scheme(kind, {m}))))));
      for (auto modes : {std::vector<int>{0, 2}, std::vector<int>{1, 2}}) {
        worst = std::max(worst, std::abs(double(two - tangle_of_state(prepare_state(r, make_scheme(kind, modes))))));
      }
    }
  }
  log.push_back(fmt::format("tangle spread across mode choices: {:.2e} (tol 1e-10)", worst));
  return ok && worst <= 1e-10;
}

bool oracle_equivalence(std::vector<std::string>& log) {
  const OracleReport report = run_oracle_suite();
  double worst_ratio = 0;
  for (const auto& c : report.checks) {
    if (!c.passed()) log.push_back(fmt::format("{}: error {:.3e} > {:.1e}", c.name, c.error, c.tolerance));
    worst_ratio = std::max(worst_ratio, c.error / c.tolerance);
  }
  log.push_back(fmt::format("{} checks, {} failed; worst error/tolerance {:.3f}", report.checks.size(), report.failures(),
                            worst_ratio));
  return report.all_passed();
}

bool two_path_identity(std::vector<std::string>& log) {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> gain(0, 1.5);
  double worst = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto v = testing::random_covariance(3, rng);
    const Real g = gain(rng);
    worst = std::max(worst, std::abs(double(fidelity_gaussian(v, g) - fidelity_two_path_check(v, g))));
  }
  log.push_back(fmt::format("1000 random (V, g): max |F_det - F_map| = {:.2e}", worst));
  return worst <= 1e-10;
}

bool property_suite(std::vector<std::string>& log) {
  bool ok = true;
  const auto note = [&](const std::string& what, bool pass) {
    log.push_back(fmt::format("{:<48} {}", what, pass ? "ok" : "MISS"));
    ok &= pass;
  };

  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  Real defect = 0;
  for (int k = 0; k < 200; ++k) {
    defect = std::max({defect, beam_splitter(u(rng), 0, 2, 4).symplectic_defect(), ndpa(u(rng), 1, 3, 4).symplectic_defect(),
                       single_mode_squeezer(2 * u(rng) - 1, 2, 4).symplectic_defect(),
                       phase_rotation(6 * u(rng), 3, 4).symplectic_defect()});
  }
  note(fmt::format("symplectic closure (max defect {:.1e})", double(defect)), defect < 1e-12L);

  const std::vector<Scheme> schemes = {{},        sub({0}), sub({0, 1}), sub({0, 1, 2}), sub({1}), sub({0, 2}),
                                       add({0}),  add({0, 1}), add({0, 1, 2}), add({1}), add({0, 2})};
  bool physical = true;
  double b3_max = 0;
  for (const auto& ops : schemes) {
    for (int k = 1; k <= 20; ++k) {
      for (Real eta : {1.0L, 0.9L, 0.7L}) {
        const auto state = prepare_state(0.1L * k, ops, eta);
        physical &= effective_covariance(state).satisfies_uncertainty();
        const B3Profile profile(state);
        for (int i = 0; i <= 40; ++i) b3_max = std::max(b3_max, std::abs(double(profile(0.05L * i))));
      }
    }
  }
  note("uncertainty relation for every produced state", physical);
  note(fmt::format("|B3| <= 2 sqrt2 (largest seen {:.4f})", b3_max), b3_max <= 2 * std::sqrt(2.0) + 1e-6);

  std::normal_distribution<double> g;
  double order_gap = 0;
  const auto ghz = ghz_state(GHZParams::biased(0.4L));
  for (const auto& [a, b] : {std::pair{sub({0, 2}), sub({2, 0})}, std::pair{add({1, 0}), add({0, 1})},
                             std::pair{Scheme{PhotonOpSpec::subtract(0), PhotonOpSpec::add(2)},
                                       Scheme{PhotonOpSpec::add(2), PhotonOpSpec::subtract(0)}}}) {
    const auto sa = apply_photon_ops(ghz, a);
    const auto sb = apply_photon_ops(ghz, b);
    order_gap = std::max(order_gap, std::abs(double((mixture_norm(sa) - mixture_norm(sb)) / mixture_norm(sa))));
    order_gap = std::max(order_gap, double(testing::max_abs_diff(effective_covariance(sa).matrix(), effective_covariance(sb).matrix())));
    const WignerEvaluator wa(sa), wb(sb);
    for (int k = 0; k < 100; ++k) {
      Vector p(6);
      for (int q = 0; q < 6; ++q) p(q) = g(rng);
      order_gap = std::max(order_gap, std::abs(double(wa(p) - wb(p))));
    }
  }
  note(fmt::format("conditioning order independence ({:.1e})", order_gap), order_gap <= 1e-10);

  double loss_gap = 0;
  for (const auto& ops : schemes) {
    const auto state = prepare_state(0.5L, ops);
    const auto twice = apply_loss(apply_loss(state, 0.83L), 0.61L);
    const auto once = apply_loss(state, 0.83L * 0.61L);
    for (std::size_t k = 0; k < once.size(); ++k) {
      loss_gap = std::max(loss_gap, double(testing::max_abs_diff(twice.terms()[k].cov.matrix(), once.terms()[k].cov.matrix())));
    }
  }
  note(fmt::format("loss composition ({:.1e})", loss_gap), loss_gap <= 1e-12);

  double epr_gap = 0;
  for (int k = 0; k <= 40; ++k) {
    const Real r = 0.05L * k;
    epr_gap = std::max(epr_gap, std::abs(double(epr_sum(ghz_state(GHZParams::biased(r)), 0, 2) - 2.5L * std::exp(-2 * r))));
  }
  note(fmt::format("GHZ EPR sum = (5/2) exp(-2r) ({:.1e})", epr_gap), epr_gap <= 1e-10);
  return ok;
}

}  // namespace
}  // namespace cvghz

int main() {
  using namespace cvghz;
  const std::vector<Criterion> criteria = {
      {1, "fidelity anchor F(I/2, g=1) = 1/sqrt5", fidelity_anchor},
      {2, "MK maxima over r and x", mk_maxima},
      {3, "detection-efficiency thresholds", efficiency_thresholds},
      {4, "unit-gain fidelity thresholds", unit_gain_thresholds},
      {5, "optimal-gain fidelity thresholds and GHZ optimal gain", optimal_gain_thresholds},
      {6, "A/C and AB/BC role symmetry of fidelity", role_symmetry},
      {7, "Gaussian tangle orderings", tangle_orderings},
      {8, "Fock oracle equivalence", oracle_equivalence},
      {9, "two-path fidelity identity", two_path_identity},
      {10, "property suite", property_suite},
  };
  std::vector<std::string> summary;
  int failed = 0;
  for (const auto& c : criteria) {
    std::vector<std::string> log;
    const auto start = std::chrono::steady_clock::now();
    bool pass = false;
    try {
      pass = c.check(log);
    } catch (const std::exception& e) {
      log.push_back(fmt::format("exception: {}", e.what()));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    fmt::print("criterion {}: {}\n", c.id, c.title);
    for (const auto& line : log) fmt::print("    {}\n", line);
    const std::string line = fmt::format("{} {:>2} {} ({:.1f} s)", pass ? "PASS" : "FAIL", c.id, c.title, secs);
    fmt::print("{}\n\n", line);
    std::fflush(stdout);
    summary.push_back(line);
    failed += pass ? 0 : 1;
  }
  fmt::print("summary\n");
  for (const auto& line : summary) fmt::print("{}\n", line);
  fmt::print("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed;
}
