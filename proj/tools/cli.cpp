#include "cli.hpp"

#include "cvghz/entanglement.hpp"
#include "cvghz/fock.hpp"
#include "cvghz/nonlocality.hpp"
#include "cvghz/oracle_check.hpp"
#include "cvghz/parallel.hpp"
#include "cvghz/teleportation.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <regex>

namespace cvghz::cli {

namespace {

constexpr int kExitOracleFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitPhysics = 3;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) return out;
    start = pos + 1;
  }
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw UsageError(fmt::format("{}: '{}' is not a number", what, s));
}

int parse_mode(const std::string& s) {
  if (s == "A") return kModeA;
  if (s == "B") return kModeB;
  if (s == "C") return kModeC;
  throw UsageError(fmt::format("unknown mode '{}' (expected A, B or C)", s));
}

/// "", "GHZ" or "none" -> no operations; otherwise "sub:A,C" / "add:B".
Scheme parse_scheme(const std::string& spec, double t, double s) {
  if (spec.empty() || spec == "GHZ" || spec == "none") return {};
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw UsageError(fmt::format("--ops '{}': expected sub:MODES or add:MODES", spec));
  const std::string kind = spec.substr(0, colon);
  std::vector<int> modes;
  for (const auto& m : split(spec.substr(colon + 1), ',')) modes.push_back(parse_mode(m));
  Scheme ops;
  if (kind == "sub") {
    ops = make_scheme(PhotonOp::Subtract, modes, t);
  } else if (kind == "add") {
    ops = make_scheme(PhotonOp::Add, modes, s);
  } else {
    throw UsageError(fmt::format("--ops '{}': operation must be sub or add", spec));
  }
  for (const auto& op : ops) op.validate(3);
  std::vector<int> sorted = modes;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw UsageError(fmt::format("--ops '{}': a mode is listed twice", spec));
  }
  return ops;
}

/// "min:max:steps" (inclusive, steps >= 2) or a single value.
std::vector<double> parse_range(const std::string& spec, const std::string& what) {
  const auto parts = split(spec, ':');
  if (parts.size() == 1) return {parse_double(parts[0], what)};
  if (parts.size() != 3) throw UsageError(fmt::format("{} '{}': expected min:max:steps", what, spec));
  const double lo = parse_double(parts[0], what);
  const double hi = parse_double(parts[1], what);
  const double steps = parse_double(parts[2], what);
  if (!(lo < hi)) throw UsageError(fmt::format("{} '{}': min must be below max", what, spec));
  if (steps < 2 || steps != std::floor(steps) || steps > 1e7) {
    throw UsageError(fmt::format("{} '{}': steps must be an integer >= 2", what, spec));
  }
  const int n = static_cast<int>(steps);
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) out[k] = k == n - 1 ? hi : lo + (hi - lo) * k / (n - 1);
  return out;
}

/// "min:max:step" with a positive step.
AxisGrid parse_grid(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 3) throw UsageError(fmt::format("--grid '{}': expected min:max:step", spec));
  AxisGrid g{parse_double(parts[0], "--grid"), parse_double(parts[1], "--grid"), parse_double(parts[2], "--grid")};
  if (!(g.min < g.max) || !(g.step > 0)) throw UsageError(fmt::format("--grid '{}': need min < max and step > 0", spec));
  return g;
}

/// "1", "-0.5", "1+0.5i", "0.3-2i", "2i".
std::complex<double> parse_complex(const std::string& spec) {
  static const std::regex re(R"(^\s*([+-]?[0-9.]+(?:[eE][+-]?[0-9]+)?)?\s*(?:([+-])\s*([0-9.]+(?:[eE][+-]?[0-9]+)?)?\s*i)?\s*$)");
  static const std::regex pure_imag(R"(^\s*([+-]?[0-9.]+(?:[eE][+-]?[0-9]+)?)?\s*i\s*$)");
  std::smatch m;
  if (std::regex_match(spec, m, pure_imag)) {
    const std::string v = m[1].str();
    return {0, v.empty() || v == "+" ? 1.0 : v == "-" ? -1.0 : parse_double(v, "--alpha")};
  }
  if (!spec.empty() && std::regex_match(spec, m, re) && m[1].matched) {
    const double re_part = parse_double(m[1].str(), "--alpha");
    double im_part = 0;
    if (m[2].matched) {
      im_part = m[3].matched ? parse_double(m[3].str(), "--alpha") : 1.0;
      if (m[2].str() == "-") im_part = -im_part;
    }
    return {re_part, im_part};
  }
  throw UsageError(fmt::format("--alpha '{}': expected a complex number such as 1+0.5i", spec));
}

std::pair<int, int> parse_pair(const std::string& spec) {
  const auto parts = split(spec, ',');
  if (parts.size() != 2) throw UsageError(fmt::format("--pair '{}': expected two modes such as A,C", spec));
  const int i = parse_mode(parts[0]);
  const int j = parse_mode(parts[1]);
  if (i == j) throw UsageError("--pair needs two different modes");
  return {i, j};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{:.9g}", v);
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

void write_table(std::ostream& out, const Table& t) {
  out << fmt::format("{}\n", fmt::join(t.header, ","));
  for (const auto& row : t.rows) {
    std::vector<std::string> cells;
    cells.reserve(row.size());
    for (double v : row) cells.push_back(format_value(v));
    out << fmt::format("{}\n", fmt::join(cells, ","));
  }
}

/// Evaluate fn at every parameter value on `threads` workers. A point whose
/// conditioning has zero success probability becomes a row of NaNs after
/// the parameter.
template <typename Fn>
std::vector<std::vector<double>> sweep(const std::vector<double>& params, std::size_t width, int threads, Fn fn) {
  std::vector<std::vector<double>> rows(params.size());
  parallel_for(static_cast<int>(params.size()), threads, [&](int k) {
    try {
      rows[k] = fn(params[k]);
    } catch (const ZeroProbabilityError&) {
      rows[k].assign(width, kNaN);
      rows[k][0] = params[k];
    }
  });
  return rows;
}

struct Common {
  std::string ops;
  double t = static_cast<double>(kDefaultTransmittance);
  double s = static_cast<double>(kDefaultAmplifierStrength);
  double eta = 1;
  int threads = 1;
  std::string out;
  std::string r = "0.3";
  std::string gain = "unit";
  std::string config;  // consumed by expand_config, listed here for --help

  Scheme scheme() const { return parse_scheme(ops, t, s); }
};

void add_output(CLI::App* sub, Common& c) {
  sub->add_option("--out", c.out, "Write CSV here instead of standard output");
  sub->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--config", c.config, "key=value file mirroring the flags (command-line flags win)");
}

void add_scheme(CLI::App* sub, Common& c) {
  sub->add_option("--ops", c.ops, "Photon operations, e.g. sub:A,C or add:B (default: none)");
  sub->add_option("--t", c.t, "Subtraction beam-splitter transmittance");
  sub->add_option("--s", c.s, "Addition amplifier strength");
}

struct GainChoice {
  GainMode mode = GainMode::Unit;
  std::optional<double> fixed;
};

GainChoice parse_gain(const std::string& spec) {
  if (spec == "unit") return {GainMode::Unit, std::nullopt};
  if (spec == "optimal") return {GainMode::Optimal, std::nullopt};
  return {GainMode::Unit, parse_double(spec, "--gain")};
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw UsageError(fmt::format("cannot open '{}' for writing", path));
  return file;
}

int dispatch(CLI::App& app, const std::string& name, Common& c, const std::map<std::string, std::string>& extra) {
  std::ofstream file;
  std::ostream& out = open_output(c.out, file);
  const auto& get = [&](const char* key) { return extra.at(key); };

  if (name == "ghz-cov") {
    const int modes = std::stoi(get("modes"));
    Table t{{"r", "a", "b", "c", "d"}, {}};
    t.rows = sweep(parse_range(c.r, "--r"), 5, c.threads, [&](double r) {
      const auto e = ghz_entries(GHZParams::biased(r, modes));
      return std::vector<double>{r, double(e.a), double(e.b), double(e.c), double(e.d)};
    });
    write_table(out, t);
  } else if (name == "tangle") {
    const Scheme ops = c.scheme();
    Table t{{"r", "tangle"}, {}};
    t.rows = sweep(parse_range(c.r, "--r"), 2, c.threads, [&](double r) {
      return std::vector<double>{r, double(tangle_of_state(prepare_state(r, ops, c.eta)))};
    });
    write_table(out, t);
  } else if (name == "mk") {
    const Scheme ops = c.scheme();
    Table t{{"r", "x", "b3"}, {}};
    t.rows = sweep(parse_range(c.r, "--r"), 3, c.threads, [&](double r) {
      const B3Max m = maximize_b3(prepare_state(r, ops, c.eta));
      return std::vector<double>{r, double(m.x), double(m.b3)};
    });
    write_table(out, t);
  } else if (name == "mk-noise") {
    const Scheme ops = c.scheme();
    Table t{{"eta", "r", "x", "b3"}, {}};
    t.rows = sweep(parse_range(get("eta-range"), "--eta"), 4, c.threads, [&](double eta) {
      const B3Optimum m = max_b3_over_r(ops, eta);
      return std::vector<double>{eta, double(m.r), double(m.x), double(m.b3)};
    });
    write_table(out, t);
  } else if (name == "fidelity") {
    const Scheme ops = c.scheme();
    const GainChoice gain = parse_gain(c.gain);
    Table t{{"r", "g", "fidelity"}, {}};
    t.rows = sweep(parse_range(c.r, "--r"), 3, c.threads, [&](double r) {
      const auto state = prepare_state(r, ops);
      if (gain.mode == GainMode::Optimal) {
        const GainOptimum best = optimal_gain(state);
        return std::vector<double>{r, double(best.gain), double(best.fidelity)};
      }
      const double g = gain.fixed.value_or(1.0);
      return std::vector<double>{r, g, double(fidelity_state(state, g))};
    });
    write_table(out, t);
  } else if (name == "epr") {
    const Scheme ops = c.scheme();
    const auto [i, j] = parse_pair(get("pair"));
    Table t{{"r", "epr"}, {}};
    t.rows = sweep(parse_range(c.r, "--r"), 2, c.threads, [&, i = i, j = j](double r) {
      return std::vector<double>{r, double(epr_sum(prepare_state(r, ops, c.eta), i, j))};
    });
    write_table(out, t);
  } else if (name == "contour") {
    const Scheme ops = c.scheme();
    const double r = parse_double(c.r, "--r");
    const GainChoice gain = parse_gain(c.gain);
    const auto resource = prepare_state(r, ops);
    const Real g = gain.mode == GainMode::Optimal ? Real(optimal_gain(resource).gain) : Real(gain.fixed.value_or(1.0));
    const std::complex<double> alpha = parse_complex(get("alpha"));
    const WignerField field = output_wigner(resource, TeleportConfig{g, {alpha.real(), alpha.imag()}}, parse_grid(get("grid")));
    Table t{{"x", "p", "w"}, {}};
    for (std::size_t a = 0; a < field.xs.size(); ++a) {
      for (std::size_t b = 0; b < field.ps.size(); ++b) {
        t.rows.push_back({double(field.xs[a]), double(field.ps[b]), double(field.at(a, b))});
      }
    }
    write_table(out, t);
  } else if (name == "thresholds") {
    const Scheme ops = c.scheme();
    const std::string task = get("task");
    const std::string label = scheme_label(ops);
    if (task == "fidelity") {
      const GainChoice gain = parse_gain(c.gain);
      if (gain.fixed) throw UsageError("thresholds: --gain must be unit or optimal");
      const Real r = threshold_squeezing(ops, gain.mode);
      out << "scheme,gain,r_threshold\n" << fmt::format("{},{},{}\n", csv_field(label), c.gain, format_value(double(r)));
    } else if (task == "mk-noise") {
      const Real eta = threshold_efficiency(ops, SearchGrid{}, 1e-4, c.threads);
      out << "scheme,eta_threshold\n" << fmt::format("{},{}\n", csv_field(label), format_value(double(eta)));
    } else {
      throw UsageError(fmt::format("--task '{}': expected fidelity or mk-noise", task));
    }
  } else if (name == "oracle-check") {
    OracleOptions opt;
    opt.cutoff = std::stoi(get("cutoff"));
    opt.seed = std::stoull(get("seed"));
    opt.threads = c.threads;
    const OracleReport report = run_oracle_suite(opt);
    out << "check,error,tolerance,status\n";
    for (const auto& check : report.checks) {
      out << fmt::format("{},{},{},{}\n", csv_field(check.name), format_value(check.error), format_value(check.tolerance),
                         check.passed() ? "pass" : "fail");
    }
    return report.all_passed() ? 0 : kExitOracleFailure;
  } else {
    std::cerr << app.help();
    return kExitUsage;
  }
  return 0;
}

/// Replace "--config FILE" by the flags it lists. Lines are key=value; blank
/// lines and lines starting with # are skipped. Flags already given on the
/// command line are not overridden.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::string path;
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k] == "--config") {
      if (k + 1 == args.size()) throw UsageError("--config needs a file name");
      path = args[++k];
    } else if (args[k].rfind("--config=", 0) == 0) {
      path = args[k].substr(9);
    } else {
      out.push_back(args[k]);
    }
  }
  if (path.empty()) return out;
  std::ifstream in(path);
  if (!in) throw UsageError(fmt::format("cannot read config file '{}'", path));
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(fmt::format("{}:{}: expected key=value", path, lineno));
    const std::string flag = "--" + trim(line.substr(0, eq));
    const bool given = std::any_of(out.begin(), out.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (!given) {
      out.push_back(flag);
      out.push_back(trim(line.substr(eq + 1)));
    }
  }
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args_in) {
  CLI::App app{"Photon-subtracted and photon-added CV GHZ states: entanglement, MK violation and teleportation", "cvghz"};
  app.require_subcommand(1);
  Common c;
  std::map<std::string, std::string> extra{{"modes", "3"}, {"eta-range", "0.5:1:51"}, {"pair", "A,C"},   {"alpha", "1"},
                                           {"grid", "-4:4:0.05"}, {"task", "fidelity"}, {"cutoff", "20"}, {"seed", "20240601"}};

  auto* ghz = app.add_subcommand("ghz-cov", "Closed-form GHZ covariance entries a, b, c, d against r");
  ghz->add_option("--r", c.r, "Squeezing: value or min:max:steps");
  ghz->add_option("--modes", extra["modes"], "Number of modes (2-4)");
  add_output(ghz, c);

  auto* tangle = app.add_subcommand("tangle", "Gaussian tangle against r");
  tangle->add_option("--r", c.r, "Squeezing: value or min:max:steps");
  tangle->add_option("--eta", c.eta, "Detection efficiency");
  add_scheme(tangle, c);
  add_output(tangle, c);

  auto* mk = app.add_subcommand("mk", "Maximal |B3| over x against r");
  mk->add_option("--r", c.r, "Squeezing: value or min:max:steps");
  mk->add_option("--eta", c.eta, "Detection efficiency");
  add_scheme(mk, c);
  add_output(mk, c);

  auto* noise = app.add_subcommand("mk-noise", "Maximal |B3| over r and x against detection efficiency");
  noise->add_option("--eta", extra["eta-range"], "Efficiency: value or min:max:steps");
  add_scheme(noise, c);
  add_output(noise, c);

  auto* fid = app.add_subcommand("fidelity", "Teleportation fidelity against r");
  fid->add_option("--r", c.r, "Squeezing: value or min:max:steps");
  fid->add_option("--gain", c.gain, "unit, optimal or a number");
  add_scheme(fid, c);
  add_output(fid, c);

  auto* epr = app.add_subcommand("epr", "EPR correlation sum against r");
  epr->add_option("--r", c.r, "Squeezing: value or min:max:steps");
  epr->add_option("--pair", extra["pair"], "Mode pair for the x difference, e.g. A,C");
  epr->add_option("--eta", c.eta, "Detection efficiency");
  add_scheme(epr, c);
  add_output(epr, c);

  auto* contour = app.add_subcommand("contour", "Wigner function of the teleported output");
  contour->add_option("--r", c.r, "Squeezing");
  contour->add_option("--alpha", extra["alpha"], "Coherent input amplitude, e.g. 1 or 1+0.5i");
  contour->add_option("--grid", extra["grid"], "Phase-space grid min:max:step");
  contour->add_option("--gain", c.gain, "unit, optimal or a number");
  add_scheme(contour, c);
  add_output(contour, c);

  auto* thr = app.add_subcommand("thresholds", "Fidelity squeezing threshold or MK efficiency threshold");
  thr->add_option("--task", extra["task"], "fidelity or mk-noise");
  thr->add_option("--gain", c.gain, "unit or optimal");
  add_scheme(thr, c);
  add_output(thr, c);

  auto* oracle = app.add_subcommand("oracle-check", "Compare the phase-space pipeline with a truncated Fock simulation");
  oracle->add_option("--cutoff", extra["cutoff"], "Photon-number cutoff per mode");
  oracle->add_option("--seed", extra["seed"], "Seed for the random Wigner points");
  add_output(oracle, c);

  std::vector<std::string> args;
  try {
    args = expand_config(args_in);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    return dispatch(app, name, c, extra);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const PhysicsError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPhysics;
  } catch (const fock::TruncationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPhysics;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPhysics;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args);
}

}  // namespace cvghz::cli
