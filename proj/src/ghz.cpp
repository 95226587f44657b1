#include "cvghz/ghz.hpp"

#include <cmath>
#include <set>

#include <fmt/format.h>

namespace cvghz {

void GHZParams::validate() const {
  if (num_modes < 2 || num_modes > kMaxModes) {
    throw std::invalid_argument(fmt::format("GHZ needs 2..{} modes, got {}", kMaxModes, num_modes));
  }
  if (!(r1 >= 0) || !(r2 >= 0) || !std::isfinite(r1) || !std::isfinite(r2)) {
    throw std::invalid_argument("GHZ squeezing parameters must be finite and >= 0");
  }
}

GHZEntries ghz_entries(const GHZParams& p) {
  p.validate();
  const Real n = p.num_modes;
  const Real e1 = std::exp(2 * p.r1);
  const Real e2 = std::exp(2 * p.r2);
  return GHZEntries{
      e1 / (2 * n) + (n - 1) / (2 * n) / e2,
      1 / e1 / (2 * n) + (n - 1) / (2 * n) * e2,
      (e1 - 1 / e2) / (2 * n),
      (1 / e1 - e2) / (2 * n),
  };
}

CovarianceMatrix ghz_covariance(const GHZParams& params) {
  const auto [a, b, c, d] = ghz_entries(params);
  const int n = params.num_modes;
  Matrix v = Matrix::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      v(2 * i, 2 * j) = i == j ? a : c;
      v(2 * i + 1, 2 * j + 1) = i == j ? b : d;
    }
  }
  return CovarianceMatrix(std::move(v));
}

GaussianMixtureState ghz_circuit(const GHZParams& params) {
  params.validate();
  if (params.num_modes != 3) throw std::invalid_argument("ghz_circuit builds three-mode states only");
  auto state = vacuum_state(3);
  state = apply_symplectic(state, single_mode_squeezer(params.r1, 0, 3));
  state = apply_symplectic(state, single_mode_squeezer(-params.r2, 1, 3));
  state = apply_symplectic(state, single_mode_squeezer(-params.r2, 2, 3));
  state = apply_symplectic(state, beam_splitter(1 / std::sqrt(Real{3}), 0, 1, 3));
  state = apply_symplectic(state, beam_splitter(1 / std::sqrt(Real{2}), 1, 2, 3));
  return state;
}

GaussianMixtureState ghz_state(const GHZParams& params) {
  std::vector<GaussianTerm> terms;
  terms.emplace_back(1, Vector::Zero(2 * params.num_modes), ghz_covariance(params));
  return GaussianMixtureState(params.num_modes, std::move(terms));
}

void PhotonOpSpec::validate(int num_modes) const {
  if (mode < 0 || mode >= num_modes) {
    throw std::invalid_argument(fmt::format("photon operation on mode {} of a {}-mode state", mode, num_modes));
  }
  if (kind == PhotonOp::Subtract && !(coupling > 0 && coupling < 1)) {
    throw std::invalid_argument("subtraction transmittance must lie in (0, 1)");
  }
  if (kind == PhotonOp::Add && !(coupling > 0 && std::isfinite(coupling))) {
    throw std::invalid_argument("addition strength must be > 0");
  }
}

Scheme make_scheme(PhotonOp kind, const std::vector<int>& modes, Real coupling) {
  Scheme out;
  for (int m : modes) out.push_back(PhotonOpSpec{kind, m, coupling});
  return out;
}

Scheme make_scheme(PhotonOp kind, const std::vector<int>& modes) {
  return make_scheme(kind, modes, kind == PhotonOp::Subtract ? kDefaultTransmittance : kDefaultAmplifierStrength);
}

std::string scheme_label(const Scheme& scheme) {
  if (scheme.empty()) return "GHZ";
  std::string out;
  PhotonOp last = scheme.front().kind;
  out += last == PhotonOp::Subtract ? "sub:" : "add:";
  bool first = true;
  for (const auto& op : scheme) {
    if (op.kind != last) {
      out += op.kind == PhotonOp::Subtract ? "/sub:" : "/add:";
      last = op.kind;
      first = true;
    }
    if (!first) out += ',';
    out += static_cast<char>('A' + op.mode);
    first = false;
  }
  return out;
}

GaussianMixtureState apply_photon_ops(const GaussianMixtureState& state, const Scheme& ops) {
  std::set<int> seen;
  for (const auto& op : ops) {
    op.validate(state.num_modes());
    if (!seen.insert(op.mode).second) {
      throw std::invalid_argument(fmt::format("mode {} is operated on more than once", op.mode));
    }
  }
  GaussianMixtureState current = state;
  for (const auto& op : ops) {
    const int ancilla = current.num_modes();
    auto dilated = attach_vacuum(current);
    const int n = dilated.num_modes();
    const SymplecticMatrix coupling = op.kind == PhotonOp::Subtract
                                          ? beam_splitter(std::sqrt(op.coupling), op.mode, ancilla, n)
                                          : ndpa(op.coupling, op.mode, ancilla, n);
    current = condition_on_click(apply_symplectic(dilated, coupling), ancilla);
  }
  if (!ops.empty()) require_positive_norm(current, "apply_photon_ops");
  return current;
}

GaussianMixtureState prepare_state(Real r, const Scheme& ops, Real eta) {
  auto state = apply_photon_ops(ghz_state(GHZParams::biased(r)), ops);
  return eta == 1 ? state : apply_loss(state, eta);
}

}  // namespace cvghz
