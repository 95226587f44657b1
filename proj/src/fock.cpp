#include "cvghz/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <fmt/format.h>

namespace cvghz::fock {

namespace {

void check_cutoff(int cutoff) {
  if (cutoff < 2) throw std::invalid_argument("Fock cutoff must be at least 2");
}

void check_pair(const FockArray& state, int mode_i, int mode_j) {
  const int n = state.num_modes();
  if (mode_i < 0 || mode_j < 0 || mode_i >= n || mode_j >= n || mode_i == mode_j) {
    throw std::invalid_argument(fmt::format("invalid Fock mode pair ({}, {})", mode_i, mode_j));
  }
}

enum class Generator { BeamSplitter, TwoModeSqueezer };

// out = G psi for the truncated generator on modes (i, j). Both generators
// are real antisymmetric on the truncated box, so exp(theta G) is orthogonal.
void apply_generator(const FockArray& psi, FockArray& out, Generator gen, int i, int j) {
  const int c = psi.cutoff();
  const std::size_t si = psi.stride(i);
  const std::size_t sj = psi.stride(j);
  std::fill(out.data().begin(), out.data().end(), Complex{});
  for (std::size_t f = 0; f < psi.size(); ++f) {
    const Complex amp = psi[f];
    if (amp == Complex{}) continue;
    const int ni = psi.occupation(f, i);
    const int nj = psi.occupation(f, j);
    if (gen == Generator::BeamSplitter) {
      if (ni >= 1 && nj + 1 < c) out[f - si + sj] += std::sqrt(double(ni) * (nj + 1)) * amp;
      if (nj >= 1 && ni + 1 < c) out[f + si - sj] -= std::sqrt(double(ni + 1) * nj) * amp;
    } else {
      if (ni + 1 < c && nj + 1 < c) out[f + si + sj] += std::sqrt(double(ni + 1) * (nj + 1)) * amp;
      if (ni >= 1 && nj >= 1) out[f - si - sj] -= std::sqrt(double(ni) * nj) * amp;
    }
  }
}

FockArray exponentiate(const FockArray& state, double theta, Generator gen, int i, int j) {
  // Split so that each substep has |h| * ||G|| <~ 1 and the Taylor series
  // converges without large intermediate terms.
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(theta) * state.cutoff())));
  const double h = theta / steps;
  FockArray acc = state;
  FockArray term(state.num_modes(), state.cutoff());
  FockArray next(state.num_modes(), state.cutoff());
  for (int s = 0; s < steps; ++s) {
    term = acc;
    const double base = std::sqrt(acc.norm_squared());
    for (int k = 1; k < 200; ++k) {
      apply_generator(term, next, gen, i, j);
      const double scale = h / k;
      double term_norm = 0;
      for (std::size_t f = 0; f < next.size(); ++f) {
        next[f] *= scale;
        acc[f] += next[f];
        term_norm += std::norm(next[f]);
      }
      std::swap(term, next);
      if (std::sqrt(term_norm) < 1e-18 * base) break;
    }
  }
  return acc;
}

void require_converged(const FockArray& state, int mode_i, int mode_j, double max_edge_mass, const char* what) {
  const double edge = std::max(state.edge_mass(mode_i), state.edge_mass(mode_j));
  if (edge > max_edge_mass) {
    throw TruncationError(fmt::format("{}: {:.3g} of the state reaches the cutoff {}", what, edge, state.cutoff()));
  }
}

// Contract one mode of a dense tensor with a rows x dims[mode] matrix.
std::vector<Complex> apply_mode_matrix(const std::vector<Complex>& in, std::vector<int>& dims, int mode,
                                       const std::vector<Complex>& mat, int rows) {
  using RowMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Index outer = 1;
  for (int k = 0; k < mode; ++k) outer *= dims[k];
  Eigen::Index inner = 1;
  for (std::size_t k = mode + 1; k < dims.size(); ++k) inner *= dims[k];
  const int cols = dims[mode];
  const Eigen::Map<const RowMat> m(mat.data(), rows, cols);
  std::vector<Complex> out(outer * rows * inner);
  if (inner == 1) {
    Eigen::Map<RowMat>(out.data(), outer, rows).noalias() = Eigen::Map<const RowMat>(in.data(), outer, cols) * m.transpose();
  } else {
    for (Eigen::Index o = 0; o < outer; ++o) {
      Eigen::Map<RowMat>(&out[o * rows * inner], rows, inner).noalias() =
          m * Eigen::Map<const RowMat>(&in[o * cols * inner], cols, inner);
    }
  }
  dims[mode] = rows;
  return out;
}

}  // namespace

FockArray::FockArray(int num_modes, int cutoff) : num_modes_(num_modes), cutoff_(cutoff) {
  check_cutoff(cutoff);
  if (num_modes < 1 || num_modes > kMaxModes) throw std::invalid_argument("Fock arrays hold 1..4 modes");
  strides_.assign(num_modes, 1);
  for (int k = num_modes - 2; k >= 0; --k) strides_[k] = strides_[k + 1] * cutoff;
  amp_.assign(strides_[0] * cutoff, Complex{});
}

FockArray FockArray::vacuum(int num_modes, int cutoff) {
  FockArray out(num_modes, cutoff);
  out[0] = 1;
  return out;
}

Complex FockArray::at(std::span<const int> occupation) const {
  return const_cast<FockArray*>(this)->at(occupation);
}

Complex& FockArray::at(std::span<const int> occupation) {
  if (static_cast<int>(occupation.size()) != num_modes_) throw std::invalid_argument("occupation size mismatch");
  std::size_t flat = 0;
  for (int k = 0; k < num_modes_; ++k) {
    if (occupation[k] < 0 || occupation[k] >= cutoff_) throw std::out_of_range("occupation beyond cutoff");
    flat += occupation[k] * strides_[k];
  }
  return amp_[flat];
}

Complex FockArray::at(std::initializer_list<int> occupation) const {
  return at(std::span<const int>(occupation.begin(), occupation.size()));
}

double FockArray::norm_squared() const {
  double sum = 0;
  for (const auto& a : amp_) sum += std::norm(a);
  return sum;
}

void FockArray::normalize() {
  const double n = std::sqrt(norm_squared());
  if (!(n > 0)) throw std::domain_error("cannot normalise a zero Fock array");
  for (auto& a : amp_) a /= n;
}

double FockArray::edge_mass(int mode) const {
  double sum = 0;
  for (std::size_t f = 0; f < amp_.size(); ++f) {
    if (occupation(f, mode) == cutoff_ - 1) sum += std::norm(amp_[f]);
  }
  return sum / norm_squared();
}

double FockArray::max_edge_mass() const {
  double worst = 0;
  for (int k = 0; k < num_modes_; ++k) worst = std::max(worst, edge_mass(k));
  return worst;
}

FockArray squeezed_vacuum_fock(double r, int cutoff, double max_edge_mass) {
  check_cutoff(cutoff);
  FockArray out(1, cutoff);
  const double tr = std::tanh(r);
  double c = 1 / std::sqrt(std::cosh(r));
  double kept = 0;
  double top = 0;
  for (int n = 0; 2 * n < cutoff; ++n) {
    out[2 * n] = c;
    kept += c * c;
    if (2 * n == cutoff - 1) top += c * c;
    c *= -tr * std::sqrt(double(2 * n + 1) * (2 * n + 2)) / (2.0 * (n + 1));
  }
  const double lost = std::max(0.0, 1 - kept);
  if (lost + top > max_edge_mass) {
    throw TruncationError(fmt::format("squeezed vacuum r={} needs more than {} levels", r, cutoff));
  }
  out.normalize();
  return out;
}

FockArray tensor_product(const FockArray& a, const FockArray& b) {
  if (a.cutoff() != b.cutoff()) throw std::invalid_argument("tensor_product needs equal cutoffs");
  FockArray out(a.num_modes() + b.num_modes(), a.cutoff());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
  }
  return out;
}

FockArray append_vacuum(const FockArray& state) { return tensor_product(state, FockArray::vacuum(1, state.cutoff())); }

FockArray beam_splitter_fock(const FockArray& state, double t, int mode_i, int mode_j, double max_edge_mass) {
  check_pair(state, mode_i, mode_j);
  if (!(t > 0 && t <= 1)) throw std::invalid_argument("beam splitter amplitude t must lie in (0, 1]");
  FockArray out = exponentiate(state, std::acos(t), Generator::BeamSplitter, mode_i, mode_j);
  require_converged(out, mode_i, mode_j, max_edge_mass, "beam_splitter_fock");
  return out;
}

FockArray two_mode_squeezer_fock(const FockArray& state, double s, int mode_i, int mode_j, double max_edge_mass) {
  check_pair(state, mode_i, mode_j);
  FockArray out = exponentiate(state, s, Generator::TwoModeSqueezer, mode_i, mode_j);
  require_converged(out, mode_i, mode_j, max_edge_mass, "two_mode_squeezer_fock");
  return out;
}

FockBranchMixture FockBranchMixture::pure(FockArray state) {
  FockBranchMixture out;
  const double w = state.norm_squared();
  state.normalize();
  out.branches.push_back(FockBranch{w, std::move(state)});
  return out;
}

double FockBranchMixture::probability() const {
  double sum = 0;
  for (const auto& b : branches) sum += b.weight;
  return sum;
}

FockBranchMixture condition_click_fock(const FockArray& state, int ancilla_mode) {
  const int n = state.num_modes();
  if (ancilla_mode < 0 || ancilla_mode >= n || n < 2) throw std::invalid_argument("invalid ancilla mode");
  const int c = state.cutoff();
  std::vector<FockArray> slices(c, FockArray(n - 1, c));
  for (std::size_t f = 0; f < state.size(); ++f) {
    const Complex amp = state[f];
    if (amp == Complex{}) continue;
    std::size_t reduced = 0;
    for (int k = 0; k < n; ++k) {
      if (k == ancilla_mode) continue;
      reduced = reduced * c + state.occupation(f, k);
    }
    slices[state.occupation(f, ancilla_mode)][reduced] = amp;
  }
  FockBranchMixture out;
  for (int photons = 1; photons < c; ++photons) {
    const double w = slices[photons].norm_squared();
    if (w > 0) {
      slices[photons].normalize();
      out.branches.push_back(FockBranch{w, std::move(slices[photons])});
    }
  }
  if (out.branches.empty()) throw ZeroProbabilityError("condition_click_fock: the ancilla is never detected");
  return out;
}

FockBranchMixture apply_photon_ops_fock(const FockBranchMixture& state, const Scheme& ops, double max_edge_mass,
                                        double prune) {
  std::set<int> seen;
  for (const auto& op : ops) {
    op.validate(state.num_modes());
    if (!seen.insert(op.mode).second) throw std::invalid_argument("mode operated on more than once");
  }
  FockBranchMixture current = state;
  for (const auto& op : ops) {
    FockBranchMixture next;
    for (const auto& branch : current.branches) {
      FockArray dilated = append_vacuum(branch.state);
      const int ancilla = dilated.num_modes() - 1;
      // Light branches may sit near the cutoff on their own; convergence is
      // judged on the weighted mixture below.
      dilated = op.kind == PhotonOp::Subtract
                    ? beam_splitter_fock(dilated, std::sqrt(static_cast<double>(op.coupling)), op.mode, ancilla, 1.0)
                    : two_mode_squeezer_fock(dilated, static_cast<double>(op.coupling), op.mode, ancilla, 1.0);
      FockBranchMixture clicked;
      try {
        clicked = condition_click_fock(dilated, ancilla);
      } catch (const ZeroProbabilityError&) {
        continue;
      }
      for (auto& b : clicked.branches) next.branches.push_back(FockBranch{branch.weight * b.weight, std::move(b.state)});
    }
    if (next.branches.empty()) throw ZeroProbabilityError("apply_photon_ops_fock: zero success probability");
    const double total = next.probability();
    std::erase_if(next.branches, [&](const FockBranch& b) { return b.weight < prune * total; });
    current = std::move(next);
    for (int mode = 0; mode < current.num_modes(); ++mode) {
      double edge = 0;
      for (const auto& b : current.branches) edge += b.weight * b.state.edge_mass(mode);
      edge /= current.probability();
      if (edge > max_edge_mass) {
        throw TruncationError(fmt::format("{} on mode {}: {:.3g} of the mixture reaches the cutoff {}",
                                          scheme_label({op}), mode, edge, current.cutoff()));
      }
    }
  }
  return current;
}

FockArray ghz_fock(const GHZParams& params, int cutoff, double max_edge_mass) {
  params.validate();
  if (params.num_modes != 3) throw std::invalid_argument("ghz_fock builds three-mode states only");
  const double r1 = static_cast<double>(params.r1);
  const double r2 = static_cast<double>(params.r2);
  FockArray state = tensor_product(
      tensor_product(squeezed_vacuum_fock(-r1, cutoff, max_edge_mass), squeezed_vacuum_fock(r2, cutoff, max_edge_mass)),
      squeezed_vacuum_fock(r2, cutoff, max_edge_mass));
  state = beam_splitter_fock(state, 1 / std::sqrt(3.0), 0, 1, max_edge_mass);
  state = beam_splitter_fock(state, 1 / std::sqrt(2.0), 1, 2, max_edge_mass);
  return state;
}

FockArray ghz_fock(double r, int cutoff, double max_edge_mass) {
  return ghz_fock(GHZParams::biased(r), cutoff, max_edge_mass);
}

namespace {

FockArray lower(const FockArray& psi, int mode) {
  FockArray out(psi.num_modes(), psi.cutoff());
  const std::size_t s = psi.stride(mode);
  for (std::size_t f = 0; f < psi.size(); ++f) {
    const int n = psi.occupation(f, mode);
    if (n >= 1) out[f - s] = std::sqrt(double(n)) * psi[f];
  }
  return out;
}

Complex inner(const FockArray& a, const FockArray& b) {
  Complex sum{};
  for (std::size_t f = 0; f < a.size(); ++f) sum += std::conj(a[f]) * b[f];
  return sum;
}

}  // namespace

Matrix covariance_from_fock(const FockBranchMixture& state) {
  const double total = state.probability();
  if (!(total > 0)) throw ZeroProbabilityError("covariance_from_fock: empty mixture");
  const int n = state.num_modes();
  // <a_k>, <a_k a_l>, <a_k^dag a_l>
  std::vector<Complex> mean(n);
  std::vector<Complex> aa(n * n);
  std::vector<Complex> ada(n * n);
  for (const auto& branch : state.branches) {
    const double w = branch.weight / total;
    std::vector<FockArray> lowered;
    lowered.reserve(n);
    for (int k = 0; k < n; ++k) lowered.push_back(lower(branch.state, k));
    for (int k = 0; k < n; ++k) {
      mean[k] += w * inner(branch.state, lowered[k]);
      for (int l = 0; l < n; ++l) {
        ada[k * n + l] += w * inner(lowered[k], lowered[l]);
        aa[k * n + l] += w * inner(branch.state, lower(lowered[l], k));
      }
    }
  }
  Matrix v(2 * n, 2 * n);
  const double s2 = std::sqrt(2.0);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      const Complex a2 = aa[k * n + l];
      const Complex n2 = ada[k * n + l];
      const double delta = k == l ? 0.5 : 0.0;
      const double xk = s2 * mean[k].real(), pk = s2 * mean[k].imag();
      const double xl = s2 * mean[l].real(), pl = s2 * mean[l].imag();
      v(2 * k, 2 * l) = a2.real() + n2.real() + delta - xk * xl;
      v(2 * k + 1, 2 * l + 1) = -a2.real() + n2.real() + delta - pk * pl;
      v(2 * k, 2 * l + 1) = a2.imag() + n2.imag() - xk * pl;
      v(2 * l + 1, 2 * k) = v(2 * k, 2 * l + 1);
    }
  }
  return (v + v.transpose()) / 2;
}

std::vector<Complex> displacement_matrix(Complex beta, int rows, int cols) {
  std::vector<Complex> mat(static_cast<std::size_t>(rows) * cols);
  // Column 0 is the coherent state |beta>; D|n+1> = (a^dag - beta*) D|n> / sqrt(n+1).
  std::vector<Complex> col(rows);
  Complex c = std::exp(-std::norm(beta) / 2);
  for (int m = 0; m < rows; ++m) {
    col[m] = c;
    c *= beta / std::sqrt(double(m + 1));
  }
  for (int n = 0; n < cols; ++n) {
    for (int m = 0; m < rows; ++m) mat[static_cast<std::size_t>(m) * cols + n] = col[m];
    std::vector<Complex> next(rows);
    for (int m = 0; m < rows; ++m) {
      const Complex raised = m > 0 ? std::sqrt(double(m)) * col[m - 1] : Complex{};
      next[m] = (raised - std::conj(beta) * col[m]) / std::sqrt(double(n + 1));
    }
    col = std::move(next);
  }
  return mat;
}

double wigner_point_from_fock(const FockBranchMixture& state, std::span<const double> point) {
  const int n = state.num_modes();
  const int c = state.cutoff();
  if (static_cast<int>(point.size()) != 2 * n) throw std::invalid_argument("point dimension does not match state");
  const double total = state.probability();
  if (!(total > 0)) throw ZeroProbabilityError("wigner_point_from_fock: empty mixture");
  const int max_rows = c + 30;
  std::vector<std::vector<Complex>> mats;
  std::vector<int> rows;
  for (int k = 0; k < n; ++k) {
    const Complex alpha(point[2 * k] / std::sqrt(2.0), point[2 * k + 1] / std::sqrt(2.0));
    if (std::norm(alpha) > c / 4.0) {
      throw std::domain_error(fmt::format("|alpha|^2 = {:.3g} exceeds the reliable window {} / 4", std::norm(alpha), c));
    }
    // Rows whose entries are all below 1e-15 contribute nothing at double
    // precision; dropping them keeps the contraction small.
    std::vector<Complex> mat = displacement_matrix(-alpha, max_rows, c);
    int used = max_rows;
    while (used > c && std::all_of(mat.begin() + (used - 1) * c, mat.begin() + used * c,
                                   [](Complex z) { return std::abs(z) < 1e-15; })) {
      --used;
    }
    mat.resize(static_cast<std::size_t>(used) * c);
    mats.push_back(std::move(mat));
    rows.push_back(used);
  }
  double sum = 0;
  for (const auto& branch : state.branches) {
    std::vector<int> dims(n, c);
    std::vector<Complex> phi(branch.state.data().begin(), branch.state.data().end());
    for (int k = 0; k < n; ++k) phi = apply_mode_matrix(phi, dims, k, mats[k], rows[k]);
    double parity_sum = 0;
    for (std::size_t f = 0; f < phi.size(); ++f) {
      std::size_t rest = f;
      int photons = 0;
      for (int k = n - 1; k >= 0; --k) {
        photons += static_cast<int>(rest % rows[k]);
        rest /= rows[k];
      }
      parity_sum += (photons % 2 == 0 ? 1.0 : -1.0) * std::norm(phi[f]);
    }
    sum += branch.weight * parity_sum;
  }
  return sum / total / std::pow(std::numbers::pi, n);
}

}  // namespace cvghz::fock
