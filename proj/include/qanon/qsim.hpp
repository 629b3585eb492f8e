// Exact pure-state simulation of small qubit registers.
//
// Qubit q of an n-qubit register is agent P_q's qubit. Basis strings are
// written qubit-0-first, so qubit q is bit (n - 1 - q) of an amplitude index
// and "100" is index 4.
//
// Measured qubits stay in the register: their contradicted branch is zeroed
// and the outcome is recorded, which keeps agent indices stable for
// transcripts and reduced-state queries.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qanon/distribution.hpp"
#include "qanon/errors.hpp"
#include "qanon/random.hpp"

namespace qanon {

using Complex = std::complex<double>;
using Qubit = int;

inline constexpr int kMaxQubits = 12;
inline constexpr double kTolerance = 1e-12;

enum class GateKind { X, Z, H, CNOT };

struct Gate {
  GateKind kind;
  Qubit target;
  std::optional<Qubit> control;  // CNOT only

  static Gate x(Qubit q) { return {GateKind::X, q, std::nullopt}; }
  static Gate z(Qubit q) { return {GateKind::Z, q, std::nullopt}; }
  static Gate h(Qubit q) { return {GateKind::H, q, std::nullopt}; }
  static Gate cnot(Qubit control, Qubit target) { return {GateKind::CNOT, target, control}; }
};

class StateVector {
 public:
  /// |0...0> on `num_qubits` qubits.
  explicit StateVector(int num_qubits) : n_(checked_size(num_qubits)), amps_(std::size_t{1} << n_), outcomes_(n_) {
    amps_[0] = 1.0;
  }

  /// Takes ownership of a raw amplitude vector. The norm must already be 1
  /// within 1e-9; it is then rescaled to 1 exactly (up to rounding).
  static StateVector from_amplitudes(std::vector<Complex> amps) {
    const std::size_t dim = amps.size();
    if (dim < 2 || (dim & (dim - 1)) != 0)
      throw std::invalid_argument("amplitude vector length must be a power of two >= 2");
    int n = 0;
    while ((std::size_t{1} << n) < dim) ++n;
    StateVector s(n);
    double norm = 0.0;
    for (const auto& a : amps) norm += std::norm(a);
    if (std::abs(norm - 1.0) > 1e-9) throw std::invalid_argument("amplitudes are not normalized");
    const double scale = 1.0 / std::sqrt(norm);
    for (auto& a : amps) a *= scale;
    s.amps_ = std::move(amps);
    return s;
  }

  /// Computational basis state from a qubit-0-first bitstring such as "100".
  static StateVector basis(std::string_view bits) {
    StateVector s(static_cast<int>(bits.size()));
    s.amps_[0] = 0.0;
    s.amps_[s.index_of(bits)] = 1.0;
    return s;
  }

  /// alpha|0> + beta|1>.
  static StateVector single_qubit(Complex alpha, Complex beta) { return from_amplitudes({alpha, beta}); }

  int num_qubits() const noexcept { return n_; }
  std::size_t dim() const noexcept { return amps_.size(); }
  std::span<const Complex> amplitudes() const noexcept { return amps_; }
  Complex operator[](std::size_t index) const { return amps_.at(index); }
  Complex amplitude(std::string_view bits) const { return amps_[index_of(bits)]; }

  int bit(std::size_t index, Qubit q) const noexcept { return static_cast<int>((index >> (n_ - 1 - q)) & 1U); }

  bool is_collapsed(Qubit q) const { return outcomes_.at(check_qubit(q)).has_value(); }
  std::optional<int> recorded_outcome(Qubit q) const { return outcomes_.at(check_qubit(q)); }
  bool any_collapsed() const {
    return std::any_of(outcomes_.begin(), outcomes_.end(), [](const auto& o) { return o.has_value(); });
  }

  /// Qubits not yet measured, ascending.
  std::vector<Qubit> live_qubits() const {
    std::vector<Qubit> out;
    for (Qubit q = 0; q < n_; ++q)
      if (!outcomes_[q]) out.push_back(q);
    return out;
  }

  double norm_squared() const {
    double sum = 0.0;
    for (const auto& a : amps_) sum += std::norm(a);
    return sum;
  }

  /// Born probability of reading 1 on `q`.
  double probability_one(Qubit q) const {
    check_qubit(q);
    double p = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i)
      if (bit(i, q)) p += std::norm(amps_[i]);
    return std::clamp(p, 0.0, 1.0);
  }

  void apply(const Gate& g) {
    check_qubit(g.target);
    if (g.control) {
      check_qubit(*g.control);
      if (*g.control == g.target) throw std::invalid_argument("gate control equals target");
    }
    if ((g.kind == GateKind::CNOT) != g.control.has_value())
      throw std::invalid_argument("only CNOT takes a control qubit");
    if (outcomes_[g.target] || (g.control && outcomes_[*g.control]))
      throw ProtocolViolation("gate applied to a measured qubit " + std::to_string(g.target));

    const std::size_t tmask = std::size_t{1} << (n_ - 1 - g.target);
    switch (g.kind) {
      case GateKind::X:
        for (std::size_t i = 0; i < amps_.size(); ++i)
          if (!(i & tmask)) std::swap(amps_[i], amps_[i | tmask]);
        break;
      case GateKind::Z:
        for (std::size_t i = 0; i < amps_.size(); ++i)
          if (i & tmask) amps_[i] = -amps_[i];
        break;
      case GateKind::H: {
        const double r = 1.0 / std::sqrt(2.0);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
          if (i & tmask) continue;
          const Complex a0 = amps_[i], a1 = amps_[i | tmask];
          amps_[i] = r * (a0 + a1);
          amps_[i | tmask] = r * (a0 - a1);
        }
        break;
      }
      case GateKind::CNOT: {
        const std::size_t cmask = std::size_t{1} << (n_ - 1 - *g.control);
        for (std::size_t i = 0; i < amps_.size(); ++i)
          if ((i & cmask) && !(i & tmask)) std::swap(amps_[i], amps_[i | tmask]);
        break;
      }
    }
  }

  /// Post-selects `outcome` on `q` and records it. Throws std::domain_error
  /// if that outcome has probability zero.
  void project(Qubit q, int outcome) {
    check_qubit(q);
    if (outcomes_[q]) throw ProtocolViolation("qubit " + std::to_string(q) + " already measured");
    double kept = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      if (bit(i, q) == outcome) kept += std::norm(amps_[i]);
      else amps_[i] = 0.0;
    }
    if (kept <= 0.0) throw std::domain_error("projection onto a zero-probability outcome");
    const double scale = 1.0 / std::sqrt(kept);
    for (auto& a : amps_) a *= scale;
    outcomes_[q] = outcome;
  }

  std::size_t index_of(std::string_view bits) const {
    if (static_cast<int>(bits.size()) != n_) throw std::invalid_argument("bitstring length mismatch");
    std::size_t idx = 0;
    for (char c : bits) {
      if (c != '0' && c != '1') throw std::invalid_argument("bitstring must contain only 0/1");
      idx = (idx << 1) | static_cast<std::size_t>(c == '1');
    }
    return idx;
  }

  std::string bits_of(std::size_t index) const {
    std::string out(n_, '0');
    for (Qubit q = 0; q < n_; ++q) out[q] = bit(index, q) ? '1' : '0';
    return out;
  }

 private:
  static int checked_size(int n) {
    if (n < 1 || n > kMaxQubits)
      throw std::invalid_argument("register size must be in [1, " + std::to_string(kMaxQubits) + "]");
    return n;
  }

  Qubit check_qubit(Qubit q) const {
    if (q < 0 || q >= n_) throw std::invalid_argument("qubit index " + std::to_string(q) + " out of range");
    return q;
  }

  friend StateVector tensor(const StateVector&, const StateVector&);
  friend StateVector live_subregister(const StateVector&);

  int n_;
  std::vector<Complex> amps_;
  std::vector<std::optional<int>> outcomes_;
};

/// Reduced state of a qubit subset. Always satisfies: Hermitian and unit
/// trace within 1e-12, minimum eigenvalue >= -1e-10.
class DensityMatrix {
 public:
  explicit DensityMatrix(Eigen::MatrixXcd entries) : m_(std::move(entries)) {
    const auto dim = m_.rows();
    if (dim != m_.cols() || dim < 1 || (dim & (dim - 1)) != 0)
      throw std::invalid_argument("density matrix must be square with power-of-two dimension");
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > kTolerance)
      throw std::invalid_argument("density matrix is not Hermitian");
    if (std::abs(m_.trace() - Complex(1.0)) > kTolerance)
      throw std::invalid_argument("density matrix trace is not 1");
    if (min_eigenvalue() < -1e-10) throw std::invalid_argument("density matrix is not positive semidefinite");
  }

  static DensityMatrix diagonal(const std::vector<double>& diag) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(diag.size()),
                                                static_cast<Eigen::Index>(diag.size()));
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return DensityMatrix(std::move(m));
  }

  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  Complex operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const Eigen::MatrixXcd& entries() const noexcept { return m_; }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

 private:
  Eigen::MatrixXcd m_;
};

/// |W_n> = (|10..0> + |01..0> + ... + |0..01>) / sqrt(n).
inline StateVector make_w_state(int n) {
  if (n < 1 || n > kMaxQubits) throw std::invalid_argument("W state size must be in [1, 12]");
  std::vector<Complex> amps(std::size_t{1} << n, 0.0);
  const double a = 1.0 / std::sqrt(static_cast<double>(n));
  for (int q = 0; q < n; ++q) amps[std::size_t{1} << (n - 1 - q)] = a;
  return StateVector::from_amplitudes(std::move(amps));
}

inline StateVector apply_gate(StateVector state, const Gate& gate) {
  state.apply(gate);
  return state;
}

struct MaskedState {
  StateVector state;
  std::vector<Qubit> mask;  // audit only; never shown to agents
};

/// Applies X on a uniformly random even-cardinality subset of the qubits:
/// n-1 fair bits pick qubits 0..n-2 and the last qubit restores even size.
inline MaskedState apply_even_x_mask(StateVector state, OutcomeSource& source) {
  if (state.any_collapsed()) throw ProtocolViolation("even X mask requires an unmeasured register");
  std::vector<Qubit> mask;
  int parity = 0;
  const int n = state.num_qubits();
  for (Qubit q = 0; q + 1 < n; ++q) {
    if (source.fair_bit()) {
      mask.push_back(q);
      parity ^= 1;
    }
  }
  if (parity) mask.push_back(n - 1);
  for (Qubit q : mask) state.apply(Gate::x(q));
  return {std::move(state), std::move(mask)};
}

struct Measurement {
  int outcome;
  StateVector state;
};

inline Measurement measure_qubit(StateVector state, Qubit q, OutcomeSource& source) {
  if (state.is_collapsed(q)) throw ProtocolViolation("qubit " + std::to_string(q) + " already measured");
  const int outcome = source.draw(state.probability_one(q));
  state.project(q, outcome);
  return {outcome, std::move(state)};
}

inline StateVector project_qubit(StateVector state, Qubit q, int outcome) {
  state.project(q, outcome);
  return state;
}

/// Exact Born-rule joint distribution of the listed qubits, keyed by
/// bitstrings in the listed order. Zero-probability outcomes are omitted.
inline Distribution outcome_distribution(const StateVector& state, std::span<const Qubit> qubits) {
  for (Qubit q : qubits)
    if (state.is_collapsed(q)) throw std::invalid_argument("outcome_distribution over a measured qubit");
  Distribution::Map probs;
  std::string key(qubits.size(), '0');
  const auto amps = state.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const double p = std::norm(amps[i]);
    if (p == 0.0) continue;
    for (std::size_t k = 0; k < qubits.size(); ++k) key[k] = state.bit(i, qubits[k]) ? '1' : '0';
    probs[key] += p;
  }
  return Distribution(std::move(probs));
}

inline Distribution outcome_distribution(const StateVector& state, std::initializer_list<Qubit> qubits) {
  return outcome_distribution(state, std::span<const Qubit>(qubits.begin(), qubits.size()));
}

/// Partial trace over every qubit not in `keep`; keep[0] is the most
/// significant index bit of the result.
inline DensityMatrix reduced_density_matrix(const StateVector& state, std::span<const Qubit> keep) {
  if (keep.empty()) throw std::invalid_argument("reduced_density_matrix needs at least one qubit");
  const int n = state.num_qubits();
  std::vector<bool> kept(n, false);
  for (Qubit q : keep) {
    if (q < 0 || q >= n || kept[q]) throw std::invalid_argument("invalid or repeated qubit in keep set");
    kept[q] = true;
  }
  std::vector<Qubit> rest;
  for (Qubit q = 0; q < n; ++q)
    if (!kept[q]) rest.push_back(q);

  const Eigen::Index rows = Eigen::Index{1} << keep.size();
  const Eigen::Index cols = Eigen::Index{1} << rest.size();
  Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(rows, cols);
  const auto amps = state.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    Eigen::Index r = 0, c = 0;
    for (Qubit q : keep) r = (r << 1) | state.bit(i, q);
    for (Qubit q : rest) c = (c << 1) | state.bit(i, q);
    psi(r, c) = amps[i];
  }
  return DensityMatrix(psi * psi.adjoint());
}

inline DensityMatrix reduced_density_matrix(const StateVector& state, std::initializer_list<Qubit> keep) {
  return reduced_density_matrix(state, std::span<const Qubit>(keep.begin(), keep.size()));
}

/// (1/2) * sum of singular values of (a - b). The difference is Hermitian,
/// so its singular values are the absolute eigenvalues.
inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("trace_distance: dimension mismatch");
  const Eigen::MatrixXcd diff = a.entries() - b.entries();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(diff, Eigen::EigenvaluesOnly);
  return std::clamp(0.5 * es.eigenvalues().cwiseAbs().sum(), 0.0, 1.0);
}

/// First register's qubits come first.
inline StateVector tensor(const StateVector& a, const StateVector& b) {
  StateVector out(a.n_ + b.n_);
  for (std::size_t i = 0; i < a.amps_.size(); ++i)
    for (std::size_t j = 0; j < b.amps_.size(); ++j) out.amps_[(i << b.n_) | j] = a.amps_[i] * b.amps_[j];
  std::copy(a.outcomes_.begin(), a.outcomes_.end(), out.outcomes_.begin());
  std::copy(b.outcomes_.begin(), b.outcomes_.end(), out.outcomes_.begin() + a.n_);
  return out;
}

/// The register restricted to its unmeasured qubits (ascending order). Valid
/// because a measured qubit is in a product basis state with the rest.
inline StateVector live_subregister(const StateVector& state) {
  const auto live = state.live_qubits();
  if (live.empty()) throw std::invalid_argument("every qubit of the register is measured");
  StateVector out(static_cast<int>(live.size()));
  out.amps_[0] = 0.0;
  for (std::size_t i = 0; i < state.amps_.size(); ++i) {
    bool consistent = true;
    for (Qubit q = 0; q < state.n_ && consistent; ++q)
      if (state.outcomes_[q] && state.bit(i, q) != *state.outcomes_[q]) consistent = false;
    if (!consistent) continue;
    std::size_t j = 0;
    for (Qubit q : live) j = (j << 1) | static_cast<std::size_t>(state.bit(i, q));
    out.amps_[j] = state.amps_[i];
  }
  return out;
}

/// |<target|state>|^2 over the unmeasured qubits of each register.
inline double fidelity_pure(const StateVector& state, const StateVector& target) {
  const StateVector s = state.any_collapsed() ? live_subregister(state) : state;
  const StateVector t = target.any_collapsed() ? live_subregister(target) : target;
  if (s.num_qubits() != t.num_qubits()) throw std::invalid_argument("fidelity_pure: dimension mismatch");
  Complex overlap = 0.0;
  const auto sa = s.amplitudes(), ta = t.amplitudes();
  for (std::size_t i = 0; i < sa.size(); ++i) overlap += std::conj(ta[i]) * sa[i];
  return std::clamp(std::norm(overlap), 0.0, 1.0);
}

/// <target|rho|target>; equals fidelity_pure when rho is pure.
inline double fidelity(const DensityMatrix& rho, const StateVector& target) {
  if (rho.dim() != target.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
  Eigen::VectorXcd t(static_cast<Eigen::Index>(target.dim()));
  for (std::size_t i = 0; i < target.dim(); ++i) t(i) = target[i];
  return std::clamp((t.adjoint() * rho.entries() * t)(0, 0).real(), 0.0, 1.0);
}

}  // namespace qanon
