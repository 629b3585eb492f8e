#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "oracles.hpp"
#include "qanon/qsim.hpp"

using namespace qanon;

namespace {

constexpr double kTol = 1e-12;

StateVector random_state(int n, RandomStream& rng) {
  std::vector<Complex> amps(std::size_t{1} << n);
  double norm = 0.0;
  for (auto& a : amps) {
    a = {rng.normal(), rng.normal()};
    norm += std::norm(a);
  }
  for (auto& a : amps) a /= std::sqrt(norm);
  return StateVector::from_amplitudes(amps);
}

}  // namespace

TEST(WState, ThreeQubits) {
  const auto w = make_w_state(3);
  const double a = 1.0 / std::sqrt(3.0);
  for (std::size_t i = 0; i < w.dim(); ++i) {
    const bool single = i == 4 || i == 2 || i == 1;
    EXPECT_NEAR(std::abs(w[i] - Complex(single ? a : 0.0)), 0.0, kTol) << w.bits_of(i);
  }
  EXPECT_NEAR(std::abs(w.amplitude("100") - a), 0.0, kTol);
}

TEST(WState, DegenerateSizes) {
  EXPECT_NEAR(std::abs(make_w_state(1).amplitude("1") - 1.0), 0.0, kTol);
  const auto w2 = make_w_state(2);
  EXPECT_NEAR(std::abs(w2.amplitude("10") - 1.0 / std::sqrt(2.0)), 0.0, kTol);
  EXPECT_NEAR(std::abs(w2.amplitude("01") - 1.0 / std::sqrt(2.0)), 0.0, kTol);
  EXPECT_EQ(w2.amplitude("00"), Complex(0.0));
  EXPECT_THROW(make_w_state(0), std::invalid_argument);
  EXPECT_THROW(make_w_state(13), std::invalid_argument);
}

TEST(Gates, Definitions) {
  EXPECT_EQ(apply_gate(StateVector::basis("0"), Gate::x(0)).amplitude("1"), Complex(1.0));
  EXPECT_EQ(apply_gate(StateVector::basis("1"), Gate::x(0)).amplitude("0"), Complex(1.0));

  const auto plus = apply_gate(StateVector::basis("0"), Gate::h(0));
  EXPECT_NEAR(std::abs(plus.amplitude("0") - 1.0 / std::sqrt(2.0)), 0.0, kTol);
  EXPECT_NEAR(std::abs(plus.amplitude("1") - 1.0 / std::sqrt(2.0)), 0.0, kTol);

  EXPECT_EQ(apply_gate(StateVector::basis("10"), Gate::cnot(0, 1)).amplitude("11"), Complex(1.0));
  EXPECT_EQ(apply_gate(StateVector::basis("00"), Gate::cnot(0, 1)).amplitude("00"), Complex(1.0));
  EXPECT_EQ(apply_gate(StateVector::basis("1"), Gate::z(0)).amplitude("1"), Complex(-1.0));
}

TEST(Gates, InvalidUse) {
  StateVector s(2);
  EXPECT_THROW(s.apply(Gate::cnot(1, 1)), std::invalid_argument);
  EXPECT_THROW(s.apply(Gate::x(2)), std::invalid_argument);
  EXPECT_THROW(s.apply(Gate{GateKind::X, 0, 1}), std::invalid_argument);
  s.project(0, 0);
  EXPECT_THROW(s.apply(Gate::x(0)), ProtocolViolation);
  EXPECT_THROW(s.apply(Gate::cnot(0, 1)), ProtocolViolation);
}

TEST(Gates, NormPreservationAndInvolution) {
  RandomStream rng(11);
  const Gate gates[] = {Gate::x(0), Gate::z(2), Gate::h(1), Gate::cnot(2, 0), Gate::cnot(0, 3)};
  for (int trial = 0; trial < 50; ++trial) {
    const StateVector s = random_state(4, rng);
    for (const auto& g : gates) {
      const StateVector t = apply_gate(s, g);
      EXPECT_NEAR(t.norm_squared(), 1.0, kTol);
    }
    for (Qubit q = 0; q < 4; ++q) {
      const StateVector back = apply_gate(apply_gate(s, Gate::x(q)), Gate::x(q));
      for (std::size_t i = 0; i < s.dim(); ++i) EXPECT_NEAR(std::abs(back[i] - s[i]), 0.0, kTol);
    }
  }
}

TEST(EvenMask, EmptyAndPairMasks) {
  // Draw order is qubits 0..n-2; a scripted source pins the mask.
  struct Scripted : OutcomeSource {
    std::vector<int> bits;
    std::size_t next = 0;
    int draw(double) override { return bits.at(next++); }
  };
  Scripted none;
  none.bits = {0, 0};
  auto m0 = apply_even_x_mask(StateVector::basis("001"), none);
  EXPECT_TRUE(m0.mask.empty());
  EXPECT_EQ(m0.state.amplitude("001"), Complex(1.0));

  Scripted pair;
  pair.bits = {1, 1};
  auto m1 = apply_even_x_mask(StateVector::basis("001"), pair);
  EXPECT_EQ(m1.mask, (std::vector<Qubit>{0, 1}));
  EXPECT_EQ(m1.state.amplitude("111"), Complex(1.0));

  Scripted odd;
  odd.bits = {1, 0};
  auto m2 = apply_even_x_mask(StateVector::basis("000"), odd);
  EXPECT_EQ(m2.mask, (std::vector<Qubit>{0, 2}));
}

TEST(EvenMask, InducedDistributionIsUniformOverOddParity) {
  // Oracle: every (excitation position, even mask) pair for n = 3.
  Distribution expected;
  const int n = 3;
  for (int p = 0; p < n; ++p)
    for (int mask = 0; mask < 8; ++mask) {
      if (__builtin_popcount(mask) % 2) continue;
      std::string key;
      for (int q = 0; q < n; ++q) key.push_back(((q == p) ^ ((mask >> (n - 1 - q)) & 1)) ? '1' : '0');
      expected.add(key, 1.0 / (n * 4));
    }
  ASSERT_EQ(expected.size(), 4u);
  for (const auto& [k, p] : expected) {
    EXPECT_EQ(std::count(k.begin(), k.end(), '1') % 2, 1);
    EXPECT_NEAR(p, 0.25, kTol);
  }

  // Simulator: average outcome_distribution over every scripted mask draw.
  Distribution simulated;
  for (int draws = 0; draws < 4; ++draws) {
    struct Fixed : OutcomeSource {
      int bits;
      int k = 0;
      int draw(double) override { return (bits >> k++) & 1; }
    } src;
    src.bits = draws;
    const auto masked = apply_even_x_mask(make_w_state(n), src);
    const Qubit all[] = {0, 1, 2};
    for (const auto& [k, p] : outcome_distribution(masked.state, all)) simulated.add(k, p / 4);
  }
  EXPECT_LT(tv_distance(simulated, expected), kTol);
}

TEST(EvenMask, RejectsCollapsedRegister) {
  RandomStream rng(1);
  auto s = project_qubit(make_w_state(3), 0, 0);
  EXPECT_THROW(apply_even_x_mask(s, rng), ProtocolViolation);
}

TEST(Measure, BasisStateIsDeterministic) {
  RandomStream rng(5);
  for (int i = 0; i < 20; ++i) {
    auto m = measure_qubit(StateVector::basis("100"), 0, rng);
    EXPECT_EQ(m.outcome, 1);
    EXPECT_EQ(m.state.recorded_outcome(0), 1);
  }
}

TEST(Measure, WStateProbabilityAndCollapse) {
  const auto w = make_w_state(3);
  EXPECT_NEAR(w.probability_one(0), 1.0 / 3.0, kTol);

  const auto post = project_qubit(w, 0, 0);
  const auto residual = live_subregister(post);
  ASSERT_EQ(residual.num_qubits(), 2);
  EXPECT_NEAR(std::abs(residual.amplitude("10") - 1.0 / std::sqrt(2.0)), 0.0, kTol);
  EXPECT_NEAR(std::abs(residual.amplitude("01") - 1.0 / std::sqrt(2.0)), 0.0, kTol);
  EXPECT_NEAR(std::abs(residual.amplitude("00")), 0.0, kTol);
  // Contradicted branch is zeroed in the full register.
  for (std::size_t i = 0; i < post.dim(); ++i)
    if (post.bit(i, 0) == 1) EXPECT_EQ(post[i], Complex(0.0));
}

TEST(Measure, RemeasurementIsAViolation) {
  RandomStream rng(2);
  auto m = measure_qubit(make_w_state(3), 1, rng);
  EXPECT_THROW(measure_qubit(m.state, 1, rng), ProtocolViolation);
}

TEST(Measure, SamplingMatchesEnumeration) {
  RandomStream gen(99);
  const StateVector s = random_state(3, gen);
  const Qubit subset[] = {2, 0};
  const Distribution exact = outcome_distribution(s, subset);

  const int trials = 100000;
  std::map<std::string, int> counts;
  RandomStream rng(1234);
  for (int t = 0; t < trials; ++t) {
    auto a = measure_qubit(s, 2, rng);
    auto b = measure_qubit(a.state, 0, rng);
    counts[std::string{char('0' + a.outcome), char('0' + b.outcome)}]++;
  }
  for (const auto& [k, p] : exact) {
    const double sd = std::sqrt(trials * p * (1 - p));
    EXPECT_LE(std::abs(counts[k] - trials * p), 4 * sd) << k;
  }
  for (const auto& [k, c] : counts) EXPECT_GT(exact.probability(k), 0.0) << k;
}

TEST(OutcomeDistribution, Examples) {
  const Distribution w = outcome_distribution(make_w_state(3), {0, 1, 2});
  EXPECT_EQ(w.size(), 3u);
  for (const char* k : {"100", "010", "001"}) EXPECT_NEAR(w.probability(k), 1.0 / 3.0, kTol);

  const Distribution zero = outcome_distribution(StateVector(4), {3, 1});
  EXPECT_EQ(zero.size(), 1u);
  EXPECT_DOUBLE_EQ(zero.probability("00"), 1.0);

  RandomStream rng(3);
  for (int t = 0; t < 20; ++t) EXPECT_NEAR(outcome_distribution(random_state(5, rng), {4, 0, 2}).total(), 1.0, kTol);

  EXPECT_THROW(outcome_distribution(project_qubit(make_w_state(3), 0, 0), {0}), std::invalid_argument);
}

TEST(ReducedDensityMatrix, Examples) {
  const auto prod = reduced_density_matrix(StateVector::basis("01"), {1});
  EXPECT_NEAR(trace_distance(prod, DensityMatrix::diagonal({0, 1})), 0.0, kTol);

  const auto bell = StateVector::from_amplitudes({0, 1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 0});
  const auto half = reduced_density_matrix(bell, {0});
  EXPECT_NEAR(std::abs(half(0, 0) - 0.5), 0.0, kTol);
  EXPECT_NEAR(std::abs(half(1, 1) - 0.5), 0.0, kTol);
  EXPECT_NEAR(std::abs(half(0, 1)), 0.0, kTol);
}

TEST(ReducedDensityMatrix, MaliciousQubitAfterBellBasisChange) {
  // Message (alpha, beta) on qubit 0, W_3 on (sender, receiver, malicious).
  for (auto [a, b] : {std::pair<Complex, Complex>{1, 0}, {0, 1}, {0.6, Complex(0, 0.8)}}) {
    StateVector s = tensor(StateVector::single_qubit(a, b), make_w_state(3));
    s.apply(Gate::cnot(0, 1));
    s.apply(Gate::h(0));
    const auto rho = reduced_density_matrix(s, {3});
    EXPECT_LT(trace_distance(rho, DensityMatrix::diagonal({2.0 / 3.0, 1.0 / 3.0})), kTol);
  }
}

TEST(ReducedDensityMatrix, FullSetIsOuterProduct) {
  RandomStream rng(8);
  const StateVector s = random_state(3, rng);
  const auto rho = reduced_density_matrix(s, {0, 1, 2});
  for (std::size_t i = 0; i < s.dim(); ++i)
    for (std::size_t j = 0; j < s.dim(); ++j) EXPECT_NEAR(std::abs(rho(i, j) - s[i] * std::conj(s[j])), 0.0, kTol);
}

TEST(ReducedDensityMatrix, InvariantsOnRandomStates) {
  RandomStream rng(21);
  for (int t = 0; t < 30; ++t) {
    const StateVector s = random_state(4, rng);
    const auto rho = reduced_density_matrix(s, {3, 1});
    EXPECT_GE(rho.min_eigenvalue(), -1e-10);
    EXPECT_NEAR(std::abs(rho.entries().trace() - Complex(1.0)), 0.0, kTol);
  }
  EXPECT_THROW(reduced_density_matrix(StateVector(2), std::span<const Qubit>{}), std::invalid_argument);
}

TEST(TraceDistance, Examples) {
  const auto rho = DensityMatrix::diagonal({0.25, 0.75});
  EXPECT_NEAR(trace_distance(rho, rho), 0.0, kTol);
  EXPECT_NEAR(trace_distance(DensityMatrix::diagonal({1, 0}), DensityMatrix::diagonal({0, 1})), 1.0, kTol);
  EXPECT_THROW(trace_distance(rho, DensityMatrix::diagonal({1, 0, 0, 0})), std::invalid_argument);
  EXPECT_THROW(DensityMatrix::diagonal({0.5, 0.6}), std::invalid_argument);
  EXPECT_THROW(DensityMatrix::diagonal({1.5, -0.5}), std::invalid_argument);
}

TEST(Fidelity, Examples) {
  RandomStream rng(4);
  const StateVector s = random_state(2, rng);
  EXPECT_NEAR(fidelity_pure(s, s), 1.0, kTol);
  EXPECT_NEAR(fidelity_pure(StateVector::basis("01"), StateVector::basis("10")), 0.0, kTol);
  EXPECT_THROW(fidelity_pure(StateVector(2), StateVector(3)), std::invalid_argument);

  // Collapsed qubits are dropped before comparing.
  const auto post = project_qubit(make_w_state(3), 2, 0);
  const auto epr = StateVector::from_amplitudes({0, 1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 0});
  EXPECT_NEAR(fidelity_pure(post, epr), 1.0, kTol);
}

TEST(Fidelity, TeleportationIdentityOverAllOutcomes) {
  // Message on qubit 0, EPR pair (|01>+|10>)/sqrt2 on qubits 1 (sender), 2 (receiver).
  const Complex a(0.28, -0.5), b = std::sqrt(1.0 - std::norm(a));
  const auto msg = StateVector::single_qubit(a, b);
  const auto epr = StateVector::from_amplitudes({0, 1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 0});
  StateVector s = tensor(msg, epr);
  s.apply(Gate::cnot(0, 1));
  s.apply(Gate::h(0));
  // Correction per outcome, derived by hand: 00 -> X, 01 -> I, 10 -> X then Z, 11 -> Z.
  const std::vector<std::vector<GateKind>> fix = {{GateKind::X}, {}, {GateKind::X, GateKind::Z}, {GateKind::Z}};
  for (int m = 0; m < 4; ++m) {
    StateVector t = project_qubit(project_qubit(s, 0, m >> 1), 1, m & 1);
    for (GateKind g : fix[m]) t.apply(Gate{g, 2, std::nullopt});
    EXPECT_NEAR(fidelity_pure(t, msg), 1.0, kTol) << m;
  }
}

TEST(Tensor, OrderAndLimits) {
  const auto t = tensor(StateVector::basis("1"), StateVector::basis("01"));
  EXPECT_EQ(t.amplitude("101"), Complex(1.0));
  EXPECT_THROW(tensor(StateVector(6), StateVector(7)), std::invalid_argument);
}
