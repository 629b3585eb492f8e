// Executable versions of the five protocols: collision detection,
// notification, anonymous entanglement, anonymous bit transmission and the
// full anonymous communication protocol built on teleportation.
//
// Each sub-protocol is split into rounds that consume one fresh W state.
// The round functions append to a caller-owned transcript so the exact
// enumerator in analysis.hpp can drive one round at a time through the same
// code that sampling runs use.
#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qanon/adversary.hpp"
#include "qanon/errors.hpp"
#include "qanon/network.hpp"
#include "qanon/qsim.hpp"
#include "qanon/random.hpp"

namespace qanon {

/// Result plus everything the run produced on the side.
template <class Result>
struct ProtocolRun {
  Result result;
  Transcript transcript;
  std::vector<LocalRecord> local;
};

namespace detail {

inline void check_source(const TrustedSource& source, std::size_t agents) {
  if (agents < 3) throw ConfigurationError("protocols need at least 3 agents");
  if (source.num_qubits() != static_cast<int>(agents))
    throw ConfigurationError("trusted source produces " + std::to_string(source.num_qubits()) +
                             "-qubit states for " + std::to_string(agents) + " agents");
}

inline int bit_sum(std::span<const int> bits) {
  int s = 0;
  for (int b : bits) s += b;
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Collision detection

struct CollisionResult {
  std::vector<int> sums;                  // z for each ordering
  std::vector<std::vector<int>> bits;     // announced z_i, indexed by agent, per ordering
  bool passed = false;                    // both 0 and 2 among the sums
};

/// One ordering: fresh W state, X where a_i = 1, measure and announce in
/// ordering sequence. Returns the announced bits indexed by agent.
inline std::vector<int> collision_round(std::span<const PrivateList> lists, const Ordering& ordering, int round,
                                        const TrustedSource& source, const AdversaryStrategy& adversary,
                                        OutcomeSource& rng, Transcript& transcript, std::vector<LocalRecord>& local) {
  detail::check_source(source, lists.size());
  const TamperHook hook = make_hook(adversary, rng);
  StateVector state = source.w_state();
  for (std::size_t i = 0; i < lists.size(); ++i)
    if (lists[i].a) state.apply(Gate::x(static_cast<Qubit>(i)));

  std::vector<int> announced(lists.size(), 0);
  for (AgentId agent : ordering.sequence) {
    auto m = measure_qubit(std::move(state), agent.value, rng);
    state = std::move(m.state);
    local.push_back({agent, ProtocolTag::Collision, round, m.outcome});
    announced[agent.value] =
        broadcast(transcript, ordering, ProtocolTag::Collision, round, agent, m.outcome, hook).bit;
  }
  return announced;
}

inline ProtocolRun<CollisionResult> run_collision_detection(std::span<const PrivateList> lists,
                                                            const TrustedSource& source,
                                                            const AdversaryStrategy& adversary, OutcomeSource& rng) {
  detail::check_source(source, lists.size());
  ProtocolRun<CollisionResult> run;
  run.transcript.n = static_cast<int>(lists.size());
  const auto orderings = generate_orderings(static_cast<int>(lists.size()));
  bool saw_zero = false, saw_two = false;
  for (std::size_t t = 0; t < orderings.size(); ++t) {
    auto bits = collision_round(lists, orderings[t], static_cast<int>(t), source, adversary, rng, run.transcript,
                                run.local);
    const int z = detail::bit_sum(bits);
    saw_zero |= z == 0;
    saw_two |= z == 2;
    run.result.sums.push_back(z);
    run.result.bits.push_back(std::move(bits));
  }
  run.result.passed = saw_zero && saw_two;
  return run;
}

// ---------------------------------------------------------------------------
// Notification

struct NotificationRound {
  int parity;              // ybar_i, known only to P_i
  std::vector<int> heard;  // announced Y_j indexed by agent; -1 at P_i's own slot
  std::vector<Qubit> mask;  // audit only
};

/// Round i: the source applies a random even X mask to a fresh W state, each
/// P_j applies X iff r_j[i] = 1, everyone measures, everyone but P_i
/// announces, and P_i folds its own outcome into the parity.
inline NotificationRound notification_round(std::span<const PrivateList> lists, int round,
                                            const TrustedSource& source, const AdversaryStrategy& adversary,
                                            OutcomeSource& rng, Transcript& transcript,
                                            std::vector<LocalRecord>& local) {
  detail::check_source(source, lists.size());
  const int n = static_cast<int>(lists.size());
  const TamperHook hook = make_hook(adversary, rng);
  auto masked = source.masked_w_state(rng);
  StateVector state = std::move(masked.state);
  for (int j = 0; j < n; ++j)
    if (lists[j].r[round]) state.apply(Gate::x(j));

  Ordering speakers;
  for (int j = 0; j < n; ++j)
    if (j != round) speakers.sequence.emplace_back(j);

  NotificationRound out{0, std::vector<int>(n, -1), std::move(masked.mask)};
  int own = 0;
  for (int j = 0; j < n; ++j) {
    auto m = measure_qubit(std::move(state), j, rng);
    state = std::move(m.state);
    local.push_back({AgentId(j), ProtocolTag::Notification, round, m.outcome});
    if (j == round) {
      own = m.outcome;
    } else {
      out.heard[j] = broadcast(transcript, speakers, ProtocolTag::Notification, round, AgentId(j), m.outcome, hook).bit;
      out.parity ^= out.heard[j];
    }
  }
  out.parity ^= own;
  return out;
}

struct NotificationResult {
  std::vector<int> parity;               // ybar_i per agent (private)
  std::vector<int> b;                    // a_i XOR ybar_i per agent (private)
  std::vector<std::vector<int>> heard;   // per round, announced Y_j (-1 for the notified slot)
  std::vector<std::vector<Qubit>> masks;  // audit only
};

inline ProtocolRun<NotificationResult> run_notification(std::span<const PrivateList> lists,
                                                        const TrustedSource& source,
                                                        const AdversaryStrategy& adversary, OutcomeSource& rng) {
  detail::check_source(source, lists.size());
  ProtocolRun<NotificationResult> run;
  const int n = static_cast<int>(lists.size());
  run.transcript.n = n;
  for (int i = 0; i < n; ++i) {
    auto r = notification_round(lists, i, source, adversary, rng, run.transcript, run.local);
    run.result.parity.push_back(r.parity);
    run.result.b.push_back(lists[i].a ^ r.parity);
    run.result.heard.push_back(std::move(r.heard));
    run.result.masks.push_back(std::move(r.mask));
  }
  return run;
}

// ---------------------------------------------------------------------------
// Anonymous entanglement
//
// Role convention: agents with b_i = 1 measure and announce; agents with
// b_i = 0 (the sender and receiver in an honest run) keep their qubits and
// announce 0. Taken literally, the other assignment has the pair measure
// their own qubits, which cannot leave them sharing an EPR pair.

struct EntanglementResult {
  std::vector<int> announced;  // yhat_i
  int total = 0;               // Z
  bool established = false;    // Z == 0
  StateVector residual{1};     // full register; measured qubits collapsed
  std::vector<AgentId> holders;  // agents whose qubits were left unmeasured
};

inline EntanglementResult entanglement_round(std::span<const int> b, int round, const TrustedSource& source,
                                             const AdversaryStrategy& adversary, OutcomeSource& rng,
                                             Transcript& transcript, std::vector<LocalRecord>& local) {
  detail::check_source(source, b.size());
  const int n = static_cast<int>(b.size());
  const TamperHook hook = make_hook(adversary, rng);
  const Ordering ordering = identity_ordering(n);
  StateVector state = source.w_state();

  EntanglementResult out;
  out.announced.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    const AgentId agent(i);
    int honest_bit = 0;
    bool measures = b[i] == 1;
    if (measures && decide_measurement(adversary, ProtocolTag::Entanglement, agent) == MeasurementDecision::Skip)
      measures = false;
    if (measures) {
      auto m = measure_qubit(std::move(state), i, rng);
      state = std::move(m.state);
      honest_bit = m.outcome;
      local.push_back({agent, ProtocolTag::Entanglement, round, m.outcome});
    } else {
      out.holders.push_back(agent);
      if (b[i] == 1) local.push_back({agent, ProtocolTag::Entanglement, round, std::nullopt});
    }
    const auto& entry = broadcast(transcript, ordering, ProtocolTag::Entanglement, round, agent, honest_bit, hook);
    out.announced[i] = entry.bit;
    if (b[i] == 1 && !measures) transcript.entries.back().tampered = true;  // skipped measurement
  }
  out.total = detail::bit_sum(out.announced);
  out.established = out.total == 0;
  out.residual = std::move(state);
  return out;
}

inline ProtocolRun<EntanglementResult> run_anonymous_entanglement(std::span<const int> b,
                                                                  const TrustedSource& source,
                                                                  const AdversaryStrategy& adversary,
                                                                  OutcomeSource& rng) {
  ProtocolRun<EntanglementResult> run;
  run.transcript.n = static_cast<int>(b.size());
  run.result = entanglement_round(b, 0, source, adversary, rng, run.transcript, run.local);
  return run;
}

// ---------------------------------------------------------------------------
// Anonymous bit transmission

struct BitResult {
  int m_sent = 0;
  int k = 0;          // number of announced 1s
  int m_decoded = 0;  // 0 iff k is odd
};

inline BitResult bit_transmission_round(int m, AgentId sender, int round, const TrustedSource& source,
                                        const AdversaryStrategy& adversary, OutcomeSource& rng,
                                        Transcript& transcript, std::vector<LocalRecord>& local) {
  const int n = source.num_qubits();
  if (n < 3) throw ConfigurationError("protocols need at least 3 agents");
  if (sender.value < 0 || sender.value >= n) throw std::invalid_argument("sender index out of range");
  if (m != 0 && m != 1) throw std::invalid_argument("message must be a bit");
  const TamperHook hook = make_hook(adversary, rng);
  const Ordering ordering = identity_ordering(n);
  StateVector state = source.w_state();
  if (m == 1) state.apply(Gate::x(sender.value));

  BitResult out{m, 0, 0};
  for (int i = 0; i < n; ++i) {
    auto meas = measure_qubit(std::move(state), i, rng);
    state = std::move(meas.state);
    local.push_back({AgentId(i), ProtocolTag::BitTransmission, round, meas.outcome});
    out.k += broadcast(transcript, ordering, ProtocolTag::BitTransmission, round, AgentId(i), meas.outcome, hook).bit;
  }
  out.m_decoded = (out.k % 2 == 1) ? 0 : 1;
  return out;
}

inline ProtocolRun<BitResult> run_bit_transmission(int m, AgentId sender, const TrustedSource& source,
                                                   const AdversaryStrategy& adversary, OutcomeSource& rng) {
  ProtocolRun<BitResult> run;
  run.transcript.n = source.num_qubits();
  run.result = bit_transmission_round(m, sender, 0, source, adversary, rng, run.transcript, run.local);
  return run;
}

// ---------------------------------------------------------------------------
// Teleportation over the shared pair

/// Receiver-side Pauli correction. ZX means X first, then Z.
enum class Pauli { I, X, Z, ZX };

inline const char* to_string(Pauli p) {
  switch (p) {
    case Pauli::I: return "I";
    case Pauli::X: return "X";
    case Pauli::Z: return "Z";
    case Pauli::ZX: return "ZX";
  }
  return "?";
}

/// m0 is the outcome on the message qubit (after H), m1 on the sender's half
/// of the pair. The table is for the (|01> + |10>)/sqrt(2) pair a W state
/// leaves behind.
inline Pauli correction_for(int m0, int m1) {
  static constexpr std::array<Pauli, 4> table{Pauli::X, Pauli::I, Pauli::ZX, Pauli::Z};
  return table[static_cast<std::size_t>((m0 << 1) | m1)];
}

inline void apply_correction(StateVector& state, Qubit receiver, Pauli p) {
  if (p == Pauli::X || p == Pauli::ZX) state.apply(Gate::x(receiver));
  if (p == Pauli::Z || p == Pauli::ZX) state.apply(Gate::z(receiver));
}

/// Message qubit joined to the unmeasured part of the shared register, with
/// the sender's CNOT and Hadamard already applied.
struct TeleportFrame {
  StateVector state{1};
  Qubit message_qubit = 0;
  Qubit sender_qubit = 0;
  Qubit receiver_qubit = 0;
  std::vector<Qubit> other_qubits;   // unmeasured qubits of other agents
  std::vector<AgentId> other_agents;  // their owners
};

inline TeleportFrame prepare_teleport(const StateVector& message, const StateVector& residual, AgentId sender,
                                      AgentId receiver) {
  if (message.num_qubits() != 1 || message.any_collapsed())
    throw std::invalid_argument("the teleported message must be a single unmeasured qubit");
  if (sender == receiver) throw std::invalid_argument("sender and receiver must differ");
  if (residual.is_collapsed(sender.value) || residual.is_collapsed(receiver.value))
    throw ProtocolViolation("the sender or receiver no longer holds an unmeasured qubit");

  TeleportFrame f;
  const auto live = residual.live_qubits();
  f.state = tensor(message, live_subregister(residual));
  for (std::size_t k = 0; k < live.size(); ++k) {
    const Qubit q = static_cast<Qubit>(k + 1);
    if (live[k] == sender.value) f.sender_qubit = q;
    else if (live[k] == receiver.value) f.receiver_qubit = q;
    else {
      f.other_qubits.push_back(q);
      f.other_agents.emplace_back(live[k]);
    }
  }
  f.state.apply(Gate::cnot(f.message_qubit, f.sender_qubit));
  f.state.apply(Gate::h(f.message_qubit));
  return f;
}

struct TeleportRecord {
  StateVector message{1};
  int m0 = 0;
  int m1 = 0;
  Pauli correction = Pauli::I;
  double fidelity = 0.0;
};

/// Receiver's fidelity with the message after measuring (m0, m1) and
/// correcting with `applied` (which differs from the table when the
/// announced bits were tampered with).
inline double received_fidelity(TeleportFrame& f, const StateVector& message, Pauli applied) {
  apply_correction(f.state, f.receiver_qubit, applied);
  return fidelity(reduced_density_matrix(f.state, {f.receiver_qubit}), message);
}

/// Bell measurement, announcement-free correction and fidelity check. With
/// `attack_mode` the pair may be a larger W state left by skipped
/// measurements; otherwise the pair must be established.
inline TeleportRecord teleport(const StateVector& message, const EntanglementResult& pair, AgentId sender,
                               AgentId receiver, OutcomeSource& rng, bool attack_mode = false) {
  if (!pair.established && !attack_mode) throw ProtocolViolation("teleportation over a pair that was not established");
  TeleportFrame f = prepare_teleport(message, pair.residual, sender, receiver);
  TeleportRecord rec;
  rec.message = message;
  auto a = measure_qubit(std::move(f.state), f.message_qubit, rng);
  auto b = measure_qubit(std::move(a.state), f.sender_qubit, rng);
  f.state = std::move(b.state);
  rec.m0 = a.outcome;
  rec.m1 = b.outcome;
  rec.correction = correction_for(rec.m0, rec.m1);
  rec.fidelity = received_fidelity(f, message, rec.correction);
  return rec;
}

// ---------------------------------------------------------------------------
// Full anonymous communication

struct Scenario {
  int n = 3;
  std::vector<std::pair<AgentId, AgentId>> intents;  // (sender, receiver); exactly one for a transmission
  Complex alpha = 1.0;
  Complex beta = 0.0;
  AdversaryStrategy adversary;
  std::uint64_t seed = 0;
  int retry_budget = 1;  // anonymous entanglement attempts
  std::string id;

  std::optional<AgentId> sender() const {
    return intents.size() == 1 ? std::optional(intents[0].first) : std::nullopt;
  }
  std::optional<AgentId> receiver() const {
    return intents.size() == 1 ? std::optional(intents[0].second) : std::nullopt;
  }
};

enum class RunStatus {
  Completed,             // message teleported (fidelity reported)
  AbortedCollision,      // step 1 did not see both 0 and 2
  AbortedEntanglement,   // Z != 0 on every allowed attempt
  ReceiverNotNotified,   // receiver's parity was odd, so it gave up its qubit
  PairUnavailable,       // no unique sender, or a pair member's qubit was measured
};

inline const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return "completed";
    case RunStatus::AbortedCollision: return "aborted_collision";
    case RunStatus::AbortedEntanglement: return "aborted_entanglement";
    case RunStatus::ReceiverNotNotified: return "receiver_not_notified";
    case RunStatus::PairUnavailable: return "pair_unavailable";
  }
  return "?";
}

/// Step at which a run stopped ("" when it completed).
inline const char* abort_step(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return "";
    case RunStatus::AbortedCollision: return "collision_detection";
    case RunStatus::AbortedEntanglement: return "anonymous_entanglement";
    case RunStatus::ReceiverNotNotified: return "notification";
    case RunStatus::PairUnavailable: return "teleportation";
  }
  return "?";
}

struct FullRunResult {
  RunStatus status = RunStatus::Completed;
  std::vector<PrivateList> lists;
  CollisionResult collision;
  std::optional<NotificationResult> notification;
  std::vector<EntanglementResult> entanglement;  // one per attempt
  std::optional<BitResult> m0_bit;
  std::optional<BitResult> m1_bit;
  std::optional<TeleportRecord> teleport;
  Transcript transcript;
  std::vector<LocalRecord> local;
};

inline FullRunResult run_anonymous_communication(const Scenario& sc, OutcomeSource& rng) {
  if (sc.retry_budget < 1) throw std::invalid_argument("retry budget must be at least 1");
  sc.adversary.validate_for(sc.n, sc.sender(), sc.receiver());
  const TrustedSource source(sc.n);
  const StateVector message = StateVector::single_qubit(sc.alpha, sc.beta);

  FullRunResult out;
  out.lists = build_private_lists(sc.n, sc.intents);
  out.transcript.n = sc.n;
  out.transcript.seed = sc.seed;
  out.transcript.scenario = sc.id;
  Transcript& tr = out.transcript;

  // Step 1.
  {
    const auto orderings = generate_orderings(sc.n);
    bool saw_zero = false, saw_two = false;
    for (int t = 0; t < sc.n; ++t) {
      auto bits = collision_round(out.lists, orderings[t], t, source, sc.adversary, rng, tr, out.local);
      const int z = detail::bit_sum(bits);
      saw_zero |= z == 0;
      saw_two |= z == 2;
      out.collision.sums.push_back(z);
      out.collision.bits.push_back(std::move(bits));
    }
    out.collision.passed = saw_zero && saw_two;
  }
  if (!out.collision.passed) {
    out.status = RunStatus::AbortedCollision;
    return out;
  }

  // Step 2.
  NotificationResult& note = out.notification.emplace();
  for (int i = 0; i < sc.n; ++i) {
    auto r = notification_round(out.lists, i, source, sc.adversary, rng, tr, out.local);
    note.parity.push_back(r.parity);
    note.b.push_back(out.lists[i].a ^ r.parity);
    note.heard.push_back(std::move(r.heard));
    note.masks.push_back(std::move(r.mask));
  }

  // Step 3.
  const EntanglementResult* pair = nullptr;
  for (int attempt = 0; attempt < sc.retry_budget; ++attempt) {
    out.entanglement.push_back(entanglement_round(note.b, attempt, source, sc.adversary, rng, tr, out.local));
    if (out.entanglement.back().established) {
      pair = &out.entanglement.back();
      break;
    }
  }
  if (!pair) {
    out.status = RunStatus::AbortedEntanglement;
    return out;
  }

  const auto sender = sc.sender();
  const auto receiver = sc.receiver();
  if (!sender) {
    out.status = RunStatus::PairUnavailable;
    return out;
  }
  if (pair->residual.is_collapsed(sender->value) || pair->residual.is_collapsed(receiver->value)) {
    out.status = note.parity[receiver->value] != 0 ? RunStatus::ReceiverNotNotified : RunStatus::PairUnavailable;
    return out;
  }

  // Step 4: Bell measurement, announce m0 and m1 anonymously, correct.
  TeleportFrame frame = prepare_teleport(message, pair->residual, *sender, *receiver);
  auto a = measure_qubit(std::move(frame.state), frame.message_qubit, rng);
  auto b = measure_qubit(std::move(a.state), frame.sender_qubit, rng);
  frame.state = std::move(b.state);

  out.m0_bit = bit_transmission_round(a.outcome, *sender, 0, source, sc.adversary, rng, tr, out.local);
  out.m1_bit = bit_transmission_round(b.outcome, *sender, 1, source, sc.adversary, rng, tr, out.local);

  TeleportRecord& rec = out.teleport.emplace();
  rec.message = message;
  rec.m0 = a.outcome;
  rec.m1 = b.outcome;
  rec.correction = correction_for(out.m0_bit->m_decoded, out.m1_bit->m_decoded);
  rec.fidelity = received_fidelity(frame, message, rec.correction);
  out.status = RunStatus::Completed;
  return out;
}

inline FullRunResult run_anonymous_communication(const Scenario& sc) {
  RandomStream rng(sc.seed);
  return run_anonymous_communication(sc, rng);
}

}  // namespace qanon
