// Agents, private lists, orderings, the trusted source and the regular
// (ordered, nonsimultaneous) broadcast channel.
#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qanon/errors.hpp"
#include "qanon/qsim.hpp"

namespace qanon {

struct AgentId {
  int value = 0;

  constexpr AgentId() = default;
  constexpr explicit AgentId(int v) : value(v) {}
  friend constexpr auto operator<=>(AgentId, AgentId) = default;
};

/// One agent's secret row: r[j] = 1 iff the owner is the sender and P_j the
/// receiver; a is the XOR of r.
struct PrivateList {
  std::vector<int> r;
  int a = 0;

  friend bool operator==(const PrivateList&, const PrivateList&) = default;
};

inline void validate_private_list(const PrivateList& list, AgentId owner) {
  int parity = 0, ones = 0;
  for (int bit : list.r) {
    if (bit != 0 && bit != 1) throw std::invalid_argument("private list entries must be bits");
    parity ^= bit;
    ones += bit;
  }
  if (owner.value < 0 || owner.value >= static_cast<int>(list.r.size()))
    throw std::invalid_argument("private list owner out of range");
  if (list.r[owner.value] != 0) throw std::invalid_argument("an agent cannot name itself as receiver");
  if (ones > 1) throw std::invalid_argument("a private list names at most one receiver");
  if (list.a != parity) throw std::invalid_argument("a must be the XOR of the r entries");
}

/// Lists for an arbitrary set of (sender, receiver) intents. Used directly
/// for the no-sender and k-sender collision experiments.
inline std::vector<PrivateList> build_private_lists(int n, std::span<const std::pair<AgentId, AgentId>> intents) {
  if (n < 3) throw std::invalid_argument("the network needs at least 3 agents");
  std::vector<PrivateList> lists(n, PrivateList{std::vector<int>(n, 0), 0});
  for (const auto& [s, r] : intents) {
    if (s.value < 0 || s.value >= n || r.value < 0 || r.value >= n)
      throw std::invalid_argument("agent index out of range");
    if (s == r) throw std::invalid_argument("sender and receiver must differ");
    auto& list = lists[s.value];
    if (list.a) throw std::invalid_argument("an agent sends to at most one receiver");
    list.r[r.value] = 1;
    list.a = 1;
  }
  return lists;
}

inline std::vector<PrivateList> build_private_lists(int n, AgentId sender, AgentId receiver) {
  const std::pair<AgentId, AgentId> intent{sender, receiver};
  return build_private_lists(n, std::span(&intent, 1));
}

/// k senders 0..k-1, each naming its successor (mod n) as receiver.
inline std::vector<PrivateList> multi_sender_lists(int n, int k) {
  if (k < 0 || k > n) throw std::invalid_argument("sender count out of range");
  std::vector<std::pair<AgentId, AgentId>> intents;
  for (int i = 0; i < k; ++i) intents.emplace_back(AgentId(i), AgentId((i + 1) % n));
  return build_private_lists(n, intents);
}

struct Ordering {
  std::vector<AgentId> sequence;

  std::size_t size() const noexcept { return sequence.size(); }
  AgentId last() const { return sequence.back(); }
};

inline Ordering identity_ordering(int n) {
  Ordering o;
  for (int i = 0; i < n; ++i) o.sequence.emplace_back(i);
  return o;
}

/// The n cyclic rotations; rotation t starts at agent t, so agent i is last
/// in exactly one of them.
inline std::vector<Ordering> generate_orderings(int n) {
  if (n < 1) throw std::invalid_argument("need at least one agent");
  std::vector<Ordering> out(n);
  for (int t = 0; t < n; ++t)
    for (int k = 0; k < n; ++k) out[t].sequence.emplace_back((t + k) % n);
  return out;
}

enum class ProtocolTag { Collision, Notification, Entanglement, BitTransmission };

inline const char* to_string(ProtocolTag tag) {
  switch (tag) {
    case ProtocolTag::Collision: return "collision";
    case ProtocolTag::Notification: return "notification";
    case ProtocolTag::Entanglement: return "entanglement";
    case ProtocolTag::BitTransmission: return "bit_transmission";
  }
  return "?";
}

inline ProtocolTag protocol_from_string(const std::string& s) {
  if (s == "collision") return ProtocolTag::Collision;
  if (s == "notification") return ProtocolTag::Notification;
  if (s == "entanglement") return ProtocolTag::Entanglement;
  if (s == "bit_transmission") return ProtocolTag::BitTransmission;
  throw std::invalid_argument("unknown protocol tag '" + s + "'");
}

struct TranscriptEntry {
  ProtocolTag protocol;
  int round;
  int position;
  AgentId agent;
  int bit;
  bool tampered = false;  // audit only

  friend bool operator==(const TranscriptEntry&, const TranscriptEntry&) = default;
};

/// Everything announced on the broadcast channel, in broadcast order.
struct Transcript {
  int n = 0;
  std::uint64_t seed = 0;
  std::string scenario;
  std::vector<TranscriptEntry> entries;

  /// Entries of one (protocol, round) segment.
  std::vector<TranscriptEntry> segment(ProtocolTag protocol, int round) const {
    std::vector<TranscriptEntry> out;
    for (const auto& e : entries)
      if (e.protocol == protocol && e.round == round) out.push_back(e);
    return out;
  }

  /// Broadcast bits as a '0'/'1' string.
  std::string bits() const {
    std::string out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.bit ? '1' : '0');
    return out;
  }

  friend bool operator==(const Transcript&, const Transcript&) = default;
};

struct BroadcastContext {
  ProtocolTag protocol;
  int round;
  int position;
  AgentId agent;
  std::span<const TranscriptEntry> prefix;  // earlier bits of the same segment
};

/// Maps (context, honest bit) to the bit actually announced. An empty hook
/// is the honest channel.
using TamperHook = std::function<int(const BroadcastContext&, int)>;

/// Appends `agent`'s announcement at the next position of the (protocol,
/// round) segment. Throws ProtocolViolation when it is not the agent's turn.
inline const TranscriptEntry& broadcast(Transcript& transcript, const Ordering& ordering, ProtocolTag protocol,
                                        int round, AgentId agent, int honest_bit, const TamperHook& hook = {}) {
  std::size_t position = 0;
  for (auto it = transcript.entries.rbegin(); it != transcript.entries.rend(); ++it) {
    if (it->protocol != protocol || it->round != round) break;
    ++position;
  }
  if (position >= ordering.size() || ordering.sequence[position] != agent)
    throw ProtocolViolation("agent " + std::to_string(agent.value) + " broadcast out of turn in " +
                            to_string(protocol) + " round " + std::to_string(round));
  int bit = honest_bit;
  if (hook) {
    const std::span<const TranscriptEntry> prefix(transcript.entries.data() + transcript.entries.size() - position,
                                                  position);
    bit = hook(BroadcastContext{protocol, round, static_cast<int>(position), agent, prefix}, honest_bit);
  }
  transcript.entries.push_back(
      TranscriptEntry{protocol, round, static_cast<int>(position), agent, bit, bit != honest_bit});
  return transcript.entries.back();
}

/// Trusted source of n-partite W states.
class TrustedSource {
 public:
  explicit TrustedSource(int num_qubits) : n_(num_qubits) {}

  int num_qubits() const noexcept { return n_; }
  StateVector w_state() const { return make_w_state(n_); }
  MaskedState masked_w_state(OutcomeSource& source) const { return apply_even_x_mask(make_w_state(n_), source); }

 private:
  int n_;
};

// Serialization: each broadcast is a flat record [protocol, round, position,
// agent, bit]; the audit flag is appended only when `with_audit` is set.

inline nlohmann::ordered_json transcript_to_json(const Transcript& t, bool with_audit) {
  nlohmann::ordered_json j;
  j["n"] = t.n;
  j["seed"] = t.seed;
  j["scenario"] = t.scenario;
  auto& entries = j["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : t.entries) {
    nlohmann::ordered_json rec = {to_string(e.protocol), e.round, e.position, e.agent.value, e.bit};
    if (with_audit) rec.push_back(e.tampered);
    entries.push_back(std::move(rec));
  }
  return j;
}

inline Transcript transcript_from_json(const nlohmann::ordered_json& j) {
  Transcript t;
  t.n = j.at("n").get<int>();
  t.seed = j.at("seed").get<std::uint64_t>();
  t.scenario = j.at("scenario").get<std::string>();
  for (const auto& rec : j.at("entries")) {
    if (rec.size() != 5 && rec.size() != 6) throw std::invalid_argument("transcript record must have 5 or 6 fields");
    TranscriptEntry e{protocol_from_string(rec[0].get<std::string>()), rec[1].get<int>(), rec[2].get<int>(),
                      AgentId(rec[3].get<int>()), rec[4].get<int>(), rec.size() == 6 && rec[5].get<bool>()};
    t.entries.push_back(e);
  }
  return t;
}

}  // namespace qanon
