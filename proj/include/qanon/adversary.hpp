// Semiactive adversary: a corrupted agent subset that records everything,
// may tamper with its own broadcasts and may skip measurements in the
// anonymous entanglement protocol. It never touches quantum states in
// transit and cannot corrupt the trusted source.
#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qanon/errors.hpp"
#include "qanon/network.hpp"
#include "qanon/random.hpp"

namespace qanon {

enum class Behavior { Honest, PassiveRecord, TamperBroadcast, SkipMeasurement };

inline const char* to_string(Behavior b) {
  switch (b) {
    case Behavior::Honest: return "honest";
    case Behavior::PassiveRecord: return "passive";
    case Behavior::TamperBroadcast: return "tamper";
    case Behavior::SkipMeasurement: return "skip_measurement";
  }
  return "?";
}

inline Behavior behavior_from_string(const std::string& s) {
  if (s == "honest") return Behavior::Honest;
  if (s == "passive") return Behavior::PassiveRecord;
  if (s == "tamper") return Behavior::TamperBroadcast;
  if (s == "skip_measurement") return Behavior::SkipMeasurement;
  throw std::invalid_argument("unknown adversary behavior '" + s + "'");
}

/// How a corrupted agent rewrites its broadcast. Rules are plain data so a
/// scenario file can carry them and replay them exactly.
struct TamperRule {
  enum class Kind {
    Flip,          // announce the complement
    ForceZero,
    ForceOne,
    CopyPrevious,  // repeat the previous bit of the segment (honest bit if first)
    RandomFlip,    // flip with `flip_probability`, drawn from the run's stream
    Table,         // explicit (protocol, round, agent, honest bit) -> bit entries
  };

  struct Entry {
    ProtocolTag protocol;
    int round;
    AgentId agent;
    int honest_bit;
    int bit;
  };

  Kind kind = Kind::Flip;
  std::optional<ProtocolTag> protocol;  // restrict to one protocol
  std::optional<int> round;             // restrict to one round
  double flip_probability = 0.5;
  std::vector<Entry> table;
};

inline const char* to_string(TamperRule::Kind k) {
  switch (k) {
    case TamperRule::Kind::Flip: return "flip";
    case TamperRule::Kind::ForceZero: return "force_zero";
    case TamperRule::Kind::ForceOne: return "force_one";
    case TamperRule::Kind::CopyPrevious: return "copy_previous";
    case TamperRule::Kind::RandomFlip: return "random_flip";
    case TamperRule::Kind::Table: return "table";
  }
  return "?";
}

inline TamperRule::Kind rule_kind_from_string(const std::string& s) {
  using K = TamperRule::Kind;
  if (s == "flip") return K::Flip;
  if (s == "force_zero") return K::ForceZero;
  if (s == "force_one") return K::ForceOne;
  if (s == "copy_previous") return K::CopyPrevious;
  if (s == "random_flip") return K::RandomFlip;
  if (s == "table") return K::Table;
  throw std::invalid_argument("unknown tamper rule '" + s + "'");
}

class AdversaryStrategy {
 public:
  AdversaryStrategy() = default;
  AdversaryStrategy(Behavior behavior, std::vector<AgentId> corrupted, TamperRule rule = {})
      : behavior_(behavior), corrupted_(std::move(corrupted)), rule_(std::move(rule)) {
    std::sort(corrupted_.begin(), corrupted_.end());
    if (std::adjacent_find(corrupted_.begin(), corrupted_.end()) != corrupted_.end())
      throw std::invalid_argument("corrupted set lists an agent twice");
    if (rule_.kind == TamperRule::Kind::RandomFlip && (rule_.flip_probability < 0.0 || rule_.flip_probability > 1.0))
      throw std::invalid_argument("flip_probability must lie in [0, 1]");
  }

  static AdversaryStrategy honest() { return {}; }

  Behavior behavior() const noexcept { return behavior_; }
  const std::vector<AgentId>& corrupted() const noexcept { return corrupted_; }
  const TamperRule& rule() const noexcept { return rule_; }

  bool is_corrupted(AgentId a) const { return std::binary_search(corrupted_.begin(), corrupted_.end(), a); }

  /// Corrupted set must fit in an n-agent network and leave the
  /// communicating pair honest.
  void validate_for(int n, std::optional<AgentId> sender, std::optional<AgentId> receiver) const {
    for (AgentId a : corrupted_)
      if (a.value < 0 || a.value >= n) throw std::invalid_argument("corrupted agent index out of range");
    if (static_cast<int>(corrupted_.size()) > n - 2)
      throw std::invalid_argument("at most n-2 agents can be corrupted");
    if ((sender && is_corrupted(*sender)) || (receiver && is_corrupted(*receiver)))
      throw std::invalid_argument("the sender and receiver must stay honest");
  }

 private:
  Behavior behavior_ = Behavior::Honest;
  std::vector<AgentId> corrupted_;
  TamperRule rule_;
};

/// The bit a (possibly corrupted) agent announces in place of `honest_bit`.
/// `source` is only consulted by RandomFlip rules.
inline int tamper_broadcast(const AdversaryStrategy& strategy, const BroadcastContext& ctx, int honest_bit,
                            OutcomeSource* source = nullptr) {
  if (strategy.behavior() != Behavior::TamperBroadcast || !strategy.is_corrupted(ctx.agent)) return honest_bit;
  const TamperRule& rule = strategy.rule();
  if (rule.protocol && *rule.protocol != ctx.protocol) return honest_bit;
  if (rule.round && *rule.round != ctx.round) return honest_bit;
  using K = TamperRule::Kind;
  switch (rule.kind) {
    case K::Flip: return honest_bit ^ 1;
    case K::ForceZero: return 0;
    case K::ForceOne: return 1;
    case K::CopyPrevious: return ctx.prefix.empty() ? honest_bit : ctx.prefix.back().bit;
    case K::RandomFlip:
      if (!source) throw ConfigurationError("random_flip rule needs the run's outcome source");
      return honest_bit ^ source->draw(rule.flip_probability);
    case K::Table:
      for (const auto& e : rule.table)
        if (e.protocol == ctx.protocol && e.round == ctx.round && e.agent == ctx.agent && e.honest_bit == honest_bit)
          return e.bit;
      return honest_bit;
  }
  return honest_bit;
}

/// Broadcast hook bound to a strategy and the run's outcome source. Honest
/// strategies yield an empty hook so they cost (and draw) nothing.
inline TamperHook make_hook(const AdversaryStrategy& strategy, OutcomeSource& source) {
  if (strategy.behavior() != Behavior::TamperBroadcast || strategy.corrupted().empty()) return {};
  return [&strategy, &source](const BroadcastContext& ctx, int honest_bit) {
    return tamper_broadcast(strategy, ctx, honest_bit, &source);
  };
}

enum class MeasurementDecision { Measure, Skip };

/// Whether `agent` performs a measurement it is supposed to perform. Only
/// the anonymous entanglement protocol lets a corrupted agent skip.
inline MeasurementDecision decide_measurement(const AdversaryStrategy& strategy, ProtocolTag protocol, AgentId agent) {
  if (strategy.behavior() != Behavior::SkipMeasurement || !strategy.is_corrupted(agent))
    return MeasurementDecision::Measure;
  if (protocol != ProtocolTag::Entanglement)
    throw ConfigurationError(std::string("skip-measurement requested in ") + to_string(protocol));
  return MeasurementDecision::Skip;
}

/// An agent's own measurement result; nullopt marks a skipped measurement.
struct LocalRecord {
  AgentId agent;
  ProtocolTag protocol;
  int round;
  std::optional<int> outcome;

  friend bool operator==(const LocalRecord&, const LocalRecord&) = default;
};

struct PublicEntry {
  ProtocolTag protocol;
  int round;
  int position;
  AgentId agent;
  int bit;

  friend bool operator==(const PublicEntry&, const PublicEntry&) = default;
};

/// Everything the adversary sees: every broadcast (without audit flags) plus
/// the corrupted agents' own lists and outcomes.
struct AdversaryView {
  std::vector<PublicEntry> broadcasts;
  std::vector<std::pair<AgentId, PrivateList>> lists;
  std::vector<LocalRecord> local;

  friend bool operator==(const AdversaryView&, const AdversaryView&) = default;

  /// Stable byte encoding, used for hashing and equality across re-runs.
  std::string canonical() const {
    nlohmann::ordered_json j;
    auto& b = j["broadcasts"] = nlohmann::ordered_json::array();
    for (const auto& e : broadcasts) b.push_back({to_string(e.protocol), e.round, e.position, e.agent.value, e.bit});
    auto& l = j["lists"] = nlohmann::ordered_json::array();
    for (const auto& [a, list] : lists) l.push_back({a.value, list.r, list.a});
    auto& o = j["local"] = nlohmann::ordered_json::array();
    for (const auto& r : local)
      o.push_back({r.agent.value, to_string(r.protocol), r.round,
                   r.outcome ? nlohmann::ordered_json(*r.outcome) : nlohmann::ordered_json(nullptr)});
    return j.dump();
  }
};

inline AdversaryView collect_view(const AdversaryStrategy& strategy, std::span<const Transcript> transcripts,
                                  std::span<const LocalRecord> local, std::span<const PrivateList> lists) {
  AdversaryView view;
  for (const auto& t : transcripts)
    for (const auto& e : t.entries) view.broadcasts.push_back({e.protocol, e.round, e.position, e.agent, e.bit});
  for (AgentId a : strategy.corrupted())
    if (a.value < static_cast<int>(lists.size())) view.lists.emplace_back(a, lists[a.value]);
  for (const auto& r : local)
    if (strategy.is_corrupted(r.agent)) view.local.push_back(r);
  return view;
}

}  // namespace qanon
