// Scenario files, batch execution and report assembly behind the CLI.
//
// A scenario is a JSON object:
//
//   {
//     "n": 3,
//     "sender": 0,                 // agent index, "none" or "multiple:<k>"
//     "receiver": 1,               // required with a single sender
//     "message": {"alpha": [1, 0], "beta": [0, 0]},
//     "adversary": {"behavior": "honest", "corrupted": [],
//                   "rule": {"kind": "flip", "protocol": "notification", "round": 1}},
//     "seed": 7, "trials": 100, "retry_budget": 1, "mode": "run",
//     "messages": [...],           // optional, privacy analysis and message sweeps
//     "sweep": {"n": [3, 4], "corrupted_sets": [[2]]}   // optional grids
//   }
#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qanon/adversary.hpp"
#include "qanon/analysis.hpp"
#include "qanon/errors.hpp"
#include "qanon/protocols.hpp"
#include "qanon/report.hpp"

namespace qanon {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kMaxRunAgents = kMaxQubits;

enum class Mode { Run, Analyze, Sweep };

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::Run: return "run";
    case Mode::Analyze: return "analyze";
    case Mode::Sweep: return "sweep";
  }
  return "?";
}

struct SenderSpec {
  enum class Kind { Single, None, Multiple };
  Kind kind = Kind::Single;
  int sender = 0;
  int count = 1;  // Multiple

  std::string to_string() const {
    switch (kind) {
      case Kind::Single: return std::to_string(sender);
      case Kind::None: return "none";
      case Kind::Multiple: return "multiple:" + std::to_string(count);
    }
    return "?";
  }
};

struct ScenarioConfig {
  int n = 3;
  SenderSpec sender;
  std::optional<int> receiver;
  Complex alpha = 1.0;
  Complex beta = 0.0;
  AdversaryStrategy adversary;
  std::uint64_t seed = 0;
  int trials = 1;
  int retry_budget = 1;
  Mode mode = Mode::Run;
  std::vector<std::pair<Complex, Complex>> messages;  // empty: defaults
  std::optional<std::vector<int>> sweep_n;
  std::optional<std::vector<std::vector<AgentId>>> sweep_corrupted;

  Scenario scenario(std::uint64_t trial_seed, const std::string& id = {}) const {
    Scenario sc;
    sc.n = n;
    switch (sender.kind) {
      case SenderSpec::Kind::Single: sc.intents.emplace_back(AgentId(sender.sender), AgentId(*receiver)); break;
      case SenderSpec::Kind::None: break;
      case SenderSpec::Kind::Multiple:
        for (int i = 0; i < sender.count; ++i) sc.intents.emplace_back(AgentId(i), AgentId((i + 1) % n));
        break;
    }
    sc.alpha = alpha;
    sc.beta = beta;
    sc.adversary = adversary;
    sc.seed = trial_seed;
    sc.retry_budget = retry_budget;
    sc.id = id;
    return sc;
  }
};

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline std::size_t line_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

template <class T>
T field(const Json& j, const std::string& name, const std::string& path) {
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + name, j.contains(name) ? "wrong type" : "missing");
  }
}

inline Complex parse_complex(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ValidationError(path, "expected [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline std::pair<Complex, Complex> parse_message(const Json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("alpha") || !j.contains("beta"))
    throw ValidationError(path, "expected {\"alpha\": [re, im], \"beta\": [re, im]}");
  const Complex a = parse_complex(j["alpha"], path + ".alpha");
  const Complex b = parse_complex(j["beta"], path + ".beta");
  if (std::abs(std::norm(a) + std::norm(b) - 1.0) > 1e-9) throw ValidationError(path, "|alpha|^2 + |beta|^2 must be 1");
  return {a, b};
}

inline std::vector<AgentId> parse_agents(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ValidationError(path, "expected an array of agent indices");
  std::vector<AgentId> out;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw ValidationError(path, "agent indices must be integers");
    out.emplace_back(v.get<int>());
  }
  return out;
}

inline TamperRule parse_rule(const Json& j) {
  TamperRule rule;
  if (!j.is_object()) throw ValidationError("adversary.rule", "expected an object");
  try {
    rule.kind = rule_kind_from_string(field<std::string>(j, "kind", "adversary.rule."));
    if (j.contains("protocol")) rule.protocol = protocol_from_string(j["protocol"].get<std::string>());
    if (j.contains("round")) rule.round = field<int>(j, "round", "adversary.rule.");
    if (j.contains("flip_probability")) rule.flip_probability = field<double>(j, "flip_probability", "adversary.rule.");
    if (j.contains("table")) {
      for (const auto& e : j["table"]) {
        rule.table.push_back({protocol_from_string(field<std::string>(e, "protocol", "adversary.rule.table.")),
                              field<int>(e, "round", "adversary.rule.table."),
                              AgentId(field<int>(e, "agent", "adversary.rule.table.")),
                              field<int>(e, "honest_bit", "adversary.rule.table."),
                              field<int>(e, "bit", "adversary.rule.table.")});
      }
    }
  } catch (const std::invalid_argument& e) {
    throw ValidationError("adversary.rule", e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("adversary.rule", e.what());
  }
  return rule;
}

inline Json rule_json(const TamperRule& rule) {
  Json j;
  j["kind"] = to_string(rule.kind);
  if (rule.protocol) j["protocol"] = to_string(*rule.protocol);
  if (rule.round) j["round"] = *rule.round;
  if (rule.kind == TamperRule::Kind::RandomFlip) j["flip_probability"] = rule.flip_probability;
  if (rule.kind == TamperRule::Kind::Table) {
    j["table"] = Json::array();
    for (const auto& e : rule.table) {
      Json r;
      r["protocol"] = to_string(e.protocol);
      r["round"] = e.round;
      r["agent"] = e.agent.value;
      r["honest_bit"] = e.honest_bit;
      r["bit"] = e.bit;
      j["table"].push_back(std::move(r));
    }
  }
  return j;
}

inline Json agents_json(const std::vector<AgentId>& agents) {
  Json j = Json::array();
  for (AgentId a : agents) j.push_back(a.value);
  return j;
}

inline Json message_json(const std::pair<Complex, Complex>& m) {
  Json j;
  j["alpha"] = complex_json(m.first);
  j["beta"] = complex_json(m.second);
  return j;
}

}  // namespace detail

/// Checks every cross-field invariant; throws ValidationError naming the
/// offending field.
inline void validate_config(const ScenarioConfig& c) {
  const int max_n = c.mode == Mode::Analyze ? kMaxEnumerationAgents : kMaxRunAgents;
  if (c.n < 3 || c.n > max_n)
    throw ValidationError("n", "must lie in [3, " + std::to_string(max_n) + "] for " + to_string(c.mode) + " mode");
  switch (c.sender.kind) {
    case SenderSpec::Kind::Single:
      if (c.sender.sender < 0 || c.sender.sender >= c.n) throw ValidationError("sender", "agent index out of range");
      if (!c.receiver) throw ValidationError("receiver", "required when there is a single sender");
      if (*c.receiver < 0 || *c.receiver >= c.n) throw ValidationError("receiver", "agent index out of range");
      if (*c.receiver == c.sender.sender) throw ValidationError("receiver", "sender and receiver must differ");
      break;
    case SenderSpec::Kind::None:
    case SenderSpec::Kind::Multiple:
      if (c.sender.count < 0 || c.sender.count > c.n) throw ValidationError("sender", "sender count out of range");
      if (c.mode == Mode::Analyze) throw ValidationError("sender", "analyze mode needs a single sender");
      break;
  }
  if (std::abs(std::norm(c.alpha) + std::norm(c.beta) - 1.0) > 1e-9)
    throw ValidationError("message", "|alpha|^2 + |beta|^2 must be 1");
  if (c.trials < 1) throw ValidationError("trials", "must be at least 1");
  if (c.retry_budget < 1) throw ValidationError("retry_budget", "must be at least 1");
  try {
    std::optional<AgentId> s, r;
    if (c.sender.kind == SenderSpec::Kind::Single) {
      s = AgentId(c.sender.sender);
      r = AgentId(*c.receiver);
    }
    c.adversary.validate_for(c.n, s, r);
  } catch (const std::invalid_argument& e) {
    throw ValidationError("adversary.corrupted", e.what());
  }
  if (c.sweep_n && c.sweep_n->empty()) throw ValidationError("sweep.n", "empty grid");
  if (c.sweep_corrupted && c.sweep_corrupted->empty()) throw ValidationError("sweep.corrupted_sets", "empty grid");
  for (int v : c.sweep_n.value_or(std::vector<int>{}))
    if (v < 3 || v > kMaxRunAgents) throw ValidationError("sweep.n", "grid values must lie in [3, 12]");
}

inline ScenarioConfig parse_scenario_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(detail::line_of(text, e.byte), e.what());
  }
  if (!j.is_object()) throw ParseError(1, "scenario must be a JSON object");

  ScenarioConfig c;
  c.n = detail::field<int>(j, "n", "");

  const Json& s = j.contains("sender") ? j["sender"] : Json();
  if (s.is_number_integer()) {
    c.sender = {SenderSpec::Kind::Single, s.get<int>(), 1};
  } else if (s.is_string() && s.get<std::string>() == "none") {
    c.sender = {SenderSpec::Kind::None, 0, 0};
  } else if (s.is_string() && s.get<std::string>().rfind("multiple:", 0) == 0) {
    try {
      c.sender = {SenderSpec::Kind::Multiple, 0, std::stoi(s.get<std::string>().substr(9))};
    } catch (const std::exception&) {
      throw ValidationError("sender", "expected multiple:<count>");
    }
  } else {
    throw ValidationError("sender", "expected an agent index, \"none\" or \"multiple:<k>\"");
  }
  if (j.contains("receiver") && !j["receiver"].is_null()) c.receiver = detail::field<int>(j, "receiver", "");

  if (j.contains("message")) {
    const Json& m = j["message"];
    if (!m.is_object() || !m.contains("alpha") || !m.contains("beta"))
      throw ValidationError("message", "expected {\"alpha\": [re, im], \"beta\": [re, im]}");
    c.alpha = detail::parse_complex(m["alpha"], "message.alpha");
    c.beta = detail::parse_complex(m["beta"], "message.beta");
  }

  if (j.contains("adversary")) {
    const Json& a = j["adversary"];
    if (!a.is_object()) throw ValidationError("adversary", "expected an object");
    Behavior behavior = Behavior::Honest;
    try {
      if (a.contains("behavior")) behavior = behavior_from_string(detail::field<std::string>(a, "behavior", "adversary."));
    } catch (const std::invalid_argument& e) {
      throw ValidationError("adversary.behavior", e.what());
    }
    std::vector<AgentId> corrupted;
    if (a.contains("corrupted")) corrupted = detail::parse_agents(a["corrupted"], "adversary.corrupted");
    TamperRule rule;
    if (a.contains("rule")) rule = detail::parse_rule(a["rule"]);
    try {
      c.adversary = AdversaryStrategy(behavior, std::move(corrupted), std::move(rule));
    } catch (const std::invalid_argument& e) {
      throw ValidationError("adversary", e.what());
    }
  }

  if (j.contains("seed")) c.seed = detail::field<std::uint64_t>(j, "seed", "");
  if (j.contains("trials")) c.trials = detail::field<int>(j, "trials", "");
  if (j.contains("retry_budget")) c.retry_budget = detail::field<int>(j, "retry_budget", "");
  if (j.contains("mode")) {
    const auto m = detail::field<std::string>(j, "mode", "");
    if (m == "run") c.mode = Mode::Run;
    else if (m == "analyze") c.mode = Mode::Analyze;
    else if (m == "sweep") c.mode = Mode::Sweep;
    else throw ValidationError("mode", "expected run, analyze or sweep");
  }
  if (j.contains("messages")) {
    if (!j["messages"].is_array()) throw ValidationError("messages", "expected an array");
    if (j["messages"].empty()) throw ValidationError("messages", "empty list");
    for (std::size_t i = 0; i < j["messages"].size(); ++i)
      c.messages.push_back(detail::parse_message(j["messages"][i], "messages[" + std::to_string(i) + "]"));
  }
  if (j.contains("sweep")) {
    const Json& sw = j["sweep"];
    if (!sw.is_object()) throw ValidationError("sweep", "expected an object");
    if (sw.contains("n")) c.sweep_n = detail::field<std::vector<int>>(sw, "n", "sweep.");
    if (sw.contains("corrupted_sets")) {
      if (!sw["corrupted_sets"].is_array()) throw ValidationError("sweep.corrupted_sets", "expected an array");
      c.sweep_corrupted.emplace();
      for (const auto& set : sw["corrupted_sets"])
        c.sweep_corrupted->push_back(detail::parse_agents(set, "sweep.corrupted_sets"));
    }
  }
  validate_config(c);
  return c;
}

inline ScenarioConfig parse_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str());
}

/// Canonical echo of a parsed config (fixed field order).
inline Json config_json(const ScenarioConfig& c) {
  Json j;
  j["n"] = c.n;
  if (c.sender.kind == SenderSpec::Kind::Single) j["sender"] = c.sender.sender;
  else j["sender"] = c.sender.to_string();
  j["receiver"] = c.receiver ? Json(*c.receiver) : Json(nullptr);
  j["message"] = detail::message_json({c.alpha, c.beta});
  Json adv;
  adv["behavior"] = to_string(c.adversary.behavior());
  adv["corrupted"] = detail::agents_json(c.adversary.corrupted());
  if (c.adversary.behavior() == Behavior::TamperBroadcast) adv["rule"] = detail::rule_json(c.adversary.rule());
  j["adversary"] = std::move(adv);
  j["seed"] = c.seed;
  j["trials"] = c.trials;
  j["retry_budget"] = c.retry_budget;
  j["mode"] = to_string(c.mode);
  if (!c.messages.empty()) {
    j["messages"] = Json::array();
    for (const auto& m : c.messages) j["messages"].push_back(detail::message_json(m));
  }
  if (c.sweep_n || c.sweep_corrupted) {
    Json sw;
    if (c.sweep_n) sw["n"] = *c.sweep_n;
    if (c.sweep_corrupted) {
      sw["corrupted_sets"] = Json::array();
      for (const auto& set : *c.sweep_corrupted) sw["corrupted_sets"].push_back(detail::agents_json(set));
    }
    j["sweep"] = std::move(sw);
  }
  return j;
}

// ---------------------------------------------------------------------------
// Run mode

struct RunAggregate {
  int trials = 0;
  std::array<int, 5> status_counts{};  // indexed by RunStatus
  int collision_passed = 0;
  int entanglement_attempts = 0;
  int entanglement_successes = 0;
  int receiver_notified = 0;
  int notification_runs = 0;
  int fidelity_count = 0;
  int fidelity_perfect = 0;  // |1 - F| <= 1e-12
  double fidelity_min = 1.0;
  double fidelity_max = 0.0;
  double fidelity_sum = 0.0;

  void add(const FullRunResult& r, std::optional<AgentId> receiver) {
    ++trials;
    ++status_counts[static_cast<std::size_t>(r.status)];
    collision_passed += r.collision.passed;
    for (const auto& e : r.entanglement) {
      ++entanglement_attempts;
      entanglement_successes += e.established;
    }
    if (r.notification && receiver) {
      ++notification_runs;
      receiver_notified += r.notification->parity[receiver->value] == 0;
    }
    if (r.teleport) {
      const double f = r.teleport->fidelity;
      ++fidelity_count;
      fidelity_perfect += std::abs(1.0 - f) <= kTolerance;
      fidelity_min = std::min(fidelity_min, f);
      fidelity_max = std::max(fidelity_max, f);
      fidelity_sum += f;
    }
  }

  double collision_pass_rate() const { return trials ? double(collision_passed) / trials : 0.0; }
  double entanglement_success_rate() const {
    return entanglement_attempts ? double(entanglement_successes) / entanglement_attempts : 0.0;
  }
};

/// Exact pass probability of the collision rule for one honest sender:
/// some run must sum to 0 (probability 1/n each) and some to 2.
inline double honest_collision_pass_probability(int n) {
  const double q = 1.0 / n;
  return 1.0 - std::pow(1.0 - q, n) - std::pow(q, n);
}

inline Json aggregate_json(const RunAggregate& a, const ScenarioConfig& c) {
  Json j;
  j["trials"] = a.trials;
  Json counts;
  for (int s = 0; s < 5; ++s) counts[to_string(static_cast<RunStatus>(s))] = a.status_counts[s];
  j["status_counts"] = std::move(counts);
  j["collision_pass_rate"] = a.collision_pass_rate();
  j["entanglement_attempts"] = a.entanglement_attempts;
  j["entanglement_successes"] = a.entanglement_successes;
  j["entanglement_success_rate"] = a.entanglement_success_rate();
  j["receiver_notified_rate"] = a.notification_runs ? double(a.receiver_notified) / a.notification_runs : 0.0;
  Json fid;
  fid["count"] = a.fidelity_count;
  fid["perfect"] = a.fidelity_perfect;
  fid["min"] = a.fidelity_count ? a.fidelity_min : 0.0;
  fid["max"] = a.fidelity_count ? a.fidelity_max : 0.0;
  fid["mean"] = a.fidelity_count ? a.fidelity_sum / a.fidelity_count : 0.0;
  j["fidelity"] = std::move(fid);
  if (c.sender.kind == SenderSpec::Kind::Single && c.adversary.behavior() == Behavior::Honest) {
    Json ref;
    ref["collision_pass_probability"] = honest_collision_pass_probability(c.n);
    ref["entanglement_success_probability"] = 2.0 / c.n;
    j["honest_reference"] = std::move(ref);
  }
  return j;
}

/// Executes `trials` runs with seeds seed, seed+1, ... and assembles the
/// report. The report contains no timing data so it is reproducible
/// byte-for-byte.
inline Json run_scenario(const ScenarioConfig& c, bool verbose = false, RunAggregate* aggregate_out = nullptr) {
  Json report;
  report["tool"] = "qanon";
  report["version"] = kToolVersion;
  report["mode"] = "run";
  report["config"] = config_json(c);

  RunAggregate agg;
  Json trials = Json::array();
  for (int t = 0; t < c.trials; ++t) {
    const std::uint64_t trial_seed = c.seed + static_cast<std::uint64_t>(t);
    const Scenario sc = c.scenario(trial_seed, "trial-" + std::to_string(t));
    const FullRunResult r = run_anonymous_communication(sc);
    agg.add(r, sc.receiver());
    Json tj;
    tj["trial"] = t;
    tj["seed"] = trial_seed;
    tj.update(full_run_json(r, verbose));
    trials.push_back(std::move(tj));
  }
  report["aggregate"] = aggregate_json(agg, c);
  report["trials"] = std::move(trials);
  if (aggregate_out) *aggregate_out = agg;
  return report;
}

// ---------------------------------------------------------------------------
// Analyze mode

inline std::vector<std::pair<Complex, Complex>> default_messages(const ScenarioConfig& c) {
  if (!c.messages.empty()) return c.messages;
  const double r = 1.0 / std::sqrt(2.0);
  return {{c.alpha, c.beta}, {1.0, 0.0}, {0.0, 1.0}, {r, r}};
}

/// Skippers for the privacy analysis: the configured corrupted set, or the
/// lowest-indexed agent outside the pair when nobody is corrupted.
inline std::vector<AgentId> privacy_skippers(const ScenarioConfig& c, int n, AgentId s, AgentId r) {
  if (!c.adversary.corrupted().empty()) return c.adversary.corrupted();
  for (int i = 0; i < n; ++i)
    if (AgentId(i) != s && AgentId(i) != r) return {AgentId(i)};
  return {};
}

inline Json analyze_scenario(const ScenarioConfig& c) {
  const AgentId s(c.sender.sender), r(*c.receiver);
  Json report;
  report["tool"] = "qanon";
  report["version"] = kToolVersion;
  report["mode"] = "analyze";
  report["config"] = config_json(c);

  Json anon;
  {
    LeakageOptions single;
    single.first_segment_only = true;
    anon["collision_single_run"] = leakage_json(leakage_report(ProtocolTag::Collision, c.n, c.adversary, single));
    anon["collision_all_orderings"] = leakage_json(leakage_report(ProtocolTag::Collision, c.n, c.adversary), false);
    anon["notification"] = leakage_json(leakage_report(ProtocolTag::Notification, c.n, c.adversary), false);
    LeakageOptions success;
    success.condition_on_success = true;
    anon["entanglement_success_conditioned"] =
        leakage_json(leakage_report(ProtocolTag::Entanglement, c.n, c.adversary, success));
    for (int m = 0; m < 2; ++m) {
      LeakageOptions bit;
      bit.message_bit = m;
      anon["bit_transmission_m" + std::to_string(m)] =
          leakage_json(leakage_report(ProtocolTag::BitTransmission, c.n, c.adversary, bit));
    }
  }
  report["anonymity"] = std::move(anon);

  const auto msgs = default_messages(c);
  report["privacy"] = privacy_json(privacy_report(c.n, s, r, privacy_skippers(c, c.n, s, r), msgs));
  return report;
}

// ---------------------------------------------------------------------------
// Sweep mode

enum class SweepAxis { N, CorruptedSet, Message };

inline SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "n") return SweepAxis::N;
  if (s == "corrupted-set") return SweepAxis::CorruptedSet;
  if (s == "message") return SweepAxis::Message;
  throw ValidationError("axis", "expected n, corrupted-set or message");
}

inline Json sweep(const ScenarioConfig& base, SweepAxis axis, bool verbose = false) {
  Json out;
  out["tool"] = "qanon";
  out["version"] = kToolVersion;
  out["mode"] = "sweep";
  out["config"] = config_json(base);
  Json summary = Json::array();
  Json reports = Json::array();

  switch (axis) {
    case SweepAxis::N: {
      out["axis"] = "n";
      const std::vector<int> grid = base.sweep_n.value_or(std::vector<int>{3, 4, 5, 6, 7, 8});
      for (int n : grid) {
        ScenarioConfig c = base;
        c.n = n;
        c.mode = Mode::Run;
        validate_config(c);
        RunAggregate agg;
        Json rep = run_scenario(c, verbose, &agg);
        Json row;
        row["n"] = n;
        row["collision_pass_rate"] = agg.collision_pass_rate();
        row["entanglement_success_rate"] = agg.entanglement_success_rate();
        row["entanglement_success_reference"] = 2.0 / n;
        row["completed"] = agg.status_counts[static_cast<std::size_t>(RunStatus::Completed)];
        row["min_fidelity"] = agg.fidelity_count ? agg.fidelity_min : 0.0;
        summary.push_back(std::move(row));
        reports.push_back(std::move(rep));
      }
      break;
    }
    case SweepAxis::CorruptedSet: {
      out["axis"] = "corrupted-set";
      if (base.n > kMaxEnumerationAgents) throw ResourceError("corrupted-set sweep uses exact enumeration (n <= 8)");
      std::vector<std::vector<AgentId>> grid = base.sweep_corrupted.value_or(std::vector<std::vector<AgentId>>{});
      if (!base.sweep_corrupted) {
        for (int i = 0; i < base.n; ++i) {
          const bool in_pair = base.sender.kind == SenderSpec::Kind::Single &&
                               (i == base.sender.sender || (base.receiver && i == *base.receiver));
          if (!in_pair) grid.push_back({AgentId(i)});
        }
      }
      for (const auto& set : grid) {
        const Behavior behavior =
            base.adversary.behavior() == Behavior::Honest ? Behavior::PassiveRecord : base.adversary.behavior();
        const AdversaryStrategy adv(behavior, set, base.adversary.rule());
        try {
          adv.validate_for(base.n, std::nullopt, std::nullopt);
        } catch (const std::invalid_argument& e) {
          throw ValidationError("sweep.corrupted_sets", e.what());
        }
        const auto note = leakage_report(ProtocolTag::Notification, base.n, adv);
        LeakageOptions success;
        success.condition_on_success = true;
        const auto ent = leakage_report(ProtocolTag::Entanglement, base.n, adv, success);
        Json row;
        row["corrupted"] = detail::agents_json(adv.corrupted());
        row["notification_max_tv"] = note.max_tv;
        row["entanglement_conditioned_max_tv"] = ent.max_tv;
        summary.push_back(std::move(row));
        Json rep;
        rep["notification"] = leakage_json(note, false);
        rep["entanglement_success_conditioned"] = leakage_json(ent, false);
        reports.push_back(std::move(rep));
      }
      break;
    }
    case SweepAxis::Message: {
      out["axis"] = "message";
      if (base.sender.kind != SenderSpec::Kind::Single) throw ValidationError("sender", "message sweep needs a single sender");
      std::vector<std::pair<Complex, Complex>> grid = base.messages;
      if (grid.empty()) {
        const double r = 1.0 / std::sqrt(2.0);
        grid = {{1.0, 0.0}, {0.0, 1.0}, {r, r}};
      }
      const AgentId s(base.sender.sender), r(*base.receiver);
      const auto rep = privacy_report(base.n, s, r, privacy_skippers(base, base.n, s, r), grid);
      for (std::size_t m = 0; m < grid.size(); ++m) {
        Json row;
        row["message"] = detail::message_json(grid[m]);
        row["trace_distance_to_first"] = rep.trace_distances[0][m];
        Json pb = Json::array();
        for (double p : rep.bell_probabilities[m]) pb.push_back(p);
        row["bell_probabilities"] = std::move(pb);
        summary.push_back(std::move(row));
      }
      reports.push_back(privacy_json(rep));
      break;
    }
  }
  if (summary.empty()) throw ValidationError("sweep", "empty grid");
  out["summary"] = std::move(summary);
  out["reports"] = std::move(reports);
  return out;
}

}  // namespace qanon
