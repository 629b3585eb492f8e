// Quantitative checks of the protocol's claims: sender counting from
// collision sums, exact adversary-view distributions with anonymity
// metrics, and reduced-state privacy metrics for the skip-measurement
// attack.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qanon/adversary.hpp"
#include "qanon/distribution.hpp"
#include "qanon/enumerate.hpp"
#include "qanon/errors.hpp"
#include "qanon/network.hpp"
#include "qanon/protocols.hpp"
#include "qanon/qsim.hpp"

namespace qanon {

// ---------------------------------------------------------------------------
// Sender counting

struct SenderCountEstimate {
  enum class Kind { Exactly, Ambiguous, Inconsistent };

  std::vector<int> observed;
  Kind kind = Kind::Inconsistent;
  std::vector<int> candidates;     // every k consistent with the observed sums
  std::optional<int> most_likely;  // maximum-likelihood k among the candidates
};

inline const char* to_string(SenderCountEstimate::Kind k) {
  switch (k) {
    case SenderCountEstimate::Kind::Exactly: return "exactly";
    case SenderCountEstimate::Kind::Ambiguous: return "ambiguous";
    case SenderCountEstimate::Kind::Inconsistent: return "inconsistent";
  }
  return "?";
}

/// Probability that one honest collision run with k senders sums to `sum`:
/// the excitation lands on a sender (sum k-1) with probability k/n and on a
/// non-sender (sum k+1) otherwise. No sender always gives 1.
inline double collision_sum_probability(int n, int k, int sum) {
  if (k == 0) return sum == 1 ? 1.0 : 0.0;
  if (sum == k - 1) return static_cast<double>(k) / n;
  if (sum == k + 1) return static_cast<double>(n - k) / n;
  return 0.0;
}

inline SenderCountEstimate estimate_sender_count(std::span<const int> sums, int n) {
  if (n < 1) throw std::invalid_argument("network size must be positive");
  SenderCountEstimate est;
  est.observed.assign(sums.begin(), sums.end());
  std::set<int> seen;
  for (int s : sums) {
    if (s < 0 || s > n) throw std::invalid_argument("collision sum outside [0, n]");
    seen.insert(s);
  }

  double best = -1.0;
  for (int k = 0; k <= n; ++k) {
    double likelihood = 1.0;
    for (int s : sums) likelihood *= collision_sum_probability(n, k, s);
    if (likelihood <= 0.0) continue;
    est.candidates.push_back(k);
    if (likelihood > best) {
      best = likelihood;
      est.most_likely = k;
    }
  }
  if (est.candidates.empty()) {
    est.kind = SenderCountEstimate::Kind::Inconsistent;
    return est;
  }
  // Both endpoints k-1 and k+1 pin k down; anything else stays ambiguous.
  if (seen.size() == 2 && *seen.rbegin() - *seen.begin() == 2) {
    est.kind = SenderCountEstimate::Kind::Exactly;
    est.candidates = {*seen.begin() + 1};
  } else {
    est.kind = SenderCountEstimate::Kind::Ambiguous;
  }
  return est;
}

// ---------------------------------------------------------------------------
// Adversary-view distributions

/// Exact distribution of the adversary's view, one factor per round. Rounds
/// use fresh W states and fresh source randomness, so the joint is the
/// product of the factors. Joint keys join round keys with '|'.
struct TranscriptDistribution {
  std::vector<Distribution> segments;

  double probability(const std::string& joint_key) const {
    double p = 1.0;
    std::size_t start = 0;
    for (std::size_t s = 0; s < segments.size(); ++s) {
      const std::size_t end = joint_key.find('|', start);
      const bool last = s + 1 == segments.size();
      if ((end == std::string::npos) != last) return 0.0;
      p *= segments[s].probability(joint_key.substr(start, last ? std::string::npos : end - start));
      if (p == 0.0) return 0.0;
      start = end + 1;
    }
    return p;
  }

  double support_size() const {
    double size = 1.0;
    for (const auto& s : segments) size *= static_cast<double>(s.size());
    return size;
  }

  Distribution materialize(std::size_t budget = std::size_t{1} << 20) const;
};

/// Per-round view keys of one run: the announced bits of the round, then,
/// when the adversary controls anyone, '/' and the corrupted agents' own
/// outcomes in that round ('s' for a skipped measurement).
inline std::vector<std::string> segment_view_keys(const Transcript& transcript, std::span<const LocalRecord> local,
                                                  const AdversaryStrategy& adversary) {
  std::vector<std::pair<ProtocolTag, int>> order;
  std::map<std::pair<ProtocolTag, int>, std::string> keys;
  for (const auto& e : transcript.entries) {
    const auto id = std::make_pair(e.protocol, e.round);
    if (!keys.count(id)) order.push_back(id);
    keys[id].push_back(e.bit ? '1' : '0');
  }
  if (!adversary.corrupted().empty()) {
    for (const auto& id : order) keys[id].push_back('/');
    for (const auto& r : local) {
      if (!adversary.is_corrupted(r.agent)) continue;
      auto it = keys.find({r.protocol, r.round});
      if (it == keys.end()) continue;
      it->second.push_back(!r.outcome ? 's' : (*r.outcome ? '1' : '0'));
    }
  }
  std::vector<std::string> out;
  for (const auto& id : order) out.push_back(keys[id]);
  return out;
}

inline std::string join_view_keys(std::span<const std::string> keys) {
  std::string out;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (i) out.push_back('|');
    out += keys[i];
  }
  return out;
}

/// The announced-bits part of a round view key.
inline std::string announced_part(const std::string& key) { return key.substr(0, key.find('/')); }

/// One protocol with concrete private inputs, as needed for exact analysis.
struct ProtocolScenario {
  ProtocolTag protocol = ProtocolTag::Collision;
  int n = 3;
  std::vector<PrivateList> lists;  // collision, notification
  std::vector<int> b;              // entanglement roles
  AgentId sender{0};               // bit transmission
  int message_bit = 0;             // bit transmission
  AdversaryStrategy adversary;
};

/// Inputs an honest run with this sender/receiver would produce. For the
/// entanglement protocol that is b = 0 for the pair and 1 for everyone else.
inline ProtocolScenario honest_protocol_scenario(ProtocolTag protocol, int n, AgentId sender, AgentId receiver,
                                                 int message_bit = 0, AdversaryStrategy adversary = {}) {
  ProtocolScenario sc;
  sc.protocol = protocol;
  sc.n = n;
  sc.lists = build_private_lists(n, sender, receiver);
  sc.b.assign(n, 1);
  sc.b[sender.value] = 0;
  sc.b[receiver.value] = 0;
  sc.sender = sender;
  sc.message_bit = message_bit;
  sc.adversary = std::move(adversary);
  return sc;
}

inline int segment_count(const ProtocolScenario& sc) {
  return (sc.protocol == ProtocolTag::Collision || sc.protocol == ProtocolTag::Notification) ? sc.n : 1;
}

/// Runs round `round` of the scenario's protocol on a fresh transcript and
/// returns its view key.
inline std::string run_segment(const ProtocolScenario& sc, int round, OutcomeSource& rng) {
  const TrustedSource source(sc.n);
  Transcript t;
  t.n = sc.n;
  std::vector<LocalRecord> local;
  switch (sc.protocol) {
    case ProtocolTag::Collision:
      collision_round(sc.lists, generate_orderings(sc.n)[round], round, source, sc.adversary, rng, t, local);
      break;
    case ProtocolTag::Notification:
      notification_round(sc.lists, round, source, sc.adversary, rng, t, local);
      break;
    case ProtocolTag::Entanglement:
      entanglement_round(sc.b, round, source, sc.adversary, rng, t, local);
      break;
    case ProtocolTag::BitTransmission:
      bit_transmission_round(sc.message_bit, sc.sender, round, source, sc.adversary, rng, t, local);
      break;
  }
  return segment_view_keys(t, local, sc.adversary).at(0);
}

inline constexpr int kMaxEnumerationAgents = 8;

/// Exact distribution over adversary views, enumerating the excitation
/// position, the source's masks, every measurement branch and any
/// randomized tamper rule.
inline TranscriptDistribution transcript_distribution(const ProtocolScenario& sc,
                                                      std::size_t leaf_budget = std::size_t{1} << 20) {
  if (sc.n > kMaxEnumerationAgents)
    throw ResourceError("exact enumeration supports at most " + std::to_string(kMaxEnumerationAgents) + " agents");
  if (sc.n < 3) throw std::invalid_argument("protocols need at least 3 agents");
  TranscriptDistribution out;
  for (int round = 0; round < segment_count(sc); ++round)
    out.segments.push_back(
        enumerate_branches([&](OutcomeSource& src) { return run_segment(sc, round, src); }, leaf_budget));
  return out;
}

// ---------------------------------------------------------------------------
// Metrics over families of view distributions

namespace detail {

inline void check_same_space(std::span<const TranscriptDistribution> family) {
  if (family.empty()) throw std::invalid_argument("empty distribution family");
  const std::size_t segs = family[0].segments.size();
  for (const auto& d : family) {
    if (d.segments.size() != segs) throw std::invalid_argument("distributions over different transcript spaces");
    for (std::size_t s = 0; s < segs; ++s) {
      const long wa = key_width(d.segments[s]), wb = key_width(family[0].segments[s]);
      if (wa < 0 || wb < 0 || (wa != wb && !d.segments[s].empty() && !family[0].segments[s].empty()))
        throw std::invalid_argument("distributions over different transcript spaces");
    }
  }
}

inline std::vector<double> uniform_prior(std::size_t k, std::span<const double> prior) {
  if (prior.empty()) return std::vector<double>(k, 1.0 / static_cast<double>(k));
  if (prior.size() != k) throw std::invalid_argument("prior size does not match the family");
  return {prior.begin(), prior.end()};
}

}  // namespace detail

/// Calls `fn(joint_key, probs)` for every cell of the product of the
/// members' per-round supports; probs[m] is member m's probability of the
/// cell. Keys are built only when `with_keys` is set.
inline void for_each_joint_cell(std::span<const TranscriptDistribution> family,
                                const std::function<void(const std::string&, std::span<const double>)>& fn,
                                bool with_keys = false, double cell_budget = 1 << 25) {
  detail::check_same_space(family);
  const std::size_t members = family.size();
  const std::size_t segs = family[0].segments.size();

  // Union support per round, with each member's probability on it.
  std::vector<std::vector<std::string>> keys(segs);
  std::vector<std::vector<std::vector<double>>> probs(segs);
  double cells = 1.0;
  for (std::size_t s = 0; s < segs; ++s) {
    std::set<std::string> u;
    for (const auto& d : family)
      for (const auto& [k, _] : d.segments[s]) u.insert(k);
    keys[s].assign(u.begin(), u.end());
    for (const auto& k : keys[s]) {
      std::vector<double> row(members);
      for (std::size_t m = 0; m < members; ++m) row[m] = family[m].segments[s].probability(k);
      probs[s].push_back(std::move(row));
    }
    cells *= static_cast<double>(keys[s].size());
  }
  if (cells > cell_budget) throw ResourceError("joint view space too large for exact metrics");
  if (segs == 0) return;
  for (const auto& k : keys)
    if (k.empty()) return;

  std::vector<std::size_t> idx(segs, 0);
  std::vector<double> cell(members);
  std::string key;
  while (true) {
    std::fill(cell.begin(), cell.end(), 1.0);
    for (std::size_t s = 0; s < segs; ++s)
      for (std::size_t m = 0; m < members; ++m) cell[m] *= probs[s][idx[s]][m];
    if (with_keys) {
      key.clear();
      for (std::size_t s = 0; s < segs; ++s) {
        if (s) key.push_back('|');
        key += keys[s][idx[s]];
      }
    }
    fn(key, cell);
    std::size_t s = segs;
    while (s > 0) {
      --s;
      if (++idx[s] < keys[s].size()) break;
      idx[s] = 0;
      if (s == 0) return;
    }
  }
}

inline Distribution TranscriptDistribution::materialize(std::size_t budget) const {
  Distribution out;
  const TranscriptDistribution* self = this;
  for_each_joint_cell(
      std::span(self, 1),
      [&](const std::string& k, std::span<const double> p) {
        if (p[0] > 0.0) out.add(k, p[0]);
      },
      true, static_cast<double>(budget));
  return out;
}

/// Drops rounds on which every member has the same distribution. A shared
/// product factor changes neither TV distances nor mutual information.
inline std::vector<TranscriptDistribution> informative_rounds(std::span<const TranscriptDistribution> family) {
  detail::check_same_space(family);
  std::vector<TranscriptDistribution> out(family.size());
  for (std::size_t s = 0; s < family[0].segments.size(); ++s) {
    bool shared = true;
    for (std::size_t m = 1; m < family.size() && shared; ++m)
      shared = tv_distance(family[m].segments[s], family[0].segments[s]) <= kBranchEpsilon;
    if (shared) continue;
    for (std::size_t m = 0; m < family.size(); ++m) out[m].segments.push_back(family[m].segments[s]);
  }
  return out;
}

/// Calls `fn(owner, probs)` for every joint view in the support of each
/// member `owner`; probs[m] is member m's probability of that view. Cost is
/// the sum of the members' own support sizes rather than the size of the
/// union product.
inline void for_each_member_cell(std::span<const TranscriptDistribution> family,
                                 const std::function<void(std::size_t, std::span<const double>)>& fn,
                                 double cell_budget = 1 << 28) {
  detail::check_same_space(family);
  const std::size_t members = family.size();
  const std::size_t segs = family[0].segments.size();

  double cells = 0.0;
  for (const auto& d : family) cells += d.support_size();
  if (cells > cell_budget) throw ResourceError("joint view space too large for exact metrics");

  for (std::size_t owner = 0; owner < members; ++owner) {
    // rows[s][i][m]: member m's probability of the owner's i-th key in round s.
    std::vector<std::vector<std::vector<double>>> rows(segs);
    bool empty = false;
    for (std::size_t s = 0; s < segs; ++s) {
      for (const auto& [key, p] : family[owner].segments[s]) {
        if (p <= 0.0) continue;
        std::vector<double> row(members);
        for (std::size_t m = 0; m < members; ++m) row[m] = family[m].segments[s].probability(key);
        rows[s].push_back(std::move(row));
      }
      empty |= rows[s].empty();
    }
    if (empty) continue;
    if (segs == 0) {
      const std::vector<double> ones(members, 1.0);
      fn(owner, ones);
      continue;
    }

    // prefix[s] holds the product over rounds 0..s-1 for the current indices.
    std::vector<std::vector<double>> prefix(segs + 1, std::vector<double>(members, 1.0));
    std::vector<std::size_t> idx(segs, 0);
    std::size_t dirty = 0;
    while (true) {
      for (std::size_t s = dirty; s < segs; ++s)
        for (std::size_t m = 0; m < members; ++m) prefix[s + 1][m] = prefix[s][m] * rows[s][idx[s]][m];
      fn(owner, prefix[segs]);
      std::size_t s = segs;
      while (s > 0) {
        --s;
        if (++idx[s] < rows[s].size()) break;
        idx[s] = 0;
        if (s == 0) goto next_owner;
      }
      dirty = s;
    }
  next_owner:;
  }
}

/// All pairwise total-variation distances, using
/// TV(a, b) = sum over a's support of max(0, p_a - p_b).
inline std::vector<std::vector<double>> pairwise_tv(std::span<const TranscriptDistribution> family) {
  const std::size_t m = family.size();
  std::vector<std::vector<double>> excess(m, std::vector<double>(m, 0.0));
  const auto reduced = informative_rounds(family);
  for_each_member_cell(reduced, [&](std::size_t a, std::span<const double> p) {
    for (std::size_t b = 0; b < m; ++b)
      if (p[a] > p[b]) excess[a][b] += p[a] - p[b];
  });
  std::vector<std::vector<double>> tv(m, std::vector<double>(m, 0.0));
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b)
      tv[b][a] = tv[a][b] = std::clamp(0.5 * (excess[a][b] + excess[b][a]), 0.0, 1.0);
  return tv;
}

inline double tv_distance(const TranscriptDistribution& a, const TranscriptDistribution& b) {
  const std::array<TranscriptDistribution, 2> pair{a, b};
  return pairwise_tv(pair)[0][1];
}

/// Posterior over family members given one observed joint view; prior
/// defaults to uniform.
inline std::vector<double> sender_posterior(std::span<const TranscriptDistribution> family,
                                            const std::string& view, std::span<const double> prior = {}) {
  detail::check_same_space(family);
  auto post = detail::uniform_prior(family.size(), prior);
  double z = 0.0;
  for (std::size_t m = 0; m < family.size(); ++m) {
    post[m] *= family[m].probability(view);
    z += post[m];
  }
  if (z <= 0.0) throw std::invalid_argument("view has zero probability under every family member");
  for (auto& p : post) p /= z;
  return post;
}

/// I(identity; view) in bits for the given prior over family members.
inline double mutual_information(std::span<const TranscriptDistribution> family, std::span<const double> prior = {}) {
  const auto pi = detail::uniform_prior(family.size(), prior);
  double mi = 0.0;
  const auto reduced = informative_rounds(family);
  for_each_member_cell(reduced, [&](std::size_t owner, std::span<const double> p) {
    if (pi[owner] <= 0.0) return;
    double mix = 0.0;
    for (std::size_t m = 0; m < p.size(); ++m) mix += pi[m] * p[m];
    mi += pi[owner] * p[owner] * std::log2(p[owner] / mix);
  });
  return std::max(0.0, mi);
}

inline TranscriptDistribution as_transcript_distribution(Distribution d) {
  TranscriptDistribution t;
  t.segments.push_back(std::move(d));
  return t;
}

// ---------------------------------------------------------------------------
// Leakage report

struct IdentityAssignment {
  AgentId sender;
  std::optional<AgentId> receiver;

  std::string label() const {
    std::string s = "s=" + std::to_string(sender.value);
    if (receiver) s += ",r=" + std::to_string(receiver->value);
    return s;
  }
};

struct LeakageOptions {
  bool first_segment_only = false;      // e.g. a single collision run
  bool condition_on_success = false;    // entanglement: condition on Z = 0
  int message_bit = 0;                  // bit transmission
  double posterior_limit = 4096;        // emit per-view posteriors up to this many joint views
};

struct LeakageReport {
  ProtocolTag protocol = ProtocolTag::Collision;
  int n = 0;
  std::vector<AgentId> corrupted;
  std::vector<IdentityAssignment> assignments;
  std::vector<TranscriptDistribution> distributions;
  std::vector<std::vector<double>> tv;
  double max_tv = 0.0;
  double mutual_information_bits = 0.0;
  std::vector<std::pair<std::string, std::vector<double>>> posteriors;  // empty when the view space is too large
};

/// Every identity assignment among honest agents. Protocols whose inputs only
/// depend on the sender (collision detection, bit transmission) vary the
/// sender alone.
inline std::vector<IdentityAssignment> honest_assignments(ProtocolTag protocol, int n,
                                                          const AdversaryStrategy& adversary) {
  std::vector<int> honest;
  for (int i = 0; i < n; ++i)
    if (!adversary.is_corrupted(AgentId(i))) honest.push_back(i);
  std::vector<IdentityAssignment> out;
  const bool pair_matters = protocol == ProtocolTag::Notification || protocol == ProtocolTag::Entanglement;
  for (int s : honest) {
    if (!pair_matters) {
      out.push_back({AgentId(s), std::nullopt});
      continue;
    }
    for (int r : honest)
      if (r != s) out.push_back({AgentId(s), AgentId(r)});
  }
  return out;
}

inline LeakageReport leakage_report(ProtocolTag protocol, int n, const AdversaryStrategy& adversary,
                                    const LeakageOptions& opt = {}) {
  LeakageReport rep;
  rep.protocol = protocol;
  rep.n = n;
  rep.corrupted = adversary.corrupted();
  rep.assignments = honest_assignments(protocol, n, adversary);
  if (rep.assignments.empty()) throw std::invalid_argument("no honest identity assignment to compare");

  for (const auto& as : rep.assignments) {
    // Collision detection ignores who the receiver is; any other agent will do.
    const AgentId receiver = as.receiver.value_or(AgentId((as.sender.value + 1) % n));
    adversary.validate_for(n, as.sender, as.receiver);
    auto sc = honest_protocol_scenario(protocol, n, as.sender, receiver, opt.message_bit, adversary);
    TranscriptDistribution d;
    if (opt.first_segment_only) {
      d.segments.push_back(enumerate_branches([&](OutcomeSource& src) { return run_segment(sc, 0, src); }));
    } else {
      d = transcript_distribution(sc);
    }
    if (opt.condition_on_success)
      for (auto& seg : d.segments)
        seg = seg.conditioned([](const std::string& k) {
          const auto a = announced_part(k);
          return a.find('1') == std::string::npos;
        });
    rep.distributions.push_back(std::move(d));
  }

  rep.tv = pairwise_tv(rep.distributions);
  for (const auto& row : rep.tv)
    for (double v : row) rep.max_tv = std::max(rep.max_tv, v);
  rep.mutual_information_bits = mutual_information(rep.distributions);

  double support = 1.0;
  for (std::size_t s = 0; s < rep.distributions[0].segments.size(); ++s) {
    std::set<std::string> u;
    for (const auto& d : rep.distributions)
      for (const auto& [k, _] : d.segments[s]) u.insert(k);
    support *= static_cast<double>(u.size());
  }
  if (support <= opt.posterior_limit) {
    for_each_joint_cell(
        rep.distributions,
        [&](const std::string& key, std::span<const double> p) {
          double z = 0.0;
          for (double v : p) z += v;
          if (z <= 0.0) return;
          std::vector<double> post(p.begin(), p.end());
          for (auto& v : post) v /= z;
          rep.posteriors.emplace_back(key, std::move(post));
        },
        true);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Privacy under the skip-measurement attack

struct PrivacyReport {
  int n = 0;
  AgentId sender{0};
  AgentId receiver{1};
  std::vector<AgentId> skippers;
  std::vector<std::pair<Complex, Complex>> messages;
  double establishment_probability = 0.0;  // P(Z = 0) given the skips

  std::vector<DensityMatrix> adversary_states;               // unconditioned, per message
  std::vector<std::vector<double>> trace_distances;          // pairwise over messages
  std::vector<std::array<double, 4>> bell_probabilities;     // P(m0 m1), per message
  std::vector<Distribution> joint_outcomes;                  // key: m0 m1 + adversary bits, per message
  std::vector<std::array<std::optional<DensityMatrix>, 4>> conditioned_states;  // per message, per m0 m1

  double max_trace_distance = 0.0;              // unconditioned
  double max_conditioned_trace_distance = 0.0;  // same (m0,m1) across messages
  double max_joint_tv = 0.0;                    // joint outcome distributions across messages
};

/// The adversary's skippers keep their qubits in the anonymous entanglement
/// round. Conditioned on that round succeeding (every honest measurer reads
/// 0), the pair and the skippers share a W state; the sender then performs
/// the Bell-basis change on (message, own half). Reports the skippers'
/// reduced state before any announcement, the state conditioned on each
/// (m0, m1), and the joint outcome statistics.
inline PrivacyReport privacy_report(int n, AgentId sender, AgentId receiver, std::vector<AgentId> skippers,
                                    std::span<const std::pair<Complex, Complex>> messages) {
  if (messages.empty()) throw std::invalid_argument("privacy_report needs at least one message");
  const AdversaryStrategy adversary(Behavior::SkipMeasurement, skippers);
  adversary.validate_for(n, sender, receiver);

  PrivacyReport rep;
  rep.n = n;
  rep.sender = sender;
  rep.receiver = receiver;
  rep.skippers = adversary.corrupted();
  rep.messages.assign(messages.begin(), messages.end());

  StateVector shared = make_w_state(n);
  rep.establishment_probability = 1.0;
  for (int i = 0; i < n; ++i) {
    const AgentId a(i);
    if (a == sender || a == receiver || adversary.is_corrupted(a)) continue;
    rep.establishment_probability *= 1.0 - shared.probability_one(i);
    shared.project(i, 0);
  }

  for (const auto& [alpha, beta] : messages) {
    const StateVector message = StateVector::single_qubit(alpha, beta);
    TeleportFrame f = prepare_teleport(message, shared, sender, receiver);
    rep.adversary_states.push_back(
        f.other_qubits.empty() ? DensityMatrix::diagonal({1.0}) : reduced_density_matrix(f.state, f.other_qubits));

    std::vector<Qubit> observed{f.message_qubit, f.sender_qubit};
    observed.insert(observed.end(), f.other_qubits.begin(), f.other_qubits.end());
    rep.joint_outcomes.push_back(outcome_distribution(f.state, observed));

    const Qubit measured[] = {f.message_qubit, f.sender_qubit};
    const Distribution bell = outcome_distribution(f.state, measured);
    std::array<double, 4> pb{};
    std::array<std::optional<DensityMatrix>, 4> cond;
    for (int m = 0; m < 4; ++m) {
      const int m0 = m >> 1, m1 = m & 1;
      pb[m] = bell.probability(std::string{char('0' + m0), char('0' + m1)});
      if (pb[m] <= kBranchEpsilon || f.other_qubits.empty()) continue;
      StateVector post = project_qubit(project_qubit(f.state, f.message_qubit, m0), f.sender_qubit, m1);
      cond[m] = reduced_density_matrix(post, f.other_qubits);
    }
    rep.bell_probabilities.push_back(pb);
    rep.conditioned_states.push_back(std::move(cond));
  }

  const std::size_t k = messages.size();
  rep.trace_distances.assign(k, std::vector<double>(k, 0.0));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      const double d = trace_distance(rep.adversary_states[a], rep.adversary_states[b]);
      rep.trace_distances[a][b] = rep.trace_distances[b][a] = d;
      rep.max_trace_distance = std::max(rep.max_trace_distance, d);
      rep.max_joint_tv = std::max(rep.max_joint_tv, tv_distance(rep.joint_outcomes[a], rep.joint_outcomes[b]));
      for (int m = 0; m < 4; ++m) {
        const auto& ca = rep.conditioned_states[a][m];
        const auto& cb = rep.conditioned_states[b][m];
        if (ca && cb)
          rep.max_conditioned_trace_distance = std::max(rep.max_conditioned_trace_distance, trace_distance(*ca, *cb));
      }
    }
  }
  return rep;
}

}  // namespace qanon
