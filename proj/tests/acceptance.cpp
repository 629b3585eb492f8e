// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qanon/qanon.hpp"

using namespace qanon;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

const AdversaryStrategy kHonest = AdversaryStrategy::honest();

std::pair<Complex, Complex> random_message(RandomStream& rng) {
  Complex a(rng.normal(), rng.normal()), b(rng.normal(), rng.normal());
  const double norm = std::sqrt(std::norm(a) + std::norm(b));
  return {a / norm, b / norm};
}

bool within_sigma(double count, double trials, double p, double sigmas) {
  return std::abs(count - trials * p) <= sigmas * std::sqrt(trials * p * (1 - p));
}

// 1
Outcome bit_transmission() {
  Outcome o;
  long runs = 0;
  for (int n = 3; n <= 8; ++n)
    for (int s = 0; s < n; ++s)
      for (int m = 0; m < 2; ++m) {
        const TrustedSource source(n);
        for (int t = 0; t < 1000; ++t) {
          RandomStream rng(1000003ull * n + 1009ull * s + 2ull * t + m);
          const auto run = run_bit_transmission(m, AgentId(s), source, kHonest, rng);
          ++runs;
          if (run.result.m_decoded != m) o.fail(fmt("n=%g sender=%g m=%g decoded wrong", n, s, m));
        }
      }
  if (o.pass) o.detail = std::to_string(runs) + " runs, every decoded bit equals the sent bit";
  return o;
}

// 2
Outcome collision_law() {
  Outcome o;
  for (int n = 3; n <= 6; ++n)
    for (int k = 0; k <= n; ++k) {
      const auto lists = multi_sender_lists(n, k);
      for (const auto& ordering : generate_orderings(n)) {
        const Distribution sums = enumerate_branches([&](OutcomeSource& src) {
          Transcript t;
          std::vector<LocalRecord> local;
          int z = 0;
          for (int b : collision_round(lists, ordering, 0, TrustedSource(n), kHonest, src, t, local)) z += b;
          return std::to_string(z);
        });
        for (const auto& [key, p] : sums) {
          const int z = std::stoi(key);
          const bool ok = k == 0 ? z == 1 : (z == k - 1 || z == k + 1);
          if (!ok) o.fail(fmt("n=%g k=%g produced sum %g", n, k, z));
        }
        if (std::abs(sums.total() - 1.0) > 1e-12) o.fail(fmt("n=%g k=%g enumeration mass %g", n, k, sums.total()));
      }
    }

  const int n = 5, trials = 10000;
  const auto lists = build_private_lists(n, AgentId(2), AgentId(4));
  int passed = 0;
  for (int t = 0; t < trials; ++t) {
    RandomStream rng(500000 + t);
    passed += run_collision_detection(lists, TrustedSource(n), kHonest, rng).result.passed;
  }
  const double stated = 1.0 - std::pow(1.0 - 1.0 / n, n);
  const double exact = honest_collision_pass_probability(n);
  const double rate = double(passed) / trials;
  if (!within_sigma(passed, trials, stated, 3)) o.fail(fmt("pass rate %.5f outside 3 sigma of %.5f", rate, stated));
  if (!within_sigma(passed, trials, exact, 3)) o.fail(fmt("pass rate %.5f outside 3 sigma of exact %.5f", rate, exact));
  if (o.pass)
    o.detail = fmt("sums exact for n<=6, k=0..n; n=5 pass rate %.4f vs 1-(1-1/n)^n=%.5f (exact %.5f), 3 sigma=%.4f", rate,
                   stated, exact, 3 * std::sqrt(exact * (1 - exact) / trials));
  return o;
}

// 3
Outcome notification() {
  Outcome o;
  long runs = 0;
  for (int n = 3; n <= 6; ++n)
    for (int s = 0; s < n; ++s)
      for (int r = 0; r < n; ++r) {
        if (s == r) continue;
        const auto lists = build_private_lists(n, AgentId(s), AgentId(r));
        for (int t = 0; t < 1000; ++t) {
          RandomStream rng(7000000ull + 100000ull * n + 1000ull * (s * n + r) + t);
          const auto run = run_notification(lists, TrustedSource(n), kHonest, rng);
          ++runs;
          for (int i = 0; i < n; ++i)
            if ((run.result.parity[i] == 0) != (i == r)) o.fail(fmt("n=%g s=%g r=%g: agent %g parity wrong", n, s, r, i));
        }
      }
  if (o.pass) o.detail = std::to_string(runs) + " runs, only the receiver computed even parity";
  return o;
}

// 4
Outcome entanglement() {
  Outcome o;
  const StateVector epr = StateVector::from_amplitudes({0, 1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 0});
  std::string rates;
  for (int n = 3; n <= 8; ++n) {
    std::vector<int> b(n, 1);
    b[0] = b[n - 1] = 0;
    const int trials = 10000;
    int hits = 0;
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
      RandomStream rng(9000000ull + 100000ull * n + t);
      const auto run = run_anonymous_entanglement(b, TrustedSource(n), kHonest, rng);
      if (!run.result.established) continue;
      ++hits;
      worst = std::max(worst, std::abs(1.0 - fidelity_pure(run.result.residual, epr)));
    }
    if (!within_sigma(hits, trials, 2.0 / n, 3)) o.fail(fmt("n=%g success rate %.4f vs %.4f", n, double(hits) / trials, 2.0 / n));
    if (worst > 1e-12) o.fail(fmt("n=%g pair fidelity off by %g", n, worst));
    rates += fmt(" %.3f", double(hits) / trials);
  }
  if (o.pass) o.detail = "success rates n=3..8:" + rates + " (2/n within 3 sigma); pair fidelity 1 within 1e-12";
  return o;
}

// 5
Outcome end_to_end() {
  Outcome o;
  int completed = 0, total = 0;
  double worst = 0.0;
  for (int n = 3; n <= 6; ++n) {
    RandomStream msgs(31337 + n);
    int per_n = 0;
    for (int t = 0; t < 100; ++t) {
      Scenario sc;
      sc.n = n;
      sc.intents = {{AgentId(t % n), AgentId((t % n + 1 + t / n % (n - 1)) % n)}};
      std::tie(sc.alpha, sc.beta) = random_message(msgs);
      sc.seed = 1000ull * n + t;
      const auto r = run_anonymous_communication(sc);
      ++total;
      if (r.status != RunStatus::Completed) continue;
      ++completed;
      ++per_n;
      worst = std::max(worst, std::abs(1.0 - r.teleport->fidelity));
    }
    if (per_n == 0) o.fail(fmt("n=%g: no run completed", n));
  }
  if (worst > 1e-12) o.fail(fmt("fidelity off by %g", worst));
  if (o.pass) o.detail = fmt("%g of %g runs completed, max |1-F| = %.2e", completed, total, worst);
  return o;
}

// 6
Outcome anonymity() {
  Outcome o;
  double worst_note = 0.0, worst_ent = 0.0, worst_post = 0.0;
  int sets = 0;
  std::string mi;
  for (int n = 3; n <= 5; ++n) {
    for (int mask = 0; mask < (1 << n); ++mask) {
      std::vector<AgentId> corrupted;
      for (int i = 0; i < n; ++i)
        if (mask >> i & 1) corrupted.emplace_back(i);
      if (static_cast<int>(corrupted.size()) > n - 2) continue;
      ++sets;
      const AdversaryStrategy adv(corrupted.empty() ? Behavior::Honest : Behavior::PassiveRecord, corrupted);
      const auto note = leakage_report(ProtocolTag::Notification, n, adv);
      worst_note = std::max(worst_note, note.max_tv);
      LeakageOptions success;
      success.condition_on_success = true;
      const auto ent = leakage_report(ProtocolTag::Entanglement, n, adv, success);
      worst_ent = std::max(worst_ent, ent.max_tv);
      for (std::size_t m = 1; m < ent.distributions.size(); ++m)
        if (ent.distributions[m].segments[0] != ent.distributions[0].segments[0])
          worst_ent = std::max(worst_ent, tv_distance(ent.distributions[m], ent.distributions[0]));
    }

    LeakageOptions single;
    single.first_segment_only = true;
    const auto col = leakage_report(ProtocolTag::Collision, n, kHonest, single);
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        std::string view(n, '0');
        view[a] = view[b] = '1';
        const auto post = sender_posterior(col.distributions, view);
        for (int s = 0; s < n; ++s) worst_post = std::max(worst_post, std::abs(post[s] - ((s == a || s == b) ? 0.5 : 0.0)));
      }
    mi += fmt(" n=%g:%.4f", n, leakage_report(ProtocolTag::Collision, n, kHonest).mutual_information_bits);
  }
  if (worst_note >= 1e-12) o.fail(fmt("notification TV %g", worst_note));
  if (worst_ent >= 1e-12) o.fail(fmt("success-conditioned entanglement TV %g", worst_ent));
  if (worst_post > 1e-12) o.fail(fmt("collision posterior off by %g", worst_post));
  if (o.pass)
    o.detail = fmt("%g corrupted sets; max notification TV %.1e, conditioned entanglement TV %.1e, posterior error %.1e;",
                   sets, worst_note, worst_ent, worst_post) +
               " collision all-orderings MI (bits, reported only):" + mi;
  return o;
}

// 7
Outcome privacy() {
  Outcome o;
  RandomStream rng(77);
  const double r = 1 / std::sqrt(2.0);
  std::vector<std::pair<Complex, Complex>> msgs{{1, 0}, {0, 1}, {r, r}, {r, Complex(0, r)}};
  for (int i = 0; i < 20; ++i) msgs.push_back(random_message(rng));

  const auto rep = privacy_report(3, AgentId(0), AgentId(1), {AgentId(2)}, msgs);
  const auto target = DensityMatrix::diagonal({2.0 / 3, 1.0 / 3});
  double worst_rho = 0.0, worst_p00 = 0.0, worst_oracle = 0.0;
  for (std::size_t m = 0; m < msgs.size(); ++m) {
    worst_rho = std::max(worst_rho, trace_distance(rep.adversary_states[m], target));
    const auto amps = oracle::phi1(msgs[m].first, msgs[m].second);
    double p00 = 0.0;
    for (int i = 0; i < 4; ++i) p00 += std::norm(amps[i]);
    worst_oracle = std::max(worst_oracle, std::abs(rep.bell_probabilities[m][0] - p00));
    worst_p00 = std::max(worst_p00, std::abs(rep.bell_probabilities[m][0] - (1 + std::norm(msgs[m].first)) / 6));
  }
  if (worst_rho >= 1e-12) o.fail(fmt("n=3 adversary state off diag(2/3,1/3) by %g", worst_rho));
  if (rep.max_trace_distance >= 1e-12) o.fail(fmt("n=3 pairwise trace distance %g", rep.max_trace_distance));
  if (worst_oracle > 1e-12 || worst_p00 > 1e-12) o.fail(fmt("P(00) off by %g / %g", worst_oracle, worst_p00));

  double worst_general = 0.0;
  int configs = 0;
  for (int n = 4; n <= 5; ++n)
    for (int mask = 1; mask < (1 << (n - 2)); ++mask) {
      std::vector<AgentId> skippers;
      for (int i = 0; i < n - 2; ++i)
        if (mask >> i & 1) skippers.emplace_back(i + 2);
      const auto g = privacy_report(n, AgentId(0), AgentId(1), skippers, msgs);
      worst_general = std::max(worst_general, g.max_trace_distance);
      ++configs;
    }
  if (worst_general >= 1e-12) o.fail(fmt("n=4,5 trace distance %g", worst_general));
  if (o.pass)
    o.detail = fmt("%g messages; n=3 state error %.1e, P(00) error %.1e; n=4,5 over %g skipper sets max trace distance %.1e",
                   double(msgs.size()), worst_rho, std::max(worst_oracle, worst_p00), configs) +
               fmt("; joint (m0,m1,adversary) TV across messages %.3f (reported only)", rep.max_joint_tv);
  return o;
}

// 8
struct SampledCase {
  std::string label;
  ProtocolScenario scenario;
};

std::string sample_view(const ProtocolScenario& sc, RandomStream& rng) {
  const TrustedSource source(sc.n);
  Transcript t;
  std::vector<LocalRecord> local;
  switch (sc.protocol) {
    case ProtocolTag::Collision: {
      auto run = run_collision_detection(sc.lists, source, sc.adversary, rng);
      t = std::move(run.transcript);
      local = std::move(run.local);
      break;
    }
    case ProtocolTag::Notification: {
      auto run = run_notification(sc.lists, source, sc.adversary, rng);
      t = std::move(run.transcript);
      local = std::move(run.local);
      break;
    }
    case ProtocolTag::Entanglement: {
      auto run = run_anonymous_entanglement(sc.b, source, sc.adversary, rng);
      t = std::move(run.transcript);
      local = std::move(run.local);
      break;
    }
    case ProtocolTag::BitTransmission: {
      auto run = run_bit_transmission(sc.message_bit, sc.sender, source, sc.adversary, rng);
      t = std::move(run.transcript);
      local = std::move(run.local);
      break;
    }
  }
  const auto keys = segment_view_keys(t, local, sc.adversary);
  return join_view_keys(keys);
}

// Per-cell 4 sigma check; unseen support cells must have zero probability.
void check_cells(const Distribution& exact, const std::map<std::string, long>& counts, long trials,
                 const std::string& label, Outcome& o, int& cells) {
  for (const auto& [k, c] : counts)
    if (exact.probability(k) <= 0.0) o.fail(label + ": sampled a view of probability 0: " + k);
  for (const auto& [k, p] : exact) {
    ++cells;
    const auto it = counts.find(k);
    const double c = it == counts.end() ? 0.0 : double(it->second);
    if (!within_sigma(c, double(trials), p, 4)) o.fail(label + ": view " + k + fmt(" count %g expected %.1f", c, trials * p));
  }
}

Outcome enumeration_vs_sampling() {
  Outcome o;
  std::vector<SampledCase> cases;
  TamperRule random_flip;
  random_flip.kind = TamperRule::Kind::RandomFlip;
  random_flip.flip_probability = 0.3;
  for (int n = 3; n <= 4; ++n) {
    const AgentId s(1), r(n - 1);
    for (auto tag : {ProtocolTag::Collision, ProtocolTag::Notification, ProtocolTag::Entanglement})
      cases.push_back({std::string(to_string(tag)) + " n=" + std::to_string(n), honest_protocol_scenario(tag, n, s, r)});
    cases.push_back({"bit_transmission m=1 n=" + std::to_string(n),
                     honest_protocol_scenario(ProtocolTag::BitTransmission, n, s, r, 1)});
    cases.push_back({"entanglement skip n=" + std::to_string(n),
                     honest_protocol_scenario(ProtocolTag::Entanglement, n, s, r, 0,
                                              AdversaryStrategy(Behavior::SkipMeasurement, {AgentId(0)}))});
    cases.push_back({"bit_transmission random_flip n=" + std::to_string(n),
                     honest_protocol_scenario(ProtocolTag::BitTransmission, n, s, r, 1,
                                              AdversaryStrategy(Behavior::TamperBroadcast, {AgentId(0)}, random_flip))});
    cases.push_back({"collision passive n=" + std::to_string(n),
                     honest_protocol_scenario(ProtocolTag::Collision, n, s, r, 0,
                                              AdversaryStrategy(Behavior::PassiveRecord, {AgentId(0)}))});
  }

  const long trials = 100000;
  int cells = 0, joint = 0, marginal = 0;
  std::uint64_t base = 123456789;
  for (const auto& c : cases) {
    const TranscriptDistribution exact = transcript_distribution(c.scenario);
    for (const auto& seg : exact.segments)
      if (std::abs(seg.total() - 1.0) > 1e-12) o.fail(c.label + ": enumeration mass off");

    std::map<std::string, long> joint_counts;
    std::vector<std::map<std::string, long>> round_counts(exact.segments.size());
    for (long t = 0; t < trials; ++t) {
      RandomStream rng(base + t);
      const std::string view = sample_view(c.scenario, rng);
      ++joint_counts[view];
      std::size_t start = 0;
      for (std::size_t s = 0; s < exact.segments.size(); ++s) {
        const std::size_t end = view.find('|', start);
        ++round_counts[s][view.substr(start, end == std::string::npos ? std::string::npos : end - start)];
        start = end + 1;
      }
    }
    base += trials;

    if (exact.support_size() <= 1024) {
      ++joint;
      check_cells(exact.materialize(), joint_counts, trials, c.label, o, cells);
    } else {
      ++marginal;
      for (std::size_t s = 0; s < exact.segments.size(); ++s)
        check_cells(exact.segments[s], round_counts[s], trials, c.label + " round " + std::to_string(s), o, cells);
    }
  }
  if (o.pass)
    o.detail = fmt("%g scenarios x 1e5 runs; %g cells within 4 sigma (%g joint, %g per-round marginal)",
                   double(cases.size()), cells, joint, marginal);
  return o;
}

// 9
Outcome determinism() {
  Outcome o;
  const char* run_cfg = R"({"n": 5, "sender": 3, "receiver": 0,
    "message": {"alpha": [0.6, 0], "beta": [0, 0.8]},
    "adversary": {"behavior": "tamper", "corrupted": [1], "rule": {"kind": "random_flip", "flip_probability": 0.2}},
    "seed": 18446744073709551000, "trials": 200, "retry_budget": 3})";
  const char* analyze_cfg = R"({"n": 4, "sender": 0, "receiver": 2, "adversary": {"behavior": "skip_measurement",
    "corrupted": [3]}, "seed": 5, "mode": "analyze"})";
  const char* sweep_cfg = R"({"n": 3, "sender": 0, "receiver": 1, "seed": 9, "trials": 300, "sweep": {"n": [3, 4, 5]}})";

  int reports = 0;
  auto same = [&](const std::string& label, const std::function<Json()>& make) {
    ++reports;
    if (make().dump(2) != make().dump(2)) o.fail(label + " report bytes differ");
  };
  same("run", [&] { return run_scenario(parse_scenario_text(run_cfg)); });
  same("run verbose", [&] { return run_scenario(parse_scenario_text(run_cfg), true); });
  same("analyze", [&] {
    auto c = parse_scenario_text(analyze_cfg);
    return analyze_scenario(c);
  });
  same("sweep n", [&] { return sweep(parse_scenario_text(sweep_cfg), SweepAxis::N); });
  same("sweep corrupted-set", [&] {
    auto c = parse_scenario_text(sweep_cfg);
    c.n = 4;
    return sweep(c, SweepAxis::CorruptedSet);
  });
  same("sweep message", [&] { return sweep(parse_scenario_text(sweep_cfg), SweepAxis::Message); });
  if (o.pass) o.detail = fmt("%g report kinds regenerated byte-for-byte", reports);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"bit transmission determinism", bit_transmission},
      {"collision-sum law and pass rate", collision_law},
      {"notification correctness", notification},
      {"anonymous entanglement", entanglement},
      {"end-to-end teleportation fidelity", end_to_end},
      {"exact anonymity", anonymity},
      {"privacy of the message", privacy},
      {"enumeration vs sampling", enumeration_vs_sampling},
      {"report determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
    failed += !o.pass;
    std::printf("%s %zu %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(),
                dt.count());
    std::fflush(stdout);
  }
  return failed;
}
