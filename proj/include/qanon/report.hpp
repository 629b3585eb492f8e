// JSON encoders for results and reports. Field order is fixed (ordered_json)
// and doubles are printed in shortest round-trip form, so identical inputs
// give identical bytes.
#pragma once

#include <nlohmann/json.hpp>

#include <string>

#include "qanon/adversary.hpp"
#include "qanon/analysis.hpp"
#include "qanon/protocols.hpp"
#include "qanon/qsim.hpp"

namespace qanon {

using Json = nlohmann::ordered_json;

inline Json complex_json(Complex c) { return Json::array({c.real(), c.imag()}); }

/// Row-major matrix of (re, im) pairs.
inline Json density_matrix_json(const DensityMatrix& rho) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < rho.dim(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < rho.dim(); ++j) row.push_back(complex_json(rho(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

/// (outcome, probability) pairs in key order.
inline Json distribution_json(const Distribution& d) {
  Json out = Json::array();
  for (const auto& [k, p] : d) out.push_back(Json::array({k, p}));
  return out;
}

inline Json bit_result_json(const BitResult& r) {
  Json j;
  j["sent"] = r.m_sent;
  j["k"] = r.k;
  j["decoded"] = r.m_decoded;
  return j;
}

inline Json full_run_json(const FullRunResult& r, bool verbose) {
  Json j;
  j["status"] = to_string(r.status);
  j["abort_step"] = abort_step(r.status);

  Json& col = j["collision"];
  col["sums"] = r.collision.sums;
  col["passed"] = r.collision.passed;

  if (r.notification) {
    Json& note = j["notification"];
    note["parities"] = r.notification->parity;
    note["b"] = r.notification->b;
    if (verbose) note["masks"] = r.notification->masks;
  }

  if (!r.entanglement.empty()) {
    Json& ent = j["entanglement"] = Json::array();
    for (std::size_t a = 0; a < r.entanglement.size(); ++a) {
      const auto& e = r.entanglement[a];
      Json rec;
      rec["attempt"] = a;
      rec["announced"] = e.announced;
      rec["Z"] = e.total;
      rec["established"] = e.established;
      ent.push_back(std::move(rec));
    }
  }

  if (r.m0_bit) j["bit_m0"] = bit_result_json(*r.m0_bit);
  if (r.m1_bit) j["bit_m1"] = bit_result_json(*r.m1_bit);

  if (r.teleport) {
    Json& tp = j["teleport"];
    tp["m0"] = r.teleport->m0;
    tp["m1"] = r.teleport->m1;
    tp["correction"] = to_string(r.teleport->correction);
    tp["fidelity"] = r.teleport->fidelity;
  }

  j["transcript"] = transcript_to_json(r.transcript, verbose)["entries"];
  return j;
}

inline Json leakage_json(const LeakageReport& rep, bool include_distributions = true) {
  Json j;
  j["protocol"] = to_string(rep.protocol);
  j["n"] = rep.n;
  Json corrupted = Json::array();
  for (AgentId a : rep.corrupted) corrupted.push_back(a.value);
  j["corrupted"] = corrupted;
  Json labels = Json::array();
  for (const auto& a : rep.assignments) labels.push_back(a.label());
  j["assignments"] = labels;
  j["max_tv"] = rep.max_tv;
  j["tv"] = rep.tv;
  j["mutual_information_bits"] = rep.mutual_information_bits;
  if (include_distributions && !rep.posteriors.empty()) {
    Json dists = Json::array();
    for (std::size_t m = 0; m < rep.distributions.size(); ++m)
      dists.push_back(Json::array({labels[m], distribution_json(rep.distributions[m].materialize())}));
    j["distributions"] = std::move(dists);
  }
  Json post = Json::array();
  for (const auto& [view, p] : rep.posteriors) post.push_back(Json::array({view, p}));
  j["posteriors"] = std::move(post);
  return j;
}

inline Json privacy_json(const PrivacyReport& rep) {
  Json j;
  j["n"] = rep.n;
  j["sender"] = rep.sender.value;
  j["receiver"] = rep.receiver.value;
  Json skippers = Json::array();
  for (AgentId a : rep.skippers) skippers.push_back(a.value);
  j["skippers"] = skippers;
  j["establishment_probability"] = rep.establishment_probability;
  j["max_trace_distance"] = rep.max_trace_distance;
  j["max_conditioned_trace_distance"] = rep.max_conditioned_trace_distance;
  j["max_joint_tv"] = rep.max_joint_tv;
  j["trace_distances"] = rep.trace_distances;

  Json per = Json::array();
  for (std::size_t m = 0; m < rep.messages.size(); ++m) {
    Json e;
    e["message"] = Json::array({complex_json(rep.messages[m].first), complex_json(rep.messages[m].second)});
    e["adversary_state"] = density_matrix_json(rep.adversary_states[m]);
    e["bell_probabilities"] = Json::array();
    for (int b = 0; b < 4; ++b) {
      const std::string label{char('0' + (b >> 1)), char('0' + (b & 1))};
      e["bell_probabilities"].push_back(Json::array({label, rep.bell_probabilities[m][b]}));
    }
    e["joint_outcomes"] = distribution_json(rep.joint_outcomes[m]);
    per.push_back(std::move(e));
  }
  j["messages"] = std::move(per);
  return j;
}

}  // namespace qanon
