// Finite probability distributions keyed by outcome strings.
#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qanon {

/// Sparse distribution over string-labelled outcomes (bitstrings, transcript
/// views). Keys are kept sorted so iteration order and serialization are
/// deterministic.
class Distribution {
 public:
  using Map = std::map<std::string, double>;

  Distribution() = default;
  explicit Distribution(Map probs) : probs_(std::move(probs)) {}

  void add(const std::string& key, double p) { probs_[key] += p; }

  double probability(const std::string& key) const {
    auto it = probs_.find(key);
    return it == probs_.end() ? 0.0 : it->second;
  }

  double total() const {
    double sum = 0.0;
    for (const auto& [_, p] : probs_) sum += p;
    return sum;
  }

  std::size_t size() const noexcept { return probs_.size(); }
  bool empty() const noexcept { return probs_.empty(); }
  auto begin() const { return probs_.begin(); }
  auto end() const { return probs_.end(); }
  const Map& map() const noexcept { return probs_; }

  /// Restricts to keys satisfying `keep` and renormalizes. Throws
  /// std::domain_error when the event has probability zero.
  Distribution conditioned(const std::function<bool(const std::string&)>& keep) const {
    Map out;
    double mass = 0.0;
    for (const auto& [k, p] : probs_) {
      if (keep(k)) {
        out.emplace(k, p);
        mass += p;
      }
    }
    if (mass <= 0.0) throw std::domain_error("conditioning on a zero-probability event");
    for (auto& [_, p] : out) p /= mass;
    return Distribution(std::move(out));
  }

  /// Pushes the distribution forward through `f`.
  Distribution mapped(const std::function<std::string(const std::string&)>& f) const {
    Distribution out;
    for (const auto& [k, p] : probs_) out.add(f(k), p);
    return out;
  }

  /// Drops entries with probability at or below `eps`.
  Distribution pruned(double eps = 0.0) const {
    Map out;
    for (const auto& [k, p] : probs_)
      if (p > eps) out.emplace(k, p);
    return Distribution(std::move(out));
  }

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  Map probs_;
};

/// Length shared by every key, or -1 when keys differ in length.
inline long key_width(const Distribution& d) {
  long width = -2;
  for (const auto& [k, _] : d) {
    const long w = static_cast<long>(k.size());
    if (width == -2) width = w;
    else if (width != w) return -1;
  }
  return width == -2 ? 0 : width;
}

/// Half the L1 distance. Both distributions must live on the same outcome
/// space (equal key widths).
inline double tv_distance(const Distribution& a, const Distribution& b) {
  const long wa = key_width(a), wb = key_width(b);
  if (wa < 0 || wb < 0 || (wa != wb && !a.empty() && !b.empty()))
    throw std::invalid_argument("tv_distance: distributions over different outcome spaces");
  double sum = 0.0;
  auto ia = a.begin(), ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      sum += std::abs(ia->second);
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      sum += std::abs(ib->second);
      ++ib;
    } else {
      sum += std::abs(ia->second - ib->second);
      ++ia;
      ++ib;
    }
  }
  return 0.5 * sum;
}

}  // namespace qanon
