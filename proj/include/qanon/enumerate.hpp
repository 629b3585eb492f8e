// Exact enumeration of every outcome branch of a randomized computation.
//
// The computation is any deterministic function of an OutcomeSource. A
// BranchCursor replays a forced prefix of choices, takes the first feasible
// outcome beyond it and remembers the alternatives; depth-first search over
// those alternatives visits every leaf exactly once, weighted by the product
// of the probabilities of the choices along its path.
#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qanon/distribution.hpp"
#include "qanon/errors.hpp"
#include "qanon/random.hpp"

namespace qanon {

/// Choices with probability at or below this are treated as impossible.
inline constexpr double kBranchEpsilon = 1e-14;

class BranchCursor final : public OutcomeSource {
 public:
  explicit BranchCursor(std::vector<int> forced) : forced_(std::move(forced)) {}

  int draw(double p_one) override {
    const double p0 = 1.0 - p_one;
    int choice;
    if (taken_.size() < forced_.size()) {
      choice = forced_[taken_.size()];
    } else {
      choice = p0 > kBranchEpsilon ? 0 : 1;
      if (choice == 0 && p_one > kBranchEpsilon) {
        std::vector<int> alt = taken_;
        alt.push_back(1);
        alternatives_.push_back(std::move(alt));
      }
    }
    weight_ *= choice ? p_one : p0;
    taken_.push_back(choice);
    return choice;
  }

  double weight() const noexcept { return weight_; }
  std::vector<std::vector<int>>& alternatives() noexcept { return alternatives_; }

 private:
  std::vector<int> forced_;
  std::vector<int> taken_;
  std::vector<std::vector<int>> alternatives_;
  double weight_ = 1.0;
};

/// Exact distribution of `run`'s returned key. Throws ResourceError past
/// `leaf_budget` leaves.
inline Distribution enumerate_branches(const std::function<std::string(OutcomeSource&)>& run,
                                       std::size_t leaf_budget = std::size_t{1} << 20) {
  Distribution dist;
  std::vector<std::vector<int>> pending{{}};
  std::size_t leaves = 0;
  while (!pending.empty()) {
    BranchCursor cursor(std::move(pending.back()));
    pending.pop_back();
    std::string key = run(cursor);
    if (++leaves > leaf_budget) throw ResourceError("branch enumeration exceeded its leaf budget");
    if (cursor.weight() > 0.0) dist.add(key, cursor.weight());
    for (auto& alt : cursor.alternatives()) pending.push_back(std::move(alt));
  }
  return dist;
}

}  // namespace qanon
