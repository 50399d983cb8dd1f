#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "teachkit/concept_class.hpp"
#include "teachkit/errors.hpp"

namespace teachkit {

struct TeachingSetResult {
  std::size_t concept_index = 0;
  Sample witness;
  std::size_t size() const { return witness.size(); }
};

// True iff cc[i] is the unique concept consistent with the sample.
inline bool verify_teaching_set(const ConceptClass& cc, std::size_t i,
                                const Sample& sample) {
  if (sample.instances() & ~full_mask(cc.domain_size()))
    throw DimensionMismatch("sample mentions instances outside the domain");
  if (!sample.consistent_with(cc.mask(i))) return false;
  for (std::size_t j = 0; j < cc.size(); ++j)
    if (j != i && sample.consistent_with(cc.mask(j))) return false;
  return true;
}

namespace detail {

// Minimum hitting set over the difference masks, exact branch-and-bound.
// Branches on the most-constrained remaining difference set (fewest
// instances; ties by lowest concept index, which is the order the sets were
// collected in), instances tried in ascending order. Greedy cover supplies
// the initial upper bound.
class HittingSetSolver {
 public:
  explicit HittingSetSolver(std::vector<Mask> diffs) : diffs_(std::move(diffs)) {}

  Mask solve() {
    Mask greedy = greedy_cover();
    best_size_ = popcount(greedy);
    best_ = greedy;
    descend(0, 0);
    return best_;
  }

 private:
  Mask greedy_cover() const {
    Mask chosen = 0;
    std::vector<Mask> open = diffs_;
    while (true) {
      Mask remaining = 0;
      for (Mask d : open)
        if ((d & chosen) == 0) remaining |= d;
      if (remaining == 0) break;
      int best_hits = -1;
      std::size_t best_instance = 0;
      for (Mask rest = remaining; rest;) {
        std::size_t i = static_cast<std::size_t>(std::countr_zero(rest));
        rest &= rest - 1;
        int hits = 0;
        for (Mask d : open)
          if ((d & chosen) == 0 && ((d >> i) & 1)) ++hits;
        if (hits > best_hits) {
          best_hits = hits;
          best_instance = i;
        }
      }
      chosen |= Mask{1} << best_instance;
    }
    return chosen;
  }

  void descend(Mask chosen, int chosen_size) {
    if (chosen_size >= best_size_) return;
    const Mask* branch = nullptr;
    int branch_size = 0;
    for (const Mask& d : diffs_) {
      if (d & chosen) continue;
      int s = popcount(d);
      if (!branch || s < branch_size) {
        branch = &d;
        branch_size = s;
      }
    }
    if (!branch) {
      best_size_ = chosen_size;
      best_ = chosen;
      return;
    }
    for (Mask rest = *branch; rest;) {
      Mask bit = rest & (0 - rest);
      rest &= rest - 1;
      descend(chosen | bit, chosen_size + 1);
    }
  }

  std::vector<Mask> diffs_;
  int best_size_ = 0;
  Mask best_ = 0;
};

}  // namespace detail

// Smallest teaching set for concept i: hit, for every rival j, at least one
// instance where the two concepts disagree. With positive_only, only
// instances of C_i may be used, so rivals containing C_i are unbeatable.
inline TeachingSetResult td_concept(const ConceptClass& cc, std::size_t i,
                                    bool positive_only = false) {
  Mask ci = cc.mask(i);
  std::vector<Mask> diffs;
  diffs.reserve(cc.size() - 1);
  for (std::size_t j = 0; j < cc.size(); ++j) {
    if (j == i) continue;
    Mask d = ci ^ cc.mask(j);
    if (positive_only) {
      d &= ci;
      if (d == 0)
        throw NoPositiveTeachingSet(
            "concept " + std::to_string(i) +
            " has no positive teaching set: some rival contains it");
    }
    diffs.push_back(d);
  }
  Mask hit = diffs.empty() ? Mask{0} : detail::HittingSetSolver(std::move(diffs)).solve();
  return TeachingSetResult{i, Sample::restriction(ci, hit)};
}

inline std::size_t td(const ConceptClass& cc, bool positive_only = false) {
  std::size_t worst = 0;
  for (std::size_t i = 0; i < cc.size(); ++i)
    worst = std::max(worst, td_concept(cc, i, positive_only).size());
  return worst;
}

}  // namespace teachkit
