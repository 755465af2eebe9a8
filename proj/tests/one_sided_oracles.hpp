#pragma once

#include <optional>
#include <vector>

#include "qsc/feasibility.hpp"
#include "qsc/one_sided.hpp"

namespace qsc::testing {

// Feasibility of a full rank vector, straight from the LP.
inline bool ranks_feasible(const OneSidedInstance& inst, const std::vector<int>& r) {
  FeasibilityProblem p = inst.feasibility();
  for (int i = 0; i < inst.size(); ++i) p.set_rank_requirement(Side::Rows, i, r[static_cast<std::size_t>(i)]);
  return lp_feasible(p).has_value();
}

// Advances r through [1, cap_i]^n in lexicographic order (agent 0 most
// significant); false after the last vector.
inline bool next_rank_vector(std::vector<int>& r, const std::vector<int>& cap) {
  for (int k = static_cast<int>(r.size()) - 1; k >= 0; --k) {
    if (++r[static_cast<std::size_t>(k)] <= cap[static_cast<std::size_t>(k)]) return true;
    r[static_cast<std::size_t>(k)] = 1;
  }
  return false;
}

// Lexicographically smallest feasible rank vector within the caps.
inline std::vector<int> lex_min_ranks(const OneSidedInstance& inst, const std::vector<int>& cap) {
  std::vector<int> r(cap.size(), 1);
  do {
    if (ranks_feasible(inst, r)) return r;
  } while (next_rank_vector(r, cap));
  return {};
}

// Some feasible rank vector within the caps weakly below `current`
// everywhere and strictly somewhere.
inline bool dominated_within(const OneSidedInstance& inst, const std::vector<int>& current, const std::vector<int>& cap) {
  std::vector<int> r(cap.size(), 1);
  do {
    bool within = true;
    bool strict = false;
    for (std::size_t i = 0; i < r.size(); ++i) {
      within = within && r[i] <= current[i];
      strict = strict || r[i] < current[i];
    }
    if (within && strict && ranks_feasible(inst, r)) return true;
  } while (next_rank_vector(r, cap));
  return false;
}

}  // namespace qsc::testing
