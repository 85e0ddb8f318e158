#pragma once

#include <cstdint>
#include <vector>

#include "ew/model.hpp"

namespace ew {

// Euclidean projection onto { p >= 0, sum(p) <= budget }.  If clipping at
// zero already satisfies the budget that clip is the projection; otherwise
// project onto the simplex face sum(p) = budget by the sorted-threshold rule.
std::vector<double> project_budget_box(std::vector<double> p, double budget);

struct OracleResult {
    Allocation allocation;
    double objective = 0.0;  // slaq_utility of the best iterate
    // Best objective sampled every `iterations/100` steps (plus the last);
    // nondecreasing by construction.
    std::vector<double> best_objective_checkpoints;
};

// Reference maximizer of slaq_utility over the feasible box, independent of
// the dual machinery: projected supergradient ascent with step c/sqrt(k),
// c = P0/n, from a seeded random interior point.  Ties at the k-th smallest
// rate (relative tolerance 1e-9) share supergradient weight evenly.  Keeps
// the best iterate seen.  Intended for small instances; cost is O(n) per
// iteration.
OracleResult oracle_primal_ascent(const Scenario& scenario, std::uint64_t iterations,
                                  std::uint64_t seed);

// Exhaustive grid scan of the budget face, n <= 3 only.  The simplex
// { sum(p) = P0 } is swept with the given step in each free coordinate.
OracleResult oracle_grid(const Scenario& scenario, double step);

}  // namespace ew
