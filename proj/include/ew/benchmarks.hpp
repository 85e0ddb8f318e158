#pragma once

#include "ew/model.hpp"

namespace ew {

// Exact classical waterfilling level: with variances sorted ascending, the
// level is w_k = (P0 + sum_{j<=k} s_j) / k for the unique k whose active set
// is consistent, found by a single sorted scan.  No bisection, no tolerance.
double waterfilling_level(const Scenario& scenario);

// Sum-rate maximizer p_i = max(w - s_i, 0).
Allocation classical_waterfilling(const Scenario& scenario);

// Proportional fairness: maximize sum_i log(rate_i) subject to the budget.
// Solved by bisection on the common marginal value
//   h_i(p) = 1 / ((s_i + p) * rate_i(p)),
// which is strictly decreasing in p, with a monotone inner bisection per
// terminal.  Every terminal gets strictly positive power (log-rate pulls the
// marginal value to infinity at p = 0).  Postconditions checked at `tol`:
// the budget is met and interior terminals share a common h_i.
Allocation proportional_fairness(const Scenario& scenario, double tol = 1e-10);

}  // namespace ew
