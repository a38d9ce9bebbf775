#pragma once

#include <iosfwd>
#include <string_view>
#include <vector>

#include "soco/model.hpp"

namespace soco {

enum class OfflineMethod { kStatic, kPwlDp, kGridDp, kBruteForce };

std::string_view to_string(OfflineMethod method);

/// An offline benchmark schedule.
///
/// trajectory.actions[0] is the domain point nearest the start state and
/// actions[t] is the state held during round t, so the schedule is scored
/// with the lookahead-1 convention. `cost` is re-evaluated from the
/// trajectory; `objective` is what the solver itself reported.
struct OfflineSolution {
  Trajectory trajectory;
  CostLedger ledger;
  double cost = 0.0;
  double objective = 0.0;
  double alpha = 0.0;
  OfflineMethod method = OfflineMethod::kStatic;
};

/// Best fixed action: argmin_x sum_t c^t(x), leftmost on ties. Scored
/// without switching (alpha = 0).
OfflineSolution static_opt(const Instance& inst);

/// Exact alpha-unfair dynamic optimum by dynamic programming over
/// piecewise-linear value functions.
OfflineSolution dynamic_opt(const Instance& inst, double alpha);

/// Dynamic optimum restricted to the grid lo, lo + delta, ..., hi; O(T m).
OfflineSolution dynamic_opt_grid(const Instance& inst, double alpha, double delta);

/// Exhaustive minimum over all state sequences; |states|^T must stay
/// within `budget`.
OfflineSolution brute_force_opt(const Instance& inst, double alpha, std::vector<double> states,
                                std::size_t budget = 1'000'000);

/// CSV rows "t,x,operating,switching" for t = 1..T.
void write_solution_csv(std::ostream& out, const OfflineSolution& sol);

}  // namespace soco
