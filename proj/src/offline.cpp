#include "soco/offline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/core.h>
#include <fmt/ostream.h>

#include "soco/algorithms.hpp"
#include "soco/errors.hpp"
#include "soco/workfunction.hpp"

namespace soco {

namespace {

double tie_tol(double v) { return 1e-12 * std::max(1.0, std::abs(v)); }

void check_alpha(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw ParameterError(fmt::format("alpha must be >= 0, got {}", alpha));
  }
}

// Leftmost point of a convex PWL function within tolerance of its minimum.
double leftmost_min_point(const PwlConvexFn& f) {
  const double best = f.min_value();
  const auto xs = f.breakpoints();
  const auto vs = f.values();
  for (std::size_t j = 0; j < xs.size(); ++j) {
    if (vs[j] <= best + tie_tol(best)) return xs[j];
  }
  return xs.front();
}

OfflineSolution finish(const Instance& inst, std::vector<double> schedule, double alpha,
                       double objective, OfflineMethod method) {
  OfflineSolution sol;
  sol.trajectory.lookahead = 1;
  sol.trajectory.actions.reserve(schedule.size() + 1);
  sol.trajectory.actions.push_back(inst.initial_action());
  sol.trajectory.actions.insert(sol.trajectory.actions.end(), schedule.begin(), schedule.end());
  sol.ledger = penalized_cost(inst, sol.trajectory, alpha, 1);
  sol.cost = sol.ledger.total;
  sol.objective = objective;
  sol.alpha = alpha;
  sol.method = method;
  return sol;
}

}  // namespace

std::string_view to_string(OfflineMethod method) {
  switch (method) {
    case OfflineMethod::kStatic: return "static";
    case OfflineMethod::kPwlDp: return "pwl_dp";
    case OfflineMethod::kGridDp: return "grid_dp";
    case OfflineMethod::kBruteForce: return "brute_force";
  }
  return "unknown";
}

OfflineSolution static_opt(const Instance& inst) {
  const std::size_t T = inst.horizon();
  if (T == 0) return finish(inst, {}, 0.0, 0.0, OfflineMethod::kStatic);
  PwlConvexFn total = PwlConvexFn::constant(inst.lo(), inst.hi(), 0.0);
  for (const auto& c : inst.costs()) total = pwl_add(total, c);
  const double x = leftmost_min_point(total);
  return finish(inst, std::vector<double>(T, x), 0.0, total.min_value(), OfflineMethod::kStatic);
}

OfflineSolution dynamic_opt(const Instance& inst, double alpha) {
  check_alpha(alpha);
  const std::size_t T = inst.horizon();
  if (T == 0) return finish(inst, {}, alpha, 0.0, OfflineMethod::kPwlDp);
  const double k = alpha * inst.norm_scale();
  // value[t-1] is M^t: least cost of rounds 1..t ending in state x at round t.
  std::vector<PwlConvexFn> value;
  value.reserve(T);
  PwlConvexFn reach = PwlConvexFn::affine(inst.lo(), inst.hi(), k * inst.lo(), k);
  for (std::size_t t = 1; t <= T; ++t) {
    value.push_back(pwl_add(inst.cost(t), reach).simplified());
    if (t < T) reach = infconv_cone(value.back(), k);
  }
  std::vector<double> schedule(T);
  schedule[T - 1] = leftmost_min_point(value.back());
  for (std::size_t t = T - 1; t >= 1; --t) {
    // argmin_y M^t(y) + k |next - y|; the minimum sits on a breakpoint of M^t
    // or at `next` itself.
    const double next = schedule[t];
    const PwlConvexFn& m = value[t - 1];
    std::vector<double> candidates(m.breakpoints().begin(), m.breakpoints().end());
    candidates.push_back(next);
    std::sort(candidates.begin(), candidates.end());
    double best = std::numeric_limits<double>::infinity();
    for (double y : candidates) best = std::min(best, m(y) + k * std::abs(next - y));
    for (double y : candidates) {
      if (m(y) + k * std::abs(next - y) <= best + tie_tol(best)) {
        schedule[t - 1] = y;
        break;
      }
    }
  }
  return finish(inst, std::move(schedule), alpha, value.back().min_value(),
                OfflineMethod::kPwlDp);
}

OfflineSolution dynamic_opt_grid(const Instance& inst, double alpha, double delta) {
  check_alpha(alpha);
  const Grid grid(inst.lo(), inst.hi(), delta);
  const std::size_t T = inst.horizon();
  if (T == 0) return finish(inst, {}, alpha, 0.0, OfflineMethod::kGridDp);
  const double k = alpha * inst.norm_scale();
  const std::size_t m = grid.size();
  std::vector<std::vector<double>> value;
  value.reserve(T);
  std::vector<double> reach(m);
  for (std::size_t j = 0; j < m; ++j) reach[j] = k * grid.state(j);
  const std::vector<double> zero(m, 0.0);
  for (std::size_t t = 1; t <= T; ++t) {
    std::vector<double> v = grid.sample(inst.cost(t));
    for (std::size_t j = 0; j < m; ++j) v[j] += reach[j];
    value.push_back(std::move(v));
    // Two directional sweeps give min_i M(x_i) + k |x_j - x_i|.
    if (t < T) reach = grid_wf_update(grid, value.back(), zero, k);
  }
  auto pick = [&](const std::vector<double>& scores) {
    const double best = *std::min_element(scores.begin(), scores.end());
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (scores[j] <= best + tie_tol(best)) return j;
    }
    return std::size_t{0};
  };
  std::vector<double> schedule(T);
  std::size_t state = pick(value.back());
  schedule[T - 1] = grid.state(state);
  std::vector<double> scores(m);
  for (std::size_t t = T - 1; t >= 1; --t) {
    const double next = schedule[t];
    for (std::size_t j = 0; j < m; ++j) {
      scores[j] = value[t - 1][j] + k * std::abs(next - grid.state(j));
    }
    state = pick(scores);
    schedule[t - 1] = grid.state(state);
  }
  const double objective = *std::min_element(value.back().begin(), value.back().end());
  return finish(inst, std::move(schedule), alpha, objective, OfflineMethod::kGridDp);
}

OfflineSolution brute_force_opt(const Instance& inst, double alpha, std::vector<double> states,
                                std::size_t budget) {
  check_alpha(alpha);
  if (states.empty()) throw ParameterError("brute force needs at least one state");
  std::sort(states.begin(), states.end());
  states.erase(std::unique(states.begin(), states.end()), states.end());
  const std::size_t T = inst.horizon();
  const std::size_t m = states.size();
  double combos = std::pow(static_cast<double>(m), static_cast<double>(T));
  if (combos > static_cast<double>(budget)) {
    throw SizeError(fmt::format("{} states over {} rounds is {:.3g} schedules, budget {}", m, T,
                                combos, budget));
  }
  if (T == 0) return finish(inst, {}, alpha, 0.0, OfflineMethod::kBruteForce);
  const double k = alpha * inst.norm_scale();
  // cost[t][j] = c^{t+1}(states[j])
  std::vector<std::vector<double>> cost(T, std::vector<double>(m));
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t j = 0; j < m; ++j) cost[t][j] = inst.costs()[t](states[j]);
  }
  std::vector<std::size_t> digits(T, 0);
  std::vector<std::size_t> best_digits = digits;
  double best = std::numeric_limits<double>::infinity();
  bool first = true;
  while (true) {
    double total = 0.0;
    double prev = Trajectory::start;
    for (std::size_t t = 0; t < T; ++t) {
      const double x = states[digits[t]];
      total += cost[t][digits[t]] + k * std::abs(x - prev);
      prev = x;
    }
    if (first || total < best - tie_tol(best)) {
      first = false;
      best = total;
      best_digits = digits;
    }
    // Odometer with the last round varying fastest.
    std::size_t pos = T;
    while (pos > 0) {
      --pos;
      if (++digits[pos] < m) break;
      digits[pos] = 0;
      if (pos == 0) {
        pos = T + 1;
        break;
      }
    }
    if (pos == T + 1) break;
  }
  std::vector<double> schedule(T);
  for (std::size_t t = 0; t < T; ++t) schedule[t] = states[best_digits[t]];
  return finish(inst, std::move(schedule), alpha, best, OfflineMethod::kBruteForce);
}

void write_solution_csv(std::ostream& out, const OfflineSolution& sol) {
  out << "t,x,operating,switching\n";
  for (std::size_t t = 1; t <= sol.ledger.operating.size(); ++t) {
    fmt::print(out, "{},{:.17g},{:.17g},{:.17g}\n", t, sol.trajectory.actions[t],
               sol.ledger.operating[t - 1], sol.ledger.switching[t - 1]);
  }
}

}  // namespace soco
