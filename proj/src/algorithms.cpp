#include "soco/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/core.h>

#include "soco/errors.hpp"

namespace soco {

namespace {

double draw_bias(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  double r = unif(gen);
  while (r <= -1.0) r = unif(gen);
  return r;
}

void check_theta(double theta) {
  if (!(theta >= 1.0) || !std::isfinite(theta)) {
    throw ParameterError(fmt::format("theta must be >= 1, got {}", theta));
  }
}

void check_bias(double r) {
  if (!(r > -1.0 && r < 1.0)) {
    throw ParameterError(fmt::format("bias r must lie in (-1, 1), got {}", r));
  }
}

std::size_t leftmost_min_index(std::span<const double> v) {
  const double best = *std::min_element(v.begin(), v.end());
  const double tol = 1e-12 * std::max(1.0, std::abs(best));
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (v[j] <= best + tol) return j;
  }
  return 0;
}

}  // namespace

Frame frame_of(const Instance& inst) {
  return {inst.lo(), inst.hi(), inst.norm_scale(), inst.grad_bound()};
}

Trajectory run_online(OnlinePolicy& policy, const Instance& inst, std::uint64_t seed) {
  policy.reset(frame_of(inst), seed);
  Trajectory traj;
  traj.lookahead = policy.schedule();
  traj.actions.reserve(inst.horizon() + 1);
  traj.actions.push_back(policy.act());
  for (const auto& c : inst.costs()) {
    policy.observe(c);
    traj.actions.push_back(policy.act());
  }
  return traj;
}

// ---------------------------------------------------------------- OGD

StepRule StepRule::inverse_sqrt(double eta0) {
  if (!(eta0 > 0.0)) throw ParameterError(fmt::format("eta0 must be > 0, got {}", eta0));
  StepRule rule;
  rule.kind = Kind::kInverseSqrt;
  rule.eta0 = eta0;
  return rule;
}

StepRule StepRule::inverse_linear(double gamma) {
  if (!(gamma > 0.0)) throw ParameterError(fmt::format("gamma must be > 0, got {}", gamma));
  StepRule rule;
  rule.kind = Kind::kInverseLinear;
  rule.gamma = gamma;
  return rule;
}

StepRule StepRule::standard_sqrt(const Frame& frame) {
  const double diam = frame.hi - frame.lo;
  if (diam <= 0.0 || frame.grad_bound <= 0.0) return inverse_sqrt(1.0);
  return inverse_sqrt(diam / frame.grad_bound);
}

StepRule StepRule::standard_linear(const Frame& frame) {
  const double diam = frame.hi - frame.lo;
  if (diam <= 0.0 || frame.grad_bound <= 0.0) return inverse_linear(1.0);
  return inverse_linear(frame.grad_bound / diam);
}

double StepRule::eta(std::size_t t) const {
  const auto tt = static_cast<double>(t);
  return kind == Kind::kInverseSqrt ? eta0 / std::sqrt(tt) : 1.0 / (gamma * tt);
}

std::string StepRule::describe() const {
  return kind == Kind::kInverseSqrt ? fmt::format("inverse_sqrt(eta0={:.6g})", eta0)
                                    : fmt::format("inverse_linear(gamma={:.6g})", gamma);
}

double ogd_step(OgdState& st, const PwlConvexFn& c, std::size_t t) {
  if (t == 0) throw ParameterError("OGD rounds are numbered from 1");
  const double g = c.subgradient(st.x).mid();
  st.x = std::clamp(st.x - st.rule.eta(t) * g, st.lo, st.hi);
  return st.x;
}

OgdPolicy::OgdPolicy(std::optional<StepRule> rule, StepRule::Kind default_kind)
    : configured_(rule), default_kind_(default_kind) {}

std::string OgdPolicy::name() const {
  const auto kind = configured_ ? configured_->kind : default_kind_;
  return kind == StepRule::Kind::kInverseSqrt ? "ogd_sqrt" : "ogd_linear";
}

void OgdPolicy::reset(const Frame& frame, std::uint64_t /*seed*/) {
  StepRule rule;
  if (configured_) {
    rule = *configured_;
  } else {
    rule = default_kind_ == StepRule::Kind::kInverseSqrt ? StepRule::standard_sqrt(frame)
                                                         : StepRule::standard_linear(frame);
  }
  state_ = OgdState{std::clamp(Trajectory::start, frame.lo, frame.hi), frame.lo, frame.hi, rule};
  round_ = 0;
}

void OgdPolicy::observe(const PwlConvexFn& cost) { ogd_step(state_, cost, ++round_); }

std::unique_ptr<OnlinePolicy> OgdPolicy::clone() const { return std::make_unique<OgdPolicy>(*this); }

PolicyRun ogd_run(const Instance& inst, const StepRule& rule) {
  OgdPolicy policy(rule);
  Trajectory traj = run_online(policy, inst);
  CostLedger ledger = penalized_cost(inst, traj, 1.0, 0);
  return {std::move(traj), std::move(ledger)};
}

// ---------------------------------------------------------------- RBG

RbgPolicy::RbgPolicy(double theta, std::optional<double> r) : theta_(theta), fixed_r_(r) {
  check_theta(theta);
  if (r) check_bias(*r);
}

std::string RbgPolicy::name() const {
  if (fixed_r_) return fmt::format("rbg(theta={:g};r={:g})", theta_, *fixed_r_);
  return fmt::format("rbg(theta={:g})", theta_);
}

void RbgPolicy::reset(const Frame& frame, std::uint64_t seed) {
  r_ = fixed_r_ ? *fixed_r_ : draw_bias(seed);
  w_.emplace(WorkFunction::initial(frame.lo, frame.hi, theta_ * frame.norm_scale));
  x_ = wf_argmin_biased(*w_, r_);
}

void RbgPolicy::observe(const PwlConvexFn& cost) {
  w_.emplace(wf_update(*w_, cost));
  x_ = wf_argmin_biased(*w_, r_);
}

std::unique_ptr<OnlinePolicy> RbgPolicy::clone() const { return std::make_unique<RbgPolicy>(*this); }

RbgTrace::RbgTrace(const Instance& inst, double theta)
    : theta_(theta), k_(theta * inst.norm_scale()) {
  check_theta(theta);
  w_.reserve(inst.horizon() + 1);
  w_.push_back(WorkFunction::initial(inst.lo(), inst.hi(), k_));
  for (const auto& c : inst.costs()) w_.push_back(wf_update(w_.back(), c));
}

std::vector<double> RbgTrace::actions(double r) const {
  check_bias(r);
  std::vector<double> xs;
  xs.reserve(w_.size());
  for (const auto& w : w_) xs.push_back(wf_argmin_biased(w, r));
  return xs;
}

std::vector<double> RbgTrace::step_gaps(const Instance& inst, double r) const {
  const std::vector<double> xs = actions(r);
  std::vector<double> gaps;
  gaps.reserve(horizon());
  for (std::size_t t = 1; t <= horizon(); ++t) {
    const double y_next = wf_biased_value(w_[t], r, xs[t]);
    const double y_now = wf_biased_value(w_[t - 1], r, xs[t - 1]);
    gaps.push_back(y_next - y_now - inst.cost(t)(xs[t]));
  }
  return gaps;
}

std::vector<double> RbgTrace::no_move_gaps(const Instance& inst, double r) const {
  const std::vector<double> xs = actions(r);
  std::vector<double> gaps;
  gaps.reserve(horizon());
  for (std::size_t t = 1; t <= horizon(); ++t) {
    const double x = xs[t];
    gaps.push_back(w_[t](x) - w_[t - 1](x) - inst.cost(t)(x));
  }
  return gaps;
}

RbgRun rbg_run(const Instance& inst, double theta, double r) {
  return rbg_run(inst, RbgTrace(inst, theta), r);
}

RbgRun rbg_run(const Instance& inst, const RbgTrace& trace, double r) {
  Trajectory traj{trace.actions(r), 1};
  CostLedger ledger = penalized_cost(inst, traj, 1.0, 1);
  return {std::move(traj), std::move(ledger), trace.final_work(), trace.theta(), r};
}

// ---------------------------------------------------------------- DRBG

Grid::Grid(double lo, double hi, double delta) : lo_(lo), hi_(hi), delta_(delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw ParameterError(fmt::format("grid spacing must be > 0, got {}", delta));
  }
  const double steps = (hi - lo) / delta;
  const double rounded = std::round(steps);
  if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps)) {
    throw ParameterError(fmt::format("grid spacing {} does not divide [{}, {}]", delta, lo, hi));
  }
  m_ = static_cast<std::size_t>(rounded) + 1;
}

std::vector<double> Grid::states() const {
  std::vector<double> xs(m_);
  for (std::size_t j = 0; j < m_; ++j) xs[j] = state(j);
  return xs;
}

std::vector<double> Grid::sample(const PwlConvexFn& f) const {
  std::vector<double> v(m_);
  for (std::size_t j = 0; j < m_; ++j) v[j] = f(state(j));
  return v;
}

std::vector<double> grid_wf_update(const Grid& grid, std::span<const double> w,
                                   std::span<const double> cost, double k) {
  const std::size_t m = grid.size();
  if (w.size() != m || cost.size() != m) {
    throw StructuralError(fmt::format("grid has {} states, got {} work values and {} costs", m,
                                      w.size(), cost.size()));
  }
  std::vector<double> g(m);
  for (std::size_t j = 0; j < m; ++j) g[j] = w[j] + cost[j];
  for (std::size_t j = 1; j < m; ++j) {
    g[j] = std::min(g[j], g[j - 1] + k * (grid.state(j) - grid.state(j - 1)));
  }
  for (std::size_t j = m - 1; j > 0; --j) {
    g[j - 1] = std::min(g[j - 1], g[j] + k * (grid.state(j) - grid.state(j - 1)));
  }
  return g;
}

DrbgTrace::DrbgTrace(const Grid& grid, double theta, double norm_scale,
                     std::vector<std::vector<double>> cost_vectors)
    : grid_(grid), theta_(theta), s_(norm_scale), costs_(std::move(cost_vectors)) {
  check_theta(theta);
  const double k = theta_ * s_;
  std::vector<double> w0(grid_.size());
  for (std::size_t j = 0; j < grid_.size(); ++j) w0[j] = k * grid_.state(j);
  w_.reserve(costs_.size() + 1);
  w_.push_back(std::move(w0));
  for (const auto& c : costs_) w_.push_back(grid_wf_update(grid_, w_.back(), c, k));
}

namespace {

std::vector<std::vector<double>> sample_costs(const Instance& inst, const Grid& grid) {
  std::vector<std::vector<double>> out;
  out.reserve(inst.horizon());
  for (const auto& c : inst.costs()) out.push_back(grid.sample(c));
  return out;
}

}  // namespace

DrbgTrace::DrbgTrace(const Instance& inst, double theta, double delta)
    : DrbgTrace(Grid(inst.lo(), inst.hi(), delta), theta, inst.norm_scale(),
                sample_costs(inst, Grid(inst.lo(), inst.hi(), delta))) {}

std::vector<double> DrbgTrace::actions(double r) const {
  check_bias(r);
  const double k = theta_ * s_;
  std::vector<double> xs;
  xs.reserve(w_.size());
  std::vector<double> y(grid_.size());
  for (const auto& w : w_) {
    for (std::size_t j = 0; j < grid_.size(); ++j) y[j] = w[j] + r * k * grid_.state(j);
    xs.push_back(grid_.state(leftmost_min_index(y)));
  }
  return xs;
}

std::vector<double> DrbgTrace::potentials() const {
  std::vector<double> phi;
  phi.reserve(w_.size());
  for (const auto& w : w_) phi.push_back(drbg_potential(w, grid_.lo(), grid_.hi(), theta_, s_));
  return phi;
}

double DrbgTrace::opt() const { return *std::min_element(w_.back().begin(), w_.back().end()); }

DrbgRun drbg_run(const Instance& inst, double theta, double r, double delta) {
  const DrbgTrace trace(inst, theta, delta);
  Trajectory traj{trace.actions(r), 1};
  CostLedger ledger = penalized_cost(inst, traj, 1.0, 1);
  const auto last = trace.work(trace.horizon());
  return {std::move(traj), std::move(ledger), std::vector<double>(last.begin(), last.end()),
          trace.potentials()};
}

double drbg_potential(std::span<const double> w_grid, double x_first, double x_last,
                      double theta, double s) {
  if (w_grid.empty()) throw StructuralError("potential needs at least one grid state");
  check_theta(theta);
  return (w_grid.front() + w_grid.back()) / (2.0 * theta) - s * (x_last - x_first) / 2.0;
}

std::vector<std::vector<double>> epsilon_increments(std::span<const double> cost, double eps) {
  if (!(eps > 0.0)) throw ParameterError(fmt::format("increment size must be > 0, got {}", eps));
  const std::size_t m = cost.size();
  std::vector<std::vector<double>> out;
  if (m == 0) return out;
  const double top = *std::max_element(cost.begin(), cost.end());
  double level = 0.0;
  while (level < top) {
    double next = top;
    for (double c : cost) {
      if (c > level) next = std::min(next, c);
    }
    const double step = std::min(eps, next - level);
    // States still above the current level form a prefix and a suffix.
    std::vector<double> left(m, 0.0);
    std::vector<double> right(m, 0.0);
    bool any_left = false;
    bool any_right = false;
    bool seen_low = false;
    for (std::size_t j = 0; j < m; ++j) {
      if (cost[j] > level) {
        if (seen_low) {
          right[j] = step;
          any_right = true;
        } else {
          left[j] = step;
          any_left = true;
        }
      } else {
        seen_low = true;
      }
    }
    if (any_left) out.push_back(std::move(left));
    if (any_right) out.push_back(std::move(right));
    level += step;
    if (next - level <= 1e-15 * std::max(1.0, next)) level = next;
  }
  return out;
}

// ---------------------------------------------------------------- baselines

std::string PinPolicy::name() const { return fmt::format("pin({:g})", target_); }

void PinPolicy::reset(const Frame& frame, std::uint64_t /*seed*/) {
  x_ = std::clamp(target_, frame.lo, frame.hi);
}

std::unique_ptr<OnlinePolicy> PinPolicy::clone() const { return std::make_unique<PinPolicy>(*this); }

void FollowPolicy::reset(const Frame& frame, std::uint64_t /*seed*/) {
  x_ = std::clamp(Trajectory::start, frame.lo, frame.hi);
}

void FollowPolicy::observe(const PwlConvexFn& cost) { x_ = cost.leftmost_argmin(); }

std::unique_ptr<OnlinePolicy> FollowPolicy::clone() const {
  return std::make_unique<FollowPolicy>(*this);
}

}  // namespace soco
