#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "soco/model.hpp"
#include "soco/workfunction.hpp"

namespace soco {

/// What a policy may know before the first cost arrives.
struct Frame {
  double lo;
  double hi;
  double norm_scale;
  double grad_bound;
};

Frame frame_of(const Instance& inst);

/// Online policy protocol. A driver calls reset(), reads act() for x^1 and
/// then alternates observe(c^t) and act() for x^{t+1}. Under the OCO
/// schedule (0) x^t is charged against c^t; under the MTS schedule (1)
/// x^{t+1} is. Policies only ever see costs handed to observe().
class OnlinePolicy {
 public:
  virtual ~OnlinePolicy() = default;

  virtual std::string name() const = 0;
  virtual int schedule() const = 0;
  virtual bool randomized() const { return false; }
  /// Same frame, seed and cost prefix give the same actions.
  virtual bool replicable() const { return true; }

  virtual void reset(const Frame& frame, std::uint64_t seed) = 0;
  virtual double act() const = 0;
  virtual void observe(const PwlConvexFn& cost) = 0;
  virtual std::unique_ptr<OnlinePolicy> clone() const = 0;
};

/// Runs a policy over every round; the trajectory holds x^1..x^{T+1}.
Trajectory run_online(OnlinePolicy& policy, const Instance& inst, std::uint64_t seed = 0);

// ---------------------------------------------------------------- OGD

/// Learning-rate schedule for online gradient descent.
struct StepRule {
  enum class Kind { kInverseSqrt, kInverseLinear };

  Kind kind = Kind::kInverseSqrt;
  double eta0 = 1.0;   // eta_t = eta0 / sqrt(t)
  double gamma = 1.0;  // eta_t = 1 / (gamma t)

  static StepRule inverse_sqrt(double eta0);
  static StepRule inverse_linear(double gamma);
  /// eta0 = diameter / D, the usual choice for bounded gradients.
  static StepRule standard_sqrt(const Frame& frame);
  /// gamma = D / diameter, so that eta_1 matches standard_sqrt.
  static StepRule standard_linear(const Frame& frame);

  double eta(std::size_t t) const;
  std::string describe() const;
};

struct OgdState {
  double x;
  double lo;
  double hi;
  StepRule rule;
};

/// x <- clamp(x - eta_t g, lo, hi), g the mid subgradient of c at x.
double ogd_step(OgdState& st, const PwlConvexFn& c, std::size_t t);

class OgdPolicy final : public OnlinePolicy {
 public:
  /// With no rule, standard_sqrt of the frame is used at reset.
  explicit OgdPolicy(std::optional<StepRule> rule = std::nullopt,
                     StepRule::Kind default_kind = StepRule::Kind::kInverseSqrt);

  std::string name() const override;
  int schedule() const override { return 0; }
  void reset(const Frame& frame, std::uint64_t seed) override;
  double act() const override { return state_.x; }
  void observe(const PwlConvexFn& cost) override;
  std::unique_ptr<OnlinePolicy> clone() const override;

  const StepRule& rule() const { return state_.rule; }

 private:
  std::optional<StepRule> configured_;
  StepRule::Kind default_kind_;
  OgdState state_{0.0, 0.0, 0.0, {}};
  std::size_t round_ = 0;
};

struct PolicyRun {
  Trajectory trajectory;
  CostLedger ledger;
};

/// Lookahead-0 run; the ledger is C_0 with switching (alpha = 1).
PolicyRun ogd_run(const Instance& inst, const StepRule& rule);

// ---------------------------------------------------------------- RBG

/// Randomly Biased Greedy with input norm N(1) = theta s. The bias r is
/// either fixed or drawn uniformly from (-1, 1) at reset.
class RbgPolicy final : public OnlinePolicy {
 public:
  explicit RbgPolicy(double theta, std::optional<double> r = std::nullopt);

  std::string name() const override;
  int schedule() const override { return 1; }
  bool randomized() const override { return !fixed_r_.has_value(); }
  void reset(const Frame& frame, std::uint64_t seed) override;
  double act() const override { return x_; }
  void observe(const PwlConvexFn& cost) override;
  std::unique_ptr<OnlinePolicy> clone() const override;

  double theta() const { return theta_; }
  double bias() const { return r_; }
  const WorkFunction& work() const { return *w_; }

 private:
  double theta_;
  std::optional<double> fixed_r_;
  double r_ = 0.0;
  double x_ = 0.0;
  std::optional<WorkFunction> w_;
};

/// Work functions w^0..w^T of one instance. They do not depend on r, so
/// one trace serves every bias.
class RbgTrace {
 public:
  RbgTrace(const Instance& inst, double theta);

  double theta() const { return theta_; }
  double norm_scale() const { return k_; }
  std::size_t horizon() const { return w_.size() - 1; }
  const WorkFunction& work(std::size_t t) const { return w_.at(t); }
  const WorkFunction& final_work() const { return w_.back(); }

  /// x^1..x^{T+1} with x^{t} the leftmost minimizer of w^{t-1} + r N.
  std::vector<double> actions(double r) const;

  /// Per round t: Y^{t+1}(x^{t+1}) - Y^t(x^t) - c^t(x^{t+1}); never
  /// negative for an exact run.
  std::vector<double> step_gaps(const Instance& inst, double r) const;
  /// Per round t: w^t(x^{t+1}) - w^{t-1}(x^{t+1}) - c^t(x^{t+1}); zero for an
  /// exact run, since the selected state is reached without movement.
  std::vector<double> no_move_gaps(const Instance& inst, double r) const;

 private:
  double theta_;
  double k_;
  std::vector<WorkFunction> w_;
};

struct RbgRun {
  Trajectory trajectory;
  CostLedger ledger;  // C_1 with alpha = 1 under the instance norm
  WorkFunction final_work;
  double theta;
  double r;
};

RbgRun rbg_run(const Instance& inst, double theta, double r);
RbgRun rbg_run(const Instance& inst, const RbgTrace& trace, double r);

// ---------------------------------------------------------------- DRBG

/// Evenly spaced states lo, lo + delta, ..., hi.
class Grid {
 public:
  /// Throws ParameterError if delta <= 0 or does not divide hi - lo.
  Grid(double lo, double hi, double delta);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double delta() const { return delta_; }
  std::size_t size() const { return m_; }
  double state(std::size_t j) const { return j + 1 == m_ ? hi_ : lo_ + static_cast<double>(j) * delta_; }
  std::vector<double> states() const;
  std::vector<double> sample(const PwlConvexFn& f) const;

 private:
  double lo_;
  double hi_;
  double delta_;
  std::size_t m_;
};

/// One discrete work-function step: w'(x_i) = min_j w(x_j) + c(x_j) + k|x_i - x_j|,
/// by a forward and a backward sweep.
std::vector<double> grid_wf_update(const Grid& grid, std::span<const double> w,
                                   std::span<const double> cost, double k);

/// Discrete RBG over grid cost vectors; like RbgTrace, independent of r.
class DrbgTrace {
 public:
  DrbgTrace(const Grid& grid, double theta, double norm_scale,
            std::vector<std::vector<double>> cost_vectors);
  DrbgTrace(const Instance& inst, double theta, double delta);

  const Grid& grid() const { return grid_; }
  std::size_t horizon() const { return costs_.size(); }
  double theta() const { return theta_; }
  double norm_scale() const { return s_; }
  std::span<const double> work(std::size_t t) const { return w_.at(t); }
  std::span<const double> cost(std::size_t round) const { return costs_.at(round - 1); }

  std::vector<double> actions(double r) const;
  /// Potential phi^t for t = 0..T.
  std::vector<double> potentials() const;
  double opt() const;

 private:
  Grid grid_;
  double theta_;
  double s_;
  std::vector<std::vector<double>> costs_;
  std::vector<std::vector<double>> w_;
};

struct DrbgRun {
  Trajectory trajectory;
  CostLedger ledger;
  std::vector<double> final_work;
  std::vector<double> potentials;
};

DrbgRun drbg_run(const Instance& inst, double theta, double r, double delta);

/// phi = (w(x_1) + w(x_m)) / (2 theta) - s (x_m - x_1) / 2.
double drbg_potential(std::span<const double> w_grid, double x_first, double x_last,
                      double theta, double s);

/// Splits a convex grid cost vector into increments of at most `eps`, each
/// 0 on one side and constant on the other (monotone 0/eps pattern).
std::vector<std::vector<double>> epsilon_increments(std::span<const double> cost, double eps);

// ---------------------------------------------------------------- baselines

/// Plays a fixed point (clamped into the domain) every round.
class PinPolicy final : public OnlinePolicy {
 public:
  explicit PinPolicy(double x) : target_(x) {}
  std::string name() const override;
  int schedule() const override { return 0; }
  void reset(const Frame& frame, std::uint64_t seed) override;
  double act() const override { return x_; }
  void observe(const PwlConvexFn&) override {}
  std::unique_ptr<OnlinePolicy> clone() const override;

 private:
  double target_;
  double x_ = 0.0;
};

/// Moves to the leftmost minimizer of the most recent cost.
class FollowPolicy final : public OnlinePolicy {
 public:
  std::string name() const override { return "follow"; }
  int schedule() const override { return 1; }
  void reset(const Frame& frame, std::uint64_t seed) override;
  double act() const override { return x_; }
  void observe(const PwlConvexFn& cost) override;
  std::unique_ptr<OnlinePolicy> clone() const override;

 private:
  double x_ = 0.0;
};

}  // namespace soco
