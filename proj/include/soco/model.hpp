#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "soco/pwl.hpp"

namespace soco {

/// A finite-horizon SOCO instance on a one-dimensional interval [lo, hi]
/// with lo >= 0, so the switching norm reduces to s * x on the domain.
class Instance {
 public:
  Instance(double lo, double hi, Seminorm1D norm, double grad_bound,
           std::vector<PwlConvexFn> costs);

  std::size_t horizon() const { return costs_.size(); }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double diameter() const { return hi_ - lo_; }
  const Seminorm1D& norm() const { return norm_; }
  double norm_scale() const { return norm_.scale(); }
  double grad_bound() const { return grad_bound_; }
  const std::vector<PwlConvexFn>& costs() const { return costs_; }
  const PwlConvexFn& cost(std::size_t round) const { return costs_.at(round - 1); }

  /// Clamp of the start state 0 into the domain; the first action of every
  /// online policy and offline schedule.
  double initial_action() const { return lo_; }

  /// Same costs, different switching scale.
  Instance with_norm_scale(double scale) const;
  /// Appends rounds; the gradient bound grows if needed.
  Instance with_costs_appended(const std::vector<PwlConvexFn>& extra) const;

 private:
  double lo_;
  double hi_;
  Seminorm1D norm_;
  double grad_bound_;
  std::vector<PwlConvexFn> costs_;
};

/// Action sequence of a run: actions[0] is x^1 and, for an online run, the
/// last entry is x^{T+1}, chosen after the final cost was revealed. The
/// implicit start state is x^0 = 0.
struct Trajectory {
  static constexpr double start = 0.0;

  std::vector<double> actions;
  /// Schedule the run was produced under: 0 = act before seeing c^t,
  /// 1 = act after seeing c^t. Recorded, not enforced.
  int lookahead = 0;

  /// Action charged against round t (1-based) under cost convention i.
  double charged(std::size_t t, int i) const { return actions[t - 1 + static_cast<std::size_t>(i)]; }
};

/// Per-round breakdown of an alpha-penalized cost.
struct CostLedger {
  std::vector<double> operating;
  std::vector<double> switching;
  double operating_total = 0.0;
  double switching_total = 0.0;
  double total = 0.0;
};

/// C_i^alpha of a trajectory: round t charges c^t(x^{t+i}) plus
/// alpha * s * |x^{t+i} - x^{t+i-1}| with x^i taken as the start state 0.
/// i = 0 needs at least T actions, i = 1 needs T + 1.
CostLedger penalized_cost(const Instance& inst, const Trajectory& traj,
                          double alpha, int i);

void to_json(nlohmann::json& j, const PwlConvexFn& f);
PwlConvexFn pwl_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const Instance& inst);
Instance instance_from_json(const nlohmann::json& j);

Instance read_instance(const std::string& path);
void write_instance(const std::string& path, const Instance& inst);

}  // namespace soco
