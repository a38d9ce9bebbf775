#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "soco/model.hpp"

namespace soco {

/// Offline reference costs of one instance.
struct Benchmarks {
  double opt_static = 0.0;
  double opt_dynamic = 0.0;
  double alpha = 1.0;
};

Benchmarks benchmarks(const Instance& inst, double alpha);

/// Default additive slack for ratios: one move across the domain.
double default_slack(const Instance& inst);

/// Below this a dynamic optimum is treated as zero.
inline constexpr double kTinyOpt = 1e-9;

/// C_i (switching charged with alpha = 1 when include_switching, else
/// operating cost only) minus the static optimum.
double regret(const Instance& inst, const Trajectory& traj, int i, bool include_switching);
double regret(const Instance& inst, const Trajectory& traj, int i, bool include_switching,
              double opt_static);

/// cost / opt; nullopt when opt is tiny and cost is within `slack`, +inf
/// when opt is tiny and cost is not.
std::optional<double> ratio_or_marker(double cost, double opt, double slack);

/// Raw C_i^alpha / OPT_d^alpha.
std::optional<double> competitive_ratio(const Instance& inst, const Trajectory& traj,
                                        double alpha, int i);
std::optional<double> competitive_ratio(const Instance& inst, const Trajectory& traj,
                                        double alpha, int i, double opt_dynamic);

double competitive_difference(const Instance& inst, const Trajectory& traj, double alpha, int i);
double competitive_difference(const Instance& inst, const Trajectory& traj, double alpha, int i,
                              double opt_dynamic);

struct MetricReport {
  std::string policy;
  std::string instance;
  double alpha = 1.0;
  int lookahead = 0;
  double cost = 0.0;     // C_i^alpha
  double regret = 0.0;   // R_i
  double regret_switching = 0.0;  // R'_i
  std::optional<double> ratio;    // raw
  std::optional<double> ratio_adjusted;  // (C - slack) / OPT
  double difference = 0.0;
  double slack = 0.0;
  double opt_static = 0.0;
  double opt_dynamic = 0.0;
  std::size_t samples = 1;
  // Standard errors; zero for a single run.
  double cost_stderr = 0.0;
  double regret_stderr = 0.0;
  double regret_switching_stderr = 0.0;
  double ratio_stderr = 0.0;
};

MetricReport evaluate(const Instance& inst, const Trajectory& traj, double alpha, int i,
                      const Benchmarks& bench, std::string policy, std::string instance);

/// Means the per-run fields of reports that share policy, instance, alpha
/// and lookahead, and fills the standard errors. A ratio stays undefined
/// if any run's is.
MetricReport average_reports(std::span<const MetricReport> runs);

std::string metric_csv_header();
std::string metric_csv_row(const MetricReport& rep);
void to_json(nlohmann::json& j, const MetricReport& rep);

struct Estimate {
  double mean = 0.0;
  double stderr_ = 0.0;
};

/// Mean and standard error of the sample (sd / sqrt(n); 0 for n = 1).
Estimate estimate(std::span<const double> xs);

/// G midpoints of equal cells of (-1, 1): r_j = -1 + (2j + 1) / G. Odd G
/// includes r = 0.
std::vector<double> r_grid(std::size_t G);

/// Evaluates `runner` at every point and estimates each output coordinate.
/// Points are r values or seeds cast to double, at the caller's choice.
std::vector<Estimate> expect_over_randomness(
    const std::function<std::vector<double>(double)>& runner, std::span<const double> points);

}  // namespace soco
