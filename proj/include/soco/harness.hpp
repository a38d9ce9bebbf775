#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "soco/algorithms.hpp"
#include "soco/metrics.hpp"
#include "soco/model.hpp"

namespace soco {

// ---------------------------------------------------------------- instances

struct GeneratorParams {
  std::size_t T = 200;
  std::size_t breakpoints = 4;  // interior breakpoints per cost
  double grad_bound = 2.0;
  double lo = 0.0;
  double hi = 1.0;
  double norm_scale = 1.0;
};

/// Costs with `breakpoints` interior kinks uniform in the domain, slopes
/// uniform in [-D, D] sorted ascending, minimum lifted to a U[0, 1] offset.
Instance random_instance(const GeneratorParams& gp, std::mt19937_64& rng);

/// Costs convex on the grid lo, lo + delta, ..., hi and linear between grid
/// points, so that every breakpoint is a grid state.
Instance random_grid_instance(std::size_t T, double lo, double delta, std::size_t states,
                              double grad_bound, double norm_scale, std::mt19937_64& rng);

/// Independent generator for the n-th instance of a batch.
std::mt19937_64 instance_rng(std::uint64_t master_seed, std::uint64_t stream, std::uint64_t index);

// ---------------------------------------------------------------- policies

/// One entry of a policy list; RBG and DRBG entries expand over their
/// theta (and delta) lists.
struct PolicySpec {
  std::string type;  // ogd, rbg, drbg, pin, follow
  std::string rule = "sqrt";
  std::optional<double> eta0;
  std::vector<double> thetas{1.0};
  std::vector<double> deltas{0.05};
  double pin = 0.5;
};

/// A policy evaluated either once (deterministic) or over an r-grid.
struct PolicyRunner {
  std::string name;
  bool randomized = false;
  std::size_t lookahead = 0;
  /// Trajectory x^1..x^{T+1} for bias r (ignored by deterministic policies).
  std::function<std::vector<double>(double r)> actions;
};

std::vector<PolicyRunner> expand_policies(const std::vector<PolicySpec>& specs,
                                          const Instance& inst);

/// Online objects for the adversaries; DRBG entries are rejected since the
/// adversaries drive policies round by round.
std::vector<std::unique_ptr<OnlinePolicy>> make_online_policies(
    const std::vector<PolicySpec>& specs, double pin_scale = 1.0);

/// OGD under both rules, RBG with theta 1 and 2, a pin at the domain
/// midpoint and the follow baseline.
std::vector<PolicySpec> default_policy_set();

// ---------------------------------------------------------------- experiments

enum class ExperimentKind { kSingle, kThetaSweep, kAdversary, kConverge, kAccept };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kSingle;
  std::uint64_t seed = 1;
  std::optional<std::string> instance_file;
  std::size_t instance_count = 1;
  GeneratorParams generator;
  std::vector<PolicySpec> policies;
  std::vector<double> alphas{1.0};
  std::size_t r_grid = 201;
  std::filesystem::path out_dir = "out";
  // adversary
  int theorem = 1;
  double gamma = 1.0;
  std::vector<std::size_t> horizons{10, 100, 1000};
  std::size_t replications = 64;
  // converge
  double theta = 1.0;
  std::vector<double> deltas{0.1, 0.05, 0.025, 0.0125};
};

/// Throws UsageError naming the offending field.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig read_config(const std::filesystem::path& path);

/// Default configurations behind the CLI subcommands.
ExperimentConfig sweep_config();
ExperimentConfig adversary_config(int theorem);
ExperimentConfig converge_config();

struct ExperimentFiles {
  std::filesystem::path summary;
  std::filesystem::path manifest;
  std::vector<std::filesystem::path> rounds;
};

/// Writes round-level CSVs under out_dir/rounds, out_dir/summary.csv and
/// out_dir/manifest.json.
ExperimentFiles run_experiment(const ExperimentConfig& cfg);

struct ConvergenceRow {
  double delta;
  double x_gap;    // r-grid mean of max_t |x_D^t - x_C^t|
  double opt_gap;  // |OPT_D - OPT_C|
  double opt_discrete;
  double opt_continuous;
};

/// Discrete against continuous RBG for each delta, on a shared r-grid.
std::vector<ConvergenceRow> convergence_study(const Instance& inst, double theta,
                                              const std::vector<double>& deltas,
                                              const std::vector<double>& rs);

std::string fmt_num(double v);

}  // namespace soco
