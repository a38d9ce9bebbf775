#include "soco/metrics.hpp"

#include <cmath>
#include <limits>

#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include "soco/errors.hpp"
#include "soco/offline.hpp"

namespace soco {

Benchmarks benchmarks(const Instance& inst, double alpha) {
  return Benchmarks{static_opt(inst).cost, dynamic_opt(inst, alpha).cost, alpha};
}

double default_slack(const Instance& inst) { return inst.norm_scale() * inst.diameter(); }

double regret(const Instance& inst, const Trajectory& traj, int i, bool include_switching) {
  return regret(inst, traj, i, include_switching, static_opt(inst).cost);
}

double regret(const Instance& inst, const Trajectory& traj, int i, bool include_switching,
              double opt_static) {
  const CostLedger ledger = penalized_cost(inst, traj, include_switching ? 1.0 : 0.0, i);
  return ledger.total - opt_static;
}

std::optional<double> ratio_or_marker(double cost, double opt, double slack) {
  if (opt < kTinyOpt) {
    if (cost <= slack) return std::nullopt;
    return std::numeric_limits<double>::infinity();
  }
  return cost / opt;
}

std::optional<double> competitive_ratio(const Instance& inst, const Trajectory& traj,
                                        double alpha, int i) {
  return competitive_ratio(inst, traj, alpha, i, dynamic_opt(inst, alpha).cost);
}

std::optional<double> competitive_ratio(const Instance& inst, const Trajectory& traj,
                                        double alpha, int i, double opt_dynamic) {
  const double cost = penalized_cost(inst, traj, alpha, i).total;
  return ratio_or_marker(cost, opt_dynamic, default_slack(inst));
}

double competitive_difference(const Instance& inst, const Trajectory& traj, double alpha, int i) {
  return competitive_difference(inst, traj, alpha, i, dynamic_opt(inst, alpha).cost);
}

double competitive_difference(const Instance& inst, const Trajectory& traj, double alpha, int i,
                              double opt_dynamic) {
  return penalized_cost(inst, traj, alpha, i).total - opt_dynamic;
}

MetricReport evaluate(const Instance& inst, const Trajectory& traj, double alpha, int i,
                      const Benchmarks& bench, std::string policy, std::string instance) {
  MetricReport rep;
  rep.policy = std::move(policy);
  rep.instance = std::move(instance);
  rep.alpha = alpha;
  rep.lookahead = i;
  rep.slack = default_slack(inst);
  rep.opt_static = bench.opt_static;
  rep.opt_dynamic = bench.opt_dynamic;
  rep.cost = penalized_cost(inst, traj, alpha, i).total;
  rep.regret = regret(inst, traj, i, false, bench.opt_static);
  rep.regret_switching = regret(inst, traj, i, true, bench.opt_static);
  rep.ratio = ratio_or_marker(rep.cost, bench.opt_dynamic, rep.slack);
  if (bench.opt_dynamic >= kTinyOpt) rep.ratio_adjusted = (rep.cost - rep.slack) / bench.opt_dynamic;
  rep.difference = rep.cost - bench.opt_dynamic;
  return rep;
}

MetricReport average_reports(std::span<const MetricReport> runs) {
  if (runs.empty()) throw ParameterError("cannot average zero reports");
  MetricReport out = runs.front();
  const std::size_t n = runs.size();
  std::vector<double> cost(n), reg(n), regs(n), diff(n), ratio, adjusted;
  bool ratio_defined = true;
  bool adjusted_defined = true;
  for (std::size_t j = 0; j < n; ++j) {
    const MetricReport& r = runs[j];
    if (r.policy != out.policy || r.instance != out.instance || r.alpha != out.alpha ||
        r.lookahead != out.lookahead) {
      throw StructuralError("averaged reports must share policy, instance, alpha and lookahead");
    }
    cost[j] = r.cost;
    reg[j] = r.regret;
    regs[j] = r.regret_switching;
    diff[j] = r.difference;
    if (r.ratio) ratio.push_back(*r.ratio); else ratio_defined = false;
    if (r.ratio_adjusted) adjusted.push_back(*r.ratio_adjusted); else adjusted_defined = false;
  }
  const Estimate c = estimate(cost);
  const Estimate g = estimate(reg);
  const Estimate gs = estimate(regs);
  out.cost = c.mean;
  out.cost_stderr = c.stderr_;
  out.regret = g.mean;
  out.regret_stderr = g.stderr_;
  out.regret_switching = gs.mean;
  out.regret_switching_stderr = gs.stderr_;
  out.difference = estimate(diff).mean;
  out.samples = n;
  out.ratio.reset();
  out.ratio_adjusted.reset();
  out.ratio_stderr = 0.0;
  if (ratio_defined) {
    const Estimate e = estimate(ratio);
    out.ratio = e.mean;
    out.ratio_stderr = e.stderr_;
  }
  if (adjusted_defined) out.ratio_adjusted = estimate(adjusted).mean;
  return out;
}

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : "undefined"; }

}  // namespace

std::string metric_csv_header() {
  return "policy,instance,alpha,i,cost,R,R_switching,CR,CR_adjusted,CD,slack,opt_static,"
         "opt_dynamic,samples,cost_stderr,R_stderr,R_switching_stderr,CR_stderr";
}

std::string metric_csv_row(const MetricReport& rep) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}", rep.policy,
                     rep.instance, num(rep.alpha), rep.lookahead, num(rep.cost), num(rep.regret),
                     num(rep.regret_switching), opt_num(rep.ratio), opt_num(rep.ratio_adjusted),
                     num(rep.difference), num(rep.slack), num(rep.opt_static),
                     num(rep.opt_dynamic), rep.samples, num(rep.cost_stderr),
                     num(rep.regret_stderr), num(rep.regret_switching_stderr),
                     num(rep.ratio_stderr));
}

void to_json(nlohmann::json& j, const MetricReport& rep) {
  auto opt = [](const std::optional<double>& v) -> nlohmann::json {
    if (!v) return "undefined";
    if (std::isinf(*v)) return "inf";
    return *v;
  };
  j = nlohmann::json{{"policy", rep.policy},
                     {"instance", rep.instance},
                     {"alpha", rep.alpha},
                     {"i", rep.lookahead},
                     {"cost", rep.cost},
                     {"R", rep.regret},
                     {"R_switching", rep.regret_switching},
                     {"CR", opt(rep.ratio)},
                     {"CR_adjusted", opt(rep.ratio_adjusted)},
                     {"CD", rep.difference},
                     {"slack", rep.slack},
                     {"samples", rep.samples}};
}

Estimate estimate(std::span<const double> xs) {
  if (xs.empty()) throw ParameterError("cannot estimate from an empty sample");
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  if (xs.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

std::vector<double> r_grid(std::size_t G) {
  if (G == 0) throw ParameterError("r-grid needs at least one point");
  std::vector<double> rs(G);
  for (std::size_t j = 0; j < G; ++j) {
    rs[j] = -1.0 + static_cast<double>(2 * j + 1) / static_cast<double>(G);
  }
  return rs;
}

std::vector<Estimate> expect_over_randomness(
    const std::function<std::vector<double>(double)>& runner, std::span<const double> points) {
  if (points.empty()) throw ParameterError("expectation over an empty grid");
  std::vector<std::vector<double>> columns;
  for (double p : points) {
    const std::vector<double> out = runner(p);
    if (columns.empty()) columns.resize(out.size());
    if (out.size() != columns.size()) {
      throw StructuralError("runner returned a different number of metrics across points");
    }
    for (std::size_t k = 0; k < out.size(); ++k) columns[k].push_back(out[k]);
  }
  std::vector<Estimate> result;
  result.reserve(columns.size());
  for (const auto& col : columns) result.push_back(estimate(col));
  return result;
}

}  // namespace soco
