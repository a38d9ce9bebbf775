#include "soco/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

#include <fmt/core.h>
#include <fmt/ostream.h>

#include "soco/adversaries.hpp"
#include "soco/algorithms.hpp"
#include "soco/errors.hpp"
#include "soco/harness.hpp"
#include "soco/metrics.hpp"
#include "soco/offline.hpp"
#include "soco/workfunction.hpp"

namespace soco {

namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kOracleTol = 1e-9;        // 1, 2
constexpr double kBoundTol = 1e-9;         // 3
constexpr double kStabilityBand = 0.2;     // 4
constexpr double kSigmas = 3.0;            // 5, 7
constexpr double kStepGapTol = 1e-9;       // 5
constexpr double kIdentityTol = 1e-12;     // 8, relative to the size of the terms
constexpr double kEpsilonTol = 1e-15;      // 8
constexpr double kMonotoneTol = 1e-9;      // 9
constexpr double kFinalOptGap = 0.05;      // 9
constexpr double kGrowthCap = 2.2;         // 10
constexpr double kStepTol = 1e-12;         // 10

// Random-instance streams, one per criterion.
enum Stream : std::uint64_t {
  kOracleStream = 1,
  kWorkStream = 2,
  kRbgStream = 3,
  kRecursionStream = 8,
  kConvergeStream = 9,
  kOgdStream = 10,
};

class Table {
 public:
  explicit Table(std::string header) { out_ << header << '\n'; }
  template <class... Args>
  void row(fmt::format_string<Args...> f, Args&&... args) {
    out_ << fmt::format(f, std::forward<Args>(args)...) << '\n';
  }
  void save(const fs::path& path) const {
    fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(fmt::format("cannot write '{}'", path.string()));
    f << out_.str();
  }

 private:
  std::ostringstream out_;
};

std::string num(double v) { return fmt_num(v); }

fs::path table_path(const AcceptanceOptions& opts, int id, const char* stem) {
  return opts.out_dir / "criteria" / fmt::format("c{:02}_{}.csv", id, stem);
}

GeneratorParams random_params(std::size_t T) {
  GeneratorParams gp;
  gp.T = T;
  gp.breakpoints = 4;
  gp.grad_bound = 2.0;
  return gp;
}

// ---------------------------------------------------------------- 1

CriterionResult oracle_equivalence(const AcceptanceOptions& opts) {
  Table table("n,T,states,delta,s,alpha,brute_force,grid_dp,pwl_dp,max_error");
  double worst = 0.0;
  const double deltas[] = {0.25, 0.5, 1.0};
  const double scales[] = {0.5, 1.0, 2.0};
  const double alphas[] = {1.0, 1.5, 2.0};
  for (std::uint64_t n = 0; n < 200; ++n) {
    auto rng = instance_rng(opts.seed, kOracleStream, n);
    std::uniform_int_distribution<int> states_d(2, 5), T_d(1, 6), pick(0, 2);
    const auto m = static_cast<std::size_t>(states_d(rng));
    const auto T = static_cast<std::size_t>(T_d(rng));
    const double delta = deltas[pick(rng)];
    const double s = scales[pick(rng)];
    const double alpha = alphas[pick(rng)];
    const Instance inst = random_grid_instance(T, 0.0, delta, m, 2.0, s, rng);
    const Grid grid(inst.lo(), inst.hi(), delta);
    const OfflineSolution bf = brute_force_opt(inst, alpha, grid.states());
    const OfflineSolution gd = dynamic_opt_grid(inst, alpha, delta);
    const OfflineSolution pw = dynamic_opt(inst, alpha);
    const double err = std::max({std::abs(gd.cost - bf.cost), std::abs(pw.cost - bf.cost),
                                 std::abs(gd.objective - bf.cost), std::abs(pw.objective - bf.cost)});
    worst = std::max(worst, err);
    table.row("{},{},{},{},{},{},{},{},{},{}", n, T, m, num(delta), num(s), num(alpha),
              num(bf.cost), num(gd.cost), num(pw.cost), num(err));
  }
  table.save(table_path(opts, 1, "oracle"));
  return {1, "oracle equivalence", worst < kOracleTol,
          fmt::format("200 instances, max |error| = {:.3g} (tol {:g})", worst, kOracleTol)};
}

// ---------------------------------------------------------------- 2

CriterionResult workfunction_crosscheck(const AcceptanceOptions& opts) {
  Table table("n,T,theta,wf_opt,dynamic_opt,error");
  double worst = 0.0;
  for (std::uint64_t n = 0; n < 100; ++n) {
    auto rng = instance_rng(opts.seed, kWorkStream, n);
    std::uniform_int_distribution<int> T_d(1, 100), B_d(1, 5);
    std::uniform_real_distribution<double> s_d(0.5, 2.0);
    GeneratorParams gp = random_params(static_cast<std::size_t>(T_d(rng)));
    gp.breakpoints = static_cast<std::size_t>(B_d(rng));
    gp.norm_scale = s_d(rng);
    const Instance inst = random_instance(gp, rng);
    for (double theta : {1.0, 2.0, 5.0}) {
      const double wf = wf_opt(RbgTrace(inst, theta).final_work());
      const double dp = dynamic_opt(inst.with_norm_scale(theta * inst.norm_scale()), 1.0).cost;
      const double err = std::abs(wf - dp);
      worst = std::max(worst, err);
      table.row("{},{},{},{},{},{}", n, gp.T, num(theta), num(wf), num(dp), num(err));
    }
  }
  table.save(table_path(opts, 2, "workfunction"));
  return {2, "work-function cross-check", worst < kOracleTol,
          fmt::format("300 pairs, max |wf_opt - OPT| = {:.3g} (tol {:g})", worst, kOracleTol)};
}

// ---------------------------------------------------------------- 3, 4, 5

constexpr std::size_t kRbgInstances = 50;
constexpr std::size_t kRbgHorizon = 200;

Instance rbg_instance(const AcceptanceOptions& opts, std::uint64_t n) {
  auto rng = instance_rng(opts.seed, kRbgStream, n);
  return random_instance(random_params(kRbgHorizon), rng);
}

struct RbgMeans {
  Estimate c1;        // C_1 with alpha = 1
  Estimate c0;        // C_0 with alpha = 1
  Estimate oc;        // operating part of C_1
  Estimate sc;        // switching part of C_1
  double min_step_gap;  // smallest per-step gap over all r
};

RbgMeans rbg_means(const Instance& inst, const RbgTrace& trace, const std::vector<double>& rs) {
  std::vector<double> c1, c0, oc, sc;
  double min_gap = std::numeric_limits<double>::infinity();
  for (double r : rs) {
    const Trajectory traj{trace.actions(r), 1};
    const CostLedger l1 = penalized_cost(inst, traj, 1.0, 1);
    c1.push_back(l1.total);
    oc.push_back(l1.operating_total);
    sc.push_back(l1.switching_total);
    c0.push_back(penalized_cost(inst, traj, 1.0, 0).total);
    for (double g : trace.step_gaps(inst, r)) min_gap = std::min(min_gap, g);
  }
  return {estimate(c1), estimate(c0), estimate(oc), estimate(sc), min_gap};
}

CriterionResult rbg_ratio(const AcceptanceOptions& opts) {
  Table table("n,theta,mean_C1,opt_dynamic,slack,bound,margin");
  const auto rs = r_grid(opts.r_grid);
  std::size_t violations = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (std::uint64_t n = 0; n < kRbgInstances; ++n) {
    const Instance inst = rbg_instance(opts, n);
    const double opt = dynamic_opt(inst, 1.0).cost;
    const double slack = default_slack(inst);
    for (double theta : {1.0, 2.0}) {
      const RbgTrace trace(inst, theta);
      std::vector<double> c1;
      for (double r : rs) c1.push_back(penalized_cost(inst, Trajectory{trace.actions(r), 1}, 1.0, 1).total);
      const double mean = estimate(c1).mean;
      // (1 + theta) / min(theta, alpha) with alpha = 1.
      const double bound = (1.0 + theta) * opt + slack;
      const double margin = bound - mean;
      worst_margin = std::min(worst_margin, margin);
      if (margin < -kBoundTol) ++violations;
      table.row("{},{},{},{},{},{},{}", n, num(theta), num(mean), num(opt), num(slack), num(bound),
                num(margin));
    }
  }
  table.save(table_path(opts, 3, "rbg_ratio"));
  return {3, "RBG competitive ratio", violations == 0,
          fmt::format("{} violations over {} instances x theta {{1,2}}, min margin {:.4g}",
                      violations, kRbgInstances, worst_margin)};
}

CriterionResult rbg_regret(const AcceptanceOptions& opts) {
  Table table("n,batch,theta,mean_R0_switching,envelope,K");
  const auto rs = r_grid(opts.r_grid);
  const double T = static_cast<double>(kRbgHorizon);
  double K[2] = {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (std::uint64_t n = 0; n < kRbgInstances; ++n) {
    const Instance inst = rbg_instance(opts, n);
    const double opt_s = static_opt(inst).cost;
    const int batch = n < kRbgInstances / 2 ? 0 : 1;
    for (double theta : {std::sqrt(T), T / 4.0}) {
      const RbgTrace trace(inst, theta);
      std::vector<double> reg;
      for (double r : rs) reg.push_back(regret(inst, Trajectory{trace.actions(r), 1}, 0, true, opt_s));
      const double mean = estimate(reg).mean;
      const double envelope = std::max(T / theta, theta);
      const double k = mean / envelope;
      K[batch] = std::max(K[batch], k);
      table.row("{},{},{},{},{},{}", n, batch, num(theta), num(mean), num(envelope), num(k));
    }
  }
  table.save(table_path(opts, 4, "rbg_regret"));
  const double centre = 0.5 * (K[0] + K[1]);
  const bool finite = std::isfinite(K[0]) && std::isfinite(K[1]) && centre > 0.0;
  const bool stable = finite && std::abs(K[0] - K[1]) <= kStabilityBand * centre;
  return {4, "RBG regret envelope", stable,
          fmt::format("K = {:.4g} (batch 1 {:.4g}, batch 2 {:.4g}, spread {:.1f}% of mean, cap {:.0f}%)",
                      std::max(K[0], K[1]), K[0], K[1],
                      centre > 0 ? 100.0 * std::abs(K[0] - K[1]) / centre : 0.0,
                      100.0 * kStabilityBand)};
}

CriterionResult rbg_bounds(const AcceptanceOptions& opts) {
  Table table("n,theta,mean_OC,OC_stderr,mean_SC,SC_stderr,wf_opt,min_step_gap");
  const auto rs = r_grid(opts.r_grid);
  const double T = static_cast<double>(kRbgHorizon);
  std::size_t oc_fail = 0, sc_fail = 0, step_fail = 0;
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::uint64_t n = 0; n < kRbgInstances; ++n) {
    const Instance inst = rbg_instance(opts, n);
    for (double theta : {1.0, 2.0, std::sqrt(T), T / 4.0}) {
      const RbgTrace trace(inst, theta);
      const RbgMeans m = rbg_means(inst, trace, rs);
      const double opt_n = wf_opt(trace.final_work());
      if (m.oc.mean > opt_n + kSigmas * m.oc.stderr_) ++oc_fail;
      if (m.sc.mean > opt_n / theta + kSigmas * m.sc.stderr_) ++sc_fail;
      if (m.min_step_gap < -kStepGapTol) ++step_fail;
      min_gap = std::min(min_gap, m.min_step_gap);
      table.row("{},{},{},{},{},{},{},{}", n, num(theta), num(m.oc.mean), num(m.oc.stderr_),
                num(m.sc.mean), num(m.sc.stderr_), num(opt_n), num(m.min_step_gap));
    }
  }
  table.save(table_path(opts, 5, "rbg_bounds"));
  return {5, "operating/switching bounds and per-step gap", oc_fail + sc_fail + step_fail == 0,
          fmt::format("OC violations {}, SC violations {}, runs with negative step gap {}, "
                      "min step gap {:.3g}",
                      oc_fail, sc_fail, step_fail, min_gap)};
}

// ---------------------------------------------------------------- 6

CriterionResult alternating_bound(const AcceptanceOptions& opts) {
  Table table("gamma,T,policy,CR1,R0,lhs");
  const auto rs = r_grid(opts.r_grid);
  std::size_t violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  const double alpha = 1.0;
  for (double gamma : {1.0, 2.0}) {
    for (std::size_t T : {10u, 100u, 1000u}) {
      const Instance inst = alternating_instance(gamma, alpha, 1.0, T);
      const double opt_d = dynamic_opt(inst, alpha).cost;
      const double opt_s = static_opt(inst).cost;
      for (const auto& runner : expand_policies(default_policy_set(), inst)) {
        std::vector<double> c1, c0;
        const std::vector<double> points = runner.randomized ? rs : std::vector<double>{0.0};
        for (double r : points) {
          const Trajectory traj{runner.actions(r), static_cast<int>(runner.lookahead)};
          c1.push_back(penalized_cost(inst, traj, alpha, 1).total);
          c0.push_back(penalized_cost(inst, traj, 0.0, 0).total);
        }
        const double cr = estimate(c1).mean / opt_d;
        const double r0 = estimate(c0).mean - opt_s;
        const double lhs = cr + r0 / static_cast<double>(T);
        worst = std::min(worst, lhs - gamma);
        if (lhs < gamma) ++violations;
        table.row("{},{},{},{},{},{}", num(gamma), T, runner.name, num(cr), num(r0), num(lhs));
      }
    }
  }
  table.save(table_path(opts, 6, "alternating"));
  return {6, "alternating-instance inequality", violations == 0,
          fmt::format("{} violations over 36 cases, min CR1 + R0/T - gamma = {:.4g}", violations,
                      worst)};
}

// ---------------------------------------------------------------- 7

CriterionResult conditional_bound(const AcceptanceOptions& opts) {
  Table table("policy,replications,mean_lhs,stderr,bound");
  constexpr double kGamma = 1.0;
  constexpr double kAlpha = 1.0;
  constexpr double kScale = 1.0;
  constexpr std::size_t kT = 200;
  constexpr std::size_t kReplicas = 64;
  std::vector<PolicySpec> specs = default_policy_set();
  specs.erase(std::remove_if(specs.begin(), specs.end(),
                             [](const PolicySpec& p) { return p.type != "ogd" && p.type != "rbg"; }),
              specs.end());
  std::size_t violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  const auto policies = make_online_policies(specs);
  for (const auto& policy : policies) {
    const AdversaryTranscript tr =
        conditional_adversary(*policy, kGamma, kAlpha, kScale, kT, kReplicas, opts.seed);
    const double opt_d = dynamic_opt(tr.instance, kAlpha).cost;
    const double opt_s = static_opt(tr.instance).cost;
    std::vector<double> lhs;
    for (const auto& traj : tr.replicas) {
      const double cr = penalized_cost(tr.instance, traj, kAlpha, 0).total / opt_d;
      const double r0 = penalized_cost(tr.instance, traj, 0.0, 0).total - opt_s;
      lhs.push_back(cr + r0 / static_cast<double>(kT));
    }
    const Estimate e = estimate(lhs);
    const AdversaryParams& p = tr.params;
    const double bound = (p.a / 2.0 + p.b) / (p.b + kAlpha * kScale) -
                         kScale / (2.0 * static_cast<double>(kT)) - kSigmas * e.stderr_;
    worst = std::min(worst, e.mean - bound);
    if (e.mean < bound) ++violations;
    table.row("{},{},{},{},{}", tr.policy, tr.replications, num(e.mean), num(e.stderr_), num(bound));
  }
  table.save(table_path(opts, 7, "conditional"));
  return {7, "conditional-adversary inequality", violations == 0,
          fmt::format("{} violations over {} policies, min margin {:.4g}", violations, policies.size(),
                      worst)};
}

// ---------------------------------------------------------------- 8

CriterionResult recursion_checks(const AcceptanceOptions& opts) {
  Table table("check,y,m,value,error");
  auto rng = instance_rng(opts.seed, kRecursionStream, 0);
  std::uniform_real_distribution<double> y_d(0.0, 1.0);
  std::uniform_int_distribution<int> m_d(1, 20);
  double worst_identity = 0.0;
  for (int k = 0; k < 100; ++k) {
    double y = y_d(rng);
    while (y <= 0.0) y = y_d(rng);
    const int m = m_d(rng);
    double sum = 0.0;
    for (int i = 1; i < m; ++i) sum += f_recursion(y, i);
    const double fm = f_recursion(y, m);
    const double lhs = fm * (1.0 - y) - y * sum;
    const double scale = std::max(1.0, fm * (1.0 - y));
    const double err = std::abs(lhs - 1.0) / scale;
    worst_identity = std::max(worst_identity, err);
    table.row("identity,{},{},{},{}", num(y), m, num(lhs), num(err));
  }
  bool powers_exact = true;
  for (int i = 1; i <= 20; ++i) {
    const double v = f_recursion(0.5, i);
    const double want = std::ldexp(1.0, i);
    powers_exact = powers_exact && v == want;
    table.row("power,0.5,{},{},{}", i, num(v), num(v - want));
  }
  const double eps = epsilon_threshold(0.2, 3, 0.5, 1.0);
  const double eps_err = std::abs(eps - 0.0125);
  table.row("epsilon,0.5,3,{},{}", num(eps), num(eps_err));
  table.save(table_path(opts, 8, "recursion"));
  const bool ok = worst_identity <= kIdentityTol && powers_exact && eps_err <= kEpsilonTol;
  return {8, "recursion identities", ok,
          fmt::format("identity max rel. error {:.3g}, f_i(1/2) = 2^i {}, eps(0.2, 3) = {}",
                      worst_identity, powers_exact ? "exact" : "NOT exact", num(eps))};
}

// ---------------------------------------------------------------- 9

CriterionResult convergence(const AcceptanceOptions& opts) {
  Table table("n,delta,x_gap,opt_gap,opt_discrete,opt_continuous");
  const auto rs = r_grid(opts.r_grid);
  const std::vector<double> deltas{0.1, 0.05, 0.025, 0.0125};
  std::size_t x_fail = 0, opt_fail = 0, final_fail = 0;
  for (std::uint64_t n = 0; n < 20; ++n) {
    auto rng = instance_rng(opts.seed, kConvergeStream, n);
    const Instance inst = random_instance(random_params(50), rng);
    const auto rows = convergence_study(inst, 1.0, deltas, rs);
    bool x_ok = true, opt_ok = true;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto& row = rows[k];
      table.row("{},{},{},{},{},{}", n, num(row.delta), num(row.x_gap), num(row.opt_gap),
                num(row.opt_discrete), num(row.opt_continuous));
      if (k == 0) continue;
      x_ok = x_ok && row.x_gap <= rows[k - 1].x_gap + kMonotoneTol;
      opt_ok = opt_ok && row.opt_gap <= rows[k - 1].opt_gap + kMonotoneTol;
    }
    if (!x_ok) ++x_fail;
    if (!opt_ok) ++opt_fail;
    if (!(rows.back().opt_gap < kFinalOptGap * rows.back().opt_continuous)) ++final_fail;
  }
  table.save(table_path(opts, 9, "convergence"));
  return {9, "grid-to-continuum convergence", x_fail + opt_fail + final_fail == 0,
          fmt::format("instances with non-monotone x gap {}, non-monotone OPT gap {}, "
                      "final OPT gap too large {} (of 20)",
                      x_fail, opt_fail, final_fail)};
}

// ---------------------------------------------------------------- 10

CriterionResult ogd_accounting(const AcceptanceOptions& opts) {
  Table table("T,n,movement,step_budget,R0_switching");
  Table growth("T,mean_R0_switching,per_sqrtT,ratio_to_previous");
  std::size_t budget_fail = 0;
  const std::size_t horizons[] = {100, 400, 1600};
  std::vector<double> means;
  for (std::size_t T : horizons) {
    std::vector<double> regs;
    for (std::uint64_t n = 0; n < 50; ++n) {
      auto rng = instance_rng(opts.seed, kOgdStream, T * 1000 + n);
      const Instance inst = random_instance(random_params(T), rng);
      const StepRule rule = StepRule::standard_sqrt(frame_of(inst));
      const PolicyRun run = ogd_run(inst, rule);
      const auto& xs = run.trajectory.actions;
      double moved = 0.0, budget = 0.0;
      for (std::size_t t = 1; t <= T; ++t) {
        moved += std::abs(xs[t] - xs[t - 1]);
        budget += inst.grad_bound() * rule.eta(t);
      }
      if (moved > budget * (1.0 + kStepTol)) ++budget_fail;
      const double reg = regret(inst, run.trajectory, 0, true);
      regs.push_back(reg);
      table.row("{},{},{},{},{}", T, n, num(moved), num(budget), num(reg));
    }
    means.push_back(estimate(regs).mean);
  }
  bool growth_ok = true;
  double worst_ratio = 0.0;
  for (std::size_t k = 0; k < means.size(); ++k) {
    const double per = means[k] / std::sqrt(static_cast<double>(horizons[k]));
    double ratio = 0.0;
    if (k > 0) {
      ratio = means[k - 1] > 0.0 ? means[k] / means[k - 1] : std::numeric_limits<double>::infinity();
      worst_ratio = std::max(worst_ratio, ratio);
      growth_ok = growth_ok && ratio <= kGrowthCap;
    }
    growth.row("{},{},{},{}", horizons[k], num(means[k]), num(per), num(ratio));
  }
  table.save(table_path(opts, 10, "ogd_runs"));
  growth.save(table_path(opts, 10, "ogd_growth"));
  return {10, "OGD movement and regret growth", budget_fail == 0 && growth_ok,
          fmt::format("movement budget violations {} of 150, mean R'0 {:.4g} / {:.4g} / {:.4g}, "
                      "max growth ratio {:.3f} (cap {:g})",
                      budget_fail, means[0], means[1], means[2], worst_ratio, kGrowthCap)};
}

std::vector<fs::path> summary_files(const fs::path& dir) {
  std::vector<fs::path> files;
  if (fs::exists(dir / "criteria")) {
    for (const auto& e : fs::directory_iterator(dir / "criteria")) {
      if (e.path().extension() == ".csv") files.push_back(fs::relative(e.path(), dir));
    }
  }
  files.push_back("summary.csv");
  std::sort(files.begin(), files.end());
  return files;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_summary(const fs::path& path, const std::vector<CriterionResult>& results) {
  Table table("criterion,name,passed,detail");
  for (const auto& r : results) {
    std::string detail = r.detail;
    std::replace(detail.begin(), detail.end(), ',', ';');
    table.row("{},{},{},{}", r.id, r.name, r.passed ? "pass" : "fail", detail);
  }
  table.save(path);
}

std::vector<CriterionResult> run_core(const AcceptanceOptions& opts) {
  std::vector<CriterionResult> results;
  for (int id = 1; id <= 10; ++id) {
    results.push_back(run_criterion(id, opts));
    if (opts.log) *opts.log << format_result(results.back()) << std::endl;
  }
  write_summary(opts.out_dir / "summary.csv", results);
  return results;
}

}  // namespace

bool AcceptanceReport::all_passed() const {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
}

CriterionResult run_criterion(int id, const AcceptanceOptions& opts) {
  switch (id) {
    case 1: return oracle_equivalence(opts);
    case 2: return workfunction_crosscheck(opts);
    case 3: return rbg_ratio(opts);
    case 4: return rbg_regret(opts);
    case 5: return rbg_bounds(opts);
    case 6: return alternating_bound(opts);
    case 7: return conditional_bound(opts);
    case 8: return recursion_checks(opts);
    case 9: return convergence(opts);
    case 10: return ogd_accounting(opts);
    default: throw ParameterError(fmt::format("no criterion {}", id));
  }
}

AcceptanceReport run_acceptance(const AcceptanceOptions& opts) {
  AcceptanceReport report;
  report.results = run_core(opts);
  report.summary = opts.out_dir / "summary.csv";
  if (opts.check_reproducibility) {
    AcceptanceOptions again = opts;
    again.out_dir = opts.out_dir / "rerun";
    again.log = nullptr;
    run_core(again);
    std::size_t compared = 0;
    std::vector<std::string> differing;
    for (const auto& rel : summary_files(opts.out_dir)) {
      ++compared;
      if (slurp(opts.out_dir / rel) != slurp(again.out_dir / rel)) {
        differing.push_back(rel.generic_string());
      }
    }
    CriterionResult r{11, "reproducibility", differing.empty(), ""};
    r.detail = differing.empty()
                   ? fmt::format("{} summary files byte-identical across two runs", compared)
                   : fmt::format("{} of {} files differ, first {}", differing.size(), compared,
                                 differing.front());
    if (opts.log) *opts.log << format_result(r) << std::endl;
    report.results.push_back(r);
    write_summary(report.summary, report.results);
  }
  return report;
}

std::string format_result(const CriterionResult& r) {
  return fmt::format("[{}] {} {}: {}", r.passed ? "PASS" : "FAIL", r.id, r.name, r.detail);
}

}  // namespace soco
