#include "soco/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>

#include <fmt/core.h>
#include <fmt/ostream.h>

#include "soco/acceptance.hpp"
#include "soco/adversaries.hpp"
#include "soco/errors.hpp"
#include "soco/offline.hpp"
#include "soco/workfunction.hpp"

namespace soco {

namespace fs = std::filesystem;

std::string fmt_num(double v) { return fmt::format("{:.17g}", v); }

// ---------------------------------------------------------------- instances

namespace {

// Values of a convex PWL function with the given slopes, lifted so the
// minimum equals `offset`.
std::vector<double> integrate_lifted(const std::vector<double>& xs,
                                     const std::vector<double>& slopes, double offset) {
  std::vector<double> vs(xs.size(), 0.0);
  for (std::size_t j = 0; j + 1 < xs.size(); ++j) vs[j + 1] = vs[j] + slopes[j] * (xs[j + 1] - xs[j]);
  const double m = *std::min_element(vs.begin(), vs.end());
  for (double& v : vs) v += offset - m;
  return vs;
}

}  // namespace

Instance random_instance(const GeneratorParams& gp, std::mt19937_64& rng) {
  if (!(gp.hi > gp.lo)) throw ParameterError("random instances need lo < hi");
  if (!(gp.grad_bound > 0.0)) throw ParameterError("random instances need a positive slope bound");
  std::uniform_real_distribution<double> where(gp.lo, gp.hi);
  std::uniform_real_distribution<double> slope(-gp.grad_bound, gp.grad_bound);
  std::uniform_real_distribution<double> lift(0.0, 1.0);
  std::vector<PwlConvexFn> costs;
  costs.reserve(gp.T);
  for (std::size_t t = 0; t < gp.T; ++t) {
    std::vector<double> xs(gp.breakpoints);
    for (double& x : xs) x = where(rng);
    std::sort(xs.begin(), xs.end());
    xs.insert(xs.begin(), gp.lo);
    xs.push_back(gp.hi);
    std::vector<double> ss(gp.breakpoints + 1);
    for (double& s : ss) s = slope(rng);
    std::sort(ss.begin(), ss.end());
    const double offset = lift(rng);
    // Coincident draws would leave zero-length segments; drop them.
    std::vector<double> px{xs.front()};
    std::vector<double> ps;
    for (std::size_t j = 0; j + 1 < xs.size(); ++j) {
      if (xs[j + 1] > px.back()) {
        px.push_back(xs[j + 1]);
        ps.push_back(ss[j]);
      }
    }
    costs.push_back(PwlConvexFn::trusted(px, integrate_lifted(px, ps, offset)));
  }
  return Instance(gp.lo, gp.hi, Seminorm1D(gp.norm_scale), gp.grad_bound, std::move(costs));
}

Instance random_grid_instance(std::size_t T, double lo, double delta, std::size_t states,
                              double grad_bound, double norm_scale, std::mt19937_64& rng) {
  if (states == 0) throw ParameterError("grid instance needs at least one state");
  const double hi = lo + static_cast<double>(states - 1) * delta;
  const Grid grid(lo, hi, delta);
  const std::vector<double> xs = grid.states();
  std::uniform_real_distribution<double> slope(-grad_bound, grad_bound);
  std::uniform_real_distribution<double> lift(0.0, 1.0);
  std::vector<PwlConvexFn> costs;
  costs.reserve(T);
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<double> ss(states - 1);
    for (double& s : ss) s = slope(rng);
    std::sort(ss.begin(), ss.end());
    const double offset = lift(rng);
    costs.push_back(PwlConvexFn::trusted(xs, integrate_lifted(xs, ss, offset)));
  }
  return Instance(lo, hi, Seminorm1D(norm_scale), grad_bound, std::move(costs));
}

std::mt19937_64 instance_rng(std::uint64_t master_seed, std::uint64_t stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

// ---------------------------------------------------------------- policies

namespace {

StepRule rule_for(const PolicySpec& spec, const Frame& frame) {
  if (spec.rule == "sqrt") {
    return spec.eta0 ? StepRule::inverse_sqrt(*spec.eta0) : StepRule::standard_sqrt(frame);
  }
  if (spec.rule == "linear") {
    return spec.eta0 ? StepRule::inverse_linear(1.0 / *spec.eta0) : StepRule::standard_linear(frame);
  }
  throw UsageError(fmt::format("policies.rule: unknown OGD rule '{}'", spec.rule));
}

std::optional<StepRule> fixed_rule(const PolicySpec& spec) {
  if (spec.rule != "sqrt" && spec.rule != "linear") {
    throw UsageError(fmt::format("policies.rule: unknown OGD rule '{}'", spec.rule));
  }
  if (!spec.eta0) return std::nullopt;
  return spec.rule == "sqrt" ? StepRule::inverse_sqrt(*spec.eta0)
                             : StepRule::inverse_linear(1.0 / *spec.eta0);
}

StepRule::Kind kind_of(const PolicySpec& spec) {
  return spec.rule == "linear" ? StepRule::Kind::kInverseLinear : StepRule::Kind::kInverseSqrt;
}

}  // namespace

std::vector<PolicyRunner> expand_policies(const std::vector<PolicySpec>& specs,
                                          const Instance& inst) {
  std::vector<PolicyRunner> out;
  for (const auto& spec : specs) {
    if (spec.type == "ogd") {
      const StepRule rule = rule_for(spec, frame_of(inst));
      auto policy = std::make_shared<OgdPolicy>(rule);
      out.push_back({policy->name(), false, 0, [policy, &inst](double) {
                       OgdPolicy p = *policy;
                       return run_online(p, inst).actions;
                     }});
    } else if (spec.type == "rbg") {
      for (double theta : spec.thetas) {
        auto trace = std::make_shared<RbgTrace>(inst, theta);
        out.push_back({RbgPolicy(theta).name(), true, 1,
                       [trace](double r) { return trace->actions(r); }});
      }
    } else if (spec.type == "drbg") {
      for (double theta : spec.thetas) {
        for (double delta : spec.deltas) {
          auto trace = std::make_shared<DrbgTrace>(inst, theta, delta);
          out.push_back({fmt::format("drbg({:g},{:g})", theta, delta), true, 1,
                         [trace](double r) { return trace->actions(r); }});
        }
      }
    } else if (spec.type == "pin") {
      const double x = inst.lo() + spec.pin * inst.diameter();
      out.push_back({PinPolicy(x).name(), false, 0, [x, &inst](double) {
                       PinPolicy p(x);
                       return run_online(p, inst).actions;
                     }});
    } else if (spec.type == "follow") {
      out.push_back({"follow", false, 1, [&inst](double) {
                       FollowPolicy p;
                       return run_online(p, inst).actions;
                     }});
    } else {
      throw UsageError(fmt::format("policies.type: unknown policy '{}'", spec.type));
    }
  }
  return out;
}

std::vector<std::unique_ptr<OnlinePolicy>> make_online_policies(
    const std::vector<PolicySpec>& specs, double pin_scale) {
  std::vector<std::unique_ptr<OnlinePolicy>> out;
  for (const auto& spec : specs) {
    if (spec.type == "ogd") {
      out.push_back(std::make_unique<OgdPolicy>(fixed_rule(spec), kind_of(spec)));
    } else if (spec.type == "rbg") {
      for (double theta : spec.thetas) out.push_back(std::make_unique<RbgPolicy>(theta));
    } else if (spec.type == "pin") {
      out.push_back(std::make_unique<PinPolicy>(spec.pin * pin_scale));
    } else if (spec.type == "follow") {
      out.push_back(std::make_unique<FollowPolicy>());
    } else {
      throw UsageError(fmt::format("policies.type: '{}' cannot face an adversary", spec.type));
    }
  }
  return out;
}

namespace {

PolicySpec spec_of(std::string type) {
  PolicySpec spec;
  spec.type = std::move(type);
  return spec;
}

}  // namespace

std::vector<PolicySpec> default_policy_set() {
  PolicySpec linear_rule = spec_of("ogd");
  linear_rule.rule = "linear";
  PolicySpec rbg = spec_of("rbg");
  rbg.thetas = {1.0, 2.0};
  return {spec_of("ogd"), linear_rule, rbg, spec_of("pin"), spec_of("follow")};
}

// ---------------------------------------------------------------- config

namespace {

template <class T>
T field(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(fmt::format("{}: {}", key, e.what()));
  }
}

ExperimentKind kind_from(const std::string& s) {
  if (s == "single") return ExperimentKind::kSingle;
  if (s == "theta_sweep") return ExperimentKind::kThetaSweep;
  if (s == "adversary") return ExperimentKind::kAdversary;
  if (s == "converge") return ExperimentKind::kConverge;
  if (s == "accept") return ExperimentKind::kAccept;
  throw UsageError(fmt::format("kind: unknown experiment kind '{}'", s));
}

std::string kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kSingle: return "single";
    case ExperimentKind::kThetaSweep: return "theta_sweep";
    case ExperimentKind::kAdversary: return "adversary";
    case ExperimentKind::kConverge: return "converge";
    case ExperimentKind::kAccept: return "accept";
  }
  return "single";
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw UsageError("config: expected a JSON object");
  ExperimentConfig cfg;
  cfg.kind = kind_from(field<std::string>(j, "kind", "single"));
  cfg.seed = field<std::uint64_t>(j, "seed", cfg.seed);
  cfg.r_grid = field<std::size_t>(j, "r_grid", cfg.r_grid);
  cfg.out_dir = field<std::string>(j, "out_dir", cfg.out_dir.string());
  cfg.alphas = field<std::vector<double>>(j, "alpha", cfg.alphas);
  if (j.contains("instances")) {
    const auto& src = j.at("instances");
    if (src.contains("file")) {
      cfg.instance_file = src.at("file").get<std::string>();
      if (!fs::exists(*cfg.instance_file)) {
        throw UsageError(fmt::format("instances.file: '{}' does not exist", *cfg.instance_file));
      }
    }
    cfg.instance_count = field<std::size_t>(src, "count", cfg.instance_count);
    GeneratorParams& g = cfg.generator;
    g.T = field<std::size_t>(src, "T", g.T);
    g.breakpoints = field<std::size_t>(src, "breakpoints", g.breakpoints);
    g.grad_bound = field<double>(src, "grad_bound", g.grad_bound);
    g.lo = field<double>(src, "lo", g.lo);
    g.hi = field<double>(src, "hi", g.hi);
    g.norm_scale = field<double>(src, "norm_scale", g.norm_scale);
  }
  if (j.contains("policies")) {
    for (const auto& p : j.at("policies")) {
      PolicySpec spec;
      spec.type = field<std::string>(p, "type", "");
      spec.rule = field<std::string>(p, "rule", spec.rule);
      if (p.contains("eta0")) spec.eta0 = p.at("eta0").get<double>();
      spec.thetas = field<std::vector<double>>(p, "theta", spec.thetas);
      spec.deltas = field<std::vector<double>>(p, "delta", spec.deltas);
      spec.pin = field<double>(p, "pin", spec.pin);
      for (double th : spec.thetas) {
        if (!(th >= 1.0)) throw UsageError(fmt::format("policies.theta: {} is below 1", th));
      }
      for (double d : spec.deltas) {
        if (!(d > 0.0)) throw UsageError(fmt::format("policies.delta: {} is not positive", d));
      }
      cfg.policies.push_back(spec);
    }
  }
  if (j.contains("adversary")) {
    const auto& a = j.at("adversary");
    cfg.theorem = field<int>(a, "theorem", cfg.theorem);
    cfg.gamma = field<double>(a, "gamma", cfg.gamma);
    cfg.horizons = field<std::vector<std::size_t>>(a, "T", cfg.horizons);
    cfg.replications = field<std::size_t>(a, "replications", cfg.replications);
    if (cfg.theorem < 1 || cfg.theorem > 3) {
      throw UsageError(fmt::format("adversary.theorem: must be 1, 2 or 3, got {}", cfg.theorem));
    }
  }
  if (j.contains("converge")) {
    const auto& c = j.at("converge");
    cfg.theta = field<double>(c, "theta", cfg.theta);
    cfg.deltas = field<std::vector<double>>(c, "delta", cfg.deltas);
  }
  const bool needs_policies =
      cfg.kind == ExperimentKind::kSingle || cfg.kind == ExperimentKind::kThetaSweep;
  if (needs_policies && cfg.policies.empty()) throw UsageError("policies: list is empty");
  if (cfg.r_grid == 0) throw UsageError("r_grid: must be positive");
  if (cfg.alphas.empty()) throw UsageError("alpha: list is empty");
  return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["kind"] = kind_name(cfg.kind);
  j["seed"] = cfg.seed;
  j["r_grid"] = cfg.r_grid;
  j["out_dir"] = cfg.out_dir.string();
  j["alpha"] = cfg.alphas;
  auto& src = j["instances"];
  if (cfg.instance_file) src["file"] = *cfg.instance_file;
  src["count"] = cfg.instance_count;
  src["T"] = cfg.generator.T;
  src["breakpoints"] = cfg.generator.breakpoints;
  src["grad_bound"] = cfg.generator.grad_bound;
  src["lo"] = cfg.generator.lo;
  src["hi"] = cfg.generator.hi;
  src["norm_scale"] = cfg.generator.norm_scale;
  auto& pols = j["policies"] = nlohmann::json::array();
  for (const auto& p : cfg.policies) {
    nlohmann::json e{{"type", p.type}, {"rule", p.rule}, {"theta", p.thetas},
                     {"delta", p.deltas}, {"pin", p.pin}};
    if (p.eta0) e["eta0"] = *p.eta0;
    pols.push_back(e);
  }
  j["adversary"] = {{"theorem", cfg.theorem}, {"gamma", cfg.gamma}, {"T", cfg.horizons},
                    {"replications", cfg.replications}};
  j["converge"] = {{"theta", cfg.theta}, {"delta", cfg.deltas}};
  return j;
}

ExperimentConfig read_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError(fmt::format("config: cannot open '{}'", path.string()));
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(fmt::format("config: '{}' is not valid JSON: {}", path.string(), e.what()));
  }
  return config_from_json(j);
}

ExperimentConfig sweep_config() {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kThetaSweep;
  cfg.instance_count = 50;
  PolicySpec rbg = spec_of("rbg");
  rbg.thetas = {1.0, 2.0, 4.0, 8.0};
  cfg.policies = {rbg};
  return cfg;
}

ExperimentConfig adversary_config(int theorem) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kAdversary;
  cfg.theorem = theorem;
  cfg.policies = default_policy_set();
  if (theorem == 2) cfg.horizons = {200};
  if (theorem == 3) cfg.horizons = {240, 2400};
  return cfg;
}

ExperimentConfig converge_config() {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::kConverge;
  cfg.instance_count = 20;
  cfg.generator.T = 50;
  return cfg;
}

// ---------------------------------------------------------------- runs

namespace {

std::string file_safe(std::string s) {
  for (char& c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-')) c = '_';
  }
  while (!s.empty() && s.back() == '_') s.pop_back();
  return s;
}

std::ofstream open_out(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  return out;
}

struct Sample {
  double label;  // r, or replica index
  std::vector<double> actions;
};

// Writes the round-level ledger of every sample and returns one averaged
// report per (alpha, i).
std::vector<MetricReport> record(const Instance& inst, const std::string& policy,
                                 const std::string& instance_name,
                                 const std::vector<Sample>& samples,
                                 const std::vector<double>& alphas,
                                 const std::vector<Benchmarks>& bench, const fs::path& rounds) {
  std::ofstream out = open_out(rounds);
  out << "sample,label,t,x,x_next,cost_now,cost_next\n";
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& xs = samples[k].actions;
    for (std::size_t t = 1; t <= inst.horizon(); ++t) {
      const PwlConvexFn& c = inst.cost(t);
      fmt::print(out, "{},{},{},{},{},{},{}\n", k, fmt_num(samples[k].label), t,
                 fmt_num(xs[t - 1]), fmt_num(xs[t]), fmt_num(c(xs[t - 1])), fmt_num(c(xs[t])));
    }
  }
  std::vector<MetricReport> reports;
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    for (int i = 0; i <= 1; ++i) {
      std::vector<MetricReport> runs;
      runs.reserve(samples.size());
      for (const auto& s : samples) {
        Trajectory traj{s.actions, i};
        runs.push_back(evaluate(inst, traj, alphas[a], i, bench[a], policy, instance_name));
      }
      reports.push_back(average_reports(runs));
    }
  }
  return reports;
}

std::vector<Benchmarks> all_benchmarks(const Instance& inst, const std::vector<double>& alphas) {
  std::vector<Benchmarks> out;
  for (double a : alphas) out.push_back(benchmarks(inst, a));
  return out;
}

void write_summary(const fs::path& path, const std::vector<std::pair<MetricReport, fs::path>>& rows,
                   const fs::path& base) {
  std::ofstream out = open_out(path);
  out << metric_csv_header() << ",rounds\n";
  for (const auto& [rep, file] : rows) {
    out << metric_csv_row(rep) << ',' << fs::relative(file, base).generic_string() << '\n';
  }
}

void write_manifest(const ExperimentConfig& cfg, const ExperimentFiles& files,
                    const nlohmann::json& extra) {
  nlohmann::json m;
  m["tool"] = "soco";
  m["version"] = "1.0.0";
  m["config"] = config_to_json(cfg);
  m["seed"] = cfg.seed;
  m["summary"] = fs::relative(files.summary, cfg.out_dir).generic_string();
  auto& r = m["rounds"] = nlohmann::json::array();
  for (const auto& p : files.rounds) r.push_back(fs::relative(p, cfg.out_dir).generic_string());
  if (!extra.is_null()) m["details"] = extra;
  std::ofstream out = open_out(files.manifest);
  out << m.dump(2) << '\n';
}

std::vector<Instance> load_instances(const ExperimentConfig& cfg) {
  if (cfg.instance_file) return {read_instance(*cfg.instance_file)};
  std::vector<Instance> out;
  for (std::size_t n = 0; n < cfg.instance_count; ++n) {
    auto rng = instance_rng(cfg.seed, 0, n);
    out.push_back(random_instance(cfg.generator, rng));
  }
  return out;
}

ExperimentFiles run_policy_sweep(const ExperimentConfig& cfg) {
  ExperimentFiles files{cfg.out_dir / "summary.csv", cfg.out_dir / "manifest.json", {}};
  std::vector<std::pair<MetricReport, fs::path>> rows;
  const std::vector<double> rs = r_grid(cfg.r_grid);
  const auto instances = load_instances(cfg);
  for (std::size_t n = 0; n < instances.size(); ++n) {
    const Instance& inst = instances[n];
    const std::string name = fmt::format("inst{:03}", n);
    const auto bench = all_benchmarks(inst, cfg.alphas);
    for (const auto& runner : expand_policies(cfg.policies, inst)) {
      std::vector<Sample> samples;
      if (runner.randomized) {
        for (double r : rs) samples.push_back({r, runner.actions(r)});
      } else {
        samples.push_back({0.0, runner.actions(0.0)});
      }
      const fs::path rounds = cfg.out_dir / "rounds" / (name + "_" + file_safe(runner.name) + ".csv");
      for (auto& rep : record(inst, runner.name, name, samples, cfg.alphas, bench, rounds)) {
        rows.emplace_back(std::move(rep), rounds);
      }
      files.rounds.push_back(rounds);
    }
  }
  write_summary(files.summary, rows, cfg.out_dir);
  write_manifest(cfg, files, nullptr);
  return files;
}

ExperimentFiles run_adversary(const ExperimentConfig& cfg) {
  ExperimentFiles files{cfg.out_dir / "summary.csv", cfg.out_dir / "manifest.json", {}};
  std::vector<std::pair<MetricReport, fs::path>> rows;
  const double alpha = cfg.alphas.front();
  const double s = cfg.generator.norm_scale;
  const std::vector<double> rs = r_grid(cfg.r_grid);
  const auto specs = cfg.policies.empty() ? default_policy_set() : cfg.policies;
  nlohmann::json details = nlohmann::json::array();
  for (std::size_t T : cfg.horizons) {
    if (cfg.theorem == 1) {
      const Instance inst = alternating_instance(cfg.gamma, alpha, s, T);
      const std::string name = fmt::format("alternating_T{}", T);
      const auto bench = all_benchmarks(inst, {alpha});
      for (const auto& runner : expand_policies(specs, inst)) {
        std::vector<Sample> samples;
        if (runner.randomized) {
          for (double r : rs) samples.push_back({r, runner.actions(r)});
        } else {
          samples.push_back({0.0, runner.actions(0.0)});
        }
        const fs::path rounds =
            cfg.out_dir / "rounds" / (name + "_" + file_safe(runner.name) + ".csv");
        for (auto& rep : record(inst, runner.name, name, samples, {alpha}, bench, rounds)) {
          rows.emplace_back(std::move(rep), rounds);
        }
        files.rounds.push_back(rounds);
      }
      continue;
    }
    const double pin_scale = cfg.theorem == 2 ? 1.0 : 1.0 / abar_of(alpha, s);
    for (const auto& policy : make_online_policies(specs, pin_scale)) {
      const AdversaryTranscript tr =
          cfg.theorem == 2
              ? conditional_adversary(*policy, cfg.gamma, alpha, s, T, cfg.replications, cfg.seed)
              : segment_adversary(*policy, cfg.gamma, alpha, s, T, cfg.seed);
      const std::string name = fmt::format("{}_T{}", tr.construction, T);
      const std::string stem = name + "_" + file_safe(tr.policy);
      std::vector<Sample> samples;
      if (cfg.theorem == 2) {
        for (std::size_t k = 0; k < tr.replicas.size(); ++k) {
          samples.push_back({static_cast<double>(k), tr.replicas[k].actions});
        }
      } else {
        // Replay the single seeded run on the finished instance.
        auto replay = policy->clone();
        samples.push_back({0.0, run_online(*replay, tr.instance, cfg.seed).actions});
      }
      const auto bench = all_benchmarks(tr.instance, {alpha});
      const fs::path rounds = cfg.out_dir / "rounds" / (stem + ".csv");
      for (auto& rep : record(tr.instance, tr.policy, name, samples, {alpha}, bench, rounds)) {
        rows.emplace_back(std::move(rep), rounds);
      }
      files.rounds.push_back(rounds);
      nlohmann::json jt = tr;
      const fs::path transcript = cfg.out_dir / "transcripts" / (stem + ".json");
      std::ofstream out = open_out(transcript);
      out << jt.dump(2) << '\n';
      details.push_back(fs::relative(transcript, cfg.out_dir).generic_string());
    }
  }
  write_summary(files.summary, rows, cfg.out_dir);
  write_manifest(cfg, files, details.empty() ? nlohmann::json() : nlohmann::json{{"transcripts", details}});
  return files;
}

ExperimentFiles run_convergence(const ExperimentConfig& cfg) {
  ExperimentFiles files{cfg.out_dir / "summary.csv", cfg.out_dir / "manifest.json", {}};
  const std::vector<double> rs = r_grid(cfg.r_grid);
  std::ofstream out = open_out(files.summary);
  out << "instance,theta,delta,x_gap,opt_gap,opt_discrete,opt_continuous\n";
  const auto instances = load_instances(cfg);
  for (std::size_t n = 0; n < instances.size(); ++n) {
    for (const auto& row : convergence_study(instances[n], cfg.theta, cfg.deltas, rs)) {
      fmt::print(out, "inst{:03},{},{},{},{},{},{}\n", n, fmt_num(cfg.theta), fmt_num(row.delta),
                 fmt_num(row.x_gap), fmt_num(row.opt_gap), fmt_num(row.opt_discrete),
                 fmt_num(row.opt_continuous));
    }
  }
  out.close();
  write_manifest(cfg, files, nullptr);
  return files;
}

}  // namespace

ExperimentFiles run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.kind) {
    case ExperimentKind::kSingle:
    case ExperimentKind::kThetaSweep: return run_policy_sweep(cfg);
    case ExperimentKind::kAdversary: return run_adversary(cfg);
    case ExperimentKind::kConverge: return run_convergence(cfg);
    case ExperimentKind::kAccept: {
      AcceptanceOptions opts;
      opts.seed = cfg.seed;
      opts.r_grid = cfg.r_grid;
      opts.out_dir = cfg.out_dir;
      const AcceptanceReport rep = run_acceptance(opts);
      return ExperimentFiles{rep.summary, cfg.out_dir / "manifest.json", {}};
    }
  }
  throw UsageError("kind: unhandled experiment kind");
}

std::vector<ConvergenceRow> convergence_study(const Instance& inst, double theta,
                                              const std::vector<double>& deltas,
                                              const std::vector<double>& rs) {
  if (rs.empty()) throw ParameterError("convergence study needs a nonempty r-grid");
  const RbgTrace cont(inst, theta);
  std::vector<std::vector<double>> xc;
  xc.reserve(rs.size());
  for (double r : rs) xc.push_back(cont.actions(r));
  const double opt_c = wf_opt(cont.final_work());
  std::vector<ConvergenceRow> rows;
  for (double delta : deltas) {
    const DrbgTrace disc(inst, theta, delta);
    double gap_sum = 0.0;
    for (std::size_t k = 0; k < rs.size(); ++k) {
      const std::vector<double> xd = disc.actions(rs[k]);
      double worst = 0.0;
      for (std::size_t t = 0; t < xd.size(); ++t) worst = std::max(worst, std::abs(xd[t] - xc[k][t]));
      gap_sum += worst;
    }
    const double opt_d = disc.opt();
    rows.push_back({delta, gap_sum / static_cast<double>(rs.size()), std::abs(opt_d - opt_c), opt_d,
                    opt_c});
  }
  return rows;
}

}  // namespace soco
