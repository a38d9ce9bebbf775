// Command-line front end for the experiment harness.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "soco/acceptance.hpp"
#include "soco/errors.hpp"
#include "soco/harness.hpp"
#include "soco/workfunction.hpp"

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> r_grid;

  void apply(soco::ExperimentConfig& cfg) const {
    if (seed) cfg.seed = *seed;
    if (out_dir) cfg.out_dir = *out_dir;
    if (r_grid) cfg.r_grid = *r_grid;
  }
};

void dump_work_functions(const soco::ExperimentConfig& cfg, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::vector<soco::Instance> instances;
  if (cfg.instance_file) {
    instances.push_back(soco::read_instance(*cfg.instance_file));
  } else {
    for (std::size_t n = 0; n < cfg.instance_count; ++n) {
      auto rng = soco::instance_rng(cfg.seed, 0, n);
      instances.push_back(soco::random_instance(cfg.generator, rng));
    }
  }
  for (std::size_t n = 0; n < instances.size(); ++n) {
    for (const auto& spec : cfg.policies) {
      if (spec.type != "rbg") continue;
      for (double theta : spec.thetas) {
        const soco::RbgTrace trace(instances[n], theta);
        std::ofstream out(fmt::format("{}/inst{:03}_theta{:g}_wT.csv", dir, n, theta));
        soco::write_wf_csv(out, trace.final_work());
      }
    }
  }
}

int report(const soco::ExperimentFiles& files) {
  std::cout << "summary: " << files.summary.string() << '\n'
            << "manifest: " << files.manifest.string() << '\n';
  return EXIT_SUCCESS;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smoothed online convex optimization experiments"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--seed", common.seed, "Master seed")->expected(1);
  app.add_option("--out-dir", common.out_dir, "Output directory");
  app.add_option("--r-grid", common.r_grid, "Number of bias points")->check(CLI::PositiveNumber);

  std::string config_path;
  std::string dump_dir;
  auto* run = app.add_subcommand("run", "Run an experiment described by a JSON config");
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--dump-wf", dump_dir, "Also write the final work functions of RBG policies");

  app.add_subcommand("sweep", "RBG theta sweep on random instances");

  int theorem = 1;
  std::optional<double> gamma;
  auto* adv = app.add_subcommand("adversary", "Lower-bound constructions against the policy set");
  adv->add_option("--theorem", theorem, "Construction: 1, 2 or 3")
      ->required()
      ->check(CLI::IsMember({1, 2, 3}));
  adv->add_option("--gamma", gamma, "Target ratio");

  app.add_subcommand("converge", "Grid-to-continuum convergence study");
  app.add_subcommand("accept", "Run the acceptance suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? EXIT_SUCCESS : kExitUsage;
  }

  try {
    if (run->parsed()) {
      soco::ExperimentConfig cfg = soco::read_config(config_path);
      common.apply(cfg);
      if (cfg.kind == soco::ExperimentKind::kAccept) {
        soco::AcceptanceOptions opts;
        opts.seed = cfg.seed;
        opts.r_grid = cfg.r_grid;
        opts.out_dir = cfg.out_dir;
        opts.log = &std::cout;
        return soco::run_acceptance(opts).all_passed() ? EXIT_SUCCESS : kExitFailed;
      }
      const auto files = soco::run_experiment(cfg);
      if (!dump_dir.empty()) dump_work_functions(cfg, dump_dir);
      return report(files);
    }
    if (app.got_subcommand("sweep")) {
      soco::ExperimentConfig cfg = soco::sweep_config();
      common.apply(cfg);
      return report(soco::run_experiment(cfg));
    }
    if (adv->parsed()) {
      soco::ExperimentConfig cfg = soco::adversary_config(theorem);
      if (gamma) cfg.gamma = *gamma;
      common.apply(cfg);
      return report(soco::run_experiment(cfg));
    }
    if (app.got_subcommand("converge")) {
      soco::ExperimentConfig cfg = soco::converge_config();
      common.apply(cfg);
      return report(soco::run_experiment(cfg));
    }
    soco::AcceptanceOptions opts;
    if (common.seed) opts.seed = *common.seed;
    if (common.r_grid) opts.r_grid = *common.r_grid;
    opts.out_dir = common.out_dir.value_or("accept");
    opts.log = &std::cout;
    const auto rep = soco::run_acceptance(opts);
    return rep.all_passed() ? EXIT_SUCCESS : kExitFailed;
  } catch (const soco::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailed;
  }
}
