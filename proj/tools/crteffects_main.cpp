// Command-line front end: generate reference or simulated datasets,
// estimate vaccine effects from a dataset file, and run Monte Carlo
// calibration studies. Exit codes: 0 success, 2 usage/parse problem,
// 3 infeasible specification, 4 estimation failed for every effect.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crteffects/config.hpp"
#include "crteffects/dataset_io.hpp"
#include "crteffects/datagen_causal.hpp"
#include "crteffects/datagen_margins.hpp"
#include "crteffects/errors.hpp"
#include "crteffects/estimators.hpp"
#include "crteffects/mc_harness.hpp"
#include "crteffects/report_io.hpp"

namespace {

using namespace crteffects;

constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitEstimation = 4;

int exit_code_for(const Error& error) {
  switch (error.code()) {
    case ErrorCode::infeasible_margins:
    case ErrorCode::infeasible_scheme:
      return kExitInfeasible;
    case ErrorCode::parse_error:
    case ErrorCode::invalid_config:
    case ErrorCode::invalid_dataset:
      return kExitUsage;
    default:
      return kExitEstimation;
  }
}

struct GenerateArgs {
  std::string config_path;
  std::string out_path;
  std::string world_out;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

struct EstimateArgs {
  std::string dataset_path;
  std::string out_path;
  std::string effects = "overall,indirect,total,naive-direct,control-contrast";
  std::string contrast = "rd";
  std::string policy = "error";
  std::string scale = "per1000";
};

struct MCArgs {
  std::string config_path;
  std::string out_path;
  int replicates = 1000;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 1;
  std::string policy = "drop";
  std::string scale = "per1000";
  bool regenerate = false;
};

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (start <= csv.size()) {
    std::size_t comma = csv.find(',', start);
    if (comma == std::string::npos) {
      items.push_back(csv.substr(start));
      break;
    }
    items.push_back(csv.substr(start, comma - start));
    start = comma + 1;
  }
  return items;
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::parse_error, "cannot write '" + path + "'");
  }
  out << contents;
}

int run_generate_margins(const GenerateArgs& args) {
  Config config = load_config(args.config_path);
  if (!config.margins) {
    throw Error(ErrorCode::invalid_config,
                "config has no 'margins' section");
  }
  std::uint64_t seed = args.seed_given ? args.seed : config.margins->seed;
  TrialDataset dataset = synthesize(config.margins->spec, seed);
  write_dataset(dataset, args.out_path);
  std::cerr << "wrote " << args.out_path << " (" << dataset.n_clusters()
            << " clusters, seed " << seed << ")\n";
  return 0;
}

int run_generate_causal(const GenerateArgs& args) {
  Config config = load_config(args.config_path);
  if (!config.causal) {
    throw Error(ErrorCode::invalid_config, "config has no 'causal' section");
  }
  if (!config.randomization) {
    throw Error(ErrorCode::invalid_config,
                "generate causal needs a 'randomization' section to reveal "
                "one arm per cluster");
  }
  GenerativeConfig gen = *config.causal;
  if (args.seed_given) gen.seed = args.seed;
  PotentialWorld world = generate_world(gen);
  Assignment assignment = assign(cluster_keys(world), *config.randomization);
  TrialDataset dataset = observe(world, assignment);
  write_dataset(dataset, args.out_path);
  const std::string world_path =
      args.world_out.empty() ? args.out_path + ".counterfactuals.csv"
                             : args.world_out;
  write_world(world, world_path);
  std::cerr << "wrote " << args.out_path << " and " << world_path << " ("
            << world.clusters.size() << " clusters, seed " << gen.seed
            << ")\n";
  return 0;
}

int run_estimate(const EstimateArgs& args) {
  TrialDataset dataset = read_dataset(args.dataset_path);

  EstimateOptions options;
  options.contrast =
      args.contrast == "rr" ? Contrast::risk_ratio : Contrast::risk_difference;
  options.policy =
      args.policy == "drop" ? EmptyPolicy::drop : EmptyPolicy::error;

  EffectReport report;
  report.scale = args.scale == "raw" ? Scale::raw : Scale::per1000;
  int failures = 0;
  for (const std::string& name : split_list(args.effects)) {
    auto kind = effect_kind_from_string(name);
    if (!kind) {
      throw Error(ErrorCode::invalid_config,
                  "unknown effect '" + name +
                      "' (expected overall, indirect, total, naive-direct, "
                      "or control-contrast)");
    }
    EffectReportEntry entry;
    entry.kind = *kind;
    try {
      entry.estimate = estimate(dataset, *kind, options);
    } catch (const Error& error) {
      entry.error = error.what();
      ++failures;
    }
    report.entries.push_back(std::move(entry));
  }

  std::cout << render_text(report);
  if (!args.out_path.empty()) {
    write_text_file(args.out_path, to_json(report));
    std::cerr << "wrote " << args.out_path << "\n";
  }
  if (failures == static_cast<int>(report.entries.size())) {
    std::cerr << "all requested effects failed\n";
    return kExitEstimation;
  }
  return 0;
}

int run_mc(const MCArgs& args) {
  Config config = load_config(args.config_path);
  if (!config.causal) {
    throw Error(ErrorCode::invalid_config, "config has no 'causal' section");
  }
  if (!config.randomization) {
    throw Error(ErrorCode::invalid_config,
                "config has no 'randomization' section");
  }
  MCOptions options;
  options.n_replicates = args.replicates;
  options.seed = args.seed_given ? args.seed : config.randomization->seed;
  options.policy =
      args.policy == "error" ? EmptyPolicy::error : EmptyPolicy::drop;
  options.n_threads = args.threads;

  MCReport report;
  if (args.regenerate) {
    std::cerr << "running " << options.n_replicates
              << " replicates (fresh world each)...\n";
    report = run_mc_regenerated(*config.causal, *config.randomization, options);
  } else {
    std::cerr << "generating world (seed " << config.causal->seed << ")...\n";
    PotentialWorld world = generate_world(*config.causal);
    std::cerr << "running " << options.n_replicates << " replicates...\n";
    report = run_mc(world, *config.randomization, options);
  }

  Scale scale = args.scale == "raw" ? Scale::raw : Scale::per1000;
  std::cout << render_text(report, scale);
  if (!args.out_path.empty()) {
    write_text_file(args.out_path, to_json(report, scale));
    std::cerr << "wrote " << args.out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Overall, indirect, and total vaccine effects in cluster-randomized "
      "trials with self-selected participation"};
  app.require_subcommand(1);

  GenerateArgs gen_args;
  CLI::App* generate = app.add_subcommand(
      "generate", "Synthesize a dataset (margin-matched or causal model)");
  generate->require_subcommand(1);
  CLI::App* margins = generate->add_subcommand(
      "margins", "Match a printed cluster-level summary table");
  CLI::App* causal = generate->add_subcommand(
      "causal", "Generate from the causal model plus counterfactual table");
  for (CLI::App* sub : {margins, causal}) {
    sub->add_option("--config", gen_args.config_path, "JSON config file")
        ->required();
    sub->add_option("--out", gen_args.out_path, "output dataset CSV")
        ->required();
    sub->add_option("--seed", gen_args.seed, "override the config seed");
  }
  causal->add_option("--world-out", gen_args.world_out,
                     "counterfactual side-table path (default: "
                     "<out>.counterfactuals.csv)");

  EstimateArgs est_args;
  CLI::App* estimate_cmd =
      app.add_subcommand("estimate", "Estimate effects from a dataset file");
  estimate_cmd->add_option("--data", est_args.dataset_path, "dataset CSV")
      ->required();
  estimate_cmd->add_option(
      "--effects", est_args.effects,
      "comma list: overall,indirect,total,naive-direct,control-contrast");
  estimate_cmd->add_option("--contrast", est_args.contrast, "rd or rr")
      ->check(CLI::IsMember({"rd", "rr"}));
  estimate_cmd
      ->add_option("--empty-policy", est_args.policy,
                   "error or drop (clusters with an empty stratum)")
      ->check(CLI::IsMember({"error", "drop"}));
  estimate_cmd->add_option("--scale", est_args.scale, "per1000 or raw")
      ->check(CLI::IsMember({"per1000", "raw"}));
  estimate_cmd->add_option("--out", est_args.out_path, "JSON report path");

  MCArgs mc_args;
  CLI::App* mc_cmd = app.add_subcommand(
      "mc", "Monte Carlo bias / SE / coverage study on a generated world");
  mc_cmd->add_option("--config", mc_args.config_path, "JSON config file")
      ->required();
  mc_cmd->add_option("--replicates", mc_args.replicates, "number of replicates")
      ->check(CLI::PositiveNumber);
  mc_cmd->add_option("--seed", mc_args.seed,
                     "override the randomization seed");
  mc_cmd->add_option("--threads", mc_args.threads, "worker threads")
      ->check(CLI::PositiveNumber);
  mc_cmd
      ->add_option("--empty-policy", mc_args.policy,
                   "error or drop (per replicate)")
      ->check(CLI::IsMember({"error", "drop"}));
  mc_cmd->add_option("--scale", mc_args.scale, "per1000 or raw")
      ->check(CLI::IsMember({"per1000", "raw"}));
  mc_cmd->add_flag("--regenerate", mc_args.regenerate,
                   "fresh world per replicate (super-population mode)");
  mc_cmd->add_option("--out", mc_args.out_path, "JSON report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  gen_args.seed_given = margins->count("--seed") > 0 || causal->count("--seed") > 0;
  mc_args.seed_given = mc_cmd->count("--seed") > 0;

  try {
    if (margins->parsed()) return run_generate_margins(gen_args);
    if (causal->parsed()) return run_generate_causal(gen_args);
    if (estimate_cmd->parsed()) return run_estimate(est_args);
    if (mc_cmd->parsed()) return run_mc(mc_args);
  } catch (const Error& error) {
    std::cerr << "error: " << error.what() << "\n";
    return exit_code_for(error);
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
