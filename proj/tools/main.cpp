#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "agedecor/errors.hpp"
#include "agedecor/manifest.hpp"
#include "commands.hpp"

using namespace agedecor;

int main(int argc, char** argv) {
  CLI::App app{"agedecor: age-difficulty decorrelation experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "manifest file (key = value)")
        ->required();
    cmd->add_option("--out", out_override, "override the manifest out_dir");
  };

  auto* generate = app.add_subcommand(
      "generate", "Generate the population and per-gamma split bundles");
  add_common(generate);

  cli::TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train a single cell");
  add_common(train);
  train->add_option("--gamma", train_args.gamma, "shift strength")->required();
  train->add_option("--seed", train_args.seed, "training seed")->required();
  train->add_option("--method", train_args.method,
                    "ours | erm | resampled | ours_noaffinity | ours_nocoverage");
  train->add_option("--lambda", train_args.lambda, "penalty weight override");
  train->add_flag("--no-affinity", train_args.no_affinity,
                  "disable trend-affinity weights (w = 1)");
  train->add_flag("--no-coverage", train_args.no_coverage,
                  "disable the coverage score (C = 1)");

  cli::RunArgs run_args;
  auto* run = app.add_subcommand(
      "run", "Run the full methods x gammas x seeds matrix (resumable)");
  add_common(run);
  run->add_flag("--no-affinity", run_args.add_noaffinity,
                "also run the ours_noaffinity ablation");
  run->add_flag("--no-coverage", run_args.add_nocoverage,
                "also run the ours_nocoverage ablation");
  run->add_option("--workers", run_args.workers, "worker pool size override");

  cli::EvaluateArgs eval_args;
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a trained cell");
  add_common(evaluate);
  evaluate->add_option("--gamma", eval_args.gamma, "shift strength")->required();
  evaluate->add_option("--seed", eval_args.seed, "training seed")->required();
  evaluate->add_option("--method", eval_args.method, "method directory name")
      ->required();

  cli::TrendArgs trend_args;
  auto* trend = app.add_subcommand(
      "trend", "Warm-up age-difficulty trend report (CSV)");
  add_common(trend);
  trend->add_option("--gamma", trend_args.gamma, "shift strength (default 0)");
  auto* seed_opt =
      trend->add_option("--seed", trend_args.seed, "training seed");
  trend->add_option("--bins", trend_args.bins, "number of z bins");
  trend->add_option("--out-file", trend_args.out_file,
                    "write CSV here instead of stdout");

  auto* plotdata = app.add_subcommand(
      "plotdata", "Export fig1/fig2/fig3 plot CSVs from a results tree");
  add_common(plotdata);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    ExperimentManifest manifest = load_manifest(config_path);
    if (!out_override.empty()) manifest.out_dir = out_override;

    if (generate->parsed()) return cli::cmd_generate(manifest);
    if (train->parsed()) return cli::cmd_train(manifest, train_args);
    if (run->parsed()) return cli::cmd_run(manifest, run_args);
    if (evaluate->parsed()) return cli::cmd_evaluate(manifest, eval_args);
    if (trend->parsed()) {
      trend_args.seed_given = seed_opt->count() > 0;
      return cli::cmd_trend(manifest, trend_args);
    }
    if (plotdata->parsed()) return cli::cmd_plotdata(manifest);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const MissingResults& e) {
    std::cerr << "missing results: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
