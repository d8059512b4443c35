#pragma once

#include <filesystem>
#include <string>

#include "agedecor/dataset.hpp"
#include "agedecor/eval.hpp"
#include "agedecor/manifest.hpp"
#include "agedecor/trainer.hpp"

namespace agedecor {

std::string format_gamma(double gamma);

// Canonical on-disk layout of one experiment tree.
struct OutputLayout {
  std::filesystem::path root;

  std::filesystem::path data_dir() const { return root / "data"; }
  std::filesystem::path population_csv() const {
    return data_dir() / "population.csv";
  }
  std::filesystem::path population_meta() const {
    return data_dir() / "population_meta.json";
  }
  std::filesystem::path split_dir(double gamma) const {
    return data_dir() / "splits" / ("gamma_" + format_gamma(gamma));
  }
  std::filesystem::path results_dir() const { return root / "results"; }
  std::filesystem::path cell_dir(const std::string& method, double gamma,
                                 std::uint64_t seed) const {
    return results_dir() / method / ("gamma_" + format_gamma(gamma)) /
           ("seed_" + std::to_string(seed));
  }
  std::filesystem::path summary_csv() const { return root / "summary.csv"; }
  std::filesystem::path plots_dir() const { return root / "plots"; }
};

// Split bundle directory: train/val/test CSVs plus meta.json carrying
// gamma, seed, pivots and the normalization anchors.
struct SplitMeta {
  double gamma = 0.0;
  std::uint64_t seed = 0;
  double pivot_train = 0.0;
  double pivot_test = 0.0;
  double age_min = 0.0;
  double age_max = 0.0;
  double val_fraction = 0.0;
};

void save_split_bundle(const SplitBundle& bundle, const SplitMeta& meta,
                       const std::filesystem::path& dir);
SplitBundle load_split_bundle(const std::filesystem::path& dir);
SplitMeta load_split_meta(const std::filesystem::path& dir);

void save_population_meta(const GeneratorConfig& cfg, std::uint64_t seed,
                          const Dataset& pool, const std::filesystem::path& path);

void save_eval_report(const EvalReport& report, const std::filesystem::path& path);
EvalReport load_eval_report(const std::filesystem::path& path);

void save_run_artifact(const RunArtifact& artifact, const std::filesystem::path& path);
RunArtifact load_run_artifact(const std::filesystem::path& path);

// epoch,bce,slope_y0,slope_y1,coverage_y0,coverage_y1
void save_epoch_log_csv(const std::vector<EpochLog>& logs,
                        const std::filesystem::path& path);

// bin,label,mean_g,sem,count
void write_trend_csv(const TrendReport& report, std::ostream& out);
void save_trend_csv(const TrendReport& report, const std::filesystem::path& path);

}  // namespace agedecor
