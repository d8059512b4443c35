#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "agedecor/synthgen.hpp"
#include "agedecor/trainer.hpp"

namespace agedecor {

// Flat key=value experiment description; the single source of truth for a
// reproducible pipeline run. No environment-variable configuration.
struct ExperimentManifest {
  int schema_version = 1;
  std::filesystem::path out_dir = "runs/default";
  std::uint64_t pool_seed = 1000;
  std::uint64_t split_seed = 2000;
  GeneratorConfig generator;
  std::vector<double> gammas{0.0, 4.0, 8.0};
  int n_train = 4000;
  int n_test = 2000;
  double val_fraction = 0.10;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::vector<std::string> methods{"ours", "erm", "resampled"};
  TrainConfig train;  // method and seed are set per cell
  int workers = 0;

  void validate() const;
};

ExperimentManifest default_manifest();

// Parses `key = value` lines; '#' starts a comment; unknown keys are
// rejected. schema_version is required.
ExperimentManifest load_manifest(const std::filesystem::path& path);

void save_manifest(const ExperimentManifest& m, const std::filesystem::path& path);

}  // namespace agedecor
