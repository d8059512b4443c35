#pragma once

#include <cstdint>
#include <string>

#include "agedecor/manifest.hpp"

namespace agedecor::cli {

// Exit codes: 0 success, 1 partial cell failure / runtime error,
// 2 configuration error.

int cmd_generate(const ExperimentManifest& m);

struct TrainArgs {
  double gamma = 0.0;
  std::uint64_t seed = 0;
  std::string method = "ours";
  double lambda = -1.0;  // < 0: keep manifest value
  bool no_affinity = false;
  bool no_coverage = false;
};
int cmd_train(const ExperimentManifest& m, const TrainArgs& args);

struct RunArgs {
  bool add_noaffinity = false;
  bool add_nocoverage = false;
  int workers = -1;  // < 0: keep manifest value
};
int cmd_run(const ExperimentManifest& m, const RunArgs& args);

struct EvaluateArgs {
  double gamma = 0.0;
  std::uint64_t seed = 0;
  std::string method;
};
int cmd_evaluate(const ExperimentManifest& m, const EvaluateArgs& args);

struct TrendArgs {
  double gamma = 0.0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int bins = 0;  // 0: manifest trend_bins
  std::string out_file;
};
int cmd_trend(const ExperimentManifest& m, const TrendArgs& args);

int cmd_plotdata(const ExperimentManifest& m);

}  // namespace agedecor::cli
