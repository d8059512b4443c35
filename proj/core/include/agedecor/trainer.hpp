#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agedecor/dataset.hpp"
#include "agedecor/difficulty.hpp"
#include "agedecor/eval.hpp"
#include "agedecor/model.hpp"
#include "agedecor/penalty.hpp"
#include "agedecor/synthgen.hpp"
#include "agedecor/trendfit.hpp"

namespace agedecor {

enum class Method { ours, erm, resampled };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct TrainConfig {
  int epochs = 30;
  int warmup_epochs = 1;
  int batch_size = 64;
  double lr = 0.001;
  Method method = Method::ours;
  PenaltyConfig penalty;
  std::uint64_t seed = 0;
  int age_bin_years = 10;  // resampled stratification
  ArchType model = ArchType::linear;
  int hidden = 8;  // mlp only
  int trend_bins = 10;

  void validate() const;
};

struct EpochLog {
  int epoch = 0;
  double bce = 0.0;
  double slope_y0 = 0.0;
  double slope_y1 = 0.0;
  double coverage_y0 = 0.0;
  double coverage_y1 = 0.0;
};

struct RunArtifact {
  ClassifierParams params;
  std::optional<TrendFit> trendfit;
  std::optional<AffinityWeights> affinity;
  TrendReport warmup_trend;
  std::vector<EpochLog> logs;
  double elapsed_seconds = 0.0;  // excluded from the determinism contract
  std::int64_t penalty_path_calls = 0;
  TrainConfig config;
};

// Warm-up (BCE only) -> difficulty snapshot and frozen affinity weights ->
// penalized epochs for method "ours"; plain BCE throughout for erm and
// resampled. Deterministic given (split, cfg).
RunArtifact train(const SplitBundle& split, const TrainConfig& cfg);

// Age-stratified batches drawn with replacement, uniform across non-empty
// decade bins; per-batch bin counts differ by at most one.
std::vector<std::vector<std::size_t>> resampled_batches(const Dataset& train,
                                                        const TrainConfig& cfg,
                                                        RngStream& rng,
                                                        int n_batches);

// A named run configuration: base method plus penalty ablation switches.
struct MethodVariant {
  std::string name;
  Method method = Method::ours;
  bool use_affinity = true;
  bool use_coverage = true;
};

// Recognized names: ours, erm, resampled, ours_noaffinity, ours_nocoverage.
MethodVariant method_variant(const std::string& name);

struct ShiftParams {
  int n_train = 4000;
  int n_test = 2000;
  double val_fraction = 0.10;
};

struct CellId {
  std::string method;
  double gamma = 0.0;
  std::uint64_t seed = 0;
};

struct CellResult {
  CellId id;
  bool ok = false;
  std::string error;
  RunArtifact run;
  EvalReport eval;
};

struct MatrixSpec {
  std::vector<double> gammas;
  std::vector<std::uint64_t> seeds;
  std::vector<MethodVariant> methods;
  ShiftParams shift;
  TrainConfig base;  // method/penalty/seed overridden per cell
  std::uint64_t split_seed = 0;
  int workers = 0;  // 0: hardware concurrency

  // Optional hooks: skip() filters cells out entirely; on_done() is invoked
  // once per finished cell under a lock.
  std::function<bool(const CellId&)> skip;
  std::function<void(const CellResult&)> on_done;
};

// Full methods x gammas x seeds cross product; one split per gamma, shared
// across methods and seeds. Cell failures are isolated and recorded.
std::vector<CellResult> run_matrix(const Dataset& pool, const MatrixSpec& spec);

// Same, over splits already on hand (one per gamma in spec.gammas).
std::vector<CellResult> run_matrix(const std::map<double, SplitBundle>& splits,
                                   const MatrixSpec& spec);

struct AggregateRow {
  std::string method;
  double gamma = 0.0;
  double auc_mean = 0.0;
  double auc_se = 0.0;
  double s_plus_mean = 0.0;   // mean |s+|
  double s_minus_mean = 0.0;  // mean |s-|
  double dsep10_mean = 0.0;   // per-seed dsep10 averaged
  double dsep10_se = 0.0;
  int n_ok = 0;
  int n_total = 0;
};

// Mean +- standard error (sd / sqrt(n)) across seeds, per (method, gamma),
// in the listed order.
std::vector<AggregateRow> aggregate_evals(
    const std::vector<std::pair<CellId, EvalReport>>& evals,
    const std::vector<std::string>& methods, const std::vector<double>& gammas,
    int n_seeds_total);

std::vector<AggregateRow> aggregate(const std::vector<CellResult>& cells,
                                    const std::vector<MethodVariant>& methods,
                                    const std::vector<double>& gammas,
                                    int n_seeds_total);

}  // namespace agedecor
