#pragma once

#include <cstdint>
#include <vector>

#include "agedecor/dataset.hpp"
#include "agedecor/model.hpp"

namespace agedecor {

struct DifficultyRecord {
  std::int64_t sample_id = 0;
  double g = 0.0;  // |p - y|
  double z = 0.0;
  int y = 0;
};

// Bounded [0,1] difficulty proxy; equals the BCE gradient magnitude w.r.t.
// the logit.
double sample_difficulty(double p, int y);

// Pure evaluation pass over the dataset with frozen parameters.
std::vector<DifficultyRecord> collect_difficulties(const ClassifierParams& params,
                                                   const Dataset& data);

struct TrendBin {
  double center = 0.0;
  double mean_g = 0.0;
  double sem = 0.0;
  int count = 0;
};

struct LabelTrend {
  int label = 0;
  std::vector<TrendBin> bins;  // all n_bins bins; empty ones have count 0
  double pearson_r = 0.0;      // over (center, mean) of non-empty bins
  bool degenerate_variance = false;
  double slope = 0.0;          // OLS line over the same pairs
  double intercept = 0.0;
};

struct TrendReport {
  int n_bins = 0;
  LabelTrend labels[2];
};

// Equal-width z bins on [0,1]; per-label bin means and SEM; empty bins are
// skipped in the correlation. Throws EmptyLabelSubset if a label is absent.
TrendReport trend_report(const std::vector<DifficultyRecord>& records,
                         int n_bins);

}  // namespace agedecor
