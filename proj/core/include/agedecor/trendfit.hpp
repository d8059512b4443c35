#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "agedecor/difficulty.hpp"

namespace agedecor {

struct LabelFit {
  double alpha = 0.0;
  double beta = 0.0;
  double delta = 0.0;  // raw MAD of residuals, floored at 1e-9
  bool converged = false;
  bool mad_floored = false;
  int iterations = 0;
};

struct TrendFit {
  LabelFit by_label[2];
};

// Per-sample trend-affinity weights, 1 inside the MAD band and delta/|r|
// outside. Frozen after construction; never re-estimated during training.
struct AffinityWeights {
  std::unordered_map<std::int64_t, double> by_id;
  bool frozen = false;

  double at(std::int64_t id) const;
};

struct HuberFitResult {
  double alpha = 0.0;
  double beta = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Robust line fit of g on z for one label's records via IRLS with the
// standard Huber tuning (c = 1.345 * 1.4826 * MAD of current residuals).
// Records are sorted internally so the result is order-independent.
// Requires >= 10 records and nonzero z variance.
HuberFitResult huber_fit(std::vector<DifficultyRecord> records);

// r_i = g_i - (alpha_{y_i} + beta_{y_i} z_i), aligned with records.
std::vector<double> residuals(const std::vector<DifficultyRecord>& records,
                              const TrendFit& fit);

struct MadScale {
  double delta = 0.0;
  bool floored = false;
};

// Raw median absolute deviation around the median, floored at 1e-9.
MadScale mad_scale(const std::vector<double>& residuals);

// w = 1 when |r| <= delta_y, else delta_y / |r|. Uses fit.delta per label.
AffinityWeights affinity_weights(const std::vector<DifficultyRecord>& records,
                                 const TrendFit& fit);

struct TrendPipelineResult {
  TrendFit fit;
  AffinityWeights weights;
};

// Post-warm-up pipeline: label-conditioned Huber fits on the full training
// set, residuals, per-label MAD band, frozen weights.
TrendPipelineResult fit_trend_pipeline(const std::vector<DifficultyRecord>& records);

}  // namespace agedecor
