#pragma once

#include <span>
#include <vector>

namespace agedecor {

struct PenaltyConfig {
  double lambda = 1.2;
  double denom_epsilon = 1e-8;
  bool use_affinity = true;  // false: w_i == 1
  bool use_coverage = true;  // false: C_y == 1
};

// One mini-batch as parallel views; w holds the frozen affinity weights and
// is ignored when use_affinity is false.
struct PenaltyBatch {
  std::span<const double> z;
  std::span<const int> y;
  std::span<const double> w;
};

struct WolsResult {
  double slope = 0.0;
  double mu_z = 0.0;
  double mu_g = 0.0;
  double denom = 0.0;  // sum_i w_i (z_i - mu_z)^2
  bool degenerate = false;
};

// Weighted least-squares slope of g on z. Slope is 0 with the degenerate
// flag when the weighted z variance falls at or below denom_epsilon.
WolsResult wols_slope(std::span<const double> z, std::span<const double> g,
                      std::span<const double> w, double denom_epsilon = 1e-8);

// Population variance of z divided by 0.25 (max variance on [0,1]),
// clipped to [0,1].
double coverage_score(std::span<const double> z);

double slope_penalty(double slope);  // slope^2

struct LabelSlopeStats {
  int count = 0;
  double mu_z = 0.0;
  double mu_g = 0.0;
  double denom = 0.0;
  double slope = 0.0;
  double coverage = 0.0;
  bool active = false;  // >= 2 samples and non-degenerate denominator
};

struct BatchSlopeStats {
  LabelSlopeStats by_label[2];
};

// Per-label WOLS slope and coverage from clamped probabilities
// (g_i = |p_i - y_i|). Labels with fewer than 2 samples stay inactive.
BatchSlopeStats batch_slope_stats(std::span<const double> probs,
                                  const PenaltyBatch& batch,
                                  const PenaltyConfig& cfg);

struct LossBreakdown {
  double bce = 0.0;
  double slope_sq[2] = {0.0, 0.0};  // beta_y^2, 0 when inactive
  double coverage[2] = {0.0, 0.0};
  double penalty = 0.0;             // lambda * sum_y C_y beta_y^2
  double total = 0.0;
};

// L_total = mean BCE + lambda * sum_y C_y * beta_y^2 over the batch.
LossBreakdown total_loss(std::span<const double> logits,
                         const PenaltyBatch& batch, const PenaltyConfig& cfg);

// d(lambda * sum_y C_y beta_y^2) / d(logit_k). The batch constants
// (w, mu_z, D, C) depend only on ages and frozen weights and carry no
// gradient; d(beta)/d(g_k) = w_k (z_k - mu_z) / D.
std::vector<double> penalty_grad_logits(std::span<const double> logits,
                                        const PenaltyBatch& batch,
                                        const PenaltyConfig& cfg);

}  // namespace agedecor
