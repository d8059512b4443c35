#include "agedecor/penalty.hpp"

#include <algorithm>
#include <cmath>

#include "agedecor/errors.hpp"
#include "agedecor/model.hpp"

namespace agedecor {

WolsResult wols_slope(std::span<const double> z, std::span<const double> g,
                      std::span<const double> w, double denom_epsilon) {
  if (z.empty()) throw EmptySubset("wols_slope on empty subset");
  WolsResult r;
  double sw = 0.0, swz = 0.0, swg = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    sw += w[i];
    swz += w[i] * z[i];
    swg += w[i] * g[i];
  }
  r.mu_z = swz / sw;
  r.mu_g = swg / sw;
  double num = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double dz = z[i] - r.mu_z;
    r.denom += w[i] * dz * dz;
    num += w[i] * dz * (g[i] - r.mu_g);
  }
  if (r.denom <= denom_epsilon) {
    r.degenerate = true;
    r.slope = 0.0;
  } else {
    r.slope = num / r.denom;
  }
  return r;
}

double coverage_score(std::span<const double> z) {
  if (z.empty()) return 0.0;
  bool all_equal = true;
  for (double v : z)
    if (v != z[0]) {
      all_equal = false;
      break;
    }
  if (all_equal) return 0.0;
  double mean = 0.0;
  for (double v : z) mean += v;
  mean /= static_cast<double>(z.size());
  double var = 0.0;
  for (double v : z) var += (v - mean) * (v - mean);
  var /= static_cast<double>(z.size());
  return std::clamp(var / 0.25, 0.0, 1.0);
}

double slope_penalty(double slope) { return slope * slope; }

namespace {

struct LabelView {
  std::vector<double> z, g, w;
  std::vector<std::size_t> index;  // positions in the batch
};

LabelView gather(std::span<const double> probs, const PenaltyBatch& batch,
                 int label, bool use_affinity) {
  LabelView v;
  for (std::size_t i = 0; i < batch.y.size(); ++i) {
    if (batch.y[i] != label) continue;
    v.z.push_back(batch.z[i]);
    v.g.push_back(std::abs(probs[i] - static_cast<double>(label)));
    v.w.push_back(use_affinity ? batch.w[i] : 1.0);
    v.index.push_back(i);
  }
  return v;
}

}  // namespace

BatchSlopeStats batch_slope_stats(std::span<const double> probs,
                                  const PenaltyBatch& batch,
                                  const PenaltyConfig& cfg) {
  BatchSlopeStats stats;
  for (int label = 0; label < 2; ++label) {
    const LabelView v = gather(probs, batch, label, cfg.use_affinity);
    LabelSlopeStats& s = stats.by_label[label];
    s.count = static_cast<int>(v.z.size());
    if (s.count < 2) continue;
    const WolsResult r = wols_slope(v.z, v.g, v.w, cfg.denom_epsilon);
    s.mu_z = r.mu_z;
    s.mu_g = r.mu_g;
    s.denom = r.denom;
    s.slope = r.slope;
    s.coverage = cfg.use_coverage ? coverage_score(v.z) : 1.0;
    s.active = !r.degenerate;
  }
  return stats;
}

LossBreakdown total_loss(std::span<const double> logits,
                         const PenaltyBatch& batch, const PenaltyConfig& cfg) {
  std::vector<double> probs(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i)
    probs[i] = clamp_prob(sigmoid(logits[i]));

  LossBreakdown out;
  double bce = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i)
    bce += bce_loss(probs[i], batch.y[i]);
  out.bce = probs.empty() ? 0.0 : bce / static_cast<double>(probs.size());

  const BatchSlopeStats stats = batch_slope_stats(probs, batch, cfg);
  for (int label = 0; label < 2; ++label) {
    const LabelSlopeStats& s = stats.by_label[label];
    if (s.count >= 2) out.coverage[label] = s.coverage;
    if (!s.active) continue;
    out.slope_sq[label] = slope_penalty(s.slope);
    out.penalty += cfg.lambda * s.coverage * out.slope_sq[label];
  }
  out.total = out.bce + out.penalty;
  return out;
}

std::vector<double> penalty_grad_logits(std::span<const double> logits,
                                        const PenaltyBatch& batch,
                                        const PenaltyConfig& cfg) {
  std::vector<double> probs(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i)
    probs[i] = clamp_prob(sigmoid(logits[i]));

  std::vector<double> grad(logits.size(), 0.0);
  const BatchSlopeStats stats = batch_slope_stats(probs, batch, cfg);
  for (int label = 0; label < 2; ++label) {
    const LabelSlopeStats& s = stats.by_label[label];
    if (!s.active) continue;
    const double factor = 2.0 * cfg.lambda * s.coverage * s.slope / s.denom;
    const double dgdp = label == 0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
      if (batch.y[i] != label) continue;
      const double wi = cfg.use_affinity ? batch.w[i] : 1.0;
      grad[i] = factor * wi * (batch.z[i] - s.mu_z) * dgdp *
                prob_grad_logit(probs[i]);
    }
  }
  return grad;
}

}  // namespace agedecor
