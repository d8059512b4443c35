#include "agedecor/trendfit.hpp"

#include <algorithm>
#include <cmath>

#include "agedecor/errors.hpp"
#include "agedecor/stats.hpp"

namespace agedecor {

namespace {

constexpr double kMadFloor = 1e-9;
constexpr double kCoefTol = 1e-8;
constexpr int kMaxIter = 100;
constexpr double kHuberTuning = 1.345;
constexpr double kMadToSigma = 1.4826;

struct LineCoefs {
  double alpha;
  double beta;
};

// Weighted least squares on (z, g); weights must be nonnegative with
// positive total and nonzero weighted z variance.
LineCoefs wls_line(const std::vector<DifficultyRecord>& recs,
                   const std::vector<double>& w) {
  double sw = 0, swz = 0, swg = 0, swzz = 0, swzg = 0;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const double wi = w[i];
    const double z = recs[i].z;
    const double g = recs[i].g;
    sw += wi;
    swz += wi * z;
    swg += wi * g;
    swzz += wi * z * z;
    swzg += wi * z * g;
  }
  const double denom = sw * swzz - swz * swz;
  if (!(denom > 0.0) || !(sw > 0.0))
    throw DegenerateDesign("zero weighted z variance in line fit");
  const double beta = (sw * swzg - swz * swg) / denom;
  const double alpha = (swg - beta * swz) / sw;
  return {alpha, beta};
}

}  // namespace

HuberFitResult huber_fit(std::vector<DifficultyRecord> records) {
  if (records.size() < 10)
    throw TooFewRecords("huber_fit needs at least 10 records");
  std::sort(records.begin(), records.end(),
            [](const DifficultyRecord& a, const DifficultyRecord& b) {
              if (a.z != b.z) return a.z < b.z;
              if (a.g != b.g) return a.g < b.g;
              return a.sample_id < b.sample_id;
            });
  {
    std::vector<double> zs;
    zs.reserve(records.size());
    for (const auto& r : records) zs.push_back(r.z);
    if (stats::population_variance(zs) <= 0.0)
      throw DegenerateDesign("z has zero variance");
  }

  const std::size_t n = records.size();
  std::vector<double> w(n, 1.0), res(n, 0.0);
  LineCoefs coefs = wls_line(records, w);  // OLS start

  HuberFitResult out;
  for (int iter = 1; iter <= kMaxIter; ++iter) {
    out.iterations = iter;
    for (std::size_t i = 0; i < n; ++i)
      res[i] = records[i].g - (coefs.alpha + coefs.beta * records[i].z);

    const double med = stats::median(res);
    std::vector<double> absdev(n);
    for (std::size_t i = 0; i < n; ++i) absdev[i] = std::abs(res[i] - med);
    const double scale = kMadToSigma * stats::median(absdev);
    if (scale < 1e-12) {
      // Residual scale collapsed: the line interpolates the data.
      out.converged = true;
      break;
    }
    const double c = kHuberTuning * scale;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = std::abs(res[i]);
      w[i] = a <= c ? 1.0 : c / a;
    }
    const LineCoefs next = wls_line(records, w);
    const double change = std::max(std::abs(next.alpha - coefs.alpha),
                                   std::abs(next.beta - coefs.beta));
    coefs = next;
    if (change < kCoefTol) {
      out.converged = true;
      break;
    }
  }
  out.alpha = coefs.alpha;
  out.beta = coefs.beta;
  return out;
}

std::vector<double> residuals(const std::vector<DifficultyRecord>& records,
                              const TrendFit& fit) {
  std::vector<double> out(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const LabelFit& lf = fit.by_label[records[i].y];
    out[i] = records[i].g - (lf.alpha + lf.beta * records[i].z);
  }
  return out;
}

MadScale mad_scale(const std::vector<double>& res) {
  if (res.size() < 2) throw TooFewRecords("mad_scale needs >= 2 residuals");
  const double med = stats::median(res);
  std::vector<double> absdev(res.size());
  for (std::size_t i = 0; i < res.size(); ++i)
    absdev[i] = std::abs(res[i] - med);
  const double mad = stats::median(std::move(absdev));
  if (mad < kMadFloor) return {kMadFloor, true};
  return {mad, false};
}

double AffinityWeights::at(std::int64_t id) const {
  const auto it = by_id.find(id);
  if (it == by_id.end())
    throw EmptySubset("no affinity weight for sample " + std::to_string(id));
  return it->second;
}

AffinityWeights affinity_weights(const std::vector<DifficultyRecord>& records,
                                 const TrendFit& fit) {
  const auto res = residuals(records, fit);
  AffinityWeights weights;
  weights.by_id.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const double delta = fit.by_label[records[i].y].delta;
    const double a = std::abs(res[i]);
    weights.by_id[records[i].sample_id] = a <= delta ? 1.0 : delta / a;
  }
  weights.frozen = true;
  return weights;
}

TrendPipelineResult fit_trend_pipeline(
    const std::vector<DifficultyRecord>& records) {
  TrendPipelineResult out;
  for (int label = 0; label < 2; ++label) {
    std::vector<DifficultyRecord> subset;
    for (const auto& r : records)
      if (r.y == label) subset.push_back(r);
    if (subset.empty())
      throw EmptyLabelSubset("no records with label " + std::to_string(label));
    const HuberFitResult fit = huber_fit(subset);
    LabelFit& lf = out.fit.by_label[label];
    lf.alpha = fit.alpha;
    lf.beta = fit.beta;
    lf.converged = fit.converged;
    lf.iterations = fit.iterations;

    std::vector<double> res(subset.size());
    for (std::size_t i = 0; i < subset.size(); ++i)
      res[i] = subset[i].g - (fit.alpha + fit.beta * subset[i].z);
    const MadScale mad = mad_scale(res);
    lf.delta = mad.delta;
    lf.mad_floored = mad.floored;
  }
  out.weights = affinity_weights(records, out.fit);
  return out;
}

}  // namespace agedecor
