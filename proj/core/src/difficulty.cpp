#include "agedecor/difficulty.hpp"

#include <algorithm>
#include <cmath>

#include "agedecor/errors.hpp"
#include "agedecor/stats.hpp"

namespace agedecor {

double sample_difficulty(double p, int y) {
  return std::abs(p - static_cast<double>(y));
}

std::vector<DifficultyRecord> collect_difficulties(const ClassifierParams& params,
                                                   const Dataset& data) {
  std::vector<DifficultyRecord> out;
  out.reserve(data.size());
  for (const Sample& s : data.samples) {
    const double p = forward(params, s.features);
    out.push_back({s.id, sample_difficulty(p, s.y), s.z, s.y});
  }
  return out;
}

TrendReport trend_report(const std::vector<DifficultyRecord>& records,
                         int n_bins) {
  if (n_bins < 3) throw InvalidConfig("trend_report needs n_bins >= 3");

  TrendReport report;
  report.n_bins = n_bins;
  for (int label = 0; label < 2; ++label) {
    std::vector<std::vector<double>> per_bin(static_cast<std::size_t>(n_bins));
    std::size_t total = 0;
    for (const DifficultyRecord& r : records) {
      if (r.y != label) continue;
      auto b = static_cast<int>(r.z * n_bins);
      b = std::clamp(b, 0, n_bins - 1);
      per_bin[static_cast<std::size_t>(b)].push_back(r.g);
      ++total;
    }
    if (total == 0)
      throw EmptyLabelSubset("no records with label " + std::to_string(label));

    LabelTrend& lt = report.labels[label];
    lt.label = label;
    std::vector<double> centers, means;
    for (int b = 0; b < n_bins; ++b) {
      const auto& vals = per_bin[static_cast<std::size_t>(b)];
      TrendBin bin;
      bin.center = (b + 0.5) / static_cast<double>(n_bins);
      bin.count = static_cast<int>(vals.size());
      if (!vals.empty()) {
        bin.mean_g = stats::mean(vals);
        bin.sem = stats::standard_error(vals);
        centers.push_back(bin.center);
        means.push_back(bin.mean_g);
      }
      lt.bins.push_back(bin);
    }

    const auto r = stats::pearson_r(centers, means);
    if (r) {
      lt.pearson_r = *r;
    } else {
      lt.pearson_r = 0.0;
      lt.degenerate_variance = true;
    }

    // OLS line over the same (center, mean) pairs.
    const double mx = stats::mean(centers);
    const double my = stats::mean(means);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
      sxx += (centers[i] - mx) * (centers[i] - mx);
      sxy += (centers[i] - mx) * (means[i] - my);
    }
    if (sxx > 0.0) {
      lt.slope = sxy / sxx;
      lt.intercept = my - lt.slope * mx;
    } else {
      lt.slope = 0.0;
      lt.intercept = my;
    }
  }
  return report;
}

}  // namespace agedecor
