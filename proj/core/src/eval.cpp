#include "agedecor/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "agedecor/errors.hpp"
#include "agedecor/stats.hpp"

namespace agedecor {

ScoredSet score_dataset(const ClassifierParams& params, const Dataset& data) {
  ScoredSet out;
  out.samples.reserve(data.size());
  for (const Sample& s : data.samples)
    out.samples.push_back({forward(params, s.features), s.y, s.age_years, s.z});
  return out;
}

double auc(const ScoredSet& s) {
  std::size_t n_pos = 0, n_neg = 0;
  for (const auto& x : s.samples) (x.y == 1 ? n_pos : n_neg)++;
  if (n_pos == 0 || n_neg == 0)
    throw SingleClass("AUC needs both labels present");

  std::vector<std::size_t> idx(s.samples.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return s.samples[a].score < s.samples[b].score;
  });

  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() &&
           s.samples[idx[j + 1]].score == s.samples[idx[i]].score)
      ++j;
    // midrank of the tie block [i, j], 1-based
    const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t k = i; k <= j; ++k)
      if (s.samples[idx[k]].y == 1) rank_sum_pos += midrank;
    i = j + 1;
  }
  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n_neg);
  return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

YoudenResult youden_threshold(const ScoredSet& validation) {
  std::size_t n_pos = 0, n_neg = 0;
  for (const auto& x : validation.samples) (x.y == 1 ? n_pos : n_neg)++;
  if (n_pos == 0 || n_neg == 0)
    throw SingleClass("Youden threshold needs both labels present");

  std::vector<double> pos, neg;
  pos.reserve(n_pos);
  neg.reserve(n_neg);
  std::vector<double> distinct;
  distinct.reserve(validation.samples.size());
  for (const auto& x : validation.samples) {
    distinct.push_back(x.score);
    (x.y == 1 ? pos : neg).push_back(x.score);
  }
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());

  if (distinct.size() == 1) return {distinct.front(), 0.0, true};

  std::vector<double> candidates;
  candidates.reserve(2 * distinct.size());
  for (std::size_t k = 0; k < distinct.size(); ++k) {
    candidates.push_back(distinct[k]);
    if (k + 1 < distinct.size())
      candidates.push_back(0.5 * (distinct[k] + distinct[k + 1]));
  }
  std::sort(candidates.begin(), candidates.end());

  const auto frac_ge = [](const std::vector<double>& v, double tau) {
    const auto it = std::lower_bound(v.begin(), v.end(), tau);
    return static_cast<double>(v.end() - it) / static_cast<double>(v.size());
  };

  YoudenResult best{candidates.front(), -2.0, false};
  for (double tau : candidates) {
    const double j = frac_ge(pos, tau) - frac_ge(neg, tau);
    if (j > best.j) best = {tau, j, false};
  }
  return best;
}

namespace {

constexpr double kSlopeClampPerYear = 0.5;
constexpr int kMaxNewtonIter = 100;
constexpr double kGradTol = 1e-10;

double nll(const std::vector<int>& d, const std::vector<double>& t, double b0,
           double b1) {
  double s = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double mu =
        std::clamp(sigmoid(b0 + b1 * t[i]), 1e-12, 1.0 - 1e-12);
    s -= d[i] == 1 ? std::log(mu) : std::log(1.0 - mu);
  }
  return s;
}

}  // namespace

LogisticFit fit_decision_age_logistic(const std::vector<int>& decisions,
                                      const std::vector<double>& ages) {
  if (decisions.size() != ages.size() || decisions.empty())
    throw ShapeMismatch("decisions and ages must be non-empty and aligned");

  const bool any_one = std::any_of(decisions.begin(), decisions.end(),
                                   [](int d) { return d == 1; });
  const bool any_zero = std::any_of(decisions.begin(), decisions.end(),
                                    [](int d) { return d == 0; });
  if (!any_one || !any_zero) {
    LogisticFit f;
    f.quasi_separated = true;
    f.intercept = any_one ? 1.0 : -1.0;  // direction of the constant decision
    return f;
  }

  // Perfect age separation: every d=1 age strictly above every d=0 age (or
  // the reverse). The MLE diverges, so clamp and flag.
  double max0 = -std::numeric_limits<double>::infinity();
  double min0 = std::numeric_limits<double>::infinity();
  double max1 = -std::numeric_limits<double>::infinity();
  double min1 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ages.size(); ++i) {
    if (decisions[i] == 1) {
      max1 = std::max(max1, ages[i]);
      min1 = std::min(min1, ages[i]);
    } else {
      max0 = std::max(max0, ages[i]);
      min0 = std::min(min0, ages[i]);
    }
  }
  if (max0 < min1 || max1 < min0) {
    LogisticFit f;
    f.quasi_separated = true;
    f.slope = max0 < min1 ? kSlopeClampPerYear : -kSlopeClampPerYear;
    const double boundary = max0 < min1 ? 0.5 * (max0 + min1) : 0.5 * (max1 + min0);
    f.intercept = -f.slope * boundary;
    return f;
  }

  // Standardize age internally for conditioning; map coefficients back.
  const double m = stats::mean(ages);
  const double sd = std::max(stats::sample_sd(ages), 1e-12);
  std::vector<double> t(ages.size());
  for (std::size_t i = 0; i < ages.size(); ++i) t[i] = (ages[i] - m) / sd;

  double b0 = 0.0, b1 = 0.0;
  double old_nll = nll(decisions, t, b0, b1);
  LogisticFit fit;
  for (int iter = 1; iter <= kMaxNewtonIter; ++iter) {
    fit.iterations = iter;
    double g0 = 0.0, g1 = 0.0, h00 = 0.0, h01 = 0.0, h11 = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double mu = sigmoid(b0 + b1 * t[i]);
      const double r = static_cast<double>(decisions[i]) - mu;
      const double v = mu * (1.0 - mu);
      g0 += r;
      g1 += r * t[i];
      h00 += v;
      h01 += v * t[i];
      h11 += v * t[i] * t[i];
    }
    if (std::sqrt(g0 * g0 + g1 * g1) < kGradTol) break;
    const double det = h00 * h11 - h01 * h01;
    if (!(std::abs(det) > 1e-12)) {
      fit.quasi_separated = true;
      break;
    }
    double d0 = (h11 * g0 - h01 * g1) / det;
    double d1 = (-h01 * g0 + h00 * g1) / det;
    // Step halving when the Newton proposal does not reduce the loss.
    double step = 1.0;
    double new_nll = nll(decisions, t, b0 + d0, b1 + d1);
    for (int k = 0; k < 30 && !(new_nll <= old_nll); ++k) {
      step *= 0.5;
      new_nll = nll(decisions, t, b0 + step * d0, b1 + step * d1);
    }
    b0 += step * d0;
    b1 += step * d1;
    old_nll = new_nll;
  }

  fit.slope = b1 / sd;
  fit.intercept = b0 - b1 * m / sd;
  if (std::abs(fit.slope) > kSlopeClampPerYear) {
    fit.slope = std::copysign(kSlopeClampPerYear, fit.slope);
    fit.quasi_separated = true;
  }
  return fit;
}

SeparationCoeffs separation_coeffs(const ScoredSet& test, double threshold) {
  SeparationCoeffs out;
  for (int label = 0; label < 2; ++label) {
    std::vector<int> decisions;
    std::vector<double> ages;
    for (const auto& s : test.samples) {
      if (s.y != label) continue;
      decisions.push_back(s.score >= threshold ? 1 : 0);
      ages.push_back(s.age_years);
    }
    if (decisions.empty())
      throw SingleClass("separation_coeffs: label " + std::to_string(label) +
                        " absent from test set");
    const LogisticFit fit = fit_decision_age_logistic(decisions, ages);
    if (label == 1) {
      out.s_plus = fit.slope;
      out.quasi_sep_plus = fit.quasi_separated;
    } else {
      out.s_minus = fit.slope;
      out.quasi_sep_minus = fit.quasi_separated;
    }
  }
  return out;
}

SeparationSummary delta_sep10(double s_plus, double s_minus) {
  SeparationSummary out;
  out.sep = 0.5 * (std::abs(s_plus) + std::abs(s_minus));
  out.dsep10_percent = 100.0 * std::expm1(10.0 * out.sep);
  return out;
}

EvalReport evaluate(const ClassifierParams& params, const SplitBundle& split) {
  const ScoredSet val = score_dataset(params, split.validation);
  const ScoredSet test = score_dataset(params, split.test);

  const YoudenResult yt = youden_threshold(val);
  const SeparationCoeffs sc = separation_coeffs(test, yt.threshold);
  const SeparationSummary ss = delta_sep10(sc.s_plus, sc.s_minus);

  EvalReport r;
  r.gamma = split.gamma;
  r.auc = auc(test);
  r.threshold = yt.threshold;
  r.degenerate_threshold = yt.degenerate;
  r.s_plus = sc.s_plus;
  r.s_minus = sc.s_minus;
  r.quasi_sep_plus = sc.quasi_sep_plus;
  r.quasi_sep_minus = sc.quasi_sep_minus;
  r.sep = ss.sep;
  r.dsep10_percent = ss.dsep10_percent;
  r.n_validation = static_cast<int>(split.validation.size());
  r.n_test = static_cast<int>(split.test.size());
  return r;
}

}  // namespace agedecor
