#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "agedecor/dataset.hpp"
#include "agedecor/model.hpp"

namespace agedecor {

struct ScoredSample {
  double score = 0.0;  // clamped probability
  int y = 0;
  double age_years = 0.0;
  double z = 0.0;
};

struct ScoredSet {
  std::vector<ScoredSample> samples;
};

ScoredSet score_dataset(const ClassifierParams& params, const Dataset& data);

// Rank-based (Mann-Whitney) estimator with midrank tie handling.
// Throws SingleClass when a label is absent.
double auc(const ScoredSet& s);

struct YoudenResult {
  double threshold = 0.0;
  double j = 0.0;
  bool degenerate = false;  // all scores equal
};

// argmax of TPR - FPR over distinct scores and their midpoints, decision
// rule yhat = [p >= tau]; ties broken toward the smaller threshold.
YoudenResult youden_threshold(const ScoredSet& validation);

struct LogisticFit {
  double intercept = 0.0;
  double slope = 0.0;  // per year of age
  bool quasi_separated = false;
  int iterations = 0;
};

// Univariate logistic fit P(decision = 1 | age) = sigmoid(a + s * age) by
// Newton-Raphson with step halving. Constant or perfectly age-separated
// decisions set the quasi_separated flag; |slope| is clamped to 0.5/year.
LogisticFit fit_decision_age_logistic(const std::vector<int>& decisions,
                                      const std::vector<double>& ages);

struct SeparationCoeffs {
  double s_plus = 0.0;   // fitted on the y = 1 subset (TPR trend)
  double s_minus = 0.0;  // fitted on the y = 0 subset (FPR trend)
  bool quasi_sep_plus = false;
  bool quasi_sep_minus = false;
};

SeparationCoeffs separation_coeffs(const ScoredSet& test, double threshold);

struct SeparationSummary {
  double sep = 0.0;             // (|s+| + |s-|) / 2, per year
  double dsep10_percent = 0.0;  // 100 * (exp(10 * sep) - 1)
};

SeparationSummary delta_sep10(double s_plus, double s_minus);

struct EvalReport {
  std::string method;
  double gamma = 0.0;
  std::uint64_t seed = 0;
  double auc = 0.0;
  double threshold = 0.0;
  double s_plus = 0.0;
  double s_minus = 0.0;
  double sep = 0.0;
  double dsep10_percent = 0.0;
  bool quasi_sep_plus = false;
  bool quasi_sep_minus = false;
  bool degenerate_threshold = false;
  int n_validation = 0;
  int n_test = 0;
  std::optional<double> dauc_vs_erm;
};

// Threshold from validation (Youden's J), metrics from test. Metadata
// fields (method/gamma/seed) are filled by the caller.
EvalReport evaluate(const ClassifierParams& params, const SplitBundle& split);

}  // namespace agedecor
