#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "agedecor/dataset.hpp"
#include "agedecor/rng.hpp"

namespace agedecor {

// Synthetic population in which age confounds both the features and the
// label: prevalence rises with normalized age z, and z leaks into the
// feature vector along a direction orthogonal to the disease signal.
struct GeneratorConfig {
  int n_pool = 20000;
  int feature_dim = 16;
  double prevalence_slope = 5.0;         // kappa, log-odds per unit z
  double prevalence_midpoint = 0.5;      // a0, z at which prevalence is 0.5
  double disease_signal = 1.6;           // class-mean separation along e0
  double age_morphology_strength = 2.0;  // z leakage into features along e1
  double noise_sd = 1.0;
  double age_lo_years = 20.0;
  double age_hi_years = 90.0;

  void validate() const;
};

struct ShiftConfig {
  double gamma = 0.0;
  double pivot_train = 0.0;  // b_tr, 25th percentile of pool z
  double pivot_test = 0.0;   // b_te, 75th percentile of pool z
  int n_train = 4000;
  int n_test = 2000;
  double val_fraction = 0.10;

  void validate() const;
};

// Pivots from the pool's z percentiles (25th / 75th).
ShiftConfig make_shift_config(const Dataset& pool, double gamma, int n_train,
                              int n_test, double val_fraction = 0.10);

// Ages uniform on [age_lo_years, age_hi_years], then normalized;
// y ~ Bernoulli(sigmoid(kappa * (z - a0)));
// features = y * disease_signal * e0 + age_morphology_strength * z * e1
//            + N(0, noise_sd^2 I).
// Reproducible from (cfg, seed).
Dataset generate_population(const GeneratorConfig& cfg, std::uint64_t seed);

// Unnormalized sampling weights. For gamma > 0 the train weight favors low
// z and the test weight high z; both equal 1 at their pivot.
double train_sampling_weight(double z, double gamma, double pivot_train);
double test_sampling_weight(double z, double gamma, double pivot_test);

// Weighted draws without replacement (disjoint by id), then val_fraction of
// the train draw moves to validation.
SplitBundle shift_split(const Dataset& pool, const ShiftConfig& shift,
                        std::uint64_t seed);

// Uniform split by id; |val| = round(fraction * |train|).
std::pair<Dataset, Dataset> holdout_validation(const Dataset& train,
                                               double fraction,
                                               std::uint64_t seed);

// Exact weighted sampling without replacement (exponential-keys method).
// Returns k indices in ascending order.
std::vector<std::size_t> weighted_sample_without_replacement(
    const std::vector<double>& weights, std::size_t k, RngStream& rng);

}  // namespace agedecor
