#include "agedecor/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "agedecor/errors.hpp"
#include "agedecor/stats.hpp"

namespace agedecor {

void GeneratorConfig::validate() const {
  if (n_pool < 100) throw InvalidConfig("n_pool must be >= 100");
  if (feature_dim < 2) throw InvalidConfig("feature_dim must be >= 2");
  if (!(noise_sd > 0)) throw InvalidConfig("noise_sd must be > 0");
  if (!(age_hi_years > age_lo_years))
    throw InvalidConfig("age range must be nondegenerate");
  if (prevalence_midpoint < 0.0 || prevalence_midpoint > 1.0)
    throw InvalidConfig("prevalence_midpoint must lie in [0,1]");
}

void ShiftConfig::validate() const {
  if (gamma < 0) throw InvalidConfig("gamma must be >= 0");
  if (!(pivot_train >= 0.0 && pivot_train <= pivot_test && pivot_test <= 1.0))
    throw InvalidConfig("pivots must satisfy 0 <= b_tr <= b_te <= 1");
  if (n_train <= 0 || n_test <= 0)
    throw InvalidConfig("split sizes must be positive");
  if (!(val_fraction > 0.0 && val_fraction < 1.0))
    throw InvalidConfig("val_fraction must lie in (0,1)");
}

ShiftConfig make_shift_config(const Dataset& pool, double gamma, int n_train,
                              int n_test, double val_fraction) {
  std::vector<double> zs;
  zs.reserve(pool.size());
  for (const Sample& s : pool.samples) zs.push_back(s.z);
  ShiftConfig cfg;
  cfg.gamma = gamma;
  cfg.pivot_train = stats::percentile(zs, 0.25);
  cfg.pivot_test = stats::percentile(std::move(zs), 0.75);
  cfg.n_train = n_train;
  cfg.n_test = n_test;
  cfg.val_fraction = val_fraction;
  return cfg;
}

Dataset generate_population(const GeneratorConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  auto rng = rng_stream(seed, "population");

  Dataset pool;
  pool.feature_dim = cfg.feature_dim;
  pool.samples.resize(static_cast<std::size_t>(cfg.n_pool));
  for (std::size_t i = 0; i < pool.samples.size(); ++i) {
    pool.samples[i].id = static_cast<std::int64_t>(i);
    pool.samples[i].age_years = rng.uniform(cfg.age_lo_years, cfg.age_hi_years);
  }
  pool = normalize_ages(std::move(pool));

  for (Sample& s : pool.samples) {
    const double logit = cfg.prevalence_slope * (s.z - cfg.prevalence_midpoint);
    const double p1 = 1.0 / (1.0 + std::exp(-logit));
    s.y = rng.bernoulli(p1) ? 1 : 0;
    s.features.resize(static_cast<std::size_t>(cfg.feature_dim));
    for (int j = 0; j < cfg.feature_dim; ++j) {
      double v = cfg.noise_sd * rng.normal();
      if (j == 0) v += cfg.disease_signal * s.y;
      if (j == 1) v += cfg.age_morphology_strength * s.z;
      s.features[static_cast<std::size_t>(j)] = v;
    }
  }
  return pool;
}

double train_sampling_weight(double z, double gamma, double pivot_train) {
  return std::exp(-gamma * (z - pivot_train));
}

double test_sampling_weight(double z, double gamma, double pivot_test) {
  return std::exp(gamma * (z - pivot_test));
}

std::vector<std::size_t> weighted_sample_without_replacement(
    const std::vector<double>& weights, std::size_t k, RngStream& rng) {
  if (k > weights.size())
    throw InsufficientPool("requested more draws than candidates");
  // Efraimidis-Spirakis keys: log(u)/w, keep the k largest.
  std::vector<std::pair<double, std::size_t>> keyed(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double u = 1.0 - rng.uniform();  // (0, 1]
    keyed[i] = {std::log(u) / weights[i], i};
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<std::size_t> chosen(k);
  for (std::size_t i = 0; i < k; ++i) chosen[i] = keyed[i].second;
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

namespace {

Dataset subset(const Dataset& pool, const std::vector<std::size_t>& idx) {
  Dataset out;
  out.feature_dim = pool.feature_dim;
  out.age_min = pool.age_min;
  out.age_max = pool.age_max;
  out.samples.reserve(idx.size());
  for (std::size_t i : idx) out.samples.push_back(pool.samples[i]);
  return out;
}

}  // namespace

SplitBundle shift_split(const Dataset& pool, const ShiftConfig& shift,
                        std::uint64_t seed) {
  shift.validate();
  const std::size_t need =
      static_cast<std::size_t>(shift.n_train) + static_cast<std::size_t>(shift.n_test);
  if (need > pool.size())
    throw InsufficientPool("n_train + n_test exceeds pool size");

  auto rng = rng_stream(seed, "shift");

  std::vector<double> w_tr(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i)
    w_tr[i] = train_sampling_weight(pool.samples[i].z, shift.gamma,
                                    shift.pivot_train);
  const auto train_idx = weighted_sample_without_replacement(
      w_tr, static_cast<std::size_t>(shift.n_train), rng);

  std::vector<char> taken(pool.size(), 0);
  for (std::size_t i : train_idx) taken[i] = 1;
  std::vector<std::size_t> remaining;
  remaining.reserve(pool.size() - train_idx.size());
  for (std::size_t i = 0; i < pool.size(); ++i)
    if (!taken[i]) remaining.push_back(i);

  std::vector<double> w_te(remaining.size());
  for (std::size_t j = 0; j < remaining.size(); ++j)
    w_te[j] = test_sampling_weight(pool.samples[remaining[j]].z, shift.gamma,
                                   shift.pivot_test);
  const auto test_local = weighted_sample_without_replacement(
      w_te, static_cast<std::size_t>(shift.n_test), rng);
  std::vector<std::size_t> test_idx(test_local.size());
  for (std::size_t j = 0; j < test_local.size(); ++j)
    test_idx[j] = remaining[test_local[j]];

  const Dataset train_full = subset(pool, train_idx);
  auto [train, validation] =
      holdout_validation(train_full, shift.val_fraction, seed);

  SplitBundle bundle;
  bundle.train = std::move(train);
  bundle.validation = std::move(validation);
  bundle.test = subset(pool, test_idx);
  bundle.gamma = shift.gamma;
  bundle.seed = seed;
  return bundle;
}

std::pair<Dataset, Dataset> holdout_validation(const Dataset& train,
                                               double fraction,
                                               std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw InvalidConfig("holdout fraction must lie in (0,1)");
  auto rng = rng_stream(seed, "holdout");
  const auto perm = rng.permutation(train.size());
  const auto n_val = static_cast<std::size_t>(
      std::lround(fraction * static_cast<double>(train.size())));

  std::vector<std::size_t> val_idx(perm.begin(),
                                   perm.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> train_idx(perm.begin() + static_cast<std::ptrdiff_t>(n_val),
                                     perm.end());
  std::sort(val_idx.begin(), val_idx.end());
  std::sort(train_idx.begin(), train_idx.end());
  return {subset(train, train_idx), subset(train, val_idx)};
}

}  // namespace agedecor
