#pragma once

#include <optional>
#include <span>
#include <vector>

namespace agedecor::stats {

double mean(std::span<const double> v);

// Sample standard deviation (ddof = 1); 0 when fewer than two values.
double sample_sd(std::span<const double> v);

// sample_sd / sqrt(n).
double standard_error(std::span<const double> v);

double population_variance(std::span<const double> v);

// Takes a copy; the input order does not matter. Even n averages the two
// middle values.
double median(std::vector<double> v);

// Linear interpolation between closest ranks, q in [0, 1].
double percentile(std::vector<double> v, double q);

// nullopt when either side has (numerically) zero variance.
std::optional<double> pearson_r(std::span<const double> x,
                                std::span<const double> y);

}  // namespace agedecor::stats
