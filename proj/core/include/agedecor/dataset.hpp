#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace agedecor {

// Atomic training record: feature vector, age in years, normalized age z,
// binary label.
struct Sample {
  std::int64_t id = 0;
  std::vector<double> features;
  double age_years = 0.0;
  double z = 0.0;
  int y = 0;
};

// Immutable after construction. age_min/age_max are the normalization
// anchors; splits derived from a pool carry the pool's anchors verbatim.
struct Dataset {
  std::vector<Sample> samples;
  int feature_dim = 0;
  double age_min = 0.0;
  double age_max = 0.0;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

struct SplitBundle {
  Dataset train;
  Dataset validation;
  Dataset test;
  double gamma = 0.0;
  std::uint64_t seed = 0;
};

// z_i = (age_i - age_min) / (age_max - age_min) with pool-level anchors.
// Idempotent. Throws DegenerateAges when all ages coincide.
Dataset normalize_ages(Dataset pool);

double prevalence(const Dataset& ds);

// CSV with header `id,age_years,z,y,f0,...,f{d-1}`, UTF-8, '.' decimal
// separator. Doubles are written in shortest round-trip form.
void save_csv(const Dataset& ds, const std::filesystem::path& path);

// Anchors are set to the observed age min/max; callers holding a sidecar
// overwrite them afterwards.
Dataset load_csv(const std::filesystem::path& path);

}  // namespace agedecor
