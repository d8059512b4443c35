#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "agedecor/dataset.hpp"
#include "agedecor/rng.hpp"

namespace agedecor {

// Probabilities are clamped into [kProbClamp, 1 - kProbClamp] so the BCE
// loss and the difficulty proxy stay finite and strictly inside (0, 1).
inline constexpr double kProbClamp = 1e-7;

enum class ArchType { linear, mlp };

std::string arch_name(ArchType t);
ArchType arch_from_name(const std::string& name);

struct Architecture {
  ArchType type = ArchType::linear;
  int feature_dim = 0;
  int hidden = 0;  // mlp only

  std::size_t param_count() const;
  bool operator==(const Architecture&) const = default;
};

// Flat parameter vector.
// linear: [w_0..w_{d-1}, b]
// mlp:    [W1 row-major (h x d), b1 (h), w2 (h), b2]
struct ClassifierParams {
  Architecture arch;
  std::vector<double> values;
};

ClassifierParams init_params(const Architecture& arch, RngStream& rng);

double sigmoid(double t);
double clamp_prob(double p);

double raw_logit(const ClassifierParams& p, std::span<const double> x);

// clamp_prob(sigmoid(raw_logit)). Pure.
double forward(const ClassifierParams& p, std::span<const double> x);

struct BatchForward {
  std::vector<double> logits;
  std::vector<double> probs;   // clamped
  std::vector<double> hidden;  // mlp tanh activations, row-major [batch x h]
};

BatchForward forward_batch(const ClassifierParams& p,
                           const std::vector<const Sample*>& batch);

// Flat parameter gradient from per-sample d(loss)/d(logit).
std::vector<double> backprop_batch(const ClassifierParams& p,
                                   const std::vector<const Sample*>& batch,
                                   const BatchForward& fwd,
                                   std::span<const double> dlogit);

double bce_loss(double p, double y);
double mean_bce(std::span<const double> probs,
                const std::vector<const Sample*>& batch);

// d(bce)/d(logit) = p - y; zero where the clamp is active.
double bce_grad_logit(double prob, int y);

// d(prob)/d(logit) = p(1-p); zero where the clamp is active.
double prob_grad_logit(double prob);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t t = 0;
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  AdamState() = default;
  explicit AdamState(std::size_t n, double learning_rate = 0.001)
      : m(n, 0.0), v(n, 0.0), lr(learning_rate) {}
};

// Standard bias-corrected update.
void adam_step(std::vector<double>& params, std::span<const double> grad,
               AdamState& state);

// JSON checkpoint with an architecture descriptor header; exact round-trip.
void save_checkpoint(const ClassifierParams& p, const std::filesystem::path& path);
ClassifierParams load_checkpoint(const std::filesystem::path& path);

}  // namespace agedecor
