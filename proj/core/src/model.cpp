#include "agedecor/model.hpp"

#include <cmath>
#include <fstream>

#include "agedecor/errors.hpp"
#include "json.hpp"

namespace agedecor {

std::string arch_name(ArchType t) {
  return t == ArchType::linear ? "linear" : "mlp";
}

ArchType arch_from_name(const std::string& name) {
  if (name == "linear") return ArchType::linear;
  if (name == "mlp") return ArchType::mlp;
  throw InvalidConfig("unknown architecture: " + name);
}

std::size_t Architecture::param_count() const {
  const auto d = static_cast<std::size_t>(feature_dim);
  if (type == ArchType::linear) return d + 1;
  const auto h = static_cast<std::size_t>(hidden);
  return h * d + h + h + 1;
}

ClassifierParams init_params(const Architecture& arch, RngStream& rng) {
  if (arch.feature_dim <= 0) throw InvalidConfig("feature_dim must be positive");
  if (arch.type == ArchType::mlp && arch.hidden <= 0)
    throw InvalidConfig("mlp needs hidden > 0");
  ClassifierParams p;
  p.arch = arch;
  p.values.assign(arch.param_count(), 0.0);
  const double in_scale = 1.0 / std::sqrt(static_cast<double>(arch.feature_dim));
  if (arch.type == ArchType::linear) {
    // Convex problem: start at zero, the standard logistic-regression init.
    // A random init would dominate the first-epoch dynamics and mask the
    // learned warm-up trends.
    (void)rng;
  } else {
    const auto d = static_cast<std::size_t>(arch.feature_dim);
    const auto h = static_cast<std::size_t>(arch.hidden);
    for (std::size_t k = 0; k < h * d; ++k) p.values[k] = rng.normal(0.0, in_scale);
    const double hid_scale = 1.0 / std::sqrt(static_cast<double>(arch.hidden));
    for (std::size_t j = 0; j < h; ++j)
      p.values[h * d + h + j] = rng.normal(0.0, hid_scale);
  }
  return p;
}

double sigmoid(double t) {
  if (t >= 0) {
    const double e = std::exp(-t);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double clamp_prob(double p) {
  if (p < kProbClamp) return kProbClamp;
  if (p > 1.0 - kProbClamp) return 1.0 - kProbClamp;
  return p;
}

namespace {

void check_shape(const ClassifierParams& p, std::size_t x_size) {
  if (x_size != static_cast<std::size_t>(p.arch.feature_dim))
    throw ShapeMismatch("feature vector size does not match architecture");
  if (p.values.size() != p.arch.param_count())
    throw ShapeMismatch("parameter vector size does not match architecture");
}

double mlp_logit(const ClassifierParams& p, std::span<const double> x,
                 double* hidden_out) {
  const auto d = static_cast<std::size_t>(p.arch.feature_dim);
  const auto h = static_cast<std::size_t>(p.arch.hidden);
  const double* W1 = p.values.data();
  const double* b1 = p.values.data() + h * d;
  const double* w2 = p.values.data() + h * d + h;
  const double b2 = p.values[h * d + h + h];
  double logit = b2;
  for (std::size_t j = 0; j < h; ++j) {
    double pre = b1[j];
    const double* row = W1 + j * d;
    for (std::size_t i = 0; i < d; ++i) pre += row[i] * x[i];
    const double a = std::tanh(pre);
    if (hidden_out) hidden_out[j] = a;
    logit += w2[j] * a;
  }
  return logit;
}

}  // namespace

double raw_logit(const ClassifierParams& p, std::span<const double> x) {
  check_shape(p, x.size());
  if (p.arch.type == ArchType::linear) {
    const auto d = static_cast<std::size_t>(p.arch.feature_dim);
    double logit = p.values[d];
    for (std::size_t i = 0; i < d; ++i) logit += p.values[i] * x[i];
    return logit;
  }
  return mlp_logit(p, x, nullptr);
}

double forward(const ClassifierParams& p, std::span<const double> x) {
  return clamp_prob(sigmoid(raw_logit(p, x)));
}

BatchForward forward_batch(const ClassifierParams& p,
                           const std::vector<const Sample*>& batch) {
  BatchForward out;
  const std::size_t n = batch.size();
  out.logits.resize(n);
  out.probs.resize(n);
  const bool is_mlp = p.arch.type == ArchType::mlp;
  const auto h = static_cast<std::size_t>(p.arch.hidden);
  if (is_mlp) out.hidden.resize(n * h);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& x = batch[k]->features;
    check_shape(p, x.size());
    out.logits[k] = is_mlp ? mlp_logit(p, x, out.hidden.data() + k * h)
                           : raw_logit(p, x);
    out.probs[k] = clamp_prob(sigmoid(out.logits[k]));
  }
  return out;
}

std::vector<double> backprop_batch(const ClassifierParams& p,
                                   const std::vector<const Sample*>& batch,
                                   const BatchForward& fwd,
                                   std::span<const double> dlogit) {
  if (dlogit.size() != batch.size())
    throw ShapeMismatch("dlogit size does not match batch size");
  std::vector<double> grad(p.values.size(), 0.0);
  const auto d = static_cast<std::size_t>(p.arch.feature_dim);
  if (p.arch.type == ArchType::linear) {
    for (std::size_t k = 0; k < batch.size(); ++k) {
      const double dl = dlogit[k];
      const auto& x = batch[k]->features;
      for (std::size_t i = 0; i < d; ++i) grad[i] += dl * x[i];
      grad[d] += dl;
    }
    return grad;
  }
  const auto h = static_cast<std::size_t>(p.arch.hidden);
  const double* w2 = p.values.data() + h * d;
  w2 += h;  // skip b1
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const double dl = dlogit[k];
    const auto& x = batch[k]->features;
    const double* a = fwd.hidden.data() + k * h;
    for (std::size_t j = 0; j < h; ++j) {
      grad[h * d + h + j] += dl * a[j];                  // w2
      const double dpre = dl * w2[j] * (1.0 - a[j] * a[j]);
      double* w1row = grad.data() + j * d;
      for (std::size_t i = 0; i < d; ++i) w1row[i] += dpre * x[i];
      grad[h * d + j] += dpre;                           // b1
    }
    grad[h * d + h + h] += dl;                           // b2
  }
  return grad;
}

double bce_loss(double p, double y) {
  return -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
}

double mean_bce(std::span<const double> probs,
                const std::vector<const Sample*>& batch) {
  double s = 0.0;
  for (std::size_t k = 0; k < batch.size(); ++k)
    s += bce_loss(probs[k], batch[k]->y);
  return batch.empty() ? 0.0 : s / static_cast<double>(batch.size());
}

double bce_grad_logit(double prob, int y) {
  if (prob <= kProbClamp || prob >= 1.0 - kProbClamp) return 0.0;
  return prob - static_cast<double>(y);
}

double prob_grad_logit(double prob) {
  if (prob <= kProbClamp || prob >= 1.0 - kProbClamp) return 0.0;
  return prob * (1.0 - prob);
}

void adam_step(std::vector<double>& params, std::span<const double> grad,
               AdamState& state) {
  if (grad.size() != params.size() || state.m.size() != params.size() ||
      state.v.size() != params.size())
    throw ShapeMismatch("adam state/gradient size mismatch");
  state.t += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grad[i];
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= state.lr * mhat / (std::sqrt(vhat) + state.epsilon);
  }
}

void save_checkpoint(const ClassifierParams& p,
                     const std::filesystem::path& path) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["architecture"] = {{"type", arch_name(p.arch.type)},
                       {"feature_dim", p.arch.feature_dim},
                       {"hidden", p.arch.hidden}};
  j["values"] = p.values;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing", path.string());
  out << j.dump(2) << "\n";
}

ClassifierParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading", path.string());
  nlohmann::json j;
  in >> j;
  ClassifierParams p;
  p.arch.type = arch_from_name(j.at("architecture").at("type").get<std::string>());
  p.arch.feature_dim = j.at("architecture").at("feature_dim").get<int>();
  p.arch.hidden = j.at("architecture").at("hidden").get<int>();
  p.values = j.at("values").get<std::vector<double>>();
  if (p.values.size() != p.arch.param_count())
    throw ShapeMismatch("checkpoint value count does not match architecture");
  return p;
}

}  // namespace agedecor
