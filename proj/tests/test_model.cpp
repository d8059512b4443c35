#include <cmath>
#include <filesystem>

#include "agedecor/errors.hpp"
#include "agedecor/model.hpp"
#include "doctest.h"

using namespace agedecor;

namespace {

Sample make_sample(RngStream& rng, int dim, int y) {
  Sample s;
  s.y = y;
  s.z = rng.uniform();
  s.age_years = 20 + 70 * s.z;
  for (int j = 0; j < dim; ++j) s.features.push_back(rng.normal());
  return s;
}

// rel err with an absolute guard for near-zero entries
bool grad_close(double analytic, double numeric, double rel_tol,
                double abs_guard = 1e-9) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  if (std::abs(analytic - numeric) / denom < rel_tol) return true;
  return std::abs(analytic - numeric) < abs_guard;
}

}  // namespace

TEST_CASE("zero parameters give p = 0.5") {
  ClassifierParams p;
  p.arch = {ArchType::linear, 4, 0};
  p.values.assign(5, 0.0);
  const std::vector<double> x{1.0, -2.0, 0.3, 4.0};
  CHECK(forward(p, x) == 0.5);
}

TEST_CASE("probability clamp engages for extreme logits") {
  ClassifierParams p;
  p.arch = {ArchType::linear, 2, 0};
  p.values = {0.0, 0.0, 100.0};  // huge bias
  const std::vector<double> x{0.0, 0.0};
  CHECK(forward(p, x) == 1.0 - 1e-7);
  p.values[2] = -100.0;
  CHECK(forward(p, x) == 1e-7);
}

TEST_CASE("forward probability derivative matches finite differences") {
  for (ArchType type : {ArchType::linear, ArchType::mlp}) {
    auto rng = rng_stream(21, "fdp");
    Architecture arch{type, 6, type == ArchType::mlp ? 5 : 0};
    ClassifierParams p = init_params(arch, rng);
    for (double& v : p.values) v += rng.normal(0, 0.3);
    Sample s;
    s.features.resize(6);
    for (double& v : s.features) v = rng.normal();
    const std::vector<const Sample*> batch{&s};

    // analytic: dp/dtheta = p(1-p) * dlogit/dtheta
    const BatchForward fwd = forward_batch(p, batch);
    const std::vector<double> dl{prob_grad_logit(fwd.probs[0])};
    const auto grad = backprop_batch(p, batch, fwd, dl);

    const double h = 1e-5;
    for (std::size_t i = 0; i < p.values.size(); ++i) {
      ClassifierParams lo = p, hi = p;
      lo.values[i] -= h;
      hi.values[i] += h;
      const double numeric =
          (forward(hi, s.features) - forward(lo, s.features)) / (2 * h);
      CHECK(grad_close(grad[i], numeric, 1e-5));
    }
  }
}

TEST_CASE("bce closed forms") {
  CHECK(bce_loss(0.5, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(bce_loss(1.0 - 1e-7, 1) == doctest::Approx(1e-7).epsilon(1e-4));
  CHECK(bce_loss(1e-7, 0) == doctest::Approx(1e-7).epsilon(1e-4));
}

TEST_CASE("bce gradient w.r.t. logit is p - y") {
  auto rng = rng_stream(22, "bceg");
  for (int trial = 0; trial < 20; ++trial) {
    const double logit = rng.normal(0, 2);
    const int y = rng.bernoulli(0.5) ? 1 : 0;
    const double h = 1e-6;
    const double up = bce_loss(clamp_prob(sigmoid(logit + h)), y);
    const double dn = bce_loss(clamp_prob(sigmoid(logit - h)), y);
    const double numeric = (up - dn) / (2 * h);
    const double analytic = bce_grad_logit(clamp_prob(sigmoid(logit)), y);
    CHECK(grad_close(analytic, numeric, 1e-6, 1e-9));
  }
}

TEST_CASE("adam fixed point on zero gradient") {
  std::vector<double> params{0.3, -0.7, 2.0};
  AdamState state(3);
  const std::vector<double> zero(3, 0.0);
  adam_step(params, zero, state);
  CHECK(params == std::vector<double>{0.3, -0.7, 2.0});
}

TEST_CASE("first adam step has magnitude ~ lr against the gradient sign") {
  std::vector<double> params{1.0, 1.0};
  AdamState state(2, 0.001);
  const std::vector<double> grad{3.7, -0.02};
  adam_step(params, grad, state);
  CHECK(params[0] < 1.0);
  CHECK(params[1] > 1.0);
  CHECK(std::abs(1.0 - params[0]) == doctest::Approx(0.001).epsilon(1e-4));
  CHECK(std::abs(params[1] - 1.0) == doctest::Approx(0.001).epsilon(1e-3));
}

TEST_CASE("adam minimizes a quadratic bowl") {
  std::vector<double> x(5, 0.0);
  const std::vector<double> target{0.7, -0.4, 0.2, 0.55, -0.61};
  AdamState state(5, 0.001);
  std::vector<double> grad(5);
  int steps = 0;
  for (; steps < 5000; ++steps) {
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      grad[i] = x[i] - target[i];
      worst = std::max(worst, std::abs(grad[i]));
    }
    if (worst < 1e-3) break;
    adam_step(x, grad, state);
  }
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(std::abs(x[i] - target[i]) < 1e-3);
  CHECK(steps <= 5000);
}

TEST_CASE("whole-model mean-BCE gradient matches finite differences") {
  auto rng = rng_stream(23, "fdall");
  for (int trial = 0; trial < 10; ++trial) {
    const ArchType type = trial % 2 == 0 ? ArchType::linear : ArchType::mlp;
    Architecture arch{type, 5, type == ArchType::mlp ? 4 : 0};
    ClassifierParams p = init_params(arch, rng);
    for (double& v : p.values) v += rng.normal(0, 0.3);
    std::vector<Sample> samples;
    std::vector<const Sample*> batch;
    for (int k = 0; k < 8; ++k)
      samples.push_back(make_sample(rng, 5, rng.bernoulli(0.5) ? 1 : 0));
    for (const Sample& s : samples) batch.push_back(&s);

    const BatchForward fwd = forward_batch(p, batch);
    std::vector<double> dlogit(batch.size());
    for (std::size_t k = 0; k < batch.size(); ++k)
      dlogit[k] = bce_grad_logit(fwd.probs[k], batch[k]->y) /
                  static_cast<double>(batch.size());
    const auto grad = backprop_batch(p, batch, fwd, dlogit);

    const auto loss_at = [&](const ClassifierParams& q) {
      const BatchForward f = forward_batch(q, batch);
      return mean_bce(f.probs, batch);
    };
    const double h = 1e-5;
    for (std::size_t i = 0; i < p.values.size(); ++i) {
      ClassifierParams lo = p, hi = p;
      lo.values[i] -= h;
      hi.values[i] += h;
      const double numeric = (loss_at(hi) - loss_at(lo)) / (2 * h);
      CHECK(grad_close(grad[i], numeric, 1e-5));
    }
  }
}

TEST_CASE("forward is pure") {
  auto rng = rng_stream(24, "pure");
  Architecture arch{ArchType::mlp, 4, 3};
  const ClassifierParams p = init_params(arch, rng);
  std::vector<double> x{0.1, -0.2, 0.3, 1.1};
  CHECK(forward(p, x) == forward(p, x));
}

TEST_CASE("checkpoint round-trips exactly") {
  auto rng = rng_stream(25, "ckpt");
  const auto dir = std::filesystem::temp_directory_path() / "agedecor_ckpt";
  std::filesystem::create_directories(dir);
  for (ArchType type : {ArchType::linear, ArchType::mlp}) {
    Architecture arch{type, 7, type == ArchType::mlp ? 3 : 0};
    const ClassifierParams p = init_params(arch, rng);
    const auto path = dir / (arch_name(type) + ".json");
    save_checkpoint(p, path);
    const ClassifierParams q = load_checkpoint(path);
    CHECK(q.arch == p.arch);
    CHECK(q.values == p.values);
  }
}

TEST_CASE("shape mismatches are rejected") {
  ClassifierParams p;
  p.arch = {ArchType::linear, 3, 0};
  p.values.assign(4, 0.0);
  const std::vector<double> wrong{1.0, 2.0};
  CHECK_THROWS_AS(forward(p, wrong), ShapeMismatch);
}
