#include "agedecor/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

#include "agedecor/errors.hpp"
#include "agedecor/stats.hpp"

namespace agedecor {

std::string method_name(Method m) {
  switch (m) {
    case Method::ours: return "ours";
    case Method::erm: return "erm";
    case Method::resampled: return "resampled";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  if (name == "ours") return Method::ours;
  if (name == "erm") return Method::erm;
  if (name == "resampled") return Method::resampled;
  throw InvalidConfig("unknown method: " + name);
}

void TrainConfig::validate() const {
  if (warmup_epochs < 1) throw InvalidConfig("warmup_epochs must be >= 1");
  if (warmup_epochs >= epochs)
    throw InvalidConfig("warmup_epochs must be < epochs");
  if (batch_size < 4) throw InvalidConfig("batch_size must be >= 4");
  if (!(lr > 0)) throw InvalidConfig("lr must be > 0");
  if (penalty.lambda < 0) throw InvalidConfig("lambda must be >= 0");
  if (age_bin_years < 1) throw InvalidConfig("age_bin_years must be >= 1");
  if (trend_bins < 3) throw InvalidConfig("trend_bins must be >= 3");
  if (model == ArchType::mlp && hidden < 1)
    throw InvalidConfig("mlp needs hidden >= 1");
}

std::vector<std::vector<std::size_t>> resampled_batches(const Dataset& train,
                                                        const TrainConfig& cfg,
                                                        RngStream& rng,
                                                        int n_batches) {
  std::map<int, std::vector<std::size_t>> by_bin;
  for (std::size_t i = 0; i < train.size(); ++i) {
    const int bin = static_cast<int>(
        std::floor(train.samples[i].age_years / cfg.age_bin_years));
    by_bin[bin].push_back(i);
  }
  if (by_bin.size() < 2)
    throw NoAgeSpread("resampled batches need >= 2 non-empty age bins");

  std::vector<const std::vector<std::size_t>*> bins;
  bins.reserve(by_bin.size());
  for (const auto& [bin, members] : by_bin) bins.push_back(&members);
  const auto nb = bins.size();

  std::vector<std::vector<std::size_t>> batches;
  batches.reserve(static_cast<std::size_t>(n_batches));
  const auto base = static_cast<std::size_t>(cfg.batch_size) / nb;
  const auto rem = static_cast<std::size_t>(cfg.batch_size) % nb;
  std::vector<std::size_t> slots(nb);
  for (int b = 0; b < n_batches; ++b) {
    // The remainder lands on a uniformly random set of bins so expected
    // per-bin counts stay equal.
    std::iota(slots.begin(), slots.end(), std::size_t{0});
    for (std::size_t k = 0; k < rem; ++k) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(
          static_cast<std::int64_t>(k), static_cast<std::int64_t>(nb) - 1));
      std::swap(slots[k], slots[j]);
    }
    std::vector<char> bonus(nb, 0);
    for (std::size_t k = 0; k < rem; ++k) bonus[slots[k]] = 1;

    std::vector<std::size_t> batch;
    batch.reserve(static_cast<std::size_t>(cfg.batch_size));
    for (std::size_t j = 0; j < nb; ++j) {
      const auto count = base + static_cast<std::size_t>(bonus[j]);
      const auto& members = *bins[j];
      for (std::size_t c = 0; c < count; ++c) {
        const auto pick = static_cast<std::size_t>(rng.uniform_int(
            0, static_cast<std::int64_t>(members.size()) - 1));
        batch.push_back(members[pick]);
      }
    }
    batches.push_back(std::move(batch));
  }
  return batches;
}

RunArtifact train(const SplitBundle& split, const TrainConfig& cfg) {
  cfg.validate();
  const Dataset& tr = split.train;
  if (tr.size() < 2) throw InvalidConfig("training split too small");

  Architecture arch;
  arch.type = cfg.model;
  arch.feature_dim = tr.feature_dim;
  arch.hidden = cfg.model == ArchType::mlp ? cfg.hidden : 0;

  auto init_rng = rng_stream(cfg.seed, "init");
  auto shuffle_rng = rng_stream(cfg.seed, "shuffle");
  auto resample_rng = rng_stream(cfg.seed, "resample");

  const auto started = std::chrono::steady_clock::now();

  RunArtifact art;
  art.config = cfg;
  art.params = init_params(arch, init_rng);
  AdamState adam(art.params.values.size(), cfg.lr);

  const int n_batches =
      std::max<int>(1, static_cast<int>(tr.size()) / cfg.batch_size);
  std::vector<std::size_t> order(tr.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  // Frozen affinity weight per train position; 1 until the pipeline runs.
  std::vector<double> w_by_pos(tr.size(), 1.0);

  std::vector<const Sample*> batch_ptr;
  std::vector<double> bz, bw, dlogit;
  std::vector<int> by;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::vector<std::vector<std::size_t>> batches;
    if (cfg.method == Method::resampled) {
      batches = resampled_batches(tr, cfg, resample_rng, n_batches);
    } else {
      shuffle_rng.shuffle(order);
      for (std::size_t start = 0; start < order.size();
           start += static_cast<std::size_t>(cfg.batch_size)) {
        const auto end =
            std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
        batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                             order.begin() + static_cast<std::ptrdiff_t>(end));
      }
    }

    const bool penalized =
        cfg.method == Method::ours && epoch > cfg.warmup_epochs;

    EpochLog log;
    log.epoch = epoch;
    for (const auto& members : batches) {
      const std::size_t n = members.size();
      batch_ptr.resize(n);
      bz.resize(n);
      by.resize(n);
      bw.resize(n);
      dlogit.resize(n);
      for (std::size_t k = 0; k < n; ++k) {
        const Sample& s = tr.samples[members[k]];
        batch_ptr[k] = &s;
        bz[k] = s.z;
        by[k] = s.y;
        bw[k] = w_by_pos[members[k]];
      }

      const BatchForward fwd = forward_batch(art.params, batch_ptr);
      const double inv_n = 1.0 / static_cast<double>(n);
      for (std::size_t k = 0; k < n; ++k)
        dlogit[k] = bce_grad_logit(fwd.probs[k], by[k]) * inv_n;
      log.bce += mean_bce(fwd.probs, batch_ptr);

      if (penalized) {
        const PenaltyBatch pb{bz, by, bw};
        const BatchSlopeStats stats =
            batch_slope_stats(fwd.probs, pb, cfg.penalty);
        const std::vector<double> pgrad =
            penalty_grad_logits(fwd.logits, pb, cfg.penalty);
        for (std::size_t k = 0; k < n; ++k) dlogit[k] += pgrad[k];
        ++art.penalty_path_calls;
        log.slope_y0 += slope_penalty(stats.by_label[0].slope);
        log.slope_y1 += slope_penalty(stats.by_label[1].slope);
        log.coverage_y0 += stats.by_label[0].coverage;
        log.coverage_y1 += stats.by_label[1].coverage;
      }

      const std::vector<double> grad =
          backprop_batch(art.params, batch_ptr, fwd, dlogit);
      adam_step(art.params.values, grad, adam);
    }

    const double nb = static_cast<double>(batches.size());
    log.bce /= nb;
    log.slope_y0 /= nb;
    log.slope_y1 /= nb;
    log.coverage_y0 /= nb;
    log.coverage_y1 /= nb;
    art.logs.push_back(log);

    if (epoch == cfg.warmup_epochs) {
      // After the last warm-up batch and before any penalized step.
      const auto records = collect_difficulties(art.params, tr);
      art.warmup_trend = trend_report(records, cfg.trend_bins);
      if (cfg.method == Method::ours && cfg.penalty.use_affinity) {
        TrendPipelineResult pipeline = fit_trend_pipeline(records);
        art.trendfit = pipeline.fit;
        art.affinity = std::move(pipeline.weights);
        for (std::size_t i = 0; i < tr.size(); ++i)
          w_by_pos[i] = art.affinity->at(tr.samples[i].id);
      }
    }
  }

  art.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  return art;
}

MethodVariant method_variant(const std::string& name) {
  if (name == "ours") return {name, Method::ours, true, true};
  if (name == "erm") return {name, Method::erm, true, true};
  if (name == "resampled") return {name, Method::resampled, true, true};
  if (name == "ours_noaffinity") return {name, Method::ours, false, true};
  if (name == "ours_nocoverage") return {name, Method::ours, true, false};
  throw InvalidConfig("unknown method variant: " + name);
}

std::vector<CellResult> run_matrix(const Dataset& pool, const MatrixSpec& spec) {
  std::map<double, SplitBundle> splits;
  for (double gamma : spec.gammas) {
    const ShiftConfig shift = make_shift_config(
        pool, gamma, spec.shift.n_train, spec.shift.n_test,
        spec.shift.val_fraction);
    splits.emplace(gamma, shift_split(pool, shift, spec.split_seed));
  }
  return run_matrix(splits, spec);
}

std::vector<CellResult> run_matrix(const std::map<double, SplitBundle>& splits,
                                   const MatrixSpec& spec) {
  struct Cell {
    MethodVariant variant;
    double gamma;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (const MethodVariant& mv : spec.methods)
    for (double gamma : spec.gammas)
      for (std::uint64_t seed : spec.seeds) {
        if (spec.skip && spec.skip(CellId{mv.name, gamma, seed})) continue;
        cells.push_back({mv, gamma, seed});
      }

  std::vector<CellResult> results(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex done_mutex;

  const auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const Cell& cell = cells[i];
      CellResult& res = results[i];
      res.id = {cell.variant.name, cell.gamma, cell.seed};
      try {
        TrainConfig cfg = spec.base;
        cfg.method = cell.variant.method;
        cfg.penalty.use_affinity = cell.variant.use_affinity;
        cfg.penalty.use_coverage = cell.variant.use_coverage;
        cfg.seed = cell.seed;
        const SplitBundle& split = splits.at(cell.gamma);
        res.run = train(split, cfg);
        res.eval = evaluate(res.run.params, split);
        res.eval.method = cell.variant.name;
        res.eval.gamma = cell.gamma;
        res.eval.seed = cell.seed;
        res.ok = true;
      } catch (const std::exception& e) {
        res.ok = false;
        res.error = e.what();
      }
      if (spec.on_done) {
        std::lock_guard<std::mutex> lock(done_mutex);
        spec.on_done(res);
      }
    }
  };

  unsigned n_workers = spec.workers > 0
                           ? static_cast<unsigned>(spec.workers)
                           : std::max(1u, std::thread::hardware_concurrency());
  n_workers = std::min<unsigned>(n_workers,
                                 std::max<std::size_t>(cells.size(), 1));
  std::vector<std::thread> threads;
  threads.reserve(n_workers);
  for (unsigned w = 0; w < n_workers; ++w) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  return results;
}

std::vector<AggregateRow> aggregate_evals(
    const std::vector<std::pair<CellId, EvalReport>>& evals,
    const std::vector<std::string>& methods, const std::vector<double>& gammas,
    int n_seeds_total) {
  std::vector<AggregateRow> rows;
  for (const std::string& method : methods) {
    for (double gamma : gammas) {
      AggregateRow row;
      row.method = method;
      row.gamma = gamma;
      row.n_total = n_seeds_total;
      std::vector<std::pair<std::uint64_t, const EvalReport*>> hits;
      for (const auto& [id, report] : evals)
        if (id.method == method && id.gamma == gamma)
          hits.emplace_back(id.seed, &report);
      std::sort(hits.begin(), hits.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      std::vector<double> aucs, spluses, sminuses, dseps;
      for (const auto& [seed, report] : hits) {
        aucs.push_back(report->auc);
        spluses.push_back(std::abs(report->s_plus));
        sminuses.push_back(std::abs(report->s_minus));
        dseps.push_back(report->dsep10_percent);
      }
      row.n_ok = static_cast<int>(hits.size());
      if (row.n_ok > 0) {
        row.auc_mean = stats::mean(aucs);
        row.auc_se = stats::standard_error(aucs);
        row.s_plus_mean = stats::mean(spluses);
        row.s_minus_mean = stats::mean(sminuses);
        row.dsep10_mean = stats::mean(dseps);
        row.dsep10_se = stats::standard_error(dseps);
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<AggregateRow> aggregate(const std::vector<CellResult>& cells,
                                    const std::vector<MethodVariant>& methods,
                                    const std::vector<double>& gammas,
                                    int n_seeds_total) {
  std::vector<std::pair<CellId, EvalReport>> evals;
  for (const CellResult& c : cells)
    if (c.ok) evals.emplace_back(c.id, c.eval);
  std::vector<std::string> names;
  names.reserve(methods.size());
  for (const auto& m : methods) names.push_back(m.name);
  return aggregate_evals(evals, names, gammas, n_seeds_total);
}

}  // namespace agedecor
