#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "agedecor/artifacts.hpp"
#include "agedecor/csv.hpp"
#include "agedecor/errors.hpp"
#include "agedecor/stats.hpp"

namespace agedecor::cli {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const fs::path& dir) {
  if (!fs::exists(dir)) {
    fs::create_directories(dir);
    std::cout << "created " << dir.string() << "\n";
  }
}

std::map<double, SplitBundle> load_splits(const ExperimentManifest& m) {
  const OutputLayout layout{m.out_dir};
  std::map<double, SplitBundle> splits;
  for (double gamma : m.gammas) {
    const fs::path dir = layout.split_dir(gamma);
    if (!fs::exists(dir / "meta.json"))
      throw ConfigError("missing split " + dir.string() +
                        "; run `generate` first");
    splits.emplace(gamma, load_split_bundle(dir));
  }
  return splits;
}

MethodVariant resolve_variant(const std::string& method, bool no_affinity,
                              bool no_coverage) {
  MethodVariant v = method_variant(method);
  if (no_affinity) v.use_affinity = false;
  if (no_coverage) v.use_coverage = false;
  if (v.method == Method::ours) {
    v.name = "ours";
    if (!v.use_affinity) v.name += "_noaffinity";
    if (!v.use_coverage) v.name += "_nocoverage";
  }
  return v;
}

void write_summary(const ExperimentManifest& m,
                   const std::vector<std::string>& methods,
                   const std::vector<std::pair<CellId, EvalReport>>& evals) {
  const OutputLayout layout{m.out_dir};
  const auto rows = aggregate_evals(evals, methods, m.gammas,
                                    static_cast<int>(m.seeds.size()));
  std::ofstream out(layout.summary_csv(), std::ios::binary);
  if (!out) throw IoError("cannot open for writing", layout.summary_csv().string());
  out << "method,gamma,auc_mean,auc_se,s_plus,s_minus,dsep10_mean,dsep10_se,"
         "n_seeds,status\n";
  for (const AggregateRow& r : rows) {
    out << r.method << ',' << csv::format_double(r.gamma) << ','
        << csv::format_double(r.auc_mean) << ','
        << csv::format_double(r.auc_se) << ','
        << csv::format_double(r.s_plus_mean) << ','
        << csv::format_double(r.s_minus_mean) << ','
        << csv::format_double(r.dsep10_mean) << ','
        << csv::format_double(r.dsep10_se) << ',' << r.n_ok << ','
        << (r.n_ok == r.n_total
                ? "ok"
                : "failed=" + std::to_string(r.n_total - r.n_ok))
        << "\n";
  }
}

}  // namespace

int cmd_generate(const ExperimentManifest& m) {
  const OutputLayout layout{m.out_dir};
  ensure_dir(layout.data_dir());

  const Dataset pool = generate_population(m.generator, m.pool_seed);
  save_csv(pool, layout.population_csv());
  save_population_meta(m.generator, m.pool_seed, pool, layout.population_meta());
  std::cout << "population: " << pool.size() << " samples, prevalence "
            << prevalence(pool) << "\n";

  for (double gamma : m.gammas) {
    const ShiftConfig shift =
        make_shift_config(pool, gamma, m.n_train, m.n_test, m.val_fraction);
    const SplitBundle bundle = shift_split(pool, shift, m.split_seed);
    SplitMeta meta;
    meta.gamma = gamma;
    meta.seed = m.split_seed;
    meta.pivot_train = shift.pivot_train;
    meta.pivot_test = shift.pivot_test;
    meta.age_min = pool.age_min;
    meta.age_max = pool.age_max;
    meta.val_fraction = m.val_fraction;
    save_split_bundle(bundle, meta, layout.split_dir(gamma));
    std::cout << "gamma " << format_gamma(gamma) << ": train "
              << bundle.train.size() << ", val " << bundle.validation.size()
              << ", test " << bundle.test.size() << " -> "
              << layout.split_dir(gamma).string() << "\n";
  }
  return 0;
}

int cmd_train(const ExperimentManifest& m, const TrainArgs& args) {
  const OutputLayout layout{m.out_dir};
  const fs::path split_dir = layout.split_dir(args.gamma);
  if (!fs::exists(split_dir / "meta.json"))
    throw ConfigError("missing split " + split_dir.string() +
                      "; run `generate` first");
  const SplitBundle bundle = load_split_bundle(split_dir);

  const MethodVariant variant =
      resolve_variant(args.method, args.no_affinity, args.no_coverage);
  TrainConfig cfg = m.train;
  cfg.method = variant.method;
  cfg.penalty.use_affinity = variant.use_affinity;
  cfg.penalty.use_coverage = variant.use_coverage;
  cfg.seed = args.seed;
  if (args.lambda >= 0) cfg.penalty.lambda = args.lambda;

  const RunArtifact artifact = train(bundle, cfg);

  const fs::path cell = layout.cell_dir(variant.name, args.gamma, args.seed);
  fs::create_directories(cell);
  save_run_artifact(artifact, cell / "run.json");
  save_epoch_log_csv(artifact.logs, cell / "log.csv");
  std::cout << "trained " << variant.name << " gamma "
            << format_gamma(args.gamma) << " seed " << args.seed << " in "
            << artifact.elapsed_seconds << "s -> " << cell.string() << "\n";
  return 0;
}

int cmd_evaluate(const ExperimentManifest& m, const EvaluateArgs& args) {
  const OutputLayout layout{m.out_dir};
  const SplitBundle bundle = load_split_bundle(layout.split_dir(args.gamma));
  const fs::path cell = layout.cell_dir(args.method, args.gamma, args.seed);
  if (!fs::exists(cell / "run.json"))
    throw ConfigError("missing run artifact " + (cell / "run.json").string());
  const RunArtifact artifact = load_run_artifact(cell / "run.json");

  EvalReport report = evaluate(artifact.params, bundle);
  report.method = args.method;
  report.gamma = args.gamma;
  report.seed = args.seed;
  if (args.method == "erm") {
    report.dauc_vs_erm = 0.0;
  } else {
    const fs::path erm_eval =
        layout.cell_dir("erm", args.gamma, args.seed) / "eval.json";
    if (fs::exists(erm_eval))
      report.dauc_vs_erm = report.auc - load_eval_report(erm_eval).auc;
  }
  save_eval_report(report, cell / "eval.json");
  std::cout << "evaluated " << args.method << " gamma "
            << format_gamma(args.gamma) << " seed " << args.seed << ": auc "
            << report.auc << ", dsep10 " << report.dsep10_percent << "%\n";
  return 0;
}

int cmd_run(const ExperimentManifest& m, const RunArgs& args) {
  const OutputLayout layout{m.out_dir};

  std::vector<std::string> methods = m.methods;
  const auto add_unique = [&methods](const std::string& name) {
    if (std::find(methods.begin(), methods.end(), name) == methods.end())
      methods.push_back(name);
  };
  if (args.add_noaffinity) add_unique("ours_noaffinity");
  if (args.add_nocoverage) add_unique("ours_nocoverage");

  const auto splits = load_splits(m);

  MatrixSpec spec;
  spec.gammas = m.gammas;
  spec.seeds = m.seeds;
  spec.shift = {m.n_train, m.n_test, m.val_fraction};
  spec.base = m.train;
  spec.split_seed = m.split_seed;
  spec.workers = args.workers >= 0 ? args.workers : m.workers;
  spec.skip = [&layout](const CellId& id) {
    const bool done =
        fs::exists(layout.cell_dir(id.method, id.gamma, id.seed) / "eval.json");
    if (done)
      std::cout << "skip " << id.method << " gamma " << format_gamma(id.gamma)
                << " seed " << id.seed << " (eval.json present)\n";
    return done;
  };

  int n_failed_cells = 0;
  const auto run_wave =
      [&](const std::vector<std::string>& wave_methods,
          const std::map<std::pair<double, std::uint64_t>, double>* erm_auc) {
        if (wave_methods.empty()) return;
        MatrixSpec wave = spec;
        for (const std::string& name : wave_methods)
          wave.methods.push_back(method_variant(name));
        wave.on_done = [&](const CellResult& res) {
          const fs::path cell =
              layout.cell_dir(res.id.method, res.id.gamma, res.id.seed);
          fs::create_directories(cell);
          if (!res.ok) {
            ++n_failed_cells;
            std::ofstream err(cell / "error.txt", std::ios::binary);
            err << res.error << "\n";
            std::cerr << "cell failed: " << res.id.method << " gamma "
                      << format_gamma(res.id.gamma) << " seed " << res.id.seed
                      << ": " << res.error << "\n";
            return;
          }
          save_run_artifact(res.run, cell / "run.json");
          save_epoch_log_csv(res.run.logs, cell / "log.csv");
          EvalReport report = res.eval;
          if (res.id.method == "erm") {
            report.dauc_vs_erm = 0.0;
          } else if (erm_auc) {
            const auto it = erm_auc->find({res.id.gamma, res.id.seed});
            if (it != erm_auc->end())
              report.dauc_vs_erm = report.auc - it->second;
          }
          save_eval_report(report, cell / "eval.json");
          std::cout << "done " << res.id.method << " gamma "
                    << format_gamma(res.id.gamma) << " seed " << res.id.seed
                    << " (" << res.run.elapsed_seconds << "s)\n";
        };
        run_matrix(splits, wave);
      };

  // ERM first so every other cell can report dAUC against it.
  std::vector<std::string> erm_wave, rest_wave;
  for (const std::string& name : methods)
    (name == "erm" ? erm_wave : rest_wave).push_back(name);
  run_wave(erm_wave, nullptr);

  std::map<std::pair<double, std::uint64_t>, double> erm_auc;
  if (!erm_wave.empty()) {
    for (double gamma : m.gammas)
      for (std::uint64_t seed : m.seeds) {
        const fs::path p = layout.cell_dir("erm", gamma, seed) / "eval.json";
        if (fs::exists(p)) erm_auc[{gamma, seed}] = load_eval_report(p).auc;
      }
  }
  run_wave(rest_wave, &erm_auc);

  // Summary is rebuilt from disk so resumed and fresh runs agree.
  std::vector<std::pair<CellId, EvalReport>> evals;
  int n_missing = 0;
  for (const std::string& method : methods)
    for (double gamma : m.gammas)
      for (std::uint64_t seed : m.seeds) {
        const fs::path p = layout.cell_dir(method, gamma, seed) / "eval.json";
        if (fs::exists(p))
          evals.emplace_back(CellId{method, gamma, seed}, load_eval_report(p));
        else
          ++n_missing;
      }
  write_summary(m, methods, evals);
  std::cout << "summary -> " << layout.summary_csv().string() << " ("
            << evals.size() << " cells ok, " << n_missing << " missing)\n";
  return n_missing == 0 ? 0 : 1;
}

int cmd_trend(const ExperimentManifest& m, const TrendArgs& args) {
  const OutputLayout layout{m.out_dir};
  const SplitBundle bundle = load_split_bundle(layout.split_dir(args.gamma));

  TrainConfig cfg = m.train;
  cfg.method = Method::erm;
  cfg.seed = args.seed_given ? args.seed : m.seeds.front();
  if (args.bins > 0) cfg.trend_bins = args.bins;
  cfg.epochs = cfg.warmup_epochs + 1;  // snapshot happens at warm-up end

  const RunArtifact artifact = train(bundle, cfg);
  if (args.out_file.empty()) {
    write_trend_csv(artifact.warmup_trend, std::cout);
  } else {
    save_trend_csv(artifact.warmup_trend, args.out_file);
    std::cout << "trend -> " << args.out_file << "\n";
  }
  return 0;
}

int cmd_plotdata(const ExperimentManifest& m) {
  const OutputLayout layout{m.out_dir};

  std::vector<std::pair<CellId, EvalReport>> evals;
  for (const std::string& method : m.methods)
    for (double gamma : m.gammas)
      for (std::uint64_t seed : m.seeds) {
        const fs::path p = layout.cell_dir(method, gamma, seed) / "eval.json";
        if (fs::exists(p))
          evals.emplace_back(CellId{method, gamma, seed}, load_eval_report(p));
      }
  if (evals.empty())
    throw MissingResults("no eval.json under " + layout.results_dir().string());

  ensure_dir(layout.plots_dir());

  // fig3: AUC vs dSep10 trade-off per (method, gamma).
  {
    const auto rows = aggregate_evals(evals, m.methods, m.gammas,
                                      static_cast<int>(m.seeds.size()));
    std::ofstream out(layout.plots_dir() / "fig3_tradeoff.csv", std::ios::binary);
    out << "method,gamma,auc,auc_se,dsep10,dsep10_se\n";
    for (const AggregateRow& r : rows) {
      if (r.n_ok == 0) continue;
      out << r.method << ',' << csv::format_double(r.gamma) << ','
          << csv::format_double(r.auc_mean) << ','
          << csv::format_double(r.auc_se) << ','
          << csv::format_double(r.dsep10_mean) << ','
          << csv::format_double(r.dsep10_se) << "\n";
    }
  }

  // dAUC vs ERM per method, averaged over (gamma, seed).
  {
    std::ofstream out(layout.plots_dir() / "fig3_dauc.csv", std::ios::binary);
    out << "method,dauc_mean,dauc_se\n";
    for (const std::string& method : m.methods) {
      std::vector<double> daucs;
      for (const auto& [id, report] : evals)
        if (id.method == method && report.dauc_vs_erm)
          daucs.push_back(*report.dauc_vs_erm);
      if (daucs.empty()) continue;
      out << method << ',' << csv::format_double(stats::mean(daucs)) << ','
          << csv::format_double(stats::standard_error(daucs)) << "\n";
    }
  }

  // fig1: warm-up age-difficulty trend, averaged over seeds.
  {
    std::string method = m.methods.front();
    if (std::find(m.methods.begin(), m.methods.end(), "erm") != m.methods.end())
      method = "erm";
    double gamma = m.gammas.front();
    if (std::find(m.gammas.begin(), m.gammas.end(), 0.0) != m.gammas.end())
      gamma = 0.0;

    // per (label, bin): bin means across seeds
    std::map<std::pair<int, int>, std::vector<double>> acc;
    std::map<int, double> centers;
    for (std::uint64_t seed : m.seeds) {
      const fs::path p = layout.cell_dir(method, gamma, seed) / "run.json";
      if (!fs::exists(p)) continue;
      const RunArtifact artifact = load_run_artifact(p);
      for (int label = 0; label < 2; ++label) {
        const auto& bins = artifact.warmup_trend.labels[label].bins;
        for (int b = 0; b < static_cast<int>(bins.size()); ++b) {
          centers[b] = bins[static_cast<std::size_t>(b)].center;
          if (bins[static_cast<std::size_t>(b)].count > 0)
            acc[{label, b}].push_back(bins[static_cast<std::size_t>(b)].mean_g);
        }
      }
    }
    if (!acc.empty()) {
      std::ofstream out(layout.plots_dir() / "fig1_trend.csv", std::ios::binary);
      out << "bin,label,mean_g,sem\n";
      for (int label = 0; label < 2; ++label)
        for (const auto& [key, values] : acc) {
          if (key.first != label) continue;
          out << csv::format_double(centers[key.second]) << ',' << label << ','
              << csv::format_double(stats::mean(values)) << ','
              << csv::format_double(stats::standard_error(values)) << "\n";
        }
    }
  }

  // fig2: train/test age densities and prevalence per gamma.
  {
    constexpr int kBins = 10;
    std::ofstream out(layout.plots_dir() / "fig2_densities.csv", std::ios::binary);
    out << "gamma,split,bin,density,prevalence\n";
    for (double gamma : m.gammas) {
      const fs::path dir = layout.split_dir(gamma);
      if (!fs::exists(dir / "meta.json")) continue;
      const SplitBundle bundle = load_split_bundle(dir);
      const auto emit = [&](const Dataset& ds, const std::string& split) {
        std::array<int, kBins> count{};
        std::array<int, kBins> positives{};
        for (const Sample& s : ds.samples) {
          auto b = static_cast<int>(s.z * kBins);
          b = std::clamp(b, 0, kBins - 1);
          count[static_cast<std::size_t>(b)]++;
          positives[static_cast<std::size_t>(b)] += s.y;
        }
        const double width = 1.0 / kBins;
        for (int b = 0; b < kBins; ++b) {
          const double density =
              static_cast<double>(count[static_cast<std::size_t>(b)]) /
              (static_cast<double>(ds.size()) * width);
          const double prev =
              count[static_cast<std::size_t>(b)] > 0
                  ? static_cast<double>(positives[static_cast<std::size_t>(b)]) /
                        static_cast<double>(count[static_cast<std::size_t>(b)])
                  : 0.0;
          out << csv::format_double(gamma) << ',' << split << ','
              << csv::format_double((b + 0.5) * width) << ','
              << csv::format_double(density) << ',' << csv::format_double(prev)
              << "\n";
        }
      };
      emit(bundle.train, "train");
      emit(bundle.test, "test");
    }
  }

  std::cout << "plot data -> " << layout.plots_dir().string() << "\n";
  return 0;
}

}  // namespace agedecor::cli
