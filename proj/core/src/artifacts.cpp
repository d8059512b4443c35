#include "agedecor/artifacts.hpp"

#include <array>
#include <cstdio>
#include <fstream>

#include "agedecor/csv.hpp"
#include "agedecor/errors.hpp"
#include "json.hpp"

namespace agedecor {

using nlohmann::json;

std::string format_gamma(double gamma) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", gamma);
  return buf;
}

namespace {

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading", path.string());
  json j;
  in >> j;
  return j;
}

void dump_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing", path.string());
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed", path.string());
}

}  // namespace

void save_split_bundle(const SplitBundle& bundle, const SplitMeta& meta,
                       const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  save_csv(bundle.train, dir / "train.csv");
  save_csv(bundle.validation, dir / "val.csv");
  save_csv(bundle.test, dir / "test.csv");
  json j;
  j["schema_version"] = 1;
  j["gamma"] = meta.gamma;
  j["seed"] = meta.seed;
  j["pivot_train"] = meta.pivot_train;
  j["pivot_test"] = meta.pivot_test;
  j["age_min"] = meta.age_min;
  j["age_max"] = meta.age_max;
  j["val_fraction"] = meta.val_fraction;
  j["n_train"] = bundle.train.size();
  j["n_validation"] = bundle.validation.size();
  j["n_test"] = bundle.test.size();
  dump_json(j, dir / "meta.json");
}

SplitMeta load_split_meta(const std::filesystem::path& dir) {
  const json j = load_json(dir / "meta.json");
  SplitMeta m;
  m.gamma = j.at("gamma").get<double>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.pivot_train = j.at("pivot_train").get<double>();
  m.pivot_test = j.at("pivot_test").get<double>();
  m.age_min = j.at("age_min").get<double>();
  m.age_max = j.at("age_max").get<double>();
  m.val_fraction = j.at("val_fraction").get<double>();
  return m;
}

SplitBundle load_split_bundle(const std::filesystem::path& dir) {
  const SplitMeta meta = load_split_meta(dir);
  SplitBundle b;
  b.train = load_csv(dir / "train.csv");
  b.validation = load_csv(dir / "val.csv");
  b.test = load_csv(dir / "test.csv");
  for (Dataset* ds : {&b.train, &b.validation, &b.test}) {
    ds->age_min = meta.age_min;
    ds->age_max = meta.age_max;
  }
  b.gamma = meta.gamma;
  b.seed = meta.seed;
  return b;
}

void save_population_meta(const GeneratorConfig& cfg, std::uint64_t seed,
                          const Dataset& pool,
                          const std::filesystem::path& path) {
  json j;
  j["schema_version"] = 1;
  j["seed"] = seed;
  j["generator"] = {{"n_pool", cfg.n_pool},
                    {"feature_dim", cfg.feature_dim},
                    {"kappa", cfg.prevalence_slope},
                    {"a0", cfg.prevalence_midpoint},
                    {"disease_signal", cfg.disease_signal},
                    {"age_morphology_strength", cfg.age_morphology_strength},
                    {"noise_sd", cfg.noise_sd},
                    {"age_lo_years", cfg.age_lo_years},
                    {"age_hi_years", cfg.age_hi_years}};
  j["age_min"] = pool.age_min;
  j["age_max"] = pool.age_max;
  j["prevalence"] = prevalence(pool);
  dump_json(j, path);
}

void save_eval_report(const EvalReport& r, const std::filesystem::path& path) {
  json j;
  j["schema_version"] = 1;
  j["method"] = r.method;
  j["gamma"] = r.gamma;
  j["seed"] = r.seed;
  j["auc"] = r.auc;
  j["threshold"] = r.threshold;
  j["s_plus"] = r.s_plus;
  j["s_minus"] = r.s_minus;
  j["sep"] = r.sep;
  j["dsep10_percent"] = r.dsep10_percent;
  j["quasi_sep_plus"] = r.quasi_sep_plus;
  j["quasi_sep_minus"] = r.quasi_sep_minus;
  j["degenerate_threshold"] = r.degenerate_threshold;
  j["n_validation"] = r.n_validation;
  j["n_test"] = r.n_test;
  if (r.dauc_vs_erm)
    j["dauc_vs_erm"] = *r.dauc_vs_erm;
  else
    j["dauc_vs_erm"] = nullptr;
  dump_json(j, path);
}

EvalReport load_eval_report(const std::filesystem::path& path) {
  const json j = load_json(path);
  EvalReport r;
  r.method = j.at("method").get<std::string>();
  r.gamma = j.at("gamma").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.auc = j.at("auc").get<double>();
  r.threshold = j.at("threshold").get<double>();
  r.s_plus = j.at("s_plus").get<double>();
  r.s_minus = j.at("s_minus").get<double>();
  r.sep = j.at("sep").get<double>();
  r.dsep10_percent = j.at("dsep10_percent").get<double>();
  r.quasi_sep_plus = j.at("quasi_sep_plus").get<bool>();
  r.quasi_sep_minus = j.at("quasi_sep_minus").get<bool>();
  r.degenerate_threshold = j.at("degenerate_threshold").get<bool>();
  r.n_validation = j.at("n_validation").get<int>();
  r.n_test = j.at("n_test").get<int>();
  if (j.contains("dauc_vs_erm") && !j.at("dauc_vs_erm").is_null())
    r.dauc_vs_erm = j.at("dauc_vs_erm").get<double>();
  return r;
}

namespace {

json trend_to_json(const TrendReport& report) {
  json labels = json::array();
  for (int label = 0; label < 2; ++label) {
    const LabelTrend& lt = report.labels[label];
    json bins = json::array();
    for (const TrendBin& b : lt.bins)
      bins.push_back({{"center", b.center},
                      {"mean_g", b.mean_g},
                      {"sem", b.sem},
                      {"count", b.count}});
    labels.push_back({{"label", lt.label},
                      {"pearson_r", lt.pearson_r},
                      {"degenerate_variance", lt.degenerate_variance},
                      {"slope", lt.slope},
                      {"intercept", lt.intercept},
                      {"bins", bins}});
  }
  return {{"n_bins", report.n_bins}, {"labels", labels}};
}

TrendReport trend_from_json(const json& j) {
  TrendReport report;
  report.n_bins = j.at("n_bins").get<int>();
  for (const auto& lj : j.at("labels")) {
    const int label = lj.at("label").get<int>();
    LabelTrend& lt = report.labels[label];
    lt.label = label;
    lt.pearson_r = lj.at("pearson_r").get<double>();
    lt.degenerate_variance = lj.at("degenerate_variance").get<bool>();
    lt.slope = lj.at("slope").get<double>();
    lt.intercept = lj.at("intercept").get<double>();
    for (const auto& bj : lj.at("bins"))
      lt.bins.push_back({bj.at("center").get<double>(),
                         bj.at("mean_g").get<double>(),
                         bj.at("sem").get<double>(), bj.at("count").get<int>()});
  }
  return report;
}

json weight_histogram(const AffinityWeights& w) {
  // 10 equal bins over (0, 1]; weights are never 0.
  std::array<int, 10> counts{};
  for (const auto& [id, weight] : w.by_id) {
    auto b = static_cast<int>(weight * 10.0);
    if (b >= 10) b = 9;
    if (b < 0) b = 0;
    counts[static_cast<std::size_t>(b)]++;
  }
  json edges = json::array();
  for (int i = 0; i <= 10; ++i) edges.push_back(i / 10.0);
  return {{"edges", edges}, {"counts", counts}};
}

}  // namespace

void save_run_artifact(const RunArtifact& a, const std::filesystem::path& path) {
  const TrainConfig& c = a.config;
  json j;
  j["schema_version"] = 1;
  j["config"] = {{"epochs", c.epochs},
                 {"warmup_epochs", c.warmup_epochs},
                 {"batch_size", c.batch_size},
                 {"lr", c.lr},
                 {"method", method_name(c.method)},
                 {"seed", c.seed},
                 {"age_bin_years", c.age_bin_years},
                 {"model", arch_name(c.model)},
                 {"hidden", c.hidden},
                 {"trend_bins", c.trend_bins},
                 {"penalty",
                  {{"lambda", c.penalty.lambda},
                   {"denom_epsilon", c.penalty.denom_epsilon},
                   {"use_affinity", c.penalty.use_affinity},
                   {"use_coverage", c.penalty.use_coverage}}}};
  j["elapsed_seconds"] = a.elapsed_seconds;
  j["penalty_path_calls"] = a.penalty_path_calls;
  j["params"] = {{"architecture",
                  {{"type", arch_name(a.params.arch.type)},
                   {"feature_dim", a.params.arch.feature_dim},
                   {"hidden", a.params.arch.hidden}}},
                 {"values", a.params.values}};
  if (a.trendfit) {
    json tf;
    for (int label = 0; label < 2; ++label) {
      const LabelFit& lf = a.trendfit->by_label[label];
      tf["y" + std::to_string(label)] = {{"alpha", lf.alpha},
                                         {"beta", lf.beta},
                                         {"delta", lf.delta},
                                         {"converged", lf.converged},
                                         {"mad_floored", lf.mad_floored},
                                         {"iterations", lf.iterations}};
    }
    j["trendfit"] = tf;
  } else {
    j["trendfit"] = nullptr;
  }
  j["weight_histogram"] =
      a.affinity ? weight_histogram(*a.affinity) : json(nullptr);
  j["warmup_trend"] = trend_to_json(a.warmup_trend);
  dump_json(j, path);
}

RunArtifact load_run_artifact(const std::filesystem::path& path) {
  const json j = load_json(path);
  RunArtifact a;
  const json& c = j.at("config");
  a.config.epochs = c.at("epochs").get<int>();
  a.config.warmup_epochs = c.at("warmup_epochs").get<int>();
  a.config.batch_size = c.at("batch_size").get<int>();
  a.config.lr = c.at("lr").get<double>();
  a.config.method = method_from_name(c.at("method").get<std::string>());
  a.config.seed = c.at("seed").get<std::uint64_t>();
  a.config.age_bin_years = c.at("age_bin_years").get<int>();
  a.config.model = arch_from_name(c.at("model").get<std::string>());
  a.config.hidden = c.at("hidden").get<int>();
  a.config.trend_bins = c.at("trend_bins").get<int>();
  const json& p = c.at("penalty");
  a.config.penalty.lambda = p.at("lambda").get<double>();
  a.config.penalty.denom_epsilon = p.at("denom_epsilon").get<double>();
  a.config.penalty.use_affinity = p.at("use_affinity").get<bool>();
  a.config.penalty.use_coverage = p.at("use_coverage").get<bool>();
  a.elapsed_seconds = j.at("elapsed_seconds").get<double>();
  a.penalty_path_calls = j.at("penalty_path_calls").get<std::int64_t>();
  a.params.arch.type =
      arch_from_name(j.at("params").at("architecture").at("type").get<std::string>());
  a.params.arch.feature_dim =
      j.at("params").at("architecture").at("feature_dim").get<int>();
  a.params.arch.hidden = j.at("params").at("architecture").at("hidden").get<int>();
  a.params.values = j.at("params").at("values").get<std::vector<double>>();
  if (!j.at("trendfit").is_null()) {
    TrendFit tf;
    for (int label = 0; label < 2; ++label) {
      const json& lj = j.at("trendfit").at("y" + std::to_string(label));
      LabelFit& lf = tf.by_label[label];
      lf.alpha = lj.at("alpha").get<double>();
      lf.beta = lj.at("beta").get<double>();
      lf.delta = lj.at("delta").get<double>();
      lf.converged = lj.at("converged").get<bool>();
      lf.mad_floored = lj.at("mad_floored").get<bool>();
      lf.iterations = lj.at("iterations").get<int>();
    }
    a.trendfit = tf;
  }
  a.warmup_trend = trend_from_json(j.at("warmup_trend"));
  return a;
}

void save_epoch_log_csv(const std::vector<EpochLog>& logs,
                        const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing", path.string());
  out << "epoch,bce,slope_y0,slope_y1,coverage_y0,coverage_y1\n";
  for (const EpochLog& l : logs)
    out << l.epoch << ',' << csv::format_double(l.bce) << ','
        << csv::format_double(l.slope_y0) << ','
        << csv::format_double(l.slope_y1) << ','
        << csv::format_double(l.coverage_y0) << ','
        << csv::format_double(l.coverage_y1) << "\n";
}

void write_trend_csv(const TrendReport& report, std::ostream& out) {
  out << "bin,label,mean_g,sem,count\n";
  for (int label = 0; label < 2; ++label)
    for (const TrendBin& b : report.labels[label].bins)
      out << csv::format_double(b.center) << ',' << label << ','
          << csv::format_double(b.mean_g) << ',' << csv::format_double(b.sem)
          << ',' << b.count << "\n";
}

void save_trend_csv(const TrendReport& report,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing", path.string());
  write_trend_csv(report, out);
}

}  // namespace agedecor
