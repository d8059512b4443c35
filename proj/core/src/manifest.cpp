#include "agedecor/manifest.hpp"

#include <fstream>
#include <sstream>

#include "agedecor/csv.hpp"
#include "agedecor/errors.hpp"

namespace agedecor {

namespace {

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("manifest: bad boolean for " + key + ": " + v);
}

}  // namespace

void ExperimentManifest::validate() const {
  if (schema_version != 1)
    throw ConfigError("unsupported manifest schema_version");
  generator.validate();
  train.validate();
  if (gammas.empty()) throw ConfigError("manifest: gammas must be non-empty");
  for (double g : gammas)
    if (g < 0) throw ConfigError("manifest: gamma must be >= 0");
  if (seeds.empty()) throw ConfigError("manifest: seeds must be non-empty");
  if (methods.empty()) throw ConfigError("manifest: methods must be non-empty");
  for (const auto& m : methods) method_variant(m);  // throws on unknown names
  if (n_train + n_test > generator.n_pool)
    throw ConfigError("manifest: n_train + n_test exceeds n_pool");
  if (!(val_fraction > 0.0 && val_fraction < 1.0))
    throw ConfigError("manifest: val_fraction must lie in (0,1)");
  if (train.batch_size > n_train)
    throw ConfigError("manifest: batch_size exceeds n_train");
  if (workers < 0) throw ConfigError("manifest: workers must be >= 0");
}

ExperimentManifest default_manifest() { return ExperimentManifest{}; }

ExperimentManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest: " + path.string());

  ExperimentManifest m;
  bool saw_schema = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("manifest line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    try {
      if (key == "schema_version") {
        m.schema_version = static_cast<int>(csv::parse_int(value));
        saw_schema = true;
      } else if (key == "out_dir") {
        m.out_dir = value;
      } else if (key == "pool_seed") {
        m.pool_seed = static_cast<std::uint64_t>(csv::parse_int(value));
      } else if (key == "split_seed") {
        m.split_seed = static_cast<std::uint64_t>(csv::parse_int(value));
      } else if (key == "n_pool") {
        m.generator.n_pool = static_cast<int>(csv::parse_int(value));
      } else if (key == "feature_dim") {
        m.generator.feature_dim = static_cast<int>(csv::parse_int(value));
      } else if (key == "kappa") {
        m.generator.prevalence_slope = csv::parse_double(value);
      } else if (key == "a0") {
        m.generator.prevalence_midpoint = csv::parse_double(value);
      } else if (key == "disease_signal") {
        m.generator.disease_signal = csv::parse_double(value);
      } else if (key == "age_morphology_strength") {
        m.generator.age_morphology_strength = csv::parse_double(value);
      } else if (key == "noise_sd") {
        m.generator.noise_sd = csv::parse_double(value);
      } else if (key == "age_lo_years") {
        m.generator.age_lo_years = csv::parse_double(value);
      } else if (key == "age_hi_years") {
        m.generator.age_hi_years = csv::parse_double(value);
      } else if (key == "gammas") {
        m.gammas.clear();
        for (const auto& item : split_list(value))
          m.gammas.push_back(csv::parse_double(item));
      } else if (key == "n_train") {
        m.n_train = static_cast<int>(csv::parse_int(value));
      } else if (key == "n_test") {
        m.n_test = static_cast<int>(csv::parse_int(value));
      } else if (key == "val_fraction") {
        m.val_fraction = csv::parse_double(value);
      } else if (key == "seeds") {
        m.seeds.clear();
        for (const auto& item : split_list(value))
          m.seeds.push_back(static_cast<std::uint64_t>(csv::parse_int(item)));
      } else if (key == "methods") {
        m.methods = split_list(value);
      } else if (key == "epochs") {
        m.train.epochs = static_cast<int>(csv::parse_int(value));
      } else if (key == "warmup_epochs") {
        m.train.warmup_epochs = static_cast<int>(csv::parse_int(value));
      } else if (key == "batch_size") {
        m.train.batch_size = static_cast<int>(csv::parse_int(value));
      } else if (key == "lr") {
        m.train.lr = csv::parse_double(value);
      } else if (key == "lambda") {
        m.train.penalty.lambda = csv::parse_double(value);
      } else if (key == "denom_epsilon") {
        m.train.penalty.denom_epsilon = csv::parse_double(value);
      } else if (key == "use_affinity") {
        m.train.penalty.use_affinity = parse_bool(value, key);
      } else if (key == "use_coverage") {
        m.train.penalty.use_coverage = parse_bool(value, key);
      } else if (key == "model") {
        m.train.model = arch_from_name(value);
      } else if (key == "hidden") {
        m.train.hidden = static_cast<int>(csv::parse_int(value));
      } else if (key == "age_bin_years") {
        m.train.age_bin_years = static_cast<int>(csv::parse_int(value));
      } else if (key == "trend_bins") {
        m.train.trend_bins = static_cast<int>(csv::parse_int(value));
      } else if (key == "workers") {
        m.workers = static_cast<int>(csv::parse_int(value));
      } else {
        throw ConfigError("manifest: unknown key '" + key + "'");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("manifest line " + std::to_string(lineno) + " (" + key +
                        "): " + e.what());
    }
  }
  if (!saw_schema) throw ConfigError("manifest: schema_version is required");
  m.validate();
  return m;
}

void save_manifest(const ExperimentManifest& m,
                   const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing", path.string());
  const auto join_d = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ",";
      s += csv::format_double(v[i]);
    }
    return s;
  };
  std::string seeds;
  for (std::size_t i = 0; i < m.seeds.size(); ++i) {
    if (i) seeds += ",";
    seeds += csv::format_int(static_cast<long long>(m.seeds[i]));
  }
  std::string methods;
  for (std::size_t i = 0; i < m.methods.size(); ++i) {
    if (i) methods += ",";
    methods += m.methods[i];
  }
  out << "schema_version = " << m.schema_version << "\n"
      << "out_dir = " << m.out_dir.string() << "\n"
      << "pool_seed = " << m.pool_seed << "\n"
      << "split_seed = " << m.split_seed << "\n"
      << "n_pool = " << m.generator.n_pool << "\n"
      << "feature_dim = " << m.generator.feature_dim << "\n"
      << "kappa = " << csv::format_double(m.generator.prevalence_slope) << "\n"
      << "a0 = " << csv::format_double(m.generator.prevalence_midpoint) << "\n"
      << "disease_signal = " << csv::format_double(m.generator.disease_signal)
      << "\n"
      << "age_morphology_strength = "
      << csv::format_double(m.generator.age_morphology_strength) << "\n"
      << "noise_sd = " << csv::format_double(m.generator.noise_sd) << "\n"
      << "age_lo_years = " << csv::format_double(m.generator.age_lo_years)
      << "\n"
      << "age_hi_years = " << csv::format_double(m.generator.age_hi_years)
      << "\n"
      << "gammas = " << join_d(m.gammas) << "\n"
      << "n_train = " << m.n_train << "\n"
      << "n_test = " << m.n_test << "\n"
      << "val_fraction = " << csv::format_double(m.val_fraction) << "\n"
      << "seeds = " << seeds << "\n"
      << "methods = " << methods << "\n"
      << "epochs = " << m.train.epochs << "\n"
      << "warmup_epochs = " << m.train.warmup_epochs << "\n"
      << "batch_size = " << m.train.batch_size << "\n"
      << "lr = " << csv::format_double(m.train.lr) << "\n"
      << "lambda = " << csv::format_double(m.train.penalty.lambda) << "\n"
      << "model = " << arch_name(m.train.model) << "\n"
      << "hidden = " << m.train.hidden << "\n"
      << "age_bin_years = " << m.train.age_bin_years << "\n"
      << "trend_bins = " << m.train.trend_bins << "\n"
      << "workers = " << m.workers << "\n";
}

}  // namespace agedecor
