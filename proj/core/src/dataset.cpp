#include "agedecor/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include "agedecor/csv.hpp"
#include "agedecor/errors.hpp"

namespace agedecor {

Dataset normalize_ages(Dataset pool) {
  if (pool.samples.size() < 2)
    throw InvalidConfig("normalize_ages requires at least 2 samples");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const Sample& s : pool.samples) {
    lo = std::min(lo, s.age_years);
    hi = std::max(hi, s.age_years);
  }
  if (!(hi > lo)) throw DegenerateAges();
  pool.age_min = lo;
  pool.age_max = hi;
  const double range = hi - lo;
  for (Sample& s : pool.samples) s.z = (s.age_years - lo) / range;
  return pool;
}

double prevalence(const Dataset& ds) {
  if (ds.empty()) return 0.0;
  double s = 0.0;
  for (const Sample& x : ds.samples) s += x.y;
  return s / static_cast<double>(ds.size());
}

void save_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing", path.string());
  out << "id,age_years,z,y";
  for (int j = 0; j < ds.feature_dim; ++j) out << ",f" << j;
  out << "\n";
  for (const Sample& s : ds.samples) {
    out << csv::format_int(s.id) << ',' << csv::format_double(s.age_years)
        << ',' << csv::format_double(s.z) << ',' << s.y;
    for (double f : s.features) out << ',' << csv::format_double(f);
    out << "\n";
  }
  if (!out) throw IoError("write failed", path.string());
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading", path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty dataset file", path.string());
  const auto header = csv::split_line(line);
  if (header.size() < 4 || header[0] != "id" || header[1] != "age_years" ||
      header[2] != "z" || header[3] != "y")
    throw IoError("unexpected dataset header", path.string());
  const int dim = static_cast<int>(header.size()) - 4;

  Dataset ds;
  ds.feature_dim = dim;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = csv::split_line(line);
    if (static_cast<int>(fields.size()) != dim + 4)
      throw IoError("row width mismatch", path.string());
    Sample s;
    s.id = csv::parse_int(fields[0]);
    s.age_years = csv::parse_double(fields[1]);
    s.z = csv::parse_double(fields[2]);
    s.y = static_cast<int>(csv::parse_int(fields[3]));
    s.features.resize(static_cast<std::size_t>(dim));
    for (int j = 0; j < dim; ++j)
      s.features[static_cast<std::size_t>(j)] =
          csv::parse_double(fields[static_cast<std::size_t>(j) + 4]);
    ds.samples.push_back(std::move(s));
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const Sample& s : ds.samples) {
    lo = std::min(lo, s.age_years);
    hi = std::max(hi, s.age_years);
  }
  if (!ds.samples.empty()) {
    ds.age_min = lo;
    ds.age_max = hi;
  }
  return ds;
}

}  // namespace agedecor
