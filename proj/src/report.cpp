#include "lagr/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lagr/kernels.hpp"

namespace lagr {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace {

// Write-to-partial-then-rename; an error path leaves only the .partial file.
void write_file_atomically(const fs::path& path, const std::string& content) {
  const fs::path partial = path.string() + ".partial";
  {
    std::ofstream out(partial);
    if (!out) throw std::runtime_error("cannot write " + partial.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + partial.string());
  }
  fs::rename(partial, path);
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : s) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

}  // namespace

void write_bundle(const ExperimentOutcome& outcome) {
  fs::create_directories(outcome.out_dir);
  const fs::path dir(outcome.out_dir);

  std::string returns = "variant,episode,mean,stderr\n";
  for (const auto& label : outcome.variant_labels) {
    const auto& agg = outcome.aggregates.at(label);
    for (std::size_t e = 0; e < agg.mean_return.size(); ++e) {
      returns += label + "," + std::to_string(e) + "," +
                 format_double(agg.mean_return[e]) + "," +
                 format_double(agg.stderr_return[e]) + "\n";
    }
  }
  write_file_atomically(dir / "returns.csv", returns);

  std::string queries =
      "variant,queries_mean,queries_stderr,backend_calls_mean,cache_hits_mean\n";
  for (const auto& label : outcome.variant_labels) {
    const auto& agg = outcome.aggregates.at(label);
    queries += label + "," + format_double(agg.queries.mean) + "," +
               format_double(agg.queries.stderr_) + "," +
               format_double(agg.backend_calls.mean) + "," +
               format_double(agg.cache_hits.mean) + "\n";
  }
  write_file_atomically(dir / "queries.csv", queries);

  std::string ratio = "label,ratio\n";
  for (const auto& [label, r] : outcome.ratios) {
    ratio += label + "," + format_double(r) + "\n";
  }
  write_file_atomically(dir / "ratio.csv", ratio);

  json manifest{
      {"schema", "lagr-bundle v1"},
      {"name", outcome.name},
      {"seeds", outcome.seeds},
      {"variants", outcome.variant_labels},
      {"config_hash", fnv1a64(outcome.resolved_config.dump())},
      {"kernels", kernels::active().name},
  };
  write_file_atomically(dir / "manifest.json", manifest.dump(2) + "\n");
}

void write_accuracy_csv(const std::string& path,
                        const std::vector<AccuracyRow>& rows) {
  std::string csv = "fraction_requested,fraction,accuracy,queries,errors\n";
  for (const auto& r : rows) {
    csv += format_double(r.requested) + "," + format_double(r.achieved) + "," +
           format_double(r.accuracy) + "," + std::to_string(r.queries) + "," +
           std::to_string(r.errors) + "\n";
  }
  write_file_atomically(path, csv);
}

void write_report_series(const std::string& bundle_dir,
                         const std::string& series_dir) {
  const fs::path in_dir(bundle_dir);
  const fs::path returns_path = in_dir / "returns.csv";
  const fs::path queries_path = in_dir / "queries.csv";
  if (!fs::exists(returns_path) || !fs::exists(queries_path)) {
    throw std::runtime_error("bundle at " + bundle_dir +
                             " is missing returns.csv/queries.csv");
  }
  fs::create_directories(series_dir);

  std::ifstream ret_in(returns_path);
  std::string line;
  std::getline(ret_in, line);  // header
  std::map<std::string, std::string> per_variant;
  std::vector<std::string> order;
  while (std::getline(ret_in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 4) {
      throw std::runtime_error("malformed returns.csv row: " + line);
    }
    auto it = per_variant.find(f[0]);
    if (it == per_variant.end()) {
      order.push_back(f[0]);
      it = per_variant.emplace(f[0], "episode,mean,lo,hi\n").first;
    }
    const double mean = std::stod(f[2]);
    const double err = std::stod(f[3]);
    it->second += f[1] + "," + f[2] + "," + format_double(mean - err) + "," +
                  format_double(mean + err) + "\n";
  }
  for (const auto& label : order) {
    write_file_atomically(fs::path(series_dir) /
                              ("series_returns_" + label + ".csv"),
                          per_variant.at(label));
  }

  std::ifstream q_in(queries_path);
  std::getline(q_in, line);  // header
  std::string bars = "variant,mean,lo,hi\n";
  while (std::getline(q_in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 5) {
      throw std::runtime_error("malformed queries.csv row: " + line);
    }
    const double mean = std::stod(f[1]);
    const double err = std::stod(f[2]);
    bars += f[0] + "," + f[1] + "," + format_double(mean - err) + "," +
            format_double(mean + err) + "\n";
  }
  write_file_atomically(fs::path(series_dir) / "series_queries.csv", bars);
}

}  // namespace lagr
