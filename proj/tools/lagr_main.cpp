#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lagr/cache.hpp"
#include "lagr/experiment.hpp"
#include "lagr/http_backend.hpp"
#include "lagr/orchestrator.hpp"
#include "lagr/report.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
  std::vector<std::uint64_t> seeds;
  std::string cur;
  for (const char c : csv + ",") {
    if (c == ',') {
      if (!cur.empty()) seeds.push_back(std::stoull(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (seeds.empty()) throw lagr::ConfigError("empty seed list");
  return seeds;
}

int cmd_run(const std::string& config_path, const lagr::CliOverrides& o) {
  auto doc = lagr::load_experiment_json(config_path);
  lagr::apply_overrides(doc, o);
  const auto outcome = lagr::run_experiment_doc(doc);
  lagr::write_bundle(outcome);
  std::printf("experiment %s: %zu variant(s) x %zu seed(s) -> %s\n",
              outcome.name.c_str(), outcome.variant_labels.size(),
              outcome.seeds.size(), outcome.out_dir.c_str());
  for (const auto& label : outcome.variant_labels) {
    const auto& agg = outcome.aggregates.at(label);
    std::printf("  %-14s total return %.2f, queries %.1f +/- %.1f\n",
                label.c_str(), agg.total_mean_return(), agg.queries.mean,
                agg.queries.stderr_);
  }
  for (const auto& [label, ratio] : outcome.ratios) {
    std::printf("  ratio %-10s %.4f\n", label.c_str(), ratio);
  }
  return 0;
}

int cmd_bench_oracle(const std::string& env_kind, const std::string& backend,
                     const std::string& fractions_csv, int n, double tau,
                     double theta, double kappa, std::uint64_t seed,
                     const std::string& url, const std::string& model,
                     const std::string& out_path) {
  std::vector<double> fractions;
  {
    std::string cur;
    for (const char c : fractions_csv + ",") {
      if (c == ',') {
        if (!cur.empty()) fractions.push_back(std::stod(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
  }
  if (fractions.empty()) throw lagr::ConfigError("empty fraction list");
  if (n < 1) throw lagr::ConfigError("bench-oracle needs --n >= 1");

  std::unique_ptr<lagr::TextBackend> be;
  const lagr::ScriptedOracleConfig scfg{theta, kappa};
  auto rng = lagr::make_rng(seed).fork("oracle");
  std::vector<lagr::AccuracyRow> rows;
  if (env_kind == "cube") {
    const lagr::CubeEnv env(lagr::make_cube_config(8));
    const auto d = lagr::cube_descriptor(env.config().cubes);
    if (backend == "scripted") {
      be = std::make_unique<lagr::ScriptedCubeBackend>(env, scfg, rng);
    } else {
      lagr::HttpBackendConfig hc;
      hc.base_url = url;
      if (!model.empty()) hc.model = model;
      be = std::make_unique<lagr::HttpBackend>(hc);
    }
    rows = lagr::accuracy_sweep(env, *be, d, fractions, n, tau);
  } else if (env_kind == "image" || env_kind == "arrangement") {
    const lagr::GridEnv env(env_kind == "image"
                                ? lagr::make_image_config()
                                : lagr::make_arrangement_config());
    const auto d = env_kind == "image" ? lagr::image_descriptor()
                                       : lagr::arrangement_descriptor();
    if (backend == "scripted") {
      be = std::make_unique<lagr::ScriptedGridBackend>(env, scfg, rng);
    } else {
      lagr::HttpBackendConfig hc;
      hc.base_url = url;
      if (!model.empty()) hc.model = model;
      be = std::make_unique<lagr::HttpBackend>(hc);
    }
    rows = lagr::accuracy_sweep(env, *be, d, fractions, n, tau);
  } else {
    throw lagr::ConfigError("--env must be cube, image or arrangement");
  }
  lagr::write_accuracy_csv(out_path, rows);
  std::printf("wrote %zu rows to %s\n", rows.size(), out_path.c_str());
  return 0;
}

int cmd_cache_stats(const std::string& path) {
  std::vector<std::string> warnings;
  const auto cache = lagr::ResponseCache::load(path, 10, &warnings);
  for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::printf("%zu entries\n", cache.size());
  for (const auto& [tau, count] : cache.stats_by_tau()) {
    std::printf("  tau=%.2f: %zu\n", tau / 100.0, count);
  }
  return 0;
}

int cmd_cache_dump(const std::string& path) {
  std::vector<std::string> warnings;
  const auto cache = lagr::ResponseCache::load(path, 10, &warnings);
  for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  for (const auto& [key, entry] : cache.entries()) {
    std::printf("env=%s desc=%s tau=%.2f state=%s responses=%zu\n",
                key.env_id.c_str(), key.descriptor_id.c_str(),
                key.tau_centi / 100.0, key.state_text.c_str(),
                entry.responses.size());
    for (const auto& r : entry.responses) {
      std::printf("  | %s\n", r.c_str());
    }
  }
  return 0;
}

int cmd_cache_merge(const std::vector<std::string>& inputs,
                    const std::string& out_path) {
  if (inputs.empty()) throw lagr::ConfigError("cache merge needs input files");
  lagr::ResponseCache merged(10);
  std::vector<std::string> warnings;
  for (const auto& path : inputs) {
    const auto cache = lagr::ResponseCache::load(path, 10, &warnings);
    merged.merge_from(cache, &warnings);
  }
  for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  merged.save(out_path);
  std::printf("merged %zu file(s) into %s (%zu entries, %zu warning(s))\n",
              inputs.size(), out_path.c_str(), merged.size(), warnings.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Language-model-guided RL for pattern completion tasks"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run an experiment file");
  std::string run_config;
  std::string run_seeds, run_backend, run_cache, run_out, run_gating;
  double run_tau = -1.0;
  run->add_option("--config", run_config, "Experiment file (JSON)")->required();
  run->add_option("--seeds", run_seeds, "Comma-separated seed list override");
  run->add_option("--backend", run_backend, "Oracle backend: scripted|http");
  run->add_option("--cache", run_cache, "Oracle cache file path");
  run->add_option("--out", run_out, "Output bundle directory");
  run->add_option("--gating", run_gating, "Query gating: seq|always|never");
  run->add_option("--temperature", run_tau, "Oracle temperature in [0,1]");

  // bench-oracle
  auto* bench = app.add_subcommand("bench-oracle",
                                   "Accuracy of the oracle vs prefix fraction");
  std::string bench_config;
  std::string bench_env = "cube", bench_backend = "scripted";
  std::string bench_fractions = "0.05,0.1,0.15,0.2,0.25,0.3,0.35,0.4,0.45,0.5,"
                                "0.55,0.6,0.65,0.7,0.75,0.8,0.85,0.9,0.95,1.0";
  int bench_n = 100;
  double bench_tau = 0.0, bench_theta = 0.45, bench_kappa = 0.0;
  std::uint64_t bench_seed = 1;
  std::string bench_url, bench_model, bench_out = "oracle_accuracy.csv";
  bench->add_option("--config", bench_config,
                    "Benchmark settings file (JSON); flags override it");
  bench->add_option("--env", bench_env, "cube|image|arrangement");
  bench->add_option("--backend", bench_backend, "scripted|http");
  bench->add_option("--fractions", bench_fractions, "Comma-separated fractions");
  bench->add_option("--n", bench_n, "Queries per fraction");
  bench->add_option("--temperature", bench_tau, "Oracle temperature");
  bench->add_option("--theta", bench_theta, "Scripted completion threshold");
  bench->add_option("--kappa", bench_kappa, "Scripted error slope per unit tau");
  bench->add_option("--seed", bench_seed, "Seed for the scripted error coin");
  bench->add_option("--url", bench_url, "HTTP endpoint base url");
  bench->add_option("--model", bench_model, "HTTP model name");
  bench->add_option("--out", bench_out, "Output CSV path");

  // cache tools
  auto* cache_cmd = app.add_subcommand("cache", "Inspect or merge cache files");
  cache_cmd->require_subcommand(1);
  auto* cache_stats = cache_cmd->add_subcommand("stats", "Entry counts per tau");
  auto* cache_dump = cache_cmd->add_subcommand("dump", "Print all records");
  auto* cache_merge = cache_cmd->add_subcommand("merge", "Union cache files");
  std::string cache_stats_path, cache_dump_path, cache_merge_out = "merged.cache";
  std::vector<std::string> cache_merge_inputs;
  cache_stats->add_option("path", cache_stats_path, "Cache file")->required();
  cache_dump->add_option("path", cache_dump_path, "Cache file")->required();
  cache_merge->add_option("paths", cache_merge_inputs, "Input cache files")
      ->required();
  cache_merge->add_option("--out", cache_merge_out, "Merged output path");

  // report
  auto* report = app.add_subcommand("report", "Bundle -> plot-data series");
  std::string report_bundle, report_out;
  report->add_option("--bundle", report_bundle, "Bundle directory")->required();
  report->add_option("--out", report_out, "Series output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      lagr::CliOverrides o;
      if (!run_seeds.empty()) o.seeds = parse_seed_list(run_seeds);
      if (!run_backend.empty()) o.backend = run_backend;
      if (!run_cache.empty()) o.cache_path = run_cache;
      if (!run_out.empty()) o.out_dir = run_out;
      if (!run_gating.empty()) o.gating = run_gating;
      if (run_tau >= 0.0) o.temperature = run_tau;
      return cmd_run(run_config, o);
    }
    if (*bench) {
      if (!bench_config.empty()) {
        std::ifstream in(bench_config);
        if (!in) {
          throw lagr::ConfigError("cannot open benchmark file: " + bench_config);
        }
        nlohmann::json doc;
        try {
          doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
          throw lagr::ConfigError("benchmark file is not valid JSON: " +
                                  std::string(e.what()));
        }
        for (const auto& [key, value] : doc.items()) {
          if (key != "env" && key != "backend" && key != "fractions" &&
              key != "n" && key != "temperature" && key != "theta" &&
              key != "kappa_slope" && key != "seed" && key != "url" &&
              key != "model" && key != "out") {
            throw lagr::ConfigError("unknown key \"" + key +
                                    "\" in benchmark file");
          }
          (void)value;
        }
        // flags passed on the command line win over file values
        if (bench->count("--env") == 0 && doc.contains("env"))
          bench_env = doc["env"].get<std::string>();
        if (bench->count("--backend") == 0 && doc.contains("backend"))
          bench_backend = doc["backend"].get<std::string>();
        if (bench->count("--fractions") == 0 && doc.contains("fractions")) {
          bench_fractions.clear();
          for (const auto& f : doc["fractions"]) {
            if (!bench_fractions.empty()) bench_fractions += ",";
            bench_fractions += std::to_string(f.get<double>());
          }
        }
        if (bench->count("--n") == 0 && doc.contains("n"))
          bench_n = doc["n"].get<int>();
        if (bench->count("--temperature") == 0 && doc.contains("temperature"))
          bench_tau = doc["temperature"].get<double>();
        if (bench->count("--theta") == 0 && doc.contains("theta"))
          bench_theta = doc["theta"].get<double>();
        if (bench->count("--kappa") == 0 && doc.contains("kappa_slope"))
          bench_kappa = doc["kappa_slope"].get<double>();
        if (bench->count("--seed") == 0 && doc.contains("seed"))
          bench_seed = doc["seed"].get<std::uint64_t>();
        if (bench->count("--url") == 0 && doc.contains("url"))
          bench_url = doc["url"].get<std::string>();
        if (bench->count("--model") == 0 && doc.contains("model"))
          bench_model = doc["model"].get<std::string>();
        if (bench->count("--out") == 0 && doc.contains("out"))
          bench_out = doc["out"].get<std::string>();
      }
      if (bench_backend == "http" && bench_url.empty()) {
        throw lagr::ConfigError("bench-oracle --backend http needs --url");
      }
      return cmd_bench_oracle(bench_env, bench_backend, bench_fractions,
                              bench_n, bench_tau, bench_theta, bench_kappa,
                              bench_seed, bench_url, bench_model, bench_out);
    }
    if (*cache_stats) return cmd_cache_stats(cache_stats_path);
    if (*cache_dump) return cmd_cache_dump(cache_dump_path);
    if (*cache_merge) return cmd_cache_merge(cache_merge_inputs, cache_merge_out);
    if (*report) {
      lagr::write_report_series(
          report_bundle, report_out.empty() ? report_bundle : report_out);
      return 0;
    }
  } catch (const lagr::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return 0;
}
