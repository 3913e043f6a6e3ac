#include "lagr/experiment.hpp"

#include <fstream>

#include "lagr/http_backend.hpp"
#include "lagr/orchestrator.hpp"

namespace lagr {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::vector<std::string>& allowed,
                const std::string& where) {
  if (!obj.is_object()) {
    throw ConfigError("expected an object at " + where);
  }
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool known = false;
    for (const auto& a : allowed) {
      if (key == a) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError("unknown key \"" + key + "\" in " + where);
    }
  }
}

const std::vector<std::string> kTopKeys = {
    "name",   "out_dir",   "seeds", "episodes", "follow_probability",
    "environment", "primary", "secondary", "oracle", "cache",
    "threads", "variants"};
const std::vector<std::string> kEnvKeys = {
    "kind", "cubes", "mode", "width", "height", "target",
    "horizon", "bonus", "delta", "acceptance"};
const std::vector<std::string> kPrimaryKeys = {
    "kind", "alpha", "gamma", "hidden", "batch", "replay",
    "target_sync", "epsilon"};
const std::vector<std::string> kSecondaryKeys = {"kind", "alpha", "hidden",
                                                 "reward", "epsilon"};
const std::vector<std::string> kEpsilonKeys = {"kind", "initial", "minimum",
                                               "decay"};
const std::vector<std::string> kOracleKeys = {
    "backend",  "theta", "kappa_slope", "temperature", "template",
    "url",      "path",  "model",       "api_key_env", "timeout_s",
    "max_retries"};
const std::vector<std::string> kCacheKeys = {"path", "pool"};
const std::vector<std::string> kVariantKeys = {
    "label",     "gating",  "ratio_against", "environment",
    "primary",   "secondary", "oracle",      "episodes",
    "follow_probability"};

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback) {
  if (obj.contains(key)) return obj.at(key).get<T>();
  return fallback;
}

void validate_section(const json& doc, const std::string& key,
                      const std::vector<std::string>& allowed,
                      const std::string& where) {
  if (!doc.contains(key)) return;
  check_keys(doc.at(key), allowed, where);
  if ((key == "primary" || key == "secondary") &&
      doc.at(key).contains("epsilon")) {
    check_keys(doc.at(key).at("epsilon"), kEpsilonKeys, where + ".epsilon");
  }
}

}  // namespace

void validate_experiment_json(const json& doc) {
  check_keys(doc, kTopKeys, "experiment file");
  validate_section(doc, "environment", kEnvKeys, "environment");
  validate_section(doc, "primary", kPrimaryKeys, "primary");
  validate_section(doc, "secondary", kSecondaryKeys, "secondary");
  validate_section(doc, "oracle", kOracleKeys, "oracle");
  validate_section(doc, "cache", kCacheKeys, "cache");
  if (doc.contains("variants")) {
    if (!doc.at("variants").is_array() || doc.at("variants").empty()) {
      throw ConfigError("variants must be a non-empty array");
    }
    int i = 0;
    for (const auto& v : doc.at("variants")) {
      const std::string where = "variants[" + std::to_string(i) + "]";
      check_keys(v, kVariantKeys, where);
      validate_section(v, "environment", kEnvKeys, where + ".environment");
      validate_section(v, "primary", kPrimaryKeys, where + ".primary");
      validate_section(v, "secondary", kSecondaryKeys, where + ".secondary");
      validate_section(v, "oracle", kOracleKeys, where + ".oracle");
      if (!v.contains("label")) {
        throw ConfigError(where + " is missing \"label\"");
      }
      ++i;
    }
  }
  if (!doc.contains("environment")) {
    throw ConfigError("experiment file is missing \"environment\"");
  }
}

json load_experiment_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open experiment file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("experiment file " + path + " is not valid JSON: " +
                      e.what());
  }
  validate_experiment_json(doc);
  return doc;
}

void apply_overrides(json& doc, const CliOverrides& o) {
  if (o.seeds) doc["seeds"] = *o.seeds;
  if (o.backend) doc["oracle"]["backend"] = *o.backend;
  if (o.cache_path) doc["cache"]["path"] = *o.cache_path;
  if (o.out_dir) doc["out_dir"] = *o.out_dir;
  if (o.temperature) doc["oracle"]["temperature"] = *o.temperature;
  if (o.gating) {
    parse_gating(*o.gating);  // validate
    if (doc.contains("variants")) {
      for (auto& v : doc["variants"]) v["gating"] = *o.gating;
    } else {
      doc["variants"] = json::array({json{{"label", *o.gating},
                                          {"gating", *o.gating}}});
    }
  }
  validate_experiment_json(doc);
}

namespace {

// ---- typed specs built from the merged per-variant document ---------------

struct EnvSpec {
  std::string kind;  // cube | grid
  int cubes = 8;
  std::string mode = "image";
  std::string target = "oval10";
  int width = 0;   // 0: taken from the target
  int height = 0;
  long horizon = 0;  // 0: environment default
  double bonus = 1.0;
  double delta = -1.0;  // <0: environment default
  std::string acceptance = "exact";
};

struct OracleSpec {
  std::string backend = "scripted";
  double theta = 0.45;
  double kappa_slope = 0.0;
  double temperature = 0.0;
  std::string template_path;
  HttpBackendConfig http;
};

struct RunnableVariant {
  std::string label;
  std::string ratio_against;
  EnvSpec env;
  OracleSpec oracle;
  json primary;
  json secondary;
  TrialConfig trial;
  int cache_pool = 10;
};

EnvSpec parse_env(const json& e) {
  EnvSpec spec;
  spec.kind = get_or<std::string>(e, "kind", "cube");
  if (spec.kind != "cube" && spec.kind != "grid") {
    throw ConfigError("environment.kind must be \"cube\" or \"grid\"");
  }
  spec.cubes = get_or<int>(e, "cubes", 8);
  spec.mode = get_or<std::string>(e, "mode", "image");
  if (spec.mode != "image" && spec.mode != "arrangement") {
    throw ConfigError("environment.mode must be \"image\" or \"arrangement\"");
  }
  spec.target = get_or<std::string>(
      e, "target", spec.mode == "image" ? "oval10" : "diamond5");
  spec.horizon = get_or<long>(e, "horizon", 0);
  spec.bonus = get_or<double>(e, "bonus", 1.0);
  spec.delta = get_or<double>(e, "delta", -1.0);
  spec.acceptance = get_or<std::string>(e, "acceptance", "exact");
  if (spec.acceptance != "exact" && spec.acceptance != "literal") {
    throw ConfigError("environment.acceptance must be \"exact\" or \"literal\"");
  }
  spec.width = get_or<int>(e, "width", 0);
  spec.height = get_or<int>(e, "height", 0);
  return spec;
}

EpsilonSchedule parse_epsilon(const json& agent, const std::string& env_kind,
                              long episodes) {
  const bool cube = env_kind == "cube";
  std::string kind = cube ? "linear" : "exponential";
  double initial = 1.0;
  double minimum = cube ? 0.05 : 0.1;
  std::optional<double> decay;
  if (agent.contains("epsilon")) {
    const json& e = agent.at("epsilon");
    kind = get_or<std::string>(e, "kind", kind);
    initial = get_or<double>(e, "initial", initial);
    minimum = get_or<double>(e, "minimum", minimum);
    if (e.contains("decay")) decay = e.at("decay").get<double>();
  }
  try {
    if (kind == "linear") {
      // default: reach the minimum at 80% of the episode budget
      const double d = decay.value_or(0.8 * static_cast<double>(episodes));
      return EpsilonSchedule::linear(initial, minimum, d);
    }
    if (kind == "exponential") {
      return EpsilonSchedule::exponential(initial, minimum,
                                          decay.value_or(0.998));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad epsilon schedule: ") + e.what());
  }
  throw ConfigError("epsilon.kind must be \"linear\" or \"exponential\"");
}

OracleSpec parse_oracle(const json& o) {
  OracleSpec spec;
  spec.backend = get_or<std::string>(o, "backend", "scripted");
  if (spec.backend != "scripted" && spec.backend != "http") {
    throw ConfigError("oracle.backend must be \"scripted\" or \"http\"");
  }
  spec.theta = get_or<double>(o, "theta", 0.45);
  spec.kappa_slope = get_or<double>(o, "kappa_slope", 0.0);
  spec.temperature = get_or<double>(o, "temperature", 0.0);
  if (spec.temperature < 0.0 || spec.temperature > 1.0) {
    throw ConfigError("oracle.temperature must be in [0, 1]");
  }
  spec.template_path = get_or<std::string>(o, "template", "");
  spec.http.base_url = get_or<std::string>(o, "url", "");
  spec.http.path = get_or<std::string>(o, "path", spec.http.path);
  spec.http.model = get_or<std::string>(o, "model", spec.http.model);
  spec.http.api_key_env =
      get_or<std::string>(o, "api_key_env", spec.http.api_key_env);
  spec.http.timeout_seconds = get_or<int>(o, "timeout_s", 60);
  spec.http.max_retries = get_or<int>(o, "max_retries", 3);
  if (spec.backend == "http" && spec.http.base_url.empty()) {
    throw ConfigError("oracle.backend \"http\" requires oracle.url");
  }
  return spec;
}

json merge_section(const json& base, const json& variant,
                   const std::string& key) {
  json out = base.contains(key) ? base.at(key) : json::object();
  if (variant.contains(key)) {
    for (const auto& [k, v] : variant.at(key).items()) out[k] = v;
  }
  return out;
}

RunnableVariant build_variant(const json& doc, const json& variant) {
  RunnableVariant rv;
  rv.label = variant.at("label").get<std::string>();
  rv.ratio_against = get_or<std::string>(variant, "ratio_against", "");

  const json env_json = merge_section(doc, variant, "environment");
  const json primary_json = merge_section(doc, variant, "primary");
  const json secondary_json = merge_section(doc, variant, "secondary");
  const json oracle_json = merge_section(doc, variant, "oracle");

  rv.env = parse_env(env_json);
  rv.oracle = parse_oracle(oracle_json);
  rv.primary = primary_json;
  rv.secondary = secondary_json;

  rv.trial.episodes = variant.contains("episodes")
                          ? variant.at("episodes").get<long>()
                          : get_or<long>(doc, "episodes", 100);
  if (rv.trial.episodes < 1) throw ConfigError("episodes must be >= 1");
  rv.trial.follow_probability =
      variant.contains("follow_probability")
          ? variant.at("follow_probability").get<double>()
          : get_or<double>(doc, "follow_probability", 1.0);
  if (rv.trial.follow_probability < 0.0 || rv.trial.follow_probability > 1.0) {
    throw ConfigError("follow_probability must be in [0, 1]");
  }
  rv.trial.gating = parse_gating(get_or<std::string>(variant, "gating", "seq"));
  rv.trial.temperature = rv.oracle.temperature;
  const std::string default_reward =
      rv.env.kind == "cube" ? "binary_pm" : "binary_01";
  rv.trial.reward_mode = parse_reward_mode(
      get_or<std::string>(secondary_json, "reward", default_reward));
  if (rv.env.kind == "cube" &&
      rv.trial.reward_mode == SecondaryRewardMode::logistic) {
    throw ConfigError(
        "secondary.reward \"logistic\" is grid-normalized and not valid on "
        "the cube environment");
  }
  rv.trial.primary_eps =
      parse_epsilon(primary_json, rv.env.kind, rv.trial.episodes);
  rv.trial.secondary_eps =
      parse_epsilon(secondary_json, rv.env.kind, rv.trial.episodes);

  const json cache_json = doc.contains("cache") ? doc.at("cache") : json::object();
  rv.cache_pool = get_or<int>(cache_json, "pool", 10);
  return rv;
}

std::unique_ptr<TextBackend> make_backend_for(const RunnableVariant& rv,
                                              const CubeEnv* cube,
                                              const GridEnv* grid,
                                              RngStream rng) {
  if (rv.oracle.backend == "http") {
    return std::make_unique<HttpBackend>(rv.oracle.http);
  }
  const ScriptedOracleConfig cfg{rv.oracle.theta, rv.oracle.kappa_slope};
  if (cube != nullptr) {
    return std::make_unique<ScriptedCubeBackend>(*cube, cfg, rng);
  }
  return std::make_unique<ScriptedGridBackend>(*grid, cfg, rng);
}

TaskDescriptor descriptor_for(const RunnableVariant& rv, const CubeEnv* cube,
                              const GridEnv* grid) {
  if (!rv.oracle.template_path.empty()) {
    return descriptor_from_file(rv.env.kind == "cube"
                                    ? "cube"
                                    : (grid->config().mode == GridMode::image
                                           ? "image"
                                           : "arrange"),
                                rv.oracle.template_path);
  }
  if (cube != nullptr) return cube_descriptor(cube->config().cubes);
  return grid->config().mode == GridMode::image ? image_descriptor()
                                                : arrangement_descriptor();
}

ExperimentAggregate run_variant(const RunnableVariant& rv,
                                const std::vector<std::uint64_t>& seeds,
                                unsigned threads, ResponseCache* cache) {
  if (rv.env.kind == "cube") {
    const std::string pk = get_or<std::string>(rv.primary, "kind", "tabular");
    const std::string sk = get_or<std::string>(rv.secondary, "kind", "tabular");
    if (pk != "tabular" || sk != "tabular") {
      throw ConfigError(
          "the cube environment runs tabular primary and secondary agents");
    }
    CubeEnvConfig env_cfg = make_cube_config(rv.env.cubes);
    env_cfg.bonus = rv.env.bonus;
    if (rv.env.horizon > 0) env_cfg.horizon = rv.env.horizon;
    if (rv.env.delta >= 0.0) env_cfg.delta = rv.env.delta;
    env_cfg.acceptance = rv.env.acceptance == "exact" ? CubeAcceptance::exact
                                                      : CubeAcceptance::literal;
    const CubeEnv env(env_cfg);
    const double p_alpha = get_or<double>(rv.primary, "alpha", 0.1);
    const double p_gamma = get_or<double>(rv.primary, "gamma", 0.95);
    const double s_alpha = get_or<double>(rv.secondary, "alpha", 0.1);
    const TaskDescriptor descriptor = descriptor_for(rv, &env, nullptr);

    auto trial = [&](std::uint64_t seed) {
      return run_trial(
          env, descriptor, rv.trial, seed,
          [&](RngStream) {
            return TabularPrimary(env.num_actions(), p_alpha, p_gamma);
          },
          [&](RngStream) { return TabularSecondary(s_alpha); },
          [&](RngStream rng) {
            return make_backend_for(rv, &env, nullptr, rng);
          },
          cache);
    };
    return aggregate_trials(run_trials(seeds, trial, threads));
  }

  const std::string pk = get_or<std::string>(rv.primary, "kind", "dqn");
  const std::string sk = get_or<std::string>(rv.secondary, "kind", "net");
  if (pk != "dqn" || sk != "net") {
    throw ConfigError(
        "the grid environments run a dqn primary and a net secondary agent");
  }
  const bool image = rv.env.mode == "image";
  GridEnvConfig env_cfg;
  try {
    env_cfg.target = resolve_target(rv.env.target);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("environment.target: ") + e.what());
  }
  env_cfg.width = env_cfg.target.width;
  env_cfg.height = env_cfg.target.height;
  if ((rv.env.width > 0 && rv.env.width != env_cfg.width) ||
      (rv.env.height > 0 && rv.env.height != env_cfg.height)) {
    throw ConfigError("environment width/height do not match the target " +
                      env_cfg.target.name);
  }
  env_cfg.mode = image ? GridMode::image : GridMode::arrangement;
  env_cfg.delta = image ? 0.95 : 0.99;
  env_cfg.horizon = image ? 500 : 50;
  env_cfg.bonus = rv.env.bonus;
  if (rv.env.horizon > 0) env_cfg.horizon = rv.env.horizon;
  if (rv.env.delta >= 0.0) env_cfg.delta = rv.env.delta;
  const GridEnv env(env_cfg);

  DqnHyperparams hp;
  hp.hidden = get_or<std::vector<std::size_t>>(
      rv.primary, "hidden",
      image ? std::vector<std::size_t>{128, 128}
            : std::vector<std::size_t>{64, 64});
  hp.batch = get_or<std::size_t>(rv.primary, "batch", image ? 32 : 16);
  hp.replay_capacity = get_or<std::size_t>(rv.primary, "replay", 10000);
  hp.gamma = get_or<double>(rv.primary, "gamma", 0.95);
  hp.learning_rate = get_or<double>(rv.primary, "alpha", 1e-3);
  hp.target_sync = get_or<long>(rv.primary, "target_sync", 100);
  const double s_alpha = get_or<double>(rv.secondary, "alpha", 1e-3);
  const auto s_hidden =
      get_or<std::vector<std::size_t>>(rv.secondary, "hidden", hp.hidden);
  const TaskDescriptor descriptor = descriptor_for(rv, nullptr, &env);
  const std::size_t input = static_cast<std::size_t>(env.num_cells()) + 2;

  auto trial = [&](std::uint64_t seed) {
    return run_trial(
        env, descriptor, rv.trial, seed,
        [&](RngStream rng) {
          return DqnPrimary(input, 2, hp, std::move(rng));
        },
        [&](RngStream rng) {
          return NetSecondary(static_cast<std::size_t>(env.num_cells()),
                              s_hidden, s_alpha, std::move(rng));
        },
        [&](RngStream rng) { return make_backend_for(rv, nullptr, &env, rng); },
        cache);
  };
  return aggregate_trials(run_trials(seeds, trial, threads));
}

}  // namespace

ExperimentOutcome run_experiment_doc(const json& doc) {
  validate_experiment_json(doc);
  ExperimentOutcome out;
  out.name = get_or<std::string>(doc, "name", "experiment");
  out.out_dir = get_or<std::string>(doc, "out_dir", "results/" + out.name);
  out.seeds = get_or<std::vector<std::uint64_t>>(
      doc, "seeds", std::vector<std::uint64_t>{1});
  if (out.seeds.empty()) throw ConfigError("seeds must be non-empty");
  const unsigned threads =
      static_cast<unsigned>(get_or<int>(doc, "threads", 0));

  json variants = doc.contains("variants")
                      ? doc.at("variants")
                      : json::array({json{{"label", "seq"}, {"gating", "seq"}}});

  const json cache_json =
      doc.contains("cache") ? doc.at("cache") : json::object();
  const std::string cache_path = get_or<std::string>(cache_json, "path", "");
  const int cache_pool = get_or<int>(cache_json, "pool", 10);
  std::optional<ResponseCache> shared_cache;
  if (!cache_path.empty()) {
    std::vector<std::string> warnings;
    shared_cache.emplace(ResponseCache::load(cache_path, cache_pool, &warnings));
    for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  }

  for (const auto& v : variants) {
    const RunnableVariant rv = build_variant(doc, v);
    for (const auto& label : out.variant_labels) {
      if (label == rv.label) {
        throw ConfigError("duplicate variant label \"" + rv.label + "\"");
      }
    }
    out.variant_labels.push_back(rv.label);
    out.aggregates.emplace(
        rv.label, run_variant(rv, out.seeds, threads,
                              shared_cache ? &*shared_cache : nullptr));
  }

  for (const auto& v : variants) {
    const std::string label = v.at("label").get<std::string>();
    const std::string against = get_or<std::string>(v, "ratio_against", "");
    if (against.empty()) continue;
    const auto it = out.aggregates.find(against);
    if (it == out.aggregates.end()) {
      throw ConfigError("variant \"" + label + "\" sets ratio_against \"" +
                        against + "\" which is not a variant label");
    }
    out.ratios.emplace_back(
        label, performance_ratio(out.aggregates.at(label), it->second));
  }

  if (shared_cache) shared_cache->save(cache_path);
  out.resolved_config = doc;
  return out;
}

}  // namespace lagr
