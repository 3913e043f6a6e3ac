#include <doctest.h>

#include <fstream>

#include "lagr/experiment.hpp"

using namespace lagr;
using nlohmann::json;

namespace {

json small_cube_doc() {
  return json{
      {"name", "cube-mini"},
      {"out_dir", "/tmp/lagr_bundle_test"},
      {"seeds", {1, 2}},
      {"episodes", 12},
      {"environment", {{"kind", "cube"}, {"cubes", 8}}},
      {"oracle", {{"backend", "scripted"}, {"theta", 0.45}}},
      {"variants",
       json::array({
           json{{"label", "lagr-seq"}, {"gating", "seq"},
                {"ratio_against", "baseline"}},
           json{{"label", "baseline"}, {"gating", "never"}},
       })},
  };
}

}  // namespace

TEST_CASE("unknown keys are rejected by name") {
  auto doc = small_cube_doc();
  doc["episdes"] = 50;
  try {
    validate_experiment_json(doc);
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("episdes") != std::string::npos);
  }

  auto doc2 = small_cube_doc();
  doc2["environment"]["colour"] = "red";
  try {
    validate_experiment_json(doc2);
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("colour") != std::string::npos);
  }

  auto doc3 = small_cube_doc();
  doc3["variants"][0]["gatng"] = "seq";
  CHECK_THROWS_AS(validate_experiment_json(doc3), ConfigError);
}

TEST_CASE("experiment files load from disk with validation") {
  const std::string path = "/tmp/lagr_experiment_ok.json";
  {
    std::ofstream out(path);
    out << small_cube_doc().dump(2);
  }
  CHECK_NOTHROW(load_experiment_json(path));

  const std::string bad = "/tmp/lagr_experiment_bad.json";
  {
    std::ofstream out(bad);
    out << "{ not json";
  }
  CHECK_THROWS_AS(load_experiment_json(bad), ConfigError);
  CHECK_THROWS_AS(load_experiment_json("/tmp/missing_lagr.json"), ConfigError);
}

TEST_CASE("a small cube experiment runs and aggregates") {
  const auto outcome = run_experiment_doc(small_cube_doc());
  CHECK(outcome.variant_labels ==
        std::vector<std::string>{"lagr-seq", "baseline"});
  for (const auto& label : outcome.variant_labels) {
    const auto& agg = outcome.aggregates.at(label);
    CHECK(agg.mean_return.size() == 12);
    CHECK(agg.trials.size() == 2);
  }
  REQUIRE(outcome.ratios.size() == 1);
  CHECK(outcome.ratios[0].first == "lagr-seq");
  CHECK(outcome.ratios[0].second > 0.0);
  CHECK(outcome.aggregates.at("baseline").queries.mean == 0.0);
}

TEST_CASE("experiment runs are deterministic and thread-count independent") {
  auto doc = small_cube_doc();
  const auto a = run_experiment_doc(doc);
  const auto b = run_experiment_doc(doc);
  doc["threads"] = 2;
  const auto c = run_experiment_doc(doc);
  for (const auto& label : a.variant_labels) {
    CHECK(a.aggregates.at(label).mean_return ==
          b.aggregates.at(label).mean_return);
    CHECK(a.aggregates.at(label).mean_return ==
          c.aggregates.at(label).mean_return);
  }
}

TEST_CASE("variant overrides swap the environment") {
  auto doc = small_cube_doc();
  doc["variants"] = json::array({
      json{{"label", "cube5"}, {"gating", "seq"},
           {"environment", {{"cubes", 5}}}},
  });
  const auto outcome = run_experiment_doc(doc);
  CHECK(outcome.aggregates.at("cube5").mean_return.size() == 12);
}

TEST_CASE("unsupported agent/environment combinations are rejected") {
  auto doc = small_cube_doc();
  doc["primary"] = {{"kind", "dqn"}};
  CHECK_THROWS_AS(run_experiment_doc(doc), ConfigError);

  auto doc2 = small_cube_doc();
  doc2["secondary"] = {{"reward", "logistic"}};
  CHECK_THROWS_AS(run_experiment_doc(doc2), ConfigError);

  auto doc3 = small_cube_doc();
  doc3["oracle"]["backend"] = "http";  // no url
  CHECK_THROWS_AS(run_experiment_doc(doc3), ConfigError);
}

TEST_CASE("cli overrides rewrite the document in place") {
  auto doc = small_cube_doc();
  CliOverrides o;
  o.seeds = std::vector<std::uint64_t>{7};
  o.gating = "never";
  o.temperature = 0.5;
  o.out_dir = "/tmp/elsewhere";
  apply_overrides(doc, o);
  CHECK(doc["seeds"] == json({7}));
  CHECK(doc["out_dir"] == "/tmp/elsewhere");
  CHECK(doc["oracle"]["temperature"] == 0.5);
  for (const auto& v : doc["variants"]) CHECK(v["gating"] == "never");

  CliOverrides bad;
  bad.gating = "sometimes";
  CHECK_THROWS(apply_overrides(doc, bad));
}

TEST_CASE("a ratio against an unknown label is rejected") {
  auto doc = small_cube_doc();
  doc["variants"][0]["ratio_against"] = "nope";
  CHECK_THROWS_AS(run_experiment_doc(doc), ConfigError);
}

TEST_CASE("grid targets resolve from fixture files in configs") {
  const std::string target_path = "/tmp/lagr_exp_bar.txt";
  {
    std::ofstream out(target_path);
    out << "000\n111\n000\n";
  }
  json doc{
      {"name", "grid-file-target"},
      {"seeds", {1}},
      {"episodes", 2},
      {"environment",
       {{"kind", "grid"}, {"mode", "image"}, {"target", target_path},
        {"horizon", 12}}},
      {"primary", {{"kind", "dqn"}, {"hidden", {8}}, {"batch", 4}}},
      {"secondary", {{"kind", "net"}, {"hidden", {8}}}},
      {"variants", json::array({json{{"label", "x"}, {"gating", "never"}}})},
  };
  const auto outcome = run_experiment_doc(doc);
  CHECK(outcome.aggregates.at("x").mean_return.size() == 2);

  doc["environment"]["target"] = "no-such-shape";
  CHECK_THROWS_AS(run_experiment_doc(doc), ConfigError);

  doc["environment"]["target"] = target_path;
  doc["environment"]["width"] = 5;  // target is 3x3
  CHECK_THROWS_AS(run_experiment_doc(doc), ConfigError);
}
