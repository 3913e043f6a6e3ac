#include <doctest.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "lagr/oracle.hpp"
#include "lagr/rng.hpp"

using namespace lagr;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

CubeEnv cube8() { return CubeEnv(make_cube_config(8)); }

}  // namespace

TEST_CASE("prompt rendering inserts the state at the marker") {
  const auto env = cube8();
  const auto d = cube_descriptor(env.config().cubes);
  const std::string prompt = render_prompt(d, env.render_state({{5, 6, 7}}));
  CHECK(prompt.find("['e','f','g']") != std::string::npos);
  CHECK(prompt.find(kStateMarker) == std::string::npos);
  CHECK(prompt.find("Blue cube of edge length 10cm (represented by 'e')") !=
        std::string::npos);

  // byte-stable
  CHECK(prompt == render_prompt(d, env.render_state({{5, 6, 7}})));

  const GridEnv grid(make_image_config());
  const auto gd = image_descriptor();
  const std::string gp = render_prompt(gd, grid.render_state(grid.reset()));
  CHECK(gp.find("[[0,0,0,0,0,0,0,0,0,0)") == std::string::npos);
  CHECK(gp.find(grid.render_state(grid.reset())) != std::string::npos);

  TaskDescriptor no_marker{"bad", "no marker here"};
  CHECK_THROWS(render_prompt(no_marker, "x"));
  TaskDescriptor two{"bad2", "{{STATE}} and {{STATE}}"};
  CHECK_THROWS(render_prompt(two, "x"));
}

TEST_CASE("shipped template files match the built-in descriptors") {
  const std::string dir = LAGR_PROMPTS_DIR;
  CHECK(slurp(dir + "/cube.txt") ==
        cube_descriptor(default_cube_specs()).template_text);
  CHECK(slurp(dir + "/image.txt") == image_descriptor().template_text);
  CHECK(slurp(dir + "/arrange.txt") == arrangement_descriptor().template_text);

  const auto d = descriptor_from_file("cube", dir + "/cube.txt");
  CHECK(d.template_text.find(kStateMarker) != std::string::npos);
}

TEST_CASE("scripted cube oracle extrapolates from consistent prefixes") {
  const auto env = cube8();
  ScriptedCubeBackend backend(env, {0.45, 0.0}, make_rng(1).fork("oracle"));

  OracleQuery q;
  q.env_id = env.id();
  q.descriptor_id = "cube";
  q.temperature = 0.0;

  // f = 4/8 = 0.5 >= 0.45 and [5,6,7,1] is a prefix of the first target
  q.rendered_state = env.render_state({{5, 6, 7, 1}});
  const std::string good = backend.complete(q);
  const auto parsed = parse_solution(env, good);
  REQUIRE(parsed.ok());
  CHECK(parsed.state->stack == std::vector<int>{5, 6, 7, 1, 2, 3, 4, 8});

  // f = 1/8 below theta: full-length non-target preserving the prefix
  q.rendered_state = env.render_state({{5}});
  const auto bad = parse_solution(env, backend.complete(q));
  REQUIRE(bad.ok());
  CHECK(bad.state->stack.size() == 8);
  CHECK(bad.state->stack[0] == 5);
  CHECK_FALSE(env.is_solution(*bad.state));

  // above theta but inconsistent: still corrupted
  q.rendered_state = env.render_state({{8, 7, 6, 5}});
  const auto junk = parse_solution(env, backend.complete(q));
  REQUIRE(junk.ok());
  CHECK_FALSE(env.is_solution(*junk.state));

  // the full consistent stack extrapolates to itself
  q.rendered_state = env.render_state({{5, 6, 7, 1, 2, 3, 8, 4}});
  const auto full = parse_solution(env, backend.complete(q));
  REQUIRE(full.ok());
  CHECK(env.is_solution(*full.state));
}

TEST_CASE("scripted cube oracle is pure at temperature zero") {
  const auto env = cube8();
  ScriptedCubeBackend backend(env, {0.45, 0.3}, make_rng(5).fork("oracle"));
  OracleQuery q;
  q.env_id = env.id();
  q.descriptor_id = "cube";
  q.temperature = 0.0;
  q.rendered_state = env.render_state({{5, 6, 7, 1, 2}});
  const std::string first = backend.complete(q);
  for (int i = 0; i < 20; ++i) CHECK(backend.complete(q) == first);
}

TEST_CASE("every scripted cube output parses") {
  const auto env = cube8();
  ScriptedCubeBackend backend(env, {0.45, 0.5}, make_rng(6).fork("oracle"));
  RngStream rng = make_rng(7);
  OracleQuery q;
  q.env_id = env.id();
  q.descriptor_id = "cube";
  q.temperature = 1.0;
  for (int trial = 0; trial < 300; ++trial) {
    CubeStackState s;
    const int walk = static_cast<int>(rng.below(12));
    for (int i = 0; i < walk; ++i) {
      const auto legal = env.legal_actions(s);
      CubeStackState next;
      env.step(s, legal[rng.below(legal.size())], next);
      s = next;
    }
    q.rendered_state = env.render_state(s);
    CHECK(parse_solution(env, backend.complete(q)).ok());
  }
}

TEST_CASE("pseudo-temperature produces the configured wrong-answer rate") {
  const auto env = cube8();
  const double kappa = 0.3;
  ScriptedCubeBackend backend(env, {0.45, kappa}, make_rng(8).fork("oracle"));
  OracleQuery q;
  q.env_id = env.id();
  q.descriptor_id = "cube";
  q.temperature = 1.0;
  q.rendered_state = env.render_state({{5, 6, 7, 1}});  // above theta
  const int n = 10000;
  int wrong = 0;
  for (int i = 0; i < n; ++i) {
    const auto parsed = parse_solution(env, backend.complete(q));
    REQUIRE(parsed.ok());
    wrong += env.is_solution(*parsed.state) ? 0 : 1;
  }
  const double sigma = std::sqrt(n * kappa * (1.0 - kappa));
  CHECK(std::fabs(wrong - n * kappa) < 3.0 * sigma);
}

TEST_CASE("scripted grid oracle gates on placed-object evidence") {
  const GridEnv env(make_image_config("oval10"));
  ScriptedGridBackend backend(env, {0.45, 0.0}, make_rng(9).fork("oracle"));
  OracleQuery q;
  q.env_id = env.id();
  q.descriptor_id = "image";
  q.temperature = 0.0;

  // empty grid scores 0 evidence, not the ~0.86 an all-cells metric gives
  GridState empty = env.reset();
  CHECK(env.completion_fraction(empty) == 0.0);
  q.rendered_state = env.render_state(empty);
  auto r = parse_solution(env, backend.complete(q));
  REQUIRE(r.ok());
  CHECK_FALSE(env.is_solution(*r.state));
  // the corrupted completion still preserves the observed objects (none)

  // 7 of 14 target ones placed: f = 0.5 >= theta -> the target comes back
  double achieved = 0.0;
  const GridState half = partial_target_state(env, 0.5, &achieved);
  CHECK(achieved == doctest::Approx(0.5));
  q.rendered_state = env.render_state(half);
  r = parse_solution(env, backend.complete(q));
  REQUIRE(r.ok());
  CHECK(env.is_solution(*r.state));

  // stray wrong objects do not block the gate once evidence is there
  GridState messy = half;
  messy.cells[0] = 1;
  messy.cells[99] = 1;
  q.rendered_state = env.render_state(messy);
  r = parse_solution(env, backend.complete(q));
  REQUIRE(r.ok());
  CHECK(env.is_solution(*r.state));

  // a corrupted grid completion keeps the observed objects
  GridState sparse = partial_target_state(env, 0.2, nullptr);
  q.rendered_state = env.render_state(sparse);
  r = parse_solution(env, backend.complete(q));
  REQUIRE(r.ok());
  CHECK_FALSE(env.is_solution(*r.state));
  for (std::size_t i = 0; i < sparse.cells.size(); ++i) {
    if (sparse.cells[i] == 1) CHECK(r.state->cells[i] == 1);
  }
}

TEST_CASE("solution parsing enforces the full-permutation constraint") {
  const auto env = cube8();
  auto p = parse_solution(env, "['e','f','g','a','b','c','d','h']");
  REQUIRE(p.ok());
  CHECK(p.state->stack == std::vector<int>{5, 6, 7, 1, 2, 3, 4, 8});

  CHECK(parse_solution(env, "['e','e','f','a','b','c','d','h']").status ==
        ParseStatus::constraint_violation);
  CHECK(parse_solution(env, "['e','f','g']").status ==
        ParseStatus::constraint_violation);
  CHECK(parse_solution(env, "nothing here").status == ParseStatus::malformed);

  const GridEnv grid(make_image_config());
  const std::string prose =
      "The shape is an oval. Final image:\n" +
      grid.render_cells(grid.config().target.cells) + "\nas requested.";
  CHECK(parse_solution(grid, prose).ok());
  CHECK(parse_solution(grid, "[[0,1],[1,0]]").status ==
        ParseStatus::constraint_violation);
}

TEST_CASE("accuracy sweep is a step function at theta for tau zero") {
  const auto env = cube8();
  ScriptedCubeBackend backend(env, {0.45, 0.0}, make_rng(10).fork("oracle"));
  const auto d = cube_descriptor(env.config().cubes);

  const std::vector<double> fractions{0.125, 0.5, 1.0};
  const auto rows = accuracy_sweep(env, backend, d, fractions, 10, 0.0);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].accuracy == 0.0);
  CHECK(rows[1].accuracy == 1.0);
  CHECK(rows[2].accuracy == 1.0);

  // 20-point grid: exactly 0 below theta, exactly 1 at or above
  std::vector<double> grid_fracs;
  for (int i = 1; i <= 20; ++i) grid_fracs.push_back(i / 20.0);
  const auto swept = accuracy_sweep(env, backend, d, grid_fracs, 5, 0.0);
  for (const auto& row : swept) {
    CHECK(row.accuracy == (row.achieved >= 0.45 ? 1.0 : 0.0));
  }

  CHECK_THROWS_AS(accuracy_sweep(env, backend, d, fractions, 0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("accuracy sweep counts backend errors as failures") {
  struct FailingBackend : TextBackend {
    std::string id() const override { return "failing"; }
    std::string complete(const OracleQuery&) override {
      throw OracleBackendError(OracleErrorKind::transport, "down");
    }
  };
  const auto env = cube8();
  FailingBackend backend;
  const auto d = cube_descriptor(env.config().cubes);
  const auto rows =
      accuracy_sweep(env, backend, d, std::vector<double>{1.0}, 4, 0.0);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].accuracy == 0.0);
  CHECK(rows[0].errors == 4);
}
