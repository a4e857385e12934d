#include <doctest.h>

#include "rlgp/bench.hpp"
#include "rlgp/errors.hpp"
#include "rlgp/symbolic.hpp"
#include "test_util.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace rlgp;

namespace {

// CSV text with the planning_time column blanked.
std::string withoutTimes(const std::string& csv) {
  std::istringstream in(csv);
  std::ostringstream out;
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cols;
    std::string cell;
    bool quoted = false;
    for (char c : line) {
      if (c == '"') quoted = !quoted;
      if (c == ',' && !quoted) {
        cols.push_back(cell);
        cell.clear();
      } else {
        cell += c;
      }
    }
    cols.push_back(cell);
    if (cols.size() > 3) cols[3] = "-";
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
  }
  return out.str();
}

std::filesystem::path scratchDir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("rlgp_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("pick-and-place generator: three objects within arm reach of the near side") {
  const Scenario s = generateScenario("pickplace", 0);
  REQUIRE(s.world.movables.size() == 3);
  CHECK(s.goal.size() == 3);
  const RobotModel& model = defaultRobotModel();
  // Closest admissible base: on the near side, clear of the table by the footprint.
  const double tableEdge = -0.4 - model.footprintRadius;
  for (const auto& m : s.world.movables) {
    const Vec3 p = m.geometry.position;
    const Vec3 shoulder(std::min(tableEdge, p.x()), p.y(), 0.6);
    CHECK((p - shoulder).norm() <= model.armReach());
    CHECK(p.x() >= -0.4);
    CHECK(p.x() <= 0.4);
  }
  CHECK(checkScenarioFeasible(s));
}

TEST_CASE("generators are deterministic per seed") {
  for (const auto& kind : scenarioKinds()) {
    const auto a = scenarioToJson(generateScenario(kind, 7)).dump();
    const auto b = scenarioToJson(generateScenario(kind, 7)).dump();
    CHECK(a == b);
    CHECK(a != scenarioToJson(generateScenario(kind, 8)).dump());
  }
}

TEST_CASE("far-side sorting: some object is out of reach from the near side") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Scenario s = generateScenario("sorting", seed, {true, -1});
    REQUIRE(s.world.movables.size() == 2);
    int far = 0;
    for (const auto& m : s.world.movables) far += unreachableFromNearSide(s, m.id) ? 1 : 0;
    CHECK(far >= 1);
    std::string why;
    CHECK_MESSAGE(checkScenarioFeasible(s, &why), why);
  }
  // The oracle is not vacuous: a near-strip object is reachable from the near side.
  Scenario s = generateScenario("sorting", 0, {true, -1});
  s.world.movables[0].geometry.position = Vec3(-0.4, 0.0, 0.48);
  CHECK_FALSE(unreachableFromNearSide(s, s.world.movables[0].id));
  CHECK_THROWS_AS(unreachableFromNearSide(s, "nope"), InvalidParameter);
}

TEST_CASE("table clearing starts with the drawer closed") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Scenario s = generateScenario("tableclearing", seed);
    REQUIRE(s.world.drawer);
    CHECK(initialState(s.domain, s.world).atoms.count("drawerClosed") == 1);
    CHECK(initialState(s.domain, s.world).atoms.count("drawerOpen") == 0);
  }
}

TEST_CASE("generator errors") {
  CHECK_THROWS_AS(generateScenario("juggling", 0), InvalidParameter);
  // Too many objects for the sorting strips.
  CHECK_THROWS_AS(generateScenario("sorting", 0, {false, 40}), GenerationFailure);
}

TEST_CASE("BenchConfig invariants") {
  BenchConfig c;
  CHECK_NOTHROW(c.validate());
  c.runs = 0;
  CHECK_THROWS_AS(c.validate(), InvalidParameter);
  c.runs = 1;
  c.modes.clear();
  CHECK_THROWS_AS(c.validate(), InvalidParameter);
}

TEST_CASE("runBatch on a satisfied-goal scenario") {
  const auto dir = scratchDir("trivial");
  Scenario s = generateScenario("pickplace", 0);
  s.kind = "custom";
  s.goal = {"handEmpty"};
  const std::string path = (dir / "trivial.json").string();
  saveScenario(s, path);
  BenchConfig c;
  c.scenario = path;
  c.runs = 2;
  const auto rows = runBatch(c);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.success);
    CHECK(r.steps == 0);
  }
  const BenchSummary sum = summarize(rows, HeuristicMode::Reachability);
  CHECK(sum.successRate == 100.0);
  CHECK(sum.meanSteps == 0.0);
}

TEST_CASE("runBatch records generation failures per row") {
  BenchConfig c;
  c.scenario = "sorting";
  c.gen.objects = 40;
  c.runs = 2;
  c.modes = {HeuristicMode::Reachability, HeuristicMode::Euclidean};
  const auto rows = runBatch(c);
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    CHECK_FALSE(r.success);
    CHECK(r.failure.find("GenerationFailure") != std::string::npos);
  }
  CHECK(summarize(rows, HeuristicMode::Euclidean).successRate == 0.0);
}

TEST_CASE("bench tables are reproducible and dumps are written") {
  const auto dir = scratchDir("batch");
  BenchConfig c;
  c.scenario = "pickplace";
  c.runs = 2;
  c.seedBase = 10;
  c.modes = {HeuristicMode::Reachability, HeuristicMode::Euclidean};
  c.outDir = dir.string();
  c.dumpGraph = c.dumpLibrary = c.dumpTraj = true;
  std::ostringstream a, b;
  writeCsv(runBatch(c), a);
  c.dumpGraph = c.dumpLibrary = c.dumpTraj = false;
  writeCsv(runBatch(c), b);
  CHECK(withoutTimes(a.str()) == withoutTimes(b.str()));
  CHECK(a.str().rfind("seed,mode,success,planning_time,path_length,steps,failure\n", 0) == 0);
  CHECK(a.str().find("aggregate,reachability,") != std::string::npos);
  CHECK(a.str().find("aggregate,euclidean,") != std::string::npos);

  CHECK(std::filesystem::exists(dir / "pickplace_10_reachability_graph.txt"));
  CHECK(std::filesystem::exists(dir / "pickplace_10_reachability_library.txt"));
  CHECK(std::filesystem::exists(dir / "pickplace_11_euclidean_traj.txt"));
}

TEST_CASE("CSV quoting and aggregates") {
  std::vector<BenchRow> rows(2);
  rows[0].seed = 1;
  rows[0].success = true;
  rows[0].planningTime = 2.0;
  rows[0].pathLength = 3.0;
  rows[0].steps = 6;
  rows[1].seed = 2;
  rows[1].failure = "NoPlan: a, b";
  std::ostringstream out;
  writeCsv(rows, out);
  const std::string csv = out.str();
  CHECK(csv.find("2,reachability,0,0.0000,0.000000,0,\"NoPlan: a, b\"\n") != std::string::npos);
  CHECK(csv.find("aggregate,reachability,50.00,2.0000,3.000000,6.000,runs=2\n") != std::string::npos);
}
