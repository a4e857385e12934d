#include "rlgp/bench.hpp"

#include "rlgp/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

namespace rlgp {

std::vector<std::string> scenarioKinds() { return {"pickplace", "sorting", "tableclearing"}; }

namespace {

constexpr double kTableHeight = 0.45;
const Vec3 kObjectSize(0.05, 0.05, 0.06);
constexpr int kGenerationAttempts = 200;

Obstacle boxObstacle(const std::string& name, const Vec3& center, const Vec3& size) {
  return {name, {BoxShape{0.5 * size}, center}};
}

MovableObject object(const std::string& id, const std::string& color, const std::string& support, const Vec3& base) {
  MovableObject m;
  m.id = id;
  m.color = color;
  m.support = support;
  m.geometry = {BoxShape{0.5 * kObjectSize}, base + Vec3(0, 0, 0.5 * kObjectSize.z())};
  return m;
}

Region tray(const std::string& name, const std::string& color, const Vec3& topCenter, int slots) {
  Region r;
  r.name = name;
  r.color = color;
  r.half = Vec3(0.15, 0.15, 0.01);
  r.center = topCenter - Vec3(0, 0, r.half.z());
  r.slots = slots;
  return r;
}

bool spaced(const std::vector<Vec3>& pts, const Vec3& p, double minGap) {
  for (const auto& q : pts)
    if ((q - p).head<2>().norm() < minGap) return false;
  return true;
}

// Pick-and-place: a 0.8 x 1.2 table with objects on the robot's half and a tray on a side table.
Scenario pickPlaceScenario(std::mt19937_64& rng, int count) {
  Scenario s;
  s.kind = "pickplace";
  s.domain = "pickplace";
  const RobotModel& model = defaultRobotModel();
  s.initial = model.homeConfiguration(-1.0, 0.0, 0.0);
  World& w = s.world;
  w.pMin = Vec3(-1.5, -1.0, 0.1);
  w.pMax = Vec3(0.8, 1.8, 1.1);
  w.obstacles.push_back(boxObstacle("table", Vec3(0, 0, kTableHeight / 2), Vec3(0.8, 1.2, kTableHeight)));
  w.obstacles.push_back(boxObstacle("tray_table", Vec3(-1.0, 1.4, kTableHeight / 2), Vec3(0.4, 0.4, kTableHeight)));
  w.regions.push_back(tray("tray", "", Vec3(-1.0, 1.4, kTableHeight), std::max(3, count)));
  std::uniform_real_distribution<double> ux(-0.3, 0.0), uy(-0.45, 0.45);
  const char* colors[] = {"red", "green", "blue", "yellow", "purple"};
  std::vector<Vec3> placed;
  for (int i = 0; i < count; ++i) {
    Vec3 p;
    int tries = 0;
    do {
      p = Vec3(ux(rng), uy(rng), kTableHeight);
      if (++tries > 1000) throw GenerationFailure("could not space the objects");
    } while (!spaced(placed, p, 0.12));
    placed.push_back(p);
    const std::string id = "o" + std::to_string(i + 1);
    w.movables.push_back(object(id, colors[i % 5], "table", p));
    s.goal.push_back("in(" + id + ",tray)");
  }
  return s;
}

// Sorting: a 1.4 x 2.0 table; objects sit in a near or a far strip, trays stand by the robot's side.
Scenario sortingScenario(std::mt19937_64& rng, int count, bool farSide) {
  Scenario s;
  s.kind = "sorting";
  s.domain = "sorting";
  const RobotModel& model = defaultRobotModel();
  s.initial = model.homeConfiguration(-1.2, 0.0, 0.0);
  World& w = s.world;
  w.pMin = Vec3(-1.9, -1.6, 0.1);
  w.pMax = Vec3(1.5, 1.6, 1.1);
  w.obstacles.push_back(boxObstacle("table", Vec3(0, 0, kTableHeight / 2), Vec3(1.4, 2.0, kTableHeight)));
  w.obstacles.push_back(boxObstacle("tray_table_red", Vec3(-1.55, 0.9, kTableHeight / 2), Vec3(0.4, 0.4, kTableHeight)));
  w.obstacles.push_back(boxObstacle("tray_table_blue", Vec3(-1.55, -0.9, kTableHeight / 2), Vec3(0.4, 0.4, kTableHeight)));
  w.regions.push_back(tray("trayRed", "red", Vec3(-1.55, 0.9, kTableHeight), std::max(2, count)));
  w.regions.push_back(tray("trayBlue", "blue", Vec3(-1.55, -0.9, kTableHeight), std::max(2, count)));
  std::uniform_real_distribution<double> near(-0.55, -0.25), far(0.25, 0.55), uy(-0.45, 0.45), coin(0.0, 1.0);
  std::vector<Vec3> placed;
  for (int i = 0; i < count; ++i) {
    const bool isFar = (farSide && i == 0) || coin(rng) < 0.5;
    Vec3 p;
    int tries = 0;
    do {
      p = Vec3(isFar ? far(rng) : near(rng), uy(rng), kTableHeight);
      if (++tries > 1000) throw GenerationFailure("could not space the objects");
    } while (!spaced(placed, p, 0.12));
    placed.push_back(p);
    const bool red = i % 2 == 0;
    const std::string id = (red ? "r" : "b") + std::to_string(i / 2 + 1);
    w.movables.push_back(object(id, red ? "red" : "blue", "table", p));
    s.goal.push_back("in(" + id + "," + (red ? "trayRed" : "trayBlue") + ")");
  }
  if (farSide) {
    // Shuffle which colour sits on the far side.
    if (count >= 2 && coin(rng) < 0.5) std::swap(w.movables[0].geometry.position, w.movables[1].geometry.position);
  }
  return s;
}

// Table clearing: a low step with a drawer, under a shelf; the object sits on the step under the shelf.
Scenario tableClearingScenario(std::mt19937_64& rng, int count) {
  Scenario s;
  s.kind = "tableclearing";
  s.domain = "tableclearing";
  const RobotModel& model = defaultRobotModel();
  s.initial = model.homeConfiguration(0.5, 0.0, 0.0);
  World& w = s.world;
  w.pMin = Vec3(0.0, -0.9, 0.1);
  w.pMax = Vec3(1.9, 0.9, 1.1);
  w.obstacles.push_back(boxObstacle("step", Vec3(1.75, 0, 0.25), Vec3(0.5, 1.0, 0.5)));
  w.obstacles.push_back(boxObstacle("shelf", Vec3(1.825, 0, 0.76), Vec3(0.35, 1.0, 0.08)));
  w.obstacles.push_back(boxObstacle("back", Vec3(1.95, 0, 0.61), Vec3(0.1, 1.0, 0.22)));
  Drawer d;
  d.body = BoxShape{Vec3(0.2, 0.3, 0.09)};
  d.bodyClosed = Vec3(1.7, 0, 0.37);
  d.axis = -Vec3::UnitX();
  d.travelLo = 0.0;
  d.travelHi = 0.35;
  d.extension = 0.0;
  d.knobClosed = Vec3(1.44, 0, 0.37);
  w.drawer = d;
  std::uniform_real_distribution<double> ux(1.62, 1.8), uy(-0.35, 0.35);
  std::vector<Vec3> placed;
  for (int i = 0; i < count; ++i) {
    Vec3 p;
    int tries = 0;
    do {
      p = Vec3(ux(rng), uy(rng), 0.5);
      if (++tries > 1000) throw GenerationFailure("could not space the objects");
    } while (!spaced(placed, p, 0.12));
    placed.push_back(p);
    const std::string id = "o" + std::to_string(i + 1);
    w.movables.push_back(object(id, "red", "step", p));
    s.goal.push_back("in(" + id + ",drawer)");
  }
  s.goal.push_back("drawerClosed");
  return s;
}

bool reachable(const Scenario& s, const World& world, const Vec3& target,
               const std::vector<OrientationConstraint>& modes, const std::optional<BaseRegion>& region,
               const AttachmentState& attach = {}) {
  const RobotModel& model = defaultRobotModel();
  IKParams ik;
  ik.baseRegion = region;
  ik.restartCount = 16;
  ik.restartSeed = s.seed;
  for (const auto& m : modes) {
    try {
      solveConstrainedIK(target, m, model, world, attach, ik);
      return true;
    } catch (const NoSolution&) {
    } catch (const PreconditionRejected&) {
    }
  }
  return false;
}

const std::vector<OrientationConstraint>& graspModes() {
  static const std::vector<OrientationConstraint> modes{OrientationConstraint::topDown(),
                                                        OrientationConstraint::horizontal()};
  return modes;
}

Vec3 pickTarget(const MovableObject& m) {
  return m.geometry.position + Vec3(0, 0, m.halfHeight() + kGraspHeight);
}

BaseRegion nearSide(double tableHalfX) { return {-1e9, -tableHalfX - 0.26, -1e9, 1e9}; }
BaseRegion farSide(double tableHalfX) { return {tableHalfX + 0.26, 1e9, -1e9, 1e9}; }

}  // namespace

bool checkScenarioFeasible(const Scenario& s, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  const RobotModel model = loadRobotModel(s.robotModel);
  if (!configurationFeasible(model, s.initial, s.world)) return fail("initial configuration collides");
  if (s.kind == "pickplace") {
    for (const auto& m : s.world.movables)
      if (!reachable(s, s.world, pickTarget(m), graspModes(), nearSide(0.4)))
        return fail(m.id + " is not reachable from the robot's side");
  } else if (s.kind == "sorting") {
    for (const auto& m : s.world.movables)
      if (!reachable(s, s.world, pickTarget(m), graspModes(), nearSide(0.7)) &&
          !reachable(s, s.world, pickTarget(m), graspModes(), farSide(0.7)))
        return fail(m.id + " is not reachable from either side");
  } else if (s.kind == "tableclearing") {
    if (!s.world.drawer) return fail("no drawer");
    const World free = s.world.withoutDrawer();
    const std::vector<OrientationConstraint> side{OrientationConstraint::horizontal()};
    if (!reachable(s, s.world, s.world.drawer->knob(), side, std::nullopt)) return fail("knob not reachable");
    if (!reachable(s, free, s.world.drawer->knobAt(s.world.drawer->travelHi), side, std::nullopt))
      return fail("open knob position not reachable");
    for (const auto& m : s.world.movables)
      if (!reachable(s, s.world, pickTarget(m), graspModes(), std::nullopt)) return fail(m.id + " is not reachable");
  } else {
    return true;
  }
  for (const auto& r : s.world.regions)
    for (int i = 0; i < r.slots; ++i) {
      const Vec3 t = r.slotTop(i) + Vec3(0, 0, kObjectSize.z() + kPlaceClearance + kGraspHeight);
      if (!reachable(s, s.world, t, graspModes(), std::nullopt))
        return fail("slot " + std::to_string(i) + " of " + r.name + " is not reachable");
    }
  return true;
}

bool unreachableFromNearSide(const Scenario& s, const std::string& objectId) {
  const MovableObject* m = s.world.findMovable(objectId);
  if (!m) throw InvalidParameter("unknown object '" + objectId + "'");
  return !reachable(s, s.world, pickTarget(*m), graspModes(), nearSide(0.7));
}

Scenario generateScenario(const std::string& kind, std::uint64_t seed, const GenOptions& opts) {
  const auto kinds = scenarioKinds();
  if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end())
    throw InvalidParameter("unknown scenario kind '" + kind + "'");
  std::mt19937_64 rng(seed);
  std::string lastWhy;
  for (int attempt = 0; attempt < kGenerationAttempts; ++attempt) {
    Scenario s;
    if (kind == "pickplace") {
      s = pickPlaceScenario(rng, opts.objects < 0 ? 3 : opts.objects);
    } else if (kind == "sorting") {
      s = sortingScenario(rng, opts.objects < 0 ? 2 : opts.objects, opts.farSide);
    } else {
      s = tableClearingScenario(rng, opts.objects < 0 ? 1 : opts.objects);
    }
    s.seed = seed;
    if (!checkScenarioFeasible(s, &lastWhy)) continue;
    if (kind == "sorting" && opts.farSide) {
      bool anyFar = false;
      for (const auto& m : s.world.movables) anyFar = anyFar || unreachableFromNearSide(s, m.id);
      if (!anyFar) {
        lastWhy = "no object is out of reach from the near side";
        continue;
      }
    }
    return s;
  }
  throw GenerationFailure("no feasible " + kind + " instance for seed " + std::to_string(seed) + " (" + lastWhy + ")");
}

void BenchConfig::validate() const {
  if (runs < 1) throw InvalidParameter("runs must be >= 1");
  if (modes.empty()) throw InvalidParameter("at least one mode is required");
  params.graph.validate();
  params.ik.validate();
  params.opt.validate();
  if (params.timeoutSeconds <= 0) throw InvalidParameter("timeout must be positive");
}

Scenario scenarioForRun(const BenchConfig& config, std::uint64_t seed) {
  const auto kinds = scenarioKinds();
  if (std::find(kinds.begin(), kinds.end(), config.scenario) != kinds.end())
    return generateScenario(config.scenario, seed, config.gen);
  return loadScenario(config.scenario);
}

void writeDumps(const BenchConfig& config, Planner& planner, const PlanResult& result, std::uint64_t seed) {
  if (!(config.dumpGraph || config.dumpLibrary || config.dumpTraj)) return;
  namespace fs = std::filesystem;
  const fs::path dir = config.outDir.empty() ? fs::path(".") : fs::path(config.outDir);
  fs::create_directories(dir);
  const std::string stem = fs::path(config.scenario).stem().string() + "_" + std::to_string(seed) + "_" +
                           modeName(planner.request().mode);
  auto open = [&](const std::string& suffix) {
    std::ofstream f(dir / (stem + suffix));
    if (!f) throw std::runtime_error("cannot write " + (dir / (stem + suffix)).string());
    return f;
  };
  if (config.dumpGraph && !planner.graphs().empty()) {
    auto f = open("_graph.txt");
    for (const auto& [key, g] : planner.graphs()) {
      f << "# context " << key << '\n';
      g->dump(f);
    }
  }
  if (config.dumpLibrary && !planner.libraries().empty()) {
    auto f = open("_library.txt");
    for (const auto& [key, lib] : planner.libraries()) {
      f << "# context " << key << '\n';
      lib.dump(f);
    }
  }
  if (config.dumpTraj) {
    auto f = open("_traj.txt");
    dumpTrajectory(result.trajectory, f);
  }
}

std::vector<BenchRow> runBatch(const BenchConfig& config) {
  config.validate();
  std::vector<BenchRow> rows;
  for (int i = 0; i < config.runs; ++i) {
    const std::uint64_t seed = config.seedBase + static_cast<std::uint64_t>(i);
    std::optional<Scenario> sc;
    std::string genError;
    try {
      sc = scenarioForRun(config, seed);
    } catch (const GenerationFailure& e) {
      genError = e.what();
    }
    for (HeuristicMode mode : config.modes) {
      BenchRow row;
      row.seed = seed;
      row.mode = mode;
      if (!sc) {
        row.failure = genError;
        rows.push_back(row);
        continue;
      }
      PlanRequest req{*sc, mode, config.params};
      req.params.graph.rngSeed = seed;
      req.params.ik.restartSeed = seed;
      try {
        Planner planner(req);
        const PlanResult r = planner.plan();
        const PlanMetrics m = computeMetrics(r, *sc, true, config.params.opt.verifyResolution);
        row.success = m.success;
        row.planningTime = m.planningTime;
        row.pathLength = m.basePathLength;
        row.steps = m.stepCount;
        row.failure = r.failureReason;
        row.firstCandidate = r.firstCandidate;
        writeDumps(config, planner, r, seed);
      } catch (const Error& e) {
        row.success = false;
        row.failure = e.what();
      }
      rows.push_back(row);
    }
  }
  return rows;
}

BenchSummary summarize(const std::vector<BenchRow>& rows, HeuristicMode mode) {
  BenchSummary s;
  for (const auto& r : rows) {
    if (r.mode != mode) continue;
    ++s.runs;
    if (!r.success) continue;
    ++s.successes;
    s.meanTime += r.planningTime;
    s.meanPathLength += r.pathLength;
    s.meanSteps += r.steps;
  }
  if (s.successes > 0) {
    s.meanTime /= s.successes;
    s.meanPathLength /= s.successes;
    s.meanSteps /= s.successes;
  }
  if (s.runs > 0) s.successRate = 100.0 * s.successes / s.runs;
  return s;
}

namespace {

std::string csvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::string fixed(double v, int digits) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(digits) << v;
  return o.str();
}

}  // namespace

void writeCsv(const std::vector<BenchRow>& rows, std::ostream& out) {
  out << "seed,mode,success,planning_time,path_length,steps,failure\n";
  std::vector<HeuristicMode> modes;
  for (const auto& r : rows) {
    if (std::find(modes.begin(), modes.end(), r.mode) == modes.end()) modes.push_back(r.mode);
    out << r.seed << ',' << modeName(r.mode) << ',' << (r.success ? 1 : 0) << ',' << fixed(r.planningTime, 4) << ','
        << fixed(r.pathLength, 6) << ',' << r.steps << ',' << csvField(r.failure) << '\n';
  }
  for (HeuristicMode m : modes) {
    const BenchSummary s = summarize(rows, m);
    out << "aggregate," << modeName(m) << ',' << fixed(s.successRate, 2) << ',' << fixed(s.meanTime, 4) << ','
        << fixed(s.meanPathLength, 6) << ',' << fixed(s.meanSteps, 3) << ",runs=" << s.runs << '\n';
  }
}

}  // namespace rlgp
