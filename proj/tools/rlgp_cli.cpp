// rlgp: scenario generation, planning, batch benchmarks and dumps.

#include "rlgp/bench.hpp"
#include "rlgp/errors.hpp"
#include "rlgp/pipeline.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace rlgp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitGeneration = 3;

struct Options {
  std::string scenario = "pickplace";
  std::vector<std::string> modes{"reachability"};
  std::uint64_t seed = 0;
  int runs = 1;
  int nodes = GraphParams{}.nodeCount;
  int knn = GraphParams{}.k;
  double timeout = PlannerParams{}.timeoutSeconds;
  std::string out;
  bool dumpGraph = false;
  bool dumpLibrary = false;
  bool dumpTraj = false;
  bool farSide = false;
  int objects = -1;
  std::string dumpKind;
};

std::string outputDir(const Options& o) {
  if (const char* env = std::getenv("RLGP_OUT_DIR"); env && *env) return env;
  return o.out.empty() ? "." : o.out;
}

BenchConfig benchConfig(const Options& o) {
  BenchConfig c;
  c.scenario = o.scenario;
  c.runs = o.runs;
  c.seedBase = o.seed;
  c.modes.clear();
  for (const auto& m : o.modes) {
    if (m == "both") {
      c.modes = {HeuristicMode::Reachability, HeuristicMode::Euclidean};
      break;
    }
    c.modes.push_back(parseMode(m));
  }
  c.params.graph.nodeCount = o.nodes;
  c.params.graph.k = o.knn;
  c.params.timeoutSeconds = o.timeout;
  c.gen = {o.farSide, o.objects};
  c.outDir = outputDir(o);
  c.dumpGraph = o.dumpGraph;
  c.dumpLibrary = o.dumpLibrary;
  c.dumpTraj = o.dumpTraj;
  c.validate();
  return c;
}

int runGen(const Options& o) {
  const Scenario s = generateScenario(o.scenario, o.seed, {o.farSide, o.objects});
  const std::string text = scenarioToJson(s).dump(2);
  if (o.out.empty() && !std::getenv("RLGP_OUT_DIR")) {
    std::cout << text << '\n';
    return kExitOk;
  }
  const std::filesystem::path dir = outputDir(o);
  std::filesystem::create_directories(dir);
  const auto path = dir / (s.kind + "_" + std::to_string(o.seed) + ".json");
  saveScenario(s, path.string());
  std::cout << path.string() << '\n';
  return kExitOk;
}

void printResult(const Scenario& s, HeuristicMode mode, const PlanResult& r) {
  const PlanMetrics m = computeMetrics(r, s, true);
  std::cout << "mode: " << modeName(mode) << '\n'
            << "success: " << (m.success ? "yes" : "no") << '\n'
            << "planning_time: " << m.planningTime << '\n'
            << "path_length: " << m.basePathLength << '\n'
            << "steps: " << m.stepCount << '\n'
            << "goal_candidates: " << r.goalCandidates << '\n'
            << "graph_constructions: " << r.graphConstructions << '\n';
  if (!r.failureReason.empty()) std::cout << "failure: " << r.failureReason << '\n';
  std::cout << "actions:";
  for (const auto& a : r.actions) std::cout << ' ' << a;
  std::cout << '\n';
}

int runPlan(const Options& o) {
  BenchConfig c = benchConfig(o);
  const Scenario s = scenarioForRun(c, o.seed);
  for (HeuristicMode mode : c.modes) {
    PlanRequest req{s, mode, c.params};
    req.params.graph.rngSeed = o.seed;
    req.params.ik.restartSeed = o.seed;
    Planner planner(req);
    const PlanResult r = planner.plan();
    printResult(s, mode, r);
    writeDumps(c, planner, r, o.seed);
  }
  return kExitOk;
}

int runBench(const Options& o) {
  const BenchConfig c = benchConfig(o);
  const auto rows = runBatch(c);
  const std::filesystem::path dir = c.outDir;
  std::filesystem::create_directories(dir);
  const std::string stem = std::filesystem::path(c.scenario).stem().string();
  const auto csvPath = dir / ("bench_" + stem + ".csv");
  std::ofstream csv(csvPath);
  if (!csv) throw std::runtime_error("cannot write " + csvPath.string());
  writeCsv(rows, csv);
  for (HeuristicMode m : c.modes) {
    const BenchSummary s = summarize(rows, m);
    std::printf("%-12s runs %d  success %.1f%%  time %.3f s  path %.3f m  steps %.2f\n", modeName(m), s.runs,
                s.successRate, s.meanTime, s.meanPathLength, s.meanSteps);
  }
  std::cout << csvPath.string() << '\n';
  return kExitOk;
}

int runDump(const Options& o) {
  BenchConfig c = benchConfig(o);
  if (o.dumpKind != "graph" && o.dumpKind != "library" && o.dumpKind != "traj")
    throw InvalidParameter("dump kind must be graph, library or traj");
  c.modes = {HeuristicMode::Reachability};
  c.dumpGraph = o.dumpKind == "graph";
  c.dumpLibrary = o.dumpKind == "library";
  c.dumpTraj = o.dumpKind == "traj";
  const Scenario s = scenarioForRun(c, o.seed);
  PlanRequest req{s, HeuristicMode::Reachability, c.params};
  req.params.graph.rngSeed = o.seed;
  req.params.ik.restartSeed = o.seed;
  Planner planner(req);
  const PlanResult r = planner.plan();
  writeDumps(c, planner, r, o.seed);
  std::cout << "success: " << (r.success ? "yes" : "no") << '\n';
  return kExitOk;
}

void addCommon(CLI::App* app, Options& o) {
  app->add_option("--scenario", o.scenario, "Scenario kind (pickplace, sorting, tableclearing) or scenario file");
  app->add_option("--seed", o.seed, "Seed (first seed for batches)");
  app->add_flag("--far-side", o.farSide, "Sorting: force an object out of reach from the near side");
  app->add_option("--objects", o.objects, "Object count (default per kind)");
  app->add_option("--out", o.out, "Output directory (RLGP_OUT_DIR overrides)");
}

void addPlanning(CLI::App* app, Options& o) {
  app->add_option("--mode", o.modes, "reachability | euclidean | both")->delimiter(',');
  app->add_option("--nodes", o.nodes, "Graph node count");
  app->add_option("--knn", o.knn, "Graph neighbours per node");
  app->add_option("--timeout", o.timeout, "Per-instance budget in seconds");
  app->add_flag("--dump-graph", o.dumpGraph, "Write graph dumps");
  app->add_flag("--dump-library", o.dumpLibrary, "Write solution library dumps");
  app->add_flag("--dump-traj", o.dumpTraj, "Write trajectory dumps");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reachability-guided task and motion planning"};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("gen", "Generate a scenario file");
  addCommon(gen, o);

  auto* planCmd = app.add_subcommand("plan", "Plan one scenario");
  addCommon(planCmd, o);
  addPlanning(planCmd, o);

  auto* bench = app.add_subcommand("bench", "Run a seeded batch and write a CSV table");
  addCommon(bench, o);
  addPlanning(bench, o);
  bench->add_option("--runs", o.runs, "Number of seeds");

  auto* dump = app.add_subcommand("dump", "Plan once and write one dump kind");
  dump->add_option("kind", o.dumpKind, "graph | library | traj")->required();
  addCommon(dump, o);
  dump->add_option("--nodes", o.nodes, "Graph node count");
  dump->add_option("--knn", o.knn, "Graph neighbours per node");
  dump->add_option("--timeout", o.timeout, "Per-instance budget in seconds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*gen) return runGen(o);
    if (*planCmd) return runPlan(o);
    if (*bench) return runBench(o);
    return runDump(o);
  } catch (const GenerationFailure& e) {
    std::cerr << e.what() << '\n';
    return kExitGeneration;
  } catch (const InvalidParameter& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  } catch (const FormatError& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  } catch (const ModelMismatch& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
