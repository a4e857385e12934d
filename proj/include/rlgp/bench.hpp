#pragma once

#include "rlgp/pipeline.hpp"
#include "rlgp/scenario.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rlgp {

/// Scenario kinds accepted by generateScenario.
std::vector<std::string> scenarioKinds();

struct GenOptions {
  bool farSide = false;  // sorting: at least one object only reachable from the far side
  int objects = -1;      // -1: kind default (pickplace 3, sorting 2, tableclearing 1)
};

/// Deterministic random instance of a benchmark kind. Every emitted instance
/// passes checkScenarioFeasible. Throws GenerationFailure when rejection
/// sampling runs out of attempts and InvalidParameter for unknown kinds.
Scenario generateScenario(const std::string& kind, std::uint64_t seed, const GenOptions& opts = {});

/// The generator's own feasibility oracle: every pick and place target has a
/// constrained IK solution from the side of the table the kind allows. On
/// failure `why` receives a short reason.
bool checkScenarioFeasible(const Scenario& s, std::string* why = nullptr);

/// Sorting only: true iff no constrained IK solution reaches the object with
/// the base kept on the robot's starting side of the table.
bool unreachableFromNearSide(const Scenario& s, const std::string& objectId);

struct BenchConfig {
  std::string scenario = "pickplace";  // a kind, or a path to a scenario file
  int runs = 1;
  std::uint64_t seedBase = 0;
  std::vector<HeuristicMode> modes{HeuristicMode::Reachability};
  PlannerParams params;
  GenOptions gen;
  std::string outDir;  // dumps go here when any dump flag is set
  bool dumpGraph = false;
  bool dumpLibrary = false;
  bool dumpTraj = false;

  void validate() const;
};

struct BenchRow {
  std::uint64_t seed = 0;
  HeuristicMode mode = HeuristicMode::Reachability;
  bool success = false;
  double planningTime = 0.0;
  double pathLength = 0.0;
  int steps = 0;
  std::string failure;
  std::vector<std::string> firstCandidate;
};

/// Runs every (seed, mode) pair in seed order. Per-run failures are recorded
/// in the row and never abort the batch.
std::vector<BenchRow> runBatch(const BenchConfig& config);

/// Scenario for one run: generated from the kind, or loaded when `scenario` is a file.
Scenario scenarioForRun(const BenchConfig& config, std::uint64_t seed);

/// Writes dumps for a finished planner run into config.outDir.
void writeDumps(const BenchConfig& config, Planner& planner, const PlanResult& result, std::uint64_t seed);

/// CSV: seed,mode,success,planning_time,path_length,steps,failure plus one
/// aggregate row per mode (success percentage, means over successful runs).
void writeCsv(const std::vector<BenchRow>& rows, std::ostream& out);

struct BenchSummary {
  int runs = 0;
  int successes = 0;
  double successRate = 0.0;  // percent
  double meanTime = 0.0;
  double meanPathLength = 0.0;
  double meanSteps = 0.0;
};

BenchSummary summarize(const std::vector<BenchRow>& rows, HeuristicMode mode);

}  // namespace rlgp
