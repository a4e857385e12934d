#pragma once

#include "rlgp/ik.hpp"
#include "rlgp/reachability_graph.hpp"
#include "rlgp/scenario.hpp"
#include "rlgp/solution_library.hpp"
#include "rlgp/symbolic.hpp"
#include "rlgp/trajectory.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace rlgp {

enum class HeuristicMode { Reachability, Euclidean };

const char* modeName(HeuristicMode m);
/// Accepts "reachability" / "rg" and "euclidean" / "baseline". Throws InvalidParameter.
HeuristicMode parseMode(const std::string& s);

struct PlannerParams {
  GraphParams graph;
  IKParams ik;
  OptParams opt;
  double timeoutSeconds = 120.0;
};

struct PlanRequest {
  Scenario scenario;
  HeuristicMode mode = HeuristicMode::Reachability;
  PlannerParams params;
};

struct PlanResult {
  bool success = false;
  std::vector<std::string> actions;
  Trajectory trajectory;
  double planningTime = 0.0;  // seconds
  double basePathLength = 0.0;
  int stepCount = 0;
  std::string failureReason;

  std::vector<std::string> firstCandidate;  // first goal sequence the search proposed
  double heuristicCost = 0.0;               // gCost of the returned sequence
  int goalCandidates = 0;
  int switchFailures = 0;
  int pathFailures = 0;
  int graphConstructions = 0;
};

/// Runs the full reachability-guided pipeline on one scenario. Graphs and
/// solution libraries are built lazily, one per collision context (drawer
/// extension, or no drawer while the knob is held), and kept for dumping.
class Planner {
 public:
  explicit Planner(PlanRequest request);

  PlanResult plan();

  const PlanRequest& request() const { return request_; }
  const RobotModel& model() const { return model_; }
  int graphConstructions() const { return constructions_; }

  /// Graph and library of the initial collision context, built on demand in reachability mode.
  ReachabilityGraph& initialGraph();
  SolutionLibrary& initialLibrary();
  /// All contexts built so far, keyed by drawer extension in mm (-1: drawer ignored).
  const std::map<long long, std::unique_ptr<ReachabilityGraph>>& graphs() const { return graphs_; }
  const std::map<long long, SolutionLibrary>& libraries() const { return libraries_; }

 private:
  long long contextKey(const GeometricState& g) const;
  ReachabilityGraph& graphFor(const GeometricState& g);
  SolutionLibrary& libraryFor(const GeometricState& g);

  PlanRequest request_;
  RobotModel model_;
  std::map<long long, std::unique_ptr<ReachabilityGraph>> graphs_;
  std::map<long long, SolutionLibrary> libraries_;
  int constructions_ = 0;
};

/// Convenience wrapper: one Planner, one call.
PlanResult plan(const PlanRequest& request);

struct PlanMetrics {
  bool success = false;
  double planningTime = 0.0;
  double basePathLength = 0.0;
  int stepCount = 0;
};

/// Recomputes the metrics from the trajectory and, when `oracleRecheck` is set,
/// re-verifies both the action sequence and the trajectory. Throws
/// IntegrityViolation when the stored fields disagree with the recomputation.
PlanMetrics computeMetrics(const PlanResult& result, const Scenario& scenario, bool oracleRecheck,
                           int resolution = 10);

}  // namespace rlgp
