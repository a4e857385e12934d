#include "rlgp/pipeline.hpp"

#include "rlgp/errors.hpp"

#include <chrono>
#include <cmath>

namespace rlgp {

const char* modeName(HeuristicMode m) { return m == HeuristicMode::Reachability ? "reachability" : "euclidean"; }

HeuristicMode parseMode(const std::string& s) {
  if (s == "reachability" || s == "rg") return HeuristicMode::Reachability;
  if (s == "euclidean" || s == "baseline") return HeuristicMode::Euclidean;
  throw InvalidParameter("unknown mode '" + s + "' (expected reachability or euclidean)");
}

Planner::Planner(PlanRequest request) : request_(std::move(request)), model_(loadRobotModel(request_.scenario.robotModel)) {
  request_.params.graph.validate();
  request_.params.ik.validate();
  request_.params.opt.validate();
  request_.scenario.world.validate();
  if (request_.scenario.initial.size() != model_.dims())
    throw ModelMismatch("initial configuration does not match the robot model");
}

long long Planner::contextKey(const GeometricState& g) const {
  if (!request_.scenario.world.drawer) return 0;
  if (g.holdingKnob) return -1;
  return std::llround(g.drawerExtension * 1000.0);
}

ReachabilityGraph& Planner::graphFor(const GeometricState& g) {
  const long long key = contextKey(g);
  auto it = graphs_.find(key);
  if (it != graphs_.end()) return *it->second;
  World w = g.materialize(request_.scenario.world);
  if (g.holdingKnob) w = w.withoutDrawer();
  ++constructions_;
  auto graph = std::make_unique<ReachabilityGraph>(
      constructRG(w, model_, request_.params.graph, request_.params.ik));
  return *graphs_.emplace(key, std::move(graph)).first->second;
}

SolutionLibrary& Planner::libraryFor(const GeometricState& g) { return libraries_[contextKey(g)]; }

ReachabilityGraph& Planner::initialGraph() { return graphFor(GeometricState::of(request_.scenario.world)); }
SolutionLibrary& Planner::initialLibrary() { return libraryFor(GeometricState::of(request_.scenario.world)); }

PlanResult Planner::plan() {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };
  const Scenario& sc = request_.scenario;
  const PlannerParams& params = request_.params;
  const bool rg = request_.mode == HeuristicMode::Reachability;

  PlanResult result;
  const Domain domain = groundDomain(sc.domain, sc.world);
  const SymbolicState s0 = initialState(sc.domain, sc.world);
  const AtomSet goal = parseGoal(sc.goal);
  const Configuration& q0 = sc.initial;
  const Vec3 startEe = forwardKinematics(model_, q0).ee;

  auto finish = [&](PlanResult& r) -> PlanResult {
    r.planningTime = elapsed();
    r.graphConstructions = constructions_;
    return r;
  };

  if (goalTest(s0, goal)) {
    result.success = true;
    return finish(result);
  }

  SwitchCostFn cost;
  if (rg) {
    cost = [this](const Vec3& a, const Vec3& b, const GeometricState& before) {
      return libraryFor(before).heuristicCost(graphFor(before), a, b);
    };
  } else {
    cost = [](const Vec3& a, const Vec3& b, const GeometricState&) { return (a - b).norm(); };
  }

  SymbolicSearch search(domain, sc.world, s0, goal, startEe, cost);
  const GeometricState g0 = GeometricState::of(sc.world);
  try {
    for (;;) {
      if (elapsed() > params.timeoutSeconds)
        throw Timeout("planning exceeded " + std::to_string(params.timeoutSeconds) + " s");
      SearchNode node;
      try {
        node = search.step();
      } catch (const EmptyFrontier&) {
        throw NoPlan("symbolic frontier exhausted after " + std::to_string(result.goalCandidates) + " candidates");
      }
      if (!search.isGoal(node)) continue;
      ++result.goalCandidates;
      std::vector<std::string> names;
      for (int a : node.actions) names.push_back(domain.operators[a].name);
      if (result.firstCandidate.empty()) result.firstCandidate = names;

      // State before each switch, for per-context graph lookups.
      std::vector<GeometricState> before{g0};
      for (const auto& sw : node.switches) before.push_back(applySwitch(sw, sc.world, before.back()));

      KeyframeSeedFn seed;
      if (rg) {
        seed = [&](std::size_t k, const Vec3& target, const Configuration& prev) -> std::optional<Configuration> {
          ReachabilityGraph& g = graphFor(before[k]);
          const int n = g.nearestNode(target);
          if (n < 0) return prev;
          const ValidatedNode& near = g.nodes()[n].data;
          Configuration q = near.q;
          q[0] += target.x() - near.x.x();
          q[1] += target.y() - near.x.y();
          return q;
        };
      }
      const SwitchResult sw = switchOptimization(node.switches, q0, sc.world, g0, {}, model_, params.ik, seed);
      if (!sw.ok) {
        ++result.switchFailures;
        continue;
      }
      if (elapsed() > params.timeoutSeconds)
        throw Timeout("planning exceeded " + std::to_string(params.timeoutSeconds) + " s");

      std::vector<std::vector<Configuration>> guidance(node.switches.size());
      bool guided = true;
      if (rg) {
        for (std::size_t k = 0; k < node.switches.size() && guided; ++k) {
          try {
            guidance[k] = libraryFor(before[k]).getWaypoints(graphFor(before[k]), node.switchPoints[k],
                                                             node.switchPoints[k + 1]);
            guidance[k] = anchorGuidance(guidance[k], sw.keyframes[k], sw.keyframes[k + 1]);
          } catch (const NoPath&) {
            guided = false;
          }
        }
      }
      if (!guided) {
        ++result.pathFailures;
        continue;
      }
      PathResult path = pathOptimization(sw.keyframes, guidance, sw.phases, model_, params.opt);
      if (!path.ok) {
        ++result.pathFailures;
        continue;
      }
      result.success = true;
      result.actions = names;
      result.trajectory = std::move(path.trajectory);
      result.basePathLength = basePathLength(result.trajectory);
      result.stepCount = static_cast<int>(names.size());
      result.heuristicCost = node.gCost;
      return finish(result);
    }
  } catch (const Timeout& e) {
    result.failureReason = e.what();
  } catch (const NoPlan& e) {
    result.failureReason = e.what();
  }
  return finish(result);
}

PlanResult plan(const PlanRequest& request) {
  Planner p(request);
  return p.plan();
}

PlanMetrics computeMetrics(const PlanResult& result, const Scenario& scenario, bool oracleRecheck, int resolution) {
  PlanMetrics m;
  m.planningTime = result.planningTime;
  m.stepCount = static_cast<int>(result.actions.size());
  m.basePathLength = basePathLength(result.trajectory);
  m.success = result.success;
  if (std::abs(m.basePathLength - result.basePathLength) > 1e-9)
    throw IntegrityViolation("stored base path length does not match the trajectory");
  if (m.stepCount != result.stepCount) throw IntegrityViolation("stored step count does not match the actions");
  if (oracleRecheck && result.success) {
    const RobotModel model = loadRobotModel(scenario.robotModel);
    if (!verifyTrajectory(result.trajectory, model, resolution))
      throw IntegrityViolation("trajectory fails independent collision verification");
    if (!result.trajectory.phases.empty() && !(result.trajectory.phases.front().configs.front() == scenario.initial))
      throw IntegrityViolation("trajectory does not start at the initial configuration");
    const Domain domain = groundDomain(scenario.domain, scenario.world);
    std::vector<int> idx;
    for (const auto& name : result.actions) {
      int found = -1;
      for (std::size_t i = 0; i < domain.operators.size(); ++i)
        if (domain.operators[i].name == name) found = static_cast<int>(i);
      if (found < 0) throw IntegrityViolation("unknown action '" + name + "'");
      idx.push_back(found);
    }
    if (!validatePlan(domain, initialState(scenario.domain, scenario.world), idx, parseGoal(scenario.goal)))
      throw IntegrityViolation("action sequence does not reach the goal");
    if (result.trajectory.phases.size() != result.actions.size())
      throw IntegrityViolation("one trajectory phase per action expected");
  }
  return m;
}

}  // namespace rlgp
