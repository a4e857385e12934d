#include "rlgp/bench.hpp"
#include "rlgp/errors.hpp"
#include "rlgp/pipeline.hpp"
#include "rlgp/reachability_graph.hpp"

#include <nlohmann/json.hpp>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace rlgp;

namespace {

PlannerParams plannerParams(int nodes, int knn, double timeout, std::uint64_t seed) {
  PlannerParams p;
  p.graph.nodeCount = nodes;
  p.graph.k = knn;
  p.graph.rngSeed = seed;
  p.ik.restartSeed = seed;
  p.timeoutSeconds = timeout;
  return p;
}

// One row per trajectory sample: phase, step, then the configuration.
Eigen::MatrixXd trajectoryRows(const Trajectory& t) {
  const std::size_t rows = t.rowCount();
  const std::size_t dims = rows ? t.phases.front().configs.front().size() : 0;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dims + 2));
  Eigen::Index r = 0;
  for (std::size_t p = 0; p < t.phases.size(); ++p)
    for (std::size_t s = 0; s < t.phases[p].configs.size(); ++s, ++r) {
      m(r, 0) = static_cast<double>(p);
      m(r, 1) = static_cast<double>(s);
      m.row(r).tail(static_cast<Eigen::Index>(dims)) = t.phases[p].configs[s].values().transpose();
    }
  return m;
}

template <typename T>
std::string dumped(const T& obj) {
  std::ostringstream out;
  obj.dump(out);
  return out.str();
}

}  // namespace

PYBIND11_MODULE(_rlgp, m) {
  m.doc() = "Reachability-guided task and motion planning";

  static py::exception<Error> error(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      error(e.what());
    }
  });

  py::class_<Scenario>(m, "Scenario")
      .def_static("from_json", [](const std::string& text) { return scenarioFromJson(nlohmann::json::parse(text)); })
      .def_static("load", &loadScenario, py::arg("path"))
      .def("to_json", [](const Scenario& s) { return scenarioToJson(s).dump(2); })
      .def("save", [](const Scenario& s, const std::string& path) { saveScenario(s, path); }, py::arg("path"))
      .def_readwrite("kind", &Scenario::kind)
      .def_readwrite("domain", &Scenario::domain)
      .def_readwrite("goal", &Scenario::goal)
      .def_readonly("seed", &Scenario::seed)
      .def_property_readonly("objects", [](const Scenario& s) {
        std::vector<std::string> ids;
        for (const auto& o : s.world.movables) ids.push_back(o.id);
        return ids;
      })
      .def_property_readonly("initial", [](const Scenario& s) { return Eigen::VectorXd(s.initial.values()); });

  py::class_<PlanResult>(m, "PlanResult")
      .def_readonly("success", &PlanResult::success)
      .def_readonly("actions", &PlanResult::actions)
      .def_readonly("planning_time", &PlanResult::planningTime)
      .def_readonly("base_path_length", &PlanResult::basePathLength)
      .def_readonly("step_count", &PlanResult::stepCount)
      .def_readonly("failure_reason", &PlanResult::failureReason)
      .def_readonly("first_candidate", &PlanResult::firstCandidate)
      .def_readonly("goal_candidates", &PlanResult::goalCandidates)
      .def_readonly("graph_constructions", &PlanResult::graphConstructions)
      .def_property_readonly("trajectory", [](const PlanResult& r) { return trajectoryRows(r.trajectory); })
      .def("trajectory_dump", [](const PlanResult& r) {
        std::ostringstream out;
        dumpTrajectory(r.trajectory, out);
        return out.str();
      });

  py::class_<ReachabilityGraph>(m, "ReachabilityGraph")
      .def_property_readonly("node_count", [](const ReachabilityGraph& g) { return g.nodes().size(); })
      .def_property_readonly("edge_count", [](const ReachabilityGraph& g) { return g.edges().size(); })
      .def("is_connected", &ReachabilityGraph::isConnected)
      .def("component_count", &ReachabilityGraph::componentCount)
      .def("node_position", [](const ReachabilityGraph& g, int i) { return Vec3(g.nodes().at(i).data.x); })
      .def("query_path",
           [](ReachabilityGraph& g, const Vec3& a, const Vec3& b) {
             const PathAnswer ans = g.queryPath(a, b);
             return py::make_tuple(ans.cost, ans.nodePath);
           },
           py::arg("start"), py::arg("goal"))
      .def("dump", [](const ReachabilityGraph& g) { return dumped(g); });

  m.def("generate_scenario",
        [](const std::string& kind, std::uint64_t seed, bool farSide, int objects) {
          return generateScenario(kind, seed, {farSide, objects});
        },
        py::arg("kind"), py::arg("seed") = 0, py::arg("far_side") = false, py::arg("objects") = -1);

  m.def("check_scenario_feasible",
        [](const Scenario& s) {
          std::string why;
          const bool ok = checkScenarioFeasible(s, &why);
          return py::make_tuple(ok, why);
        },
        py::arg("scenario"));

  m.def("unreachable_from_near_side", &unreachableFromNearSide, py::arg("scenario"), py::arg("object_id"));

  m.def("plan",
        [](const Scenario& s, const std::string& mode, std::uint64_t seed, int nodes, int knn, double timeout) {
          PlanRequest req{s, parseMode(mode), plannerParams(nodes, knn, timeout, seed)};
          py::gil_scoped_release release;
          return plan(req);
        },
        py::arg("scenario"), py::arg("mode") = "reachability", py::arg("seed") = 0, py::arg("nodes") = 200,
        py::arg("knn") = 6, py::arg("timeout") = 120.0);

  m.def("compute_metrics",
        [](const PlanResult& r, const Scenario& s, bool recheck) {
          const PlanMetrics pm = computeMetrics(r, s, recheck);
          py::dict d;
          d["success"] = pm.success;
          d["planning_time"] = pm.planningTime;
          d["base_path_length"] = pm.basePathLength;
          d["step_count"] = pm.stepCount;
          return d;
        },
        py::arg("result"), py::arg("scenario"), py::arg("recheck") = true);

  m.def("construct_graph",
        [](const Scenario& s, int nodes, int knn, std::uint64_t seed) {
          GraphParams p;
          p.nodeCount = nodes;
          p.k = knn;
          p.rngSeed = seed;
          IKParams ik;
          ik.restartSeed = seed;
          py::gil_scoped_release release;
          return std::make_unique<ReachabilityGraph>(constructRG(s.world, loadRobotModel(s.robotModel), p, ik));
        },
        py::arg("scenario"), py::arg("nodes") = 200, py::arg("knn") = 6, py::arg("seed") = 0);

  m.def("shortest_path",
        [](std::size_t n, const std::vector<std::tuple<int, int, double>>& edges, int src, int dst) {
          std::vector<WeightedEdge> es;
          for (const auto& [a, b, c] : edges) es.push_back({a, b, c});
          const auto [path, cost] = shortestPath(n, es, src, dst);
          return py::make_tuple(path, cost);
        },
        py::arg("node_count"), py::arg("edges"), py::arg("src"), py::arg("dst"));

  m.def("forward_kinematics",
        [](const Eigen::VectorXd& q) { return Vec3(forwardKinematics(defaultRobotModel(), Configuration(q)).ee); },
        py::arg("q"));

  m.def("run_batch",
        [](const std::string& scenario, int runs, std::uint64_t seed, const std::vector<std::string>& modes,
           bool farSide) {
          BenchConfig c;
          c.scenario = scenario;
          c.runs = runs;
          c.seedBase = seed;
          c.modes.clear();
          for (const auto& m : modes) c.modes.push_back(parseMode(m));
          c.gen.farSide = farSide;
          std::vector<BenchRow> rows;
          {
            py::gil_scoped_release release;
            rows = runBatch(c);
          }
          std::ostringstream out;
          writeCsv(rows, out);
          return out.str();
        },
        py::arg("scenario"), py::arg("runs") = 1, py::arg("seed") = 0,
        py::arg("modes") = std::vector<std::string>{"reachability"}, py::arg("far_side") = false);
}
