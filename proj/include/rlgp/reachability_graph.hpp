#pragma once

#include "rlgp/configuration.hpp"
#include "rlgp/ik.hpp"
#include "rlgp/robot_model.hpp"
#include "rlgp/world.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <unordered_map>
#include <utility>
#include <vector>

namespace rlgp {

struct GraphParams {
  int nodeCount = 200;
  int k = 6;
  double wx = 1.0;
  double wq = 0.5;
  double wc = 0.1;
  int interpolationSteps = 10;  // edge collision samples
  int enhanceMaxRounds = 5;
  int enhanceSamplesPerRound = 6;
  Vec3 enhanceCovInit = Vec3(0.04, 0.04, 0.01);
  double enhanceCovDecay = 0.5;
  std::uint64_t rngSeed = 0;
  int queryIterationBudget = 2000;

  void validate() const;

  /// Per-axis standard deviation of enhancement samples in round r.
  Vec3 enhanceStddev(int round) const;
};

enum class EdgeStatus { Unchecked, Verified, Removed };

const char* statusName(EdgeStatus s);

struct GraphEdge {
  int a = -1;
  int b = -1;
  double cost = 0.0;
  EdgeStatus status = EdgeStatus::Unchecked;
  bool enhanced = false;  // created by enhancement or repair
};

struct GraphNode {
  ValidatedNode data;
  bool enhanced = false;  // added or replaced by enhancement
  bool query = false;     // inserted for a path query endpoint
  bool retired = false;   // isolated for good; ignored by search and connectivity
};

/// A graph path: one configuration per node; consecutive pairs are verified edges.
struct PathAnswer {
  std::vector<Configuration> configPath;
  std::vector<int> nodePath;
  double cost = 0.0;
};

struct WeightedEdge {
  int a = -1;
  int b = -1;
  double cost = 0.0;
};

/// Dijkstra on an undirected weighted graph. Ties between equal-cost
/// predecessors go to the smaller node index. Throws NoPath.
std::pair<std::vector<int>, double> shortestPath(std::size_t nodeCount, const std::vector<WeightedEdge>& edges,
                                                 int src, int dst);

/// Edge cost: wx*|x1-x2| + wq*|q1-q2| + wc*(c1+c2).
double edgeCost(const ValidatedNode& n1, const ValidatedNode& n2, const GraphParams& params);

/// Lazy reachability roadmap over validated end-effector samples.
///
/// Nodes are task-space points with a whole-body IK solution. Edges start
/// unchecked and are collision-checked only when a shortest path uses them;
/// colliding edges are removed for good and nodes that lose every edge are
/// repaired by local Gaussian enhancement. After every public mutating call the
/// non-retired nodes form one connected component over non-removed edges.
///
/// Single-writer: one query at a time per instance.
class ReachabilityGraph {
 public:
  struct Counters {
    int constructCalls = 0;
    int pathQueries = 0;
    int edgeChecks = 0;
    int edgesRemoved = 0;
    int nodesEnhanced = 0;
    int nodesRepaired = 0;
  };

  ReachabilityGraph(World world, RobotModel model, GraphParams params, IKParams ik = {});

  /// Samples nodeCount validated nodes uniformly in the workspace and links each
  /// to its k nearest neighbours (Cartesian) without collision checks.
  static ReachabilityGraph construct(const World& world, const RobotModel& model, const GraphParams& params,
                                     const IKParams& ik = {});

  /// Inserts a validated node for x and connects it with collision-checked edges.
  int connectQueryPoint(const Vec3& x);

  /// Gaussian enhancement around `center`. When `anchor` is a node index the
  /// rounds stop as soon as that node is connected to the graph.
  std::vector<int> enhanceAround(const Vec3& center, int anchor = -1);

  /// One Gaussian enhancement sample around `center` for round r (consumes the graph RNG).
  Vec3 drawEnhancementSample(const Vec3& center, int round);

  /// Shortest verified path between two task-space points.
  PathAnswer queryPath(const Vec3& xStart, const Vec3& xGoal);

  /// Dijkstra over non-removed edges; ties go to the smaller predecessor index.
  std::pair<std::vector<int>, double> dijkstra(int src, int dst) const;

  /// Adds a node/edge directly. Used by tests and tools that build graphs by hand.
  int addNode(const ValidatedNode& node, bool enhanced = false);
  int addEdge(int a, int b, EdgeStatus status = EdgeStatus::Unchecked);

  /// Links separate components with their closest unchecked pairs; retires
  /// components that cannot be linked.
  void ensureConnected();
  bool isConnected() const;
  std::size_t componentCount() const;

  const std::vector<GraphNode>& nodes() const { return nodes_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  int edgeBetween(int a, int b) const;
  std::vector<int> neighbours(int node) const;
  int degree(int node) const;
  int nearestNode(const Vec3& x, int exclude = -1) const;

  const World& world() const { return world_; }
  const RobotModel& model() const { return model_; }
  const GraphParams& params() const { return params_; }
  const IKParams& ikParams() const { return ik_; }
  const Counters& counters() const { return counters_; }
  /// Incremented whenever nodes are added or replaced.
  std::uint64_t generation() const { return generation_; }

  /// Line-oriented text dump: `node` and `edge` records.
  void dump(std::ostream& out) const;

 private:
  ValidatedNode validate(const Vec3& x, int nearTo);
  bool checkEdge(int edge);
  void removeEdge(int edge, int keepA, int keepB);
  bool repairNode(int node);
  std::vector<int> kNearest(const Vec3& x, int k, int exclude) const;
  std::optional<ValidatedNode> sampleNear(const Vec3& center, int round);
  std::uint64_t nextSeed() { return rng_(); }
  static std::uint64_t pairKey(int a, int b);

  World world_;
  RobotModel model_;
  GraphParams params_;
  IKParams ik_;
  std::vector<GraphNode> nodes_;
  std::vector<GraphEdge> edges_;
  std::vector<std::vector<int>> adjacency_;
  std::unordered_map<std::uint64_t, int> pairIndex_;
  std::unordered_map<std::uint64_t, int> queryNodes_;
  std::mt19937_64 rng_;
  Counters counters_;
  std::uint64_t generation_ = 0;
};

/// Free-function form of ReachabilityGraph::construct.
ReachabilityGraph constructRG(const World& world, const RobotModel& model, const GraphParams& params,
                              const IKParams& ik = {});

}  // namespace rlgp
