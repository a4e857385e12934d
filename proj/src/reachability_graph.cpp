#include "rlgp/reachability_graph.hpp"

#include "rlgp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>

namespace rlgp {

void GraphParams::validate() const {
  if (nodeCount < 2) throw InvalidParameter("nodeCount must be >= 2");
  if (k < 1) throw InvalidParameter("k must be >= 1");
  if (wx < 0 || wq < 0 || wc < 0 || (wx == 0 && wq == 0 && wc == 0))
    throw InvalidParameter("edge weights must be non-negative and not all zero");
  if (interpolationSteps < 1) throw InvalidParameter("L must be >= 1");
  if (enhanceMaxRounds < 0 || enhanceSamplesPerRound < 1) throw InvalidParameter("bad enhancement schedule");
  if (!(enhanceCovDecay > 0.0 && enhanceCovDecay < 1.0)) throw InvalidParameter("covariance decay must be in (0, 1)");
  if ((enhanceCovInit.array() <= 0.0).any()) throw InvalidParameter("enhancement covariance must be positive");
}

Vec3 GraphParams::enhanceStddev(int round) const {
  return (enhanceCovInit * std::pow(enhanceCovDecay, round)).cwiseSqrt();
}

const char* statusName(EdgeStatus s) {
  switch (s) {
    case EdgeStatus::Unchecked: return "unchecked";
    case EdgeStatus::Verified: return "verified";
    case EdgeStatus::Removed: return "removed";
  }
  return "?";
}

double edgeCost(const ValidatedNode& n1, const ValidatedNode& n2, const GraphParams& params) {
  return params.wx * (n1.x - n2.x).norm() + params.wq * configurationDistance(n1.q, n2.q) +
         params.wc * (n1.c + n2.c);
}

ReachabilityGraph::ReachabilityGraph(World world, RobotModel model, GraphParams params, IKParams ik)
    : world_(std::move(world)), model_(std::move(model)), params_(params), ik_(ik), rng_(params.rngSeed) {
  params_.validate();
  ik_.validate();
  world_.validate();
}

ReachabilityGraph ReachabilityGraph::construct(const World& world, const RobotModel& model, const GraphParams& params,
                                               const IKParams& ik) {
  ReachabilityGraph g(world.staticView(), model, params, ik);
  g.counters_.constructCalls = 1;
  const World& w = g.world_;
  std::uniform_real_distribution<double> ux(w.pMin.x(), w.pMax.x()), uy(w.pMin.y(), w.pMax.y()),
      uz(w.pMin.z(), w.pMax.z());
  const long budget = 100L * params.nodeCount;
  long attempts = 0;
  while (static_cast<int>(g.nodes_.size()) < params.nodeCount) {
    if (attempts++ >= budget)
      throw WorkspaceInfeasible("only " + std::to_string(g.nodes_.size()) + " of " +
                                std::to_string(params.nodeCount) + " nodes validated within the sampling budget");
    const double x = ux(g.rng_), y = uy(g.rng_), z = uz(g.rng_);
    const Vec3 p(x, y, z);
    if (pointClearance(p, w) > 0.0) continue;
    try {
      g.addNode(g.validate(p, g.nearestNode(p)));
    } catch (const NoSolution&) {
    } catch (const PreconditionRejected&) {
    }
  }
  const int n = static_cast<int>(g.nodes_.size());
  for (int i = 0; i < n; ++i)
    for (int j : g.kNearest(g.nodes_[i].data.x, params.k, i)) g.addEdge(i, j);
  g.ensureConnected();
  return g;
}

ReachabilityGraph constructRG(const World& world, const RobotModel& model, const GraphParams& params,
                              const IKParams& ik) {
  return ReachabilityGraph::construct(world, model, params, ik);
}

std::uint64_t ReachabilityGraph::pairKey(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

int ReachabilityGraph::addNode(const ValidatedNode& node, bool enhanced) {
  if (node.q.size() != model_.dims()) throw ModelMismatch("node configuration does not match the model");
  nodes_.push_back({node, enhanced, false, false});
  adjacency_.emplace_back();
  ++generation_;
  if (enhanced) ++counters_.nodesEnhanced;
  return static_cast<int>(nodes_.size()) - 1;
}

int ReachabilityGraph::addEdge(int a, int b, EdgeStatus status) {
  if (a == b || a < 0 || b < 0 || a >= static_cast<int>(nodes_.size()) || b >= static_cast<int>(nodes_.size()))
    return -1;
  const auto key = pairKey(a, b);
  if (auto it = pairIndex_.find(key); it != pairIndex_.end()) return it->second;
  GraphEdge e;
  e.a = std::min(a, b);
  e.b = std::max(a, b);
  e.cost = edgeCost(nodes_[e.a].data, nodes_[e.b].data, params_);
  e.status = status;
  edges_.push_back(e);
  const int id = static_cast<int>(edges_.size()) - 1;
  pairIndex_[key] = id;
  adjacency_[e.a].push_back(id);
  adjacency_[e.b].push_back(id);
  if (status == EdgeStatus::Removed) ++counters_.edgesRemoved;
  return id;
}

int ReachabilityGraph::edgeBetween(int a, int b) const {
  auto it = pairIndex_.find(pairKey(a, b));
  return it == pairIndex_.end() ? -1 : it->second;
}

std::vector<int> ReachabilityGraph::neighbours(int node) const {
  std::vector<int> out;
  for (int e : adjacency_[node]) {
    const auto& edge = edges_[e];
    if (edge.status == EdgeStatus::Removed) continue;
    out.push_back(edge.a == node ? edge.b : edge.a);
  }
  return out;
}

int ReachabilityGraph::degree(int node) const {
  int d = 0;
  for (int e : adjacency_[node])
    if (edges_[e].status != EdgeStatus::Removed) ++d;
  return d;
}

std::vector<int> ReachabilityGraph::kNearest(const Vec3& x, int k, int exclude) const {
  std::vector<std::pair<double, int>> cand;
  cand.reserve(nodes_.size());
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
    if (i == exclude || nodes_[i].retired) continue;
    cand.emplace_back((nodes_[i].data.x - x).squaredNorm(), i);
  }
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), cand.size());
  std::partial_sort(cand.begin(), cand.begin() + static_cast<long>(take), cand.end());
  std::vector<int> out;
  for (std::size_t i = 0; i < take; ++i) out.push_back(cand[i].second);
  return out;
}

int ReachabilityGraph::nearestNode(const Vec3& x, int exclude) const {
  const auto k = kNearest(x, 1, exclude);
  return k.empty() ? -1 : k.front();
}

ValidatedNode ReachabilityGraph::validate(const Vec3& x, int nearTo) {
  IKParams p = ik_;
  p.restartSeed = nextSeed();
  std::optional<Configuration> seed;
  if (nearTo >= 0) {
    const ValidatedNode& near = nodes_[nearTo].data;
    Configuration q = near.q;
    q[0] += x.x() - near.x.x();
    q[1] += x.y() - near.x.y();
    seed = q;
  }
  return validateNode(x, model_, world_, p, seed);
}

Vec3 ReachabilityGraph::drawEnhancementSample(const Vec3& center, int round) {
  std::normal_distribution<double> n(0.0, 1.0);
  const Vec3 sd = params_.enhanceStddev(round);
  const double a = n(rng_), b = n(rng_), c = n(rng_);
  return center + Vec3(a * sd.x(), b * sd.y(), c * sd.z());
}

std::optional<ValidatedNode> ReachabilityGraph::sampleNear(const Vec3& center, int round) {
  const Vec3 x = drawEnhancementSample(center, round);
  if (!world_.insideWorkspace(x) || pointClearance(x, world_) > 0.0) return std::nullopt;
  try {
    return validate(x, nearestNode(x));
  } catch (const NoSolution&) {
  } catch (const PreconditionRejected&) {
  }
  return std::nullopt;
}

bool ReachabilityGraph::checkEdge(int edge) {
  GraphEdge& e = edges_[edge];
  if (e.status != EdgeStatus::Unchecked) return e.status == EdgeStatus::Verified;
  ++counters_.edgeChecks;
  const bool free = edgeCollisionFree(model_, nodes_[e.a].data.q, nodes_[e.b].data.q, world_, {},
                                      params_.interpolationSteps);
  if (free) e.status = EdgeStatus::Verified;
  return free;
}

std::vector<int> ReachabilityGraph::enhanceAround(const Vec3& center, int anchor) {
  std::vector<int> added;
  for (int round = 0; round < params_.enhanceMaxRounds; ++round) {
    for (int s = 0; s < params_.enhanceSamplesPerRound; ++s) {
      const auto cand = sampleNear(center, round);
      if (!cand) continue;
      std::vector<int> near = kNearest(cand->x, params_.k, -1);
      if (anchor >= 0 && std::find(near.begin(), near.end(), anchor) == near.end()) near.push_back(anchor);
      std::vector<int> verified;
      bool reachesGraph = false;
      for (int n : near) {
        ++counters_.edgeChecks;
        if (edgeCollisionFree(model_, cand->q, nodes_[n].data.q, world_, {}, params_.interpolationSteps)) {
          verified.push_back(n);
          if (n != anchor && degree(n) > 0) reachesGraph = true;
        }
      }
      if (!reachesGraph) continue;
      const int id = addNode(*cand, true);
      for (int n : verified) {
        const int e = addEdge(id, n, EdgeStatus::Verified);
        edges_[e].enhanced = true;
      }
      added.push_back(id);
      if (anchor >= 0 && degree(anchor) > 0) return added;
    }
    if (anchor < 0 && !added.empty()) return added;
  }
  return added;
}

bool ReachabilityGraph::repairNode(int node) {
  const Vec3 center = nodes_[node].data.x;
  for (int round = 0; round < params_.enhanceMaxRounds; ++round) {
    std::optional<ValidatedNode> best;
    std::vector<int> bestEdges;
    for (int s = 0; s < params_.enhanceSamplesPerRound; ++s) {
      const auto cand = sampleNear(center, round);
      if (!cand) continue;
      std::vector<int> verified;
      for (int n : kNearest(cand->x, params_.k, node)) {
        if (degree(n) == 0) continue;
        ++counters_.edgeChecks;
        if (edgeCollisionFree(model_, cand->q, nodes_[n].data.q, world_, {}, params_.interpolationSteps))
          verified.push_back(n);
      }
      if (verified.empty()) continue;
      if (!best || cand->c < best->c) {
        best = cand;
        bestEdges = verified;
      }
    }
    if (best) {
      // Replace in place so indices held elsewhere stay valid.
      nodes_[node].data = *best;
      nodes_[node].enhanced = true;
      ++generation_;
      ++counters_.nodesRepaired;
      for (int n : bestEdges) {
        pairIndex_.erase(pairKey(node, n));
        const int e = addEdge(node, n, EdgeStatus::Verified);
        edges_[e].enhanced = true;
      }
      return true;
    }
  }
  return false;
}

void ReachabilityGraph::removeEdge(int edge, int keepA, int keepB) {
  GraphEdge& e = edges_[edge];
  if (e.status == EdgeStatus::Removed) return;
  e.status = EdgeStatus::Removed;
  ++counters_.edgesRemoved;
  for (int n : {e.a, e.b}) {
    if (nodes_[n].retired || degree(n) > 0) continue;
    bool ok = false;
    if (nodes_[n].query || n == keepA || n == keepB) {
      enhanceAround(nodes_[n].data.x, n);
      ok = degree(n) > 0;
    } else {
      ok = repairNode(n);
    }
    if (!ok) nodes_[n].retired = true;
  }
  ensureConnected();
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

std::size_t ReachabilityGraph::componentCount() const {
  UnionFind uf(nodes_.size());
  for (const auto& e : edges_)
    if (e.status != EdgeStatus::Removed && !nodes_[e.a].retired && !nodes_[e.b].retired) uf.unite(e.a, e.b);
  std::size_t count = 0;
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i)
    if (!nodes_[i].retired && uf.find(i) == i) ++count;
  return count;
}

bool ReachabilityGraph::isConnected() const { return componentCount() <= 1; }

void ReachabilityGraph::ensureConnected() {
  for (;;) {
    UnionFind uf(nodes_.size());
    for (const auto& e : edges_)
      if (e.status != EdgeStatus::Removed && !nodes_[e.a].retired && !nodes_[e.b].retired) uf.unite(e.a, e.b);
    std::vector<int> size(nodes_.size(), 0);
    for (int i = 0; i < static_cast<int>(nodes_.size()); ++i)
      if (!nodes_[i].retired) ++size[uf.find(i)];
    int main = -1, roots = 0;
    for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
      if (nodes_[i].retired || uf.find(i) != i) continue;
      ++roots;
      if (main < 0 || size[i] > size[main]) main = i;
    }
    if (roots <= 1) return;
    // Link the smallest-index non-main component to the rest via its closest untried pair.
    int comp = -1;
    for (int i = 0; i < static_cast<int>(nodes_.size()); ++i)
      if (!nodes_[i].retired && uf.find(i) != main) {
        comp = uf.find(i);
        break;
      }
    double best = std::numeric_limits<double>::infinity();
    int bu = -1, bv = -1;
    for (int u = 0; u < static_cast<int>(nodes_.size()); ++u) {
      if (nodes_[u].retired || uf.find(u) != comp) continue;
      for (int v = 0; v < static_cast<int>(nodes_.size()); ++v) {
        if (nodes_[v].retired || uf.find(v) == comp) continue;
        if (pairIndex_.count(pairKey(u, v))) continue;
        const double d = (nodes_[u].data.x - nodes_[v].data.x).squaredNorm();
        if (d < best) {
          best = d;
          bu = u;
          bv = v;
        }
      }
    }
    if (bu >= 0) {
      addEdge(bu, bv);
    } else {
      for (int u = 0; u < static_cast<int>(nodes_.size()); ++u)
        if (!nodes_[u].retired && uf.find(u) == comp) nodes_[u].retired = true;
    }
  }
}

int ReachabilityGraph::connectQueryPoint(const Vec3& x) {
  const auto key = hashQuantized(quantize(x));
  if (auto it = queryNodes_.find(key); it != queryNodes_.end() && !nodes_[it->second].retired &&
                                       quantize(nodes_[it->second].data.x) == quantize(x))
    return it->second;
  ValidatedNode node;
  try {
    node = validate(x, nearestNode(x));
  } catch (const NoSolution& e) {
    throw UnreachableQuery(e.what());
  } catch (const PreconditionRejected& e) {
    throw UnreachableQuery(e.what());
  }
  const int id = addNode(node);
  nodes_[id].query = true;
  queryNodes_[key] = id;
  for (int n : kNearest(x, params_.k, id)) {
    if (degree(n) == 0 && nodes_.size() > 2) continue;
    const int e = addEdge(id, n);
    ++counters_.edgeChecks;
    if (edgeCollisionFree(model_, node.q, nodes_[n].data.q, world_, {}, params_.interpolationSteps)) {
      edges_[e].status = EdgeStatus::Verified;
    } else {
      edges_[e].status = EdgeStatus::Removed;
      ++counters_.edgesRemoved;
    }
  }
  if (degree(id) == 0) enhanceAround(x, id);
  if (degree(id) == 0) {
    nodes_[id].retired = true;
    throw DisconnectedQuery("query point could not be connected to the graph");
  }
  ensureConnected();
  return id;
}

std::pair<std::vector<int>, double> shortestPath(std::size_t nodeCount, const std::vector<WeightedEdge>& edges,
                                                 int src, int dst) {
  const int n = static_cast<int>(nodeCount);
  if (src < 0 || dst < 0 || src >= n || dst >= n) throw InvalidParameter("path endpoint out of range");
  if (src == dst) return {{src}, 0.0};
  std::vector<std::vector<std::pair<int, double>>> adj(nodeCount);
  for (const auto& e : edges) {
    adj[e.a].emplace_back(e.b, e.cost);
    adj[e.b].emplace_back(e.a, e.cost);
  }
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(nodeCount, inf);
  std::vector<int> pred(nodeCount, -1);
  std::vector<char> done(nodeCount, 0);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[src] = 0.0;
  pq.emplace(0.0, src);
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (done[u]) continue;
    done[u] = 1;
    if (u == dst) break;
    for (const auto& [v, w] : adj[u]) {
      if (done[v]) continue;
      const double nd = d + w;
      if (nd < dist[v] || (nd == dist[v] && u < pred[v])) {
        dist[v] = nd;
        pred[v] = u;
        pq.emplace(nd, v);
      }
    }
  }
  if (dist[dst] == inf) throw NoPath("no path between nodes " + std::to_string(src) + " and " + std::to_string(dst));
  std::vector<int> path;
  for (int v = dst; v != -1; v = pred[v]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return {path, dist[dst]};
}

std::pair<std::vector<int>, double> ReachabilityGraph::dijkstra(int src, int dst) const {
  const int n = static_cast<int>(nodes_.size());
  if (src < 0 || dst < 0 || src >= n || dst >= n) throw InvalidParameter("dijkstra endpoint out of range");
  if (nodes_[src].retired || nodes_[dst].retired) throw NoPath("endpoint is retired");
  std::vector<WeightedEdge> live;
  live.reserve(edges_.size());
  for (const auto& e : edges_)
    if (e.status != EdgeStatus::Removed && !nodes_[e.a].retired && !nodes_[e.b].retired)
      live.push_back({e.a, e.b, e.cost});
  return shortestPath(nodes_.size(), live, src, dst);
}

PathAnswer ReachabilityGraph::queryPath(const Vec3& xStart, const Vec3& xGoal) {
  ++counters_.pathQueries;
  const int s = connectQueryPoint(xStart);
  if (quantize(xStart) == quantize(xGoal)) return {{nodes_[s].data.q}, {s}, 0.0};
  const int g = connectQueryPoint(xGoal);
  for (int iter = 0; iter < params_.queryIterationBudget; ++iter) {
    if (nodes_[s].retired || nodes_[g].retired) throw DisconnectedQuery("query endpoint lost its connection");
    const auto [path, cost] = dijkstra(s, g);
    bool clean = true;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      const int e = edgeBetween(path[i], path[i + 1]);
      if (!checkEdge(e)) {
        removeEdge(e, s, g);
        clean = false;
        break;
      }
    }
    if (!clean) continue;
    PathAnswer ans;
    ans.nodePath = path;
    for (int v : path) ans.configPath.push_back(nodes_[v].data.q);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) ans.cost += edges_[edgeBetween(path[i], path[i + 1])].cost;
    return ans;
  }
  throw NoPath("query iteration budget exhausted");
}

void ReachabilityGraph::dump(std::ostream& out) const {
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::string(buf);
  };
  out << "# rlgp-graph 1\n";
  out << "# node <id> <flags> <x> <y> <z> <c> <q...>\n# edge <a> <b> <cost> <status> <flags>\n";
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    std::string flags;
    auto flag = [&](bool on, const char* name) {
      if (!on) return;
      if (!flags.empty()) flags += ',';
      flags += name;
    };
    flag(n.enhanced, "enhanced");
    flag(n.query, "query");
    flag(n.retired, "retired");
    out << "node " << i << ' ' << (flags.empty() ? "-" : flags) << ' ' << num(n.data.x.x()) << ' '
        << num(n.data.x.y()) << ' ' << num(n.data.x.z()) << ' ' << num(n.data.c);
    for (std::size_t k = 0; k < n.data.q.size(); ++k) out << ' ' << num(n.data.q[k]);
    out << '\n';
  }
  for (const auto& e : edges_)
    out << "edge " << e.a << ' ' << e.b << ' ' << num(e.cost) << ' ' << statusName(e.status) << ' '
        << (e.enhanced ? "enhanced" : "-") << '\n';
}

}  // namespace rlgp
