#include "rlgp/solution_library.hpp"

#include "rlgp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

namespace rlgp {

LibraryKey LibraryKey::of(const Vec3& a, const Vec3& b, double cell) {
  QuantizedPoint qa = quantize(a, cell), qb = quantize(b, cell);
  if (qb < qa) std::swap(qa, qb);
  return {qa, qb};
}

bool SolutionEntry::failed() const { return std::isinf(cost); }

bool SolutionLibrary::insert(const Vec3& a, const Vec3& b, std::vector<Configuration> path, double cost,
                             std::vector<int> nodePath, std::size_t graphNodes) {
  SolutionEntry e;
  e.key = LibraryKey::of(a, b, cell_);
  const bool flipped = quantize(a, cell_) != e.key.lo;
  e.loPoint = flipped ? b : a;
  e.hiPoint = flipped ? a : b;
  if (flipped) {
    std::reverse(path.begin(), path.end());
    std::reverse(nodePath.begin(), nodePath.end());
  }
  e.path = std::move(path);
  e.nodePath = std::move(nodePath);
  e.cost = cost;
  e.graphNodesAtStore = graphNodes;
  auto it = entries_.find(e.key);
  if (it != entries_.end() && !(cost < it->second.cost)) return false;
  entries_[e.key] = std::move(e);
  return true;
}

std::optional<SolutionEntry> SolutionLibrary::lookup(const Vec3& a, const Vec3& b) const {
  auto it = entries_.find(LibraryKey::of(a, b, cell_));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

bool SolutionLibrary::failureStale(const SolutionEntry& e, const ReachabilityGraph& graph) const {
  const auto& nodes = graph.nodes();
  if (nodes.size() <= e.graphNodesAtStore) return false;
  const Vec3 sd = graph.params().enhanceCovInit.cwiseSqrt();
  const double radius = 2.0 * sd.maxCoeff();
  for (std::size_t i = e.graphNodesAtStore; i < nodes.size(); ++i) {
    if (nodes[i].retired) continue;
    const Vec3& x = nodes[i].data.x;
    if ((x - e.loPoint).norm() <= radius || (x - e.hiPoint).norm() <= radius) return true;
  }
  return false;
}

const SolutionEntry& SolutionLibrary::fetch(ReachabilityGraph& graph, const Vec3& a, const Vec3& b) {
  const LibraryKey key = LibraryKey::of(a, b, cell_);
  auto it = entries_.find(key);
  if (it != entries_.end()) {
    if (!it->second.failed() || !failureStale(it->second, graph)) {
      ++counters_.hits;
      return it->second;
    }
    ++counters_.failuresInvalidated;
    entries_.erase(it);
  }
  ++counters_.misses;
  try {
    PathAnswer ans = graph.queryPath(a, b);
    insert(a, b, std::move(ans.configPath), ans.cost, std::move(ans.nodePath), graph.nodes().size());
  } catch (const UnreachableQuery&) {
    insert(a, b, {}, std::numeric_limits<double>::infinity(), {}, graph.nodes().size());
    ++counters_.failuresCached;
  } catch (const DisconnectedQuery&) {
    insert(a, b, {}, std::numeric_limits<double>::infinity(), {}, graph.nodes().size());
    ++counters_.failuresCached;
  } catch (const NoPath&) {
    insert(a, b, {}, std::numeric_limits<double>::infinity(), {}, graph.nodes().size());
    ++counters_.failuresCached;
  }
  return entries_.at(key);
}

double SolutionLibrary::heuristicCost(ReachabilityGraph& graph, const Vec3& a, const Vec3& b) {
  return fetch(graph, a, b).cost;
}

std::vector<Configuration> SolutionLibrary::getWaypoints(ReachabilityGraph& graph, const Vec3& a, const Vec3& b) {
  const SolutionEntry& e = fetch(graph, a, b);
  if (e.failed()) throw NoPath("no graph path between the requested points");
  std::vector<Configuration> out = e.path;
  if (quantize(a, cell_) != e.key.lo) std::reverse(out.begin(), out.end());
  return out;
}

void SolutionLibrary::dump(std::ostream& out) const {
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::string(buf);
  };
  out << "# rlgp-library 1\n# entry <lo xyz> <hi xyz> <cost> <waypoints>\n# q <values...>\n";
  for (const auto& [key, e] : entries_) {
    out << "entry " << num(e.loPoint.x()) << ' ' << num(e.loPoint.y()) << ' ' << num(e.loPoint.z()) << ' '
        << num(e.hiPoint.x()) << ' ' << num(e.hiPoint.y()) << ' ' << num(e.hiPoint.z()) << ' '
        << (e.failed() ? std::string("inf") : num(e.cost)) << ' ' << e.path.size() << '\n';
    for (const auto& q : e.path) {
      out << 'q';
      for (std::size_t i = 0; i < q.size(); ++i) out << ' ' << num(q[i]);
      out << '\n';
    }
  }
}

}  // namespace rlgp
