#pragma once

#include "rlgp/configuration.hpp"
#include "rlgp/geometry.hpp"
#include "rlgp/reachability_graph.hpp"

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace rlgp {

/// Unordered endpoint pair on the 1 mm grid, stored in sorted order.
struct LibraryKey {
  QuantizedPoint lo;
  QuantizedPoint hi;

  static LibraryKey of(const Vec3& a, const Vec3& b, double cell = 1e-3);
  bool degenerate() const { return lo == hi; }
  auto operator<=>(const LibraryKey&) const = default;
};

/// Cached graph path between two end-effector points. `path` runs from the
/// key's `lo` endpoint to its `hi` endpoint. A failed query is stored with an
/// infinite cost and an empty path.
struct SolutionEntry {
  LibraryKey key;
  Vec3 loPoint = Vec3::Zero();
  Vec3 hiPoint = Vec3::Zero();
  std::vector<Configuration> path;
  std::vector<int> nodePath;
  double cost = 0.0;
  std::size_t graphNodesAtStore = 0;  // used to invalidate failures after enhancement

  bool failed() const;
};

/// Bidirectional cache of reachability-graph answers.
class SolutionLibrary {
 public:
  struct Counters {
    int hits = 0;
    int misses = 0;
    int failuresCached = 0;
    int failuresInvalidated = 0;
  };

  explicit SolutionLibrary(double cell = 1e-3) : cell_(cell) {}

  /// Stores a path given in a -> b order. An existing entry is replaced only
  /// when the new cost is lower. Returns true when the library changed.
  bool insert(const Vec3& a, const Vec3& b, std::vector<Configuration> path, double cost,
              std::vector<int> nodePath = {}, std::size_t graphNodes = 0);

  /// Exact lookup on the quantized, order-independent key.
  std::optional<SolutionEntry> lookup(const Vec3& a, const Vec3& b) const;

  /// Graph path cost between two points; queries the graph on a miss.
  /// Unreachable pairs yield +infinity and are cached.
  double heuristicCost(ReachabilityGraph& graph, const Vec3& a, const Vec3& b);

  /// Waypoint configurations from a to b. Throws NoPath for failed pairs.
  std::vector<Configuration> getWaypoints(ReachabilityGraph& graph, const Vec3& a, const Vec3& b);

  std::size_t size() const { return entries_.size(); }
  void clear() { entries_.clear(); }
  const Counters& counters() const { return counters_; }
  const std::map<LibraryKey, SolutionEntry>& entries() const { return entries_; }

  /// One `entry` line per key followed by its waypoint configurations.
  void dump(std::ostream& out) const;

 private:
  const SolutionEntry& fetch(ReachabilityGraph& graph, const Vec3& a, const Vec3& b);
  bool failureStale(const SolutionEntry& e, const ReachabilityGraph& graph) const;

  double cell_;
  std::map<LibraryKey, SolutionEntry> entries_;
  Counters counters_;
};

}  // namespace rlgp
