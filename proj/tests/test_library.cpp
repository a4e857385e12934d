#include <doctest.h>

#include "rlgp/errors.hpp"
#include "rlgp/solution_library.hpp"
#include "test_util.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace rlgp;
using namespace rlgp::testing;

namespace {

World flatWorld() {
  World w = openWorld();
  w.pMin = Vec3(-1.5, -1.5, 0.05);
  w.pMax = Vec3(1.5, 1.5, 0.45);
  return w;
}

// A closed box around (1, 1, 0.2) with a hollow too small for the robot sphere.
World enclosedWorld() {
  World w = flatWorld();
  const Vec3 c(1, 1, 0.2);
  const double wall = 0.05, gap = 0.03;
  const double off = gap + wall / 2;
  w.obstacles.push_back({"px", box(c + Vec3(off, 0, 0), Vec3(wall, 2 * off + wall, 2 * off + wall))});
  w.obstacles.push_back({"nx", box(c - Vec3(off, 0, 0), Vec3(wall, 2 * off + wall, 2 * off + wall))});
  w.obstacles.push_back({"py", box(c + Vec3(0, off, 0), Vec3(2 * off + wall, wall, 2 * off + wall))});
  w.obstacles.push_back({"ny", box(c - Vec3(0, off, 0), Vec3(2 * off + wall, wall, 2 * off + wall))});
  w.obstacles.push_back({"pz", box(c + Vec3(0, 0, off), Vec3(2 * off + wall, 2 * off + wall, wall))});
  w.obstacles.push_back({"nz", box(c - Vec3(0, 0, off), Vec3(2 * off + wall, 2 * off + wall, wall))});
  return w;
}

ReachabilityGraph makeGraph(const World& w, int n = 60, std::uint64_t seed = 3) {
  GraphParams p;
  p.nodeCount = n;
  p.rngSeed = seed;
  return constructRG(w, sphereBot(0.05, 0.2), p);
}

Vec3 randomPoint(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.2, 1.2), z(0.1, 0.4);
  return {u(rng), u(rng), z(rng)};
}

}  // namespace

TEST_CASE("LibraryKey is order independent and quantized to 1 mm") {
  const Vec3 a(0.1, 0.2, 0.3), b(-0.4, 0.5, 0.6);
  CHECK(LibraryKey::of(a, b) == LibraryKey::of(b, a));
  CHECK(LibraryKey::of(a, b) == LibraryKey::of(a + Vec3(0.0004, 0, 0), b));
  CHECK_FALSE(LibraryKey::of(a, b) == LibraryKey::of(a + Vec3(0.002, 0, 0), b));
  CHECK(LibraryKey::of(a, a).degenerate());
}

TEST_CASE("insert and lookup") {
  SolutionLibrary lib;
  const Configuration q1{0, 0, 0, 0.1}, q2{1, 0, 0, 0.2}, q3{2, 0, 0, 0.3};
  const Vec3 a(0, 0, 0.1), b(2, 0, 0.3);
  CHECK_FALSE(lib.lookup(a, b));
  CHECK(lib.insert(a, b, {q1, q2, q3}, 5.0));
  const auto hit = lib.lookup(b, a);
  REQUIRE(hit);
  CHECK(hit->cost == 5.0);
  CHECK_FALSE(lib.lookup(a, Vec3(9, 9, 9)));

  // Duplicate insert: only a cheaper path replaces the entry.
  CHECK_FALSE(lib.insert(b, a, {q3, q1}, 6.0));
  CHECK(lib.lookup(a, b)->cost == 5.0);
  CHECK(lib.insert(b, a, {q3, q1}, 4.0));
  CHECK(lib.lookup(a, b)->cost == 4.0);
  CHECK(lib.size() == 1);
}

TEST_CASE("heuristicCost: identical endpoints cost nothing") {
  auto g = makeGraph(flatWorld());
  SolutionLibrary lib;
  const Vec3 a(0.2, 0.3, 0.2);
  CHECK(lib.heuristicCost(g, a, a) == 0.0);
  const auto wp = lib.getWaypoints(g, a, a);
  CHECK(wp.size() == 1);
}

TEST_CASE("bidirectional queries reuse the cached search") {
  auto g = makeGraph(flatWorld());
  SolutionLibrary lib;
  std::mt19937_64 rng(12);
  int pairs = 0;
  while (pairs < 100) {
    const Vec3 a = randomPoint(rng), b = randomPoint(rng);
    const double h = lib.heuristicCost(g, a, b);
    if (std::isinf(h)) continue;
    ++pairs;
    const int queries = g.counters().pathQueries;
    CHECK(lib.heuristicCost(g, b, a) == h);
    const auto ab = lib.getWaypoints(g, a, b);
    const auto ba = lib.getWaypoints(g, b, a);
    CHECK(g.counters().pathQueries == queries);
    REQUIRE(ab.size() == ba.size());
    for (std::size_t i = 0; i < ab.size(); ++i) CHECK(ab[i] == ba[ba.size() - 1 - i]);
    const RobotModel& m = g.model();
    CHECK((forwardKinematics(m, ab.front()).ee - a).norm() <= 1e-3 + 1e-9);
    CHECK((forwardKinematics(m, ab.back()).ee - b).norm() <= 1e-3 + 1e-9);
  }
  CHECK(lib.counters().hits >= 300);
}

TEST_CASE("unreachable targets are cached as infinite cost") {
  auto g = makeGraph(enclosedWorld());
  SolutionLibrary lib;
  const Vec3 a(-0.5, 0, 0.2), trapped(1, 1, 0.2);
  CHECK(std::isinf(lib.heuristicCost(g, a, trapped)));
  const int queries = g.counters().pathQueries;
  CHECK(std::isinf(lib.heuristicCost(g, trapped, a)));
  CHECK(g.counters().pathQueries == queries);
  CHECK_THROWS_AS(lib.getWaypoints(g, a, trapped), NoPath);
  CHECK(lib.counters().failuresCached == 1);
}

TEST_CASE("cached failures are retried after the graph grows near an endpoint") {
  auto g = makeGraph(flatWorld());
  SolutionLibrary lib;
  const Vec3 a(0, 0, 0.2), b(0.5, 0.5, 0.2);
  // Seed a failure by hand, as if an earlier graph state could not answer.
  lib.insert(a, b, {}, std::numeric_limits<double>::infinity(), {}, g.nodes().size());
  CHECK(std::isinf(lib.heuristicCost(g, a, b)));
  g.addNode(validateNode(b + Vec3(0.05, 0, 0), g.model(), g.world(), IKParams{}));
  g.ensureConnected();
  CHECK(std::isfinite(lib.heuristicCost(g, a, b)));
  CHECK(lib.counters().failuresInvalidated == 1);
}

TEST_CASE("library answers equal direct graph answers on the same graph state") {
  auto g1 = makeGraph(flatWorld(), 80, 17);
  auto g2 = g1;
  SolutionLibrary lib;
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const Vec3 a = randomPoint(rng), b = randomPoint(rng);
    double direct;
    try {
      direct = g2.queryPath(a, b).cost;
    } catch (const Error&) {
      direct = std::numeric_limits<double>::infinity();
    }
    CHECK(lib.heuristicCost(g1, a, b) == direct);
  }
  std::ostringstream d1, d2;
  g1.dump(d1);
  g2.dump(d2);
  CHECK(d1.str() == d2.str());
}
