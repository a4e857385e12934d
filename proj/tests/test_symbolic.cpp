#include <doctest.h>

#include "rlgp/errors.hpp"
#include "rlgp/symbolic.hpp"
#include "test_util.hpp"

#include <cmath>
#include <deque>
#include <map>
#include <random>

using namespace rlgp;
using namespace rlgp::testing;

namespace {

MovableObject cube(const std::string& id, const Vec3& p, const std::string& color = "") {
  MovableObject m;
  m.id = id;
  m.geometry = box(p, Vec3(0.05, 0.05, 0.06));
  m.color = color;
  m.support = "table";
  return m;
}

Region tray(const std::string& name, const Vec3& c, const std::string& color = "", int slots = 3) {
  Region r;
  r.name = name;
  r.center = c;
  r.half = Vec3(0.1, 0.2, 0.01);
  r.color = color;
  r.slots = slots;
  return r;
}

World tabletop(int objects, std::vector<Region> regions) {
  World w = openWorld();
  w.obstacles.push_back({"table", box(Vec3(0, 0, 0.225), Vec3(0.8, 1.2, 0.45))});
  for (int i = 0; i < objects; ++i) w.movables.push_back(cube("o" + std::to_string(i), Vec3(-0.2, -0.3 + 0.3 * i, 0.48)));
  w.regions = std::move(regions);
  return w;
}

World drawerWorld(int objects) {
  World w = openWorld();
  w.obstacles.push_back({"step", box(Vec3(1.75, 0, 0.25), Vec3(0.5, 1.0, 0.5))});
  Drawer d;
  d.body = BoxShape{Vec3(0.2, 0.2, 0.09)};
  d.bodyClosed = Vec3(1.72, 0, 0.37);
  d.axis = -Vec3::UnitX();
  d.travelLo = 0;
  d.travelHi = 0.35;
  d.knobClosed = Vec3(1.44, 0, 0.37);
  w.drawer = d;
  for (int i = 0; i < objects; ++i) {
    auto m = cube("r" + std::to_string(i), Vec3(1.72, -0.2 + 0.2 * i, 0.53));
    m.support = "step";
    w.movables.push_back(m);
  }
  return w;
}

double euclid(const Vec3& a, const Vec3& b, const GeometricState&) { return (a - b).norm(); }

std::vector<std::string> names(const Domain& d, const std::vector<SearchNode>& nodes) {
  std::vector<std::string> out;
  for (const auto& n : nodes) out.push_back(d.operators[n.actions.back()].name);
  return out;
}

}  // namespace

namespace doctest {
template <>
struct StringMaker<std::vector<std::string>> {
  static String convert(const std::vector<std::string>& v) {
    std::string s = "[";
    for (const auto& x : v) s += x + " ";
    return (s + "]").c_str();
  }
};
}  // namespace doctest

TEST_CASE("expand: only applicable actions") {
  const World w = tabletop(1, {tray("tray", Vec3(-0.9, 1.2, 0.46))});
  const Domain d = groundDomain("pickplace", w);
  SymbolicSearch search(d, w, initialState("pickplace", w), {"in(o0,tray)"}, Vec3(0, 0, 1), euclid);
  SearchNode root;
  root.state = initialState("pickplace", w);
  root.geo = GeometricState::of(w);
  root.switchPoints = {Vec3(-1, 0, 0.9)};
  const auto s1 = search.expand(root);
  CHECK(names(d, s1) == std::vector<std::string>{"pick(o0)"});
  const auto s2 = search.expand(s1.front());
  CHECK(names(d, s2) == std::vector<std::string>{"place(o0,tray)"});
  // Switch target sits just above the object's top face.
  CHECK((s1.front().switchPoints.back() - Vec3(-0.2, -0.3, 0.48 + 0.03 + kGraspHeight)).norm() < 1e-12);
  // Additive cost.
  const auto& n = s2.front();
  double sum = 0;
  for (std::size_t i = 0; i + 1 < n.switchPoints.size(); ++i) sum += (n.switchPoints[i + 1] - n.switchPoints[i]).norm();
  CHECK(n.gCost == doctest::Approx(sum).epsilon(1e-12));
}

TEST_CASE("expand: infinite costs prune successors") {
  const World w = tabletop(2, {tray("tray", Vec3(-0.9, 1.2, 0.46))});
  const Domain d = groundDomain("pickplace", w);
  auto blockO1 = [](const Vec3& a, const Vec3& b, const GeometricState& g) {
    return b.y() > -0.1 && b.y() < 0.1 ? std::numeric_limits<double>::infinity() : euclid(a, b, g);
  };
  SymbolicSearch search(d, w, initialState("pickplace", w), {}, Vec3(-1, 0, 0.9), blockO1);
  SearchNode root;
  root.state = initialState("pickplace", w);
  root.geo = GeometricState::of(w);
  root.switchPoints = {Vec3(-1, 0, 0.9)};
  CHECK(names(d, search.expand(root)) == std::vector<std::string>{"pick(o0)"});
  CHECK(search.counters().pruned == 1);
}

TEST_CASE("goalTest") {
  SymbolicState s{{"handEmpty", "in(b1,trayBlue)"}};
  CHECK(goalTest(s, {}));
  CHECK(goalTest(s, {"handEmpty"}));
  CHECK_FALSE(goalTest(s, {"in(b1,trayBlue)", "in(g1,trayGreen)"}));
  s.atoms.insert("in(g1,trayGreen)");
  s.atoms.insert("extra");
  CHECK(goalTest(s, {"in(b1,trayBlue)", "in(g1,trayGreen)"}));
}

TEST_CASE("parseGoal normalizes and rejects malformed atoms") {
  CHECK(parseGoal({"in( r1 , tray )", "drawerClosed"}) == AtomSet{"in(r1,tray)", "drawerClosed"});
  CHECK_THROWS_AS(parseGoal({"in(r1"}), FormatError);
  CHECK_THROWS_AS(parseGoal({"(x)"}), FormatError);
  CHECK_THROWS_AS(parseGoal({""}), FormatError);
}

TEST_CASE("Frontier ordering") {
  Frontier f;
  CHECK_THROWS_AS(f.pop(), EmptyFrontier);
  SearchNode a, b;
  a.gCost = 4.1;
  b.gCost = 3.2;
  f.push(a);
  f.push(b);
  CHECK(f.pop().gCost == 3.2);
  f.pop();

  SearchNode two, three;
  two.gCost = three.gCost = 1.0;
  two.actions = {0, 1};
  three.actions = {0, 1, 2};
  f.push(three);
  f.push(two);
  CHECK(f.pop().actions.size() == 2);
  f.pop();

  SearchNode x, y;
  x.gCost = y.gCost = 2.0;
  x.actions = {7};
  y.actions = {8};
  f.push(x);
  f.push(y);
  CHECK(f.pop().actions == std::vector<int>{7});
  CHECK(f.pop().actions == std::vector<int>{8});
}

TEST_CASE("goal already satisfied gives an empty plan") {
  const World w = tabletop(1, {tray("tray", Vec3(-0.9, 1.2, 0.46))});
  const auto plan = findPlan(groundDomain("pickplace", w), w, initialState("pickplace", w), {"on(o0,table)"},
                             Vec3(-1, 0, 0.9), euclid);
  CHECK(plan.actions.empty());
  CHECK(plan.gCost == 0.0);
}

TEST_CASE("table clearing: the unique minimal plan has six steps") {
  const World w = drawerWorld(1);
  const Domain d = groundDomain("tableclearing", w);
  const SymbolicState s0 = initialState("tableclearing", w);
  const AtomSet goal{"in(r0,drawer)", "drawerClosed"};
  const auto plan = findPlan(d, w, s0, goal, Vec3(0.9, 0, 0.6), euclid);
  std::vector<std::string> got;
  for (int a : plan.actions) got.push_back(d.operators[a].name);
  CHECK(got == std::vector<std::string>{"take_knob", "open_drawer", "pick_object(r0)", "drop_object(r0)", "take_knob",
                                        "close_drawer"});
  CHECK(validatePlan(d, s0, plan.actions, goal));

  // Oracle: breadth-first enumeration of every action sequence up to length 6.
  std::map<std::size_t, int> goalsAtLength;
  std::deque<std::pair<SymbolicState, std::vector<int>>> queue{{s0, {}}};
  while (!queue.empty()) {
    auto [s, seq] = queue.front();
    queue.pop_front();
    if (goalTest(s, goal)) {
      ++goalsAtLength[seq.size()];
      continue;
    }
    if (seq.size() == 6) continue;
    for (std::size_t i = 0; i < d.operators.size(); ++i)
      if (d.operators[i].applicable(s)) {
        auto next = seq;
        next.push_back(static_cast<int>(i));
        queue.emplace_back(d.operators[i].apply(s), next);
      }
  }
  CHECK(goalsAtLength.size() == 1);
  CHECK(goalsAtLength[6] == 1);
}

TEST_CASE("table clearing switch targets follow the drawer") {
  const World w = drawerWorld(1);
  const Domain d = groundDomain("tableclearing", w);
  const auto plan = findPlan(d, w, initialState("tableclearing", w), {"in(r0,drawer)", "drawerClosed"},
                             Vec3(0.9, 0, 0.6), euclid);
  const auto& sw = plan.switches;
  REQUIRE(sw.size() == 6);
  CHECK((sw[0].target - w.drawer->knobAt(0)).norm() < 1e-12);
  CHECK((sw[1].target - w.drawer->knobAt(0.35)).norm() < 1e-12);
  CHECK((sw[4].target - w.drawer->knobAt(0.35)).norm() < 1e-12);
  CHECK((sw[5].target - w.drawer->knobAt(0)).norm() < 1e-12);
  CHECK(sw[0].modes.size() == 1);
  // The drop target lies over the part of the drawer pulled out of the step (x < 1.5).
  CHECK(sw[3].target.x() < 1.5);
  CHECK(sw[3].target.x() > 1.5 - 0.35);
  CHECK(plan.geo.contained[0] == 1);
  CHECK(plan.geo.drawerExtension == 0.0);
}

TEST_CASE("key switch counts follow the number of objects") {
  const World sort = tabletop(2, {tray("trayRed", Vec3(-0.9, 1.0, 0.46), "red"), tray("trayBlue", Vec3(-0.9, -1.0, 0.46), "blue")});
  World colored = sort;
  colored.movables[0].color = "red";
  colored.movables[1].color = "blue";
  const auto p2 = findPlan(groundDomain("sorting", colored), colored, initialState("sorting", colored),
                           {"in(o0,trayRed)", "in(o1,trayBlue)"}, Vec3(-1, 0, 0.9), euclid);
  CHECK(p2.actions.size() == 4);

  const World pp = tabletop(3, {tray("tray", Vec3(-0.9, 1.2, 0.46))});
  const auto p3 = findPlan(groundDomain("pickplace", pp), pp, initialState("pickplace", pp),
                           {"in(o0,tray)", "in(o1,tray)", "in(o2,tray)"}, Vec3(-1, 0, 0.9), euclid);
  CHECK(p3.actions.size() == 6);
  // Each placement took its own slot.
  std::set<QuantizedPoint> placed;
  for (const auto& s : p3.switches)
    if (s.kind == ActionKind::Place) placed.insert(quantize(s.objectAfter));
  CHECK(placed.size() == 3);
}

TEST_CASE("full regions make place actions inapplicable") {
  const World pp = tabletop(2, {tray("tray", Vec3(-0.9, 1.2, 0.46), "", 1)});
  CHECK_THROWS_AS(findPlan(groundDomain("pickplace", pp), pp, initialState("pickplace", pp),
                           {"in(o0,tray)", "in(o1,tray)"}, Vec3(-1, 0, 0.9), euclid),
                  NoPlan);
}

TEST_CASE("returned plans replay to the goal on random instances") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 4;
    World w = tabletop(0, {tray("trayRed", Vec3(-0.9, 1.0, 0.46), "red", 4), tray("trayBlue", Vec3(-0.9, -1.0, 0.46), "blue", 4)});
    AtomSet goal;
    for (int i = 0; i < n; ++i) {
      const std::string color = (rng() % 2) ? "red" : "blue";
      w.movables.push_back(cube("o" + std::to_string(i), Vec3(u(rng), u(rng), 0.48), color));
      goal.insert("in(o" + std::to_string(i) + "," + (color == "red" ? "trayRed" : "trayBlue") + ")");
    }
    const Domain d = groundDomain("sorting", w);
    const SymbolicState s0 = initialState("sorting", w);
    const auto plan = findPlan(d, w, s0, goal, Vec3(-1, 0, 0.9), euclid);
    CHECK(validatePlan(d, s0, plan.actions, goal));
    CHECK(plan.actions.size() == static_cast<std::size_t>(2 * n));
    double sum = 0;
    for (double c : plan.stepCosts) sum += c;
    CHECK(plan.gCost == doctest::Approx(sum).epsilon(1e-9));
  }
}

TEST_CASE("unknown domain") { CHECK_THROWS_AS(groundDomain("cooking", World{}), InvalidParameter); }
