#include "rlgp/symbolic.hpp"

#include "rlgp/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace rlgp {

const char* actionKindName(ActionKind k) {
  switch (k) {
    case ActionKind::Pick: return "pick";
    case ActionKind::Place: return "place";
    case ActionKind::Drop: return "drop";
    case ActionKind::TakeKnob: return "take_knob";
    case ActionKind::OpenDrawer: return "open_drawer";
    case ActionKind::CloseDrawer: return "close_drawer";
  }
  return "?";
}

bool Operator::applicable(const SymbolicState& s) const {
  return std::includes(s.atoms.begin(), s.atoms.end(), pre.begin(), pre.end());
}

SymbolicState Operator::apply(const SymbolicState& s) const {
  SymbolicState out = s;
  for (const auto& a : del) out.atoms.erase(a);
  out.atoms.insert(add.begin(), add.end());
  return out;
}

std::vector<std::string> builtinDomains() { return {"pickplace", "sorting", "tableclearing"}; }

namespace {

std::string atom(const std::string& pred, std::initializer_list<std::string> args) {
  std::string s = pred + "(";
  bool first = true;
  for (const auto& a : args) {
    if (!first) s += ',';
    s += a;
    first = false;
  }
  return s + ")";
}

Operator pickOp(const std::string& name, const MovableObject& m) {
  Operator op;
  op.name = name + "(" + m.id + ")";
  op.kind = ActionKind::Pick;
  op.object = m.id;
  op.pre = {"handEmpty", atom("on", {m.id, m.support})};
  op.add = {atom("holding", {m.id})};
  op.del = {"handEmpty", atom("on", {m.id, m.support})};
  return op;
}

}  // namespace

Domain groundDomain(const std::string& name, const World& world) {
  Domain d;
  d.name = name;
  if (name == "pickplace" || name == "sorting") {
    for (const auto& m : world.movables) {
      if (m.contained) continue;
      d.operators.push_back(pickOp("pick", m));
      for (const auto& r : world.regions) {
        if (!r.color.empty() && !m.color.empty() && r.color != m.color) continue;
        Operator op;
        op.name = atom("place", {m.id, r.name});
        op.kind = ActionKind::Place;
        op.object = m.id;
        op.region = r.name;
        op.pre = {atom("holding", {m.id})};
        op.add = {atom("in", {m.id, r.name}), "handEmpty"};
        op.del = {atom("holding", {m.id})};
        d.operators.push_back(std::move(op));
      }
    }
  } else if (name == "tableclearing") {
    if (!world.drawer) throw InvalidParameter("tableclearing needs a drawer");
    Operator take;
    take.name = "take_knob";
    take.kind = ActionKind::TakeKnob;
    take.pre = {"handEmpty"};
    take.add = {"holdingKnob"};
    take.del = {"handEmpty"};
    d.operators.push_back(take);
    Operator open;
    open.name = "open_drawer";
    open.kind = ActionKind::OpenDrawer;
    open.pre = {"holdingKnob", "drawerClosed"};
    open.add = {"drawerOpen", "handEmpty"};
    open.del = {"drawerClosed", "holdingKnob"};
    d.operators.push_back(open);
    for (const auto& m : world.movables) {
      if (m.contained) continue;
      d.operators.push_back(pickOp("pick_object", m));
      Operator drop;
      drop.name = "drop_object(" + m.id + ")";
      drop.kind = ActionKind::Drop;
      drop.object = m.id;
      drop.pre = {atom("holding", {m.id}), "drawerOpen"};
      drop.add = {atom("in", {m.id, "drawer"}), "handEmpty"};
      drop.del = {atom("holding", {m.id})};
      d.operators.push_back(std::move(drop));
    }
    Operator close;
    close.name = "close_drawer";
    close.kind = ActionKind::CloseDrawer;
    close.pre = {"holdingKnob", "drawerOpen"};
    close.add = {"drawerClosed", "handEmpty"};
    close.del = {"drawerOpen", "holdingKnob"};
    d.operators.push_back(close);
  } else {
    throw InvalidParameter("unknown domain '" + name + "'");
  }
  return d;
}

SymbolicState initialState(const std::string& domain, const World& world) {
  SymbolicState s;
  s.atoms.insert("handEmpty");
  for (const auto& m : world.movables)
    s.atoms.insert(m.contained ? atom("in", {m.id, "drawer"}) : atom("on", {m.id, m.support}));
  if (domain == "tableclearing" && world.drawer) s.atoms.insert(world.drawer->isOpen() ? "drawerOpen" : "drawerClosed");
  return s;
}

AtomSet parseGoal(const std::vector<std::string>& atoms) {
  AtomSet out;
  for (const auto& raw : atoms) {
    std::string a;
    for (char c : raw)
      if (!std::isspace(static_cast<unsigned char>(c))) a += c;
    const auto open = a.find('(');
    const bool ok = !a.empty() && std::isalpha(static_cast<unsigned char>(a[0])) &&
                    (open == std::string::npos ? a.find(')') == std::string::npos
                                               : (a.back() == ')' && open > 0 && a.size() > open + 2 &&
                                                  a.find('(', open + 1) == std::string::npos));
    if (!ok) throw FormatError("malformed goal atom '" + raw + "'");
    out.insert(a);
  }
  return out;
}

bool goalTest(const SymbolicState& s, const AtomSet& goal) {
  return std::includes(s.atoms.begin(), s.atoms.end(), goal.begin(), goal.end());
}

GeometricState GeometricState::of(const World& world) {
  GeometricState g;
  for (const auto& m : world.movables) {
    g.objectPositions.push_back(m.geometry.position);
    g.contained.push_back(m.contained ? 1 : 0);
  }
  g.slotsUsed.assign(world.regions.size(), 0);
  if (world.drawer) g.drawerExtension = world.drawer->extension;
  return g;
}

World GeometricState::materialize(const World& base) const {
  World w = base;
  for (std::size_t i = 0; i < w.movables.size() && i < objectPositions.size(); ++i) {
    w.movables[i].geometry.position = objectPositions[i];
    w.movables[i].contained = contained[i] != 0;
  }
  if (w.drawer) w.drawer->extension = drawerExtension;
  return w;
}

namespace {

double alongAxis(const Drawer& d) { return std::abs(d.axis.dot(d.body.half)); }

}  // namespace

std::optional<KinematicSwitch> switchFor(const Operator& op, const World& world, const GeometricState& g) {
  KinematicSwitch sw;
  sw.action = op.name;
  sw.kind = op.kind;
  const std::vector<OrientationConstraint> graspModes{OrientationConstraint::topDown(),
                                                      OrientationConstraint::horizontal()};
  if (!op.object.empty()) {
    sw.object = world.movableIndex(op.object);
    if (sw.object < 0) return std::nullopt;
  }
  sw.drawerExtensionAfter = g.drawerExtension;
  switch (op.kind) {
    case ActionKind::Pick: {
      const double hh = world.movables[sw.object].halfHeight();
      sw.target = g.objectPositions[sw.object] + Vec3(0, 0, hh + kGraspHeight);
      sw.objectAfter = g.objectPositions[sw.object];
      sw.modes = graspModes;
      break;
    }
    case ActionKind::Place: {
      const auto it = std::find_if(world.regions.begin(), world.regions.end(),
                                   [&](const Region& r) { return r.name == op.region; });
      if (it == world.regions.end()) return std::nullopt;
      const auto r = static_cast<std::size_t>(it - world.regions.begin());
      sw.region = static_cast<int>(r);
      if (g.slotsUsed[r] >= std::max(1, it->slots)) return std::nullopt;
      const double hh = world.movables[sw.object].halfHeight();
      sw.objectAfter = it->slotTop(g.slotsUsed[r]) + Vec3(0, 0, hh + kPlaceClearance);
      sw.target = sw.objectAfter + Vec3(0, 0, hh + kGraspHeight);
      sw.modes = graspModes;
      break;
    }
    case ActionKind::Drop: {
      if (!world.drawer) return std::nullopt;
      const Drawer& d = *world.drawer;
      const PlacedShape body = d.bodyAt(g.drawerExtension);
      const double ext = g.drawerExtension - d.travelLo;
      const Vec3 exposed = body.position + d.axis * (alongAxis(d) - 0.5 * ext);
      const double hh = world.movables[sw.object].halfHeight();
      sw.target = Vec3(exposed.x(), exposed.y(), body.position.z() + d.body.half.z() + 2 * hh + kGraspHeight + 0.02);
      sw.objectAfter = body.position;
      sw.modes = graspModes;
      break;
    }
    case ActionKind::TakeKnob:
      if (!world.drawer) return std::nullopt;
      sw.target = world.drawer->knobAt(g.drawerExtension);
      sw.modes = {OrientationConstraint::horizontal()};
      break;
    case ActionKind::OpenDrawer:
      if (!world.drawer) return std::nullopt;
      sw.drawerExtensionAfter = world.drawer->travelHi;
      sw.target = world.drawer->knobAt(sw.drawerExtensionAfter);
      sw.modes = {OrientationConstraint::horizontal()};
      break;
    case ActionKind::CloseDrawer:
      if (!world.drawer) return std::nullopt;
      sw.drawerExtensionAfter = world.drawer->travelLo;
      sw.target = world.drawer->knobAt(sw.drawerExtensionAfter);
      sw.modes = {OrientationConstraint::horizontal()};
      break;
  }
  return sw;
}

GeometricState applySwitch(const KinematicSwitch& sw, const World& world, const GeometricState& g) {
  GeometricState out = g;
  switch (sw.kind) {
    case ActionKind::Pick:
      out.held = sw.object;
      break;
    case ActionKind::Place: {
      out.objectPositions[sw.object] = sw.objectAfter;
      out.held = -1;
      if (sw.region >= 0) ++out.slotsUsed[sw.region];
      break;
    }
    case ActionKind::Drop:
      out.objectPositions[sw.object] = sw.objectAfter;
      out.contained[sw.object] = 1;
      out.held = -1;
      break;
    case ActionKind::TakeKnob:
      out.holdingKnob = true;
      break;
    case ActionKind::OpenDrawer:
    case ActionKind::CloseDrawer: {
      const Vec3 shift = world.drawer->axis * (sw.drawerExtensionAfter - g.drawerExtension);
      for (std::size_t i = 0; i < out.contained.size(); ++i)
        if (out.contained[i]) out.objectPositions[i] += shift;
      out.drawerExtension = sw.drawerExtensionAfter;
      out.holdingKnob = false;
      break;
    }
  }
  return out;
}

bool Frontier::Later::operator()(const SearchNode& a, const SearchNode& b) const {
  if (a.gCost != b.gCost) return a.gCost > b.gCost;
  if (a.actions.size() != b.actions.size()) return a.actions.size() > b.actions.size();
  return a.order > b.order;
}

void Frontier::push(SearchNode n) {
  n.order = next_++;
  heap_.push(std::move(n));
}

SearchNode Frontier::pop() {
  if (heap_.empty()) throw EmptyFrontier("symbolic frontier is empty");
  SearchNode n = heap_.top();
  heap_.pop();
  return n;
}

SymbolicSearch::SymbolicSearch(Domain domain, World world, SymbolicState s0, AtomSet goal, const Vec3& startEe,
                               SwitchCostFn cost)
    : domain_(std::move(domain)), world_(std::move(world)), goal_(std::move(goal)), cost_(std::move(cost)) {
  SearchNode root;
  root.state = std::move(s0);
  root.geo = GeometricState::of(world_);
  root.switchPoints = {startEe};
  frontier_.push(std::move(root));
}

std::vector<SearchNode> SymbolicSearch::expand(const SearchNode& node) {
  std::vector<SearchNode> out;
  for (std::size_t i = 0; i < domain_.operators.size(); ++i) {
    const Operator& op = domain_.operators[i];
    if (!op.applicable(node.state)) continue;
    const auto sw = switchFor(op, world_, node.geo);
    if (!sw) {
      ++counters_.pruned;
      continue;
    }
    const double c = cost_(node.switchPoints.back(), sw->target, node.geo);
    if (!std::isfinite(c)) {
      ++counters_.pruned;
      continue;
    }
    SearchNode child;
    child.state = op.apply(node.state);
    child.geo = applySwitch(*sw, world_, node.geo);
    child.actions = node.actions;
    child.actions.push_back(static_cast<int>(i));
    child.switches = node.switches;
    child.switches.push_back(*sw);
    child.switchPoints = node.switchPoints;
    child.switchPoints.push_back(sw->target);
    child.stepCosts = node.stepCosts;
    child.stepCosts.push_back(c);
    child.gCost = node.gCost + c;
    out.push_back(std::move(child));
    ++counters_.generated;
  }
  return out;
}

SearchNode SymbolicSearch::step() {
  for (;;) {
    SearchNode n = frontier_.pop();
    if (isGoal(n)) return n;
    auto key = std::make_pair(n.state.atoms, quantize(n.switchPoints.back()));
    if (!closed_.insert(std::move(key)).second) {
      ++counters_.duplicates;
      continue;
    }
    ++counters_.expanded;
    for (auto& child : expand(n)) frontier_.push(std::move(child));
    return n;
  }
}

SearchNode findPlan(const Domain& domain, const World& world, const SymbolicState& s0, const AtomSet& goal,
                    const Vec3& startEe, const SwitchCostFn& cost, int maxExpansions) {
  SymbolicSearch search(domain, world, s0, goal, startEe, cost);
  while (!search.exhausted()) {
    if (search.counters().expanded >= maxExpansions) break;
    try {
      SearchNode n = search.step();
      if (search.isGoal(n)) return n;
    } catch (const EmptyFrontier&) {
      break;
    }
  }
  throw NoPlan("symbolic search found no plan");
}

bool validatePlan(const Domain& domain, const SymbolicState& s0, const std::vector<int>& actions, const AtomSet& goal) {
  SymbolicState s = s0;
  for (int a : actions) {
    if (a < 0 || a >= static_cast<int>(domain.operators.size())) return false;
    const Operator& op = domain.operators[a];
    if (!op.applicable(s)) return false;
    s = op.apply(s);
  }
  return goalTest(s, goal);
}

}  // namespace rlgp
