#pragma once

#include "rlgp/geometry.hpp"
#include "rlgp/ik.hpp"
#include "rlgp/world.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

namespace rlgp {

/// Ground atoms such as "on(r1,table)", "holding(r1)", "handEmpty".
using AtomSet = std::set<std::string>;

struct SymbolicState {
  AtomSet atoms;
  bool operator==(const SymbolicState&) const = default;
};

enum class ActionKind { Pick, Place, Drop, TakeKnob, OpenDrawer, CloseDrawer };

const char* actionKindName(ActionKind k);

/// A ground STRIPS operator plus what it means geometrically.
struct Operator {
  std::string name;  // e.g. "pick(r1)"
  ActionKind kind = ActionKind::Pick;
  std::string object;  // movable id for pick/place/drop
  std::string region;  // target region for place
  AtomSet pre, add, del;

  bool applicable(const SymbolicState& s) const;
  SymbolicState apply(const SymbolicState& s) const;
};

struct Domain {
  std::string name;
  std::vector<Operator> operators;
};

/// Names accepted by groundDomain.
std::vector<std::string> builtinDomains();

/// Grounds a built-in domain ("pickplace", "sorting", "tableclearing") on a world.
/// Place operators are only generated for regions whose color is empty or
/// matches the object's color.
Domain groundDomain(const std::string& name, const World& world);

/// Atoms describing the world's initial state for a domain.
SymbolicState initialState(const std::string& domain, const World& world);

/// Parses goal atoms; throws FormatError on malformed atoms.
AtomSet parseGoal(const std::vector<std::string>& atoms);

bool goalTest(const SymbolicState& s, const AtomSet& goal);

/// Object poses, drawer extension and what the hand holds after a prefix of actions.
struct GeometricState {
  std::vector<Vec3> objectPositions;  // parallel to world.movables
  std::vector<char> contained;
  int held = -1;
  bool holdingKnob = false;
  double drawerExtension = 0.0;
  std::vector<int> slotsUsed;  // parallel to world.regions

  static GeometricState of(const World& world);
  /// The world with movables and drawer moved to this state. Contained objects are kept but flagged.
  World materialize(const World& base) const;
};

/// The kinematic switch an action induces: where the end effector must be
/// and which approach directions are acceptable there.
struct KinematicSwitch {
  std::string action;
  ActionKind kind = ActionKind::Pick;
  Vec3 target = Vec3::Zero();
  std::vector<OrientationConstraint> modes;  // tried in order
  int object = -1;                          // movable index
  int region = -1;                          // region index for place
  Vec3 objectAfter = Vec3::Zero();          // object center after place/drop
  double drawerExtensionAfter = 0.0;
};

/// Height of the end-effector target above an object's top face.
inline constexpr double kGraspHeight = 0.01;
/// Gap left under a placed object.
inline constexpr double kPlaceClearance = 0.005;

/// Computes the switch for `op` in geometric state `g`, or nullopt when the
/// action has no geometric meaning there (e.g. a full region).
std::optional<KinematicSwitch> switchFor(const Operator& op, const World& world, const GeometricState& g);

/// Geometric effect of a switch.
GeometricState applySwitch(const KinematicSwitch& sw, const World& world, const GeometricState& g);

struct SearchNode {
  SymbolicState state;
  GeometricState geo;
  std::vector<int> actions;  // operator indices
  std::vector<KinematicSwitch> switches;
  std::vector<Vec3> switchPoints;  // start point followed by one target per action
  std::vector<double> stepCosts;
  double gCost = 0.0;
  std::size_t order = 0;  // insertion order, assigned by the frontier
};

/// Min-gCost frontier; ties go to fewer actions, then earlier insertion.
class Frontier {
 public:
  void push(SearchNode n);
  /// Throws EmptyFrontier.
  SearchNode pop();
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

 private:
  struct Later {
    bool operator()(const SearchNode& a, const SearchNode& b) const;
  };
  std::priority_queue<SearchNode, std::vector<SearchNode>, Later> heap_;
  std::size_t next_ = 0;
};

/// Cost of moving the end effector between two switch points, given the
/// geometric state before the move. +infinity prunes the successor.
using SwitchCostFn = std::function<double(const Vec3& from, const Vec3& to, const GeometricState& before)>;

/// Best-first symbolic search driven step by step by the caller.
class SymbolicSearch {
 public:
  struct Counters {
    int expanded = 0;
    int generated = 0;
    int pruned = 0;
    int duplicates = 0;
  };

  SymbolicSearch(Domain domain, World world, SymbolicState s0, AtomSet goal, const Vec3& startEe, SwitchCostFn cost);

  bool exhausted() const { return frontier_.empty(); }
  /// Pops the best node. Non-goal nodes are expanded into the frontier before
  /// being returned; goal nodes are returned for geometric verification.
  /// Throws EmptyFrontier.
  SearchNode step();

  std::vector<SearchNode> expand(const SearchNode& node);
  bool isGoal(const SearchNode& n) const { return goalTest(n.state, goal_); }

  const Domain& domain() const { return domain_; }
  const World& world() const { return world_; }
  const Counters& counters() const { return counters_; }

 private:
  Domain domain_;
  World world_;
  AtomSet goal_;
  SwitchCostFn cost_;
  Frontier frontier_;
  std::set<std::pair<AtomSet, QuantizedPoint>> closed_;
  Counters counters_;
};

/// Runs the search until the first goal node (no geometric checks). Throws NoPlan.
SearchNode findPlan(const Domain& domain, const World& world, const SymbolicState& s0, const AtomSet& goal,
                    const Vec3& startEe, const SwitchCostFn& cost, int maxExpansions = 100000);

/// Replays operator semantics; true iff every action applies in order and the goal holds at the end.
bool validatePlan(const Domain& domain, const SymbolicState& s0, const std::vector<int>& actions, const AtomSet& goal);

}  // namespace rlgp
