#pragma once

#include "rlgp/configuration.hpp"
#include "rlgp/geometry.hpp"
#include "rlgp/robot_model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rlgp {

struct Obstacle {
  std::string name;
  PlacedShape geometry;
};

struct MovableObject {
  std::string id;
  PlacedShape geometry;
  std::string color;
  std::string support;     // name of the surface it initially rests on
  bool contained = false;  // stowed inside the drawer; ignored by collision checks

  double halfHeight() const;
};

/// Named placement volume; objects are placed on its top face.
struct Region {
  std::string name;
  Vec3 center = Vec3::Zero();
  Vec3 half = Vec3::Constant(0.1);
  std::string color;
  int slots = 1;

  /// Top-face point of slot `index`; slots are spread along the longer horizontal axis.
  Vec3 slotTop(int index) const;
};

/// Single prismatic drawer. `bodyClosed` and `knobClosed` are the geometry at zero extension.
struct Drawer {
  BoxShape body;
  Vec3 bodyClosed = Vec3::Zero();
  Vec3 axis = -Vec3::UnitX();
  double travelLo = 0.0;
  double travelHi = 0.3;
  double extension = 0.0;
  Vec3 knobClosed = Vec3::Zero();

  PlacedShape bodyAt(double ext) const { return {body, bodyClosed + axis * ext}; }
  PlacedShape currentBody() const { return bodyAt(extension); }
  Vec3 knobAt(double ext) const { return knobClosed + axis * ext; }
  Vec3 knob() const { return knobAt(extension); }
  bool isOpen() const { return extension > travelLo + 0.5 * (travelHi - travelLo); }
};

struct World {
  std::vector<Obstacle> obstacles;
  std::vector<MovableObject> movables;
  std::vector<Region> regions;
  std::optional<Drawer> drawer;
  Vec3 pMin = Vec3(-2, -2, 0);
  Vec3 pMax = Vec3(2, 2, 1.5);

  /// Throws InvalidParameter on duplicate ids, inverted bounds, or an out-of-range drawer.
  void validate() const;

  const MovableObject* findMovable(const std::string& id) const;
  MovableObject* findMovable(const std::string& id);
  const Region* findRegion(const std::string& name) const;
  int movableIndex(const std::string& id) const;

  /// Static geometry only (obstacles + drawer). Used by the reachability graph.
  World staticView() const;
  World withoutDrawer() const;

  bool insideWorkspace(const Vec3& x) const;
};

/// What the gripper is carrying. Offsets are world-aligned translations from
/// the end effector to the object center; carried objects stay axis-aligned.
struct AttachmentState {
  std::optional<std::string> heldObject;
  Vec3 graspOffset = Vec3::Zero();
  bool holdingKnob = false;

  bool empty() const { return !heldObject && !holdingKnob; }
};

/// Sentinel returned by pointClearance when the world has no static geometry.
inline constexpr double kFreeSpaceClearance = -1000.0;

/// Maximum penetration (m) between robot spheres / carried object and the world.
double collisionPenetration(const RobotModel& model, const Configuration& q, const World& world,
                            const AttachmentState& attach = {});

/// Same as above from a precomputed FK result.
double collisionPenetration(const RobotModel& model, const FKResult& fk, const World& world,
                            const AttachmentState& attach);

/// Smooth collision cost: sum over robot spheres (and the carried object) of
/// max(0, margin - clearance)^2. Zero iff every body keeps `margin` clearance.
double collisionCost(const RobotModel& model, const FKResult& fk, const World& world,
                     const AttachmentState& attach, double margin);

/// Per-body residuals max(0, margin - clearance); size = robot sphere count + 1.
void collisionResiduals(const RobotModel& model, const FKResult& fk, const World& world,
                        const AttachmentState& attach, double margin, Eigen::Ref<Eigen::VectorXd> out);

/// Signed point clearance against static geometry: positive inside an obstacle,
/// negative outside.
double pointClearance(const Vec3& x, const World& world);

/// Max distance of any manipulator joint outside its limits. The base is unconstrained.
double jointLimitViolation(const RobotModel& model, const Configuration& q);

/// L+1 configurations from q1 to q2, linear except yaw which follows the shortest arc.
std::vector<Configuration> interpolate(const Configuration& q1, const Configuration& q2, int steps);

/// True iff every interpolation sample is collision free and inside joint limits.
bool edgeCollisionFree(const RobotModel& model, const Configuration& q1, const Configuration& q2,
                       const World& world, const AttachmentState& attach, int steps);

/// Collision free and within limits.
bool configurationFeasible(const RobotModel& model, const Configuration& q, const World& world,
                           const AttachmentState& attach = {});

}  // namespace rlgp
