#pragma once

#include "rlgp/configuration.hpp"
#include "rlgp/geometry.hpp"
#include "rlgp/robot_model.hpp"
#include "rlgp/world.hpp"

#include <cstdint>
#include <optional>

namespace rlgp {

/// Constraint on the gripper approach axis.
struct OrientationConstraint {
  enum class Kind { Parallel, Perpendicular };
  Kind kind = Kind::Parallel;
  Vec3 axis = -Vec3::UnitZ();
  double tolerance = 0.15;  // rad

  /// Approach axis pointing straight down (top grasp).
  static OrientationConstraint topDown(double tolerance = 0.15);
  /// Approach axis horizontal (side grasp).
  static OrientationConstraint horizontal(double tolerance = 0.15);

  /// Angular error (rad) of an approach direction; satisfied when <= tolerance.
  double angularError(const Vec3& approach) const;
  bool satisfiedBy(const Vec3& approach) const { return angularError(approach) <= tolerance; }
};

/// Axis-aligned box restricting the base position (x, y).
struct BaseRegion {
  double xMin = -1e9, xMax = 1e9, yMin = -1e9, yMax = 1e9;
};

struct IKParams {
  double penaltyM = 1e9;          // precondition weight; realized as a rejection fast-path
  double positionTolerance = 1e-3;
  int maxIterations = 100;
  int restartCount = 8;
  double dampingInit = 1e-2;
  std::optional<OrientationConstraint> orientation;
  std::optional<BaseRegion> baseRegion;
  double clearanceMargin = 0.005;  // solver keeps this much clearance so results are strictly collision free
  std::uint64_t restartSeed = 0;

  void validate() const;
};

/// A validated reachability sample: point, configuration, and collision cost.
struct ValidatedNode {
  Vec3 x = Vec3::Zero();
  Configuration q;
  double c = 0.0;
};

/// Validates a task-space point: finds a collision-free, limit-respecting
/// whole-body configuration whose end effector reaches x0.
///
/// Throws PreconditionRejected when x0 lies inside static geometry and
/// NoSolution when every restart fails.
ValidatedNode validateNode(const Vec3& x0, const RobotModel& model, const World& world, const IKParams& params,
                           const std::optional<Configuration>& seed = std::nullopt);

/// Keyframe IK with an optional approach-axis constraint and a carried object.
/// Returns the seed unchanged when it already satisfies every constraint.
Configuration solveConstrainedIK(const Vec3& target, const std::optional<OrientationConstraint>& constraint,
                                 const RobotModel& model, const World& world, const AttachmentState& attach,
                                 const IKParams& params, const std::optional<Configuration>& seed = std::nullopt);

/// Independent acceptance check used by tests and the pipeline.
bool satisfiesTarget(const RobotModel& model, const World& world, const AttachmentState& attach,
                     const Configuration& q, const Vec3& target, double positionTolerance,
                     const std::optional<OrientationConstraint>& constraint = std::nullopt);

}  // namespace rlgp
