#pragma once

#include "rlgp/configuration.hpp"
#include "rlgp/geometry.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace rlgp {

enum class JointKind { Revolute, Prismatic };

struct LinkSphere {
  Vec3 center = Vec3::Zero();  // in the link frame
  double radius = 0.05;
};

struct Joint {
  std::string name;
  JointKind kind = JointKind::Revolute;
  Vec3 axis = Vec3::UnitZ();
  Eigen::Isometry3d parentOffset = Eigen::Isometry3d::Identity();
  double lo = 0.0;
  double hi = 0.0;
  std::vector<LinkSphere> spheres;
};

/// Floating planar base plus a serial manipulator.
///
/// Link 0 is the base frame; link i+1 is the frame after joint i. The end
/// effector is `eeOffset` expressed in frame `eeLink`, and the gripper approach
/// direction is `approachAxis` in the same frame.
struct RobotModel {
  std::string name;
  std::vector<LinkSphere> baseSpheres;
  double footprintRadius = 0.25;
  std::vector<Joint> joints;
  std::size_t eeLink = 0;
  Vec3 eeOffset = Vec3::Zero();
  Vec3 approachAxis = Vec3::UnitX();
  std::vector<double> homeArm;

  std::size_t armDims() const { return joints.size(); }
  std::size_t dims() const { return Configuration::kBaseDims + joints.size(); }

  /// Throws InvalidParameter when limits, radii, or axes break the model invariants.
  void validate() const;

  /// Configuration with the given base pose and the home arm posture.
  Configuration homeConfiguration(double x = 0.0, double y = 0.0, double yaw = 0.0) const;

  /// Upper bound on how far the end effector can get from the first joint's
  /// origin: sum of the parent offsets after the first joint plus the tool offset.
  double armReach() const;

  /// Highest end-effector z the chain can attain.
  double maxReachHeight() const;
};

RobotModel robotModelFromJson(const nlohmann::json& j);
nlohmann::json robotModelToJson(const RobotModel& m);

/// Loads a model file, or one of the built-in names (currently "hsr_like").
RobotModel loadRobotModel(const std::string& nameOrPath);

/// The bundled holonomic base + 5-DoF arm model.
const RobotModel& defaultRobotModel();

struct FKResult {
  Vec3 ee = Vec3::Zero();
  std::vector<Eigen::Isometry3d> linkFrames;  // base frame first

  Vec3 approach(const RobotModel& m) const { return linkFrames[m.eeLink].linear() * m.approachAxis; }
};

/// Throws ModelMismatch when q has the wrong dimension.
FKResult forwardKinematics(const RobotModel& model, const Configuration& q);

/// World-frame collision spheres of the robot at q (base spheres first).
void robotSpheres(const RobotModel& model, const FKResult& fk, std::vector<Vec3>& centers,
                  std::vector<double>& radii);

}  // namespace rlgp
