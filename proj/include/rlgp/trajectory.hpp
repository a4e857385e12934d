#pragma once

#include "rlgp/configuration.hpp"
#include "rlgp/ik.hpp"
#include "rlgp/robot_model.hpp"
#include "rlgp/symbolic.hpp"
#include "rlgp/world.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rlgp {

struct OptParams {
  int stepsPerPhase = 20;
  double smoothnessWeight = 1.0;
  double guidanceWeight = 1.0;
  double collisionPenaltyWeight = 1000.0;
  int maxIterations = 150;
  int verifyResolution = 10;     // collision samples per segment
  double collisionMargin = 0.03;  // clearance the penalty asks for; verification only needs zero penetration
  double finiteDifferenceStep = 1e-4;

  void validate() const;
};

/// Collision world and carried object during one phase.
struct PhaseContext {
  std::string action;
  World world;
  AttachmentState attach;
};

/// Height the held object is lifted off its support when picked.
inline constexpr double kPickLift = 0.003;

struct SwitchResult {
  bool ok = false;
  int failedIndex = -1;
  std::vector<Configuration> keyframes;  // initial configuration followed by one per switch
  std::vector<PhaseContext> phases;      // context of the motion that ends at each switch
  GeometricState finalState;
  AttachmentState finalAttach;
};

/// Seed for keyframe k's IK; receives the switch index, its target and the previous keyframe.
using KeyframeSeedFn =
    std::function<std::optional<Configuration>(std::size_t k, const Vec3& target, const Configuration& previous)>;

/// Solves one keyframe per switch in order, tracking what the gripper holds and
/// where objects and the drawer end up. Stops at the first unsolvable switch.
SwitchResult switchOptimization(const std::vector<KinematicSwitch>& switches, const Configuration& q0,
                                const World& world, const GeometricState& g0, const AttachmentState& a0,
                                const RobotModel& model, const IKParams& ik, const KeyframeSeedFn& seed = {});

struct TrajectoryPhase {
  std::string action;
  std::vector<Configuration> configs;  // stepsPerPhase + 1 samples; ends equal the keyframes
  PhaseContext context;
};

struct Trajectory {
  std::vector<TrajectoryPhase> phases;
  double objective = 0.0;
  double initialObjective = 0.0;

  std::vector<Configuration> flatten() const;
  std::size_t rowCount() const;
};

struct PathResult {
  bool ok = false;
  int failedPhase = -1;
  Trajectory trajectory;
};

/// Resamples a polyline of configurations to `count` points. Corners are kept
/// whenever there are at least as many output segments as input segments.
/// Yaw is unwrapped along the polyline, so outputs may leave (-pi, pi].
std::vector<Configuration> resamplePolyline(const std::vector<Configuration>& pts, int count);

/// Keeps the waypoints strictly between the one closest to `first` and the
/// one closest to `last` (searched after it), so the phase keyframes replace
/// the graph's own end configurations and any detour past them.
std::vector<Configuration> anchorGuidance(const std::vector<Configuration>& guidance, const Configuration& first,
                                          const Configuration& last);

/// Optimizes every phase between consecutive keyframes. `guidance[k]` holds the
/// waypoints of phase k (may be empty: straight-line start, no guidance term).
PathResult pathOptimization(const std::vector<Configuration>& keyframes,
                            const std::vector<std::vector<Configuration>>& guidance,
                            const std::vector<PhaseContext>& phases, const RobotModel& model,
                            const OptParams& params);

/// Objective of one phase's samples given its guidance samples.
double phaseObjective(const std::vector<Configuration>& configs, const std::vector<Configuration>& guide,
                      const PhaseContext& ctx, const RobotModel& model, const OptParams& params, bool useGuidance);

/// Independent check: continuity across phases, limits, and collision-free
/// consecutive pairs at resolution L in each phase's context.
bool verifyTrajectory(const Trajectory& traj, const RobotModel& model, int resolution);

/// Sum of planar base displacements between consecutive configurations.
double basePathLength(const std::vector<Configuration>& configs);
double basePathLength(const Trajectory& traj);

/// Rows `phase step action q...`.
void dumpTrajectory(const Trajectory& traj, std::ostream& out);

}  // namespace rlgp
