#include "rlgp/ik.hpp"

#include "rlgp/errors.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <random>

namespace rlgp {

OrientationConstraint OrientationConstraint::topDown(double tolerance) {
  return {Kind::Parallel, -Vec3::UnitZ(), tolerance};
}

OrientationConstraint OrientationConstraint::horizontal(double tolerance) {
  return {Kind::Perpendicular, Vec3::UnitZ(), tolerance};
}

double OrientationConstraint::angularError(const Vec3& approach) const {
  const Vec3 a = approach.normalized();
  const double d = std::clamp(a.dot(axis.normalized()), -1.0, 1.0);
  return kind == Kind::Parallel ? std::acos(d) : std::abs(std::asin(d));
}

void IKParams::validate() const {
  if (penaltyM < 1e6) throw InvalidParameter("IK penalty M must be >= 1e6");
  if (!(positionTolerance > 0.0)) throw InvalidParameter("IK position tolerance must be positive");
  if (restartCount < 1) throw InvalidParameter("IK restart count must be >= 1");
  if (maxIterations < 1) throw InvalidParameter("IK iteration budget must be >= 1");
}

bool satisfiesTarget(const RobotModel& model, const World& world, const AttachmentState& attach,
                     const Configuration& q, const Vec3& target, double positionTolerance,
                     const std::optional<OrientationConstraint>& constraint) {
  const FKResult fk = forwardKinematics(model, q);
  if ((fk.ee - target).norm() > positionTolerance) return false;
  if (constraint && !constraint->satisfiedBy(fk.approach(model))) return false;
  if (jointLimitViolation(model, q) > 0.0) return false;
  return collisionPenetration(model, fk, world, attach) <= 0.0;
}

namespace {

constexpr double kOrientationWeight = 0.5;
constexpr double kCollisionWeight = 2.0;
constexpr double kNominalReach = 0.55;

// Damped least-squares (Levenberg-Marquardt) solve on the stacked residual
// [ee position error; approach-axis error; per-body clearance deficit].
class IkProblem {
 public:
  IkProblem(const RobotModel& model, const World& world, const AttachmentState& attach, const Vec3& target,
            const std::optional<OrientationConstraint>& orientation, const IKParams& params)
      : model_(model), world_(world), attach_(attach), target_(target), orientation_(orientation), params_(params) {
    std::size_t spheres = model.baseSpheres.size();
    for (const auto& j : model.joints) spheres += j.spheres.size();
    collisionCount_ = spheres + 1;
    orientationCount_ = !orientation ? 0 : (orientation->kind == OrientationConstraint::Kind::Parallel ? 3 : 1);
    residualCount_ = 3 + orientationCount_ + collisionCount_;
  }

  Eigen::Index residualCount() const { return static_cast<Eigen::Index>(residualCount_); }

  void residual(const Configuration& q, Eigen::VectorXd& r) const {
    r.resize(residualCount());
    const FKResult fk = forwardKinematics(model_, q);
    r.head<3>() = fk.ee - target_;
    Eigen::Index k = 3;
    if (orientation_) {
      const Vec3 a = fk.approach(model_).normalized();
      const Vec3 u = orientation_->axis.normalized();
      if (orientation_->kind == OrientationConstraint::Kind::Parallel) {
        r.segment<3>(k) = kOrientationWeight * (a - u);
        k += 3;
      } else {
        r[k++] = kOrientationWeight * a.dot(u);
      }
    }
    auto tail = r.segment(k, static_cast<Eigen::Index>(collisionCount_));
    collisionResiduals(model_, fk, world_, attach_, params_.clearanceMargin, tail);
    tail *= kCollisionWeight;
  }

  void project(Configuration& q) const {
    for (std::size_t i = 0; i < model_.joints.size(); ++i)
      q.setArm(i, std::clamp(q.arm(i), model_.joints[i].lo, model_.joints[i].hi));
    if (params_.baseRegion) {
      const auto& b = *params_.baseRegion;
      q[0] = std::clamp(q[0], b.xMin, b.xMax);
      q[1] = std::clamp(q[1], b.yMin, b.yMax);
    }
  }

  Configuration solve(Configuration q) const {
    project(q);
    const Eigen::Index n = static_cast<Eigen::Index>(q.size());
    Eigen::VectorXd r, rTrial, rStep;
    residual(q, r);
    double cost = r.squaredNorm();
    double lambda = params_.dampingInit;
    Eigen::MatrixXd jac(residualCount(), n);
    constexpr double h = 1e-6;
    for (int it = 0; it < params_.maxIterations; ++it) {
      if (cost < 1e-16) break;
      for (Eigen::Index c = 0; c < n; ++c) {
        Configuration qs = q;
        qs.values()[c] += h;
        residual(qs, rStep);
        jac.col(c) = (rStep - r) / h;
      }
      const Eigen::MatrixXd jtj = jac.transpose() * jac;
      const Eigen::VectorXd g = jac.transpose() * r;
      bool accepted = false;
      while (lambda < 1e8) {
        Eigen::MatrixXd a = jtj;
        a.diagonal().array() += lambda * (jtj.diagonal().array() + 1.0);
        const Eigen::VectorXd step = a.ldlt().solve(-g);
        Configuration trial(Eigen::VectorXd(q.values() + step));
        project(trial);
        residual(trial, rTrial);
        const double trialCost = rTrial.squaredNorm();
        if (trialCost < cost) {
          const double gain = cost - trialCost;
          q = trial;
          r = rTrial;
          cost = trialCost;
          lambda = std::max(lambda / 3.0, 1e-9);
          accepted = true;
          if (gain < 1e-14 * (1.0 + cost) && cost > 1e-10) return q;  // stalled in a local minimum
          break;
        }
        lambda *= 4.0;
      }
      if (!accepted) break;
    }
    return q;
  }

 private:
  const RobotModel& model_;
  const World& world_;
  const AttachmentState& attach_;
  Vec3 target_;
  std::optional<OrientationConstraint> orientation_;
  const IKParams& params_;
  std::size_t collisionCount_ = 0;
  std::size_t orientationCount_ = 0;
  std::size_t residualCount_ = 0;
};

Configuration baseSeedFacing(const RobotModel& model, const Vec3& target, double heading, double distance,
                             const Configuration* armFrom) {
  Configuration q = model.homeConfiguration();
  if (armFrom)
    for (std::size_t i = 0; i < model.armDims(); ++i) q.setArm(i, armFrom->arm(i));
  q.setBase(target.x() - distance * std::cos(heading), target.y() - distance * std::sin(heading), heading);
  return q;
}

std::optional<Configuration> solveWithRestarts(const Vec3& target,
                                               const std::optional<OrientationConstraint>& constraint,
                                               const RobotModel& model, const World& world,
                                               const AttachmentState& attach, const IKParams& params,
                                               const std::optional<Configuration>& seed) {
  const IkProblem problem(model, world, attach, target, constraint, params);
  auto accept = [&](const Configuration& q) {
    return satisfiesTarget(model, world, attach, q, target, params.positionTolerance, constraint);
  };

  std::vector<Configuration> starts;
  double heading = 0.0;
  if (seed) {
    if (seed->size() != model.dims()) throw ModelMismatch("IK seed dimension does not match the model");
    starts.push_back(*seed);
    const Eigen::Vector2d d(target.x() - seed->baseX(), target.y() - seed->baseY());
    if (d.norm() > 1e-6) heading = std::atan2(d.y(), d.x());
  }
  starts.push_back(baseSeedFacing(model, target, heading, kNominalReach, seed ? &*seed : nullptr));

  for (const auto& start : starts) {
    Configuration q = problem.solve(start);
    if (accept(q)) return q.normalized();
  }

  std::mt19937_64 rng(params.restartSeed);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::uniform_real_distribution<double> reach(0.3, 0.75);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int r = 0; r < params.restartCount; ++r) {
    const double heading = angle(rng);
    Configuration start = baseSeedFacing(model, target, heading, reach(rng), nullptr);
    if (params.baseRegion) {
      const auto& b = *params.baseRegion;
      auto pick = [&](double lo, double hi, double around) {
        lo = std::max(lo, around - 1.0);
        hi = std::min(hi, around + 1.0);
        return lo <= hi ? lo + unit(rng) * (hi - lo) : std::clamp(around, lo, hi);
      };
      const double bx = std::clamp(pick(b.xMin, b.xMax, target.x()), b.xMin, b.xMax);
      const double by = std::clamp(pick(b.yMin, b.yMax, target.y()), b.yMin, b.yMax);
      start.setBase(bx, by, std::atan2(target.y() - by, target.x() - bx));
    }
    if (r % 2 == 1) {
      for (std::size_t i = 0; i < model.armDims(); ++i) {
        const auto& j = model.joints[i];
        start.setArm(i, j.lo + unit(rng) * (j.hi - j.lo));
      }
    }
    Configuration q = problem.solve(start);
    if (accept(q)) return q.normalized();
  }
  return std::nullopt;
}

}  // namespace

ValidatedNode validateNode(const Vec3& x0, const RobotModel& model, const World& world, const IKParams& params,
                           const std::optional<Configuration>& seed) {
  params.validate();
  const double gPrec = pointClearance(x0, world);
  if (gPrec > 0.0) throw PreconditionRejected("point lies inside static geometry");
  if (x0.z() > model.maxReachHeight()) throw NoSolution("point is above the maximum reach height");
  const auto q = solveWithRestarts(x0, params.orientation, model, world, AttachmentState{}, params, seed);
  if (!q) throw NoSolution("no feasible configuration after all restarts");
  ValidatedNode node;
  node.x = x0;
  node.q = *q;
  node.c = (forwardKinematics(model, *q).ee - x0).squaredNorm();
  return node;
}

Configuration solveConstrainedIK(const Vec3& target, const std::optional<OrientationConstraint>& constraint,
                                 const RobotModel& model, const World& world, const AttachmentState& attach,
                                 const IKParams& params, const std::optional<Configuration>& seed) {
  params.validate();
  if (seed && seed->size() == model.dims() &&
      satisfiesTarget(model, world, attach, *seed, target, params.positionTolerance, constraint))
    return *seed;
  const auto q = solveWithRestarts(target, constraint, model, world, attach, params, seed);
  if (!q) throw NoSolution("no configuration satisfies the keyframe constraints");
  return *q;
}

}  // namespace rlgp
