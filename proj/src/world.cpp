#include "rlgp/world.hpp"

#include "rlgp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace rlgp {

double MovableObject::halfHeight() const {
  if (const auto* box = std::get_if<BoxShape>(&geometry.shape)) return box->half.z();
  return std::get<SphereShape>(geometry.shape).radius;
}

Vec3 Region::slotTop(int index) const {
  const int n = std::max(1, slots);
  const int i = ((index % n) + n) % n;
  Vec3 p = center;
  p.z() += half.z();
  const int axis = half.x() >= half.y() ? 0 : 1;
  const double pitch = 2.0 * half[axis] / n;
  p[axis] = center[axis] - half[axis] + pitch * (i + 0.5);
  return p;
}

void World::validate() const {
  if (!(pMin.array() < pMax.array()).all()) throw InvalidParameter("workspace bounds need p_min < p_max");
  std::set<std::string> ids;
  for (const auto& m : movables)
    if (!ids.insert(m.id).second) throw InvalidParameter("duplicate object id '" + m.id + "'");
  if (drawer) {
    if (!(drawer->travelLo < drawer->travelHi)) throw InvalidParameter("drawer travel range is empty");
    if (drawer->extension < drawer->travelLo - 1e-12 || drawer->extension > drawer->travelHi + 1e-12)
      throw InvalidParameter("drawer extension outside its travel range");
  }
}

const MovableObject* World::findMovable(const std::string& id) const {
  for (const auto& m : movables)
    if (m.id == id) return &m;
  return nullptr;
}

MovableObject* World::findMovable(const std::string& id) {
  for (auto& m : movables)
    if (m.id == id) return &m;
  return nullptr;
}

int World::movableIndex(const std::string& id) const {
  for (std::size_t i = 0; i < movables.size(); ++i)
    if (movables[i].id == id) return static_cast<int>(i);
  return -1;
}

const Region* World::findRegion(const std::string& name) const {
  for (const auto& r : regions)
    if (r.name == name) return &r;
  return nullptr;
}

World World::staticView() const {
  World w = *this;
  w.movables.clear();
  return w;
}

World World::withoutDrawer() const {
  World w = *this;
  w.drawer.reset();
  return w;
}

bool World::insideWorkspace(const Vec3& x) const {
  return (x.array() >= pMin.array()).all() && (x.array() <= pMax.array()).all();
}

namespace {

// Calls fn(shape) for every body the robot may collide with.
template <typename Fn>
void forEachObstacle(const World& world, const AttachmentState& attach, Fn&& fn) {
  for (const auto& o : world.obstacles) fn(o.geometry);
  for (const auto& m : world.movables) {
    if (m.contained) continue;
    if (attach.heldObject && *attach.heldObject == m.id) continue;
    fn(m.geometry);
  }
  if (world.drawer) fn(world.drawer->currentBody());
}

const MovableObject* heldObject(const World& world, const AttachmentState& attach) {
  if (!attach.heldObject) return nullptr;
  const MovableObject* m = world.findMovable(*attach.heldObject);
  if (!m) throw InvalidParameter("attachment references unknown object '" + *attach.heldObject + "'");
  return m;
}

struct SphereSet {
  std::vector<Vec3> centers;
  std::vector<double> radii;
};

SphereSet& scratchSpheres() {
  thread_local SphereSet s;
  return s;
}

}  // namespace

double collisionPenetration(const RobotModel& model, const FKResult& fk, const World& world,
                            const AttachmentState& attach) {
  auto& spheres = scratchSpheres();
  robotSpheres(model, fk, spheres.centers, spheres.radii);
  double worst = 0.0;
  const MovableObject* held = heldObject(world, attach);
  const PlacedShape heldShape = held ? PlacedShape{held->geometry.shape, fk.ee + attach.graspOffset} : PlacedShape{};
  forEachObstacle(world, attach, [&](const PlacedShape& obs) {
    for (std::size_t i = 0; i < spheres.centers.size(); ++i)
      worst = std::max(worst, spherePenetration(spheres.centers[i], spheres.radii[i], obs));
    if (held) worst = std::max(worst, shapePenetration(heldShape, obs));
  });
  return worst;
}

double collisionPenetration(const RobotModel& model, const Configuration& q, const World& world,
                            const AttachmentState& attach) {
  return collisionPenetration(model, forwardKinematics(model, q), world, attach);
}

void collisionResiduals(const RobotModel& model, const FKResult& fk, const World& world,
                        const AttachmentState& attach, double margin, Eigen::Ref<Eigen::VectorXd> out) {
  auto& spheres = scratchSpheres();
  robotSpheres(model, fk, spheres.centers, spheres.radii);
  const std::size_t n = spheres.centers.size();
  if (static_cast<std::size_t>(out.size()) != n + 1) throw InvalidParameter("collision residual size mismatch");
  out.setZero();
  const MovableObject* held = heldObject(world, attach);
  const PlacedShape heldShape = held ? PlacedShape{held->geometry.shape, fk.ee + attach.graspOffset} : PlacedShape{};
  forEachObstacle(world, attach, [&](const PlacedShape& obs) {
    for (std::size_t i = 0; i < n; ++i) {
      const double r = margin - sphereClearance(spheres.centers[i], spheres.radii[i], obs);
      if (r > out[static_cast<Eigen::Index>(i)]) out[static_cast<Eigen::Index>(i)] = r;
    }
    if (held) {
      const double r = margin - shapeClearance(heldShape, obs);
      if (r > out[static_cast<Eigen::Index>(n)]) out[static_cast<Eigen::Index>(n)] = r;
    }
  });
}

double collisionCost(const RobotModel& model, const FKResult& fk, const World& world,
                     const AttachmentState& attach, double margin) {
  thread_local Eigen::VectorXd residuals;
  std::size_t n = model.baseSpheres.size();
  for (const auto& j : model.joints) n += j.spheres.size();
  residuals.resize(static_cast<Eigen::Index>(n + 1));
  collisionResiduals(model, fk, world, attach, margin, residuals);
  return residuals.squaredNorm();
}

double pointClearance(const Vec3& x, const World& world) {
  double best = -std::numeric_limits<double>::infinity();
  bool any = false;
  auto visit = [&](const PlacedShape& s) {
    any = true;
    best = std::max(best, -signedDistance(x, s));
  };
  for (const auto& o : world.obstacles) visit(o.geometry);
  if (world.drawer) visit(world.drawer->currentBody());
  return any ? best : kFreeSpaceClearance;
}

double jointLimitViolation(const RobotModel& model, const Configuration& q) {
  if (q.size() != model.dims()) throw ModelMismatch("configuration dimension does not match the model");
  double worst = 0.0;
  for (std::size_t i = 0; i < model.joints.size(); ++i) {
    const auto& j = model.joints[i];
    worst = std::max({worst, j.lo - q.arm(i), q.arm(i) - j.hi});
  }
  return worst;
}

std::vector<Configuration> interpolate(const Configuration& q1, const Configuration& q2, int steps) {
  if (steps <= 0) throw InvalidResolution("interpolation needs at least one step");
  if (q1.size() != q2.size()) throw ModelMismatch("interpolating configurations of different sizes");
  const Eigen::VectorXd delta = configurationDelta(q1, q2);
  std::vector<Configuration> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.push_back(q1);
  for (int i = 1; i < steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    out.emplace_back(Eigen::VectorXd(q1.values() + t * delta));
  }
  out.push_back(q2);
  return out;
}

bool configurationFeasible(const RobotModel& model, const Configuration& q, const World& world,
                           const AttachmentState& attach) {
  return jointLimitViolation(model, q) <= 0.0 && collisionPenetration(model, q, world, attach) <= 0.0;
}

bool edgeCollisionFree(const RobotModel& model, const Configuration& q1, const Configuration& q2,
                       const World& world, const AttachmentState& attach, int steps) {
  for (const auto& q : interpolate(q1, q2, steps))
    if (!configurationFeasible(model, q, world, attach)) return false;
  return true;
}

}  // namespace rlgp
