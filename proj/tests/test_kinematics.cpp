#include <doctest.h>

#include "rlgp/errors.hpp"

#include <nlohmann/json.hpp>
#include "rlgp/robot_model.hpp"
#include "rlgp/world.hpp"
#include "test_util.hpp"

#include <cmath>
#include <random>

using namespace rlgp;
using namespace rlgp::testing;

TEST_CASE("bundled model loads and validates") {
  const RobotModel& m = defaultRobotModel();
  CHECK(m.dims() == 8);
  CHECK(m.joints.front().kind == JointKind::Prismatic);
  CHECK(m.joints.front().lo == 0.0);
  CHECK(m.joints.front().hi == doctest::Approx(0.35));
  const RobotModel again = robotModelFromJson(robotModelToJson(m));
  CHECK(again.dims() == m.dims());
  Configuration q = m.homeConfiguration(0.3, -0.2, 1.0);
  CHECK((forwardKinematics(again, q).ee - forwardKinematics(m, q).ee).norm() < 1e-12);
}

TEST_CASE("forward kinematics at zero composes the parent offsets") {
  const RobotModel& m = defaultRobotModel();
  Configuration q(m.dims());
  // Hand composition: lift offset z=0.6, then 0.1 + 0.35 + 0.3 + 0.0 along x, tool 0.14.
  const Vec3 expected(0.1 + 0.35 + 0.3 + 0.14, 0.0, 0.6);
  CHECK((forwardKinematics(m, q).ee - expected).norm() < 1e-12);
}

TEST_CASE("forward kinematics base translation equivariance") {
  const RobotModel& m = defaultRobotModel();
  std::mt19937_64 rng(7);
  for (int i = 0; i < 50; ++i) {
    Configuration q = randomConfiguration(m, rng);
    Configuration shifted = q;
    shifted[0] += 1.0;
    shifted[1] += 2.0;
    const Vec3 d = forwardKinematics(m, shifted).ee - forwardKinematics(m, q).ee;
    CHECK((d - Vec3(1, 2, 0)).norm() < 1e-12);
  }
}

TEST_CASE("forward kinematics base rotation by pi reflects through the base point") {
  const RobotModel& m = defaultRobotModel();
  Configuration q(m.dims());
  q.setBase(0.5, -0.25, 0.0);
  const Vec3 ee0 = forwardKinematics(m, q).ee;
  q.setBase(0.5, -0.25, kPi);
  const Vec3 ee1 = forwardKinematics(m, q).ee;
  CHECK(ee1.x() == doctest::Approx(0.5 - (ee0.x() - 0.5)).epsilon(1e-12));
  CHECK(ee1.y() == doctest::Approx(-0.25 - (ee0.y() + 0.25)).epsilon(1e-12));
  CHECK(ee1.z() == doctest::Approx(ee0.z()));
}

TEST_CASE("forward kinematics rejects a wrong dimension") {
  CHECK_THROWS_AS(forwardKinematics(defaultRobotModel(), Configuration(5)), ModelMismatch);
  CHECK_THROWS_AS(jointLimitViolation(defaultRobotModel(), Configuration(4)), ModelMismatch);
}

TEST_CASE("collision penetration hand-checked values") {
  const RobotModel bot = sphereBot(0.1, 0.5);
  World w = openWorld();
  Configuration q = bot.homeConfiguration();
  CHECK(collisionPenetration(bot, q, w) == 0.0);

  SUBCASE("robot far from obstacles") {
    w.obstacles.push_back({"far", box(Vec3(2, 2, 0.5), Vec3(0.2, 0.2, 0.2))});
    CHECK(collisionPenetration(bot, q, w) == 0.0);
  }
  SUBCASE("sphere centered on a box face") {
    // Box occupies x in [0, 1]; the sphere center (0, 0, 0.5) lies on its -x face.
    w.obstacles.push_back({"half", box(Vec3(0.5, 0, 0.5), Vec3(1, 1, 1))});
    CHECK(collisionPenetration(bot, q, w) == doctest::Approx(0.1).epsilon(1e-12));
  }
  SUBCASE("sphere-sphere pair is symmetric") {
    w.obstacles.push_back({"ball", sphere(Vec3(0.15, 0, 0.5), 0.1)});
    const double pen = collisionPenetration(bot, q, w);
    CHECK(pen == doctest::Approx(0.05).epsilon(1e-12));
    const PlacedShape a = sphere(Vec3(0, 0, 0.5), 0.1), b = sphere(Vec3(0.15, 0, 0.5), 0.1);
    CHECK(shapePenetration(a, b) == shapePenetration(b, a));
  }
}

TEST_CASE("held object overlapping a tray wall registers while the robot is clear") {
  const RobotModel bot = sphereBot(0.05, 0.1);
  World w = openWorld();
  MovableObject obj;
  obj.id = "cup";
  obj.geometry = box(Vec3(5, 5, 0.05), Vec3(0.1, 0.1, 0.1));
  w.movables.push_back(obj);
  // Wall slab x in [0.18, 0.22]; the carried box hangs 0.15 m ahead of the end effector.
  w.obstacles.push_back({"wall", box(Vec3(0.2, 0, 0.5), Vec3(0.04, 1.0, 1.0))});
  Configuration q = bot.homeConfiguration();
  q.setArm(0, 0.4);
  AttachmentState attach;
  attach.heldObject = "cup";
  attach.graspOffset = Vec3(0.15, 0, 0);

  CHECK(collisionPenetration(bot, q, w) == 0.0);
  const double pen = collisionPenetration(bot, q, w, attach);
  // Oracle: carried box spans x in [0.10, 0.20], wall x in [0.18, 0.22] -> overlap 0.02 (y, z overlaps larger).
  CHECK(pen == doctest::Approx(0.02).epsilon(1e-9));
  CHECK(pen > 0.0);
}

TEST_CASE("point clearance conventions") {
  World w = openWorld();
  CHECK(pointClearance(Vec3::Zero(), w) <= -10.0);
  w.obstacles.push_back({"unit", box(Vec3(1, 1, 1), Vec3(1, 1, 1))});
  CHECK(pointClearance(Vec3(1, 1, 1), w) == doctest::Approx(0.5));
  CHECK(pointClearance(Vec3(1.5, 1, 1), w) == doctest::Approx(0.0));
  CHECK(pointClearance(Vec3(2.0, 1, 1), w) == doctest::Approx(-0.5));
}

TEST_CASE("joint limit violation") {
  const RobotModel& m = defaultRobotModel();
  Configuration q(m.dims());
  for (std::size_t i = 0; i < m.armDims(); ++i) q.setArm(i, 0.5 * (m.joints[i].lo + m.joints[i].hi));
  CHECK(jointLimitViolation(m, q) == 0.0);
  q.setArm(2, m.joints[2].hi + 0.2);
  CHECK(jointLimitViolation(m, q) == doctest::Approx(0.2));
  q.setArm(2, 0.0);
  q.setBase(123.0, -55.0, 3.0);
  CHECK(jointLimitViolation(m, q) == 0.0);
}

TEST_CASE("interpolation") {
  const RobotModel& m = defaultRobotModel();
  Configuration a = m.homeConfiguration();

  SUBCASE("degenerate segment") {
    const auto path = interpolate(a, a, 4);
    REQUIRE(path.size() == 5);
    for (const auto& q : path) CHECK(q == a);
  }
  SUBCASE("linear in base x") {
    Configuration b = a;
    b[0] = 1.0;
    const auto path = interpolate(a, b, 4);
    REQUIRE(path.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(path[i].baseX() == doctest::Approx(0.25 * i));
    CHECK(path.front() == a);
    CHECK(path.back() == b);
  }
  SUBCASE("yaw follows the shortest arc") {
    Configuration p = a, r = a;
    p.setBase(0, 0, 3.0);
    r.setBase(0, 0, -3.0);
    const auto path = interpolate(p, r, 2);
    // Oracle: shortest arc from 3 to -3 crosses pi, so the midpoint is pi (mod 2pi), not 0.
    CHECK(std::cos(path[1].yaw()) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(path[1].yaw() > -kPi);
    CHECK(path[1].yaw() <= kPi);
  }
  SUBCASE("zero steps is rejected") { CHECK_THROWS_AS(interpolate(a, a, 0), InvalidResolution); }
}

TEST_CASE("interpolation spacing property") {
  const RobotModel& m = defaultRobotModel();
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    const Configuration a = randomConfiguration(m, rng), b = randomConfiguration(m, rng);
    const auto path = interpolate(a, b, 7);
    CHECK(path.front() == a);
    CHECK(path.back() == b);
    const double first = configurationDistance(path[0], path[1]);
    for (std::size_t i = 1; i + 1 < path.size(); ++i)
      CHECK(configurationDistance(path[i], path[i + 1]) == doctest::Approx(first).epsilon(1e-9));
  }
}

TEST_CASE("edge collision checking") {
  const RobotModel& m = defaultRobotModel();
  World w = openWorld();
  Configuration a = m.homeConfiguration(-1.0, 0.0, 0.0);
  Configuration b = m.homeConfiguration(1.0, 0.0, 0.0);
  CHECK(edgeCollisionFree(m, a, a, w, {}, 3));
  CHECK(edgeCollisionFree(m, a, b, w, {}, 10));

  // A table centered between the two base poses.
  w.obstacles.push_back({"table", box(Vec3(0, 0, 0.225), Vec3(0.6, 0.6, 0.45))});
  CHECK(configurationFeasible(m, a, w));
  CHECK(configurationFeasible(m, b, w));
  const auto mid = interpolate(a, b, 2)[1];
  CHECK(collisionPenetration(m, mid, w) > 0.0);  // oracle: midpoint base sits inside the table
  CHECK_FALSE(edgeCollisionFree(m, a, b, w, {}, 2));
  CHECK_FALSE(edgeCollisionFree(m, a, b, w, {}, 10));
  CHECK(edgeCollisionFree(m, a, a, w, {}, 10) == configurationFeasible(m, a, w));
}

TEST_CASE("collision measures are Lipschitz in the configuration") {
  const RobotModel& m = defaultRobotModel();
  World w = openWorld();
  w.obstacles.push_back({"table", box(Vec3(0, 0, 0.225), Vec3(1.0, 1.0, 0.45))});
  w.obstacles.push_back({"ball", sphere(Vec3(0.6, 0.6, 0.8), 0.2)});
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  // Each coordinate moves every sphere by at most ~1.5 m per unit (arm length); allow slack.
  const double lip = 5.0;
  for (int t = 0; t < 100; ++t) {
    const Configuration q = randomConfiguration(m, rng, 1.0);
    Eigen::VectorXd d(m.dims());
    for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = 1e-4 * n(rng);
    const Configuration q2(Eigen::VectorXd(q.values() + d));
    CHECK(std::abs(collisionPenetration(m, q, w) - collisionPenetration(m, q2, w)) <= lip * d.norm());
    const Vec3 x = forwardKinematics(m, q).ee;
    const Vec3 dx(1e-4 * n(rng), 1e-4 * n(rng), 1e-4 * n(rng));
    CHECK(std::abs(pointClearance(x, w) - pointClearance(x + dx, w)) <= dx.norm() + 1e-12);
  }
}
