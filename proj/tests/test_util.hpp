#pragma once

#include "rlgp/robot_model.hpp"
#include "rlgp/world.hpp"

#include <doctest.h>

#include <random>
#include <string>
#include <vector>

namespace doctest {
template <>
struct StringMaker<std::vector<int>> {
  static String convert(const std::vector<int>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return (s + "]").c_str();
  }
};
}  // namespace doctest

namespace rlgp::testing {

inline PlacedShape box(const Vec3& center, const Vec3& size) { return {BoxShape{0.5 * size}, center}; }

inline PlacedShape sphere(const Vec3& center, double radius) { return {SphereShape{radius}, center}; }

inline World openWorld() {
  World w;
  w.pMin = Vec3(-3, -3, 0.0);
  w.pMax = Vec3(3, 3, 1.5);
  return w;
}

/// One-sphere robot with a single prismatic joint; handy for hand-checked collision values.
inline RobotModel sphereBot(double radius, double height) {
  RobotModel m;
  m.name = "sphere_bot";
  m.baseSpheres = {{Vec3(0, 0, height), radius}};
  m.footprintRadius = radius;
  Joint j;
  j.name = "lift";
  j.kind = JointKind::Prismatic;
  j.axis = Vec3::UnitZ();
  j.lo = 0.0;
  j.hi = 0.5;
  m.joints = {j};
  m.eeLink = 1;
  m.eeOffset = Vec3::Zero();
  m.homeArm = {0.0};
  return m;
}

inline Configuration randomConfiguration(const RobotModel& model, std::mt19937_64& rng, double baseRange = 2.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Configuration q = model.homeConfiguration();
  q.setBase(baseRange * (2 * u(rng) - 1), baseRange * (2 * u(rng) - 1), kPi * (2 * u(rng) - 1));
  for (std::size_t i = 0; i < model.armDims(); ++i) {
    const auto& j = model.joints[i];
    q.setArm(i, j.lo + u(rng) * (j.hi - j.lo));
  }
  return q;
}

}  // namespace rlgp::testing
