#include "rlgp/robot_model.hpp"

#include "rlgp/builtin_models.hpp"
#include "rlgp/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>

namespace rlgp {

using nlohmann::json;

namespace {

Vec3 vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw FormatError("expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json toJson(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

std::vector<LinkSphere> spheresFromJson(const json& j) {
  std::vector<LinkSphere> out;
  for (const auto& s : j) out.push_back({vec3(s.at("center")), s.at("radius").get<double>()});
  return out;
}

json spheresToJson(const std::vector<LinkSphere>& spheres) {
  json arr = json::array();
  for (const auto& s : spheres) arr.push_back({{"center", toJson(s.center)}, {"radius", s.radius}});
  return arr;
}

Eigen::Isometry3d offsetFromJson(const json& j) {
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.translation() = vec3(j.at("xyz"));
  const Vec3 rpy = j.contains("rpy") ? vec3(j.at("rpy")) : Vec3::Zero();
  t.linear() = (Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) * Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
                Eigen::AngleAxisd(rpy.x(), Vec3::UnitX()))
                   .toRotationMatrix();
  return t;
}

json offsetToJson(const Eigen::Isometry3d& t) {
  const Vec3 ypr = t.linear().eulerAngles(2, 1, 0);
  return {{"xyz", toJson(t.translation())}, {"rpy", json::array({ypr[2], ypr[1], ypr[0]})}};
}

}  // namespace

void RobotModel::validate() const {
  if (joints.empty()) throw InvalidParameter("robot model has no joints");
  if (eeLink > joints.size()) throw InvalidParameter("end-effector link index out of range");
  if (homeArm.size() != joints.size()) throw InvalidParameter("home posture has the wrong size");
  auto checkSpheres = [](const std::vector<LinkSphere>& spheres) {
    for (const auto& s : spheres)
      if (!(s.radius > 0.0)) throw InvalidParameter("collision sphere radius must be positive");
  };
  checkSpheres(baseSpheres);
  for (const auto& jnt : joints) {
    if (!(jnt.lo < jnt.hi)) throw InvalidParameter("joint " + jnt.name + " has lo >= hi");
    if (std::abs(jnt.axis.norm() - 1.0) > 1e-9) throw InvalidParameter("joint " + jnt.name + " axis is not unit");
    checkSpheres(jnt.spheres);
  }
}

Configuration RobotModel::homeConfiguration(double x, double y, double yaw) const {
  Configuration q(dims());
  q.setBase(x, y, yaw);
  for (std::size_t i = 0; i < homeArm.size(); ++i) q.setArm(i, homeArm[i]);
  return q;
}

double RobotModel::armReach() const {
  double reach = eeOffset.norm();
  for (std::size_t i = 1; i < joints.size(); ++i) reach += joints[i].parentOffset.translation().norm();
  for (std::size_t i = 1; i < joints.size(); ++i)
    if (joints[i].kind == JointKind::Prismatic) reach += std::max(std::abs(joints[i].lo), std::abs(joints[i].hi));
  return reach;
}

double RobotModel::maxReachHeight() const {
  double h = 0.0;
  for (const auto& jnt : joints) {
    h += jnt.parentOffset.translation().norm();
    if (jnt.kind == JointKind::Prismatic) h += std::max(std::abs(jnt.lo), std::abs(jnt.hi));
  }
  return h + eeOffset.norm();
}

RobotModel robotModelFromJson(const json& j) {
  if (j.value("format", 0) != 1) throw FormatError("robot model must declare format: 1");
  RobotModel m;
  m.name = j.value("name", "robot");
  const auto& base = j.at("base");
  m.footprintRadius = base.value("footprint_radius", 0.25);
  m.baseSpheres = spheresFromJson(base.at("spheres"));
  for (const auto& jj : j.at("joints")) {
    Joint jnt;
    jnt.name = jj.at("name").get<std::string>();
    const auto kind = jj.at("kind").get<std::string>();
    if (kind == "revolute")
      jnt.kind = JointKind::Revolute;
    else if (kind == "prismatic")
      jnt.kind = JointKind::Prismatic;
    else
      throw FormatError("unknown joint kind '" + kind + "'");
    jnt.axis = vec3(jj.at("axis"));
    jnt.parentOffset = offsetFromJson(jj.at("offset"));
    jnt.lo = jj.at("limits")[0].get<double>();
    jnt.hi = jj.at("limits")[1].get<double>();
    if (jj.contains("spheres")) jnt.spheres = spheresFromJson(jj.at("spheres"));
    m.joints.push_back(std::move(jnt));
  }
  const auto& ee = j.at("end_effector");
  m.eeLink = ee.at("link").get<std::size_t>();
  m.eeOffset = vec3(ee.at("offset"));
  m.approachAxis = ee.contains("approach_axis") ? vec3(ee.at("approach_axis")) : Vec3::UnitX();
  m.homeArm = j.at("home").get<std::vector<double>>();
  m.validate();
  return m;
}

json robotModelToJson(const RobotModel& m) {
  json joints = json::array();
  for (const auto& jnt : m.joints) {
    joints.push_back({{"name", jnt.name},
                      {"kind", jnt.kind == JointKind::Revolute ? "revolute" : "prismatic"},
                      {"axis", toJson(jnt.axis)},
                      {"offset", offsetToJson(jnt.parentOffset)},
                      {"limits", json::array({jnt.lo, jnt.hi})},
                      {"spheres", spheresToJson(jnt.spheres)}});
  }
  return {{"format", 1},
          {"name", m.name},
          {"base", {{"footprint_radius", m.footprintRadius}, {"spheres", spheresToJson(m.baseSpheres)}}},
          {"joints", joints},
          {"end_effector", {{"link", m.eeLink}, {"offset", toJson(m.eeOffset)}, {"approach_axis", toJson(m.approachAxis)}}},
          {"home", m.homeArm}};
}

const RobotModel& defaultRobotModel() {
  static const RobotModel model = robotModelFromJson(json::parse(builtin::kHsrLikeModel));
  return model;
}

RobotModel loadRobotModel(const std::string& nameOrPath) {
  if (nameOrPath.empty() || nameOrPath == "hsr_like") return defaultRobotModel();
  std::ifstream in(nameOrPath);
  if (!in) throw FormatError("cannot open robot model '" + nameOrPath + "'");
  return robotModelFromJson(json::parse(in));
}

FKResult forwardKinematics(const RobotModel& model, const Configuration& q) {
  if (q.size() != model.dims())
    throw ModelMismatch("configuration has " + std::to_string(q.size()) + " values, model expects " +
                        std::to_string(model.dims()));
  FKResult out;
  out.linkFrames.reserve(model.joints.size() + 1);
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.translation() = Vec3(q.baseX(), q.baseY(), 0.0);
  t.linear() = Eigen::AngleAxisd(q.yaw(), Vec3::UnitZ()).toRotationMatrix();
  out.linkFrames.push_back(t);
  for (std::size_t i = 0; i < model.joints.size(); ++i) {
    const Joint& jnt = model.joints[i];
    t = t * jnt.parentOffset;
    if (jnt.kind == JointKind::Revolute)
      t.linear() = t.linear() * Eigen::AngleAxisd(q.arm(i), jnt.axis).toRotationMatrix();
    else
      t.translation() += t.linear() * (jnt.axis * q.arm(i));
    out.linkFrames.push_back(t);
  }
  out.ee = out.linkFrames[model.eeLink] * model.eeOffset;
  return out;
}

void robotSpheres(const RobotModel& model, const FKResult& fk, std::vector<Vec3>& centers,
                  std::vector<double>& radii) {
  centers.clear();
  radii.clear();
  for (const auto& s : model.baseSpheres) {
    centers.push_back(fk.linkFrames[0] * s.center);
    radii.push_back(s.radius);
  }
  for (std::size_t i = 0; i < model.joints.size(); ++i) {
    for (const auto& s : model.joints[i].spheres) {
      centers.push_back(fk.linkFrames[i + 1] * s.center);
      radii.push_back(s.radius);
    }
  }
}

}  // namespace rlgp
