#include "rlgp/scenario.hpp"

#include "rlgp/errors.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace rlgp {

using nlohmann::json;

namespace {

Vec3 vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw FormatError("expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json toJson(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

PlacedShape shapeFromJson(const json& j) {
  PlacedShape s;
  s.position = vec3(j.at("position"));
  const auto kind = j.value("shape", std::string("box"));
  if (kind == "box") {
    s.shape = BoxShape{0.5 * vec3(j.at("size"))};
  } else if (kind == "sphere") {
    s.shape = SphereShape{j.at("radius").get<double>()};
  } else {
    throw FormatError("unknown shape '" + kind + "'");
  }
  return s;
}

void shapeToJson(const PlacedShape& s, json& j) {
  if (const auto* box = std::get_if<BoxShape>(&s.shape)) {
    j["shape"] = "box";
    j["size"] = toJson(2.0 * box->half);
  } else {
    j["shape"] = "sphere";
    j["radius"] = std::get<SphereShape>(s.shape).radius;
  }
  j["position"] = toJson(s.position);
}

Scenario parseScenario(const json& j) {
  if (j.value("format", 0) != 1) throw FormatError("scenario must declare format: 1");
  Scenario s;
  s.kind = j.value("kind", std::string("custom"));
  s.seed = j.value("seed", std::uint64_t{0});
  const auto& robot = j.at("robot");
  s.robotModel = robot.value("model", std::string("hsr_like"));
  const RobotModel model = loadRobotModel(s.robotModel);
  const Vec3 base = vec3(robot.at("base"));
  s.initial = model.homeConfiguration(base.x(), base.y(), base.z());
  if (robot.contains("arm")) {
    const auto arm = robot.at("arm").get<std::vector<double>>();
    if (arm.size() != model.armDims()) throw FormatError("robot.arm has the wrong number of joints");
    for (std::size_t i = 0; i < arm.size(); ++i) s.initial.setArm(i, arm[i]);
  }

  World& w = s.world;
  w.pMin = vec3(j.at("workspace").at("min"));
  w.pMax = vec3(j.at("workspace").at("max"));
  for (const auto& o : j.value("obstacles", json::array()))
    w.obstacles.push_back({o.value("name", std::string("obstacle")), shapeFromJson(o)});
  for (const auto& m : j.value("movables", json::array())) {
    MovableObject obj;
    obj.id = m.at("id").get<std::string>();
    obj.geometry = shapeFromJson(m);
    obj.color = m.value("color", std::string());
    obj.support = m.value("on", std::string("table"));
    obj.contained = m.value("contained", false);
    w.movables.push_back(std::move(obj));
  }
  for (const auto& r : j.value("regions", json::array())) {
    Region reg;
    reg.name = r.at("name").get<std::string>();
    reg.center = vec3(r.at("position"));
    reg.half = 0.5 * vec3(r.at("size"));
    reg.color = r.value("color", std::string());
    reg.slots = r.value("slots", 1);
    w.regions.push_back(std::move(reg));
  }
  if (j.contains("drawer") && !j.at("drawer").is_null()) {
    const auto& d = j.at("drawer");
    Drawer dr;
    dr.body = BoxShape{0.5 * vec3(d.at("size"))};
    dr.bodyClosed = vec3(d.at("position"));
    dr.axis = vec3(d.at("axis")).normalized();
    dr.travelLo = d.at("range")[0].get<double>();
    dr.travelHi = d.at("range")[1].get<double>();
    dr.extension = d.value("extension", dr.travelLo);
    dr.knobClosed = vec3(d.at("knob"));
    w.drawer = dr;
  }
  w.validate();
  s.domain = j.at("domain").get<std::string>();
  s.goal = j.at("goal").get<std::vector<std::string>>();
  return s;
}

}  // namespace

Scenario scenarioFromJson(const json& j) {
  try {
    return parseScenario(j);
  } catch (const json::exception& e) {
    throw FormatError(std::string("scenario: ") + e.what());
  }
}

json scenarioToJson(const Scenario& s) {
  json j;
  j["format"] = 1;
  j["kind"] = s.kind;
  j["seed"] = s.seed;
  std::vector<double> arm;
  for (std::size_t i = 0; i < s.initial.armDims(); ++i) arm.push_back(s.initial.arm(i));
  j["robot"] = {{"model", s.robotModel},
                {"base", json::array({s.initial.baseX(), s.initial.baseY(), s.initial.yaw()})},
                {"arm", arm}};
  j["workspace"] = {{"min", toJson(s.world.pMin)}, {"max", toJson(s.world.pMax)}};
  json obstacles = json::array();
  for (const auto& o : s.world.obstacles) {
    json e{{"name", o.name}};
    shapeToJson(o.geometry, e);
    obstacles.push_back(e);
  }
  j["obstacles"] = obstacles;
  json movables = json::array();
  for (const auto& m : s.world.movables) {
    json e{{"id", m.id}, {"color", m.color}, {"on", m.support}};
    if (m.contained) e["contained"] = true;
    shapeToJson(m.geometry, e);
    movables.push_back(e);
  }
  j["movables"] = movables;
  json regions = json::array();
  for (const auto& r : s.world.regions)
    regions.push_back({{"name", r.name},
                       {"position", toJson(r.center)},
                       {"size", toJson(2.0 * r.half)},
                       {"color", r.color},
                       {"slots", r.slots}});
  j["regions"] = regions;
  if (s.world.drawer) {
    const Drawer& d = *s.world.drawer;
    j["drawer"] = {{"size", toJson(2.0 * d.body.half)},
                   {"position", toJson(d.bodyClosed)},
                   {"axis", toJson(d.axis)},
                   {"range", json::array({d.travelLo, d.travelHi})},
                   {"extension", d.extension},
                   {"knob", toJson(d.knobClosed)}};
  } else {
    j["drawer"] = nullptr;
  }
  j["domain"] = s.domain;
  j["goal"] = s.goal;
  return j;
}

Scenario loadScenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open scenario '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
  return scenarioFromJson(j);
}

void saveScenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write scenario '" + path + "'");
  out << scenarioToJson(s).dump(2) << '\n';
}

}  // namespace rlgp
