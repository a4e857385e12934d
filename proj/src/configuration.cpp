#include "rlgp/configuration.hpp"

#include "rlgp/geometry.hpp"

namespace rlgp {

Configuration::Configuration(std::initializer_list<double> values)
    : v_(static_cast<Eigen::Index>(values.size())) {
  Eigen::Index i = 0;
  for (double x : values) v_[i++] = x;
  wrapYaw();
}

void Configuration::setBase(double x, double y, double yaw) {
  v_[0] = x;
  v_[1] = y;
  v_[2] = wrapAngle(yaw);
}

void Configuration::wrapYaw() {
  if (v_.size() > 2) v_[2] = wrapAngle(v_[2]);
}

Eigen::VectorXd configurationDelta(const Configuration& q1, const Configuration& q2) {
  Eigen::VectorXd d = q2.values() - q1.values();
  d[2] = wrapAngle(d[2]);
  return d;
}

double configurationDistance(const Configuration& q1, const Configuration& q2) {
  return configurationDelta(q1, q2).norm();
}

}  // namespace rlgp
