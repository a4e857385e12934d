#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <initializer_list>

namespace rlgp {

/// Whole-body joint vector [x_base, y_base, yaw_base, q_1..q_m].
///
/// Accessors keep the base yaw wrapped to (-pi, pi]. Raw arithmetic on the
/// underlying vector is allowed (the optimizers need it); call `normalized()`
/// before handing a result back to callers.
class Configuration {
 public:
  static constexpr std::size_t kBaseDims = 3;

  Configuration() = default;
  explicit Configuration(std::size_t dims) : v_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dims))) {}
  explicit Configuration(Eigen::VectorXd v) : v_(std::move(v)) { wrapYaw(); }
  Configuration(std::initializer_list<double> values);

  std::size_t size() const { return static_cast<std::size_t>(v_.size()); }
  std::size_t armDims() const { return size() - kBaseDims; }

  double baseX() const { return v_[0]; }
  double baseY() const { return v_[1]; }
  double yaw() const { return v_[2]; }
  double arm(std::size_t i) const { return v_[static_cast<Eigen::Index>(kBaseDims + i)]; }

  void setBase(double x, double y, double yaw);
  void setArm(std::size_t i, double value) { v_[static_cast<Eigen::Index>(kBaseDims + i)] = value; }

  const Eigen::VectorXd& values() const { return v_; }
  Eigen::VectorXd& values() { return v_; }
  double operator[](std::size_t i) const { return v_[static_cast<Eigen::Index>(i)]; }
  double& operator[](std::size_t i) { return v_[static_cast<Eigen::Index>(i)]; }

  Configuration normalized() const { return Configuration(v_); }
  void wrapYaw();

  bool operator==(const Configuration& o) const { return v_.size() == o.v_.size() && v_ == o.v_; }

 private:
  Eigen::VectorXd v_;
};

/// Difference q2 - q1 with the yaw component taken along the shortest arc.
Eigen::VectorXd configurationDelta(const Configuration& q1, const Configuration& q2);

/// Euclidean configuration-space distance using the shortest-arc yaw difference.
double configurationDistance(const Configuration& q1, const Configuration& q2);

}  // namespace rlgp
