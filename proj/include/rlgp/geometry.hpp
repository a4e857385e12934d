#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <compare>
#include <cstdint>
#include <variant>

namespace rlgp {

using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;

/// Wraps an angle to (-pi, pi].
double wrapAngle(double a);

struct BoxShape {
  Vec3 half = Vec3::Constant(0.5);
};

struct SphereShape {
  double radius = 0.5;
};

using Shape = std::variant<BoxShape, SphereShape>;

/// A shape placed at a world position. Boxes are axis-aligned.
struct PlacedShape {
  Shape shape;
  Vec3 position = Vec3::Zero();
};

/// Signed distance from a point to the surface: negative inside, positive outside.
double signedDistance(const Vec3& p, const PlacedShape& s);

/// Penetration depth of a sphere into a placed shape; 0 when separated or touching.
double spherePenetration(const Vec3& center, double radius, const PlacedShape& s);

/// Signed separation between a sphere surface and a placed shape (negative = penetrating).
double sphereClearance(const Vec3& center, double radius, const PlacedShape& s);

/// Signed separation between two placed shapes (negative = overlap depth).
double shapeClearance(const PlacedShape& a, const PlacedShape& b);

/// Penetration depth between two placed shapes; 0 iff they do not overlap.
double shapePenetration(const PlacedShape& a, const PlacedShape& b);

/// Integer grid coordinates of a point (default 1 mm cells); used as exact lookup keys.
struct QuantizedPoint {
  long long x = 0, y = 0, z = 0;
  auto operator<=>(const QuantizedPoint&) const = default;
};

QuantizedPoint quantize(const Vec3& p, double cell = 1e-3);
std::uint64_t hashQuantized(const QuantizedPoint& q);

/// Axis-aligned bounds of a placed shape.
void shapeBounds(const PlacedShape& s, Vec3& lo, Vec3& hi);

}  // namespace rlgp
