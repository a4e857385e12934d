#include "rlgp/geometry.hpp"

#include <algorithm>
#include <limits>
#include <cmath>

namespace rlgp {

double wrapAngle(double a) {
  if (a > -kPi && a <= kPi) return a;
  double r = std::fmod(a + kPi, 2.0 * kPi);
  if (r <= 0.0) r += 2.0 * kPi;
  return r - kPi;
}

namespace {

double boxSignedDistance(const Vec3& p, const Vec3& center, const Vec3& half) {
  const Vec3 q = (p - center).cwiseAbs() - half;
  const double outside = q.cwiseMax(0.0).norm();
  const double inside = std::min(q.maxCoeff(), 0.0);
  return outside + inside;
}

double boxBoxOverlap(const Vec3& ca, const Vec3& ha, const Vec3& cb, const Vec3& hb) {
  double depth = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    const double overlap = std::min(ca[i] + ha[i], cb[i] + hb[i]) - std::max(ca[i] - ha[i], cb[i] - hb[i]);
    if (overlap <= 0.0) return 0.0;
    depth = std::min(depth, overlap);
  }
  return depth;
}

}  // namespace

double signedDistance(const Vec3& p, const PlacedShape& s) {
  if (const auto* box = std::get_if<BoxShape>(&s.shape)) return boxSignedDistance(p, s.position, box->half);
  const auto& sphere = std::get<SphereShape>(s.shape);
  return (p - s.position).norm() - sphere.radius;
}

double sphereClearance(const Vec3& center, double radius, const PlacedShape& s) {
  return signedDistance(center, s) - radius;
}

double spherePenetration(const Vec3& center, double radius, const PlacedShape& s) {
  return std::max(0.0, -sphereClearance(center, radius, s));
}

double shapePenetration(const PlacedShape& a, const PlacedShape& b) {
  if (const auto* sa = std::get_if<SphereShape>(&a.shape)) return spherePenetration(a.position, sa->radius, b);
  if (const auto* sb = std::get_if<SphereShape>(&b.shape)) return spherePenetration(b.position, sb->radius, a);
  return boxBoxOverlap(a.position, std::get<BoxShape>(a.shape).half, b.position, std::get<BoxShape>(b.shape).half);
}

double shapeClearance(const PlacedShape& a, const PlacedShape& b) {
  if (const auto* sa = std::get_if<SphereShape>(&a.shape)) return sphereClearance(a.position, sa->radius, b);
  if (const auto* sb = std::get_if<SphereShape>(&b.shape)) return sphereClearance(b.position, sb->radius, a);
  const Vec3 gap = (a.position - b.position).cwiseAbs() - std::get<BoxShape>(a.shape).half -
                   std::get<BoxShape>(b.shape).half;
  if (gap.maxCoeff() > 0.0) return gap.cwiseMax(0.0).norm();
  return gap.maxCoeff();
}

QuantizedPoint quantize(const Vec3& p, double cell) {
  return {std::llround(p.x() / cell), std::llround(p.y() / cell), std::llround(p.z() / cell)};
}

std::uint64_t hashQuantized(const QuantizedPoint& q) {
  std::uint64_t h = 1469598103934665603ull;
  for (long long v : {q.x, q.y, q.z}) {
    h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

void shapeBounds(const PlacedShape& s, Vec3& lo, Vec3& hi) {
  Vec3 half;
  if (const auto* box = std::get_if<BoxShape>(&s.shape))
    half = box->half;
  else
    half = Vec3::Constant(std::get<SphereShape>(s.shape).radius);
  lo = s.position - half;
  hi = s.position + half;
}

}  // namespace rlgp
