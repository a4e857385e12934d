#include "rlgp/trajectory.hpp"

#include "rlgp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

namespace rlgp {

void OptParams::validate() const {
  if (stepsPerPhase < 2) throw InvalidParameter("stepsPerPhase must be >= 2");
  if (smoothnessWeight < 0 || guidanceWeight < 0 || collisionPenaltyWeight < 0)
    throw InvalidParameter("optimizer weights must be non-negative");
  if (smoothnessWeight == 0 && guidanceWeight == 0)
    throw InvalidParameter("smoothness and guidance weights cannot both be zero");
  if (maxIterations < 0) throw InvalidParameter("maxIterations must be >= 0");
  if (verifyResolution < 1) throw InvalidResolution("verification resolution must be >= 1");
  if (collisionMargin < 0 || finiteDifferenceStep <= 0) throw InvalidParameter("bad collision settings");
}

namespace {

World phaseWorld(const World& w, const AttachmentState& attach) {
  return attach.holdingKnob ? w.withoutDrawer() : w;
}

}  // namespace

SwitchResult switchOptimization(const std::vector<KinematicSwitch>& switches, const Configuration& q0,
                                const World& world, const GeometricState& g0, const AttachmentState& a0,
                                const RobotModel& model, const IKParams& ik, const KeyframeSeedFn& seed) {
  SwitchResult out;
  out.keyframes.push_back(q0);
  GeometricState geo = g0;
  AttachmentState attach = a0;
  for (std::size_t k = 0; k < switches.size(); ++k) {
    const KinematicSwitch& sw = switches[k];
    PhaseContext ctx{sw.action, phaseWorld(geo.materialize(world), attach), attach};
    Vec3 target = sw.target;
    if (sw.kind == ActionKind::Place) target = sw.objectAfter - attach.graspOffset;
    // Releasing the knob brings the drawer back into the world, so the release pose must clear it.
    World ikWorld = ctx.world;
    if (sw.kind == ActionKind::OpenDrawer || sw.kind == ActionKind::CloseDrawer) {
      ikWorld = applySwitch(sw, world, geo).materialize(world);
    }
    const Configuration& prev = out.keyframes.back();
    std::optional<Configuration> start = seed ? seed(k, target, prev) : std::optional<Configuration>(prev);
    // Every mode near the seed first (a single restart), then every mode with the full restart budget.
    IKParams local = ik;
    local.restartCount = 1;
    std::optional<Configuration> q;
    for (const IKParams* p : std::initializer_list<const IKParams*>{&local, &ik}) {
      for (const auto& mode : sw.modes) {
        try {
          q = solveConstrainedIK(target, mode, model, ikWorld, attach, *p, start);
          break;
        } catch (const NoSolution&) {
        } catch (const PreconditionRejected&) {
        }
      }
      if (q || ik.restartCount <= 1) break;
    }
    if (!q) {
      out.failedIndex = static_cast<int>(k);
      out.finalState = geo;
      out.finalAttach = attach;
      return out;
    }
    const Vec3 ee = forwardKinematics(model, *q).ee;
    GeometricState next = applySwitch(sw, world, geo);
    switch (sw.kind) {
      case ActionKind::Pick:
        attach.heldObject = world.movables[sw.object].id;
        next.objectPositions[sw.object] = geo.objectPositions[sw.object] + Vec3(0, 0, kPickLift);
        attach.graspOffset = next.objectPositions[sw.object] - ee;
        break;
      case ActionKind::Place:
        next.objectPositions[sw.object] = ee + attach.graspOffset;
        attach.heldObject.reset();
        attach.graspOffset.setZero();
        break;
      case ActionKind::Drop:
        attach.heldObject.reset();
        attach.graspOffset.setZero();
        break;
      case ActionKind::TakeKnob:
        attach.holdingKnob = true;
        break;
      case ActionKind::OpenDrawer:
      case ActionKind::CloseDrawer:
        attach.holdingKnob = false;
        break;
    }
    geo = next;
    out.keyframes.push_back(*q);
    out.phases.push_back(std::move(ctx));
  }
  out.ok = true;
  out.finalState = geo;
  out.finalAttach = attach;
  return out;
}

std::vector<Configuration> Trajectory::flatten() const {
  std::vector<Configuration> out;
  for (const auto& p : phases) out.insert(out.end(), p.configs.begin(), p.configs.end());
  return out;
}

std::size_t Trajectory::rowCount() const {
  std::size_t n = 0;
  for (const auto& p : phases) n += p.configs.size();
  return n;
}

namespace {

// Polyline with yaw unwrapped so plain differences follow the shortest arcs.
std::vector<Eigen::VectorXd> unwrapped(const std::vector<Configuration>& pts) {
  std::vector<Eigen::VectorXd> out;
  for (const auto& p : pts) {
    Eigen::VectorXd v = p.values();
    if (!out.empty()) v[2] = out.back()[2] + wrapAngle(v[2] - out.back()[2]);
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<Eigen::VectorXd> resampleRaw(const std::vector<Eigen::VectorXd>& pts, int count) {
  const int segs = static_cast<int>(pts.size()) - 1;
  const int outSegs = count - 1;
  std::vector<Eigen::VectorXd> out;
  if (segs <= 0) return std::vector<Eigen::VectorXd>(count, pts.front());
  std::vector<double> len(segs);
  for (int i = 0; i < segs; ++i) len[i] = (pts[i + 1] - pts[i]).norm();
  const double total = std::accumulate(len.begin(), len.end(), 0.0);
  if (outSegs >= segs) {
    // Largest-remainder split of the output segments, at least one per input segment.
    std::vector<int> alloc(segs, 1);
    const int extra = outSegs - segs;
    std::vector<double> want(segs), rem(segs);
    int given = 0;
    for (int i = 0; i < segs; ++i) {
      want[i] = total > 0 ? extra * len[i] / total : static_cast<double>(extra) / segs;
      alloc[i] += static_cast<int>(std::floor(want[i]));
      given += static_cast<int>(std::floor(want[i]));
      rem[i] = want[i] - std::floor(want[i]);
    }
    std::vector<int> order(segs);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rem[a] > rem[b]; });
    for (int i = 0; given < extra; ++i, ++given) ++alloc[order[i % segs]];
    out.push_back(pts.front());
    for (int i = 0; i < segs; ++i)
      for (int j = 1; j <= alloc[i]; ++j)
        out.push_back(j == alloc[i] ? pts[i + 1] : Eigen::VectorXd(pts[i] + (pts[i + 1] - pts[i]) * (double(j) / alloc[i])));
    return out;
  }
  // Fewer output segments than corners: uniform arc-length samples.
  out.push_back(pts.front());
  int seg = 0;
  double acc = 0.0;
  for (int j = 1; j < outSegs; ++j) {
    const double s = total * j / outSegs;
    while (seg < segs - 1 && acc + len[seg] < s) acc += len[seg++];
    const double t = len[seg] > 0 ? std::clamp((s - acc) / len[seg], 0.0, 1.0) : 0.0;
    out.push_back(pts[seg] + (pts[seg + 1] - pts[seg]) * t);
  }
  out.push_back(pts.back());
  return out;
}

// Largest per-coordinate move of any sample in one iteration (m or rad).
constexpr double kMaxStep = 0.1;

class PhaseOptimizer {
 public:
  PhaseOptimizer(const RobotModel& model, const PhaseContext& ctx, const OptParams& p, bool useGuide)
      : model_(model), ctx_(ctx), p_(p), useGuide_(useGuide), scratch_(model.dims()) {}

  double collision(const Eigen::VectorXd& q) {
    scratch_.values() = q;
    const FKResult fk = forwardKinematics(model_, scratch_);
    return collisionCost(model_, fk, ctx_.world, ctx_.attach, p_.collisionMargin);
  }

  double objective(const std::vector<Eigen::VectorXd>& q, const std::vector<Eigen::VectorXd>& g) {
    double j = 0;
    for (std::size_t t = 0; t + 1 < q.size(); ++t) {
      j += p_.smoothnessWeight * (q[t + 1] - q[t]).squaredNorm();
      if (p_.collisionPenaltyWeight > 0)
        for (int i = 1; i < p_.verifyResolution; ++i) {
          const double f = double(i) / p_.verifyResolution;
          j += p_.collisionPenaltyWeight * collision((1 - f) * q[t] + f * q[t + 1]);
        }
    }
    for (std::size_t t = 1; t + 1 < q.size(); ++t) {
      if (useGuide_) j += p_.guidanceWeight * (q[t] - g[t]).squaredNorm();
      if (p_.collisionPenaltyWeight > 0) j += p_.collisionPenaltyWeight * collision(q[t]);
    }
    return j;
  }

  // Central-difference gradient of the collision cost; zero where the sample keeps full margin.
  Eigen::VectorXd collisionGradient(const Eigen::VectorXd& q) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(q.size());
    if (collision(q) == 0.0) {
      // Probe once at the step size: a sample right at the margin can still have a slope.
      bool flat = true;
      Eigen::VectorXd x = q;
      for (Eigen::Index i = 0; i < q.size() && flat; ++i) {
        x[i] = q[i] + p_.finiteDifferenceStep;
        flat = collision(x) == 0.0;
        x[i] = q[i] - p_.finiteDifferenceStep;
        flat = flat && collision(x) == 0.0;
        x[i] = q[i];
      }
      if (flat) return grad;
    }
    Eigen::VectorXd x = q;
    const double h = p_.finiteDifferenceStep;
    for (Eigen::Index i = 0; i < q.size(); ++i) {
      x[i] = q[i] + h;
      const double up = collision(x);
      x[i] = q[i] - h;
      const double down = collision(x);
      x[i] = q[i];
      grad[i] = (up - down) / (2 * h);
    }
    return grad;
  }

  std::vector<Eigen::VectorXd> gradient(const std::vector<Eigen::VectorXd>& q, const std::vector<Eigen::VectorXd>& g) {
    const std::size_t n = q.size();
    std::vector<Eigen::VectorXd> grad(n, Eigen::VectorXd::Zero(q[0].size()));
    for (std::size_t t = 1; t + 1 < n; ++t) {
      grad[t] += 2 * p_.smoothnessWeight * (2 * q[t] - q[t - 1] - q[t + 1]);
      if (useGuide_) grad[t] += 2 * p_.guidanceWeight * (q[t] - g[t]);
      if (p_.collisionPenaltyWeight > 0) grad[t] += p_.collisionPenaltyWeight * collisionGradient(q[t]);
    }
    if (p_.collisionPenaltyWeight > 0) {
      for (std::size_t t = 0; t + 1 < n; ++t)
        for (int i = 1; i < p_.verifyResolution; ++i) {
          const double f = double(i) / p_.verifyResolution;
          const Eigen::VectorXd gm = collisionGradient((1 - f) * q[t] + f * q[t + 1]);
          if (gm.isZero(0)) continue;
          if (t >= 1) grad[t] += (1 - f) * p_.collisionPenaltyWeight * gm;
          if (t + 1 <= n - 2) grad[t + 1] += f * p_.collisionPenaltyWeight * gm;
        }
    }
    return grad;
  }

  // Solves (2 ws K + 2 wg I) d = r per dimension over the interior samples (Thomas algorithm).
  void precondition(std::vector<Eigen::VectorXd>& r) const {
    const int m = static_cast<int>(r.size()) - 2;
    if (m <= 0) return;
    const double diag = 4 * p_.smoothnessWeight + (useGuide_ ? 2 * p_.guidanceWeight : 0.0);
    const double off = -2 * p_.smoothnessWeight;
    std::vector<double> c(m);
    std::vector<Eigen::VectorXd> d(m);
    c[0] = off / diag;
    d[0] = r[1] / diag;
    for (int i = 1; i < m; ++i) {
      const double denom = diag - off * c[i - 1];
      c[i] = off / denom;
      d[i] = (r[i + 1] - off * d[i - 1]) / denom;
    }
    for (int i = m - 2; i >= 0; --i) d[i] -= c[i] * d[i + 1];
    for (int i = 0; i < m; ++i) r[i + 1] = d[i];
  }

  void clampLimits(Eigen::VectorXd& q) const {
    for (std::size_t j = 0; j < model_.joints.size(); ++j) {
      const auto idx = static_cast<Eigen::Index>(Configuration::kBaseDims + j);
      q[idx] = std::clamp(q[idx], model_.joints[j].lo, model_.joints[j].hi);
    }
  }

  bool verified(const std::vector<Eigen::VectorXd>& q, const Configuration& first, const Configuration& last) {
    const auto cfgs = toConfigurations(q, first, last);
    for (std::size_t t = 0; t + 1 < cfgs.size(); ++t)
      if (!edgeCollisionFree(model_, cfgs[t], cfgs[t + 1], ctx_.world, ctx_.attach, p_.verifyResolution))
        return false;
    return true;
  }

  static std::vector<Configuration> toConfigurations(const std::vector<Eigen::VectorXd>& q, const Configuration& first,
                                                     const Configuration& last) {
    std::vector<Configuration> out;
    out.reserve(q.size());
    out.push_back(first);
    for (std::size_t t = 1; t + 1 < q.size(); ++t) out.emplace_back(q[t]);
    out.push_back(last);
    return out;
  }

 private:
  const RobotModel& model_;
  const PhaseContext& ctx_;
  const OptParams& p_;
  bool useGuide_;
  Configuration scratch_;
};

}  // namespace

std::vector<Configuration> resamplePolyline(const std::vector<Configuration>& pts, int count) {
  if (pts.empty() || count < 2) throw InvalidParameter("resampling needs points and count >= 2");
  std::vector<Configuration> out;
  for (auto& v : resampleRaw(unwrapped(pts), count)) {
    Configuration c(pts.front().size());
    c.values() = v;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<Configuration> anchorGuidance(const std::vector<Configuration>& guidance, const Configuration& first,
                                          const Configuration& last) {
  if (guidance.empty()) return {};
  auto closest = [&](const Configuration& q, std::size_t from) {
    std::size_t best = from;
    for (std::size_t i = from; i < guidance.size(); ++i)
      if (configurationDistance(guidance[i], q) < configurationDistance(guidance[best], q)) best = i;
    return best;
  };
  const std::size_t lo = closest(first, 0);
  const std::size_t hi = closest(last, lo);
  if (hi <= lo + 1) return {};
  return std::vector<Configuration>(guidance.begin() + lo + 1, guidance.begin() + hi);
}

double phaseObjective(const std::vector<Configuration>& configs, const std::vector<Configuration>& guide,
                      const PhaseContext& ctx, const RobotModel& model, const OptParams& params, bool useGuidance) {
  PhaseOptimizer opt(model, ctx, params, useGuidance);
  const auto q = unwrapped(configs);
  std::vector<Eigen::VectorXd> g;
  for (const auto& c : guide) g.push_back(c.values());
  if (g.size() != q.size()) g = q;
  return opt.objective(q, g);
}

PathResult pathOptimization(const std::vector<Configuration>& keyframes,
                            const std::vector<std::vector<Configuration>>& guidance,
                            const std::vector<PhaseContext>& phases, const RobotModel& model,
                            const OptParams& params) {
  params.validate();
  if (keyframes.size() != phases.size() + 1 || guidance.size() != phases.size())
    throw InvalidParameter("need one guidance sequence and one context per phase");
  PathResult result;
  const int S = params.stepsPerPhase;
  for (std::size_t k = 0; k < phases.size(); ++k) {
    const Configuration& a = keyframes[k];
    const Configuration& b = keyframes[k + 1];
    const bool useGuide = !guidance[k].empty() && params.guidanceWeight > 0;
    TrajectoryPhase phase;
    phase.action = phases[k].action;
    phase.context = phases[k];
    if (configurationDistance(a, b) == 0.0 && guidance[k].empty()) {
      phase.configs.assign(S + 1, a);
      if (!configurationFeasible(model, a, phases[k].world, phases[k].attach)) {
        result.failedPhase = static_cast<int>(k);
        return result;
      }
      result.trajectory.phases.push_back(std::move(phase));
      continue;
    }
    std::vector<Configuration> poly{a};
    poly.insert(poly.end(), guidance[k].begin(), guidance[k].end());
    poly.push_back(b);
    const std::vector<Eigen::VectorXd> g = resampleRaw(unwrapped(poly), S + 1);
    std::vector<Eigen::VectorXd> q = useGuide ? g : resampleRaw(unwrapped({a, b}), S + 1);

    PhaseOptimizer opt(model, phases[k], params, useGuide);
    double j = opt.objective(q, g);
    const double j0 = j;
    double bestJ = std::numeric_limits<double>::infinity();
    std::vector<Eigen::VectorXd> best;
    if (opt.verified(q, a, b)) {
      bestJ = j;
      best = q;
    }
    for (int it = 0; it < params.maxIterations; ++it) {
      auto dir = opt.gradient(q, g);
      opt.precondition(dir);
      double largest = 0.0;
      for (const auto& d : dir) largest = std::max(largest, d.cwiseAbs().maxCoeff());
      double step = largest > kMaxStep ? kMaxStep / largest : 1.0;
      bool improved = false;
      std::vector<Eigen::VectorXd> trial = q;
      for (int ls = 0; ls < 12; ++ls, step *= 0.5) {
        for (std::size_t t = 1; t + 1 < q.size(); ++t) {
          trial[t] = q[t] - step * dir[t];
          opt.clampLimits(trial[t]);
        }
        const double jt = opt.objective(trial, g);
        if (jt < j) {
          improved = jt < j - 1e-9 * (1 + std::abs(j));
          q.swap(trial);
          j = jt;
          break;
        }
      }
      if (j < bestJ && opt.verified(q, a, b)) {
        bestJ = j;
        best = q;
      }
      if (!improved) break;
    }
    if (best.empty()) {
      result.failedPhase = static_cast<int>(k);
      return result;
    }
    phase.configs = PhaseOptimizer::toConfigurations(best, a, b);
    result.trajectory.objective += bestJ;
    result.trajectory.initialObjective += j0;
    result.trajectory.phases.push_back(std::move(phase));
  }
  result.ok = true;
  return result;
}

bool verifyTrajectory(const Trajectory& traj, const RobotModel& model, int resolution) {
  for (std::size_t k = 0; k < traj.phases.size(); ++k) {
    const auto& p = traj.phases[k];
    if (p.configs.empty()) return false;
    if (k > 0 && !(traj.phases[k - 1].configs.back() == p.configs.front())) return false;
    for (const auto& q : p.configs)
      if (q.size() != model.dims()) return false;
    if (p.configs.size() == 1 &&
        !configurationFeasible(model, p.configs.front(), p.context.world, p.context.attach))
      return false;
    for (std::size_t t = 0; t + 1 < p.configs.size(); ++t)
      if (!edgeCollisionFree(model, p.configs[t], p.configs[t + 1], p.context.world, p.context.attach, resolution))
        return false;
  }
  return true;
}

double basePathLength(const std::vector<Configuration>& configs) {
  double len = 0.0;
  for (std::size_t t = 0; t + 1 < configs.size(); ++t)
    len += std::hypot(configs[t + 1].baseX() - configs[t].baseX(), configs[t + 1].baseY() - configs[t].baseY());
  return len;
}

double basePathLength(const Trajectory& traj) { return basePathLength(traj.flatten()); }

void dumpTrajectory(const Trajectory& traj, std::ostream& out) {
  char buf[64];
  out << "# rlgp-trajectory 1\n# <phase> <step> <action> <q...>\n";
  for (std::size_t k = 0; k < traj.phases.size(); ++k) {
    const auto& p = traj.phases[k];
    for (std::size_t t = 0; t < p.configs.size(); ++t) {
      out << k << ' ' << t << ' ' << p.action;
      for (std::size_t i = 0; i < p.configs[t].size(); ++i) {
        std::snprintf(buf, sizeof buf, " %.9g", p.configs[t][i]);
        out << buf;
      }
      out << '\n';
    }
  }
}

}  // namespace rlgp
