#include "tbtsp/dubins.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tbtsp {

namespace {

// Arc angles this close to a full turn are treated as zero turns.
constexpr double kFullTurnSnap = 1e-9;

double mod2pi(double angle) noexcept {
  double wrapped = wrap_two_pi(angle);
  if (wrapped > kTwoPi - kFullTurnSnap) wrapped = 0.0;
  return wrapped;
}

enum class Seg { kLeft, kStraight, kRight };

std::array<Seg, 3> segments(DubinsWord word) noexcept {
  switch (word) {
    case DubinsWord::kLSL:
      return {Seg::kLeft, Seg::kStraight, Seg::kLeft};
    case DubinsWord::kRSR:
      return {Seg::kRight, Seg::kStraight, Seg::kRight};
    case DubinsWord::kLSR:
      return {Seg::kLeft, Seg::kStraight, Seg::kRight};
    case DubinsWord::kRSL:
      return {Seg::kRight, Seg::kStraight, Seg::kLeft};
    case DubinsWord::kRLR:
      return {Seg::kRight, Seg::kLeft, Seg::kRight};
    case DubinsWord::kLRL:
      return {Seg::kLeft, Seg::kRight, Seg::kLeft};
  }
  return {};
}

// Normalized problem: start at the origin heading `alpha`, goal at (d, 0)
// heading `beta`, unit turning radius.
std::optional<std::array<double, 3>> word_params(DubinsWord word, double d, double alpha,
                                                 double beta) noexcept {
  const double sa = std::sin(alpha);
  const double sb = std::sin(beta);
  const double ca = std::cos(alpha);
  const double cb = std::cos(beta);
  const double c_ab = std::cos(alpha - beta);
  switch (word) {
    case DubinsWord::kLSL: {
      const double p_sq = 2.0 + d * d - 2.0 * c_ab + 2.0 * d * (sa - sb);
      if (p_sq < -1e-12) return std::nullopt;
      const double tmp = std::atan2(cb - ca, d + sa - sb);
      return std::array{mod2pi(tmp - alpha), std::sqrt(std::max(0.0, p_sq)), mod2pi(beta - tmp)};
    }
    case DubinsWord::kRSR: {
      const double p_sq = 2.0 + d * d - 2.0 * c_ab + 2.0 * d * (sb - sa);
      if (p_sq < -1e-12) return std::nullopt;
      const double tmp = std::atan2(ca - cb, d - sa + sb);
      return std::array{mod2pi(alpha - tmp), std::sqrt(std::max(0.0, p_sq)), mod2pi(tmp - beta)};
    }
    case DubinsWord::kLSR: {
      const double p_sq = -2.0 + d * d + 2.0 * c_ab + 2.0 * d * (sa + sb);
      if (p_sq < -1e-12) return std::nullopt;
      const double p = std::sqrt(std::max(0.0, p_sq));
      const double tmp = std::atan2(-ca - cb, d + sa + sb) - std::atan2(-2.0, p);
      return std::array{mod2pi(tmp - alpha), p, mod2pi(tmp - beta)};
    }
    case DubinsWord::kRSL: {
      const double p_sq = -2.0 + d * d + 2.0 * c_ab - 2.0 * d * (sa + sb);
      if (p_sq < -1e-12) return std::nullopt;
      const double p = std::sqrt(std::max(0.0, p_sq));
      const double tmp = std::atan2(ca + cb, d - sa - sb) - std::atan2(2.0, p);
      return std::array{mod2pi(alpha - tmp), p, mod2pi(beta - tmp)};
    }
    case DubinsWord::kRLR: {
      double tmp = (6.0 - d * d + 2.0 * c_ab + 2.0 * d * (sa - sb)) / 8.0;
      if (std::abs(tmp) > 1.0 + 1e-12) return std::nullopt;
      tmp = std::clamp(tmp, -1.0, 1.0);
      const double p = kTwoPi - std::acos(tmp);  // in [pi, 2*pi]
      const double t = mod2pi(alpha - std::atan2(ca - cb, d - sa + sb) + 0.5 * p);
      return std::array{t, p, mod2pi(alpha - beta - t + p)};
    }
    case DubinsWord::kLRL: {
      double tmp = (6.0 - d * d + 2.0 * c_ab + 2.0 * d * (sb - sa)) / 8.0;
      if (std::abs(tmp) > 1.0 + 1e-12) return std::nullopt;
      tmp = std::clamp(tmp, -1.0, 1.0);
      const double p = kTwoPi - std::acos(tmp);  // in [pi, 2*pi]
      const double t = mod2pi(-alpha - std::atan2(ca - cb, d + sa - sb) + 0.5 * p);
      return std::array{t, p, mod2pi(beta - alpha - t + p)};
    }
  }
  return std::nullopt;
}

Pose advance(const Pose& from, Seg seg, double length, double radius) noexcept {
  switch (seg) {
    case Seg::kStraight:
      return {from.x + length * std::cos(from.psi), from.y + length * std::sin(from.psi),
              from.psi};
    case Seg::kLeft: {
      const double turn = length / radius;
      return {from.x + radius * (std::sin(from.psi + turn) - std::sin(from.psi)),
              from.y - radius * (std::cos(from.psi + turn) - std::cos(from.psi)),
              wrap_two_pi(from.psi + turn)};
    }
    case Seg::kRight: {
      const double turn = length / radius;
      return {from.x - radius * (std::sin(from.psi - turn) - std::sin(from.psi)),
              from.y + radius * (std::cos(from.psi - turn) - std::cos(from.psi)),
              wrap_two_pi(from.psi - turn)};
    }
  }
  return from;
}

}  // namespace

Pose make_pose(double x, double y, double psi) noexcept { return {x, y, wrap_two_pi(psi)}; }

std::string_view to_string(DubinsWord word) noexcept {
  switch (word) {
    case DubinsWord::kLSL:
      return "LSL";
    case DubinsWord::kRSR:
      return "RSR";
    case DubinsWord::kLSR:
      return "LSR";
    case DubinsWord::kRSL:
      return "RSL";
    case DubinsWord::kRLR:
      return "RLR";
    case DubinsWord::kLRL:
      return "LRL";
  }
  return "?";
}

double min_turn_radius(const KinematicLimits& limits) noexcept {
  return limits.v_max() * limits.v_max() / limits.a_max();
}

std::optional<DubinsPath> dubins_word_path(const Pose& a, const Pose& b, double radius,
                                           DubinsWord word) {
  if (!(radius > 0.0)) throw std::invalid_argument("turning radius must be positive");
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double d = std::hypot(dx, dy) / radius;
  const double theta = d > 0.0 ? wrap_two_pi(std::atan2(dy, dx)) : 0.0;
  const double alpha = wrap_two_pi(a.psi - theta);
  const double beta = wrap_two_pi(b.psi - theta);
  auto params = word_params(word, d, alpha, beta);
  if (!params) return std::nullopt;
  DubinsPath path;
  path.word = word;
  path.segment_params = *params;
  path.radius = radius;
  path.length = radius * ((*params)[0] + (*params)[1] + (*params)[2]);
  return path;
}

DubinsPath shortest_dubins(const Pose& a, const Pose& b, double radius) {
  std::optional<DubinsPath> best;
  for (DubinsWord word : kDubinsWords) {
    auto candidate = dubins_word_path(a, b, radius, word);
    if (candidate && (!best || candidate->length < best->length)) best = candidate;
  }
  if (!best) throw std::logic_error("no Dubins word connects the poses");
  return *best;
}

double dubins_cost(const Pose& a, const Pose& b, const KinematicLimits& limits) {
  return shortest_dubins(a, b, min_turn_radius(limits)).length / limits.v_max();
}

Pose dubins_point(const Pose& a, const DubinsPath& path, double distance) noexcept {
  const auto segs = segments(path.word);
  Pose pose = a;
  double remaining = std::max(0.0, distance);
  for (std::size_t i = 0; i < 3; ++i) {
    const double seg_len = path.segment_params[i] * path.radius;
    const double step = std::min(seg_len, remaining);
    pose = advance(pose, segs[i], step, path.radius);
    remaining -= step;
    if (remaining <= 0.0) break;
  }
  return pose;
}

std::vector<TrajectorySample> sample_dubins(const Pose& a, const DubinsPath& path, double speed,
                                            double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("sampling interval must be positive");
  if (!(speed > 0.0)) throw std::invalid_argument("speed must be positive");
  const double duration = path.length / speed;
  std::vector<TrajectorySample> samples;
  auto push = [&](double t) {
    const Pose p = dubins_point(a, path, t * speed);
    samples.push_back({t, p.x, p.y, speed * std::cos(p.psi), speed * std::sin(p.psi), 0.0, 0.0});
  };
  const double end_guard = 1e-9 * std::max(1.0, duration);
  for (long k = 0;; ++k) {
    const double t = static_cast<double>(k) * dt;
    if (t >= duration - end_guard) break;
    push(t);
  }
  push(duration);
  return samples;
}

}  // namespace tbtsp
