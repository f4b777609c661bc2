#include "tbtsp/trajectory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

namespace tbtsp {

namespace {

constexpr double kTimeSlack = 1e-9;
constexpr double kSpeedSlack = 1e-9;
constexpr double kRootSlack = 1e-12;

struct PhaseTimes {
  double a0;
  double v1;
  double t1;
  double t2;
  double t3;

  [[nodiscard]] double total() const noexcept { return t1 + t2 + t3; }
};

bool has_cruise(ProfileCase c) noexcept {
  return c == ProfileCase::kCruisePositive || c == ProfileCase::kCruiseNegative;
}

double leading_sign(ProfileCase c) noexcept {
  return (c == ProfileCase::kCruisePositive || c == ProfileCase::kPeak) ? 1.0 : -1.0;
}

bool clamp_time(double& t) noexcept {
  if (!(t >= -kTimeSlack)) return false;  // also rejects NaN
  if (t < 0.0) t = 0.0;
  return true;
}

// Phase times of one template with acceleration magnitude `accel`. `root`
// selects the sign of the peak velocity for the templates without cruise.
std::optional<PhaseTimes> template_times(double distance, double v_s, double v_e,
                                         double v_axis, double accel, ProfileCase profile,
                                         double root) noexcept {
  const double a0 = leading_sign(profile) * accel;
  const double a2 = -a0;
  PhaseTimes times{a0, 0.0, 0.0, 0.0, 0.0};
  if (has_cruise(profile)) {
    const double v1 = leading_sign(profile) * v_axis;
    const double d1 = (v1 * v1 - v_s * v_s) / (2.0 * a0);
    const double d3 = (v_e * v_e - v1 * v1) / (2.0 * a2);
    times.v1 = v1;
    times.t1 = (v1 - v_s) / a0;
    times.t2 = (distance - d1 - d3) / v1;
    times.t3 = (v_e - v1) / a2;
  } else {
    double q = a0 * distance + 0.5 * (v_s * v_s + v_e * v_e);
    if (q < 0.0) {
      if (q < -kRootSlack) return std::nullopt;
      q = 0.0;
    }
    const double v1 = root * std::sqrt(q);
    if (std::abs(v1) > v_axis + kSpeedSlack) return std::nullopt;
    times.v1 = v1;
    times.t1 = (v1 - v_s) / a0;
    times.t3 = (v_e - v1) / a2;
  }
  if (!clamp_time(times.t1) || !clamp_time(times.t2) || !clamp_time(times.t3)) {
    return std::nullopt;
  }
  return times;
}

// Best root for the templates without cruise; positive root wins ties.
std::optional<PhaseTimes> best_template_times(double distance, double v_s, double v_e,
                                              double v_axis, double accel,
                                              ProfileCase profile) noexcept {
  auto first = template_times(distance, v_s, v_e, v_axis, accel, profile, 1.0);
  if (has_cruise(profile)) return first;
  auto second = template_times(distance, v_s, v_e, v_axis, accel, profile, -1.0);
  if (!first) return second;
  if (second && second->total() < first->total()) return second;
  return first;
}

AxisTrajectory assemble(const AxisBoundary& b, ProfileCase profile, const PhaseTimes& times) {
  AxisTrajectory traj;
  traj.boundary = b;
  traj.profile = profile;
  traj.a0 = times.a0;
  traj.a1 = 0.0;
  traj.a2 = -times.a0;
  traj.t1 = times.t1;
  traj.t2 = times.t2;
  traj.t3 = times.t3;
  traj.p1 = b.p_s + b.v_s * times.t1 + 0.5 * traj.a0 * times.t1 * times.t1;
  traj.v1 = b.v_s + traj.a0 * times.t1;
  traj.p2 = traj.p1 + traj.v1 * times.t2;
  traj.v2 = traj.v1;
  return traj;
}

constexpr std::array<ProfileCase, 4> kCases = {ProfileCase::kCruisePositive, ProfileCase::kPeak,
                                               ProfileCase::kCruiseNegative, ProfileCase::kValley};

struct Template {
  ProfileCase profile;
  double root;

  friend bool operator==(const Template&, const Template&) = default;
};

constexpr std::array<Template, 6> kTemplates = {{{ProfileCase::kCruisePositive, 1.0},
                                                 {ProfileCase::kPeak, 1.0},
                                                 {ProfileCase::kPeak, -1.0},
                                                 {ProfileCase::kCruiseNegative, 1.0},
                                                 {ProfileCase::kValley, 1.0},
                                                 {ProfileCase::kValley, -1.0}}};

// Searches the acceleration magnitude in (0, a_axis] for which `tpl` lasts
// exactly `target`. Scans a log grid from a_axis downwards and bisects the
// first bracket with a sign change.
std::optional<PhaseTimes> stretch_template(const AxisBoundary& b, const AxisLimits& limits,
                                           const Template& tpl, double target) {
  constexpr int kGrid = 200;
  constexpr double kSmallest = 1e-10;
  const double distance = b.p_e - b.p_s;
  const double ratio = std::pow(kSmallest, 1.0 / kGrid);
  const double tol = 1e-12 * std::max(1.0, target);

  auto eval = [&](double accel) {
    return template_times(distance, b.v_s, b.v_e, limits.v_axis(), accel, tpl.profile, tpl.root);
  };

  double hi = limits.a_axis();
  auto hi_times = eval(hi);
  for (int k = 1; k <= kGrid; ++k) {
    const double lo = limits.a_axis() * std::pow(ratio, k);
    auto lo_times = eval(lo);
    if (hi_times && std::abs(hi_times->total() - target) <= tol) return hi_times;
    if (hi_times && lo_times) {
      const double f_hi = hi_times->total() - target;
      const double f_lo = lo_times->total() - target;
      if ((f_hi < 0.0) != (f_lo < 0.0)) {
        double a = lo;
        double b_acc = hi;
        auto ta = lo_times;
        bool ok = true;
        for (int it = 0; it < 200 && b_acc - a > 0.0; ++it) {
          const double mid = 0.5 * (a + b_acc);
          if (mid <= a || mid >= b_acc) break;
          auto tm = eval(mid);
          if (!tm) {
            ok = false;
            break;
          }
          if ((tm->total() - target < 0.0) == (ta->total() - target < 0.0)) {
            a = mid;
            ta = tm;
          } else {
            b_acc = mid;
          }
        }
        if (ok) {
          auto tb = eval(b_acc);
          auto best = ta;
          if (tb && std::abs(tb->total() - target) < std::abs(ta->total() - target)) best = tb;
          if (std::abs(best->total() - target) <= 1e-9 * std::max(1.0, target)) return best;
        }
      }
    }
    hi = lo;
    hi_times = lo_times;
  }
  return std::nullopt;
}

// Displacement of the fixed-duration profile that ramps at full acceleration
// to cruise speed v1, cruises, and ramps to v_e. Non-decreasing in v1.
double ramp_cruise_displacement(double v_s, double v_e, double v1, double accel, double duration) {
  const double t1 = std::abs(v1 - v_s) / accel;
  const double t3 = std::abs(v_e - v1) / accel;
  const double t2 = std::max(0.0, duration - t1 - t3);
  return 0.5 * (v_s + v1) * t1 + v1 * t2 + 0.5 * (v1 + v_e) * t3;
}

// Admissible cruise speeds for a fixed duration. The extreme ones give the
// smallest and largest displacement any admissible motion reaches in it.
struct ReachWindow {
  bool valid{false};
  double v_lo{0.0};
  double v_hi{0.0};
  double p_min{0.0};
  double p_max{0.0};
};

ReachWindow reach_window(double v_s, double v_e, double duration, double accel, double vmax) {
  ReachWindow w;
  if (!(duration >= 0.0) || std::abs(v_e - v_s) > accel * duration + kSpeedSlack) return w;
  w.v_lo = std::max(-vmax, 0.5 * (v_s + v_e - accel * duration));
  w.v_hi = std::min(vmax, 0.5 * (v_s + v_e + accel * duration));
  if (w.v_lo > w.v_hi) {
    w.v_lo = w.v_hi = 0.5 * (w.v_lo + w.v_hi);
  }
  w.p_min = ramp_cruise_displacement(v_s, v_e, w.v_lo, accel, duration);
  w.p_max = ramp_cruise_displacement(v_s, v_e, w.v_hi, accel, duration);
  w.valid = true;
  return w;
}

double reach_tolerance(double distance, double vmax, double duration) {
  return 1e-9 * std::max({1.0, std::abs(distance), vmax * duration});
}

// Fixed-duration profile with full-magnitude ramps and a free cruise speed.
// The admissible cruise speeds form an interval and the displacement is
// monotone in them, so this reaches every duration the axis can realize.
std::optional<AxisTrajectory> fixed_time_profile(const AxisBoundary& b, const AxisLimits& limits,
                                                 double target) {
  const double accel = limits.a_axis();
  const double vmax = limits.v_axis();
  const double distance = b.p_e - b.p_s;
  const ReachWindow w = reach_window(b.v_s, b.v_e, target, accel, vmax);
  const double tol = reach_tolerance(distance, vmax, target);
  if (!w.valid || distance < w.p_min - tol || distance > w.p_max + tol) return std::nullopt;

  auto displacement = [&](double v1) {
    return ramp_cruise_displacement(b.v_s, b.v_e, v1, accel, target);
  };
  double a = w.v_lo;
  double c = w.v_hi;
  for (int it = 0; it < 200 && c - a > 0.0; ++it) {
    const double mid = 0.5 * (a + c);
    if (mid <= a || mid >= c) break;
    if (displacement(mid) < distance) {
      a = mid;
    } else {
      c = mid;
    }
  }
  const double v1 =
      std::abs(displacement(a) - distance) <= std::abs(displacement(c) - distance) ? a : c;
  const double t1 = std::abs(v1 - b.v_s) / accel;
  const double t3 = std::abs(b.v_e - v1) / accel;
  AxisTrajectory traj;
  traj.boundary = b;
  traj.profile = v1 < 0.0 ? ProfileCase::kCruiseNegative : ProfileCase::kCruisePositive;
  traj.a0 = v1 > b.v_s ? accel : (v1 < b.v_s ? -accel : 0.0);
  traj.a1 = 0.0;
  traj.a2 = b.v_e > v1 ? accel : (b.v_e < v1 ? -accel : 0.0);
  traj.t1 = t1;
  traj.t3 = t3;
  traj.t2 = std::max(0.0, target - t1 - t3);
  traj.p1 = b.p_s + b.v_s * t1 + 0.5 * traj.a0 * t1 * t1;
  traj.v1 = v1;
  traj.p2 = traj.p1 + v1 * traj.t2;
  traj.v2 = v1;
  if (std::abs(traj.end_state().p - b.p_e) > 10.0 * tol) return std::nullopt;
  return traj;
}

}  // namespace

AxisLimits::AxisLimits(double v_axis, double a_axis) : v_axis_(v_axis), a_axis_(a_axis) {
  if (!(v_axis > 0.0) || !(a_axis > 0.0)) {
    throw std::invalid_argument("axis limits must be strictly positive");
  }
}

ProfileCase mirrored(ProfileCase c) noexcept {
  switch (c) {
    case ProfileCase::kCruisePositive:
      return ProfileCase::kCruiseNegative;
    case ProfileCase::kPeak:
      return ProfileCase::kValley;
    case ProfileCase::kCruiseNegative:
      return ProfileCase::kCruisePositive;
    case ProfileCase::kValley:
      return ProfileCase::kPeak;
  }
  return c;
}

AxisState AxisTrajectory::state_at(double t) const noexcept {
  t = std::clamp(t, 0.0, duration());
  if (t <= t1) {
    return {boundary.p_s + boundary.v_s * t + 0.5 * a0 * t * t, boundary.v_s + a0 * t, a0};
  }
  if (t <= t1 + t2) {
    const double tau = t - t1;
    return {p1 + v1 * tau, v1, a1};
  }
  if (t <= t1 + t2 + t3) {
    const double tau = t - t1 - t2;
    return {p2 + v2 * tau + 0.5 * a2 * tau * tau, v2 + a2 * tau, a2};
  }
  const AxisState end = end_state();
  return {end.p, end.v, 0.0};
}

AxisState AxisTrajectory::end_state() const noexcept {
  return {p2 + v2 * t3 + 0.5 * a2 * t3 * t3, v2 + a2 * t3, a2};
}

std::optional<AxisTrajectory> solve_axis_case(const AxisBoundary& boundary,
                                              const AxisLimits& limits, ProfileCase profile) {
  const auto times = best_template_times(boundary.p_e - boundary.p_s, boundary.v_s, boundary.v_e,
                                         limits.v_axis(), limits.a_axis(), profile);
  if (!times) return std::nullopt;
  return assemble(boundary, profile, *times);
}

AxisTrajectory axis_time_optimal(const AxisBoundary& boundary, const AxisLimits& limits) {
  std::optional<AxisTrajectory> best;
  for (ProfileCase profile : kCases) {
    auto candidate = solve_axis_case(boundary, limits, profile);
    if (candidate && (!best || candidate->duration() < best->duration())) best = candidate;
  }
  if (!best) {
    throw std::logic_error("no feasible time-optimal profile; boundary velocity beyond axis limit");
  }
  return *best;
}

double axis_min_duration(double distance, double v_s, double v_e, const AxisLimits& limits) {
  double best = std::numeric_limits<double>::infinity();
  for (ProfileCase profile : kCases) {
    auto times = best_template_times(distance, v_s, v_e, limits.v_axis(), limits.a_axis(), profile);
    if (times && times->total() < best) best = times->total();
  }
  if (!std::isfinite(best)) {
    throw std::logic_error("no feasible time-optimal profile; boundary velocity beyond axis limit");
  }
  return best;
}

AxisTrajectory retime_axis(const AxisTrajectory& traj, double target_T, const AxisLimits& limits) {
  const double current = traj.duration();
  if (target_T < current - kTimeSlack) {
    throw std::invalid_argument("re-timing target is shorter than the profile");
  }
  if (std::abs(target_T - current) <= 1e-12 * std::max(1.0, current)) return traj;

  const AxisBoundary& b = traj.boundary;
  if (b.v_s == 0.0 && b.v_e == 0.0 && b.p_s == b.p_e) {
    AxisTrajectory hover;
    hover.boundary = b;
    hover.profile = ProfileCase::kPeak;
    hover.t2 = target_T;
    hover.p1 = hover.p2 = b.p_s;
    return hover;
  }

  std::vector<Template> order;
  const Template own{traj.profile, has_cruise(traj.profile) ? 1.0 : (traj.v1 < 0.0 ? -1.0 : 1.0)};
  order.push_back(own);
  for (const Template& tpl : kTemplates) {
    if (!(tpl == own)) order.push_back(tpl);
  }
  for (const Template& tpl : order) {
    if (auto times = stretch_template(b, limits, tpl, target_T)) {
      return assemble(b, tpl.profile, *times);
    }
  }
  if (auto traj = fixed_time_profile(b, limits, target_T)) return *traj;
  throw RetimeError("no profile reaches the boundary state in the target duration");
}

bool axis_reachable(double distance, double v_s, double v_e, double duration,
                    const AxisLimits& limits) {
  const ReachWindow w = reach_window(v_s, v_e, duration, limits.a_axis(), limits.v_axis());
  const double tol = reach_tolerance(distance, limits.v_axis(), duration);
  return w.valid && distance >= w.p_min - tol && distance <= w.p_max + tol;
}

double axis_sync_duration(double distance, double v_s, double v_e, double from,
                          const AxisLimits& limits) {
  if (axis_reachable(distance, v_s, v_e, from, limits)) return from;
  const double accel = limits.a_axis();
  const double vmax = limits.v_axis();
  const bool overshoot = distance < reach_window(v_s, v_e, from, accel, vmax).p_min;
  // p_min(T) rises while its cruise speed is positive and falls afterwards;
  // p_max(T) mirrors this. Past the turning point the violated bound moves
  // monotonically towards the distance, so bisection finds the first T.
  const double turn = overshoot ? (v_s + v_e) / accel : -(v_s + v_e) / accel;
  const double lo_start = std::max(from, turn);
  auto violated = [&](double duration) {
    const ReachWindow w = reach_window(v_s, v_e, duration, accel, vmax);
    return overshoot ? distance < w.p_min : distance > w.p_max;
  };
  if (!violated(lo_start)) return lo_start;
  double lo = lo_start;
  double step = std::max(1.0, lo_start);
  double hi = lo_start + step;
  while (violated(hi)) {
    lo = hi;
    step *= 2.0;
    hi = lo_start + step;
    if (!std::isfinite(hi)) throw std::logic_error("axis motion never synchronizes");
  }
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (violated(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

namespace {

// Smallest common duration, starting from the slower axis's minimum, at which
// both axes can realize their boundary states.
double common_duration(const AxisBoundary& x, const AxisBoundary& y, double from,
                       const AxisLimits& limits) {
  double duration = from;
  for (int it = 0; it < 64; ++it) {
    const double next = std::max(
        axis_sync_duration(x.p_e - x.p_s, x.v_s, x.v_e, duration, limits),
        axis_sync_duration(y.p_e - y.p_s, y.v_s, y.v_e, duration, limits));
    if (next == duration) return duration;
    duration = next;
  }
  return duration;
}

AxisTrajectory synchronize(const AxisTrajectory& traj, double target, const AxisLimits& limits) {
  try {
    return retime_axis(traj, target, limits);
  } catch (const RetimeError&) {
    if (traj.boundary.v_e != 0.0) throw;
    AxisTrajectory padded = traj;
    padded.hold = target - traj.motion_duration();
    return padded;
  }
}

}  // namespace

PlanarTrajectory planar_time_optimal(Vec2 start_pos, Vec2 start_vel, Vec2 end_pos, Vec2 end_vel,
                                     const KinematicLimits& limits) {
  const AxisLimits axis = AxisLimits::from(limits);
  const AxisBoundary bx{start_pos.x, start_vel.x, end_pos.x, end_vel.x};
  const AxisBoundary by{start_pos.y, start_vel.y, end_pos.y, end_vel.y};
  PlanarTrajectory out;
  out.x_axis = axis_time_optimal(bx, axis);
  out.y_axis = axis_time_optimal(by, axis);
  out.duration = common_duration(bx, by, std::max(out.x_axis.duration(), out.y_axis.duration()),
                                 axis);
  if (out.x_axis.duration() != out.duration) {
    out.x_axis = synchronize(out.x_axis, out.duration, axis);
  }
  if (out.y_axis.duration() != out.duration) {
    out.y_axis = synchronize(out.y_axis, out.duration, axis);
  }
  return out;
}

double planar_min_duration(Vec2 start_pos, Vec2 start_vel, Vec2 end_pos, Vec2 end_vel,
                           const KinematicLimits& limits) {
  const AxisLimits axis = AxisLimits::from(limits);
  const AxisBoundary bx{start_pos.x, start_vel.x, end_pos.x, end_vel.x};
  const AxisBoundary by{start_pos.y, start_vel.y, end_pos.y, end_vel.y};
  const double slowest = std::max(axis_min_duration(bx.p_e - bx.p_s, bx.v_s, bx.v_e, axis),
                                  axis_min_duration(by.p_e - by.p_s, by.v_s, by.v_e, axis));
  return common_duration(bx, by, slowest, axis);
}

std::vector<TrajectorySample> sample(const PlanarTrajectory& traj, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("sampling interval must be positive");
  std::vector<TrajectorySample> samples;
  auto push = [&](double t) {
    const AxisState x = traj.x_axis.state_at(t);
    const AxisState y = traj.y_axis.state_at(t);
    samples.push_back({t, x.p, y.p, x.v, y.v, x.a, y.a});
  };
  const double end_guard = 1e-9 * std::max(1.0, traj.duration);
  for (long k = 0;; ++k) {
    const double t = static_cast<double>(k) * dt;
    if (t >= traj.duration - end_guard) break;
    push(t);
  }
  push(traj.duration);
  return samples;
}

void write_samples_csv(std::ostream& out, const std::vector<TrajectorySample>& samples) {
  out << "t,x,y,vx,vy,ax,ay\n";
  char line[256];
  for (const auto& s : samples) {
    std::snprintf(line, sizeof(line), "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", s.t, s.x, s.y,
                  s.vx, s.vy, s.ax, s.ay);
    out << line;
  }
}

}  // namespace tbtsp
