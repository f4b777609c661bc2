#pragma once

#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "tbtsp/model.hpp"

namespace tbtsp {

struct AxisBoundary {
  double p_s{0.0};
  double v_s{0.0};
  double p_e{0.0};
  double v_e{0.0};
};

class AxisLimits {
 public:
  AxisLimits(double v_axis, double a_axis);
  static AxisLimits from(const KinematicLimits& limits) {
    return AxisLimits(limits.v_axis(), limits.a_axis());
  }

  [[nodiscard]] double v_axis() const noexcept { return v_axis_; }
  [[nodiscard]] double a_axis() const noexcept { return a_axis_; }

 private:
  double v_axis_;
  double a_axis_;
};

/// Acceleration templates of the three-phase profile.
///   1: +a, 0, -a with cruise at +v_axis
///   2: +a, -a without cruise
///   3: -a, 0, +a with cruise at -v_axis
///   4: -a, +a without cruise
enum class ProfileCase : int { kCruisePositive = 1, kPeak = 2, kCruiseNegative = 3, kValley = 4 };

/// The case obtained by reflecting p -> -p, v -> -v.
ProfileCase mirrored(ProfileCase c) noexcept;

struct AxisState {
  double p{0.0};
  double v{0.0};
  double a{0.0};
};

/// Three phases of constant acceleration a0, a1 = 0, a2 with durations t1..t3.
/// p1/v1 and p2/v2 are the states at the end of phases 1 and 2. An optional
/// terminal hold keeps the end state (only used when v_e == 0).
struct AxisTrajectory {
  AxisBoundary boundary;
  ProfileCase profile{ProfileCase::kPeak};
  double a0{0.0};
  double a1{0.0};
  double a2{0.0};
  double t1{0.0};
  double t2{0.0};
  double t3{0.0};
  double p1{0.0};
  double v1{0.0};
  double p2{0.0};
  double v2{0.0};
  double hold{0.0};

  [[nodiscard]] double motion_duration() const noexcept { return t1 + t2 + t3; }
  [[nodiscard]] double duration() const noexcept { return t1 + t2 + t3 + hold; }
  /// Closed-form state; t is clamped to [0, duration()].
  [[nodiscard]] AxisState state_at(double t) const noexcept;
  /// State at the end of phase 3 from the chained kinematic equations.
  [[nodiscard]] AxisState end_state() const noexcept;
};

struct PlanarTrajectory {
  AxisTrajectory x_axis;
  AxisTrajectory y_axis;
  double duration{0.0};
};

struct TrajectorySample {
  double t{0.0};
  double x{0.0};
  double y{0.0};
  double vx{0.0};
  double vy{0.0};
  double ax{0.0};
  double ay{0.0};
};

class RetimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Analytic solution of one acceleration template, or nullopt when the
/// template needs a negative phase time, a complex peak velocity, or a
/// velocity beyond v_axis.
std::optional<AxisTrajectory> solve_axis_case(const AxisBoundary& boundary,
                                              const AxisLimits& limits, ProfileCase profile);

/// Minimum-duration feasible template; ties go to the lowest case number.
AxisTrajectory axis_time_optimal(const AxisBoundary& boundary, const AxisLimits& limits);

/// Same value as axis_time_optimal(...).duration() without building the profile.
double axis_min_duration(double distance, double v_s, double v_e, const AxisLimits& limits);

/// Stretches a profile to target_T by bisecting the acceleration magnitude of
/// a template in (0, a_axis]. Throws RetimeError when no template reaches it.
AxisTrajectory retime_axis(const AxisTrajectory& traj, double target_T,
                           const AxisLimits& limits);

/// True when some motion within the axis limits covers `distance` in exactly
/// `duration` with the given boundary velocities.
bool axis_reachable(double distance, double v_s, double v_e, double duration,
                    const AxisLimits& limits);

/// Smallest duration >= `from` for which axis_reachable holds. Reachable
/// durations can have gaps, e.g. returning to the start with a non-zero
/// velocity needs a minimum turnaround time.
double axis_sync_duration(double distance, double v_s, double v_e, double from,
                          const AxisLimits& limits);

/// Axis-split time-optimal planar trajectory. Its duration is the slower
/// axis's minimum time, unless the other axis cannot realize its boundary
/// states in exactly that time; then it is the first later duration both axes
/// share. Axes shorter than the duration are re-timed.
PlanarTrajectory planar_time_optimal(Vec2 start_pos, Vec2 start_vel, Vec2 end_pos, Vec2 end_vel,
                                     const KinematicLimits& limits);

/// Duration of planar_time_optimal without constructing the trajectory.
double planar_min_duration(Vec2 start_pos, Vec2 start_vel, Vec2 end_pos, Vec2 end_vel,
                           const KinematicLimits& limits);

/// Samples at t = 0, dt, 2dt, ... and at the final time.
std::vector<TrajectorySample> sample(const PlanarTrajectory& traj, double dt);

/// CSV with header t,x,y,vx,vy,ax,ay and 9 significant digits.
void write_samples_csv(std::ostream& out, const std::vector<TrajectorySample>& samples);

}  // namespace tbtsp
