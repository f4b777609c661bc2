#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tbtsp {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kInvSqrt2 = 0.70710678118654752440;

struct Vec2 {
  double x{0.0};
  double y{0.0};

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// Planar speed and acceleration magnitude limits of a point-mass vehicle.
///
/// Independently planned x/y axes share these limits through a symmetric
/// 1/sqrt(2) split, so any axis-wise feasible motion is feasible in the plane.
class KinematicLimits {
 public:
  KinematicLimits(double v_max, double a_max);

  [[nodiscard]] double v_max() const noexcept { return v_max_; }
  [[nodiscard]] double a_max() const noexcept { return a_max_; }
  [[nodiscard]] double v_axis() const noexcept { return v_max_ * kInvSqrt2; }
  [[nodiscard]] double a_axis() const noexcept { return a_max_ * kInvSqrt2; }

  friend bool operator==(const KinematicLimits&, const KinematicLimits&) = default;

 private:
  double v_max_;
  double a_max_;
};

struct Waypoint {
  int id{0};      // 1-based, contiguous
  double x{0.0};  // m
  double y{0.0};  // m

  friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

/// Equidistant headings plus an ordered set of traversal speeds.
///
/// Headings follow theta_i = 2*pi*(i+1)/count for zero-based i, so the set
/// lives in (0, 2*pi] and the last entry is exactly 2*pi. A heading theta
/// maps to the velocity direction (sin theta, cos theta).
class DiscretizationScheme {
 public:
  DiscretizationScheme(std::size_t headings_count, std::vector<double> speeds);

  /// Keeps the fractions the speeds were derived from, for serialization.
  DiscretizationScheme(std::size_t headings_count, std::vector<double> speeds,
                       std::vector<double> speed_fractions);

  [[nodiscard]] std::span<const double> headings() const noexcept { return headings_; }
  [[nodiscard]] std::span<const double> speeds() const noexcept { return speeds_; }
  [[nodiscard]] std::span<const double> speed_fractions() const noexcept {
    return speed_fractions_;
  }
  [[nodiscard]] std::size_t heading_count() const noexcept { return headings_.size(); }
  [[nodiscard]] std::size_t speed_count() const noexcept { return speeds_.size(); }
  [[nodiscard]] std::size_t config_count() const noexcept {
    return headings_.size() * speeds_.size();
  }

 private:
  std::vector<double> headings_;
  std::vector<double> speeds_;
  std::vector<double> speed_fractions_;
};

struct Configuration {
  int waypoint{1};
  int heading_idx{0};
  int speed_idx{0};

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

class Instance {
 public:
  Instance(std::vector<Waypoint> waypoints, KinematicLimits limits,
           DiscretizationScheme scheme);

  [[nodiscard]] std::span<const Waypoint> waypoints() const noexcept { return waypoints_; }
  [[nodiscard]] const Waypoint& waypoint(int id) const { return waypoints_.at(id - 1); }
  [[nodiscard]] std::size_t size() const noexcept { return waypoints_.size(); }
  [[nodiscard]] const KinematicLimits& limits() const noexcept { return limits_; }
  [[nodiscard]] const DiscretizationScheme& scheme() const noexcept { return scheme_; }

 private:
  std::vector<Waypoint> waypoints_;
  KinematicLimits limits_;
  DiscretizationScheme scheme_;
};

/// rows*cols waypoints at (c*spacing, r*spacing), ids row-major from 1.
Instance make_grid_instance(int rows, int cols, double spacing, KinematicLimits limits,
                            DiscretizationScheme scheme);

/// fractions * v_max / sqrt(2). Fractions must be strictly increasing in (0, 1].
std::vector<double> make_speed_set(std::span<const double> fractions,
                                   const KinematicLimits& limits);

/// Scheme with equidistant headings and speeds built by make_speed_set.
DiscretizationScheme make_scheme(std::size_t headings_count,
                                 std::span<const double> speed_fractions,
                                 const KinematicLimits& limits);

/// Planar velocity (sin(theta) * v, cos(theta) * v) of a configuration.
Vec2 config_velocity(const Configuration& cfg, const DiscretizationScheme& scheme);

/// Converts a heading theta (from +y, clockwise) to the standard planar
/// orientation psi = pi/2 - theta (from +x, counterclockwise) in [0, 2*pi).
double heading_to_psi(double theta) noexcept;

/// Wraps an angle into [0, 2*pi).
double wrap_two_pi(double angle) noexcept;

// Instance documents: {"waypoints":[{id,x,y}], "v_max", "a_max",
// "headings_count", "speed_fractions":[...]}.
std::string instance_to_json(const Instance& instance);
Instance instance_from_json(const std::string& text);

/// Sorted keys, floats printed with 12 significant digits, no whitespace.
std::string canonical_serialization(const Instance& instance);

/// 64-bit FNV-1a of the canonical serialization.
std::uint64_t instance_hash(const Instance& instance);

}  // namespace tbtsp
