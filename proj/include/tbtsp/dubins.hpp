#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "tbtsp/model.hpp"
#include "tbtsp/trajectory.hpp"

namespace tbtsp {

/// Planar pose; psi is measured from +x, counterclockwise, in [0, 2*pi).
struct Pose {
  double x{0.0};
  double y{0.0};
  double psi{0.0};
};

Pose make_pose(double x, double y, double psi) noexcept;

// Declaration order is the tie-break order.
enum class DubinsWord : int { kLSL = 0, kRSR, kLSR, kRSL, kRLR, kLRL };

inline constexpr std::array<DubinsWord, 6> kDubinsWords = {
    DubinsWord::kLSL, DubinsWord::kRSR, DubinsWord::kLSR,
    DubinsWord::kRSL, DubinsWord::kRLR, DubinsWord::kLRL};

std::string_view to_string(DubinsWord word) noexcept;

struct DubinsPath {
  DubinsWord word{DubinsWord::kLSL};
  std::array<double, 3> segment_params{};  // radius-normalized
  double radius{1.0};
  double length{0.0};
};

/// v_max^2 / a_max.
double min_turn_radius(const KinematicLimits& limits) noexcept;

/// One word between two poses, nullopt when the word has no solution.
std::optional<DubinsPath> dubins_word_path(const Pose& a, const Pose& b, double radius,
                                           DubinsWord word);

/// Shortest of the six words.
DubinsPath shortest_dubins(const Pose& a, const Pose& b, double radius);

/// Constant-speed travel time at v_max with the minimum turning radius.
double dubins_cost(const Pose& a, const Pose& b, const KinematicLimits& limits);

/// Pose reached after travelling `distance` metres along the path from `a`.
Pose dubins_point(const Pose& a, const DubinsPath& path, double distance) noexcept;

/// Samples the path at constant speed; accelerations are reported as zero.
std::vector<TrajectorySample> sample_dubins(const Pose& a, const DubinsPath& path, double speed,
                                            double dt);

}  // namespace tbtsp
