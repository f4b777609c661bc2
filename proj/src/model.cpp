#include "tbtsp/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>

#include "json.hpp"

namespace tbtsp {

namespace {

constexpr double kSpeedSlack = 1e-12;

bool strictly_increasing(std::span<const double> values) {
  return std::adjacent_find(values.begin(), values.end(),
                            [](double a, double b) { return !(a < b); }) == values.end();
}

std::string format_g12(double value) {
  if (value == 0.0) value = 0.0;  // drop the sign of -0
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

}  // namespace

KinematicLimits::KinematicLimits(double v_max, double a_max) : v_max_(v_max), a_max_(a_max) {
  if (!(v_max > 0.0) || !std::isfinite(v_max)) {
    throw std::invalid_argument("v_max must be positive and finite");
  }
  if (!(a_max > 0.0) || !std::isfinite(a_max)) {
    throw std::invalid_argument("a_max must be positive and finite");
  }
}

DiscretizationScheme::DiscretizationScheme(std::size_t headings_count,
                                           std::vector<double> speeds)
    : DiscretizationScheme(headings_count, std::move(speeds), {}) {}

DiscretizationScheme::DiscretizationScheme(std::size_t headings_count,
                                           std::vector<double> speeds,
                                           std::vector<double> speed_fractions)
    : speeds_(std::move(speeds)), speed_fractions_(std::move(speed_fractions)) {
  if (headings_count == 0) throw std::invalid_argument("heading set must be non-empty");
  if (speeds_.empty()) throw std::invalid_argument("speed set must be non-empty");
  if (!strictly_increasing(speeds_)) {
    throw std::invalid_argument("speeds must be strictly increasing");
  }
  if (speeds_.front() < 0.0) throw std::invalid_argument("speeds must be non-negative");
  if (!speed_fractions_.empty() && speed_fractions_.size() != speeds_.size()) {
    throw std::invalid_argument("speed fractions and speeds differ in length");
  }
  headings_.reserve(headings_count);
  for (std::size_t i = 0; i < headings_count; ++i) {
    headings_.push_back(kTwoPi * static_cast<double>(i + 1) /
                        static_cast<double>(headings_count));
  }
}

Instance::Instance(std::vector<Waypoint> waypoints, KinematicLimits limits,
                   DiscretizationScheme scheme)
    : waypoints_(std::move(waypoints)), limits_(limits), scheme_(std::move(scheme)) {
  if (waypoints_.size() < 2) throw std::invalid_argument("instance needs at least 2 waypoints");
  for (std::size_t i = 0; i < waypoints_.size(); ++i) {
    if (waypoints_[i].id != static_cast<int>(i) + 1) {
      throw std::invalid_argument("waypoint ids must be contiguous from 1");
    }
    if (!std::isfinite(waypoints_[i].x) || !std::isfinite(waypoints_[i].y)) {
      throw std::invalid_argument("waypoint coordinates must be finite");
    }
  }
  const double cap = limits_.v_axis() * (1.0 + kSpeedSlack);
  if (scheme_.speeds().back() > cap) {
    throw std::invalid_argument("speeds must not exceed v_max/sqrt(2)");
  }
}

Instance make_grid_instance(int rows, int cols, double spacing, KinematicLimits limits,
                            DiscretizationScheme scheme) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("grid needs rows >= 1 and cols >= 1");
  if (!(spacing > 0.0)) throw std::invalid_argument("grid spacing must be positive");
  if (rows * cols < 2) throw std::invalid_argument("grid needs at least 2 waypoints");
  std::vector<Waypoint> waypoints;
  waypoints.reserve(static_cast<std::size_t>(rows * cols));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      waypoints.push_back({r * cols + c + 1, c * spacing, r * spacing});
    }
  }
  return Instance(std::move(waypoints), limits, std::move(scheme));
}

std::vector<double> make_speed_set(std::span<const double> fractions,
                                   const KinematicLimits& limits) {
  if (fractions.empty()) throw std::invalid_argument("speed fractions must be non-empty");
  for (double f : fractions) {
    if (!(f > 0.0 && f <= 1.0)) throw std::invalid_argument("speed fraction outside (0, 1]");
  }
  if (!strictly_increasing(fractions)) {
    throw std::invalid_argument("speed fractions must be strictly increasing");
  }
  std::vector<double> speeds;
  speeds.reserve(fractions.size());
  for (double f : fractions) speeds.push_back(f * limits.v_axis());
  return speeds;
}

DiscretizationScheme make_scheme(std::size_t headings_count,
                                 std::span<const double> speed_fractions,
                                 const KinematicLimits& limits) {
  return DiscretizationScheme(headings_count, make_speed_set(speed_fractions, limits),
                              std::vector<double>(speed_fractions.begin(),
                                                  speed_fractions.end()));
}

Vec2 config_velocity(const Configuration& cfg, const DiscretizationScheme& scheme) {
  const double theta = scheme.headings()[static_cast<std::size_t>(cfg.heading_idx)];
  const double speed = scheme.speeds()[static_cast<std::size_t>(cfg.speed_idx)];
  // Snap the rounding residue of sin/cos at multiples of pi/2 to exact zero.
  auto unit = [](double c) { return std::abs(c) < 1e-12 ? 0.0 : c; };
  return {unit(std::sin(theta)) * speed, unit(std::cos(theta)) * speed};
}

double wrap_two_pi(double angle) noexcept {
  double wrapped = std::fmod(angle, kTwoPi);
  if (wrapped < 0.0) wrapped += kTwoPi;
  if (wrapped >= kTwoPi) wrapped = 0.0;
  return wrapped;
}

double heading_to_psi(double theta) noexcept { return wrap_two_pi(0.5 * kPi - theta); }

std::string instance_to_json(const Instance& instance) {
  nlohmann::json doc;
  doc["waypoints"] = nlohmann::json::array();
  for (const auto& wp : instance.waypoints()) {
    doc["waypoints"].push_back({{"id", wp.id}, {"x", wp.x}, {"y", wp.y}});
  }
  doc["v_max"] = instance.limits().v_max();
  doc["a_max"] = instance.limits().a_max();
  doc["headings_count"] = instance.scheme().heading_count();
  std::vector<double> fractions(instance.scheme().speed_fractions().begin(),
                                instance.scheme().speed_fractions().end());
  if (fractions.empty()) {
    for (double s : instance.scheme().speeds()) fractions.push_back(s / instance.limits().v_axis());
  }
  doc["speed_fractions"] = fractions;
  return doc.dump(2);
}

Instance instance_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
    const KinematicLimits limits(doc.at("v_max").get<double>(), doc.at("a_max").get<double>());
    const auto fractions = doc.at("speed_fractions").get<std::vector<double>>();
    auto scheme = make_scheme(doc.at("headings_count").get<std::size_t>(), fractions, limits);
    std::vector<Waypoint> waypoints;
    for (const auto& item : doc.at("waypoints")) {
      waypoints.push_back(
          {item.at("id").get<int>(), item.at("x").get<double>(), item.at("y").get<double>()});
    }
    std::sort(waypoints.begin(), waypoints.end(),
              [](const Waypoint& a, const Waypoint& b) { return a.id < b.id; });
    return Instance(std::move(waypoints), limits, std::move(scheme));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed instance document: ") + e.what());
  }
}

std::string canonical_serialization(const Instance& instance) {
  std::string out = "{\"a_max\":" + format_g12(instance.limits().a_max());
  out += ",\"headings_count\":" + std::to_string(instance.scheme().heading_count());
  out += ",\"speed_fractions\":[";
  const auto fractions = instance.scheme().speed_fractions();
  const auto speeds = instance.scheme().speeds();
  for (std::size_t i = 0; i < speeds.size(); ++i) {
    if (i > 0) out += ',';
    out += format_g12(fractions.empty() ? speeds[i] / instance.limits().v_axis() : fractions[i]);
  }
  out += "],\"v_max\":" + format_g12(instance.limits().v_max());
  out += ",\"waypoints\":[";
  bool first = true;
  for (const auto& wp : instance.waypoints()) {
    if (!first) out += ',';
    first = false;
    out += "{\"id\":" + std::to_string(wp.id) + ",\"x\":" + format_g12(wp.x) +
           ",\"y\":" + format_g12(wp.y) + "}";
  }
  out += "]}";
  return out;
}

std::uint64_t instance_hash(const Instance& instance) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_serialization(instance)) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace tbtsp
