#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "support.hpp"
#include "tbtsp/trajectory.hpp"

namespace tbtsp {
namespace {

using testing::grid_search_duration;
using testing::integrate_axis;

const AxisLimits kUnit(1.0, 1.0);

void expect_endpoint(const AxisTrajectory& t, double tol = 1e-6) {
  const AxisState end = t.end_state();
  EXPECT_NEAR(end.p, t.boundary.p_e, tol);
  EXPECT_NEAR(end.v, t.boundary.v_e, tol);
}

void expect_box(const AxisTrajectory& t, const AxisLimits& limits) {
  EXPECT_EQ(t.a1, 0.0);
  EXPECT_GE(t.t1, 0.0);
  EXPECT_GE(t.t2, 0.0);
  EXPECT_GE(t.t3, 0.0);
  const double T = t.duration();
  for (int k = 0; k <= 1000; ++k) {
    const AxisState s = t.state_at(T * k / 1000.0);
    EXPECT_LE(std::abs(s.v), limits.v_axis() + 1e-9);
    EXPECT_LE(std::abs(s.a), limits.a_axis() + 1e-9);
  }
}

TEST(SolveAxisCase, Trapezoid) {
  const auto t = solve_axis_case({0.0, 0.0, 2.0, 0.0}, kUnit, ProfileCase::kCruisePositive);
  ASSERT_TRUE(t.has_value());
  EXPECT_NEAR(t->t1, 1.0, 1e-12);
  EXPECT_NEAR(t->t2, 1.0, 1e-12);
  EXPECT_NEAR(t->t3, 1.0, 1e-12);
  EXPECT_NEAR(t->duration(), 3.0, 1e-12);
  const AxisState end = integrate_axis(*t, 1000);
  EXPECT_NEAR(end.p, 2.0, 1e-6);
  EXPECT_NEAR(end.v, 0.0, 1e-6);
}

TEST(SolveAxisCase, Triangle) {
  const auto t = solve_axis_case({0.0, 0.0, 0.25, 0.0}, kUnit, ProfileCase::kPeak);
  ASSERT_TRUE(t.has_value());
  EXPECT_NEAR(t->t1, 0.5, 1e-12);
  EXPECT_NEAR(t->t3, 0.5, 1e-12);
  EXPECT_NEAR(t->v1, 0.5, 1e-12);
  EXPECT_NEAR(t->duration(), 1.0, 1e-12);
  const AxisState end = integrate_axis(*t, 1000);
  EXPECT_NEAR(end.p, 0.25, 1e-6);
  EXPECT_NEAR(end.v, 0.0, 1e-6);
}

TEST(SolveAxisCase, IdenticalStates) {
  const auto t = solve_axis_case({0.0, 0.0, 0.0, 0.0}, AxisLimits(2.0, 3.0), ProfileCase::kPeak);
  ASSERT_TRUE(t.has_value());
  EXPECT_EQ(t->t1, 0.0);
  EXPECT_EQ(t->t2, 0.0);
  EXPECT_EQ(t->t3, 0.0);
}

TEST(SolveAxisCase, InfeasibleTemplateIsAbsent) {
  // Moving backwards cannot cruise at +v_axis without negative coast time.
  EXPECT_FALSE(
      solve_axis_case({0.0, 0.0, -2.0, 0.0}, kUnit, ProfileCase::kCruisePositive).has_value());
}

TEST(AxisTimeOptimal, PureCoast) {
  const AxisTrajectory t = axis_time_optimal({0.0, 1.0, 1.0, 1.0}, kUnit);
  EXPECT_NEAR(t.duration(), 1.0, 1e-12);
  EXPECT_NEAR(t.t1, 0.0, 1e-12);
  EXPECT_NEAR(t.t3, 0.0, 1e-12);
}

TEST(AxisTimeOptimal, MirrorUsesCaseThree) {
  const AxisTrajectory t = axis_time_optimal({0.0, 0.0, -2.0, 0.0}, kUnit);
  EXPECT_EQ(t.profile, ProfileCase::kCruiseNegative);
  EXPECT_NEAR(t.duration(), 3.0, 1e-12);
}

TEST(AxisTimeOptimal, MatchesGridSearchOnFastBoundary) {
  const AxisTrajectory t = axis_time_optimal({0.0, 0.9, 0.1, 0.9}, kUnit);
  EXPECT_NEAR(t.duration(), grid_search_duration(0.1, 0.9, 0.9, 1.0, 1.0), 1e-9);
  expect_endpoint(t);
}

TEST(AxisTimeOptimal, RandomBoundariesMatchOracle) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> lim(0.2, 3.0);
  for (int k = 0; k < 500; ++k) {
    const AxisLimits limits(lim(rng), lim(rng));
    const AxisBoundary b{unit(rng) * 5.0, unit(rng) * limits.v_axis(), unit(rng) * 5.0,
                         unit(rng) * limits.v_axis()};
    const AxisTrajectory t = axis_time_optimal(b, limits);
    const double oracle =
        grid_search_duration(b.p_e - b.p_s, b.v_s, b.v_e, limits.v_axis(), limits.a_axis());
    ASSERT_NEAR(t.duration(), oracle, 1e-6) << "boundary " << k;
    EXPECT_DOUBLE_EQ(axis_min_duration(b.p_e - b.p_s, b.v_s, b.v_e, limits), t.duration());
    expect_endpoint(t);
    expect_box(t, limits);
  }
}

TEST(AxisTimeOptimal, ChainedPhaseStates) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const AxisBoundary b{0.0, unit(rng), unit(rng) * 4.0, unit(rng)};
    const AxisTrajectory t = axis_time_optimal(b, kUnit);
    EXPECT_NEAR(t.p1, b.p_s + b.v_s * t.t1 + 0.5 * t.a0 * t.t1 * t.t1, 1e-12);
    EXPECT_NEAR(t.v1, b.v_s + t.a0 * t.t1, 1e-12);
    EXPECT_NEAR(t.p2, t.p1 + t.v1 * t.t2, 1e-12);
    EXPECT_NEAR(t.v2, t.v1, 1e-12);
    expect_endpoint(t);
  }
}

TEST(AxisTimeOptimal, ReflectionSymmetry) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    const AxisBoundary b{unit(rng) * 3.0, unit(rng), unit(rng) * 3.0, unit(rng)};
    const AxisBoundary r{-b.p_s, -b.v_s, -b.p_e, -b.v_e};
    const AxisTrajectory tb = axis_time_optimal(b, kUnit);
    const AxisTrajectory tr = axis_time_optimal(r, kUnit);
    EXPECT_NEAR(tb.duration(), tr.duration(), 1e-12);
    const auto mirrored_case = solve_axis_case(r, kUnit, mirrored(tb.profile));
    ASSERT_TRUE(mirrored_case.has_value());
    EXPECT_NEAR(mirrored_case->duration(), tb.duration(), 1e-12);
  }
  EXPECT_EQ(mirrored(ProfileCase::kCruisePositive), ProfileCase::kCruiseNegative);
  EXPECT_EQ(mirrored(ProfileCase::kPeak), ProfileCase::kValley);
}

TEST(AxisTimeOptimal, LargerLimitsNeverSlower) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> grow(1.0, 2.0);
  for (int k = 0; k < 500; ++k) {
    const AxisBoundary b{0.0, unit(rng), unit(rng) * 6.0, unit(rng)};
    const double base = axis_time_optimal(b, kUnit).duration();
    EXPECT_LE(axis_time_optimal(b, AxisLimits(grow(rng), 1.0)).duration(), base + 1e-12);
    EXPECT_LE(axis_time_optimal(b, AxisLimits(1.0, grow(rng))).duration(), base + 1e-12);
  }
}

TEST(RetimeAxis, SameDurationUnchanged) {
  const AxisTrajectory t = axis_time_optimal({0.0, 0.0, 0.25, 0.0}, kUnit);
  const AxisTrajectory r = retime_axis(t, 1.0, kUnit);
  EXPECT_EQ(r.t1, t.t1);
  EXPECT_EQ(r.t2, t.t2);
  EXPECT_EQ(r.t3, t.t3);
  EXPECT_EQ(r.a0, t.a0);
}

TEST(RetimeAxis, TriangleStretchedToThree) {
  const AxisTrajectory t = axis_time_optimal({0.0, 0.0, 0.25, 0.0}, kUnit);
  const AxisTrajectory r = retime_axis(t, 3.0, kUnit);
  EXPECT_NEAR(r.duration(), 3.0, 1e-9);
  EXPECT_LE(std::abs(r.a0), 1.0 + 1e-12);
  const AxisState end = integrate_axis(r, 1000);
  EXPECT_NEAR(end.p, 0.25, 1e-6);
  EXPECT_NEAR(end.v, 0.0, 1e-6);
  expect_box(r, kUnit);
}

TEST(RetimeAxis, HoverAtRest) {
  const AxisTrajectory t = axis_time_optimal({1.0, 0.0, 1.0, 0.0}, kUnit);
  const AxisTrajectory r = retime_axis(t, 5.0, kUnit);
  EXPECT_EQ(r.t1, 0.0);
  EXPECT_EQ(r.t3, 0.0);
  EXPECT_EQ(r.t2, 5.0);
  EXPECT_EQ(r.a0, 0.0);
  EXPECT_EQ(r.a2, 0.0);
  EXPECT_EQ(r.end_state().p, 1.0);
}

TEST(RetimeAxis, ShorterTargetRejected) {
  const AxisTrajectory t = axis_time_optimal({0.0, 0.0, 2.0, 0.0}, kUnit);
  EXPECT_THROW(retime_axis(t, 2.0, kUnit), std::invalid_argument);
}

TEST(RetimeAxis, UnreachableTargetReported) {
  // Returning to the start at 0.9 m/s is possible at T = 0 and only again
  // after turning around twice, so T = 1 has no profile.
  const AxisTrajectory t = axis_time_optimal({0.0, 0.9, 0.0, 0.9}, kUnit);
  EXPECT_THROW(retime_axis(t, 1.0, kUnit), RetimeError);
}

// Reachable displacement at fixed duration, by scanning the coast velocity of
// full-acceleration ramp profiles.
struct Span {
  double lo;
  double hi;
};

Span reachable_span(double vs, double ve, double T, const AxisLimits& limits) {
  const double a = limits.a_axis();
  const double V = limits.v_axis();
  Span s{testing::kInf, -testing::kInf};
  constexpr int kSteps = 200000;
  for (int k = 0; k <= kSteps; ++k) {
    const double vc = -V + 2.0 * V * k / kSteps;
    const double t1 = std::abs(vc - vs) / a;
    const double t3 = std::abs(ve - vc) / a;
    const double t2 = T - t1 - t3;
    if (t2 < 0.0) continue;
    const double d = 0.5 * (vs + vc) * t1 + vc * t2 + 0.5 * (vc + ve) * t3;
    s.lo = std::min(s.lo, d);
    s.hi = std::max(s.hi, d);
  }
  return s;
}

TEST(AxisReachable, AgreesWithCoastScan) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> dur(0.0, 6.0);
  int checked = 0;
  for (int k = 0; k < 300; ++k) {
    const double vs = unit(rng);
    const double ve = unit(rng);
    const double T = dur(rng);
    const Span s = reachable_span(vs, ve, T, kUnit);
    if (!(s.lo <= s.hi)) {
      EXPECT_FALSE(axis_reachable(0.0, vs, ve, T, kUnit));
      continue;
    }
    const double margin = 1e-4;
    EXPECT_TRUE(axis_reachable(0.5 * (s.lo + s.hi), vs, ve, T, kUnit));
    EXPECT_TRUE(axis_reachable(s.lo + margin, vs, ve, T, kUnit));
    EXPECT_TRUE(axis_reachable(s.hi - margin, vs, ve, T, kUnit));
    EXPECT_FALSE(axis_reachable(s.lo - margin, vs, ve, T, kUnit));
    EXPECT_FALSE(axis_reachable(s.hi + margin, vs, ve, T, kUnit));
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(AxisSyncDuration, TurnaroundGap) {
  // Zero net displacement at 0.9 m/s both ends: decelerate, reverse, return.
  const double from = 1.0;
  const double T = axis_sync_duration(0.0, 0.9, 0.9, from, kUnit);
  EXPECT_GT(T, from);
  EXPECT_TRUE(axis_reachable(0.0, 0.9, 0.9, T, kUnit));
  EXPECT_FALSE(axis_reachable(0.0, 0.9, 0.9, T - 1e-6, kUnit));
  const AxisTrajectory base = axis_time_optimal({0.0, 0.9, 0.0, 0.9}, kUnit);
  const AxisTrajectory r = retime_axis(base, T, kUnit);
  EXPECT_NEAR(r.duration(), T, 1e-9);
  expect_endpoint(r);
  expect_box(r, kUnit);
}

TEST(AxisSyncDuration, ReachableStartIsKept) {
  EXPECT_EQ(axis_sync_duration(0.25, 0.0, 0.0, 3.0, kUnit), 3.0);
}

TEST(RetimeAxis, EveryReachableTargetRetimes) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> extra(0.0, 5.0);
  for (int k = 0; k < 500; ++k) {
    const AxisBoundary b{0.0, unit(rng), unit(rng) * 4.0, unit(rng)};
    const AxisTrajectory t = axis_time_optimal(b, kUnit);
    const double target =
        axis_sync_duration(b.p_e, b.v_s, b.v_e, t.duration() + extra(rng), kUnit);
    const AxisTrajectory r = retime_axis(t, target, kUnit);
    EXPECT_NEAR(r.duration(), target, 1e-9);
    expect_endpoint(r);
    expect_box(r, kUnit);
  }
}

TEST(Planar, BothAxesTrapezoid) {
  const KinematicLimits limits(std::sqrt(2.0), std::sqrt(2.0));
  const PlanarTrajectory p = planar_time_optimal({0, 0}, {0, 0}, {2, 2}, {0, 0}, limits);
  EXPECT_NEAR(p.duration, 3.0, 1e-9);
}

TEST(Planar, IdenticalStatesZero) {
  const KinematicLimits limits(2.0, 1.0);
  const PlanarTrajectory p = planar_time_optimal({1, 2}, {0.3, -0.2}, {1, 2}, {0.3, -0.2}, limits);
  EXPECT_NEAR(p.duration, 0.0, 1e-12);
}

TEST(Planar, SlackAxisRetimed) {
  const KinematicLimits limits(std::sqrt(2.0), std::sqrt(2.0));
  const PlanarTrajectory p = planar_time_optimal({0, 0}, {0, 0}, {2, 0.25}, {0, 0}, limits);
  EXPECT_NEAR(p.duration, 3.0, 1e-9);
  EXPECT_NEAR(p.x_axis.duration(), 3.0, 1e-9);
  EXPECT_NEAR(p.y_axis.duration(), 3.0, 1e-9);
  expect_endpoint(p.y_axis);
  EXPECT_NEAR(planar_min_duration({0, 0}, {0, 0}, {2, 0.25}, {0, 0}, limits), 3.0, 1e-9);
}

TEST(Planar, DurationAtLeastSlowerAxisAndConsistent) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const KinematicLimits limits(2.0, 0.5);
  const AxisLimits axis = AxisLimits::from(limits);
  for (int k = 0; k < 300; ++k) {
    const Vec2 p0{0.0, 0.0};
    const Vec2 p1{unit(rng) * 18.0, unit(rng) * 18.0};
    const Vec2 v0{unit(rng) * axis.v_axis(), unit(rng) * axis.v_axis()};
    const Vec2 v1{unit(rng) * axis.v_axis(), unit(rng) * axis.v_axis()};
    const PlanarTrajectory p = planar_time_optimal(p0, v0, p1, v1, limits);
    const double tx = axis_min_duration(p1.x, v0.x, v1.x, axis);
    const double ty = axis_min_duration(p1.y, v0.y, v1.y, axis);
    EXPECT_GE(p.duration, std::max(tx, ty) - 1e-12);
    EXPECT_EQ(p.duration, planar_min_duration(p0, v0, p1, v1, limits));
    EXPECT_NEAR(p.x_axis.duration(), p.duration, 1e-9);
    EXPECT_NEAR(p.y_axis.duration(), p.duration, 1e-9);
    expect_endpoint(p.x_axis);
    expect_endpoint(p.y_axis);
    EXPECT_GE(p.duration, std::hypot(p1.x, p1.y) / limits.v_max() - 1e-6);
  }
}

TEST(Sample, ZeroDuration) {
  const KinematicLimits limits(1.0, 1.0);
  const auto s = sample(planar_time_optimal({0, 0}, {0, 0}, {0, 0}, {0, 0}, limits), 0.1);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].t, 0.0);
}

TEST(Sample, TrapezoidPhaseBoundaries) {
  const KinematicLimits limits(std::sqrt(2.0), std::sqrt(2.0));
  const auto s = sample(planar_time_optimal({0, 0}, {0, 0}, {2, 0}, {0, 0}, limits), 1.0);
  ASSERT_EQ(s.size(), 4u);
  const double expected_v[] = {0.0, 1.0, 1.0, 0.0};
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(s[k].t, double(k), 1e-9);
    EXPECT_NEAR(s[k].vx, expected_v[k], 1e-9);
    EXPECT_NEAR(s[k].y, 0.0, 1e-12);
  }
  EXPECT_NEAR(s.back().x, 2.0, 1e-6);
  EXPECT_THROW(sample(planar_time_optimal({0, 0}, {0, 0}, {2, 0}, {0, 0}, limits), 0.0),
               std::invalid_argument);
}

TEST(Sample, LastSampleAtEndpoint) {
  const KinematicLimits limits(3.0, 0.5);
  const PlanarTrajectory p = planar_time_optimal({0, 0}, {1.0, 0.0}, {9, 18}, {0.0, -1.5}, limits);
  const auto s = sample(p, 0.37);
  EXPECT_NEAR(s.back().t, p.duration, 1e-12);
  EXPECT_NEAR(s.back().x, 9.0, 1e-6);
  EXPECT_NEAR(s.back().y, 18.0, 1e-6);
  EXPECT_NEAR(s.back().vx, 0.0, 1e-6);
  EXPECT_NEAR(s.back().vy, -1.5, 1e-6);
}

TEST(Sample, CsvFormat) {
  const KinematicLimits limits(std::sqrt(2.0), std::sqrt(2.0));
  std::ostringstream out;
  write_samples_csv(out, sample(planar_time_optimal({0, 0}, {0, 0}, {2, 0}, {0, 0}, limits), 1.0));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,x,y,vx,vy,ax,ay");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 4);
}

}  // namespace
}  // namespace tbtsp
