#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "tbtsp/milp.hpp"
#include "tbtsp/solver.hpp"

namespace tbtsp {
namespace {

TEST(BuildMilp, CountsForThreeWaypoints) {
  std::mt19937_64 rng(1);
  const MilpModel m = build_milp(testing::random_tensor(rng, 3, 1, 1));
  EXPECT_EQ(m.binaries.size(), 6u);
  EXPECT_EQ(m.generals.size(), 2u);
  EXPECT_EQ(m.assignment_rows, 6u);
  EXPECT_EQ(m.flow_rows, 3u);
  EXPECT_EQ(m.subtour_rows, 2u);
  EXPECT_EQ(m.constraints.size(), 11u);
  EXPECT_EQ(m.objective.size(), 6u);
}

TEST(BuildMilp, ClosedFormCounts) {
  std::mt19937_64 rng(2);
  for (std::size_t n : {2u, 4u, 5u}) {
    for (auto [h, s] : {std::pair<std::size_t, std::size_t>{2, 1}, {2, 3}}) {
      const MilpModel m = build_milp(testing::random_tensor(rng, n, h, s));
      const std::size_t c = h * s;
      EXPECT_EQ(m.binaries.size(), n * (n - 1) * c * c);
      EXPECT_EQ(m.generals.size(), n - 1);
      EXPECT_EQ(m.assignment_rows, 2 * n);
      EXPECT_EQ(m.flow_rows, n * c);
      EXPECT_EQ(m.subtour_rows, (n - 1) * (n - 2));
    }
  }
}

TEST(BuildMilp, TwoWaypointsHaveNoSubtourRowsAndStaySolvable) {
  std::mt19937_64 rng(3);
  const CostTensor t = testing::random_tensor(rng, 2, 2, 1);
  const MilpModel m = build_milp(t);
  EXPECT_EQ(m.subtour_rows, 0u);
  const TourSolution sol = solve_exact(t);
  const ModelCheck check = evaluate_model(m, encode_solution(t, sol));
  EXPECT_TRUE(check.feasible) << check.first_violation;
  EXPECT_NEAR(check.objective, sol.total_time, 1e-9);
}

TEST(WriteLp, SectionsAndRoundtrip) {
  std::mt19937_64 rng(4);
  const CostTensor t = testing::random_tensor(rng, 4, 2, 2);
  const std::string text = export_milp(t);
  for (const char* section : {"Minimize", "Subject To", "Bounds", "Binaries", "Generals", "End"}) {
    EXPECT_NE(text.find(section), std::string::npos) << section;
  }
  const MilpModel direct = build_milp(t);
  const MilpModel parsed = parse_lp(text);
  EXPECT_EQ(parsed.constraints.size(), direct.constraints.size());
  EXPECT_EQ(parsed.binaries, direct.binaries);
  EXPECT_EQ(parsed.generals, direct.generals);
  ASSERT_EQ(parsed.objective.size(), direct.objective.size());
  for (std::size_t k = 0; k < direct.objective.size(); ++k) {
    EXPECT_EQ(parsed.objective[k].var, direct.objective[k].var);
    EXPECT_EQ(parsed.objective[k].coef, direct.objective[k].coef);
  }
  const TourSolution sol = solve_exact(t);
  const ModelCheck check = evaluate_model(parsed, encode_solution(t, sol));
  EXPECT_TRUE(check.feasible) << check.first_violation;
  EXPECT_NEAR(check.objective, sol.total_time, 1e-9 * sol.total_time);
}

TEST(EvaluateModel, RejectsBrokenAssignment) {
  std::mt19937_64 rng(5);
  const CostTensor t = testing::random_tensor(rng, 4, 1, 1);
  const MilpModel m = build_milp(t);
  Assignment a = encode_solution(t, solve_exact(t));
  a.values[u_name(1)] = 2.0;
  EXPECT_FALSE(evaluate_model(m, a).feasible);
}

TEST(EvaluateModel, OptimaOfRandomTensorsAreFeasible) {
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 2 + rep % 3;
    const CostTensor t = testing::random_tensor(rng, n, 1 + rep % 2, 1 + rep % 3);
    const TourSolution sol = solve_exact(t);
    const ModelCheck check = evaluate_model(parse_lp(export_milp(t)), encode_solution(t, sol));
    EXPECT_TRUE(check.feasible) << check.first_violation;
    EXPECT_NEAR(check.objective, sol.total_time, 1e-9 * sol.total_time);
    EXPECT_TRUE(validate_solution(t, sol).ok);
  }
}

TEST(ValidateSolution, DegreeViolation) {
  std::mt19937_64 rng(7);
  const CostTensor t = testing::random_tensor(rng, 3, 1, 1);
  TourSolution sol;
  sol.order = {1, 2, 2};
  sol.configs = {{1, 0, 0}, {2, 0, 0}, {2, 0, 0}};
  const ValidationReport r = validate_solution(t, sol);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.violated, "degree");
}

TEST(ValidateAssignment, FlowViolation) {
  std::mt19937_64 rng(8);
  const CostTensor t = testing::random_tensor(rng, 3, 2, 1);
  Assignment a;
  a.values[x_name(1, 1, 1, 2, 1, 1)] = 1.0;
  a.values[x_name(2, 2, 1, 3, 1, 1)] = 1.0;  // leaves waypoint 2 in another heading
  a.values[x_name(3, 1, 1, 1, 1, 1)] = 1.0;
  a.values[u_name(1)] = 1.0;
  a.values[u_name(2)] = 2.0;
  a.values[u_name(3)] = 3.0;
  const ValidationReport r = validate_assignment(t, a, testing::kInf);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.violated, "flow");
}

TEST(ValidateAssignment, SubtourViolation) {
  std::mt19937_64 rng(9);
  const CostTensor t = testing::random_tensor(rng, 4, 1, 1);
  Assignment a;
  a.values[x_name(1, 1, 1, 2, 1, 1)] = 1.0;
  a.values[x_name(2, 1, 1, 1, 1, 1)] = 1.0;
  a.values[x_name(3, 1, 1, 4, 1, 1)] = 1.0;
  a.values[x_name(4, 1, 1, 3, 1, 1)] = 1.0;
  const ValidationReport r = validate_assignment(t, a, testing::kInf);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.violated, "subtour");
}

TEST(ValidateAssignment, ObjectiveMismatch) {
  std::mt19937_64 rng(10);
  const CostTensor t = testing::random_tensor(rng, 4, 2, 1);
  TourSolution sol = solve_exact(t);
  sol.total_time += 1e-3;
  const ValidationReport r = validate_solution(t, sol);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.violated, "objective");
}

TEST(Names, OneBased) {
  EXPECT_EQ(x_name(1, 2, 3, 4, 5, 6), "x_1_2_3_4_5_6");
  EXPECT_EQ(u_name(3), "u_3");
}

}  // namespace
}  // namespace tbtsp
