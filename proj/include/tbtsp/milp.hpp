#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "tbtsp/cost_tensor.hpp"
#include "tbtsp/solver.hpp"

namespace tbtsp {

struct LinearTerm {
  double coef{0.0};
  std::string var;
};

enum class Sense { kLessEqual, kEqual, kGreaterEqual };

struct LinearConstraint {
  std::string name;
  std::vector<LinearTerm> terms;
  Sense sense{Sense::kEqual};
  double rhs{0.0};
};

struct VariableBound {
  std::string var;
  double lower{0.0};
  double upper{0.0};
};

/// Routing model over binaries x_i_k_w_j_m_l (1-based, self-loops omitted)
/// and sequence integers u_i: objective, out/in degree rows, per-configuration
/// flow conservation, lifted MTZ (Desrochers-Laporte) subtour rows for
/// i, j >= 2, and u_1 fixed to 1.
struct MilpModel {
  std::vector<LinearTerm> objective;
  std::vector<LinearConstraint> constraints;
  std::vector<VariableBound> bounds;
  std::vector<std::string> binaries;
  std::vector<std::string> generals;

  std::size_t assignment_rows{0};
  std::size_t flow_rows{0};
  std::size_t subtour_rows{0};
};

MilpModel build_milp(const CostTensor& tensor);

/// CPLEX-LP text (Minimize / Subject To / Bounds / Binaries / Generals / End).
std::string write_lp(const MilpModel& model);

/// Text of build_milp(tensor) in LP format.
std::string export_milp(const CostTensor& tensor);

/// Parses the subset of LP format written by write_lp.
MilpModel parse_lp(const std::string& text);

std::string x_name(std::size_t i, std::size_t k, std::size_t w, std::size_t j, std::size_t m,
                   std::size_t l);
std::string u_name(std::size_t i);

/// Sparse variable assignment; absent variables are zero.
struct Assignment {
  std::map<std::string, double> values;
  [[nodiscard]] double get(const std::string& var) const;
};

/// x/u values of a tour (u = 1-based position in the order).
Assignment encode_solution(const CostTensor& tensor, const TourSolution& sol);

struct ModelCheck {
  bool feasible{true};
  std::string first_violation;
  double objective{0.0};
};

/// Evaluates every row, bound, and integrality restriction of `model`.
ModelCheck evaluate_model(const MilpModel& model, const Assignment& values, double tol = 1e-9);

struct ValidationReport {
  bool ok{true};
  std::string violated;  // "domain", "degree", "flow", "subtour", "sequence", "objective"
  std::string detail;
};

/// Feasibility of an arc assignment against the routing model semantics:
/// binary domain, in/out degree, configuration flow, single cycle, sequence
/// rows, and (when `expected_total` is finite) objective consistency.
ValidationReport validate_assignment(const CostTensor& tensor, const Assignment& values,
                                     double expected_total);

ValidationReport validate_solution(const CostTensor& tensor, const TourSolution& sol);

}  // namespace tbtsp
