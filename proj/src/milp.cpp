#include "tbtsp/milp.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace tbtsp {

namespace {

struct Arc {
  std::size_t i, ci, j, cj;  // zero-based
};

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::optional<std::array<std::size_t, 6>> parse_x_name(const std::string& name) {
  if (name.size() < 2 || name[0] != 'x' || name[1] != '_') return std::nullopt;
  std::array<std::size_t, 6> out{};
  const char* p = name.data() + 2;
  const char* end = name.data() + name.size();
  for (std::size_t k = 0; k < 6; ++k) {
    auto [next, ec] = std::from_chars(p, end, out[k]);
    if (ec != std::errc{} || out[k] == 0) return std::nullopt;
    p = next;
    if (k < 5) {
      if (p == end || *p != '_') return std::nullopt;
      ++p;
    }
  }
  if (p != end) return std::nullopt;
  return out;
}

std::optional<std::size_t> parse_u_name(const std::string& name) {
  if (name.size() < 3 || name[0] != 'u' || name[1] != '_') return std::nullopt;
  std::size_t value = 0;
  auto [next, ec] = std::from_chars(name.data() + 2, name.data() + name.size(), value);
  if (ec != std::errc{} || next != name.data() + name.size() || value == 0) return std::nullopt;
  return value;
}

bool is_integral(double v, double tol) { return std::abs(v - std::round(v)) <= tol; }

std::string arc_name(const CostTensor& tensor, const Arc& a) {
  const std::size_t s = tensor.s();
  return x_name(a.i + 1, a.ci / s + 1, a.ci % s + 1, a.j + 1, a.cj / s + 1, a.cj % s + 1);
}

void write_terms(std::ostringstream& out, const std::vector<LinearTerm>& terms) {
  std::size_t on_line = 0;
  for (const auto& term : terms) {
    if (on_line == 6) {
      out << "\n   ";
      on_line = 0;
    }
    out << (term.coef < 0 ? " - " : " + ") << format_number(std::abs(term.coef)) << ' '
        << term.var;
    ++on_line;
  }
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double parse_double(const std::string& token) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("LP parse: expected a number, got '" + token + "'");
  }
  if (used != token.size()) throw std::invalid_argument("LP parse: bad number '" + token + "'");
  return value;
}

bool looks_numeric(const std::string& token) {
  return !token.empty() &&
         (std::isdigit(static_cast<unsigned char>(token[0])) || token[0] == '.' ||
          lower(token) == "inf" || lower(token) == "infinity");
}

std::optional<Sense> parse_sense(const std::string& token) {
  if (token == "<=" || token == "=<" || token == "<") return Sense::kLessEqual;
  if (token == ">=" || token == "=>" || token == ">") return Sense::kGreaterEqual;
  if (token == "=") return Sense::kEqual;
  return std::nullopt;
}

// Reads "[+|-] [coef] var" terms from tokens[pos] until a sense token or end.
std::vector<LinearTerm> parse_terms(const std::vector<std::string>& tokens, std::size_t& pos) {
  std::vector<LinearTerm> terms;
  while (pos < tokens.size() && !parse_sense(tokens[pos])) {
    double sign = 1.0;
    if (tokens[pos] == "+" || tokens[pos] == "-") {
      sign = tokens[pos] == "-" ? -1.0 : 1.0;
      ++pos;
    }
    if (pos >= tokens.size()) throw std::invalid_argument("LP parse: dangling sign");
    double coef = 1.0;
    if (looks_numeric(tokens[pos])) {
      coef = parse_double(tokens[pos]);
      ++pos;
    }
    if (pos >= tokens.size() || parse_sense(tokens[pos])) {
      throw std::invalid_argument("LP parse: coefficient without variable");
    }
    terms.push_back({sign * coef, tokens[pos]});
    ++pos;
  }
  return terms;
}

std::vector<std::string> tokenize(const std::vector<std::string>& lines) {
  std::vector<std::string> tokens;
  for (const auto& line : lines) {
    std::istringstream in(line);
    std::string token;
    while (in >> token) tokens.push_back(token);
  }
  return tokens;
}

}  // namespace

std::string x_name(std::size_t i, std::size_t k, std::size_t w, std::size_t j, std::size_t m,
                   std::size_t l) {
  std::ostringstream out;
  out << "x_" << i << '_' << k << '_' << w << '_' << j << '_' << m << '_' << l;
  return out.str();
}

std::string u_name(std::size_t i) { return "u_" + std::to_string(i); }

MilpModel build_milp(const CostTensor& tensor) {
  const std::size_t n = tensor.n();
  const std::size_t configs = tensor.configs();
  MilpModel model;

  std::vector<std::vector<LinearTerm>> out_rows(n);
  std::vector<std::vector<LinearTerm>> in_rows(n);
  std::vector<std::vector<LinearTerm>> flow(n * configs);
  // pair_terms[i][j]: every arc variable from waypoint i to waypoint j.
  std::vector<std::vector<std::vector<std::string>>> pair_vars(
      n, std::vector<std::vector<std::string>>(n));

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t ci = 0; ci < configs; ++ci) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        for (std::size_t cj = 0; cj < configs; ++cj) {
          const std::string name = arc_name(tensor, {i, ci, j, cj});
          model.binaries.push_back(name);
          model.objective.push_back({tensor.at(i, ci, j, cj), name});
          out_rows[i].push_back({1.0, name});
          in_rows[j].push_back({1.0, name});
          flow[j * configs + cj].push_back({1.0, name});
          flow[i * configs + ci].push_back({-1.0, name});
          pair_vars[i][j].push_back(name);
        }
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    model.constraints.push_back({"out_" + std::to_string(i + 1), out_rows[i], Sense::kEqual, 1.0});
  }
  for (std::size_t j = 0; j < n; ++j) {
    model.constraints.push_back({"in_" + std::to_string(j + 1), in_rows[j], Sense::kEqual, 1.0});
  }
  model.assignment_rows = 2 * n;

  const std::size_t s = tensor.s();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t c = 0; c < configs; ++c) {
      std::ostringstream name;
      name << "flow_" << j + 1 << '_' << c / s + 1 << '_' << c % s + 1;
      model.constraints.push_back({name.str(), flow[j * configs + c], Sense::kEqual, 0.0});
    }
  }
  model.flow_rows = n * configs;

  const double nn = static_cast<double>(n);
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 1; j < n; ++j) {
      if (i == j) continue;
      std::vector<LinearTerm> terms = {{1.0, u_name(i + 1)}, {-1.0, u_name(j + 1)}};
      for (const auto& var : pair_vars[i][j]) terms.push_back({nn - 1.0, var});
      if (n > 3) {
        for (const auto& var : pair_vars[j][i]) terms.push_back({nn - 3.0, var});
      }
      model.constraints.push_back({"dl_" + std::to_string(i + 1) + "_" + std::to_string(j + 1),
                                   std::move(terms), Sense::kLessEqual, nn - 2.0});
      ++model.subtour_rows;
    }
  }

  model.bounds.push_back({u_name(1), 1.0, 1.0});
  for (std::size_t i = 2; i <= n; ++i) {
    model.bounds.push_back({u_name(i), 2.0, nn});
    model.generals.push_back(u_name(i));
  }
  return model;
}

std::string write_lp(const MilpModel& model) {
  std::ostringstream out;
  out << "\\ Time-optimal multi-configuration routing model\n";
  out << "Minimize\n obj:";
  write_terms(out, model.objective);
  out << "\nSubject To\n";
  for (const auto& row : model.constraints) {
    out << ' ' << row.name << ':';
    write_terms(out, row.terms);
    switch (row.sense) {
      case Sense::kLessEqual: out << " <= "; break;
      case Sense::kGreaterEqual: out << " >= "; break;
      case Sense::kEqual: out << " = "; break;
    }
    out << format_number(row.rhs) << '\n';
  }
  out << "Bounds\n";
  for (const auto& b : model.bounds) {
    if (b.lower == b.upper) {
      out << ' ' << b.var << " = " << format_number(b.lower) << '\n';
    } else {
      out << ' ' << format_number(b.lower) << " <= " << b.var << " <= " << format_number(b.upper)
          << '\n';
    }
  }
  auto write_names = [&out](const char* header, const std::vector<std::string>& names) {
    if (names.empty()) return;
    out << header << '\n';
    for (std::size_t k = 0; k < names.size(); ++k) {
      out << ' ' << names[k];
      if (k % 8 == 7 || k + 1 == names.size()) out << '\n';
    }
  };
  write_names("Binaries", model.binaries);
  write_names("Generals", model.generals);
  out << "End\n";
  return out.str();
}

std::string export_milp(const CostTensor& tensor) { return write_lp(build_milp(tensor)); }

MilpModel parse_lp(const std::string& text) {
  enum class Section { kNone, kObjective, kConstraints, kBounds, kBinaries, kGenerals, kEnd };
  std::map<Section, std::vector<std::string>> lines;
  Section current = Section::kNone;

  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (const auto cut = line.find('\\'); cut != std::string::npos) line.erase(cut);
    std::string trimmed = line;
    trimmed.erase(0, trimmed.find_first_not_of(" \t\r"));
    trimmed.erase(trimmed.find_last_not_of(" \t\r") + 1);
    if (trimmed.empty()) continue;
    const std::string key = lower(trimmed);
    if (key == "minimize" || key == "minimum" || key == "min") {
      current = Section::kObjective;
    } else if (key == "subject to" || key == "such that" || key == "st" || key == "s.t.") {
      current = Section::kConstraints;
    } else if (key == "bounds" || key == "bound") {
      current = Section::kBounds;
    } else if (key == "binaries" || key == "binary" || key == "bin") {
      current = Section::kBinaries;
    } else if (key == "generals" || key == "general" || key == "gen") {
      current = Section::kGenerals;
    } else if (key == "end") {
      current = Section::kEnd;
    } else {
      if (current == Section::kNone || current == Section::kEnd) {
        throw std::invalid_argument("LP parse: content outside a section: " + trimmed);
      }
      lines[current].push_back(trimmed);
    }
  }

  MilpModel model;
  {
    auto tokens = tokenize(lines[Section::kObjective]);
    std::size_t pos = 0;
    if (!tokens.empty() && tokens[0].back() == ':') pos = 1;
    model.objective = parse_terms(tokens, pos);
    if (pos != tokens.size()) throw std::invalid_argument("LP parse: sense in objective");
  }
  {
    auto tokens = tokenize(lines[Section::kConstraints]);
    std::size_t pos = 0;
    while (pos < tokens.size()) {
      LinearConstraint row;
      if (tokens[pos].back() == ':') {
        row.name = tokens[pos].substr(0, tokens[pos].size() - 1);
        ++pos;
      } else {
        row.name = "c" + std::to_string(model.constraints.size() + 1);
      }
      row.terms = parse_terms(tokens, pos);
      if (pos + 1 >= tokens.size()) throw std::invalid_argument("LP parse: row without rhs");
      row.sense = *parse_sense(tokens[pos]);
      row.rhs = parse_double(tokens[pos + 1]);
      pos += 2;
      const std::string& name = row.name;
      if (name.rfind("out_", 0) == 0 || name.rfind("in_", 0) == 0) ++model.assignment_rows;
      if (name.rfind("flow_", 0) == 0) ++model.flow_rows;
      if (name.rfind("dl_", 0) == 0) ++model.subtour_rows;
      model.constraints.push_back(std::move(row));
    }
  }
  for (const auto& bound_line : lines[Section::kBounds]) {
    std::vector<std::string> tokens = tokenize({bound_line});
    if (tokens.size() == 3 && tokens[1] == "=") {
      const double v = parse_double(tokens[2]);
      model.bounds.push_back({tokens[0], v, v});
    } else if (tokens.size() == 5 && tokens[1] == "<=" && tokens[3] == "<=") {
      model.bounds.push_back({tokens[2], parse_double(tokens[0]), parse_double(tokens[4])});
    } else {
      throw std::invalid_argument("LP parse: unsupported bound: " + bound_line);
    }
  }
  model.binaries = tokenize(lines[Section::kBinaries]);
  model.generals = tokenize(lines[Section::kGenerals]);
  return model;
}

double Assignment::get(const std::string& var) const {
  const auto it = values.find(var);
  return it == values.end() ? 0.0 : it->second;
}

Assignment encode_solution(const CostTensor& /*tensor*/, const TourSolution& sol) {
  Assignment out;
  const std::size_t n = sol.order.size();
  for (std::size_t pos = 0; pos < n; ++pos) {
    const std::size_t next = (pos + 1) % n;
    const auto& a = sol.configs[pos];
    const auto& b = sol.configs[next];
    out.values[x_name(static_cast<std::size_t>(sol.order[pos]),
                      static_cast<std::size_t>(a.heading_idx) + 1,
                      static_cast<std::size_t>(a.speed_idx) + 1,
                      static_cast<std::size_t>(sol.order[next]),
                      static_cast<std::size_t>(b.heading_idx) + 1,
                      static_cast<std::size_t>(b.speed_idx) + 1)] += 1.0;
    out.values[u_name(static_cast<std::size_t>(sol.order[pos]))] = static_cast<double>(pos + 1);
  }
  return out;
}

ModelCheck evaluate_model(const MilpModel& model, const Assignment& values, double tol) {
  ModelCheck check;
  auto fail = [&check](std::string what) {
    if (check.feasible) {
      check.feasible = false;
      check.first_violation = std::move(what);
    }
  };
  for (const auto& term : model.objective) check.objective += term.coef * values.get(term.var);

  for (const auto& row : model.constraints) {
    double lhs = 0.0;
    for (const auto& term : row.terms) lhs += term.coef * values.get(term.var);
    const double slack = tol * std::max(1.0, std::abs(row.rhs));
    bool ok = true;
    switch (row.sense) {
      case Sense::kLessEqual: ok = lhs <= row.rhs + slack; break;
      case Sense::kGreaterEqual: ok = lhs >= row.rhs - slack; break;
      case Sense::kEqual: ok = std::abs(lhs - row.rhs) <= slack; break;
    }
    if (!ok) fail("row " + row.name);
  }

  std::map<std::string, std::pair<double, double>> bounds;
  for (const auto& b : model.bounds) bounds[b.var] = {b.lower, b.upper};
  for (const auto& var : model.binaries) {
    const double v = values.get(var);
    if (!(std::abs(v) <= tol || std::abs(v - 1.0) <= tol)) fail("binary " + var);
  }
  for (const auto& var : model.generals) {
    if (!is_integral(values.get(var), tol)) fail("integer " + var);
  }
  for (const auto& [var, range] : bounds) {
    const double v = values.get(var);
    if (v < range.first - tol || v > range.second + tol) fail("bound " + var);
  }
  // Variables outside the model must be zero (they would not exist in it).
  std::map<std::string, bool> known;
  for (const auto& var : model.binaries) known[var] = true;
  for (const auto& var : model.generals) known[var] = true;
  for (const auto& [var, range] : bounds) known[var] = true;
  for (const auto& [var, v] : values.values) {
    if (!known.contains(var) && std::abs(v) > tol) fail("unknown variable " + var);
  }
  return check;
}

ValidationReport validate_assignment(const CostTensor& tensor, const Assignment& values,
                                     double expected_total) {
  const std::size_t n = tensor.n();
  const std::size_t h = tensor.h();
  const std::size_t s = tensor.s();
  const std::size_t configs = tensor.configs();
  constexpr double kTol = 1e-9;
  auto report = [](std::string what, std::string detail) {
    return ValidationReport{false, std::move(what), std::move(detail)};
  };

  std::vector<Arc> arcs;
  std::vector<double> u(n + 1, 0.0);
  for (const auto& [name, value] : values.values) {
    if (const auto idx = parse_x_name(name)) {
      const auto& a = *idx;
      if (a[0] > n || a[3] > n || a[1] > h || a[4] > h || a[2] > s || a[5] > s) {
        return report("domain", name + " indexes outside the instance");
      }
      if (!(std::abs(value) <= kTol || std::abs(value - 1.0) <= kTol)) {
        return report("domain", name + " is not binary");
      }
      if (std::abs(value - 1.0) > kTol) continue;
      if (a[0] == a[3]) return report("domain", name + " is a self-loop");
      arcs.push_back({a[0] - 1, (a[1] - 1) * s + (a[2] - 1), a[3] - 1, (a[4] - 1) * s + (a[5] - 1)});
    } else if (const auto i = parse_u_name(name)) {
      if (*i > n) return report("domain", name + " indexes outside the instance");
      u[*i] = value;
    } else {
      return report("domain", "unknown variable " + name);
    }
  }

  std::vector<int> out_deg(n, 0);
  std::vector<int> in_deg(n, 0);
  for (const auto& a : arcs) {
    ++out_deg[a.i];
    ++in_deg[a.j];
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (out_deg[k] != 1) {
      return report("degree", "waypoint " + std::to_string(k + 1) + " is left " +
                                  std::to_string(out_deg[k]) + " times");
    }
    if (in_deg[k] != 1) {
      return report("degree", "waypoint " + std::to_string(k + 1) + " is entered " +
                                  std::to_string(in_deg[k]) + " times");
    }
  }

  std::vector<int> balance(n * configs, 0);
  for (const auto& a : arcs) {
    ++balance[a.j * configs + a.cj];
    --balance[a.i * configs + a.ci];
  }
  for (std::size_t k = 0; k < balance.size(); ++k) {
    if (balance[k] != 0) {
      std::ostringstream msg;
      msg << "waypoint " << k / configs + 1 << " heading " << (k % configs) / s + 1 << " speed "
          << k % s + 1 << " entered and left in different configurations";
      return report("flow", msg.str());
    }
  }

  std::vector<std::size_t> successor(n, 0);
  for (const auto& a : arcs) successor[a.i] = a.j;
  std::size_t at = 0;
  std::size_t steps = 0;
  do {
    at = successor[at];
    ++steps;
  } while (at != 0 && steps <= n);
  if (steps != n) {
    return report("subtour", "cycle through waypoint 1 has " + std::to_string(steps) + " of " +
                                 std::to_string(n) + " waypoints");
  }

  if (std::abs(u[1] - 1.0) > kTol) return report("sequence", "u_1 must equal 1");
  for (std::size_t i = 2; i <= n; ++i) {
    if (!is_integral(u[i], kTol) || u[i] < 2.0 - kTol || u[i] > static_cast<double>(n) + kTol) {
      return report("sequence", u_name(i) + " outside {2..n}");
    }
  }
  std::vector<double> pair_flow(n * n, 0.0);
  for (const auto& a : arcs) pair_flow[a.i * n + a.j] += 1.0;
  const double nn = static_cast<double>(n);
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 1; j < n; ++j) {
      if (i == j) continue;
      const double lhs = u[i + 1] - u[j + 1] + (nn - 1.0) * pair_flow[i * n + j] +
                         (nn - 3.0) * pair_flow[j * n + i];
      if (lhs > nn - 2.0 + kTol) {
        return report("sequence", "row dl_" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
      }
    }
  }

  if (std::isfinite(expected_total)) {
    double total = 0.0;
    for (const auto& a : arcs) total += tensor.at(a.i, a.ci, a.j, a.cj);
    if (std::abs(total - expected_total) > 1e-9 * std::max(1.0, std::abs(expected_total))) {
      return report("objective", "arc costs sum to " + format_number(total) + ", expected " +
                                     format_number(expected_total));
    }
  }
  return {};
}

ValidationReport validate_solution(const CostTensor& tensor, const TourSolution& sol) {
  const std::size_t n = tensor.n();
  if (sol.configs.size() != sol.order.size()) {
    return {false, "domain", "one configuration per visited waypoint is required"};
  }
  std::vector<int> visits(n + 1, 0);
  for (std::size_t k = 0; k < sol.order.size(); ++k) {
    const int id = sol.order[k];
    if (id < 1 || static_cast<std::size_t>(id) > n) {
      return {false, "domain", "waypoint id " + std::to_string(id) + " outside the instance"};
    }
    const auto& c = sol.configs[k];
    if (c.waypoint != id || c.heading_idx < 0 || c.speed_idx < 0 ||
        static_cast<std::size_t>(c.heading_idx) >= tensor.h() ||
        static_cast<std::size_t>(c.speed_idx) >= tensor.s()) {
      return {false, "domain", "invalid configuration at position " + std::to_string(k + 1)};
    }
    ++visits[static_cast<std::size_t>(id)];
  }
  for (std::size_t id = 1; id <= n; ++id) {
    if (visits[id] != 1) {
      return {false, "degree",
              "waypoint " + std::to_string(id) + " visited " + std::to_string(visits[id]) + " times"};
    }
  }
  return validate_assignment(tensor, encode_solution(tensor, sol), sol.total_time);
}

}  // namespace tbtsp
