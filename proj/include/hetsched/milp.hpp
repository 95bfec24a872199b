#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hetsched/model.hpp"

namespace hetsched {

enum class MilpMode { Homogeneous, Heterogeneous };

enum class VarKind { Continuous, Binary };

struct MilpVariable {
  std::string name;
  VarKind kind = VarKind::Continuous;
};

enum class Sense { LessEqual, GreaterEqual, Equal };

struct MilpTerm {
  std::size_t var;
  double coef;
};

/// sum(terms) sense rhs. A strict row means "<" (or ">") and is tightened by
/// the strict epsilon on export and verification.
struct MilpConstraint {
  std::string name;
  std::vector<MilpTerm> terms;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
  bool strict = false;
};

/// Variable layout: s_i, tmax, u_i_j, w_i_j, x_i_j, then (heterogeneous)
/// v_i_k and y_i_j_k, all row-major over task and pool indices.
class MilpModel {
 public:
  MilpModel(std::size_t n, std::size_t m, MilpMode mode) : n_(n), m_(m), mode_(mode) {}

  MilpMode mode() const { return mode_; }
  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }

  std::size_t s(std::size_t i) const { return i; }
  std::size_t tmax() const { return n_; }
  std::size_t u(std::size_t i, std::size_t j) const { return n_ + 1 + i * n_ + j; }
  std::size_t w(std::size_t i, std::size_t j) const { return n_ + 1 + n_ * n_ + i * n_ + j; }
  std::size_t x(std::size_t i, std::size_t j) const { return n_ + 1 + 2 * n_ * n_ + i * n_ + j; }
  std::size_t v(std::size_t i, std::size_t k) const { return n_ + 1 + 3 * n_ * n_ + i * m_ + k; }
  std::size_t y(std::size_t i, std::size_t j, std::size_t k) const {
    return n_ + 1 + 3 * n_ * n_ + n_ * m_ + (i * n_ + j) * m_ + k;
  }

  std::vector<MilpVariable> variables;
  std::vector<MilpConstraint> constraints;
  double big_m = 0.0;       // C1 upper bound
  double compat_cap = 0.0;  // C0 upper bound (heterogeneous)

 private:
  std::size_t n_;
  std::size_t m_;
  MilpMode mode_;
};

/// Builds the model. Homogeneous mode needs one pool and K = 1 for every task.
inline MilpModel build_milp(const Instance& inst, MilpMode mode) {
  const std::size_t n = inst.num_tasks();
  const std::size_t m = inst.num_pools();
  const std::size_t r = inst.num_resources();
  if (mode == MilpMode::Homogeneous) {
    if (m != 1) throw DomainError(ErrorKind::ModeMismatch, "homogeneous mode needs exactly one pool");
    for (TaskIndex i = 0; i < n; ++i)
      if (inst.coefficient(i, 0) != 1.0)
        throw DomainError(ErrorKind::ModeMismatch, "homogeneous mode needs K = 1 everywhere");
  }
  const bool het = mode == MilpMode::Heterogeneous;
  MilpModel md(n, het ? m : 0, mode);
  const auto tid = [&](std::size_t i) { return std::to_string(inst.task(i).id); };
  const auto pid = [&](std::size_t k) { return std::to_string(inst.pool(k).id); };

  for (std::size_t i = 0; i < n; ++i) md.variables.push_back({"s_" + tid(i), VarKind::Continuous});
  md.variables.push_back({"tmax", VarKind::Continuous});
  for (const char* prefix : {"u_", "w_", "x_"})
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        md.variables.push_back({prefix + tid(i) + "_" + tid(j), VarKind::Binary});
  if (het) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < m; ++k)
        md.variables.push_back({"v_" + tid(i) + "_" + pid(k), VarKind::Binary});
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < m; ++k)
          md.variables.push_back({"y_" + tid(i) + "_" + tid(j) + "_" + pid(k), VarKind::Binary});
  }

  // a_ik = min(1/K, C0), with a_ik = C0 for incompatible pairs.
  std::vector<std::vector<double>> a(n, std::vector<double>(m, 0.0));
  if (het) {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < m; ++k) {
        const double kk = inst.coefficient(i, k);
        if (kk != 0.0) worst = std::max(worst, 1.0 / kk);
      }
    md.compat_cap = 2.0 * worst;
    double c1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < m; ++k) {
        const double kk = inst.coefficient(i, k);
        a[i][k] = kk == 0.0 ? md.compat_cap : std::min(1.0 / kk, md.compat_cap);
        c1 += inst.task(i).base_time * a[i][k];
      }
      for (double d : inst.task(i).demand) c1 += d;
    }
    md.big_m = c1;
  } else {
    for (std::size_t i = 0; i < n; ++i) md.big_m += inst.task(i).base_time;
  }
  const double C = md.big_m;
  auto& rows = md.constraints;

  // Duration terms of task i: t_i (constant) or sum_k t_i a_ik v_i_k.
  auto add_duration = [&](std::vector<MilpTerm>& terms, std::size_t i, double sign) {
    for (std::size_t k = 0; k < m; ++k) terms.push_back({md.v(i, k), sign * inst.task(i).base_time * a[i][k]});
  };
  const auto t = [&](std::size_t i) { return inst.task(i).base_time; };

  for (std::size_t i = 0; i < n; ++i) {
    MilpConstraint row{"tmax_" + tid(i), {{md.s(i), 1.0}}, Sense::LessEqual, 0.0, false};
    if (het) add_duration(row.terms, i, 1.0);
    else row.rhs = -t(i);
    row.terms.push_back({md.tmax(), -1.0});
    rows.push_back(std::move(row));
  }
  for (const auto& [ui, vi] : inst.edges()) {
    const auto fi = inst.find_task(ui), fj = inst.find_task(vi);
    if (!fi || !fj) continue;
    const std::size_t i = *fi, j = *fj;
    MilpConstraint row{"prec_" + tid(i) + "_" + tid(j), {{md.s(i), 1.0}}, Sense::LessEqual, 0.0, false};
    if (het) add_duration(row.terms, i, 1.0);
    else row.rhs = -t(i);
    row.terms.push_back({md.s(j), -1.0});
    rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::string ij = tid(i) + "_" + tid(j);
      // u_ij = 0 iff s_i < s_j
      rows.push_back({"ua_" + ij, {{md.s(i), 1.0}, {md.s(j), -1.0}, {md.u(i, j), -C}}, Sense::LessEqual, 0.0, true});
      rows.push_back({"ub_" + ij, {{md.s(j), 1.0}, {md.s(i), -1.0}, {md.u(i, j), C}}, Sense::LessEqual, C, false});
      // w_ij = 0 iff s_i >= s_j + d_j
      MilpConstraint wa{"wa_" + ij, {{md.s(i), 1.0}, {md.s(j), -1.0}}, Sense::LessEqual, C, true};
      if (het) add_duration(wa.terms, j, -1.0);
      else wa.rhs += t(j);
      wa.terms.push_back({md.w(i, j), C});
      rows.push_back(std::move(wa));
      MilpConstraint wb{"wb_" + ij, {{md.s(j), 1.0}}, Sense::LessEqual, 0.0, false};
      if (het) add_duration(wb.terms, j, 1.0);
      else wb.rhs = -t(j);
      wb.terms.push_back({md.s(i), -1.0});
      wb.terms.push_back({md.w(i, j), -C});
      rows.push_back(std::move(wb));
      // x_ij = u_ij AND w_ij
      rows.push_back({"xa_" + ij, {{md.u(i, j), 1.0}, {md.w(i, j), 1.0}, {md.x(i, j), -1.0}}, Sense::LessEqual, 1.0, false});
      rows.push_back({"xb_" + ij, {{md.u(i, j), 1.0}, {md.w(i, j), 1.0}, {md.x(i, j), -2.0}}, Sense::GreaterEqual, 0.0, false});
    }
  if (het) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < m; ++k) {
          const std::string ijk = tid(i) + "_" + tid(j) + "_" + pid(k);
          rows.push_back({"ya_" + ijk, {{md.x(i, j), 1.0}, {md.v(j, k), 1.0}, {md.y(i, j, k), -2.0}}, Sense::GreaterEqual, 0.0, false});
          rows.push_back({"yb_" + ijk, {{md.x(i, j), 1.0}, {md.v(j, k), 1.0}, {md.y(i, j, k), -1.0}}, Sense::LessEqual, 1.0, false});
        }
    for (std::size_t i = 0; i < n; ++i) {
      MilpConstraint row{"assign_" + tid(i), {}, Sense::Equal, 1.0, false};
      for (std::size_t k = 0; k < m; ++k) row.terms.push_back({md.v(i, k), 1.0});
      rows.push_back(std::move(row));
    }
    // 1 - v + C0 - a > 0  <=>  v < 1 + C0 - a
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < m; ++k)
        rows.push_back({"compat_" + tid(i) + "_" + pid(k), {{md.v(i, k), 1.0}}, Sense::LessEqual,
                        1.0 + md.compat_cap - a[i][k], true});
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& rho_i = inst.task(i).demand;
    for (std::size_t k = 0; k < (het ? m : 1); ++k)
      for (std::size_t l = 0; l < r; ++l) {
        MilpConstraint row{"cap_" + tid(i) + (het ? "_" + pid(k) : "") + "_" + std::to_string(l + 1), {},
                           Sense::LessEqual, inst.pool(k).capacity[l] - rho_i[l], false};
        for (std::size_t j = 0; j < n; ++j)
          if (j != i) row.terms.push_back({het ? md.y(i, j, k) : md.x(i, j), inst.task(j).demand[l]});
        if (het) {
          row.terms.push_back({md.v(i, k), C});
          row.rhs += C;
        }
        rows.push_back(std::move(row));
      }
  }
  return md;
}

namespace detail {

// Shortest decimal form that reads back to the same double.
inline std::string format_number(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

}  // namespace detail

/// Effective right-hand side after tightening strict rows by eps.
inline double effective_rhs(const MilpConstraint& row, double eps) {
  if (!row.strict) return row.rhs;
  return row.sense == Sense::GreaterEqual ? row.rhs + eps : row.rhs - eps;
}

/// CPLEX-style LP text, one constraint per line.
inline std::string export_milp(const Instance& inst, MilpMode mode, double eps_strict = 1e-6) {
  const MilpModel md = build_milp(inst, mode);
  std::string out;
  out += "\\ ";
  out += mode == MilpMode::Homogeneous ? "homogeneous" : "heterogeneous";
  out += " makespan model: " + std::to_string(md.variables.size()) + " variables, " +
         std::to_string(md.constraints.size()) + " constraints\n";
  out += "Minimize\n obj: tmax\nSubject To\n";
  for (const auto& row : md.constraints) {
    out += " " + row.name + ":";
    if (row.terms.empty()) out += " 0 tmax";
    for (const auto& term : row.terms) {
      const double c = term.coef;
      out += c < 0 ? " - " : " + ";
      if (std::abs(c) != 1.0) out += detail::format_number(std::abs(c)) + " ";
      out += md.variables[term.var].name;
    }
    switch (row.sense) {
      case Sense::LessEqual: out += " <= "; break;
      case Sense::GreaterEqual: out += " >= "; break;
      case Sense::Equal: out += " = "; break;
    }
    out += detail::format_number(effective_rhs(row, eps_strict)) + "\n";
  }
  out += "Bounds\n";
  for (const auto& var : md.variables)
    if (var.kind == VarKind::Continuous) out += " " + var.name + " >= 0\n";
  out += "Binaries\n";
  for (const auto& var : md.variables)
    if (var.kind == VarKind::Binary) out += " " + var.name + "\n";
  out += "End\n";
  return out;
}

/// Values of every model variable. Index conventions follow the instance's
/// task and pool order; v and y are empty in homogeneous mode.
struct MilpSolution {
  MilpMode mode = MilpMode::Heterogeneous;
  std::vector<double> s;
  double tmax = 0.0;
  std::vector<std::vector<int>> u, w, x;
  std::vector<std::vector<int>> v;               // task x pool
  std::vector<std::vector<std::vector<int>>> y;  // task x task x pool

  friend bool operator==(const MilpSolution&, const MilpSolution&) = default;
};

inline std::vector<double> solution_values(const MilpModel& md, const MilpSolution& sol) {
  const std::size_t n = md.n(), m = md.m();
  if (sol.s.size() != n || sol.u.size() != n || sol.w.size() != n || sol.x.size() != n)
    throw DomainError(ErrorKind::MalformedSolution, "solution shape does not match the instance");
  std::vector<double> val(md.variables.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    val[md.s(i)] = sol.s[i];
    if (sol.u[i].size() != n || sol.w[i].size() != n || sol.x[i].size() != n)
      throw DomainError(ErrorKind::MalformedSolution, "solution shape does not match the instance");
    for (std::size_t j = 0; j < n; ++j) {
      val[md.u(i, j)] = sol.u[i][j];
      val[md.w(i, j)] = sol.w[i][j];
      val[md.x(i, j)] = sol.x[i][j];
    }
  }
  val[md.tmax()] = sol.tmax;
  if (md.mode() == MilpMode::Heterogeneous) {
    if (sol.v.size() != n || sol.y.size() != n)
      throw DomainError(ErrorKind::MalformedSolution, "solution shape does not match the instance");
    for (std::size_t i = 0; i < n; ++i) {
      if (sol.v[i].size() != m || sol.y[i].size() != n)
        throw DomainError(ErrorKind::MalformedSolution, "solution shape does not match the instance");
      for (std::size_t k = 0; k < m; ++k) val[md.v(i, k)] = sol.v[i][k];
      for (std::size_t j = 0; j < n; ++j) {
        if (sol.y[i][j].size() != m)
          throw DomainError(ErrorKind::MalformedSolution, "solution shape does not match the instance");
        for (std::size_t k = 0; k < m; ++k) val[md.y(i, j, k)] = sol.y[i][j][k];
      }
    }
  }
  return val;
}

inline constexpr double kMilpTolerance = 1e-9;

/// Names of violated rows (and of non-binary or negative variables); empty iff
/// the solution is feasible for the exported model.
inline std::vector<std::string> verify_milp_solution(const Instance& inst, const MilpSolution& sol,
                                                     MilpMode mode, double eps_strict = 1e-6) {
  const MilpModel md = build_milp(inst, mode);
  const auto val = solution_values(md, sol);
  std::vector<std::string> out;
  for (std::size_t k = 0; k < val.size(); ++k) {
    const auto& var = md.variables[k];
    if (var.kind == VarKind::Binary && val[k] != 0.0 && val[k] != 1.0) out.push_back(var.name + " not binary");
    if (var.kind == VarKind::Continuous && val[k] < -kMilpTolerance) out.push_back(var.name + " negative");
  }
  for (const auto& row : md.constraints) {
    double lhs = 0.0;
    for (const auto& term : row.terms) lhs += term.coef * val[term.var];
    const double rhs = effective_rhs(row, eps_strict);
    bool ok = true;
    switch (row.sense) {
      case Sense::LessEqual: ok = lhs <= rhs + kMilpTolerance; break;
      case Sense::GreaterEqual: ok = lhs >= rhs - kMilpTolerance; break;
      case Sense::Equal: ok = std::abs(lhs - rhs) <= kMilpTolerance; break;
    }
    if (!ok) out.push_back(row.name);
  }
  return out;
}

/// The solution a schedule induces, without checking any constraint.
inline MilpSolution derive_milp_solution(const Instance& inst, const Schedule& x, MilpMode mode) {
  const std::size_t n = inst.num_tasks();
  const std::size_t m = inst.num_pools();
  const bool het = mode == MilpMode::Heterogeneous;
  MilpSolution sol;
  sol.mode = mode;
  sol.s = x.start;
  std::vector<double> end(n);
  for (TaskIndex i = 0; i < n; ++i) end[i] = x.start[i] + inst.actual_time(i, x.pool[i]);
  sol.tmax = n == 0 ? 0.0 : *std::max_element(end.begin(), end.end());
  sol.u.assign(n, std::vector<int>(n, 0));
  sol.w = sol.u;
  sol.x = sol.u;
  for (TaskIndex i = 0; i < n; ++i)
    for (TaskIndex j = 0; j < n; ++j) {
      sol.u[i][j] = x.start[i] < x.start[j] ? 0 : 1;
      sol.w[i][j] = x.start[i] >= end[j] ? 0 : 1;
      sol.x[i][j] = sol.u[i][j] & sol.w[i][j];
    }
  if (het) {
    sol.v.assign(n, std::vector<int>(m, 0));
    for (TaskIndex i = 0; i < n; ++i) sol.v[i][x.pool[i]] = 1;
    sol.y.assign(n, std::vector<std::vector<int>>(n, std::vector<int>(m, 0)));
    for (TaskIndex i = 0; i < n; ++i)
      for (TaskIndex j = 0; j < n; ++j)
        for (PoolIndex k = 0; k < m; ++k) sol.y[i][j][k] = sol.x[i][j] & sol.v[j][k];
  }
  return sol;
}

/// Inverse of milp_to_schedule on feasible schedules.
inline MilpSolution schedule_to_milp(const Instance& inst, const Schedule& x,
                                     MilpMode mode = MilpMode::Heterogeneous, double eps_strict = 1e-6) {
  const auto verdict = check_schedule(inst, x);
  if (!verdict.feasible())
    throw DomainError(ErrorKind::InfeasibleSchedule, "schedule is infeasible: " + verdict.violations.front().detail);
  auto sol = derive_milp_solution(inst, x, mode);
  const auto bad = verify_milp_solution(inst, sol, mode, eps_strict);
  if (!bad.empty())
    throw DomainError(ErrorKind::InfeasibleSchedule,
                      "schedule falls outside the model's big-M window (row " + bad.front() + ")");
  return sol;
}

/// Start times plus the pool whose v entry is 1.
inline Schedule milp_to_schedule(const Instance& inst, const MilpSolution& sol) {
  const std::size_t n = inst.num_tasks();
  if (sol.s.size() != n) throw DomainError(ErrorKind::MalformedSolution, "start vector has wrong length");
  Schedule x{sol.s, std::vector<PoolIndex>(n, 0), {}};
  if (sol.mode == MilpMode::Homogeneous) return x;
  if (sol.v.size() != n) throw DomainError(ErrorKind::MalformedSolution, "assignment matrix has wrong shape");
  for (TaskIndex i = 0; i < n; ++i) {
    int ones = 0;
    for (PoolIndex k = 0; k < sol.v[i].size(); ++k)
      if (sol.v[i][k] == 1) {
        x.pool[i] = k;
        ++ones;
      } else if (sol.v[i][k] != 0) {
        ones = -1;
        break;
      }
    if (ones != 1 || sol.v[i].size() != inst.num_pools())
      throw DomainError(ErrorKind::MalformedSolution,
                        "task " + std::to_string(inst.task(i).id) + " has no one-hot pool assignment");
  }
  return x;
}

}  // namespace hetsched
