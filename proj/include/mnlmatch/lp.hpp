#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mnlmatch {

enum class Relation { less_equal, equal };

struct LpConstraint {
  std::vector<double> coeffs;
  Relation relation = Relation::less_equal;
  double rhs = 0.0;
  std::string name;
};

// Maps an LP column back to the market: role "x" / "y" with its edge, or an
// auxiliary role with i = j = npos.
struct VarLabel {
  std::string role;
  std::size_t i = std::numeric_limits<std::size_t>::max();
  std::size_t j = std::numeric_limits<std::size_t>::max();

  std::string name() const {
    if (i == std::numeric_limits<std::size_t>::max()) return role;
    return role + "_" + std::to_string(i) + "_" + std::to_string(j);
  }
};

// maximize objective . x  s.t. constraints, lower <= x <= upper.
struct LpProblem {
  std::size_t n_vars = 0;
  std::vector<double> objective;
  std::vector<LpConstraint> constraints;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<VarLabel> labels;

  std::size_t add_var(VarLabel label, double obj, double lo = 0.0,
                      double hi = std::numeric_limits<double>::infinity()) {
    objective.push_back(obj);
    lower.push_back(lo);
    upper.push_back(hi);
    labels.push_back(std::move(label));
    for (auto& c : constraints) c.coeffs.push_back(0.0);
    return n_vars++;
  }

  LpConstraint& add_row(Relation rel, double rhs, std::string name = {}) {
    constraints.push_back({std::vector<double>(n_vars, 0.0), rel, rhs,
                           std::move(name)});
    return constraints.back();
  }
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> x;
  double objective_value = 0.0;
  std::size_t iterations = 0;
};

class LpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimplexOptions {
  double feasibility_tol = 1e-9;
  double pivot_tol = 1e-10;
  std::size_t max_iterations = 200000;
};

inline void validate_problem(const LpProblem& p) {
  auto bad = [](const std::string& why) {
    throw std::invalid_argument("invalid LpProblem: " + why);
  };
  if (p.objective.size() != p.n_vars || p.lower.size() != p.n_vars ||
      p.upper.size() != p.n_vars) {
    bad("vector sizes disagree with n_vars");
  }
  for (std::size_t k = 0; k < p.n_vars; ++k) {
    if (!std::isfinite(p.objective[k])) bad("non-finite objective");
    if (!std::isfinite(p.lower[k])) bad("lower bounds must be finite");
    if (std::isnan(p.upper[k]) || p.lower[k] > p.upper[k]) bad("lo > hi");
  }
  for (const auto& c : p.constraints) {
    if (c.coeffs.size() != p.n_vars) bad("constraint length != n_vars");
    if (!std::isfinite(c.rhs)) bad("non-finite rhs");
    for (double a : c.coeffs)
      if (!std::isfinite(a)) bad("non-finite coefficient");
  }
}

namespace detail {

// Dense tableau simplex on  max c.z  s.t.  A z <= b, z >= 0.  Phase 1 adds a
// single artificial column (label -1) when some b_i < 0. Entering and leaving
// variables follow Bland's smallest-label rule, so the method terminates.
class DenseSimplex {
 public:
  DenseSimplex(const std::vector<std::vector<double>>& A,
               const std::vector<double>& b, const std::vector<double>& c,
               const SimplexOptions& opt)
      : m_(b.size()),
        n_(c.size()),
        opt_(opt),
        basis_(m_),
        nonbasis_(n_ + 1),
        tab_(m_ + 2, std::vector<double>(n_ + 2, 0.0)) {
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < n_; ++j) tab_[i][j] = A[i][j];
    for (std::size_t i = 0; i < m_; ++i) {
      basis_[i] = static_cast<long>(n_ + i);
      tab_[i][n_] = -1.0;
      tab_[i][n_ + 1] = b[i];
    }
    for (std::size_t j = 0; j < n_; ++j) {
      nonbasis_[j] = static_cast<long>(j);
      tab_[m_][j] = -c[j];
    }
    nonbasis_[n_] = -1;
    tab_[m_ + 1][n_] = 1.0;
  }

  LpStatus solve(std::vector<double>& z, double& value) {
    std::size_t r = 0;
    for (std::size_t i = 1; i < m_; ++i)
      if (tab_[i][n_ + 1] < tab_[r][n_ + 1]) r = i;
    if (m_ > 0 && tab_[r][n_ + 1] < -opt_.feasibility_tol) {
      pivot(r, n_);
      LpStatus st = run(/*phase_one=*/true);
      if (st != LpStatus::optimal) return st;
      if (tab_[m_ + 1][n_ + 1] < -opt_.feasibility_tol)
        return LpStatus::infeasible;
      for (std::size_t i = 0; i < m_; ++i) {
        if (basis_[i] != -1) continue;
        // Artificial still basic at level ~0: swap in any usable column.
        std::size_t s = n_ + 1;
        for (std::size_t j = 0; j <= n_; ++j) {
          if (std::abs(tab_[i][j]) <= opt_.pivot_tol) continue;
          if (s == n_ + 1 || nonbasis_[j] < nonbasis_[s]) s = j;
        }
        if (s != n_ + 1) pivot(i, s);
      }
    }
    LpStatus st = run(/*phase_one=*/false);
    if (st != LpStatus::optimal) return st;
    z.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] >= 0 && static_cast<std::size_t>(basis_[i]) < n_)
        z[basis_[i]] = tab_[i][n_ + 1];
    value = tab_[m_][n_ + 1];
    return LpStatus::optimal;
  }

  std::size_t iterations() const { return iterations_; }

 private:
  void pivot(std::size_t r, std::size_t s) {
    const double inv = 1.0 / tab_[r][s];
    for (std::size_t i = 0; i < m_ + 2; ++i) {
      if (i == r || tab_[i][s] == 0.0) continue;
      const double f = tab_[i][s] * inv;
      auto& row = tab_[i];
      const auto& prow = tab_[r];
      for (std::size_t j = 0; j < n_ + 2; ++j) row[j] -= prow[j] * f;
      row[s] = -f;
    }
    for (std::size_t j = 0; j < n_ + 2; ++j)
      if (j != s) tab_[r][j] *= inv;
    tab_[r][s] = inv;
    std::swap(basis_[r], nonbasis_[s]);
    ++iterations_;
  }

  LpStatus run(bool phase_one) {
    const std::size_t obj = phase_one ? m_ + 1 : m_;
    while (true) {
      if (iterations_ >= opt_.max_iterations) return LpStatus::iteration_limit;
      std::size_t s = n_ + 1;
      for (std::size_t j = 0; j <= n_; ++j) {
        if (!phase_one && nonbasis_[j] == -1) continue;
        if (tab_[obj][j] < -opt_.pivot_tol &&
            (s == n_ + 1 || nonbasis_[j] < nonbasis_[s]))
          s = j;
      }
      if (s == n_ + 1) return LpStatus::optimal;
      std::size_t r = m_;
      for (std::size_t i = 0; i < m_; ++i) {
        if (tab_[i][s] <= opt_.pivot_tol) continue;
        if (r == m_) {
          r = i;
          continue;
        }
        const double lhs = tab_[i][n_ + 1] / tab_[i][s];
        const double rhs = tab_[r][n_ + 1] / tab_[r][s];
        if (lhs < rhs || (lhs == rhs && basis_[i] < basis_[r])) r = i;
      }
      if (r == m_) return LpStatus::unbounded;
      pivot(r, s);
    }
  }

  std::size_t m_;
  std::size_t n_;
  SimplexOptions opt_;
  std::vector<long> basis_;
  std::vector<long> nonbasis_;
  std::vector<std::vector<double>> tab_;
  std::size_t iterations_ = 0;
};

}  // namespace detail

// Reduces bounds and equalities to  A z <= b, z >= 0  (z = x - lower; an
// equality becomes a pair of opposite inequalities) and runs the dense
// simplex. An optimal answer is re-checked against the original rows.
inline LpSolution solve_lp(const LpProblem& p, const SimplexOptions& opt = {}) {
  validate_problem(p);
  const std::size_t n = p.n_vars;
  std::vector<std::vector<double>> A;
  std::vector<double> b;
  auto shifted_rhs = [&](const std::vector<double>& coeffs, double rhs) {
    for (std::size_t k = 0; k < n; ++k) rhs -= coeffs[k] * p.lower[k];
    return rhs;
  };
  for (const auto& c : p.constraints) {
    const double rhs = shifted_rhs(c.coeffs, c.rhs);
    A.push_back(c.coeffs);
    b.push_back(rhs);
    if (c.relation == Relation::equal) {
      std::vector<double> neg(c.coeffs);
      for (double& a : neg) a = -a;
      A.push_back(std::move(neg));
      b.push_back(-rhs);
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(p.upper[k])) continue;
    std::vector<double> row(n, 0.0);
    row[k] = 1.0;
    A.push_back(std::move(row));
    b.push_back(p.upper[k] - p.lower[k]);
  }

  detail::DenseSimplex simplex(A, b, p.objective, opt);
  LpSolution sol;
  std::vector<double> z;
  double value = 0.0;
  sol.status = simplex.solve(z, value);
  sol.iterations = simplex.iterations();
  if (sol.status != LpStatus::optimal) return sol;

  sol.x.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    double v = p.lower[k] + std::max(0.0, z[k]);
    if (v > p.upper[k]) v = p.upper[k];
    sol.x[k] = v;
  }
  sol.objective_value = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    sol.objective_value += p.objective[k] * sol.x[k];

  constexpr double kRecheckTol = 1e-7;
  for (const auto& c : p.constraints) {
    double lhs = 0.0;
    for (std::size_t k = 0; k < n; ++k) lhs += c.coeffs[k] * sol.x[k];
    const double viol = c.relation == Relation::equal ? std::abs(lhs - c.rhs)
                                                      : lhs - c.rhs;
    if (viol > kRecheckTol * (1.0 + std::abs(c.rhs))) {
      std::ostringstream os;
      os << "solve_lp: optimal basis violates row '" << c.name << "' by "
         << viol;
      throw LpError(os.str());
    }
  }
  return sol;
}

// Throws unless the solve reached optimality.
inline LpSolution solve_lp_or_throw(const LpProblem& p,
                                    const SimplexOptions& opt = {}) {
  LpSolution sol = solve_lp(p, opt);
  if (sol.status != LpStatus::optimal) {
    throw LpError(std::string("solve_lp: status ") + to_string(sol.status));
  }
  return sol;
}

// CPLEX-style LP text, for cross-checking against external solvers.
inline void write_lp_text(const LpProblem& p, std::ostream& os) {
  os.precision(17);
  auto term_list = [&](const std::vector<double>& coeffs) {
    bool first = true;
    for (std::size_t k = 0; k < p.n_vars; ++k) {
      if (coeffs[k] == 0.0) continue;
      os << (coeffs[k] < 0 ? " - " : (first ? " " : " + "))
         << std::abs(coeffs[k]) << " " << p.labels[k].name();
      first = false;
    }
    if (first) os << " 0 " << (p.n_vars ? p.labels[0].name() : "x");
  };
  os << "Maximize\n obj:";
  term_list(p.objective);
  os << "\nSubject To\n";
  for (std::size_t r = 0; r < p.constraints.size(); ++r) {
    const auto& c = p.constraints[r];
    os << " " << (c.name.empty() ? "c" + std::to_string(r) : c.name) << ":";
    term_list(c.coeffs);
    os << (c.relation == Relation::equal ? " = " : " <= ") << c.rhs << "\n";
  }
  os << "Bounds\n";
  for (std::size_t k = 0; k < p.n_vars; ++k) {
    os << " " << p.lower[k] << " <= " << p.labels[k].name();
    if (std::isfinite(p.upper[k])) os << " <= " << p.upper[k];
    os << "\n";
  }
  os << "End\n";
}

}  // namespace mnlmatch
