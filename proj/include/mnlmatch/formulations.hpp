#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "mnlmatch/instance.hpp"
#include "mnlmatch/lp.hpp"
#include "mnlmatch/mnl.hpp"

namespace mnlmatch {

// Per-supplier cap on the expected number of high-weight selectors.
inline constexpr double kHighWeightCap = 3.0 / 5.0;

namespace detail {

inline constexpr std::size_t kNoVar = static_cast<std::size_t>(-1);

inline std::string edge_name(const char* prefix, std::size_t i,
                             std::size_t j) {
  return std::string(prefix) + "_" + std::to_string(i) + "_" + std::to_string(j);
}

// Adds  x_ij / u_ij + sum_k x_ik <= 1  for every variable of customer i.
inline void add_customer_polyhedron(LpProblem& p, const Instance& inst,
                                    const std::vector<std::size_t>& x_var) {
  const std::size_t m = inst.n_suppliers;
  for (std::size_t i = 0; i < inst.n_customers; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t v = x_var[i * m + j];
      if (v == kNoVar) continue;
      auto& row = p.add_row(Relation::less_equal, 1.0, edge_name("pc", i, j));
      for (std::size_t k = 0; k < m; ++k)
        if (x_var[i * m + k] != kNoVar) row.coeffs[x_var[i * m + k]] = 1.0;
      row.coeffs[v] += 1.0 / inst.u(i, j);
    }
  }
}

}  // namespace detail

// Variables x_ij, y_ij for every edge with u_ij > 0;
//   max sum r_ij y_ij  s.t.  y_ij = min(w_ij, 1) x_ij,  y in P^S,  x in P^C.
inline LpProblem build_customized_lp(const Instance& inst) {
  const std::size_t n = inst.n_customers;
  const std::size_t m = inst.n_suppliers;
  LpProblem p;
  std::vector<std::size_t> x_var(n * m, detail::kNoVar);
  std::vector<std::size_t> y_var(n * m, detail::kNoVar);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (inst.u(i, j) <= 0.0) continue;
      x_var[i * m + j] = p.add_var({"x", i, j}, 0.0, 0.0, 1.0);
      // A zero supplier weight forces y = 0 through the equality row.
      y_var[i * m + j] = p.add_var({"y", i, j}, inst.r(i, j), 0.0, 1.0);
    }
  }
  detail::add_customer_polyhedron(p, inst, x_var);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t v = y_var[i * m + j];
      if (v == detail::kNoVar || inst.w(i, j) <= 0.0) continue;
      auto& row =
          p.add_row(Relation::less_equal, 1.0, detail::edge_name("ps", i, j));
      for (std::size_t l = 0; l < n; ++l)
        if (y_var[l * m + j] != detail::kNoVar) row.coeffs[y_var[l * m + j]] = 1.0;
      row.coeffs[v] += 1.0 / inst.w(i, j);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (x_var[i * m + j] == detail::kNoVar) continue;
      auto& row = p.add_row(Relation::equal, 0.0, detail::edge_name("link", i, j));
      row.coeffs[y_var[i * m + j]] = 1.0;
      row.coeffs[x_var[i * m + j]] = -std::min(inst.w(i, j), 1.0);
    }
  }
  return p;
}

// Low-weight relaxation over E_- edges:
//   max sum r_ij w_ij x_ij
//   s.t. sum_{l != i, (l,j) in E_-} w_lj x_lj <= 1  for every (i,j) in E_-,
//        x in P^C.
inline LpProblem build_low_weight_lp(const Instance& inst,
                                     const EdgeSplit& split) {
  const std::size_t n = inst.n_customers;
  const std::size_t m = inst.n_suppliers;
  LpProblem p;
  std::vector<std::size_t> x_var(n * m, detail::kNoVar);
  for (const auto& e : split.e_minus) {
    if (inst.u(e.customer, e.supplier) <= 0.0) continue;
    x_var[e.customer * m + e.supplier] =
        p.add_var({"x", e.customer, e.supplier},
                  inst.r(e.customer, e.supplier) * inst.w(e.customer, e.supplier),
                  0.0, 1.0);
  }
  for (const auto& e : split.e_minus) {
    auto& row = p.add_row(Relation::less_equal, 1.0,
                          detail::edge_name("loo", e.customer, e.supplier));
    for (std::size_t l = 0; l < n; ++l) {
      if (l == e.customer) continue;
      const std::size_t v = x_var[l * m + e.supplier];
      if (v != detail::kNoVar) row.coeffs[v] = inst.w(l, e.supplier);
    }
  }
  detail::add_customer_polyhedron(p, inst, x_var);
  return p;
}

// High-weight relaxation over E_+ edges:
//   max sum r_ij x_ij  s.t.  sum_{(l,j) in E_+} x_lj <= 3/5 per supplier,
//   x in P^C.
inline LpProblem build_high_weight_lp(const Instance& inst,
                                      const EdgeSplit& split) {
  const std::size_t n = inst.n_customers;
  const std::size_t m = inst.n_suppliers;
  LpProblem p;
  std::vector<std::size_t> x_var(n * m, detail::kNoVar);
  for (const auto& e : split.e_plus) {
    if (inst.u(e.customer, e.supplier) <= 0.0) continue;
    x_var[e.customer * m + e.supplier] = p.add_var(
        {"x", e.customer, e.supplier}, inst.r(e.customer, e.supplier), 0.0, 1.0);
  }
  for (std::size_t j = 0; j < m; ++j) {
    bool any = false;
    for (std::size_t l = 0; l < n; ++l) any = any || x_var[l * m + j] != detail::kNoVar;
    if (!any) continue;
    auto& row = p.add_row(Relation::less_equal, kHighWeightCap,
                          "cap_" + std::to_string(j));
    for (std::size_t l = 0; l < n; ++l)
      if (x_var[l * m + j] != detail::kNoVar) row.coeffs[x_var[l * m + j]] = 1.0;
  }
  detail::add_customer_polyhedron(p, inst, x_var);
  return p;
}

// Classical MNL assortment LP for supplier j over the customers C_j:
//   max sum r_ij y_ij  s.t.  y_.j in the supplier polyhedron restricted to C_j.
inline LpProblem build_mnl_assortment_lp(const Instance& inst, std::size_t j,
                                         const CustomerSet& selectors) {
  LpProblem p;
  std::vector<std::size_t> vars;
  for (std::size_t i : selectors) {
    if (inst.w(i, j) <= 0.0) continue;
    vars.push_back(p.add_var({"y", i, j}, inst.r(i, j), 0.0, 1.0));
  }
  for (std::size_t k = 0; k < vars.size(); ++k) {
    const auto& label = p.labels[vars[k]];
    auto& row = p.add_row(Relation::less_equal, 1.0,
                          detail::edge_name("ps", label.i, j));
    for (std::size_t v : vars) row.coeffs[v] = 1.0;
    row.coeffs[vars[k]] += 1.0 / inst.w(label.i, j);
  }
  return p;
}

// Reads the variables labelled `role` back into a |C| x |S| matrix.
// Values below `zero_tol` are flushed to zero.
inline ChoiceMatrix extract_matrix(const Instance& inst, const LpProblem& p,
                                   const LpSolution& sol,
                                   const std::string& role = "x",
                                   double zero_tol = 1e-12) {
  ChoiceMatrix x(inst.n_customers, inst.n_suppliers);
  for (std::size_t k = 0; k < p.n_vars; ++k) {
    const auto& label = p.labels[k];
    if (label.role != role) continue;
    const double v = sol.x[k];
    x(label.i, label.j) = v > zero_tol ? v : 0.0;
  }
  return x;
}

}  // namespace mnlmatch
