#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mnlmatch/formulations.hpp"
#include "mnlmatch/instance.hpp"
#include "mnlmatch/lp.hpp"
#include "mnlmatch/mnl.hpp"
#include "mnlmatch/reward.hpp"

namespace mnlmatch {

enum class Regime { low, high };

inline const char* to_string(Regime r) {
  return r == Regime::low ? "low" : "high";
}

struct RegimeSolution {
  ChoiceMatrix x;
  double lp_value = 0.0;
};

struct InclusiveSolution {
  ChoiceMatrix x;
  Regime chosen_regime = Regime::low;
  ChoiceMatrix x_low;
  ChoiceMatrix x_high;
  double lp_low_value = 0.0;
  double lp_high_value = 0.0;
  EstimateReport est_low;
  EstimateReport est_high;
  double epsilon = 0.0;
  MenuDistribution menu_dists;
};

// Optimal point of the low-weight relaxation; zero outside E_-.
inline RegimeSolution solve_low_weight(const Instance& inst,
                                       const EdgeSplit& split) {
  const LpProblem lp = build_low_weight_lp(inst, split);
  const LpSolution sol = solve_lp_or_throw(lp);
  return {extract_matrix(inst, lp, sol), sol.objective_value};
}

// Optimal point of the high-weight relaxation; zero outside E_+.
inline RegimeSolution solve_high_weight(const Instance& inst,
                                        const EdgeSplit& split) {
  const LpProblem lp = build_high_weight_lp(inst, split);
  const LpSolution sol = solve_lp_or_throw(lp);
  return {extract_matrix(inst, lp, sol), sol.objective_value};
}

// Runs both regimes, estimates each candidate's regime objective with the
// DP estimator, and keeps the better one (low on ties).
inline InclusiveSolution solve_inclusive(const Instance& inst, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("solve_inclusive: epsilon in (0,1)");
  require_valid(inst);
  const EdgeSplit split = split_edges(inst);
  InclusiveSolution out;
  out.epsilon = epsilon;

  RegimeSolution low = solve_low_weight(inst, split);
  RegimeSolution high = solve_high_weight(inst, split);
  out.x_low = std::move(low.x);
  out.x_high = std::move(high.x);
  out.lp_low_value = low.lp_value;
  out.lp_high_value = high.lp_value;
  out.est_low = dp_estimate_inclusive(inst, out.x_low, epsilon, &split.low);
  out.est_high = dp_estimate_inclusive(inst, out.x_high, epsilon, &split.high);

  out.chosen_regime =
      out.est_low.value >= out.est_high.value ? Regime::low : Regime::high;
  out.x = out.chosen_regime == Regime::low ? out.x_low : out.x_high;
  out.menu_dists = decompose_all(inst, out.x);
  return out;
}

// Objective of the deterministic low-weight program at x:
//   sum_{E_-} r_ij w_ij x_ij / (1 + sum_{l != i, (l,j) in E_-} w_lj x_lj).
inline double low_deterministic_objective(const Instance& inst,
                                          const EdgeSplit& split,
                                          const ChoiceMatrix& x) {
  double total = 0.0;
  for (const auto& [i, j] : split.e_minus) {
    double others = 0.0;
    for (std::size_t l = 0; l < inst.n_customers; ++l)
      if (l != i && split.low(l, j)) others += inst.w(l, j) * x(l, j);
    total += inst.r(i, j) * inst.w(i, j) * x(i, j) / (1.0 + others);
  }
  return total;
}

// Largest leave-one-out load sum_{l != i, (l,j) in E_-} w_lj x_lj over E_-.
inline double max_leave_one_out_load(const Instance& inst,
                                     const EdgeSplit& split,
                                     const ChoiceMatrix& x) {
  double worst = 0.0;
  for (const auto& [i, j] : split.e_minus) {
    double s = 0.0;
    for (std::size_t l = 0; l < inst.n_customers; ++l)
      if (l != i && split.low(l, j)) s += inst.w(l, j) * x(l, j);
    worst = std::max(worst, s);
  }
  return worst;
}

// Literal per-edge scaling x_ij / max(load_ij, 1). Its leave-one-out loads
// can exceed 1: two selectors of load 0.8 each keep alpha = 1, and a third
// customer then sees 1.6.
inline ChoiceMatrix scale_low_transform_per_edge(const Instance& inst,
                                                 const EdgeSplit& split,
                                                 const ChoiceMatrix& x) {
  ChoiceMatrix out(inst.n_customers, inst.n_suppliers);
  for (const auto& [i, j] : split.e_minus) {
    double load = 0.0;
    for (std::size_t l = 0; l < inst.n_customers; ++l)
      if (l != i && split.low(l, j)) load += inst.w(l, j) * x(l, j);
    out(i, j) = x(i, j) / std::max(load, 1.0);
  }
  return out;
}

// Divides supplier j's low-weight column by alpha_j = max(1, max_i load_ij).
// Every leave-one-out load becomes load_ij / alpha_j <= 1, and since
// load_kj <= load_ij + w_ij x_ij <= 1 + load_ij on E_-, alpha_j <= 1 + load_ij,
// so sum r w x^ dominates the deterministic objective of the input. The
// result is below x, hence stays in the customer polyhedron.
inline ChoiceMatrix scale_low_transform(const Instance& inst,
                                        const EdgeSplit& split,
                                        const ChoiceMatrix& x) {
  std::vector<double> alpha(inst.n_suppliers, 1.0);
  for (const auto& [i, j] : split.e_minus) {
    double load = 0.0;
    for (std::size_t l = 0; l < inst.n_customers; ++l)
      if (l != i && split.low(l, j)) load += inst.w(l, j) * x(l, j);
    alpha[j] = std::max(alpha[j], load);
  }
  ChoiceMatrix out(inst.n_customers, inst.n_suppliers);
  for (const auto& [i, j] : split.e_minus) out(i, j) = x(i, j) / alpha[j];
  return out;
}

// For each supplier whose high-weight mass exceeds 3/5: order its E_+
// customers by reward (descending, ties by index), keep the shortest prefix
// whose mass exceeds 3/5 scaled by 3/8, and zero the rest. Other suppliers
// keep their E_+ column. Entries outside E_+ are zeroed.
inline ChoiceMatrix truncate_high_transform(const Instance& inst,
                                            const EdgeSplit& split,
                                            const ChoiceMatrix& x) {
  ChoiceMatrix out(inst.n_customers, inst.n_suppliers);
  for (std::size_t j = 0; j < inst.n_suppliers; ++j) {
    std::vector<std::size_t> column;
    double mass = 0.0;
    for (std::size_t l = 0; l < inst.n_customers; ++l) {
      if (!split.high(l, j)) continue;
      column.push_back(l);
      mass += x(l, j);
    }
    if (mass <= kHighWeightCap) {
      for (std::size_t l : column) out(l, j) = x(l, j);
      continue;
    }
    std::stable_sort(column.begin(), column.end(),
                     [&](std::size_t a, std::size_t b) {
                       return inst.r(a, j) > inst.r(b, j);
                     });
    double prefix = 0.0;
    for (std::size_t l : column) {
      out(l, j) = 3.0 / 8.0 * x(l, j);
      prefix += x(l, j);
      if (prefix > kHighWeightCap) break;
    }
  }
  return out;
}

}  // namespace mnlmatch
