#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mnlmatch/instance.hpp"
#include "mnlmatch/matrix.hpp"
#include "mnlmatch/rng.hpp"

namespace mnlmatch {

inline constexpr double kFeasibilityTol = 1e-9;

// Sentinel for the no-choice alternative.
inline constexpr std::size_t kOutside = std::numeric_limits<std::size_t>::max();

// Ascending index sets.
using SupplierSet = std::vector<std::size_t>;
using CustomerSet = std::vector<std::size_t>;

// x[i][j]: probability that customer i selects supplier j.
class ChoiceMatrix : public Matrix {
 public:
  using Matrix::Matrix;
  ChoiceMatrix() = default;
  explicit ChoiceMatrix(Matrix m) : Matrix(std::move(m)) {}

  // Entries outside `mask` set to zero.
  ChoiceMatrix restricted(const EdgeMask& mask) const {
    ChoiceMatrix out = *this;
    for (std::size_t i = 0; i < rows(); ++i)
      for (std::size_t j = 0; j < cols(); ++j)
        if (!mask(i, j)) out(i, j) = 0.0;
    return out;
  }
};

struct Menu {
  std::vector<SupplierSet> offers;  // offers[i] = M_i
  friend bool operator==(const Menu&, const Menu&) = default;
};

struct WeightedAssortment {
  SupplierSet assortment;
  double prob = 0.0;
};

// Nested assortments S_0 = {} c S_1 c ... with probabilities summing to 1.
using MenuRow = std::vector<WeightedAssortment>;

struct MenuDistribution {
  std::vector<MenuRow> rows;  // one per customer
};

class InfeasiblePoint : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// MNL probability of picking `j` (or kOutside) from `offered`, with weight 1
// for the outside option.
inline double mnl_choice_prob(std::span<const double> weights,
                              const std::vector<std::size_t>& offered,
                              std::size_t j) {
  double denom = 1.0;
  bool present = false;
  for (std::size_t k : offered) {
    denom += weights[k];
    present = present || k == j;
  }
  if (j == kOutside) return 1.0 / denom;
  return present ? weights[j] / denom : 0.0;
}

inline double choice_prob(const Instance& inst, std::size_t customer,
                          const SupplierSet& menu_row, std::size_t j) {
  return mnl_choice_prob(inst.cust_weights.row(customer), menu_row, j);
}

// Expected reward from supplier j when it sees every customer in C_j.
inline double f_inclusive(const Instance& inst, std::size_t j,
                          const CustomerSet& selectors) {
  double num = 0.0;
  double denom = 1.0;
  for (std::size_t i : selectors) {
    num += inst.r(i, j) * inst.w(i, j);
    denom += inst.w(i, j);
  }
  return num / denom;
}

struct CustomizedChoice {
  double value = 0.0;
  CustomerSet subset;  // a maximizing T_j, ascending
};

// Best filtered subset T_j of C_j. MNL assortment revenue is maximized by a
// prefix of the customers sorted by reward, so only |C_j| + 1 candidates
// are evaluated.
inline CustomizedChoice f_customized(const Instance& inst, std::size_t j,
                                     const CustomerSet& selectors) {
  std::vector<std::size_t> order;
  order.reserve(selectors.size());
  for (std::size_t i : selectors)
    if (inst.w(i, j) > 0.0 && inst.r(i, j) > 0.0) order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a,
                                                   std::size_t b) {
    return inst.r(a, j) > inst.r(b, j) || (inst.r(a, j) == inst.r(b, j) && a < b);
  });
  CustomizedChoice best;
  double num = 0.0;
  double denom = 1.0;
  std::size_t best_len = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    num += inst.r(order[k], j) * inst.w(order[k], j);
    denom += inst.w(order[k], j);
    const double value = num / denom;
    if (value > best.value) {
      best.value = value;
      best_len = k + 1;
    }
  }
  best.subset.assign(order.begin(), order.begin() + best_len);
  std::sort(best.subset.begin(), best.subset.end());
  return best;
}

// Membership in the MNL choice polyhedron
//   { x >= 0 : x_k / v_k <= 1 - sum_l x_l  for all k },
// which serves for a customer row (v = u_i.) and a supplier column (v = w_.j).
inline bool polyhedron_row_feasible(std::span<const double> weights,
                                    std::span<const double> x,
                                    double tol = kFeasibilityTol) {
  if (weights.size() != x.size()) return false;
  double total = 0.0;
  for (double v : x) {
    if (v < -tol) return false;
    total += v;
  }
  const double slack = 1.0 - total;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (weights[k] <= 0.0) {
      if (x[k] > tol) return false;
      continue;
    }
    if (x[k] / weights[k] > slack + tol) return false;
  }
  return true;
}

inline bool choice_matrix_feasible(const Instance& inst, const ChoiceMatrix& x,
                                   double tol = kFeasibilityTol) {
  if (x.rows() != inst.n_customers || x.cols() != inst.n_suppliers) {
    return false;
  }
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (!polyhedron_row_feasible(inst.cust_weights.row(i), x.row(i), tol))
      return false;
  }
  return true;
}

// Distribution over nested assortments realizing `x` in expectation: sort
// alternatives by x_k / v_k descending (ties by index), take prefixes S_t,
// and assign
//   psi_t = (ratio_t - ratio_{t+1}) * (1 + sum_{l<=t} v_l),
//   psi_n = ratio_n * (1 + sum_l v_l),
// where ratio_0 = 1 - sum x is the outside option's share.
// Alternatives with x_k = 0 are dropped before building the prefixes.
inline MenuRow decompose(std::span<const double> weights,
                         std::span<const double> x,
                         double tol = kFeasibilityTol) {
  if (!polyhedron_row_feasible(weights, x, tol)) {
    throw InfeasiblePoint("decompose: point is outside the MNL polyhedron");
  }
  struct Alt {
    std::size_t index;
    double ratio;
  };
  std::vector<Alt> alts;
  double total = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (weights[k] > 0.0 && x[k] > 0.0) {
      alts.push_back({k, x[k] / weights[k]});
      total += x[k];
    }
  }
  std::stable_sort(alts.begin(), alts.end(), [](const Alt& a, const Alt& b) {
    return a.ratio > b.ratio;
  });

  MenuRow row;
  row.reserve(alts.size() + 1);
  double prev_ratio = 1.0 - total;  // outside option, weight 1
  double prefix_weight = 1.0;
  SupplierSet prefix;
  for (std::size_t t = 0; t <= alts.size(); ++t) {
    const double next_ratio = t < alts.size() ? alts[t].ratio : 0.0;
    row.push_back({prefix, (prev_ratio - next_ratio) * prefix_weight});
    if (t == alts.size()) break;
    prefix.insert(std::upper_bound(prefix.begin(), prefix.end(),
                                   alts[t].index),
                  alts[t].index);
    prefix_weight += weights[alts[t].index];
    prev_ratio = next_ratio;
  }
  double sum = 0.0;
  for (auto& entry : row) {
    if (entry.prob < 0.0) entry.prob = 0.0;  // only within tol of feasible
    sum += entry.prob;
  }
  for (auto& entry : row) entry.prob /= sum;
  return row;
}

inline MenuDistribution decompose_all(const Instance& inst,
                                      const ChoiceMatrix& x,
                                      double tol = kFeasibilityTol) {
  MenuDistribution dist;
  dist.rows.reserve(inst.n_customers);
  for (std::size_t i = 0; i < inst.n_customers; ++i) {
    try {
      dist.rows.push_back(decompose(inst.cust_weights.row(i), x.row(i), tol));
    } catch (const InfeasiblePoint&) {
      throw InfeasiblePoint("decompose: row " + std::to_string(i) +
                            " is outside the customer polyhedron");
    }
  }
  return dist;
}

inline const SupplierSet& sample_assortment(const MenuRow& row,
                                            SplitMix64& rng) {
  const double t = rng.uniform01();
  double acc = 0.0;
  for (const auto& entry : row) {
    acc += entry.prob;
    if (t < acc) return entry.assortment;
  }
  // t landed in the rounding gap above the final partial sum.
  for (auto it = row.rbegin(); it != row.rend(); ++it)
    if (it->prob > 0.0) return it->assortment;
  return row.back().assortment;
}

// Customers' assortments are drawn one after another from the same stream,
// so they are mutually independent.
inline Menu sample_menu(const MenuDistribution& dist, SplitMix64& rng) {
  Menu menu;
  menu.offers.reserve(dist.rows.size());
  for (const auto& row : dist.rows) menu.offers.push_back(sample_assortment(row, rng));
  return menu;
}

inline ChoiceMatrix menu_to_choice_matrix(const Instance& inst,
                                          const Menu& menu) {
  ChoiceMatrix x(inst.n_customers, inst.n_suppliers);
  for (std::size_t i = 0; i < inst.n_customers; ++i) {
    const auto& offered = menu.offers[i];
    for (std::size_t j : offered) x(i, j) = choice_prob(inst, i, offered, j);
  }
  return x;
}

}  // namespace mnlmatch
