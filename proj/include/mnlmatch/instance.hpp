#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mnlmatch/matrix.hpp"
#include "mnlmatch/rng.hpp"

namespace mnlmatch {

// A two-sided market: rewards r[i][j], customer MNL weights u[i][j] and
// supplier MNL weights w[i][j]. Outside options carry weight 1 on both sides
// and are never stored.
struct Instance {
  std::size_t n_customers = 0;
  std::size_t n_suppliers = 0;
  Matrix rewards;
  Matrix cust_weights;
  Matrix supp_weights;

  double r(std::size_t i, std::size_t j) const { return rewards(i, j); }
  double u(std::size_t i, std::size_t j) const { return cust_weights(i, j); }
  double w(std::size_t i, std::size_t j) const { return supp_weights(i, j); }

  friend bool operator==(const Instance&, const Instance&) = default;
};

class InvalidInstance : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Violation {
  std::string matrix;  // "rewards", "customer_weights", ... or "instance"
  std::size_t row = 0;
  std::size_t col = 0;
  std::string rule;

  std::string message() const {
    if (rule == "shape mismatch" || rule == "empty dimension") {
      return rule + " in " + matrix;
    }
    std::ostringstream os;
    os << rule << " at (" << row << "," << col << ")";
    if (matrix != "rewards") os << " in " << matrix;
    return os.str();
  }
};

struct ValidationResult {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  std::string summary() const {
    std::string out;
    for (const auto& v : violations) {
      if (!out.empty()) out += "; ";
      out += v.message();
    }
    return out;
  }
};

inline ValidationResult validate_instance(const Instance& inst) {
  ValidationResult result;
  if (inst.n_customers == 0 || inst.n_suppliers == 0) {
    result.violations.push_back({"instance", 0, 0, "empty dimension"});
  }
  struct Named {
    const char* name;
    const char* what;
    const Matrix* m;
  };
  const Named mats[] = {{"rewards", "reward", &inst.rewards},
                        {"customer_weights", "customer weight",
                         &inst.cust_weights},
                        {"supplier_weights", "supplier weight",
                         &inst.supp_weights}};
  for (const auto& [name, what, m] : mats) {
    if (m->rows() != inst.n_customers || m->cols() != inst.n_suppliers) {
      result.violations.push_back({name, 0, 0, "shape mismatch"});
      continue;
    }
    for (std::size_t i = 0; i < m->rows(); ++i) {
      for (std::size_t j = 0; j < m->cols(); ++j) {
        const double v = (*m)(i, j);
        if (!std::isfinite(v)) {
          result.violations.push_back(
              {name, i, j, std::string("non-finite ") + what});
        } else if (v < 0.0) {
          result.violations.push_back(
              {name, i, j, std::string("negative ") + what});
        }
      }
    }
  }
  return result;
}

inline void require_valid(const Instance& inst) {
  auto res = validate_instance(inst);
  if (!res.ok()) throw InvalidInstance("invalid instance: " + res.summary());
}

struct Edge {
  std::size_t customer;
  std::size_t supplier;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// Partition of all customer-supplier pairs into low-weight (w <= 1) and
// high-weight (w > 1) edges.
struct EdgeSplit {
  std::vector<Edge> e_minus;
  std::vector<Edge> e_plus;
  EdgeMask low;   // membership mask of e_minus
  EdgeMask high;  // membership mask of e_plus
};

inline EdgeSplit split_edges(const Instance& inst) {
  EdgeSplit split;
  split.low = EdgeMask(inst.n_customers, inst.n_suppliers);
  split.high = EdgeMask(inst.n_customers, inst.n_suppliers);
  for (std::size_t i = 0; i < inst.n_customers; ++i) {
    for (std::size_t j = 0; j < inst.n_suppliers; ++j) {
      if (inst.w(i, j) <= 1.0) {
        split.e_minus.push_back({i, j});
        split.low.set(i, j, true);
      } else {
        split.e_plus.push_back({i, j});
        split.high.set(i, j, true);
      }
    }
  }
  return split;
}

enum class WeightScale { uniform, log_uniform };

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

struct GenParams {
  Range reward_range{0.0, 1.0};
  Range cust_weight_range{0.1, 10.0};
  Range supp_weight_range{0.1, 10.0};
  WeightScale weight_scale = WeightScale::log_uniform;
  std::uint64_t seed = 0;
};

namespace detail {

inline void check_range(const Range& r, const char* what, bool log_scale) {
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo < 0.0 ||
      r.lo > r.hi) {
    throw std::invalid_argument(std::string(what) +
                                " range must satisfy 0 <= lo <= hi (finite)");
  }
  if (log_scale && r.lo <= 0.0) {
    throw std::invalid_argument(std::string(what) +
                                " range must have lo > 0 for log_uniform");
  }
}

inline double draw(SplitMix64& rng, const Range& r, bool log_scale) {
  const double t = rng.uniform01();
  if (!log_scale) return r.lo + (r.hi - r.lo) * t;
  const double a = std::log(r.lo);
  const double b = std::log(r.hi);
  // Clamp guards exp/log rounding at the ends.
  return std::min(r.hi, std::max(r.lo, std::exp(a + (b - a) * t)));
}

}  // namespace detail

// Rewards are always uniform; the weight scale applies to u and w.
inline Instance generate_random(std::size_t n_customers,
                                std::size_t n_suppliers,
                                const GenParams& params) {
  if (n_customers == 0) throw std::invalid_argument("customers must be >= 1");
  if (n_suppliers == 0) throw std::invalid_argument("suppliers must be >= 1");
  const bool log_w = params.weight_scale == WeightScale::log_uniform;
  detail::check_range(params.reward_range, "reward", false);
  detail::check_range(params.cust_weight_range, "customer weight", log_w);
  detail::check_range(params.supp_weight_range, "supplier weight", log_w);

  Instance inst{n_customers, n_suppliers, Matrix(n_customers, n_suppliers),
                Matrix(n_customers, n_suppliers),
                Matrix(n_customers, n_suppliers)};
  SplitMix64 rng(params.seed);
  for (std::size_t i = 0; i < n_customers; ++i)
    for (std::size_t j = 0; j < n_suppliers; ++j)
      inst.rewards(i, j) = detail::draw(rng, params.reward_range, false);
  for (std::size_t i = 0; i < n_customers; ++i)
    for (std::size_t j = 0; j < n_suppliers; ++j)
      inst.cust_weights(i, j) =
          detail::draw(rng, params.cust_weight_range, log_w);
  for (std::size_t i = 0; i < n_customers; ++i)
    for (std::size_t j = 0; j < n_suppliers; ++j)
      inst.supp_weights(i, j) =
          detail::draw(rng, params.supp_weight_range, log_w);
  return inst;
}

// Two customers, two suppliers; only pair (0,0) is rewarding and all weights
// are 1. Inclusive menus on this market are not subadditive.
inline Instance preset_two_by_two() {
  return Instance{2, 2, Matrix::from_rows({{1.0, 0.0}, {0.0, 0.0}}),
                  Matrix(2, 2, 1.0), Matrix(2, 2, 1.0)};
}

// One customer, one supplier, u = w = r = 1.
inline Instance preset_unit() {
  return Instance{1, 1, Matrix(1, 1, 1.0), Matrix(1, 1, 1.0),
                  Matrix(1, 1, 1.0)};
}

}  // namespace mnlmatch
