#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "mnlmatch/instance.hpp"
#include "mnlmatch/mnl.hpp"
#include "mnlmatch/rng.hpp"

namespace mnlmatch {

enum class Model { customized, inclusive };

inline const char* to_string(Model m) {
  return m == Model::customized ? "customized" : "inclusive";
}

inline Model parse_model(const std::string& s) {
  if (s == "customized") return Model::customized;
  if (s == "inclusive") return Model::inclusive;
  throw std::invalid_argument("unknown model '" + s +
                              "' (expected customized or inclusive)");
}

// Expected reward collected from supplier j given its set of selectors.
inline double supplier_reward(const Instance& inst, Model model, std::size_t j,
                              const CustomerSet& selectors) {
  return model == Model::inclusive ? f_inclusive(inst, j, selectors)
                                   : f_customized(inst, j, selectors).value;
}

enum class EstimateMethod { exact, monte_carlo, dp };

inline const char* to_string(EstimateMethod m) {
  switch (m) {
    case EstimateMethod::exact: return "exact";
    case EstimateMethod::monte_carlo: return "monte_carlo";
    case EstimateMethod::dp: return "dp";
  }
  return "unknown";
}

// A reward estimate together with an interval that contains the true value:
// exactly for `exact` and `dp`, at the 3-sigma level for `monte_carlo`.
struct EstimateReport {
  double value = 0.0;
  EstimateMethod method = EstimateMethod::exact;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t samples = 0;  // monte_carlo only
  double epsilon = 0.0;     // dp only

  static EstimateReport exact(double v) {
    return {v, EstimateMethod::exact, v, v, 0, 0.0};
  }
};

inline constexpr std::size_t kDefaultEnumerationCutoff = 20;

class EnumerationLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedModel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

// Customers that can select supplier j under x (and `restrict`, if given).
inline CustomerSet column_support(const ChoiceMatrix& x, std::size_t j,
                                  const EdgeMask* restrict) {
  CustomerSet out;
  for (std::size_t i = 0; i < x.rows(); ++i)
    if (x(i, j) > 0.0 && (restrict == nullptr || (*restrict)(i, j)))
      out.push_back(i);
  return out;
}

}  // namespace detail

inline std::size_t max_column_support(const ChoiceMatrix& x,
                                      const EdgeMask* restrict = nullptr) {
  std::size_t best = 0;
  for (std::size_t j = 0; j < x.cols(); ++j)
    best = std::max(best, detail::column_support(x, j, restrict).size());
  return best;
}

// R^P(x) = sum_j E[f_j(C_j)] with C_j containing each i independently with
// probability x_ij, by enumerating every realization of C_j. With `restrict`
// only the masked edges exist, which yields the regime objectives.
inline double exact_reward(const Instance& inst, const ChoiceMatrix& x,
                           Model model, const EdgeMask* restrict = nullptr,
                           std::size_t cutoff = kDefaultEnumerationCutoff) {
  double total = 0.0;
  for (std::size_t j = 0; j < inst.n_suppliers; ++j) {
    const CustomerSet support = detail::column_support(x, j, restrict);
    const std::size_t k = support.size();
    if (k > cutoff) {
      throw EnumerationLimit(
          "exact_reward: supplier " + std::to_string(j) + " has " +
          std::to_string(k) + " possible selectors (cutoff " +
          std::to_string(cutoff) + "); use the mc or dp estimator");
    }
    CustomerSet realized;
    realized.reserve(k);
    const std::uint64_t n_sets = std::uint64_t{1} << k;
    for (std::uint64_t bits = 0; bits < n_sets; ++bits) {
      double prob = 1.0;
      realized.clear();
      for (std::size_t t = 0; t < k; ++t) {
        const double p = x(support[t], j);
        if ((bits >> t) & 1U) {
          prob *= p;
          realized.push_back(support[t]);
        } else {
          prob *= 1.0 - p;
        }
      }
      if (prob == 0.0 || realized.empty()) continue;
      total += prob * supplier_reward(inst, model, j, realized);
    }
  }
  return total;
}

struct SimulationOutcome {
  std::vector<Edge> matching;
  double reward = 0.0;
};

// One run of the two-step process: customers choose from their menus, then
// each supplier chooses among its selectors (all of them in the inclusive
// model, the platform's best subset in the customized model).
inline SimulationOutcome simulate_once(const Instance& inst, const Menu& menu,
                                       Model model, SplitMix64& rng) {
  std::vector<CustomerSet> selectors(inst.n_suppliers);
  for (std::size_t i = 0; i < inst.n_customers; ++i) {
    const auto& offered = menu.offers[i];
    double denom = 1.0;
    for (std::size_t j : offered) denom += inst.u(i, j);
    double t = rng.uniform01() * denom;
    for (std::size_t j : offered) {
      t -= inst.u(i, j);
      if (t < 0.0) {
        selectors[j].push_back(i);
        break;
      }
    }
  }
  SimulationOutcome out;
  for (std::size_t j = 0; j < inst.n_suppliers; ++j) {
    auto& candidates = selectors[j];
    if (candidates.empty()) continue;
    std::sort(candidates.begin(), candidates.end());
    if (model == Model::customized) {
      candidates = f_customized(inst, j, candidates).subset;
    }
    double denom = 1.0;
    for (std::size_t i : candidates) denom += inst.w(i, j);
    double t = rng.uniform01() * denom;
    for (std::size_t i : candidates) {
      t -= inst.w(i, j);
      if (t < 0.0) {
        out.matching.push_back({i, j});
        out.reward += inst.r(i, j);
        break;
      }
    }
  }
  return out;
}

// Largest reward any single matching can collect.
inline double reward_upper_bound(const Instance& inst) {
  double total = 0.0;
  for (std::size_t j = 0; j < inst.n_suppliers; ++j) {
    double best = 0.0;
    for (std::size_t i = 0; i < inst.n_customers; ++i)
      best = std::max(best, inst.r(i, j));
    total += best;
  }
  return total;
}

struct McOptions {
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

// Averages simulate_once over menus drawn from the nested-assortment
// decomposition of x. Sample s always uses stream (seed, s) and blocks are
// merged in index order, so the result does not depend on `workers`.
inline EstimateReport mc_reward(const Instance& inst, const ChoiceMatrix& x,
                                Model model, const McOptions& opt) {
  if (opt.samples == 0) throw std::invalid_argument("mc_reward: samples >= 1");
  const MenuDistribution dist = decompose_all(inst, x);

  constexpr std::size_t kBlock = 1024;
  const std::size_t n_blocks = (opt.samples + kBlock - 1) / kBlock;
  struct Moments {
    double count = 0.0;
    double mean = 0.0;
    double m2 = 0.0;
  };
  std::vector<Moments> blocks(n_blocks);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1)) {
      Moments acc;
      const std::size_t end = std::min(opt.samples, (b + 1) * kBlock);
      for (std::size_t s = b * kBlock; s < end; ++s) {
        SplitMix64 rng = SplitMix64::stream(opt.seed, s);
        const Menu menu = sample_menu(dist, rng);
        const double v = simulate_once(inst, menu, model, rng).reward;
        acc.count += 1.0;
        const double delta = v - acc.mean;
        acc.mean += delta / acc.count;
        acc.m2 += delta * (v - acc.mean);
      }
      blocks[b] = acc;
    }
  };
  const unsigned workers = std::max(1U, opt.workers);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  Moments total;
  for (const auto& b : blocks) {
    const double n = total.count + b.count;
    const double delta = b.mean - total.mean;
    total.mean += delta * b.count / n;
    total.m2 += b.m2 + delta * delta * total.count * b.count / n;
    total.count = n;
  }

  EstimateReport rep;
  rep.method = EstimateMethod::monte_carlo;
  rep.samples = opt.samples;
  rep.value = total.mean;
  const double cap = reward_upper_bound(inst);
  if (opt.samples < 2) {
    rep.lower = 0.0;
    rep.upper = cap;
  } else {
    const double sd = std::sqrt(total.m2 / (total.count - 1.0));
    const double half = 3.0 * sd / std::sqrt(total.count);
    rep.lower = std::max(0.0, rep.value - half);
    rep.upper = std::min(cap, rep.value + half);
  }
  rep.lower = std::min(rep.lower, rep.value);
  rep.upper = std::max(rep.upper, rep.value);
  return rep;
}

// Geometric grid {1, q, q^2, ..., q^L} with q = 1 + epsilon/n and L the least
// integer with q^L >= 1 + n * w_max.
struct DpGrid {
  double epsilon = 0.0;
  std::size_t n = 1;
  double ratio = 1.0;
  std::vector<double> points;

  std::size_t L() const noexcept { return points.size() - 1; }

  // Index of the smallest grid point >= v, or points.size() if v lies above
  // the grid.
  std::size_t index_up(double v) const noexcept {
    if (v <= points.front()) return 0;
    return static_cast<std::size_t>(
        std::lower_bound(points.begin(), points.end(), v) - points.begin());
  }

  double round_up(double v) const {
    const std::size_t k = index_up(v);
    if (k == points.size()) {
      throw std::out_of_range("DpGrid::round_up: value above the grid");
    }
    return points[k];
  }
};

inline DpGrid build_grid(std::size_t n, double epsilon, double w_max) {
  if (n < 1) throw std::invalid_argument("build_grid: n >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("build_grid: epsilon in (0,1)");
  if (!(w_max > 0.0) || !std::isfinite(w_max))
    throw std::invalid_argument("build_grid: w_max > 0");
  DpGrid g;
  g.epsilon = epsilon;
  g.n = n;
  g.ratio = 1.0 + epsilon / static_cast<double>(n);
  const double target = 1.0 + static_cast<double>(n) * w_max;
  g.points.push_back(1.0);
  while (g.points.back() < target) g.points.push_back(g.points.back() * g.ratio);
  return g;
}

// Deterministic estimate of the inclusive objective,
//   R(x) = sum_{ij} r_ij w_ij x_ij E[1 / (1 + w_ij + sum_{l != i} w_lj I_lj)],
// where each expectation is evaluated by the recursion
//   F(k, a) = p_k F(k+1, up(a + w_k)) + (1 - p_k) F(k+1, a),  F(n+1, a) = 1/a
// over grid points a, `up` rounding to the next point above. Rounding only
// enlarges denominators, so the estimate never exceeds R(x); each rounding
// loses at most a factor 1 + eps_int/n. The caller's epsilon is halved
// internally so that the reported interval [R~, R~ / (1 - epsilon)] contains
// R(x).
inline EstimateReport dp_estimate_inclusive(const Instance& inst,
                                            const ChoiceMatrix& x,
                                            double epsilon,
                                            const EdgeMask* restrict = nullptr) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("dp_estimate_inclusive: epsilon in (0,1)");
  const double eps_int = epsilon / 2.0;
  const std::size_t n_grid = inst.n_customers;

  std::vector<CustomerSet> members(inst.n_suppliers);
  double widest = 0.0;
  for (std::size_t j = 0; j < inst.n_suppliers; ++j) {
    double col = 0.0;
    for (std::size_t i : detail::column_support(x, j, restrict)) {
      if (inst.w(i, j) <= 0.0) continue;
      members[j].push_back(i);
      col += inst.w(i, j);
    }
    widest = std::max(widest, col);
  }

  EstimateReport rep;
  rep.method = EstimateMethod::dp;
  rep.epsilon = epsilon;
  if (widest <= 0.0) return rep;

  // Every reachable state stays below (1 + widest) q^(n+1), since at most
  // n_grid roundings happen along a path; size the grid to cover that.
  const double q = 1.0 + eps_int / static_cast<double>(n_grid);
  const double top = (1.0 + widest) * std::pow(q, static_cast<double>(n_grid + 1));
  const DpGrid grid =
      build_grid(n_grid, eps_int, (top - 1.0) / static_cast<double>(n_grid));
  const std::size_t size = grid.points.size();
  const std::size_t last = size - 1;

  std::vector<double> cur(size), nxt(size);
  std::vector<std::size_t> jump(size);
  double estimate = 0.0;
  for (std::size_t j = 0; j < inst.n_suppliers; ++j) {
    for (std::size_t i : members[j]) {
      const double coef = inst.r(i, j) * inst.w(i, j) * x(i, j);
      if (coef <= 0.0) continue;
      for (std::size_t a = 0; a < size; ++a) nxt[a] = 1.0 / grid.points[a];
      for (auto it = members[j].rbegin(); it != members[j].rend(); ++it) {
        const std::size_t l = *it;
        if (l == i) continue;
        const double p = x(l, j);
        const double wl = inst.w(l, j);
        // up(a + w) is nondecreasing in a: sweep once.
        std::size_t k = 0;
        for (std::size_t a = 0; a < size; ++a) {
          const double v = grid.points[a] + wl;
          while (k < size && grid.points[k] < v) ++k;
          jump[a] = std::min(k, last);
        }
        for (std::size_t a = 0; a < size; ++a)
          cur[a] = p * nxt[jump[a]] + (1.0 - p) * nxt[a];
        std::swap(cur, nxt);
      }
      const std::size_t start = std::min(grid.index_up(1.0 + inst.w(i, j)), last);
      estimate += coef * nxt[start];
    }
  }
  rep.value = estimate;
  rep.lower = estimate;
  rep.upper = estimate / (1.0 - 2.0 * eps_int);
  return rep;
}

inline EstimateReport dp_estimate(const Instance& inst, const ChoiceMatrix& x,
                                  Model model, double epsilon,
                                  const EdgeMask* restrict = nullptr) {
  if (model != Model::inclusive) {
    throw UnsupportedModel(
        "dp estimator covers the inclusive model only; use mc for customized");
  }
  return dp_estimate_inclusive(inst, x, epsilon, restrict);
}

// E[1 / (1 + Y)] for Y ~ Poisson(lambda), i.e. (1 - e^-lambda) / lambda.
inline double poisson_inverse_moment(double lambda) {
  if (!(lambda >= 0.0)) {
    throw std::invalid_argument("poisson_inverse_moment: lambda >= 0");
  }
  if (lambda == 0.0) return 1.0;
  return -std::expm1(-lambda) / lambda;
}

}  // namespace mnlmatch
