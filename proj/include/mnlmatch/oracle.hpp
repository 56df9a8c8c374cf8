#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "mnlmatch/instance.hpp"
#include "mnlmatch/mnl.hpp"
#include "mnlmatch/reward.hpp"

namespace mnlmatch {

// Expected reward of a deterministic menu. A menu induces independent
// selections across customers for each supplier, with marginals given by
// the MNL choice probabilities, so the choice-matrix enumeration applies.
inline double exact_menu_reward(const Instance& inst, const Menu& menu,
                                Model model,
                                std::size_t cutoff = kDefaultEnumerationCutoff) {
  return exact_reward(inst, menu_to_choice_matrix(inst, menu), model, nullptr,
                      cutoff);
}

// f_customized by trying every subset of the selectors. Reference for the
// prefix search in f_customized.
inline CustomizedChoice f_customized_exhaustive(const Instance& inst,
                                                std::size_t j,
                                                const CustomerSet& selectors) {
  if (selectors.size() > 24) {
    throw EnumerationLimit("f_customized_exhaustive: too many selectors");
  }
  CustomizedChoice best;
  const std::uint64_t n_sets = std::uint64_t{1} << selectors.size();
  for (std::uint64_t bits = 1; bits < n_sets; ++bits) {
    double num = 0.0;
    double denom = 1.0;
    for (std::size_t t = 0; t < selectors.size(); ++t) {
      if (!((bits >> t) & 1U)) continue;
      num += inst.r(selectors[t], j) * inst.w(selectors[t], j);
      denom += inst.w(selectors[t], j);
    }
    if (num / denom > best.value) {
      best.value = num / denom;
      best.subset.clear();
      for (std::size_t t = 0; t < selectors.size(); ++t)
        if ((bits >> t) & 1U) best.subset.push_back(selectors[t]);
    }
  }
  return best;
}

struct OracleLimits {
  std::uint64_t max_menus = std::uint64_t{1} << 20;
  std::size_t cutoff = kDefaultEnumerationCutoff;
};

struct OracleResult {
  Menu best_menu;
  double opt_value = 0.0;
  std::uint64_t menus_evaluated = 0;
};

class OracleBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Number of menus (2^|S|)^|C|, or 0 if it does not fit in 64 bits.
inline std::uint64_t menu_count(const Instance& inst) {
  const std::size_t bits = inst.n_customers * inst.n_suppliers;
  if (bits >= 64) return 0;
  return std::uint64_t{1} << bits;
}

// Exhaustive search over all menus. Menu code c assigns customer i the
// supplier set encoded by bits [i|S|, (i+1)|S|) of c; codes are scanned in
// increasing order and only a strict improvement replaces the incumbent.
inline OracleResult brute_force_opt(const Instance& inst, Model model,
                                    const OracleLimits& limits = {}) {
  require_valid(inst);
  const std::uint64_t total = menu_count(inst);
  if (total == 0 || total > limits.max_menus) {
    throw OracleBudgetExceeded(
        "brute_force_opt: needs 2^" +
        std::to_string(inst.n_customers * inst.n_suppliers) +
        " menu evaluations, budget is " + std::to_string(limits.max_menus));
  }
  const std::size_t m = inst.n_suppliers;
  auto decode = [&](std::uint64_t code) {
    Menu menu;
    menu.offers.resize(inst.n_customers);
    for (std::size_t i = 0; i < inst.n_customers; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if ((code >> (i * m + j)) & 1U) menu.offers[i].push_back(j);
    return menu;
  };

  OracleResult res;
  std::uint64_t best_code = 0;
  for (std::uint64_t code = 0; code < total; ++code) {
    const double v = exact_menu_reward(inst, decode(code), model, limits.cutoff);
    ++res.menus_evaluated;
    if (code == 0 || v > res.opt_value) {
      res.opt_value = v;
      best_code = code;
    }
  }
  res.best_menu = decode(best_code);
  return res;
}

}  // namespace mnlmatch
