#pragma once

#include <cstddef>
#include <cstdint>

#include "mnlmatch/formulations.hpp"
#include "mnlmatch/instance.hpp"
#include "mnlmatch/lp.hpp"
#include "mnlmatch/mnl.hpp"
#include "mnlmatch/reward.hpp"

namespace mnlmatch {

struct EstimationOptions {
  std::size_t cutoff = kDefaultEnumerationCutoff;
  std::size_t mc_samples = 100000;
  std::uint64_t mc_seed = 0;
  unsigned workers = 1;
};

struct CustomizedSolution {
  ChoiceMatrix x;
  ChoiceMatrix y;  // LP partner of x; kept for auditing only
  double lp_value = 0.0;
  MenuDistribution menu_dists;
  EstimateReport reward_estimate;
};

// Exact when every supplier's support fits under the cutoff, else sampled.
inline EstimateReport estimate_reward(const Instance& inst,
                                      const ChoiceMatrix& x, Model model,
                                      const EstimationOptions& opt) {
  if (max_column_support(x) <= opt.cutoff) {
    return EstimateReport::exact(exact_reward(inst, x, model, nullptr, opt.cutoff));
  }
  return mc_reward(inst, x, model, {opt.mc_samples, opt.mc_seed, opt.workers});
}

// Solves the customized LP and realizes its x-part as a distribution over
// menus. The expected reward of that distribution is at least a third of the
// LP value, which itself bounds the best menu from above.
inline CustomizedSolution solve_customized(const Instance& inst,
                                           const EstimationOptions& opt = {}) {
  require_valid(inst);
  const LpProblem lp = build_customized_lp(inst);
  const LpSolution sol = solve_lp_or_throw(lp);
  CustomizedSolution out;
  out.x = extract_matrix(inst, lp, sol, "x");
  out.y = extract_matrix(inst, lp, sol, "y");
  out.lp_value = sol.objective_value;
  out.menu_dists = decompose_all(inst, out.x);
  out.reward_estimate = estimate_reward(inst, out.x, Model::customized, opt);
  return out;
}

}  // namespace mnlmatch
