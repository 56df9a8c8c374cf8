#pragma once

#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mnlmatch/customized.hpp"
#include "mnlmatch/inclusive.hpp"
#include "mnlmatch/instance_io.hpp"
#include "mnlmatch/mnl.hpp"
#include "mnlmatch/oracle.hpp"
#include "mnlmatch/reward.hpp"

namespace mnlmatch {

inline nlohmann::json matrix_to_json(const Matrix& m) { return m.to_rows(); }

inline nlohmann::json menu_to_json(const Menu& menu) {
  return nlohmann::json{{"menus", menu.offers}};
}

inline nlohmann::json menu_distribution_to_json(const MenuDistribution& d) {
  nlohmann::json rows = nlohmann::json::array();
  for (const MenuRow& row : d.rows) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& wa : row)
      entries.push_back({{"assortment", wa.assortment}, {"prob", wa.prob}});
    rows.push_back(std::move(entries));
  }
  return rows;
}

inline nlohmann::json estimate_to_json(const EstimateReport& e) {
  nlohmann::json j{{"method", to_string(e.method)},
                   {"value", e.value},
                   {"lower", e.lower},
                   {"upper", e.upper}};
  if (e.method == EstimateMethod::monte_carlo) j["samples"] = e.samples;
  if (e.method == EstimateMethod::dp) j["epsilon"] = e.epsilon;
  return j;
}

inline nlohmann::json solution_to_json(const CustomizedSolution& s) {
  nlohmann::json est = estimate_to_json(s.reward_estimate);
  est["target"] = "reward";
  return {{"model", "customized"},
          {"epsilon", nullptr},
          {"x", matrix_to_json(s.x)},
          {"menu_distributions", menu_distribution_to_json(s.menu_dists)},
          {"lp_values", {{"customized", s.lp_value}}},
          {"estimates", nlohmann::json::array({est})}};
}

inline nlohmann::json solution_to_json(const InclusiveSolution& s) {
  nlohmann::json low = estimate_to_json(s.est_low);
  low["target"] = "low";
  nlohmann::json high = estimate_to_json(s.est_high);
  high["target"] = "high";
  return {{"model", "inclusive"},
          {"epsilon", s.epsilon},
          {"x", matrix_to_json(s.x)},
          {"menu_distributions", menu_distribution_to_json(s.menu_dists)},
          {"lp_values", {{"low", s.lp_low_value}, {"high", s.lp_high_value}}},
          {"estimates", nlohmann::json::array({low, high})},
          {"chosen_regime", to_string(s.chosen_regime)},
          {"x_low", matrix_to_json(s.x_low)},
          {"x_high", matrix_to_json(s.x_high)}};
}

inline nlohmann::json oracle_to_json(const OracleResult& r, Model model) {
  return {{"model", to_string(model)},
          {"opt_value", r.opt_value},
          {"menus_evaluated", r.menus_evaluated},
          {"best_menu", r.best_menu.offers}};
}

// Reads a menu object {"menus": [[j, ...], ...]} with one list per customer.
inline Menu menu_from_json(const nlohmann::json& doc, const Instance& inst) {
  if (!doc.is_object() || !doc.contains("menus") || !doc.at("menus").is_array())
    throw FormatError("schema error: menu file needs an array field \"menus\"");
  const auto& arr = doc.at("menus");
  if (arr.size() != inst.n_customers) {
    throw FormatError("schema error: \"menus\" has " +
                      std::to_string(arr.size()) + " rows, expected " +
                      std::to_string(inst.n_customers));
  }
  Menu menu;
  menu.offers.resize(inst.n_customers);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_array())
      throw FormatError("schema error: menus[" + std::to_string(i) + "] must be an array");
    for (const auto& v : arr[i]) {
      if (!v.is_number_unsigned() || v.get<std::size_t>() >= inst.n_suppliers) {
        throw FormatError("schema error: menus[" + std::to_string(i) +
                          "] holds an invalid supplier index");
      }
      menu.offers[i].push_back(v.get<std::size_t>());
    }
  }
  return menu;
}

// Reads a |C| x |S| matrix field of a solution document.
inline ChoiceMatrix choice_matrix_from_json(const nlohmann::json& doc,
                                            const Instance& inst,
                                            const char* field = "x") {
  return ChoiceMatrix(
      detail::matrix_from_json(doc, field, inst.n_customers, inst.n_suppliers));
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("parse error in '" + path + "': " + e.what());
  }
}

inline void write_json_file(const nlohmann::json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << doc.dump(2) << '\n';
  if (!out) throw FormatError("write failed for '" + path + "'");
}

}  // namespace mnlmatch
