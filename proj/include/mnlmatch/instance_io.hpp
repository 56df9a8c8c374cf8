#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "mnlmatch/instance.hpp"

namespace mnlmatch {

// Raised for unreadable, malformed or schema-violating instance files.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline Matrix matrix_from_json(const nlohmann::json& doc, const char* field,
                               std::size_t rows, std::size_t cols) {
  if (!doc.contains(field)) {
    throw FormatError(std::string("schema error: missing field \"") + field +
                      "\"");
  }
  const auto& arr = doc.at(field);
  if (!arr.is_array()) {
    throw FormatError(std::string("schema error: field \"") + field +
                      "\" must be an array of rows");
  }
  if (arr.size() != rows) {
    throw FormatError(std::string("schema error: field \"") + field +
                      "\" has " + std::to_string(arr.size()) +
                      " rows, expected " + std::to_string(rows));
  }
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& row = arr[i];
    const std::string row_path =
        std::string(field) + "[" + std::to_string(i) + "]";
    if (!row.is_array() || row.size() != cols) {
      throw FormatError("schema error: " + row_path + " must be an array of " +
                        std::to_string(cols) + " numbers");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      if (!row[j].is_number()) {
        throw FormatError("parse error: " + row_path + "[" +
                          std::to_string(j) + "] is not a number");
      }
      m(i, j) = row[j].get<double>();
    }
  }
  return m;
}

inline std::size_t count_from_json(const nlohmann::json& doc,
                                   const char* field) {
  if (!doc.contains(field)) {
    throw FormatError(std::string("schema error: missing field \"") + field +
                      "\"");
  }
  const auto& v = doc.at(field);
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw FormatError(std::string("schema error: field \"") + field +
                      "\" must be a positive integer");
  }
  return v.get<std::size_t>();
}

}  // namespace detail

inline nlohmann::json instance_to_json(const Instance& inst) {
  return nlohmann::json{{"customers", inst.n_customers},
                        {"suppliers", inst.n_suppliers},
                        {"rewards", inst.rewards.to_rows()},
                        {"customer_weights", inst.cust_weights.to_rows()},
                        {"supplier_weights", inst.supp_weights.to_rows()}};
}

inline Instance instance_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) {
    throw FormatError("schema error: instance document must be a JSON object");
  }
  Instance inst;
  inst.n_customers = detail::count_from_json(doc, "customers");
  inst.n_suppliers = detail::count_from_json(doc, "suppliers");
  inst.rewards = detail::matrix_from_json(doc, "rewards", inst.n_customers,
                                          inst.n_suppliers);
  inst.cust_weights = detail::matrix_from_json(
      doc, "customer_weights", inst.n_customers, inst.n_suppliers);
  inst.supp_weights = detail::matrix_from_json(
      doc, "supplier_weights", inst.n_customers, inst.n_suppliers);
  auto res = validate_instance(inst);
  if (!res.ok()) throw FormatError("schema error: " + res.summary());
  return inst;
}

inline Instance parse_instance(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("parse error: ") + e.what());
  }
  return instance_from_json(doc);
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open instance file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_instance(buf.str());
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

// nlohmann/json prints doubles in shortest round-trip form, so
// load_instance(save_instance(x)) reproduces every finite value bit-exactly.
inline void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write instance file: " + path);
  out << instance_to_json(inst).dump(2) << "\n";
}

}  // namespace mnlmatch
