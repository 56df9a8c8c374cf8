#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mnlmatch/mnlmatch.hpp"

namespace mnlmatch::cli {

enum ExitCode : int { kOk = 0, kGuarantee = 1, kUsage = 2, kFailure = 3 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"appendix-c2", "unit"};
  return names;
}

inline Instance preset_instance(const std::string& name) {
  if (name == "appendix-c2") return preset_two_by_two();
  if (name == "unit") return preset_unit();
  throw UsageError("unknown preset '" + name + "'");
}

inline Instance instance_from_flags(const std::string& path,
                                    const std::string& preset) {
  if (!preset.empty() && !path.empty())
    throw UsageError("give either an instance file or --preset, not both");
  if (!preset.empty()) return preset_instance(preset);
  if (path.empty()) throw UsageError("an instance file or --preset is required");
  return load_instance(path);
}

inline std::string fmt_double(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

inline void emit_json(const nlohmann::json& doc, const std::string& path,
                      std::ostream& out) {
  if (path.empty() || path == "-") {
    out << doc.dump(2) << '\n';
  } else {
    write_json_file(doc, path);
  }
}

struct Common {
  std::string output;
  std::uint64_t seed = 0;
  std::string model = "customized";
  double epsilon = 0.05;
  std::size_t samples = 100000;
  std::size_t cutoff = kDefaultEnumerationCutoff;
  std::string preset;
  unsigned workers = 1;
};

// ---- gen -------------------------------------------------------------------

struct GenArgs {
  long long customers = -1;
  long long suppliers = -1;
  std::vector<double> reward_range{0.0, 1.0};
  std::vector<double> cust_range{0.1, 10.0};
  std::vector<double> supp_range{0.1, 10.0};
  std::string scale = "log_uniform";
};

inline int cmd_gen(const GenArgs& a, const Common& c, std::ostream& out) {
  Instance inst;
  if (!c.preset.empty()) {
    inst = preset_instance(c.preset);
    if ((a.customers >= 0 && static_cast<std::size_t>(a.customers) != inst.n_customers) ||
        (a.suppliers >= 0 && static_cast<std::size_t>(a.suppliers) != inst.n_suppliers)) {
      throw UsageError("preset '" + c.preset + "' is " +
                       std::to_string(inst.n_customers) + "x" +
                       std::to_string(inst.n_suppliers));
    }
  } else {
    if (a.customers < 1) throw UsageError("customers must be >= 1");
    if (a.suppliers < 1) throw UsageError("suppliers must be >= 1");
    GenParams p;
    p.reward_range = {a.reward_range[0], a.reward_range[1]};
    p.cust_weight_range = {a.cust_range[0], a.cust_range[1]};
    p.supp_weight_range = {a.supp_range[0], a.supp_range[1]};
    p.weight_scale = a.scale == "uniform" ? WeightScale::uniform
                                          : WeightScale::log_uniform;
    p.seed = c.seed;
    try {
      inst = generate_random(static_cast<std::size_t>(a.customers),
                             static_cast<std::size_t>(a.suppliers), p);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  if (c.output.empty() || c.output == "-") {
    out << instance_to_json(inst).dump(2) << '\n';
  } else {
    save_instance(inst, c.output);
    out << c.output << '\n';
  }
  return kOk;
}

// ---- solve -----------------------------------------------------------------

inline EstimationOptions estimation_options(const Common& c) {
  return {c.cutoff, c.samples, c.seed, c.workers};
}

inline int cmd_solve(const std::string& path, const Common& c,
                     std::ostream& out) {
  const Instance inst = instance_from_flags(path, c.preset);
  const Model model = parse_model(c.model);
  nlohmann::json doc;
  if (model == Model::customized) {
    doc = solution_to_json(solve_customized(inst, estimation_options(c)));
  } else {
    doc = solution_to_json(solve_inclusive(inst, c.epsilon));
  }
  emit_json(doc, c.output, out);
  return kOk;
}

// ---- eval ------------------------------------------------------------------

inline int cmd_eval(const std::string& path, const std::string& instance_path,
                    const std::string& method, bool model_given,
                    const Common& c, std::ostream& out) {
  const Instance inst = instance_from_flags(instance_path, c.preset);
  const nlohmann::json doc = read_json_file(path);
  ChoiceMatrix x;
  if (doc.is_object() && doc.contains("menus")) {
    x = menu_to_choice_matrix(inst, menu_from_json(doc, inst));
  } else {
    x = choice_matrix_from_json(doc, inst, "x");
    if (!choice_matrix_feasible(inst, x))
      throw InfeasiblePoint("x in '" + path + "' is not in P^C");
  }
  Model model = parse_model(c.model);
  if (!model_given && doc.is_object() && doc.contains("model") &&
      doc.at("model").is_string()) {
    model = parse_model(doc.at("model").get<std::string>());
  }

  EstimateReport rep;
  if (method == "exact") {
    if (max_column_support(x) > c.cutoff) {
      throw EnumerationLimit(
          "a supplier has " + std::to_string(max_column_support(x)) +
          " possible selectors, above the exact cutoff " +
          std::to_string(c.cutoff) + "; use --method mc or --method dp");
    }
    rep = EstimateReport::exact(exact_reward(inst, x, model, nullptr, c.cutoff));
  } else if (method == "mc") {
    rep = mc_reward(inst, x, model, {c.samples, c.seed, c.workers});
  } else {
    rep = dp_estimate(inst, x, model, c.epsilon);
  }
  nlohmann::json j = estimate_to_json(rep);
  j["model"] = to_string(model);
  out << j.dump() << '\n';
  return kOk;
}

// ---- oracle ----------------------------------------------------------------

inline int cmd_oracle(const std::string& path, std::uint64_t max_menus,
                      const Common& c, std::ostream& out) {
  const Instance inst = instance_from_flags(path, c.preset);
  const Model model = parse_model(c.model);
  const OracleResult res = brute_force_opt(inst, model, {max_menus, c.cutoff});
  emit_json(oracle_to_json(res, model), c.output, out);
  return kOk;
}

// ---- bench -----------------------------------------------------------------

struct BenchArgs {
  std::size_t count = 10;
  std::string size = "3x3";
  std::uint64_t max_menus = std::uint64_t{1} << 20;
  bool deterministic = false;
};

struct BenchmarkRow {
  std::size_t instance_id = 0;
  std::string model;
  double algorithm_value = 0.0;
  double oracle_value = 0.0;
  double ratio = 1.0;
  double lp_value = 0.0;
  std::string regime;
  double wall_time_ms = 0.0;
};

inline const char* kBenchHeader =
    "instance_id,model,algorithm_value,oracle_value,ratio,lp_value,regime,"
    "wall_time_ms";

inline std::string to_csv(const BenchmarkRow& r) {
  std::ostringstream os;
  os << r.instance_id << ',' << r.model << ',' << fmt_double(r.algorithm_value)
     << ',' << fmt_double(r.oracle_value) << ',' << fmt_double(r.ratio) << ','
     << fmt_double(r.lp_value) << ',' << r.regime << ','
     << fmt_double(r.wall_time_ms);
  return os.str();
}

inline std::pair<std::size_t, std::size_t> parse_size(const std::string& s) {
  const auto x = s.find('x');
  std::size_t c = 0;
  std::size_t m = 0;
  try {
    if (x == std::string::npos) throw std::invalid_argument(s);
    std::size_t used = 0;
    c = std::stoul(s.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(s);
    m = std::stoul(s.substr(x + 1), &used);
    if (used != s.size() - x - 1) throw std::invalid_argument(s);
  } catch (const std::logic_error&) {
    throw UsageError("--size expects CxS, e.g. 3x3; got '" + s + "'");
  }
  if (c < 1 || m < 1) throw UsageError("--size dimensions must be >= 1");
  return {c, m};
}

inline double guarantee_floor(Model model, double epsilon) {
  return model == Model::customized ? 1.0 / 3.0 : 10.0 / 539.0 - 2.0 * epsilon;
}

inline BenchmarkRow bench_one(const Instance& inst, std::size_t id, Model model,
                              const Common& c, std::uint64_t max_menus,
                              bool deterministic) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  BenchmarkRow row;
  row.instance_id = id;
  row.model = to_string(model);
  ChoiceMatrix x;
  if (model == Model::customized) {
    const CustomizedSolution s = solve_customized(inst, estimation_options(c));
    x = s.x;
    row.lp_value = s.lp_value;
  } else {
    const InclusiveSolution s = solve_inclusive(inst, c.epsilon);
    x = s.x;
    row.regime = to_string(s.chosen_regime);
    row.lp_value =
        s.chosen_regime == Regime::low ? s.lp_low_value : s.lp_high_value;
  }
  row.algorithm_value = exact_reward(inst, x, model, nullptr, c.cutoff);
  row.oracle_value = brute_force_opt(inst, model, {max_menus, c.cutoff}).opt_value;
  row.ratio = row.oracle_value > 0.0 ? row.algorithm_value / row.oracle_value : 1.0;
  if (!deterministic) {
    row.wall_time_ms =
        std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  }
  return row;
}

inline int cmd_bench(const BenchArgs& a, const Common& c, std::ostream& out,
                     std::ostream& err) {
  const Model model = parse_model(c.model);
  const auto [n_c, n_s] = parse_size(a.size);
  if (n_c * n_s >= 64 || (std::uint64_t{1} << (n_c * n_s)) > a.max_menus) {
    throw UsageError("size " + a.size + " needs 2^" + std::to_string(n_c * n_s) +
                     " oracle menu evaluations per instance, budget is " +
                     std::to_string(a.max_menus));
  }
  if (model == Model::inclusive && !(c.epsilon > 0.0 && c.epsilon < 1.0))
    throw UsageError("--epsilon must lie in (0,1)");

  std::ofstream file;
  std::ostream* sink = &out;
  if (!c.output.empty() && c.output != "-") {
    file.open(c.output);
    if (!file) throw FormatError("cannot write '" + c.output + "'");
    sink = &file;
  }
  *sink << kBenchHeader << '\n';

  const double floor = guarantee_floor(model, c.epsilon);
  double min_ratio = std::numeric_limits<double>::infinity();
  std::size_t violations = 0;
  for (std::size_t id = 0; id < a.count; ++id) {
    GenParams p;
    p.seed = mix64(c.seed, id);
    const Instance inst = generate_random(n_c, n_s, p);
    const BenchmarkRow row = bench_one(inst, id, model, c, a.max_menus, a.deterministic);
    *sink << to_csv(row) << '\n';
    min_ratio = std::min(min_ratio, row.ratio);
    if (row.ratio < floor - 1e-9) ++violations;
  }
  sink->flush();

  err << "summary: model=" << to_string(model) << " instances=" << a.count
      << " min_ratio=" << (a.count ? fmt_double(min_ratio) : std::string("n/a"))
      << " floor=" << fmt_double(floor) << " violations=" << violations << '\n';
  return violations ? kGuarantee : kOk;
}

// ---- dispatch --------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"Revenue-maximizing menus for two-sided MNL matching markets",
               "mnlmatch"};
  app.require_subcommand(1);

  Common c;
  GenArgs gen;
  BenchArgs bench;
  std::string instance_path;
  std::string eval_file;
  std::string method = "exact";
  std::uint64_t max_menus = std::uint64_t{1} << 20;

  auto add_output = [&](CLI::App* s) {
    s->add_option("-o,--output", c.output, "output file (default stdout)");
  };
  auto add_model = [&](CLI::App* s) {
    return s->add_option("--model", c.model, "customized or inclusive")
        ->check(CLI::IsMember({"customized", "inclusive"}));
  };
  auto add_preset = [&](CLI::App* s) {
    s->add_option("--preset", c.preset, "named fixture instance")
        ->check(CLI::IsMember(preset_names()));
  };
  auto add_epsilon = [&](CLI::App* s) {
    s->add_option("--epsilon", c.epsilon, "DP accuracy parameter")
        ->check(CLI::Range(0.0, 1.0));
  };

  auto* g = app.add_subcommand("gen", "generate an instance file");
  g->add_option("-c,--customers", gen.customers, "number of customers");
  g->add_option("-s,--suppliers", gen.suppliers, "number of suppliers");
  g->add_option("--seed", c.seed, "generator seed");
  g->add_option("--reward-range", gen.reward_range, "lo hi")->expected(2);
  g->add_option("--cust-weight-range", gen.cust_range, "lo hi")->expected(2);
  g->add_option("--supp-weight-range", gen.supp_range, "lo hi")->expected(2);
  g->add_option("--weight-scale", gen.scale, "uniform or log_uniform")
      ->check(CLI::IsMember({"uniform", "log_uniform"}));
  add_preset(g);
  add_output(g);

  auto* s = app.add_subcommand("solve", "run an approximation algorithm");
  s->add_option("instance", instance_path, "instance file");
  add_model(s);
  add_epsilon(s);
  add_preset(s);
  add_output(s);
  s->add_option("--samples", c.samples, "Monte Carlo samples")->check(CLI::PositiveNumber);
  s->add_option("--cutoff", c.cutoff, "exact enumeration cutoff");
  s->add_option("--seed", c.seed, "Monte Carlo seed");
  s->add_option("--workers", c.workers, "Monte Carlo threads")->check(CLI::PositiveNumber);

  auto* e = app.add_subcommand("eval", "estimate the reward of a solution or menu");
  e->add_option("file", eval_file, "solution or menu file")->required();
  e->add_option("-i,--instance", instance_path, "instance file");
  e->add_option("--method", method, "exact, mc or dp")
      ->check(CLI::IsMember({"exact", "mc", "dp"}));
  auto* eval_model = add_model(e);
  add_epsilon(e);
  add_preset(e);
  e->add_option("--samples", c.samples, "Monte Carlo samples")->check(CLI::PositiveNumber);
  e->add_option("--cutoff", c.cutoff, "exact enumeration cutoff");
  e->add_option("--seed", c.seed, "Monte Carlo seed");
  e->add_option("--workers", c.workers, "Monte Carlo threads")->check(CLI::PositiveNumber);

  auto* o = app.add_subcommand("oracle", "brute-force the optimal menu");
  o->add_option("instance", instance_path, "instance file");
  add_model(o);
  add_preset(o);
  add_output(o);
  o->add_option("--cutoff", c.cutoff, "exact enumeration cutoff");
  o->add_option("--max-menus", max_menus, "menu budget");

  auto* b = app.add_subcommand("bench", "compare algorithm against the oracle");
  add_model(b);
  add_epsilon(b);
  add_output(b);
  b->add_option("--count", bench.count, "number of instances");
  b->add_option("--size", bench.size, "CxS, e.g. 3x3");
  b->add_option("--seed", c.seed, "base seed");
  b->add_option("--samples", c.samples, "Monte Carlo samples")->check(CLI::PositiveNumber);
  b->add_option("--cutoff", c.cutoff, "exact enumeration cutoff");
  b->add_option("--max-menus", bench.max_menus, "oracle menu budget");
  b->add_flag("--deterministic", bench.deterministic, "write wall_time_ms as 0");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex, out, err);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex, out, err);
    return kUsage;
  }

  try {
    if (g->parsed()) return cmd_gen(gen, c, out);
    if (s->parsed()) return cmd_solve(instance_path, c, out);
    if (e->parsed())
      return cmd_eval(eval_file, instance_path, method, eval_model->count() > 0, c, out);
    if (o->parsed()) return cmd_oracle(instance_path, max_menus, c, out);
    if (b->parsed()) return cmd_bench(bench, c, out, err);
  } catch (const UsageError& ex) {
    err << "error: " << ex.what() << '\n' << app.help();
    return kUsage;
  } catch (const UnsupportedModel& ex) {
    err << "error: " << ex.what() << '\n';
    return kUsage;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

inline int run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
  std::vector<const char*> argv{"mnlmatch"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace mnlmatch::cli
