// Copyright 2026 The qael developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QAEL_CLI_HPP
#define QAEL_CLI_HPP

// Command-line front end: load -> certify -> reduce -> validate -> report.
// Exit codes: 0 success; 1 usage/parse/schema/numeric input error;
// 2 assumption certification failure (named check); 3 second-order
// precondition refusal; 4 invariant-suite violation.
//
// Machine-readable JSON goes to stdout; human-readable summaries and
// warnings go to stderr. Identical inputs produce byte-identical JSON.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qael/serialize.hpp"

namespace qael::cli {

namespace detail_cli {

using modelspec::Model;

struct ModelSourceOpts {
  std::string path;
  std::string example;
  double kappa = 10.0;
  double g = 0.1;
  double u_re = 1.0;
  double u_im = 0.0;
  Index n_trunc = 16;
  std::string hb_expr = "sigmaz";
  double hb_scale = 1.0;
};

inline void add_model_source(CLI::App* cmd, ModelSourceOpts& src) {
  cmd->add_option("model", src.path, "model-definition JSON file");
  cmd->add_option("--example", src.example,
                  "built-in model: cavity-qubit | purcell | cavity-qubit-hb");
  cmd->add_option("--kappa", src.kappa, "fast decay rate (examples)");
  cmd->add_option("--g", src.g, "coupling strength = epsilon (examples)");
  cmd->add_option("--u", src.u_re, "drive amplitude, real part");
  cmd->add_option("--u-im", src.u_im, "drive amplitude, imaginary part");
  cmd->add_option("--n-trunc", src.n_trunc, "Fock truncation (cavity models)");
  cmd->add_option("--hb", src.hb_expr,
                  "B-side Hamiltonian expression (cavity-qubit-hb)");
  cmd->add_option("--hb-scale", src.hb_scale,
                  "scale of the B-side Hamiltonian (cavity-qubit-hb)");
}

inline models::CavityQubitParams cavity_params(const ModelSourceOpts& src) {
  models::CavityQubitParams p;
  p.kappa = src.kappa;
  p.g = src.g;
  p.u = Complex(src.u_re, src.u_im);
  p.n_trunc = src.n_trunc;
  return p;
}

inline Model resolve_model(const ModelSourceOpts& src) {
  if (!src.example.empty() && !src.path.empty())
    throw modelspec::SchemaError("give either a model file or --example");
  if (src.example.empty()) {
    if (src.path.empty())
      throw modelspec::SchemaError("a model file or --example is required");
    return modelspec::load_model(src.path);
  }
  if (src.example == "cavity-qubit")
    return models::build_cavity_qubit(cavity_params(src));
  if (src.example == "purcell")
    return models::build_purcell_two_qubit(src.kappa, src.g);
  if (src.example == "cavity-qubit-hb")
    return models::build_with_slow_B_hamiltonian(cavity_params(src),
                                                 src.hb_expr, src.hb_scale);
  throw modelspec::SchemaError("unknown example '" + src.example + "'");
}

// QAEL_TOL_OVERRIDES: a JSON object of tolerance keys, applied on top of the
// model options.
inline void apply_env_overrides(Model& model, std::ostream& err) {
  const char* env = std::getenv("QAEL_TOL_OVERRIDES");
  if (!env || !*env) return;
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(env);
  } catch (const nlohmann::json::parse_error& e) {
    throw modelspec::SchemaError(
        std::string("QAEL_TOL_OVERRIDES is not valid JSON: ") + e.what());
  }
  if (!j.is_object())
    throw modelspec::SchemaError("QAEL_TOL_OVERRIDES must be a JSON object");
  auto unknown = modelspec::apply_tolerance_overrides(model.options.tol, j);
  for (const auto& key : unknown)
    err << "warning: QAEL_TOL_OVERRIDES: unknown key '" << key << "'\n";
}

inline void print_warnings(const Model& model, std::ostream& err) {
  for (const auto& w : model.warnings) err << "warning: " << w << "\n";
}

inline void write_file(const std::filesystem::path& path,
                       const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw modelspec::SchemaError("cannot write '" + path.string() + "'");
  out << contents;
}

inline DensityMatrix initial_slow_state(const std::string& spec, Index k) {
  if (spec == "mixed") {
    return DensityMatrix{Operator::Identity(k, k) / double(k)};
  }
  if (spec == "plus") {
    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(k) / std::sqrt(double(k));
    return DensityMatrix{v * v.adjoint()};
  }
  if (spec.rfind("basis:", 0) == 0) {
    const Index j = std::stol(spec.substr(6));
    if (j < 0 || j >= k)
      throw modelspec::SchemaError("--init basis index out of range");
    return DensityMatrix{basis_op(k, j, j)};
  }
  throw modelspec::SchemaError("unknown --init '" + spec +
                               "' (use plus | mixed | basis:k)");
}

inline simulate::Horizon parse_horizon(const std::string& spec) {
  simulate::Horizon h;
  if (spec.rfind("fixed:", 0) == 0) {
    h.kind = simulate::Horizon::Kind::FixedTime;
    h.value = std::stod(spec.substr(6));
  } else if (spec.rfind("slow:", 0) == 0) {
    h.kind = simulate::Horizon::Kind::FixedSlowTime;
    h.value = std::stod(spec.substr(5));
  } else {
    throw modelspec::SchemaError("unknown --horizon '" + spec +
                                 "' (use fixed:T | slow:tau)");
  }
  if (!(h.value > 0))
    throw modelspec::SchemaError("--horizon value must be positive");
  return h;
}

// Structural invariants on a comparison run; throws InvariantError naming
// the first violated one.
inline void invariant_suite(const asymptotics::FastAnalysis& analysis,
                            const reduction::ReducedModel& m,
                            const simulate::ComparisonReport& rep) {
  if (analysis.kraus &&
      analysis.kraus->completeness_residual > 1e-8)
    throw InvariantError("kraus_completeness",
                         "Kraus completeness residual " +
                             serialize::format_double(
                                 analysis.kraus->completeness_residual));
  if (m.residual_order1 > 1e-9)
    throw InvariantError("residual_order1",
                         "first-order invariance residual " +
                             serialize::format_double(m.residual_order1));
  if (m.has_c1 && m.residual_order2 > 1e-8)
    throw InvariantError("residual_order2",
                         "second-order invariance residual " +
                             serialize::format_double(m.residual_order2));
  for (double tr : rep.full_trace)
    if (std::abs(tr - 1.0) > 1e-9)
      throw InvariantError("trace_preservation",
                           "trajectory trace drifted to " +
                               serialize::format_double(tr));
  for (double ev : rep.full_min_eig)
    if (ev < -1e-8)
      throw InvariantError("state_positivity",
                           "trajectory eigenvalue " +
                               serialize::format_double(ev));
  for (double d : rep.trace_distance)
    if (d < -1e-12 || d > 1.0 + 1e-9)
      throw InvariantError("trace_distance_range",
                           "trace distance " + serialize::format_double(d));
}

inline std::vector<double> parse_epsilons(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stod(item));
  return out;
}

inline void reduce_summary(const reduction::ReducedModel& m,
                           std::ostream& err) {
  err << "reduced model: slow_dim=" << m.slow_dim << " order=" << m.order
      << " epsilon=" << serialize::format_double(m.epsilon) << "\n";
  err << "  |H_s1| = " << serialize::format_double(m.h_s1.norm())
      << ", first-order jumps: " << m.a_ops.size()
      << ", second-order jumps: " << m.b_ops.size() << "\n";
  err << "  residual_order1 = "
      << serialize::format_double(m.residual_order1);
  if (m.has_c1)
    err << ", residual_order2 = "
        << serialize::format_double(m.residual_order2);
  err << "\n";
  for (const auto& n : m.notes) err << "  note: " << n << "\n";
}

}  // namespace detail_cli

//===========================================================================
// Entry point
//===========================================================================

inline int run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
  using namespace detail_cli;

  CLI::App app{"adiabatic elimination for two-timescale Lindblad models"};
  app.require_subcommand(1);

  ModelSourceOpts src;
  std::string out_path;
  int order = 1;
  double epsilon_override = 0.0;
  std::string horizon_spec;
  std::string init_spec = "plus";
  int grid = 400;
  int jobs = 1;
  std::string epsilons_list;
  bool emit_model = false;
  std::string example_name;

  CLI::App* analyze = app.add_subcommand("analyze",
                                         "certify the fast-generator assumptions");
  add_model_source(analyze, src);
  analyze->add_option("--out", out_path, "also write the report here");

  CLI::App* reduce = app.add_subcommand("reduce",
                                        "build the effective slow model");
  add_model_source(reduce, src);
  reduce->add_option("--order", order, "expansion order (1 or 2)")
      ->check(CLI::Range(1, 2));
  reduce->add_option("--out", out_path, "directory for reduced_model.json");

  CLI::App* validate = app.add_subcommand(
      "validate", "compare the reduced model against the full one");
  add_model_source(validate, src);
  validate->add_option("--order", order, "expansion order (1 or 2)")
      ->check(CLI::Range(1, 2));
  CLI::Option* epsilon_opt = validate->add_option(
      "--epsilon", epsilon_override, "override the model's epsilon (>= 0)");
  validate->add_option("--horizon", horizon_spec,
                       "fixed:T | slow:tau (default fixed:10/gap)");
  validate->add_option("--grid", grid, "number of time points");
  validate->add_option("--init", init_spec,
                       "initial slow state: plus | mixed | basis:k");
  validate->add_option("--out", out_path, "directory for CSV + summary");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "error scaling across a list of epsilons");
  add_model_source(sweep, src);
  sweep->add_option("--epsilons", epsilons_list,
                    "comma-separated list (need >= 3)")->required();
  sweep->add_option("--order", order, "expansion order (1 or 2)")
      ->check(CLI::Range(1, 2));
  sweep->add_option("--horizon", horizon_spec,
                    "fixed:T | slow:tau (default fixed:10/gap)");
  sweep->add_option("--grid", grid, "number of time points");
  sweep->add_option("--init", init_spec,
                    "initial slow state: plus | mixed | basis:k");
  sweep->add_option("--jobs", jobs, "concurrent epsilon points");
  sweep->add_option("--out", out_path, "directory for CSVs + summary");

  CLI::App* example = app.add_subcommand(
      "example", "built-in models and their model-definition files");
  example->add_option("name", example_name,
                      "cavity-qubit | purcell | cavity-qubit-hb")->required();
  example->add_option("--kappa", src.kappa, "fast decay rate");
  example->add_option("--g", src.g, "coupling strength = epsilon");
  example->add_option("--u", src.u_re, "drive amplitude, real part");
  example->add_option("--u-im", src.u_im, "drive amplitude, imaginary part");
  example->add_option("--n-trunc", src.n_trunc, "Fock truncation");
  example->add_option("--hb", src.hb_expr, "B-side Hamiltonian expression");
  example->add_option("--hb-scale", src.hb_scale, "B-side Hamiltonian scale");
  example->add_flag("--emit-model", emit_model,
                    "print the model-definition JSON");
  example->add_option("--out", out_path, "write the model JSON here");

  std::vector<const char*> argv;
  argv.push_back("qael");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (example->parsed()) {
      src.example = example_name;
      nlohmann::ordered_json j;
      if (example_name == "cavity-qubit")
        j = models::cavity_qubit_model_json(cavity_params(src));
      else if (example_name == "purcell")
        j = models::purcell_two_qubit_model_json(src.kappa, src.g);
      else if (example_name == "cavity-qubit-hb")
        j = models::cavity_qubit_hb_model_json(cavity_params(src),
                                               src.hb_expr, src.hb_scale);
      else
        throw modelspec::SchemaError("unknown example '" + example_name + "'");
      const std::string text = serialize::canonical_dump(j);
      if (emit_model || out_path.empty()) out << text;
      if (!out_path.empty()) write_file(out_path, text);
      return 0;
    }

    Model model = resolve_model(src);
    apply_env_overrides(model, err);
    print_warnings(model, err);
    const Tolerances& tol = model.options.tol;

    if (analyze->parsed()) {
      const auto report = asymptotics::certify(model.fast, tol);
      const std::string text =
          serialize::canonical_dump(serialize::report_json(report));
      out << text;
      if (!out_path.empty()) write_file(out_path, text);
      if (!report.qualifies) {
        err << "assumption check failed: " << report.failed_check << "\n";
        return 2;
      }
      return 0;
    }

    const auto analysis = asymptotics::analyze_fast_generator(model.fast, tol);
    analysis.require();  // AssumptionError -> exit 2

    if (reduce->parsed()) {
      const auto m = reduction::build_reduced_model(
          model.fast, model.slow, model.epsilon, order, analysis, tol);
      const std::string text =
          serialize::canonical_dump(serialize::reduced_model_json(m));
      out << text;
      reduce_summary(m, err);
      if (!out_path.empty()) {
        std::filesystem::create_directories(out_path);
        write_file(std::filesystem::path(out_path) / "reduced_model.json",
                   text);
      }
      return 0;
    }

    if (validate->parsed()) {
      auto m = reduction::build_reduced_model(model.fast, model.slow,
                                              model.epsilon, order, analysis,
                                              tol);
      if (epsilon_opt->count()) {
        if (epsilon_override < 0)
          throw modelspec::SchemaError("--epsilon must be >= 0");
        m.epsilon = epsilon_override;
      }
      const simulate::Horizon horizon =
          horizon_spec.empty()
              ? simulate::Horizon{simulate::Horizon::Kind::FixedTime,
                                  10.0 / analysis.spectrum.gap}
              : parse_horizon(horizon_spec);
      const auto rho_s0 = initial_slow_state(init_spec, m.slow_dim);
      const auto rep = simulate::compare(
          model.fast, model.slow, m, rho_s0,
          simulate::time_grid(0.0, horizon.resolve(m.epsilon), grid));
      const std::string text =
          serialize::canonical_dump(serialize::comparison_json(rep, true));
      out << text;
      if (!out_path.empty()) {
        std::filesystem::create_directories(out_path);
        std::ofstream csv(std::filesystem::path(out_path) / "validate.csv",
                          std::ios::binary);
        serialize::write_comparison_csv(csv, rep);
        write_file(std::filesystem::path(out_path) / "summary.json", text);
      }
      invariant_suite(analysis, m, rep);  // InvariantError -> exit 4
      return 0;
    }

    if (sweep->parsed()) {
      const std::vector<double> epsilons = parse_epsilons(epsilons_list);
      if (epsilons.size() < 3)
        throw modelspec::SchemaError("need >= 3 epsilons");
      const simulate::Horizon horizon =
          horizon_spec.empty()
              ? simulate::Horizon{simulate::Horizon::Kind::FixedTime,
                                  10.0 / analysis.spectrum.gap}
              : parse_horizon(horizon_spec);
      const auto m0 = reduction::build_reduced_model(
          model.fast, model.slow, model.epsilon, order, analysis, tol);
      const auto rho_s0 = initial_slow_state(init_spec, m0.slow_dim);
      const auto sw = simulate::epsilon_sweep(model.fast, model.slow, rho_s0,
                                              epsilons, horizon, order, grid,
                                              jobs, tol);
      for (const auto& w : sw.warnings) err << "warning: " << w << "\n";
      const std::string text =
          serialize::canonical_dump(serialize::sweep_json(sw));
      out << text;
      if (!out_path.empty()) {
        std::filesystem::create_directories(out_path);
        for (std::size_t i = 0; i < sw.reports.size(); ++i) {
          std::ofstream csv(std::filesystem::path(out_path) /
                                ("eps_" + std::to_string(i) + ".csv"),
                            std::ios::binary);
          serialize::write_comparison_csv(csv, sw.reports[i]);
        }
        write_file(std::filesystem::path(out_path) / "summary.json", text);
      }
      for (const auto& rep : sw.reports) {
        auto m = m0;
        m.epsilon = rep.epsilon;
        invariant_suite(analysis, m, rep);
      }
      return 0;
    }
  } catch (const modelspec::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const modelspec::SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const modelspec::EvalError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const AssumptionError& e) {
    err << "assumption check failed: " << e.check << " (" << e.what() << ")\n";
    return 2;
  } catch (const PreconditionError& e) {
    err << "second-order reduction refused: " << e.what() << "\n";
    return 3;
  } catch (const InvariantError& e) {
    err << "invariant violated: " << e.name << " (" << e.what() << ")\n";
    return 4;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

inline int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace qael::cli

#endif  // QAEL_CLI_HPP
