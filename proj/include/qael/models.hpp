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

#ifndef QAEL_MODELS_HPP
#define QAEL_MODELS_HPP

// Built-in models: a driven, strongly damped cavity mode coupled to a qubit
// (finite Fock truncation), the two-qubit Purcell analogue, and a variant
// with an extra slow Hamiltonian acting on the target system only. Builders
// emit a model-definition JSON and load it through modelspec, so the CLI
// path and the programmatic path produce bit-identical generators.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "qael/modelspec.hpp"
#include "qael/reduction.hpp"

namespace qael::models {

using modelspec::json;
using modelspec::Model;

struct CavityQubitParams {
  double kappa = 10.0;    // cavity decay rate
  double g = 0.1;         // coupling strength; also the timescale parameter
  Complex u = 1.0;        // drive amplitude
  Index n_trunc = 16;     // Fock truncation

  Complex alpha() const { return 2.0 * u / kappa; }
};

namespace detail_models {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_complex_expr(Complex c) {
  if (c.imag() == 0.0) return fmt(c.real());
  std::string out = "(" + fmt(c.real());
  out += c.imag() < 0 ? "-" : "+";
  out += fmt(std::abs(c.imag()));
  out += "i)";
  return out;
}

inline void validate(const CavityQubitParams& p) {
  if (p.kappa <= 0) throw NumericsError("cavity model: kappa must be positive");
  if (p.g <= 0) throw NumericsError("cavity model: g must be positive");
  if (p.n_trunc < 8) throw NumericsError("cavity model: n_trunc must be >= 8");
  const double a = std::abs(p.alpha());
  if (a * a + 6.0 * a >= double(p.n_trunc))
    throw NumericsError(
        "cavity model: Fock truncation inadequate for |alpha| = " + fmt(a));
}

// Residual of the two master-equation forms, kappa*D[a - alpha] versus
// [u a^dag - u^* a, .] + kappa*D[a], restricted to inputs supported on the
// low Fock block n <= n_trunc - 4. The identity is exact operator algebra,
// so any residual is numerical.
inline double drive_equivalence_residual(const Model& model,
                                         const CavityQubitParams& p) {
  const Index n = p.n_trunc;
  const Index d = model.dim;
  const Operator a_full = kron(destroy_op(n), Operator::Identity(2, 2));
  const Operator drive =
      p.u * a_full.adjoint() - std::conj(p.u) * a_full;
  const Operator id = Operator::Identity(d, d);
  Eigen::MatrixXcd split = kron(id, drive) - kron(drive.transpose(), id);
  split += p.kappa *
           liouvillian_matrix(LindbladGenerator{Operator::Zero(d, d), {a_full}})
               .matrix;
  const Eigen::MatrixXcd direct = liouvillian_matrix(model.fast).matrix;
  const Index block = (n - 3) * 2;  // states with Fock level <= n_trunc - 4
  double worst = 0.0;
  for (Index j = 0; j < block; ++j)
    for (Index i = 0; i < block; ++i)
      worst = std::max(worst,
                       (direct.col(j * d + i) - split.col(j * d + i)).norm());
  return worst;
}

}  // namespace detail_models

// Model-definition JSON for the driven-cavity (x) qubit system:
// fast = single jump sqrt(kappa) (a - alpha), slow = exchange Hamiltonian
// a^dag b + a b^dag, epsilon = g.
inline json cavity_qubit_model_json(const CavityQubitParams& p) {
  detail_models::validate(p);
  using detail_models::fmt;
  json j;
  j["factors"] = json::array({json{{"name", "A"}, {"dim", p.n_trunc}},
                              json{{"name", "B"}, {"dim", 2}}});
  j["symbols"] = json{
      {"a", "kron(destroy(" + std::to_string(p.n_trunc) + "), eye(2))"},
      {"b", "kron(eye(" + std::to_string(p.n_trunc) + "), sigmam)"},
      {"id", "kron(eye(" + std::to_string(p.n_trunc) + "), eye(2))"},
      {"alpha", detail_models::fmt_complex_expr(p.alpha())},
      {"sqrt_kappa", fmt(std::sqrt(p.kappa))},
  };
  j["fast"] = json{{"hamiltonian", "0"},
                   {"jumps", json::array({"sqrt_kappa*(a - alpha*id)"})}};
  j["slow"] = json{{"hamiltonian", "a'*b + a*b'"}, {"jumps", json::array()}};
  j["epsilon"] = p.g;
  j["options"] = json::object();
  return j;
}

inline Model build_cavity_qubit(const CavityQubitParams& p) {
  Model model = modelspec::load_model_json(cavity_qubit_model_json(p));
  const double res = detail_models::drive_equivalence_residual(model, p);
  if (res > 1e-8 * std::max(1.0, p.kappa))
    throw NumericsError(
        "cavity model: drive/displaced-jump equivalence residual " +
        detail_models::fmt(res));
  if (p.g / p.kappa > 0.2)
    model.warnings.push_back(
        "g/kappa = " + detail_models::fmt(p.g / p.kappa) +
        " is outside the perturbative regime (> 0.2)");
  return model;
}

// Closed-form target for the eliminated cavity: Rabi drive through the
// classical field alpha plus slow damping at rate 4 g^2 / kappa.
inline LindbladGenerator expected_reduced_cavity_qubit(
    const CavityQubitParams& p) {
  const Complex alpha = p.alpha();
  LindbladGenerator gen;
  gen.hamiltonian =
      p.g * (alpha * sigma_plus() + std::conj(alpha) * sigma_minus());
  const double rate = 4.0 * p.g * p.g / p.kappa;
  if (rate > 0) gen.jumps.push_back(std::sqrt(rate) * sigma_minus());
  return gen;
}

// Two qubits, fast decay on A, exchange coupling: the finite-dimensional
// analogue with a hand-checkable reduction (H_s1 = 0, one second-order jump
// (2g/sqrt(kappa)) sigma_minus on B).
inline json purcell_two_qubit_model_json(double kappa, double g) {
  if (kappa <= 0 || g <= 0)
    throw NumericsError("purcell model: kappa and g must be positive");
  json j;
  j["factors"] = json::array(
      {json{{"name", "A"}, {"dim", 2}}, json{{"name", "B"}, {"dim", 2}}});
  j["symbols"] = json{
      {"sm_a", "kron(sigmam, eye(2))"},
      {"exchange", "kron(sigmap, sigmam) + kron(sigmam, sigmap)"},
      {"sqrt_kappa", detail_models::fmt(std::sqrt(kappa))},
  };
  j["fast"] = json{{"hamiltonian", "0"},
                   {"jumps", json::array({"sqrt_kappa*sm_a"})}};
  j["slow"] = json{{"hamiltonian", "exchange"}, {"jumps", json::array()}};
  j["epsilon"] = g;
  j["options"] = json::object();
  return j;
}

inline Model build_purcell_two_qubit(double kappa, double g) {
  return modelspec::load_model_json(purcell_two_qubit_model_json(kappa, g));
}

// Cavity (x) qubit with an extra slow Hamiltonian acting on B only,
// scale * I (x) H_B. The manifold correction picks up nothing from H_B; the
// reduced Hamiltonian gains exactly scale * H_B.
inline json cavity_qubit_hb_model_json(const CavityQubitParams& p,
                                       const std::string& hb_expr,
                                       double scale = 1.0) {
  json j = cavity_qubit_model_json(p);
  j["symbols"]["hb"] = "kron(eye(" + std::to_string(p.n_trunc) + "), " +
                       hb_expr + ")";
  j["slow"]["hamiltonian"] = "a'*b + a*b' + " +
                             detail_models::fmt(scale) + "*hb";
  return j;
}

inline Model build_with_slow_B_hamiltonian(const CavityQubitParams& p,
                                           const std::string& hb_expr,
                                           double scale = 1.0) {
  Model model = modelspec::load_model_json(
      cavity_qubit_hb_model_json(p, hb_expr, scale));
  const double res = detail_models::drive_equivalence_residual(model, p);
  if (res > 1e-8 * std::max(1.0, p.kappa))
    throw NumericsError(
        "cavity model: drive/displaced-jump equivalence residual " +
        detail_models::fmt(res));
  return model;
}

//===========================================================================
// Truncation convergence
//===========================================================================

enum class ConvergenceQuantity { ZenoCoeff, DampingRate, LambdaNorm };

struct ConvergenceRow {
  Index n_trunc = 0;
  double value = 0.0;
  bool ok = false;
  std::string note;
};

// Recomputes the reduction across Fock truncations and reports the studied
// quantity per truncation. Rows where the reduction is refused carry the
// diagnostic instead of a value.
inline std::vector<ConvergenceRow> truncation_convergence(
    const CavityQubitParams& p, ConvergenceQuantity quantity,
    const std::vector<Index>& truncations = {8, 12, 16, 24}) {
  std::vector<ConvergenceRow> rows;
  for (Index n : truncations) {
    CavityQubitParams q = p;
    q.n_trunc = n;
    ConvergenceRow row;
    row.n_trunc = n;
    try {
      Model model = build_cavity_qubit(q);
      const auto analysis =
          asymptotics::analyze_fast_generator(model.fast, model.options.tol);
      analysis.require();
      switch (quantity) {
        case ConvergenceQuantity::ZenoCoeff: {
          const auto m = reduction::build_reduced_model(
              model.fast, model.slow, model.epsilon, 1, analysis,
              model.options.tol);
          row.value = std::abs(m.h_s1(1, 0));
          break;
        }
        case ConvergenceQuantity::DampingRate: {
          const auto m = reduction::build_reduced_model(
              model.fast, model.slow, model.epsilon, 2, analysis,
              model.options.tol);
          double sum = 0.0;
          for (const auto& b : m.b_ops)
            sum += (b.adjoint() * b).trace().real();
          row.value = model.epsilon * model.epsilon * sum;
          break;
        }
        case ConvergenceQuantity::LambdaNorm: {
          double norm2 = 0.0;
          for (Complex lam : analysis.lambda) norm2 += std::norm(lam);
          row.value = norm2;
          break;
        }
      }
      row.ok = true;
    } catch (const Error& e) {
      row.note = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// Converged when the last successive relative change among usable rows is
// below rel_tol.
inline bool convergence_declared(const std::vector<ConvergenceRow>& rows,
                                 double rel_tol = 1e-6) {
  double prev = 0.0;
  bool have_prev = false;
  double last_change = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    if (!r.ok) continue;
    if (have_prev)
      last_change = std::abs(r.value - prev) / std::max(std::abs(prev), 1e-300);
    prev = r.value;
    have_prev = true;
  }
  return last_change < rel_tol;
}

}  // namespace qael::models

#endif  // QAEL_MODELS_HPP
