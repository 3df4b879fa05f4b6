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

#ifndef QAEL_SERIALIZE_HPP
#define QAEL_SERIALIZE_HPP

// Machine-readable outputs. JSON is emitted with insertion-ordered keys and
// floats at 17 significant digits so identical inputs produce byte-identical
// files; complex scalars are [re, im] pairs and matrices are row-major
// nested arrays of such pairs. CSV follows RFC 4180 (CRLF line ends).

#include <cstdio>
#include <ostream>
#include <string>

#include <json.hpp>

#include "qael/asymptotics.hpp"
#include "qael/models.hpp"
#include "qael/modelspec.hpp"
#include "qael/reduction.hpp"
#include "qael/simulate.hpp"

namespace qael::serialize {

using json = nlohmann::ordered_json;

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json complex_json(Complex c) {
  return json::array({c.real(), c.imag()});
}

inline json matrix_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json operator_list_json(const std::vector<Operator>& ops) {
  json out = json::array();
  for (const auto& op : ops) out.push_back(matrix_json(op));
  return out;
}

inline json spectrum_json(const Spectrum& sp) {
  json j;
  json ev = json::array();
  for (Complex lam : sp.eigenvalues) ev.push_back(complex_json(lam));
  j["eigenvalues"] = std::move(ev);
  j["zero_multiplicity_algebraic"] = sp.zero_multiplicity_algebraic;
  j["zero_multiplicity_geometric"] = sp.zero_multiplicity_geometric;
  j["gap"] = sp.gap;
  return j;
}

inline json report_json(const asymptotics::AssumptionReport& rep) {
  json j;
  j["spectrum"] = spectrum_json(rep.spectrum);
  j["zero_semisimple"] = rep.zero_semisimple;
  j["gap"] = rep.gap;
  j["dfs_confirmed"] = rep.dfs_confirmed;
  json lam = json::array();
  for (Complex l : rep.lambda) lam.push_back(complex_json(l));
  j["lambda"] = std::move(lam);
  j["lambda_norm_residual"] = rep.lambda_norm_residual;
  j["rp0_residual"] = rep.rp0_residual;
  j["kraus_scalar_residual"] = rep.kraus_scalar_residual;
  j["slow_dim"] = rep.slow_dim;
  j["qualifies"] = rep.qualifies;
  j["failed_check"] = rep.failed_check;
  j["notes"] = rep.notes;
  return j;
}

inline json reduced_model_json(const reduction::ReducedModel& m) {
  json j;
  j["slow_dim"] = m.slow_dim;
  j["epsilon"] = m.epsilon;
  j["order"] = m.order;
  j["H_s1"] = matrix_json(m.h_s1);
  j["A_ops"] = operator_list_json(m.a_ops);
  j["B_ops"] = operator_list_json(m.b_ops);
  j["C1"] = m.has_c1 ? matrix_json(m.c1) : json();
  j["S0"] = matrix_json(m.s0);
  j["residuals"] = json{{"order1", m.residual_order1},
                        {"order2", m.has_c1 ? json(m.residual_order2) : json()}};
  j["notes"] = m.notes;
  return j;
}

inline json comparison_json(const simulate::ComparisonReport& rep,
                            bool with_series = false) {
  json j;
  j["epsilon"] = rep.epsilon;
  j["order"] = rep.order;
  j["max_error"] = rep.max_error;
  j["final_error"] = rep.final_error;
  j["initial_clipped_mass"] = rep.initial_clipped_mass;
  if (with_series) {
    j["times"] = rep.times;
    j["trace_distance"] = rep.trace_distance;
  }
  return j;
}

inline json sweep_json(const simulate::SweepResult& sw) {
  json j;
  j["slope"] = sw.slope;
  json eps = json::array(), reports = json::array();
  for (const auto& r : sw.reports) {
    eps.push_back(r.epsilon);
    reports.push_back(comparison_json(r));
  }
  j["epsilons"] = std::move(eps);
  j["reports"] = std::move(reports);
  j["warnings"] = sw.warnings;
  return j;
}

inline json convergence_json(const std::vector<models::ConvergenceRow>& rows) {
  json arr = json::array();
  double prev = 0.0;
  bool have_prev = false;
  for (const auto& r : rows) {
    json row;
    row["n_trunc"] = r.n_trunc;
    if (r.ok) {
      row["value"] = r.value;
      if (have_prev) row["change"] = r.value - prev;
      prev = r.value;
      have_prev = true;
    } else {
      row["value"] = json();
      row["note"] = r.note;
    }
    arr.push_back(std::move(row));
  }
  return arr;
}

//===========================================================================
// Canonical text emission
//===========================================================================

namespace detail_dump {

inline void dump(const json& j, std::string& out, int indent, int depth) {
  const std::string pad(std::size_t(indent) * std::size_t(depth), ' ');
  const std::string pad_in(std::size_t(indent) * std::size_t(depth + 1), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in;
        out += nlohmann::json(it.key()).dump();
        out += ": ";
        dump(*it, out, indent, depth + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in;
        dump(v, out, indent, depth + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case json::value_t::string:
      out += nlohmann::json(j.get<std::string>()).dump();
      return;
    case json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      return;
    case json::value_t::number_integer:
      out += std::to_string(j.get<std::int64_t>());
      return;
    case json::value_t::number_unsigned:
      out += std::to_string(j.get<std::uint64_t>());
      return;
    case json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_double(v) : "null";
      return;
    }
    default:
      out += "null";
      return;
  }
}

}  // namespace detail_dump

inline std::string canonical_dump(const json& j, int indent = 2) {
  std::string out;
  detail_dump::dump(j, out, indent, 0);
  out += "\n";
  return out;
}

// RFC 4180 CSV of a comparison report: t, error, trace, min_eig.
inline void write_comparison_csv(std::ostream& os,
                                 const simulate::ComparisonReport& rep) {
  os << "t,error,trace,min_eig\r\n";
  for (std::size_t k = 0; k < rep.times.size(); ++k)
    os << format_double(rep.times[k]) << ','
       << format_double(rep.trace_distance[k]) << ','
       << format_double(rep.full_trace[k]) << ','
       << format_double(rep.full_min_eig[k]) << "\r\n";
}

}  // namespace qael::serialize

#endif  // QAEL_SERIALIZE_HPP
