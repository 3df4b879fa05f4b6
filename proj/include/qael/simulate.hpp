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

#ifndef QAEL_SIMULATE_HPP
#define QAEL_SIMULATE_HPP

// Integration of the full and reduced master equations and quantification of
// the reduction error. Propagation is by exact exponential stepping (the
// working dimensions are small), so order-of-accuracy experiments are free
// of integrator error.

#include <cmath>
#include <future>
#include <string>
#include <utility>
#include <vector>

#include "qael/operators.hpp"
#include "qael/reduction.hpp"

namespace qael::simulate {

using reduction::ReducedModel;

//===========================================================================
// Types
//===========================================================================

struct Trajectory {
  std::vector<double> times;
  std::vector<Operator> states;
  double max_trace_drift = 0.0;  // largest trace correction applied
  double max_herm_defect = 0.0;  // largest Hermitization applied
};

struct ComparisonReport {
  double epsilon = 0.0;
  int order = 1;
  std::vector<double> times;
  std::vector<double> trace_distance;  // 1/2 |rho_full - K(rho_s)|_1
  double max_error = 0.0;
  double final_error = 0.0;
  double initial_clipped_mass = 0.0;   // negative mass removed when lifting
  std::vector<double> full_trace;      // structure diagnostics per time point
  std::vector<double> full_min_eig;
};

// Horizon policies for sweeps: a fixed time, or a fixed slow time rescaled
// as tau / epsilon^2.
struct Horizon {
  enum class Kind { FixedTime, FixedSlowTime } kind = Kind::FixedTime;
  double value = 1.0;

  double resolve(double epsilon) const {
    return kind == Kind::FixedTime ? value : value / (epsilon * epsilon);
  }
};

struct SweepResult {
  std::vector<ComparisonReport> reports;  // in epsilon order
  double slope = 0.0;  // least-squares log(max_error) vs log(epsilon)
  std::vector<std::string> warnings;
};

//===========================================================================
// Metrics and grids
//===========================================================================

// 1/2 sum of singular values of (a - b).
inline double trace_distance(const Operator& a, const Operator& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("trace_distance: dimension mismatch");
  return 0.5 * trace_norm(a - b);
}

inline std::vector<double> time_grid(double t0, double t1, int points) {
  if (points < 2) throw NumericsError("time_grid: need at least two points");
  std::vector<double> t(points);
  for (int i = 0; i < points; ++i)
    t[i] = t0 + (t1 - t0) * double(i) / double(points - 1);
  return t;
}

// Full generator L0 + eps L1 (jump rates scale linearly, amplitudes by
// sqrt(eps)).
inline LindbladGenerator combine(const LindbladGenerator& fast,
                                 const LindbladGenerator& slow, double eps) {
  if (fast.dim() != slow.dim())
    throw DimensionError("combine: generator dimensions differ");
  LindbladGenerator out;
  out.hamiltonian = fast.hamiltonian + eps * slow.hamiltonian;
  out.jumps = fast.jumps;
  const double sq = std::sqrt(eps);
  for (const auto& l : slow.jumps) out.jumps.push_back(sq * l);
  return out;
}

//===========================================================================
// Propagation
//===========================================================================

// states[k] = unvec(exp((times[k]-times[0]) L) vec(rho0)). Uniform grids
// reuse a single step exponential. Each state is re-Hermitized and
// trace-renormalized, with the applied corrections logged in the trajectory.
inline Trajectory propagate(const LindbladGenerator& gen,
                            const DensityMatrix& rho0,
                            const std::vector<double>& times) {
  if (times.empty()) throw NumericsError("propagate: empty time grid");
  if (times.front() < 0) throw NumericsError("propagate: negative start time");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (times[k] <= times[k - 1])
      throw NumericsError("propagate: times must be strictly increasing");
  if (rho0.dim() != gen.dim())
    throw DimensionError("propagate: state dimension mismatch");

  const Superoperator lmat = liouvillian_matrix(gen);
  Trajectory traj;
  traj.times = times;
  traj.states.reserve(times.size());

  bool uniform = true;
  const double dt0 = times.size() > 1 ? times[1] - times[0] : 0.0;
  for (std::size_t k = 1; k < times.size(); ++k)
    if (std::abs((times[k] - times[k - 1]) - dt0) > 1e-12 * std::max(1.0, dt0))
      uniform = false;

  auto clean = [&](Operator rho) {
    const double herm = 0.5 * (rho - rho.adjoint()).norm();
    rho = 0.5 * (rho + rho.adjoint());
    const double tr = rho.trace().real();
    if (!rho.allFinite() || tr <= 0)
      throw NumericsError("propagate: state blew up (non-finite or trace<=0)");
    rho /= tr;
    traj.max_herm_defect = std::max(traj.max_herm_defect, herm);
    traj.max_trace_drift = std::max(traj.max_trace_drift, std::abs(tr - 1.0));
    return rho;
  };

  traj.states.push_back(rho0.rho);
  if (uniform && times.size() > 1) {
    const Superoperator step = matrix_exponential(lmat, dt0);
    Eigen::VectorXcd v = vec(rho0.rho);
    for (std::size_t k = 1; k < times.size(); ++k) {
      v = step.matrix * v;
      traj.states.push_back(clean(unvec(v, gen.dim())));
      v = vec(traj.states.back());
    }
  } else {
    Eigen::VectorXcd v = vec(rho0.rho);
    for (std::size_t k = 1; k < times.size(); ++k) {
      const Superoperator step =
          matrix_exponential(lmat, times[k] - times[k - 1]);
      v = step.matrix * v;
      traj.states.push_back(clean(unvec(v, gen.dim())));
      v = vec(traj.states.back());
    }
  }
  return traj;
}

//===========================================================================
// Full-vs-reduced comparison
//===========================================================================

// Propagates the full model from the lifted slow state (clipped to the
// nearest density matrix) and the reduced model from rho_s0, and reports the
// trace distance between the full state and the lifted reduced state at
// every grid point.
inline ComparisonReport compare(const LindbladGenerator& fast,
                                const LindbladGenerator& slow,
                                const ReducedModel& model,
                                const DensityMatrix& rho_s0,
                                const std::vector<double>& times) {
  ComparisonReport rep;
  rep.epsilon = model.epsilon;
  rep.order = model.order;
  rep.times = times;

  auto [rho_full0, clipped] =
      closest_density(reduction::kraus_parametrization(model, rho_s0.rho));
  rep.initial_clipped_mass = clipped;

  const LindbladGenerator full = combine(fast, slow, model.epsilon);
  const Trajectory traj_full = propagate(full, rho_full0, times);
  const Trajectory traj_slow =
      propagate(reduction::reduced_generator(model), rho_s0, times);

  rep.trace_distance.reserve(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const Operator lifted =
        reduction::kraus_parametrization(model, traj_slow.states[k]);
    const double err = trace_distance(traj_full.states[k], lifted);
    rep.trace_distance.push_back(err);
    rep.max_error = std::max(rep.max_error, err);
    rep.full_trace.push_back(traj_full.states[k].trace().real());
    Eigen::SelfAdjointEigenSolver<Operator> es(traj_full.states[k],
                                               Eigen::EigenvaluesOnly);
    rep.full_min_eig.push_back(es.eigenvalues().minCoeff());
  }
  rep.final_error = rep.trace_distance.back();
  return rep;
}

//===========================================================================
// Epsilon sweep
//===========================================================================

inline double fit_loglog_slope(const std::vector<double>& x,
                               const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(std::max(y[i], 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0) throw NumericsError("slope fit: degenerate abscissae");
  return (n * sxy - sx * sy) / denom;
}

// One elimination serves the whole sweep: the reduced model is rebuilt per
// epsilon only by rescaling. Reports are merged in epsilon order regardless
// of scheduling.
inline SweepResult epsilon_sweep(const LindbladGenerator& fast,
                                 const LindbladGenerator& slow,
                                 const DensityMatrix& rho_s0,
                                 std::vector<double> epsilons,
                                 const Horizon& horizon, int order,
                                 int grid_points = 400, int jobs = 1,
                                 const Tolerances& tol = {}) {
  if (epsilons.size() < 3)
    throw NumericsError("epsilon_sweep: need >= 3 epsilons");
  for (double e : epsilons)
    if (e <= 0) throw NumericsError("epsilon_sweep: epsilons must be positive");
  std::sort(epsilons.begin(), epsilons.end());

  SweepResult result;
  const double span = epsilons.back() / epsilons.front();
  if (span < 10.0)
    result.warnings.push_back(
        "epsilon range spans less than one decade; slope fit may be crude");

  const asymptotics::FastAnalysis analysis =
      asymptotics::analyze_fast_generator(fast, tol);
  analysis.require();
  ReducedModel base =
      reduction::build_reduced_model(fast, slow, epsilons.front(), order,
                                     analysis, tol);
  {
    // Perturbative-regime guard, on the scale the slow generator acts with.
    double slow_scale = slow.hamiltonian.operatorNorm();
    for (const auto& l : slow.jumps) slow_scale += l.operatorNorm();
    if (epsilons.back() * slow_scale >= analysis.spectrum.gap / 4.0)
      result.warnings.push_back(
          "largest epsilon is not well inside the perturbative regime "
          "(eps*|L1| vs gap/4)");
  }

  auto run_one = [&](double eps) {
    ReducedModel m = base;
    m.epsilon = eps;
    const double t_end = horizon.resolve(eps);
    return compare(fast, slow, m, rho_s0,
                   time_grid(0.0, t_end, grid_points));
  };

  result.reports.resize(epsilons.size());
  if (jobs <= 1) {
    for (std::size_t i = 0; i < epsilons.size(); ++i)
      result.reports[i] = run_one(epsilons[i]);
  } else {
    std::size_t next = 0;
    while (next < epsilons.size()) {
      const std::size_t batch =
          std::min<std::size_t>(jobs, epsilons.size() - next);
      std::vector<std::future<ComparisonReport>> futures;
      for (std::size_t b = 0; b < batch; ++b)
        futures.push_back(
            std::async(std::launch::async, run_one, epsilons[next + b]));
      for (std::size_t b = 0; b < batch; ++b)
        result.reports[next + b] = futures[b].get();
      next += batch;
    }
  }

  std::vector<double> errs;
  for (const auto& r : result.reports) errs.push_back(r.max_error);
  result.slope = fit_loglog_slope(epsilons, errs);
  return result;
}

}  // namespace qael::simulate

#endif  // QAEL_SIMULATE_HPP
