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

#ifndef QAEL_REDUCTION_HPP
#define QAEL_REDUCTION_HPP

// Adiabatic elimination of the fast relaxation: the effective slow Lindblad
// generator to first and second order in the timescale-separation parameter,
// together with the Kraus parameterization of the slow invariant manifold.
//
// Order 1 holds for an arbitrary slow generator. Order 2 requires a fast
// generator with a single jump operator and no Hamiltonian, and a purely
// Hamiltonian slow perturbation; outside that class the reduction degrades
// to order 1 with a diagnostic.

#include <string>
#include <utility>
#include <vector>

#include "qael/asymptotics.hpp"
#include "qael/operators.hpp"

namespace qael::reduction {

using asymptotics::DfsData;
using asymptotics::FastAnalysis;
using asymptotics::KrausMap;

//===========================================================================
// Reduced model
//===========================================================================

// Output of the elimination. h_s1, a_ops and b_ops are stored unscaled; the
// timescale parameter epsilon is folded in by reduced_generator(), so a
// single elimination serves a whole epsilon sweep.
struct ReducedModel {
  Index slow_dim = 0;
  double epsilon = 0.0;
  Eigen::MatrixXcd s0;            // dim x slow_dim isometry
  Operator h_s1;                  // Zeno Hamiltonian on the slow space
  std::vector<Operator> a_ops;    // first-order jump operators
  Operator c1;                    // Hermitian manifold correction (full space)
  bool has_c1 = false;
  std::vector<Operator> b_ops;    // second-order jump operators
  int order = 1;
  double residual_order1 = 0.0;
  double residual_order2 = 0.0;
  std::vector<std::string> notes;
};

//===========================================================================
// First order
//===========================================================================

// Zeno Hamiltonian S0^dag H1 S0.
inline Operator zeno_hamiltonian(const Operator& h1, const DfsData& dfs) {
  if (h1.rows() != dfs.s0.rows())
    throw DimensionError("zeno_hamiltonian: dimension mismatch");
  return dfs.s0.adjoint() * h1 * dfs.s0;
}

// A_mu = S0^dag M_mu L1 S0, one per Kraus operator; members below the drop
// threshold are removed.
inline std::vector<Operator> first_order_jumps(const Operator& l1,
                                               const KrausMap& kraus,
                                               const DfsData& dfs,
                                               const Tolerances& tol = {}) {
  if (l1.rows() != dfs.s0.rows())
    throw DimensionError("first_order_jumps: dimension mismatch");
  const double drop = tol.jump_drop_rel * std::max(1.0, l1.norm());
  std::vector<Operator> out;
  const Eigen::MatrixXcd l1s0 = l1 * dfs.s0;
  for (const auto& m : kraus.operators) {
    Operator a = dfs.s0.adjoint() * m * l1s0;
    if (a.norm() >= drop) out.push_back(std::move(a));
  }
  return out;
}

// First-order effective generator on the slow space: the Zeno Hamiltonian
// plus the concatenated first-order jumps over the slow jump channels.
inline LindbladGenerator first_order_generator(const LindbladGenerator& slow,
                                               const KrausMap& kraus,
                                               const DfsData& dfs,
                                               const Tolerances& tol = {}) {
  LindbladGenerator out;
  out.hamiltonian = zeno_hamiltonian(slow.hamiltonian, dfs);
  for (const auto& l1 : slow.jumps) {
    auto a_ops = first_order_jumps(l1, kraus, dfs, tol);
    out.jumps.insert(out.jumps.end(), a_ops.begin(), a_ops.end());
  }
  return out;
}

//===========================================================================
// Second order
//===========================================================================

// Reason string is empty when the second-order formulas apply.
inline std::string second_order_obstruction(const LindbladGenerator& fast,
                                            const LindbladGenerator& slow,
                                            const DfsData& dfs,
                                            const Tolerances& tol = {}) {
  if (fast.jumps.size() != 1)
    return "fast generator must have exactly one jump operator (has " +
           std::to_string(fast.jumps.size()) + ")";
  if (fast.hamiltonian.norm() >
      tol.herm * std::max(1.0, fast.jumps[0].norm()))
    return "fast generator must have no Hamiltonian";
  if (!slow.jumps.empty())
    return "slow perturbation must be purely Hamiltonian (has " +
           std::to_string(slow.jumps.size()) + " jump operators)";
  const double l0s0 = (fast.jumps[0] * dfs.s0).norm();
  if (l0s0 > tol.l0s0 * std::max(1.0, fast.jumps[0].norm()))
    return "fast jump operator does not annihilate the steady subspace "
           "(|L0 S0| = " + std::to_string(l0s0) + ")";
  return {};
}

// Hermitian manifold correction
//   C1 = 2 (L0^dag L0)^+ H1 P0 + 2 P0 H1 (L0^dag L0)^+ ,
// so that the first-order manifold map is rho_s -> -i [C1, S0 rho_s S0^dag].
inline Operator c1_operator(const Operator& l0, const Operator& h1,
                            const DfsData& dfs, const Tolerances& tol = {}) {
  if (l0.rows() != h1.rows() || l0.rows() != dfs.s0.rows())
    throw DimensionError("c1_operator: dimension mismatch");
  const Operator pinv = pseudo_inverse_psd(l0.adjoint() * l0, tol.pinv_rel, tol);
  return 2.0 * pinv * h1 * dfs.p0 + 2.0 * dfs.p0 * h1 * pinv;
}

// B_mu = 2 S0^dag M_mu L0 (L0^dag L0)^+ H1 S0; zero-norm members dropped.
inline std::vector<Operator> second_order_jumps(const Operator& l0,
                                                const Operator& h1,
                                                const KrausMap& kraus,
                                                const DfsData& dfs,
                                                const Tolerances& tol = {}) {
  const Operator pinv = pseudo_inverse_psd(l0.adjoint() * l0, tol.pinv_rel, tol);
  const Eigen::MatrixXcd tail = l0 * pinv * h1 * dfs.s0;
  const double drop = tol.jump_drop_rel * std::max(1.0, h1.norm());
  std::vector<Operator> out;
  for (const auto& m : kraus.operators) {
    Operator b = 2.0 * dfs.s0.adjoint() * m * tail;
    if (b.norm() >= drop) out.push_back(std::move(b));
  }
  return out;
}

// Replace a jump family by the minimal equivalent one: eigendecompose the
// Gram matrix G_{mu nu} = tr(B_mu^dag B_nu) and keep the sqrt(eigenvalue)-
// weighted combinations above the cut. The generated dissipator is
// unchanged.
inline std::vector<Operator> consolidate_jumps(const std::vector<Operator>& ops,
                                               const Tolerances& tol = {}) {
  if (ops.empty()) return {};
  const Index k = static_cast<Index>(ops.size());
  Eigen::MatrixXcd gram(k, k);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j)
      gram(i, j) = (ops[i].adjoint() * ops[j]).trace();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
  const double lmax = es.eigenvalues().maxCoeff();
  std::vector<Operator> out;
  for (Index c = k - 1; c >= 0; --c) {
    if (es.eigenvalues()(c) <= tol.consolidate_rel * std::max(0.0, lmax))
      break;
    // C_c = sum_mu V_{mu c} B_mu keeps the dissipator fixed and gives
    // tr(C_j^dag C_c) = lambda_c delta_jc.
    Operator combo = Operator::Zero(ops[0].rows(), ops[0].cols());
    for (Index i = 0; i < k; ++i)
      combo += es.eigenvectors()(i, c) * ops[i];
    out.push_back(std::move(combo));
  }
  return out;
}

//===========================================================================
// Assembly, parameterization, residuals
//===========================================================================

// Effective slow generator with epsilon folded in: Hamiltonian eps*H_s1,
// jumps {sqrt(eps) A_mu} and {eps B_mu}.
inline LindbladGenerator reduced_generator(const ReducedModel& m) {
  LindbladGenerator gen;
  gen.hamiltonian = m.epsilon * m.h_s1;
  const double sq = std::sqrt(m.epsilon);
  for (const auto& a : m.a_ops) gen.jumps.push_back(sq * a);
  for (const auto& b : m.b_ops) gen.jumps.push_back(m.epsilon * b);
  return gen;
}

// Unscaled first-order piece (for the invariance residuals, which are
// identities at fixed order).
inline LindbladGenerator order1_generator_unscaled(const ReducedModel& m) {
  return LindbladGenerator{m.h_s1, m.a_ops};
}

// Unscaled second-order dissipator.
inline Operator apply_order2_dissipator(const ReducedModel& m,
                                        const Operator& x) {
  return apply_generator(LindbladGenerator{Operator::Zero(m.slow_dim, m.slow_dim),
                                           m.b_ops},
                         x);
}

// Manifold map K0 + eps K1: S0 rho_s S0^dag - i eps [C1, S0 rho_s S0^dag]
// (the commutator term is absent when no correction was computed). The trace
// is exactly preserved; positivity holds to order eps only and is reported,
// not enforced.
inline Operator kraus_parametrization(const ReducedModel& m,
                                      const Operator& rho_s) {
  if (rho_s.rows() != m.slow_dim)
    throw DimensionError("kraus_parametrization: slow dimension mismatch");
  Operator lifted = m.s0 * rho_s * m.s0.adjoint();
  if (m.has_c1) lifted -= kI * m.epsilon * commutator(m.c1, lifted);
  return lifted;
}

// Max over slow matrix units E of the first-order invariance defect.
// With the manifold correction available:
//   |L0(K1(E)) + L1(K0(E)) - K0(Ls1(E))|_F ;
// otherwise the projected identity |R(L1(K0(E))) - K0(Ls1(E))|_F.
inline double residual_order1(const LindbladGenerator& fast,
                              const LindbladGenerator& slow,
                              const Superoperator& projector,
                              const ReducedModel& m) {
  const LindbladGenerator ls1 = order1_generator_unscaled(m);
  double worst = 0.0;
  for (Index nu = 0; nu < m.slow_dim; ++nu)
    for (Index mu = 0; mu < m.slow_dim; ++mu) {
      const Operator unit =
          Operator(basis_op(m.slow_dim, nu, mu));
      const Operator k0 = m.s0 * unit * m.s0.adjoint();
      const Operator k0ls1 = m.s0 * apply_generator(ls1, unit) * m.s0.adjoint();
      Operator defect;
      if (m.has_c1) {
        const Operator k1 = -kI * commutator(m.c1, k0);
        defect = apply_generator(fast, k1) + apply_generator(slow, k0) - k0ls1;
      } else {
        defect = projector.apply(apply_generator(slow, k0)) - k0ls1;
      }
      worst = std::max(worst, defect.norm());
    }
  return worst;
}

// Max over slow matrix units E of the second-order invariance defect
//   |S0^dag R(L1(K1(E)) - K1(Ls1(E))) S0 - Ls2(E)|_F ,
// with Ls2 evaluated from the stored B_mu. Also verifies that
// R(K1(Ls1(E))) vanishes.
inline double residual_order2(const LindbladGenerator& fast,
                              const LindbladGenerator& slow,
                              const Superoperator& projector,
                              const ReducedModel& m,
                              double* r_k1_ls1 = nullptr) {
  if (!m.has_c1)
    throw PreconditionError("residual_order2: model has no order-2 data");
  const LindbladGenerator ls1 = order1_generator_unscaled(m);
  double worst = 0.0, worst_rk = 0.0;
  for (Index nu = 0; nu < m.slow_dim; ++nu)
    for (Index mu = 0; mu < m.slow_dim; ++mu) {
      const Operator unit = basis_op(m.slow_dim, nu, mu);
      const Operator k0 = m.s0 * unit * m.s0.adjoint();
      const Operator k1 = -kI * commutator(m.c1, k0);
      const Operator k1_of_ls1 =
          -kI * commutator(m.c1, m.s0 * apply_generator(ls1, unit) *
                                     m.s0.adjoint());
      const Operator inner = apply_generator(slow, k1) - k1_of_ls1;
      const Operator lhs =
          m.s0.adjoint() * projector.apply(inner) * m.s0;
      const Operator rhs = apply_order2_dissipator(m, unit);
      worst = std::max(worst, (lhs - rhs).norm());
      worst_rk = std::max(worst_rk, projector.apply(k1_of_ls1).norm());
    }
  if (r_k1_ls1) *r_k1_ls1 = worst_rk;
  return worst;
}

// Full elimination. `analysis` must come from the same fast generator.
inline ReducedModel build_reduced_model(const LindbladGenerator& fast,
                                        const LindbladGenerator& slow,
                                        double epsilon, int order,
                                        const FastAnalysis& analysis,
                                        const Tolerances& tol = {}) {
  if (order != 1 && order != 2)
    throw PreconditionError("order must be 1 or 2");
  if (slow.dim() != fast.dim())
    throw DimensionError("fast and slow generators have different dimensions");
  analysis.require();
  const DfsData& dfs = *analysis.dfs;
  const KrausMap& kraus = *analysis.kraus;

  ReducedModel m;
  m.slow_dim = dfs.slow_dim;
  m.epsilon = epsilon;
  m.s0 = dfs.s0;
  m.order = order;
  LindbladGenerator ls1 = first_order_generator(slow, kraus, dfs, tol);
  m.h_s1 = std::move(ls1.hamiltonian);
  m.a_ops = std::move(ls1.jumps);

  if (m.slow_dim == 1)
    m.notes.push_back(
        "slow space is one-dimensional: the reduced generator is identically "
        "zero");

  if (order == 2) {
    const std::string why = second_order_obstruction(fast, slow, dfs, tol);
    if (!why.empty())
      throw PreconditionError("second-order expansion unavailable: " + why);
    m.c1 = c1_operator(fast.jumps[0], slow.hamiltonian, dfs, tol);
    m.has_c1 = true;
    m.b_ops = second_order_jumps(fast.jumps[0], slow.hamiltonian, kraus, dfs, tol);
  }

  m.residual_order1 = residual_order1(fast, slow, *analysis.projector, m);
  if (m.has_c1)
    m.residual_order2 = residual_order2(fast, slow, *analysis.projector, m);
  return m;
}

inline ReducedModel build_reduced_model(const LindbladGenerator& fast,
                                        const LindbladGenerator& slow,
                                        double epsilon, int order,
                                        const Tolerances& tol = {}) {
  return build_reduced_model(fast, slow, epsilon, order,
                             asymptotics::analyze_fast_generator(fast, tol),
                             tol);
}

}  // namespace qael::reduction

#endif  // QAEL_REDUCTION_HPP
