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

#ifndef QAEL_OPERATORS_HPP
#define QAEL_OPERATORS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "qael/detail/lapack.hpp"

namespace qael {

using Complex = std::complex<double>;

// Dense complex square matrix on the working Hilbert space. The dimension is
// rows(); squareness is enforced at the few construction sites that accept
// external data. Hermiticity / positivity / unitarity are checkable
// predicates, not type invariants.
using Operator = Eigen::MatrixXcd;

using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};

//===========================================================================
// Errors
//===========================================================================

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Operand dimensions do not match.
struct DimensionError : Error {
  using Error::Error;
};

// A numerical contract failed (non-Hermitian input, negative eigenvalue,
// non-finite entries, residual out of tolerance).
struct NumericsError : Error {
  using Error::Error;
};

// One of the structural assumptions on the fast generator does not hold.
// `check` is a stable machine-readable name (not_dissipative,
// zero_not_semisimple, not_dfs, kraus_not_scalar_on_dfs).
struct AssumptionError : Error {
  std::string check;
  AssumptionError(std::string check_, const std::string& what_)
      : Error(what_), check(std::move(check_)) {}
};

// Second-order expansion requested outside its domain of validity.
struct PreconditionError : Error {
  using Error::Error;
};

// A validation-suite invariant was violated. `name` identifies it.
struct InvariantError : Error {
  std::string name;
  InvariantError(std::string name_, const std::string& what_)
      : Error(what_), name(std::move(name_)) {}
};

//===========================================================================
// Tolerances
//===========================================================================

// Default numerical tolerances. Hermiticity/trace/PSD checks are relative to
// the Frobenius norm of the operand. Overridable through model options and
// the QAEL_TOL_OVERRIDES environment variable (see cli.hpp).
struct Tolerances {
  double herm = 1e-9;
  double trace = 1e-9;
  double psd = 1e-9;
  double pinv_rel = 1e-10;      // pseudo-inverse spectral cutoff, rel. to largest eigenvalue
  double zero_rel = 1e-9;       // zero-eigenvalue threshold, times max(1, |L|_F)
  double support = 1e-9;        // steady-support eigenvalue threshold
  double choi_cut_rel = 1e-10;  // Kraus retention threshold, rel. to largest Choi eigenvalue
  double jump_drop_rel = 1e-12; // drop reduced jumps below this times the source norm
  double consolidate_rel = 1e-10;
  double dfs_residual = 1e-9;   // per-matrix-unit steadiness residual on the slow space
  double kraus_scalar = 1e-6;   // max |M S0 - lambda S0| before refusing
  double cert_residual = 1e-8;  // completeness, R*(P0)=I, sum|lambda|^2-1
  double l0s0 = 1e-9;           // second-order gate on |L0 S0|, rel. to max(1, |L0|_F)
};

//===========================================================================
// Elementary operator algebra
//===========================================================================

inline Operator dagger(const Operator& a) { return a.adjoint(); }

inline Operator commutator(const Operator& a, const Operator& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("commutator: operand dimensions differ");
  return a * b - b * a;
}

inline Operator anticommutator(const Operator& a, const Operator& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("anticommutator: operand dimensions differ");
  return a * b + b * a;
}

inline Operator kron(const Operator& a, const Operator& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

inline Complex trace(const Operator& a) { return a.trace(); }

inline double frobenius_norm(const Operator& a) { return a.norm(); }

// Sum of singular values (nuclear norm).
inline double trace_norm(const Operator& a) {
  return Eigen::JacobiSVD<Operator>(a).singularValues().sum();
}

inline double hermiticity_defect(const Operator& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const Operator& a, double tol = 1e-9) {
  return hermiticity_defect(a) <= tol * std::max(1.0, a.norm());
}

// Trace over one factor of a bipartite operator on H_left (x) H_right,
// with the index convention i = i_left * dim_right + i_right.
// which = 0 traces out the left factor, which = 1 the right one.
inline Operator partial_trace(const Operator& a, Index dim_left,
                              Index dim_right, int which) {
  if (a.rows() != dim_left * dim_right || a.cols() != a.rows())
    throw DimensionError("partial_trace: dimensions do not factor the operator");
  if (which == 0) {
    Operator out = Operator::Zero(dim_right, dim_right);
    for (Index l = 0; l < dim_left; ++l)
      out += a.block(l * dim_right, l * dim_right, dim_right, dim_right);
    return out;
  }
  if (which == 1) {
    Operator out = Operator::Zero(dim_left, dim_left);
    for (Index i = 0; i < dim_left; ++i)
      for (Index j = 0; j < dim_left; ++j)
        out(i, j) = a.block(i * dim_right, j * dim_right, dim_right, dim_right)
                        .trace();
    return out;
  }
  throw DimensionError("partial_trace: which must be 0 or 1");
}

//===========================================================================
// Vectorization (column-stacking)
//===========================================================================
// vec stacks columns, so the action rho -> A rho B corresponds to the matrix
// (B^T (x) A) acting on vec(rho). This convention is fixed project-wide.

inline Eigen::VectorXcd vec(const Operator& a) {
  return Eigen::Map<const Eigen::VectorXcd>(a.data(), a.size());
}

inline Operator unvec(const Eigen::VectorXcd& v, Index dim) {
  if (v.size() != dim * dim)
    throw DimensionError("unvec: vector length is not dim^2");
  return Eigen::Map<const Operator>(v.data(), dim, dim);
}

//===========================================================================
// Standard constructors (qubit algebra, truncated Fock space)
//===========================================================================
// Two-level basis order: index 0 = ground |g>, index 1 = excited |e>.

inline Operator sigma_x() {
  Operator s(2, 2);
  s << 0, 1, 1, 0;
  return s;
}

inline Operator sigma_y() {
  Operator s(2, 2);
  s << 0, -kI, kI, 0;
  return s;
}

inline Operator sigma_z() {
  Operator s(2, 2);
  s << 1, 0, 0, -1;
  return s;
}

// |e><g|
inline Operator sigma_plus() {
  Operator s = Operator::Zero(2, 2);
  s(1, 0) = 1;
  return s;
}

// |g><e|
inline Operator sigma_minus() {
  Operator s = Operator::Zero(2, 2);
  s(0, 1) = 1;
  return s;
}

// Truncated annihilation operator, <i|a|i+1> = sqrt(i+1).
inline Operator destroy_op(Index n) {
  Operator a = Operator::Zero(n, n);
  for (Index i = 0; i + 1 < n; ++i) a(i, i + 1) = std::sqrt(double(i + 1));
  return a;
}

inline Operator create_op(Index n) { return destroy_op(n).adjoint().eval(); }

inline Operator number_op(Index n) {
  Operator m = Operator::Zero(n, n);
  for (Index i = 0; i < n; ++i) m(i, i) = double(i);
  return m;
}

// |i><j| on an n-dimensional space.
inline Operator basis_op(Index n, Index i, Index j) {
  if (i < 0 || j < 0 || i >= n || j >= n)
    throw DimensionError("basis_op: index out of range");
  Operator m = Operator::Zero(n, n);
  m(i, j) = 1;
  return m;
}

// exp(alpha a^dag - alpha^* a) on the truncated space.
inline Operator displacement_op(Index n, Complex alpha) {
  Operator g = alpha * create_op(n) - std::conj(alpha) * destroy_op(n);
  return g.exp();
}

// Normalized truncated coherent state, phase convention <0|alpha> > 0.
inline Eigen::VectorXcd coherent_vector(Index n, Complex alpha) {
  Eigen::VectorXcd v(n);
  Complex amp = 1.0;
  for (Index k = 0; k < n; ++k) {
    v(k) = amp;
    amp *= alpha / std::sqrt(double(k + 1));
  }
  return v / v.norm();
}

//===========================================================================
// Domain types
//===========================================================================

// Hermitian, unit-trace, positive-semidefinite operator (within tolerance).
struct DensityMatrix {
  Operator rho;
  Index dim() const { return rho.rows(); }
};

// Validates the density-matrix contract and returns the wrapper.
inline DensityMatrix make_density_matrix(const Operator& rho,
                                         const Tolerances& tol = {}) {
  if (rho.rows() != rho.cols())
    throw DimensionError("density matrix must be square");
  const double scale = std::max(1.0, rho.norm());
  if (hermiticity_defect(rho) > tol.herm * scale)
    throw NumericsError("density matrix is not Hermitian (max defect " +
                        std::to_string(hermiticity_defect(rho)) + ")");
  if (std::abs(rho.trace() - Complex(1.0)) > tol.trace * scale)
    throw NumericsError("density matrix trace differs from 1");
  Eigen::SelfAdjointEigenSolver<Operator> es(0.5 * (rho + rho.adjoint()),
                                             Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol.psd * scale)
    throw NumericsError("density matrix has a negative eigenvalue");
  return DensityMatrix{rho};
}

// Nearest density matrix: Hermitize, clip negative eigenvalues at zero and
// renormalize the trace. Returns the clipped probability mass.
inline std::pair<DensityMatrix, double> closest_density(const Operator& a) {
  Operator h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Operator> es(h);
  Eigen::VectorXd ev = es.eigenvalues();
  double clipped = 0.0;
  for (Index i = 0; i < ev.size(); ++i)
    if (ev(i) < 0) {
      clipped -= ev(i);
      ev(i) = 0;
    }
  const double total = ev.sum();
  if (total <= 0) throw NumericsError("closest_density: zero total weight");
  ev /= total;
  Operator rho = es.eigenvectors() * ev.asDiagonal() *
                 es.eigenvectors().adjoint();
  return {DensityMatrix{rho}, clipped};
}

// One Lindblad generator: a Hamiltonian (angular frequency) plus jump
// operators (sqrt(rate)). All members share the Hilbert-space dimension.
struct LindbladGenerator {
  Operator hamiltonian;
  std::vector<Operator> jumps;

  Index dim() const { return hamiltonian.rows(); }

  static LindbladGenerator zero(Index d) {
    return LindbladGenerator{Operator::Zero(d, d), {}};
  }
};

inline void validate_generator(const LindbladGenerator& gen,
                               const Tolerances& tol = {}) {
  if (gen.hamiltonian.rows() != gen.hamiltonian.cols())
    throw DimensionError("generator Hamiltonian must be square");
  if (!is_hermitian(gen.hamiltonian, tol.herm))
    throw NumericsError("generator Hamiltonian is not Hermitian (max defect " +
                        std::to_string(hermiticity_defect(gen.hamiltonian)) +
                        ")");
  for (const auto& l : gen.jumps)
    if (l.rows() != gen.dim() || l.cols() != gen.dim())
      throw DimensionError("jump operator dimension differs from Hamiltonian");
}

// d^2 x d^2 complex matrix acting on column-stacked operators.
struct Superoperator {
  Index dim = 0;
  Eigen::MatrixXcd matrix;

  Operator apply(const Operator& x) const {
    if (x.rows() != dim || x.cols() != dim)
      throw DimensionError("superoperator applied to wrong dimension");
    return unvec(matrix * vec(x), dim);
  }

  static Superoperator identity(Index d) {
    return Superoperator{d, Eigen::MatrixXcd::Identity(d * d, d * d)};
  }
};

// Spectral data of a Liouvillian. gap = min(-Re lambda) over the nonzero
// eigenvalues, clamped at 0; a positive gap is required for the two-timescale
// assumptions to hold.
struct Spectrum {
  std::vector<Complex> eigenvalues;
  int zero_multiplicity_algebraic = 0;
  int zero_multiplicity_geometric = 0;
  double gap = 0.0;
};

//===========================================================================
// Generator application
//===========================================================================

// -i[H, rho] + sum_nu (L rho L^dag - 1/2 L^dag L rho - 1/2 rho L^dag L).
// Linear in rho; accepts any square matrix of matching dimension.
inline Operator apply_generator(const LindbladGenerator& gen,
                                const Operator& rho) {
  if (rho.rows() != gen.dim() || rho.cols() != gen.dim())
    throw DimensionError("apply_generator: state dimension mismatch");
  Operator out = -kI * (gen.hamiltonian * rho - rho * gen.hamiltonian);
  for (const auto& l : gen.jumps) {
    const Operator ldl = l.adjoint() * l;
    out += l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl);
  }
  return out;
}

// Heisenberg-picture adjoint: i[H, A] + sum_nu (L^dag A L - 1/2 {L^dag L, A}).
// Callers normally pass Hermitian A; the algebra is linear either way.
inline Operator apply_adjoint_generator(const LindbladGenerator& gen,
                                        const Operator& a) {
  if (a.rows() != gen.dim() || a.cols() != gen.dim())
    throw DimensionError("apply_adjoint_generator: dimension mismatch");
  Operator out = kI * (gen.hamiltonian * a - a * gen.hamiltonian);
  for (const auto& l : gen.jumps) {
    const Operator ldl = l.adjoint() * l;
    out += l.adjoint() * a * l - 0.5 * (ldl * a + a * ldl);
  }
  return out;
}

// Matrix form of the generator under column-stacking.
inline Superoperator liouvillian_matrix(const LindbladGenerator& gen) {
  const Index d = gen.dim();
  const Operator id = Operator::Identity(d, d);
  Eigen::MatrixXcd m = -kI * (kron(id, gen.hamiltonian) -
                              kron(gen.hamiltonian.transpose(), id));
  for (const auto& l : gen.jumps) {
    const Operator ldl = l.adjoint() * l;
    m += kron(l.conjugate(), l) - 0.5 * kron(id, ldl) -
         0.5 * kron(ldl.transpose(), id);
  }
  return Superoperator{d, std::move(m)};
}

// Matrix of the adjoint generator; equals the Hilbert-Schmidt adjoint of the
// Liouvillian matrix.
inline Superoperator adjoint_liouvillian_matrix(const LindbladGenerator& gen) {
  Superoperator s = liouvillian_matrix(gen);
  s.matrix = s.matrix.adjoint().eval();
  return s;
}

//===========================================================================
// Numerical kernels
//===========================================================================

// exp(t * S) by scaling-and-squaring with Pade approximants. exp(0*S) is the
// identity exactly.
inline Superoperator matrix_exponential(const Superoperator& s, double t) {
  if (t < 0) throw NumericsError("matrix_exponential: negative time");
  if (!s.matrix.allFinite())
    throw NumericsError("matrix_exponential: non-finite entries");
  if (t == 0.0) return Superoperator::identity(s.dim);
  return Superoperator{s.dim, (t * s.matrix).exp()};
}

struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;  // ascending
  Eigen::MatrixXcd eigenvectors;
};

// Hermitian eigendecomposition; the input is symmetrized first. Large
// problems go through zheevd.
inline EigenDecomposition hermitian_eigendecomposition(const Operator& a) {
  if (a.rows() != a.cols())
    throw DimensionError("hermitian_eigendecomposition: matrix not square");
  Operator h = 0.5 * (a + a.adjoint());
  if (h.rows() >= 128) {
    EigenDecomposition out;
    out.eigenvectors = std::move(h);
    detail::hermitian_eig_inplace(out.eigenvectors, out.eigenvalues);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Operator> es(h);
  return EigenDecomposition{es.eigenvalues(), es.eigenvectors()};
}

// Moore-Penrose pseudo-inverse of a Hermitian PSD operator: invert the
// eigenvalues above rel_tol * lambda_max, zero the rest.
inline Operator pseudo_inverse_psd(const Operator& a, double rel_tol = 1e-10,
                                   const Tolerances& tol = {}) {
  const double scale = std::max(1.0, a.norm());
  if (hermiticity_defect(a) > tol.herm * scale)
    throw NumericsError("pseudo_inverse_psd: input is not Hermitian");
  EigenDecomposition ed = hermitian_eigendecomposition(a);
  const double lmax = ed.eigenvalues.size() ? ed.eigenvalues.maxCoeff() : 0.0;
  if (ed.eigenvalues.size() && ed.eigenvalues.minCoeff() < -tol.psd * std::max(1.0, lmax))
    throw NumericsError("pseudo_inverse_psd: input has a negative eigenvalue");
  Operator out = Operator::Zero(a.rows(), a.cols());
  for (Index k = 0; k < ed.eigenvalues.size(); ++k) {
    const double lam = ed.eigenvalues(k);
    if (lam > rel_tol * lmax && lam > 0.0)
      out += (1.0 / lam) * ed.eigenvectors.col(k) *
             ed.eigenvectors.col(k).adjoint();
  }
  return out;
}

}  // namespace qael

#endif  // QAEL_OPERATORS_HPP
