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

#ifndef QAEL_ASYMPTOTICS_HPP
#define QAEL_ASYMPTOTICS_HPP

// Certification of the fast generator and construction of its asymptotic
// objects: the steady-state projector R, a canonical Kraus decomposition of
// R, the decoherence-free-subspace data (P0, S0), the scalars lambda_mu by
// which the Kraus operators act on the steady subspace, and the invariant
// operators (kernel of the adjoint generator).

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qael/operators.hpp"

namespace qael::asymptotics {

//===========================================================================
// Types
//===========================================================================

// Kraus decomposition sum_mu M_mu (.) M_mu^dag with completeness metadata.
struct KrausMap {
  std::vector<Operator> operators;
  double completeness_residual = 0.0;  // |sum M^dag M - I|_F
};

inline Operator apply_kraus(const KrausMap& k, const Operator& x) {
  Operator out = Operator::Zero(x.rows(), x.cols());
  for (const auto& m : k.operators) out += m * x * m.adjoint();
  return out;
}

// Heisenberg form sum_mu M_mu^dag (.) M_mu.
inline Operator apply_adjoint_kraus(const KrausMap& k, const Operator& x) {
  Operator out = Operator::Zero(x.rows(), x.cols());
  for (const auto& m : k.operators) out += m.adjoint() * x * m;
  return out;
}

inline Superoperator kraus_to_superoperator(const KrausMap& k, Index dim) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim * dim, dim * dim);
  for (const auto& op : k.operators) m += kron(op.conjugate(), op);
  return Superoperator{dim, std::move(m)};
}

// Decoherence-free-subspace data. s0 is the dim x slow_dim isometry whose
// columns are the canonical steady-subspace basis; p0 = s0 s0^dag.
struct DfsData {
  Index slow_dim = 0;
  Operator p0;
  Eigen::MatrixXcd s0;
};

// Certification summary for the fast generator.
struct AssumptionReport {
  Spectrum spectrum;
  bool zero_semisimple = false;
  double gap = 0.0;
  bool dfs_confirmed = false;
  std::vector<Complex> lambda;
  double lambda_norm_residual = 0.0;  // | sum |lambda|^2 - 1 |
  double rp0_residual = 0.0;          // |R*(P0) - I|_F
  double kraus_scalar_residual = 0.0; // max_mu |M S0 - lambda S0|_F
  Index slow_dim = 0;
  bool qualifies = false;
  std::string failed_check;  // empty when qualifies
  std::vector<std::string> notes;
};

// Ordered Schur form of a Liouvillian: the zero cluster occupies the leading
// `cluster` diagonal positions of t.
struct SchurForm {
  Eigen::MatrixXcd u, t;
  Index cluster = 0;
  double zero_tol = 0.0;
};

//===========================================================================
// Spectral analysis
//===========================================================================

inline SchurForm ordered_schur(const Superoperator& l0mat,
                               const Tolerances& tol = {}) {
  if (!l0mat.matrix.allFinite())
    throw NumericsError("ordered_schur: non-finite entries");
  detail::ComplexSchurResult s = detail::complex_schur(l0mat.matrix);
  const Index n = s.t.rows();
  const double zero_tol =
      tol.zero_rel * std::max(1.0, l0mat.matrix.norm());
  SchurForm out{std::move(s.u), std::move(s.t), 0, zero_tol};
  // Pull every |lambda| <= zero_tol eigenvalue to the front, preserving
  // relative order. Eigenvalue values are unchanged by the unitary swaps.
  Index target = 0;
  for (;;) {
    Index found = -1;
    for (Index i = target; i < n; ++i)
      if (std::abs(out.t(i, i)) <= zero_tol) {
        found = i;
        break;
      }
    if (found < 0) break;
    if (found != target) detail::schur_move(out.t, out.u, found, target);
    ++target;
  }
  out.cluster = target;
  return out;
}

inline Spectrum spectrum_from_schur(const SchurForm& sf) {
  const Index n = sf.t.rows();
  const Index k = sf.cluster;
  Spectrum sp;
  sp.eigenvalues.reserve(n);
  for (Index i = 0; i < k; ++i) sp.eigenvalues.push_back(sf.t(i, i));
  std::vector<Complex> rest;
  for (Index i = k; i < n; ++i) rest.push_back(sf.t(i, i));
  std::sort(rest.begin(), rest.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() < b.imag();
  });
  sp.eigenvalues.insert(sp.eigenvalues.end(), rest.begin(), rest.end());
  sp.zero_multiplicity_algebraic = static_cast<int>(k);
  // Kernel vectors live in the zero-cluster invariant subspace, so the
  // geometric multiplicity is the kernel dimension of the leading block.
  if (k > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(sf.t.topLeftCorner(k, k));
    Index rank = 0;
    for (Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > sf.zero_tol) ++rank;
    sp.zero_multiplicity_geometric = static_cast<int>(k - rank);
  }
  double gap = 0.0;
  if (!rest.empty()) {
    gap = std::numeric_limits<double>::infinity();
    for (Complex lam : rest) gap = std::min(gap, -lam.real());
    gap = std::max(gap, 0.0);
  }
  sp.gap = gap;
  return sp;
}

// Full eigenvalue list, zero multiplicities and spectral gap of a
// Liouvillian matrix.
inline Spectrum analyze_spectrum(const Superoperator& l0mat,
                                 const Tolerances& tol = {}) {
  return spectrum_from_schur(ordered_schur(l0mat, tol));
}

// True when every eigenvalue outside the zero cluster decays: no nonzero
// eigenvalue with real part above -zero_tol.
inline bool spectrum_dissipative(const Spectrum& sp, double zero_tol) {
  bool has_nonzero = false;
  for (Complex lam : sp.eigenvalues)
    if (std::abs(lam) > zero_tol) {
      has_nonzero = true;
      if (lam.real() > -zero_tol) return false;
    }
  return has_nonzero;
}

inline bool spectrum_semisimple(const Spectrum& sp) {
  return sp.zero_multiplicity_algebraic == sp.zero_multiplicity_geometric;
}

// Spectral projector onto the zero eigenspace along the range of the
// Liouvillian, from the ordered Schur form. With t = [[t11, t12], [0, t22]]
// and y solving t11 y - y t22 = t12, the projector is
// u [[I, y], [0, 0]] u^H.
inline Superoperator steady_projector(const SchurForm& sf, Index dim) {
  const Index n = sf.t.rows();
  const Index k = sf.cluster;
  if (k == 0)
    throw AssumptionError("not_dissipative",
                          "steady_projector: no zero eigenvalue found");
  // Semisimplicity: the restriction of the generator to the zero cluster
  // must vanish.
  {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(sf.t.topLeftCorner(k, k));
    if (svd.singularValues().size() &&
        svd.singularValues().maxCoeff() > sf.zero_tol)
      throw AssumptionError(
          "zero_not_semisimple",
          "steady_projector: zero eigenvalue has a Jordan block; reduction refused");
  }
  if (k == n) return Superoperator::identity(dim);
  Eigen::MatrixXcd y = detail::solve_sylvester_triangular(
      sf.t.topLeftCorner(k, k), sf.t.bottomRightCorner(n - k, n - k),
      sf.t.topRightCorner(k, n - k));
  const auto u1 = sf.u.leftCols(k);
  const auto u2 = sf.u.rightCols(n - k);
  Eigen::MatrixXcd r = u1 * (u1.adjoint() + y * u2.adjoint());
  return Superoperator{dim, std::move(r)};
}

inline Superoperator steady_projector(const Superoperator& l0mat,
                                      const Spectrum& spectrum,
                                      const Tolerances& tol = {}) {
  if (!spectrum_semisimple(spectrum))
    throw AssumptionError("zero_not_semisimple",
                          "steady_projector: zero eigenvalue not semisimple");
  return steady_projector(ordered_schur(l0mat, tol), l0mat.dim);
}

//===========================================================================
// Choi matrix and Kraus extraction
//===========================================================================

// C = sum_ij E_ij (x) Phi(E_ij) with E_ij = |i><j|.
inline Eigen::MatrixXcd choi_matrix(const Superoperator& s) {
  const Index d = s.dim;
  Eigen::MatrixXcd c(d * d, d * d);
  // Block (i,j) of C is unvec(column j*d+i of the superoperator matrix).
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j)
      for (Index col = 0; col < d; ++col)
        for (Index row = 0; row < d; ++row)
          c(i * d + row, j * d + col) = s.matrix(col * d + row, j * d + i);
  return c;
}

// Canonical Kraus decomposition of a completely positive map: Hermitian
// eigendecomposition of the Choi matrix, operators ordered by descending
// eigenvalue, phase fixed by making the largest-magnitude entry of each
// operator real positive.
inline KrausMap kraus_from_choi(const Superoperator& r,
                                const Tolerances& tol = {}) {
  const Index d = r.dim;
  Eigen::MatrixXcd c = choi_matrix(r);
  const double herm_defect = (c - c.adjoint()).norm();
  if (herm_defect > tol.herm * std::max(1.0, c.norm()))
    throw NumericsError("kraus_from_choi: Choi matrix is not Hermitian");
  EigenDecomposition ed = hermitian_eigendecomposition(c);
  const double lmax = ed.eigenvalues.maxCoeff();
  if (lmax <= 0)
    throw NumericsError("kraus_from_choi: map is numerically zero");
  if (ed.eigenvalues.minCoeff() < -tol.psd * lmax)
    throw AssumptionError(
        "not_dfs", "kraus_from_choi: Choi matrix has a negative eigenvalue; "
                   "map not completely positive");
  KrausMap k;
  for (Index i = ed.eigenvalues.size() - 1; i >= 0; --i) {
    const double lam = ed.eigenvalues(i);
    if (lam <= tol.choi_cut_rel * lmax) break;  // ascending order: done
    Operator m = std::sqrt(lam) * unvec(ed.eigenvectors.col(i), d);
    // Phase canonicalization.
    Index rmax = 0, cmax = 0;
    double best = -1.0;
    for (Index cc = 0; cc < d; ++cc)
      for (Index rr = 0; rr < d; ++rr)
        if (std::abs(m(rr, cc)) > best) {
          best = std::abs(m(rr, cc));
          rmax = rr;
          cmax = cc;
        }
    if (best > 0) m *= std::conj(m(rmax, cmax)) / best;
    k.operators.push_back(std::move(m));
  }
  Operator comp = Operator::Zero(d, d);
  for (const auto& m : k.operators) comp += m.adjoint() * m;
  k.completeness_residual = (comp - Operator::Identity(d, d)).norm();
  return k;
}

//===========================================================================
// Decoherence-free subspace
//===========================================================================

namespace detail_dfs {

// Deterministic orthonormal basis of the range of an orthogonal projector:
// modified Gram-Schmidt over the projected computational basis vectors,
// pivoting on the largest residual (ties resolved by lowest index).
inline Eigen::MatrixXcd canonical_range_basis(const Operator& p0, Index rank) {
  const Index d = p0.rows();
  Eigen::MatrixXcd residual = p0;  // column j holds P0 e_j
  Eigen::MatrixXcd basis(d, rank);
  for (Index step = 0; step < rank; ++step) {
    Index piv = 0;
    double best = -1.0;
    for (Index j = 0; j < d; ++j) {
      const double nrm = residual.col(j).norm();
      if (nrm > best + 1e-14) {
        best = nrm;
        piv = j;
      }
    }
    if (best <= 0)
      throw NumericsError("canonical_range_basis: projector rank deficient");
    basis.col(step) = residual.col(piv) / best;
    residual -= basis.col(step) * (basis.col(step).adjoint() * residual);
  }
  return basis;
}

}  // namespace detail_dfs

// Steady subspace from the support of R(I/d), with a deterministic basis
// aligned to the computational basis. Confirms that every density operator
// on the subspace is stationary; refuses the model otherwise.
inline DfsData identify_dfs(const Superoperator& r,
                            const LindbladGenerator& l0,
                            const Tolerances& tol = {}) {
  const Index d = r.dim;
  if (l0.dim() != d) throw DimensionError("identify_dfs: dimension mismatch");
  Operator steady = r.apply(Operator::Identity(d, d) / double(d));
  steady = 0.5 * (steady + steady.adjoint());
  EigenDecomposition ed = hermitian_eigendecomposition(steady);
  Index rank = 0;
  for (Index i = 0; i < ed.eigenvalues.size(); ++i)
    if (ed.eigenvalues(i) > tol.support) ++rank;
  if (rank == 0)
    throw AssumptionError("not_dfs",
                          "identify_dfs: steady state has empty support");
  Operator p0 = Operator::Zero(d, d);
  for (Index i = ed.eigenvalues.size() - rank; i < ed.eigenvalues.size(); ++i)
    p0 += ed.eigenvectors.col(i) * ed.eigenvectors.col(i).adjoint();
  DfsData dfs;
  dfs.slow_dim = rank;
  dfs.p0 = std::move(p0);
  dfs.s0 = detail_dfs::canonical_range_basis(dfs.p0, rank);
  // Support confirmation: every slow matrix unit must be stationary.
  for (Index nu = 0; nu < rank; ++nu)
    for (Index mu = 0; mu < rank; ++mu) {
      Operator unit = dfs.s0.col(nu) * dfs.s0.col(mu).adjoint();
      const double res = apply_generator(l0, unit).norm();
      if (res > tol.dfs_residual)
        throw AssumptionError(
            "not_dfs",
            "identify_dfs: density operators on the steady support are not "
            "all stationary (residual " + std::to_string(res) + ")");
    }
  return dfs;
}

// lambda_mu = tr(S0^dag M_mu S0) / slow_dim, with the residual
// max_mu |M_mu S0 - lambda_mu S0|_F quantifying how far the Kraus family is
// from acting as scalars on the steady subspace.
inline std::pair<std::vector<Complex>, double> kraus_eigenvalues(
    const KrausMap& k, const DfsData& dfs) {
  std::vector<Complex> lambda;
  double residual = 0.0;
  for (const auto& m : k.operators) {
    const Complex lam =
        (dfs.s0.adjoint() * m * dfs.s0).trace() / double(dfs.slow_dim);
    lambda.push_back(lam);
    residual = std::max(residual, (m * dfs.s0 - lam * dfs.s0).norm());
  }
  return {lambda, residual};
}

//===========================================================================
// Invariant operators
//===========================================================================

// Orthonormal Hermitian basis of the kernel of the adjoint generator,
// computed from the left singular vectors of the Liouvillian matrix. When a
// Kraus map for R is supplied, each basis element J is verified to satisfy
// R*(J) = J.
inline std::vector<Operator> invariant_operators(
    const LindbladGenerator& l0, const KrausMap* r_kraus = nullptr,
    const Tolerances& tol = {}) {
  const Index d = l0.dim();
  Superoperator lmat = liouvillian_matrix(l0);
  detail::SvdResult sv = detail::svd(lmat.matrix);
  const double smax =
      sv.singular_values.size() ? sv.singular_values.maxCoeff() : 0.0;
  const double cut = tol.zero_rel * std::max(1.0, smax);
  std::vector<Operator> raw;
  for (Index i = 0; i < sv.singular_values.size(); ++i)
    if (sv.singular_values(i) <= cut) raw.push_back(unvec(sv.u.col(i), d));
  const Index kdim = static_cast<Index>(raw.size());
  // The kernel is closed under the adjoint, so it has a Hermitian basis:
  // orthonormalize the Hermitian and anti-Hermitian parts (real span,
  // Hilbert-Schmidt inner product) and keep kdim of them.
  std::vector<Operator> candidates;
  for (const auto& j : raw) {
    candidates.push_back(0.5 * (j + j.adjoint()));
    candidates.push_back((j - j.adjoint()) / (2.0 * kI));
  }
  std::vector<Operator> basis;
  for (Index step = 0; step < kdim; ++step) {
    Index piv = -1;
    double best = 1e-7;
    for (Index c = 0; c < Index(candidates.size()); ++c) {
      const double nrm = candidates[c].norm();
      if (nrm > best + 1e-14) {
        best = nrm;
        piv = c;
      }
    }
    if (piv < 0)
      throw NumericsError("invariant_operators: Hermitian basis collapsed");
    Operator b = candidates[piv] / best;
    for (auto& c : candidates)
      c -= b * (b.conjugate().cwiseProduct(c).sum()).real();
    basis.push_back(std::move(b));
  }
  if (r_kraus)
    for (const auto& j : basis) {
      const double res = (apply_adjoint_kraus(*r_kraus, j) - j).norm();
      if (res > tol.cert_residual)
        throw NumericsError(
            "invariant_operators: R*(J) != J (residual " +
            std::to_string(res) + ")");
    }
  return basis;
}

//===========================================================================
// Certification pipeline
//===========================================================================

// Everything derived from the fast generator, built in one pass so the
// expensive Schur factorization happens once. Members past `spectrum` are
// only populated while the assumption checks keep passing; `report` records
// how far certification got.
struct FastAnalysis {
  Superoperator l0mat;
  Spectrum spectrum;
  std::optional<Superoperator> projector;
  std::optional<KrausMap> kraus;
  std::optional<DfsData> dfs;
  std::vector<Complex> lambda;
  AssumptionReport report;

  // Throws AssumptionError when the model does not qualify for reduction.
  const FastAnalysis& require() const {
    if (!report.qualifies)
      throw AssumptionError(report.failed_check,
                            "fast generator does not qualify: " +
                                report.failed_check);
    return *this;
  }
};

inline FastAnalysis analyze_fast_generator(const LindbladGenerator& l0,
                                           const Tolerances& tol = {}) {
  validate_generator(l0, tol);
  FastAnalysis fa;
  fa.l0mat = liouvillian_matrix(l0);
  SchurForm sf = ordered_schur(fa.l0mat, tol);
  fa.spectrum = spectrum_from_schur(sf);
  AssumptionReport& rep = fa.report;
  rep.spectrum = fa.spectrum;
  rep.gap = fa.spectrum.gap;
  rep.zero_semisimple = spectrum_semisimple(fa.spectrum);

  auto fail = [&](const std::string& check) {
    rep.qualifies = false;
    rep.failed_check = check;
  };

  if (!spectrum_dissipative(fa.spectrum, sf.zero_tol) || rep.gap <= 0.0) {
    if (sf.cluster == fa.l0mat.matrix.rows())
      rep.notes.push_back(
          "fast generator is numerically zero: no timescale separation");
    fail("not_dissipative");
    return fa;
  }
  if (!rep.zero_semisimple) {
    fail("zero_not_semisimple");
    return fa;
  }
  fa.projector = steady_projector(sf, l0.dim());
  try {
    fa.kraus = kraus_from_choi(*fa.projector, tol);
    fa.dfs = identify_dfs(*fa.projector, l0, tol);
  } catch (const AssumptionError& e) {
    rep.notes.push_back(e.what());
    fail(e.check);
    return fa;
  }
  rep.slow_dim = fa.dfs->slow_dim;
  rep.dfs_confirmed = true;
  auto [lambda, scalar_residual] = kraus_eigenvalues(*fa.kraus, *fa.dfs);
  fa.lambda = lambda;
  rep.lambda = lambda;
  rep.kraus_scalar_residual = scalar_residual;
  double norm2 = 0.0;
  for (Complex lam : lambda) norm2 += std::norm(lam);
  rep.lambda_norm_residual = std::abs(norm2 - 1.0);
  rep.rp0_residual = (apply_adjoint_kraus(*fa.kraus, fa.dfs->p0) -
                      Operator::Identity(l0.dim(), l0.dim()))
                         .norm();
  if (rep.rp0_residual > tol.cert_residual) {
    fail("not_dfs");
    return fa;
  }
  if (rep.kraus_scalar_residual > tol.kraus_scalar ||
      rep.lambda_norm_residual > tol.cert_residual) {
    fail("kraus_not_scalar_on_dfs");
    return fa;
  }
  if (fa.kraus->completeness_residual > tol.cert_residual) {
    rep.notes.push_back("Kraus completeness residual out of tolerance");
    fail("not_dfs");
    return fa;
  }
  rep.qualifies = true;
  return fa;
}

// Certification without intermediate objects; never throws on a
// disqualifying model.
inline AssumptionReport certify(const LindbladGenerator& l0,
                                const Tolerances& tol = {}) {
  return analyze_fast_generator(l0, tol).report;
}

}  // namespace qael::asymptotics

#endif  // QAEL_ASYMPTOTICS_HPP
