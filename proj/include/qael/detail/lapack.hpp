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

#ifndef QAEL_DETAIL_LAPACK_HPP
#define QAEL_DETAIL_LAPACK_HPP

// Thin wrappers around the LAPACKE kernels used by the spectral pipeline.
// Everything is column-major, matching Eigen's default storage.

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <Eigen/Dense>

namespace qael::detail {

inline void check_info(lapack_int info, const char* routine) {
  if (info != 0)
    throw std::runtime_error(std::string(routine) + " failed with info=" +
                             std::to_string(info));
}

struct ComplexSchurResult {
  Eigen::MatrixXcd u;  // unitary, a = u t u^H
  Eigen::MatrixXcd t;  // upper triangular
};

// Unsorted complex Schur factorization (zgees).
inline ComplexSchurResult complex_schur(const Eigen::MatrixXcd& a) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  ComplexSchurResult r;
  r.t = a;
  r.u.resize(n, n);
  std::vector<std::complex<double>> w(n);
  lapack_int sdim = 0;
  lapack_int info =
      LAPACKE_zgees(LAPACK_COL_MAJOR, 'V', 'N', nullptr, n, r.t.data(), n,
                    &sdim, w.data(), r.u.data(), n);
  check_info(info, "zgees");
  return r;
}

// Move the diagonal entry at position ifst to position ilst (0-based),
// updating t and u (ztrexc).
inline void schur_move(Eigen::MatrixXcd& t, Eigen::MatrixXcd& u,
                       Eigen::Index ifst, Eigen::Index ilst) {
  const lapack_int n = static_cast<lapack_int>(t.rows());
  lapack_int info = LAPACKE_ztrexc(LAPACK_COL_MAJOR, 'V', n, t.data(), n,
                                   u.data(), n,
                                   static_cast<lapack_int>(ifst + 1),
                                   static_cast<lapack_int>(ilst + 1));
  check_info(info, "ztrexc");
}

// Solve A X - X B = C for upper-triangular A (m x m) and B (n x n) (ztrsyl).
inline Eigen::MatrixXcd solve_sylvester_triangular(const Eigen::MatrixXcd& a,
                                                   const Eigen::MatrixXcd& b,
                                                   const Eigen::MatrixXcd& c) {
  const lapack_int m = static_cast<lapack_int>(a.rows());
  const lapack_int n = static_cast<lapack_int>(b.rows());
  Eigen::MatrixXcd x = c;
  double scale = 1.0;
  lapack_int info =
      LAPACKE_ztrsyl(LAPACK_COL_MAJOR, 'N', 'N', -1, m, n, a.data(), m,
                     b.data(), n, x.data(), std::max<lapack_int>(1, m), &scale);
  check_info(info, "ztrsyl");
  if (scale != 1.0) x /= scale;
  return x;
}

// Hermitian eigendecomposition in place (zheevd): a is replaced by the
// eigenvectors, w receives the ascending eigenvalues.
inline void hermitian_eig_inplace(Eigen::MatrixXcd& a, Eigen::VectorXd& w) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  w.resize(n);
  lapack_int info =
      LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, a.data(), n, w.data());
  check_info(info, "zheevd");
}

struct SvdResult {
  Eigen::VectorXd singular_values;  // descending
  Eigen::MatrixXcd u;
  Eigen::MatrixXcd vh;
};

// Thin SVD (zgesdd).
inline SvdResult svd(const Eigen::MatrixXcd& a) {
  const lapack_int m = static_cast<lapack_int>(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.cols());
  const lapack_int k = std::min(m, n);
  SvdResult r;
  r.singular_values.resize(k);
  r.u.resize(m, k);
  r.vh.resize(k, n);
  Eigen::MatrixXcd work = a;
  lapack_int info =
      LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', m, n, work.data(), m,
                     r.singular_values.data(), r.u.data(), m, r.vh.data(), k);
  check_info(info, "zgesdd");
  return r;
}

}  // namespace qael::detail

#endif  // QAEL_DETAIL_LAPACK_HPP
