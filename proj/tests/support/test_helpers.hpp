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

#ifndef QAEL_TESTS_SUPPORT_TEST_HELPERS_HPP
#define QAEL_TESTS_SUPPORT_TEST_HELPERS_HPP

// Seeded generators and small independent oracles shared by the test suites.
// Everything is deterministic for a given seed (default 0).

#include <cmath>
#include <cstdint>
#include <random>

#include "qael/asymptotics.hpp"
#include "qael/operators.hpp"

namespace qael::testing {

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed = 0) { return Rng(seed); }

inline Operator random_matrix(Rng& rng, Index d) {
  std::normal_distribution<double> n(0.0, 1.0);
  Operator m(d, d);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i) m(i, j) = Complex(n(rng), n(rng));
  return m;
}

inline Operator random_hermitian(Rng& rng, Index d) {
  Operator m = random_matrix(rng, d);
  return 0.5 * (m + m.adjoint());
}

inline DensityMatrix random_density(Rng& rng, Index d) {
  Operator g = random_matrix(rng, d);
  Operator rho = g * g.adjoint();
  rho /= rho.trace();
  return DensityMatrix{rho};
}

inline Eigen::MatrixXcd random_unitary(Rng& rng, Index n) {
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(random_matrix(rng, n));
  Eigen::MatrixXcd q = qr.householderQ();
  // Fix the phases so Q is unique given R's positive diagonal.
  Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < n; ++i) {
    const Complex d = r(i, i);
    if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
  }
  return q;
}

// Coherent-state amplitude <n|alpha> = exp(-|alpha|^2/2) alpha^n / sqrt(n!).
inline Complex coherent_amplitude(Complex alpha, Index n) {
  Complex amp = std::exp(-0.5 * std::norm(alpha));
  for (Index k = 1; k <= n; ++k) amp *= alpha / std::sqrt(double(k));
  return amp;
}

// A random fast generator certified to qualify for reduction, with a steady
// subspace of dimension k: one jump operator annihilating a random
// k-dimensional subspace, no Hamiltonian. Retries until the certification
// pipeline accepts (semisimple zero, positive gap, decoherence-free
// structure).
struct RandomFastModel {
  LindbladGenerator fast;
  Index dim = 0;
  Index slow_dim = 0;
  asymptotics::FastAnalysis analysis;
};

inline RandomFastModel random_qualifying_fast(Rng& rng, Index d, Index k) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    Eigen::MatrixXcd basis = random_unitary(rng, d).leftCols(k);
    Operator p0 = basis * basis.adjoint();
    Operator l0 = random_matrix(rng, d) *
                  (Operator::Identity(d, d) - p0);
    l0 /= l0.norm();
    LindbladGenerator fast{Operator::Zero(d, d), {l0}};
    auto analysis = asymptotics::analyze_fast_generator(fast);
    if (!analysis.report.qualifies) continue;
    if (analysis.report.slow_dim != k) continue;
    if (analysis.spectrum.gap < 1e-6) continue;
    // Rescale the jump so the spectral gap is exactly 1 (the Liouvillian is
    // quadratic in the jump operator).
    fast.jumps[0] /= std::sqrt(analysis.spectrum.gap);
    analysis = asymptotics::analyze_fast_generator(fast);
    if (!analysis.report.qualifies || analysis.report.slow_dim != k) continue;
    return RandomFastModel{std::move(fast), d, k, std::move(analysis)};
  }
  throw std::runtime_error("random_qualifying_fast: no qualifying draw");
}

inline RandomFastModel random_qualifying_fast(Rng& rng, Index max_dim = 12) {
  std::uniform_int_distribution<Index> dim_dist(3, max_dim);
  const Index d = dim_dist(rng);
  std::uniform_int_distribution<Index> k_dist(1, std::min<Index>(3, d - 1));
  const Index k = k_dist(rng);
  return random_qualifying_fast(rng, d, k);
}

}  // namespace qael::testing

#endif  // QAEL_TESTS_SUPPORT_TEST_HELPERS_HPP
