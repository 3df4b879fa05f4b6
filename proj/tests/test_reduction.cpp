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

#include <catch2/catch_amalgamated.hpp>

#include "qael/models.hpp"
#include "qael/reduction.hpp"
#include "support/test_helpers.hpp"

using namespace qael;
using namespace qael::reduction;

namespace {

// Two qubits, fast decay on A at rate kappa, exchange coupling as the slow
// perturbation. Everything about its reduction is known in closed form.
struct PurcellFixture {
  double kappa, g;
  LindbladGenerator fast, slow;
  asymptotics::FastAnalysis analysis;

  explicit PurcellFixture(double kappa_ = 1.0, double g_ = 0.05)
      : kappa(kappa_), g(g_) {
    const Operator id2 = Operator::Identity(2, 2);
    fast = LindbladGenerator{Operator::Zero(4, 4),
                             {std::sqrt(kappa) * kron(sigma_minus(), id2)}};
    slow = LindbladGenerator{kron(sigma_plus(), sigma_minus()) +
                                 kron(sigma_minus(), sigma_plus()),
                             {}};
    analysis = asymptotics::analyze_fast_generator(fast);
    analysis.require();
  }
};

Superoperator dissipator_matrix(const std::vector<Operator>& ops, Index dim) {
  return liouvillian_matrix(LindbladGenerator{Operator::Zero(dim, dim), ops});
}

}  // namespace

TEST_CASE("zeno_hamiltonian") {
  SECTION("identity compresses to the slow identity") {
    auto rng = testing::make_rng(30);
    const auto rm = testing::random_qualifying_fast(rng, 6, 2);
    const Operator hs =
        zeno_hamiltonian(Operator::Identity(6, 6), *rm.analysis.dfs);
    REQUIRE((hs - Operator::Identity(2, 2)).norm() < 1e-12);
  }
  SECTION("exchange coupling averages to zero under fast decay") {
    PurcellFixture fix;
    const Operator hs =
        zeno_hamiltonian(fix.slow.hamiltonian, *fix.analysis.dfs);
    REQUIRE(hs.norm() < 1e-12);
  }
}

TEST_CASE("first_order_jumps") {
  PurcellFixture fix;
  const auto& dfs = *fix.analysis.dfs;
  const auto& kraus = *fix.analysis.kraus;
  SECTION("L1 = identity gives scalar jumps and a vanishing dissipator") {
    const auto a_ops =
        first_order_jumps(Operator::Identity(4, 4), kraus, dfs);
    for (const auto& a : a_ops) {
      const Complex lam = a.trace() / double(dfs.slow_dim);
      REQUIRE((a - lam * Operator::Identity(2, 2)).norm() < 1e-10);
    }
    REQUIRE(dissipator_matrix(a_ops, 2).matrix.norm() < 1e-10);
  }
  SECTION("L1 = 0 gives an empty list") {
    REQUIRE(first_order_jumps(Operator::Zero(4, 4), kraus, dfs).empty());
  }
  SECTION("sum A^dag A = S0^dag L1^dag L1 S0") {
    auto rng = testing::make_rng(31);
    const Operator l1 = testing::random_matrix(rng, 4);
    const auto a_ops = first_order_jumps(l1, kraus, dfs);
    Operator sum = Operator::Zero(2, 2);
    for (const auto& a : a_ops) sum += a.adjoint() * a;
    const Operator expected = dfs.s0.adjoint() * l1.adjoint() * l1 * dfs.s0;
    REQUIRE((sum - expected).norm() < 1e-9);
  }
  SECTION("one-dimensional slow space yields no dynamics") {
    LindbladGenerator decay{Operator::Zero(2, 2), {sigma_minus()}};
    const auto analysis = asymptotics::analyze_fast_generator(decay);
    auto rng = testing::make_rng(32);
    const Operator l1 = testing::random_matrix(rng, 2);
    const auto a_ops =
        first_order_jumps(l1, *analysis.kraus, *analysis.dfs);
    REQUIRE(dissipator_matrix(a_ops, 1).matrix.norm() < 1e-12);
  }
}

TEST_CASE("first_order_generator by linearity") {
  PurcellFixture fix;
  SECTION("zero slow generator reduces to zero") {
    const auto gen = first_order_generator(LindbladGenerator::zero(4),
                                           *fix.analysis.kraus,
                                           *fix.analysis.dfs);
    REQUIRE(gen.hamiltonian.norm() == 0.0);
    REQUIRE(gen.jumps.empty());
  }
  SECTION("Hamiltonian-only perturbation keeps the jump list empty") {
    const auto gen = first_order_generator(fix.slow, *fix.analysis.kraus,
                                           *fix.analysis.dfs);
    REQUIRE(gen.jumps.empty());
    REQUIRE((gen.hamiltonian -
             zeno_hamiltonian(fix.slow.hamiltonian, *fix.analysis.dfs))
                .norm() < 1e-13);
  }
}

TEST_CASE("c1_operator") {
  PurcellFixture fix(2.5, 0.05);
  const auto& dfs = *fix.analysis.dfs;
  SECTION("matches the hand computation on the Purcell model") {
    const Operator c1 =
        c1_operator(fix.fast.jumps[0], fix.slow.hamiltonian, dfs);
    const Operator expected = (2.0 / fix.kappa) * fix.slow.hamiltonian;
    REQUIRE((c1 - expected).norm() < 1e-11);
    REQUIRE(hermiticity_defect(c1) < 1e-12);
    REQUIRE((dfs.p0 * c1 * dfs.p0).norm() < 1e-11);
  }
  SECTION("block-diagonal perturbations need no correction") {
    auto rng = testing::make_rng(33);
    const Operator x = testing::random_hermitian(rng, 4);
    const Operator h1 = dfs.p0 * x * dfs.p0;
    REQUIRE(c1_operator(fix.fast.jumps[0], h1, dfs).norm() < 1e-11);
  }
}

TEST_CASE("second_order_jumps") {
  SECTION("Purcell model: single consolidated jump (2/sqrt(kappa)) sigma_minus") {
    PurcellFixture fix(1.7, 0.05);
    const auto b_ops =
        second_order_jumps(fix.fast.jumps[0], fix.slow.hamiltonian,
                           *fix.analysis.kraus, *fix.analysis.dfs);
    REQUIRE_FALSE(b_ops.empty());
    const auto combined = consolidate_jumps(b_ops);
    REQUIRE(combined.size() == 1);
    // Proportional to sigma_minus with weight 2/sqrt(kappa), up to phase.
    const Operator& b = combined[0];
    REQUIRE(std::abs(b(1, 0)) < 1e-12);
    REQUIRE(std::abs(std::abs(b(0, 1)) - 2.0 / std::sqrt(fix.kappa)) < 1e-10);
    // sum B^dag B = 4 S0^dag H1 (L0^dag L0)^+ H1 S0
    Operator sum = Operator::Zero(2, 2);
    for (const auto& op : b_ops) sum += op.adjoint() * op;
    const Operator pinv = pseudo_inverse_psd(
        fix.fast.jumps[0].adjoint() * fix.fast.jumps[0]);
    const Operator expected = 4.0 * fix.analysis.dfs->s0.adjoint() *
                              fix.slow.hamiltonian * pinv *
                              fix.slow.hamiltonian * fix.analysis.dfs->s0;
    REQUIRE((sum - expected).norm() < 1e-9);
  }
  SECTION("perturbations mapping into the steady space give no jumps") {
    PurcellFixture fix;
    auto rng = testing::make_rng(34);
    const Operator x = testing::random_hermitian(rng, 4);
    const Operator h1 =
        fix.analysis.dfs->p0 * x * fix.analysis.dfs->p0;
    const auto b_ops =
        second_order_jumps(fix.fast.jumps[0], h1, *fix.analysis.kraus,
                           *fix.analysis.dfs);
    REQUIRE(b_ops.empty());
  }
}

TEST_CASE("consolidate_jumps") {
  SECTION("proportional jumps collapse to one") {
    std::vector<Operator> ops;
    const std::vector<Complex> coeff = {Complex(0.3, 0.1), Complex(-0.2, 0.4),
                                        Complex(0.05, 0.0)};
    for (Complex c : coeff) ops.push_back(c * sigma_minus());
    const auto combined = consolidate_jumps(ops);
    REQUIRE(combined.size() == 1);
    double norm2 = 0.0;
    for (Complex c : coeff) norm2 += std::norm(c);
    REQUIRE(combined[0].norm() == Catch::Approx(std::sqrt(norm2)));
    REQUIRE((dissipator_matrix(combined, 2).matrix -
             dissipator_matrix(ops, 2).matrix)
                .norm() < 1e-10);
  }
  SECTION("empty input") { REQUIRE(consolidate_jumps({}).empty()); }
  SECTION("orthogonal jumps keep an equivalent dissipator") {
    auto rng = testing::make_rng(35);
    std::vector<Operator> ops = {testing::random_matrix(rng, 3),
                                 testing::random_matrix(rng, 3)};
    const auto combined = consolidate_jumps(ops);
    REQUIRE(combined.size() == 2);
    REQUIRE((dissipator_matrix(combined, 3).matrix -
             dissipator_matrix(ops, 3).matrix)
                .norm() < 1e-10);
  }
}

TEST_CASE("build_reduced_model on the Purcell system") {
  PurcellFixture fix(1.0, 0.05);
  const auto m = build_reduced_model(fix.fast, fix.slow, fix.g, 2,
                                     fix.analysis);
  SECTION("structure") {
    REQUIRE(m.slow_dim == 2);
    REQUIRE(m.order == 2);
    REQUIRE(m.has_c1);
    REQUIRE(m.h_s1.norm() < 1e-11);
    REQUIRE_FALSE(m.b_ops.empty());
  }
  SECTION("residuals are at numerical precision") {
    REQUIRE(m.residual_order1 <= 1e-9);
    REQUIRE(m.residual_order2 <= 1e-8);
  }
  SECTION("epsilon folding: damping rate 4 g^2 / kappa") {
    const LindbladGenerator gen = reduced_generator(m);
    Operator sum = Operator::Zero(2, 2);
    for (const auto& l : gen.jumps) sum += l.adjoint() * l;
    const double rate = 4.0 * fix.g * fix.g / fix.kappa;
    REQUIRE(std::abs(sum(1, 1).real() - rate) < 1e-10 * rate);
  }
  SECTION("R(K1(Ls1)) vanishes") {
    double rk = -1.0;
    residual_order2(fix.fast, fix.slow, *fix.analysis.projector, m, &rk);
    REQUIRE(rk >= 0.0);
    REQUIRE(rk <= 1e-9);
  }
}

TEST_CASE("build_reduced_model degenerate and error cases") {
  SECTION("order 1 carries no second-order data") {
    PurcellFixture fix;
    const auto m = build_reduced_model(fix.fast, fix.slow, fix.g, 1,
                                       fix.analysis);
    REQUIRE_FALSE(m.has_c1);
    REQUIRE(m.b_ops.empty());
    REQUIRE(m.residual_order1 <= 1e-9);
  }
  SECTION("zero slow generator reduces to zero at both orders") {
    PurcellFixture fix;
    const auto m = build_reduced_model(fix.fast, LindbladGenerator::zero(4),
                                       fix.g, 2, fix.analysis);
    REQUIRE(m.h_s1.norm() == 0.0);
    REQUIRE(m.a_ops.empty());
    REQUIRE(m.b_ops.empty());
    REQUIRE(m.c1.norm() < 1e-14);
    REQUIRE(m.residual_order1 <= 1e-12);
    REQUIRE(m.residual_order2 <= 1e-12);
  }
  SECTION("one-dimensional slow space is reported") {
    LindbladGenerator decay{Operator::Zero(2, 2), {sigma_minus()}};
    const auto m = build_reduced_model(decay, LindbladGenerator{sigma_x(), {}},
                                       0.1, 1);
    REQUIRE(m.slow_dim == 1);
    REQUIRE_FALSE(m.notes.empty());
    REQUIRE(m.notes[0].find("one-dimensional") != std::string::npos);
    const LindbladGenerator gen = reduced_generator(m);
    REQUIRE(liouvillian_matrix(gen).matrix.norm() < 1e-12);
  }
  SECTION("two fast jumps refuse order 2") {
    const Operator id2 = Operator::Identity(2, 2);
    LindbladGenerator fast{Operator::Zero(4, 4),
                           {kron(sigma_minus(), id2),
                            0.5 * kron(sigma_minus(), id2)}};
    LindbladGenerator slow{kron(sigma_plus(), sigma_minus()) +
                               kron(sigma_minus(), sigma_plus()),
                           {}};
    REQUIRE_THROWS_AS(build_reduced_model(fast, slow, 0.05, 2),
                      PreconditionError);
    REQUIRE_NOTHROW(build_reduced_model(fast, slow, 0.05, 1));
  }
  SECTION("slow jump operators refuse order 2") {
    PurcellFixture fix;
    LindbladGenerator slow = fix.slow;
    slow.jumps.push_back(kron(Operator::Identity(2, 2), sigma_minus()));
    REQUIRE_THROWS_AS(
        build_reduced_model(fix.fast, slow, fix.g, 2, fix.analysis),
        PreconditionError);
  }
  SECTION("non-qualifying fast generator is rejected with its check name") {
    LindbladGenerator unitary{sigma_z(), {}};
    try {
      build_reduced_model(unitary, LindbladGenerator{sigma_x(), {}}, 0.1, 1);
      FAIL("expected an assumption error");
    } catch (const AssumptionError& e) {
      REQUIRE(e.check == "not_dissipative");
    }
  }
}

TEST_CASE("kraus_parametrization") {
  PurcellFixture fix(1.0, 0.08);
  const auto m = build_reduced_model(fix.fast, fix.slow, fix.g, 2,
                                     fix.analysis);
  auto rng = testing::make_rng(36);
  SECTION("epsilon = 0 embeds exactly") {
    auto m0 = m;
    m0.epsilon = 0.0;
    const Operator rho_s = testing::random_density(rng, 2).rho;
    const Operator lifted = kraus_parametrization(m0, rho_s);
    REQUIRE((lifted - m.s0 * rho_s * m.s0.adjoint()).norm() < 1e-15);
  }
  SECTION("exact unit trace, Hermitian, near-positive") {
    for (int trial = 0; trial < 50; ++trial) {
      const Operator rho_s = testing::random_density(rng, 2).rho;
      const Operator lifted = kraus_parametrization(m, rho_s);
      REQUIRE(std::abs(lifted.trace() - Complex(1.0)) < 1e-14);
      REQUIRE(hermiticity_defect(lifted) < 1e-13);
      Eigen::SelfAdjointEigenSolver<Operator> es(lifted,
                                                 Eigen::EigenvaluesOnly);
      REQUIRE(es.eigenvalues().minCoeff() >= -10.0 * m.epsilon * m.epsilon);
    }
  }
}

TEST_CASE("Kraus-mixing invariance of the reduced dissipators") {
  auto rng = testing::make_rng(37);
  const auto rm = testing::random_qualifying_fast(rng, 7, 2);
  const Operator h1 = testing::random_hermitian(rng, 7);
  const Operator l1 = testing::random_matrix(rng, 7);
  const auto& dfs = *rm.analysis.dfs;
  const auto& kraus = *rm.analysis.kraus;

  asymptotics::KrausMap mixed;
  const Eigen::MatrixXcd u =
      testing::random_unitary(rng, Index(kraus.operators.size()));
  for (Index i = 0; i < u.rows(); ++i) {
    Operator sum = Operator::Zero(7, 7);
    for (Index j = 0; j < u.cols(); ++j) sum += u(i, j) * kraus.operators[j];
    mixed.operators.push_back(std::move(sum));
  }

  SECTION("first-order dissipator") {
    const auto a1 = first_order_jumps(l1, kraus, dfs);
    const auto a2 = first_order_jumps(l1, mixed, dfs);
    REQUIRE((dissipator_matrix(a1, 2).matrix -
             dissipator_matrix(a2, 2).matrix)
                .norm() <= 1e-9);
  }
  SECTION("second-order dissipator") {
    const auto b1 =
        second_order_jumps(rm.fast.jumps[0], h1, kraus, dfs);
    const auto b2 =
        second_order_jumps(rm.fast.jumps[0], h1, mixed, dfs);
    REQUIRE((dissipator_matrix(b1, 2).matrix -
             dissipator_matrix(b2, 2).matrix)
                .norm() <= 1e-9);
  }
}

TEST_CASE("invariance residuals on random qualifying models") {
  auto rng = testing::make_rng(38);
  for (int trial = 0; trial < 5; ++trial) {
    const auto rm = testing::random_qualifying_fast(rng);
    const Operator h1 = testing::random_hermitian(rng, rm.dim);
    LindbladGenerator slow{h1, {}};
    const auto m =
        build_reduced_model(rm.fast, slow, 0.01, 2, rm.analysis);
    INFO("dim=" << rm.dim << " slow_dim=" << rm.slow_dim);
    REQUIRE(m.residual_order1 <= 1e-9);
    REQUIRE(m.residual_order2 <= 1e-8);
  }
}

TEST_CASE("general slow generators use the projected first-order identity") {
  auto rng = testing::make_rng(39);
  const auto rm = testing::random_qualifying_fast(rng, 6, 2);
  LindbladGenerator slow{testing::random_hermitian(rng, 6),
                         {testing::random_matrix(rng, 6),
                          testing::random_matrix(rng, 6)}};
  const auto m = build_reduced_model(rm.fast, slow, 0.02, 1, rm.analysis);
  REQUIRE(m.residual_order1 <= 1e-9);
  REQUIRE_FALSE(m.a_ops.empty());
  // The reduced generator must itself be a faithful Lindbladian.
  const LindbladGenerator gen = reduced_generator(m);
  const Operator rho = testing::random_hermitian(rng, 2);
  const Operator out = apply_generator(gen, rho);
  REQUIRE(std::abs(out.trace()) < 1e-11 * std::max(1.0, rho.norm()));
  REQUIRE(hermiticity_defect(out) < 1e-11);
}
