// Copyright 2026 The uirs Authors
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

#include <catch_amalgamated.hpp>

#include "test_helpers.hpp"
#include <uirs/oracle_suite.hpp>

using namespace uirs;

namespace {

void require_pass(const oracles::Check& c) {
  INFO(c.name << ": max error " << c.error << ", tolerance " << c.tolerance);
  CHECK(c.passed());
}

}  // namespace

TEST_CASE("phi of the OTOC operator is d O(t)", "[theory]") {
  const DenseOperator u1 = evolve(oracles::z_dominant_hamiltonian(), 0.7);
  const OtocObservables o1(PauliString::parse("Y"), PauliString::parse("X"));
  CHECK(std::abs(phi_independent_clifford(otoc_A_operator(o1), unitary_channel(u1)) - 2.0 * otoc_exact(u1, o1.V, o1.W)) <
        1e-10);
  IsingParams p;
  p.n = 2;
  p.disorder_seed = 1;
  const DenseOperator u2 = evolve(build_ising(p), 1.3);
  const auto o2 = OtocObservables::standard(2);
  CHECK(std::abs(phi_independent_clifford(otoc_A_operator(o2), unitary_channel(u2)) - 4.0 * otoc_exact(u2, o2.V, o2.W)) <
        1e-10);
}

TEST_CASE("phi special cases", "[theory]") {
  CHECK(phi_independent_clifford(LiouvilleMatrix::Zero(16, 16), Channel::identity(1)) == 0.0);
  const auto pp = pair_projector(1, IrrepLabel::Adjoint, IrrepLabel::Adjoint);
  const double phi = phi_independent_clifford(pp, Channel::identity(1));
  CHECK(std::abs(phi - 1.0) < 1e-12);
  const auto tw = exhaustive_layer_twirl(pp, Channel::identity(1), TwirlMode::Independent);
  const auto eff = effective_noise(NoiseModel::ideal(1), std::nullopt, zero_state(1), computational_povm(1));
  const auto [bnd, init] = independent_boundary(eff, zero_state(1), computational_povm(1));
  const auto k = tw.k_series(bnd, init, 3);
  CHECK(std::abs(k[1] / k[0] - phi) < 1e-12);
  CHECK(std::abs(k[2] / k[1] - phi) < 1e-12);
  CHECK_THROWS_AS(phi_independent_clifford(LiouvilleMatrix::Identity(16, 16), Channel::identity(1)), PreconditionError);
}

TEST_CASE("decay_otoc examples", "[theory]") {
  CHECK(decay_otoc(DenseOperator::Identity(4, 4), PauliString::parse("ZI"), PauliString::parse("IX")) == 4.0);
  CHECK(decay_otoc(DenseOperator::Identity(2, 2), PauliString::parse("Y"), PauliString::parse("X")) == -2.0);
  auto rng = RandomStream::derive(61, "clifford-ut");
  const OtocObservables obs(PauliString::parse("IY"), PauliString::parse("XI"));
  for (int it = 0; it < 5; ++it) {
    const auto g = random_clifford(2, rng);
    const double phi = phi_independent_clifford(otoc_A_operator(obs), unitary_channel(g.dense_unitary()));
    CHECK(std::abs(decay_otoc(g.dense_unitary(), obs.V, obs.W) - phi) < 1e-10);
  }
  require_pass(oracles::decay_vs_phi(62));
}

TEST_CASE("trivial pair", "[theory]") {
  for (int n = 1; n <= 2; ++n) {
    const auto t = trivial_pair(n);
    CHECK(std::abs(hs_inner(t.B2, t.B2) - 1.0) < 1e-12);
    CHECK(std::abs(hs_inner(t.B1, t.B1) - 1.0) < 1e-12);
    CHECK(std::abs(hs_inner(t.B1, t.B2)) < 1e-12);
    CHECK((t.P_tau * t.P_tau - t.P_tau).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(t.P_tau.trace() - 2.0) < 1e-12);
    CHECK((vectorize(t.B1) - t.b1).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((vectorize(t.B2) - t.b2).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("unitarity_phi", "[theory]") {
  CHECK((unitarity_phi(Channel::identity(2)) - RealMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(std::abs(unitarity_phi(depolarizing(0.3, 2))(1, 1) - 0.49) < 1e-14);
  auto rng = RandomStream::derive(63, "uphi");
  for (int n = 1; n <= 2; ++n) {
    const RealMatrix phi = unitarity_phi(unitary_channel(random_unitary(Eigen::Index{1} << n, rng)));
    Eigen::VectorXcd ev = phi.eigenvalues();
    CHECK(std::abs(ev(0) - 1.0) < 1e-12);
    CHECK(std::abs(ev(1) - 1.0) < 1e-12);
    const Channel c = random_channel(n, 2, rng);
    CHECK(std::abs(unitarity_phi(c)(1, 1) - unitarity_exact(c)) < 1e-10);
    // Entries read against the two-copy vectors directly.
    const auto t = trivial_pair(n);
    const LiouvilleMatrix l2 = kron(c.liouville(), c.liouville());
    const std::array<LiouvilleVector, 2> b = {t.b1, t.b2};
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const double direct = b[static_cast<std::size_t>(j)].dot(l2 * b[static_cast<std::size_t>(i)]).real();
        CHECK(std::abs(unitarity_phi(c)(i, j) - direct) < 1e-12);
      }
    }
  }
}

TEST_CASE("phi_identical", "[theory]") {
  auto rng = RandomStream::derive(64, "phi-identical");
  const auto t = trivial_pair(1);
  const std::vector<LiouvilleMatrix> projs = {t.b1 * t.b1.adjoint(), t.b2 * t.b2.adjoint()};
  const LiouvilleMatrix id = LiouvilleMatrix::Identity(16, 16);
  for (int it = 0; it < 5; ++it) {
    const Channel c = random_channel(1, 2, rng);
    CHECK((phi_identical(id, c, projs) - unitarity_phi(c)).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK((phi_identical(id, Channel::identity(1), projs) - RealMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  const RealMatrix single = phi_identical(id, depolarizing(0.2, 1), {t.P_tau});
  CHECK(single.rows() == 1);
  CHECK(single.cols() == 1);
  CHECK_THROWS_AS(phi_identical(id, Channel::identity(1), {id * 0.5}), InvalidArgument);
}

TEST_CASE("exhaustive twirl reproduces the closed forms", "[theory]") {
  require_pass(oracles::exact_otoc_decay_ratio());
  require_pass(oracles::independent_decay_formula(65));
  require_pass(oracles::identical_decay_formula(66));
  require_pass(oracles::theta_cancellation());
}

TEST_CASE("identity layer is idempotent", "[theory]") {
  const LiouvilleMatrix id = LiouvilleMatrix::Identity(16, 16);
  for (auto mode : {TwirlMode::Independent, TwirlMode::Identical}) {
    const auto tw = exhaustive_layer_twirl(id, Channel::identity(1), mode);
    CHECK((tw.layer * tw.layer - tw.layer).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(exhaustive_layer_twirl(LiouvilleMatrix::Identity(256, 256), Channel::identity(2), TwirlMode::Independent),
                  InvalidArgument);
}

TEST_CASE("representation identities", "[theory]") {
  require_pass(oracles::projector_sum());
  require_pass(oracles::schur_twirl(67));
  require_pass(oracles::swap_expansion());
  require_pass(oracles::doubled_twirl_heads());
}
