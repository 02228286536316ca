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
#include <unsupported/Eigen/MatrixFunctions>

#include "test_helpers.hpp"
#include <uirs/channels.hpp>

using namespace uirs;

namespace {

double dense_otoc(const DenseOperator& u, const PauliString& v, const PauliString& w) {
  const DenseOperator vt = u.adjoint() * pauli_dense(v) * u;
  const DenseOperator wd = pauli_dense(w);
  return (wd.adjoint() * vt.adjoint() * wd * vt).trace().real() / static_cast<double>(u.rows());
}

}  // namespace

TEST_CASE("depolarizing channel examples", "[channels]") {
  CHECK(depolarizing(0.0, 2).is_identity());
  LiouvilleMatrix full = LiouvilleMatrix::Zero(4, 4);
  full(0, 0) = 1.0;
  CHECK(max_abs_diff(depolarizing(1.0, 1).liouville(), full) == 0.0);
  LiouvilleMatrix p3 = LiouvilleMatrix::Identity(4, 4) * 0.7;
  p3(0, 0) = 1.0;
  CHECK(max_abs_diff(depolarizing(0.3, 1).liouville(), p3) < 1e-15);
  CHECK_THROWS_AS(depolarizing(1.5, 1), InvalidArgument);
  auto rng = RandomStream::derive(31, "dep-apply");
  const DenseOperator rho = test::random_hermitian(4, rng);
  const auto lm = channel_to_liouville([&](const DenseOperator& o) { return depolarizing(0.4, 2).apply(o); }, 2);
  CHECK(max_abs_diff(lm, depolarizing(0.4, 2).liouville()) < 1e-14);
  CHECK(max_abs_diff(depolarizing(0.4, 2).apply(rho), devectorize(depolarizing(0.4, 2).liouville() * vectorize(rho))) <
        1e-14);
}

TEST_CASE("unitary channel examples", "[channels]") {
  CHECK(max_abs_diff(unitary_channel(DenseOperator::Identity(4, 4)).liouville(), LiouvilleMatrix::Identity(16, 16)) <
        1e-15);
  LiouvilleMatrix flips = LiouvilleMatrix::Zero(4, 4);
  flips.diagonal() << 1, 1, -1, -1;
  CHECK(max_abs_diff(unitary_channel(pauli_dense(PauliString::parse("X"))).liouville(), flips) < 1e-15);
  auto rng = RandomStream::derive(32, "unitary");
  for (int n = 1; n <= 3; ++n) {
    const auto d = Eigen::Index{1} << n;
    const auto c = unitary_channel(random_unitary(d, rng));
    const LiouvilleMatrix l = c.liouville();
    CHECK(l.imag().cwiseAbs().maxCoeff() < 1e-12);
    const auto k = l.rows() - 1;
    const RealMatrix block = l.real().bottomRightCorner(k, k);
    CHECK((block * block.transpose() - RealMatrix::Identity(k, k)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(unitary_channel(DenseOperator::Ones(d, d)), InvalidArgument);
  }
}

TEST_CASE("unitarity_exact", "[channels]") {
  CHECK(unitarity_exact(Channel::identity(2)) == 1.0);
  for (double p : {0.0, 0.1, 0.3, 0.9}) CHECK(std::abs(unitarity_exact(depolarizing(p, 2)) - (1 - p) * (1 - p)) < 1e-14);
  auto rng = RandomStream::derive(33, "unitarity");
  for (int n = 1; n <= 3; ++n) {
    const auto d = Eigen::Index{1} << n;
    for (int it = 0; it < 5; ++it) {
      const auto u = unitary_channel(random_unitary(d, rng));
      CHECK(std::abs(unitarity_exact(u) - 1.0) < 1e-12);
      const double p = rng.uniform();
      CHECK(std::abs(unitarity_exact(compose(depolarizing(p, n), u)) - (1 - p) * (1 - p)) < 1e-10);
      const double uv = unitarity_exact(random_channel(n, 1 + it, rng));
      CHECK(uv >= 0.0);
      CHECK(uv <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("unitarity equals the Haar-averaged purity of the identity-subtracted channel", "[channels]") {
  // Monte Carlo over Haar states of Tr[L(psi - 1/d)^2] as an independent check.
  auto rng = RandomStream::derive(34, "haar");
  const Channel c = random_channel(1, 2, rng);
  double acc = 0.0;
  const int draws = 40000;
  for (int i = 0; i < draws; ++i) {
    const Eigen::VectorXcd psi = random_unitary(2, rng).col(0);
    const DenseOperator proj = psi * psi.adjoint() - DenseOperator::Identity(2, 2) / 2.0;
    const DenseOperator out = c.apply(proj);
    acc += (out * out).trace().real();
  }
  CHECK(std::abs(2.0 * acc / draws - unitarity_exact(c)) < 0.01);
}

TEST_CASE("build_ising examples", "[channels]") {
  IsingParams zero;
  zero.n = 3;
  zero.J0 = 0.0;
  zero.B = 0.0;
  zero.Dmax = 0.0;
  CHECK(build_ising(zero).cwiseAbs().maxCoeff() == 0.0);
  IsingParams two;
  two.n = 2;
  two.alpha = 2.0;
  two.B = 0.0;
  two.Dmax = 0.0;
  CHECK(max_abs_diff(build_ising(two), pauli_dense(PauliString::parse("XX"))) < 1e-15);
  IsingParams def;
  def.disorder_seed = 5;
  for (int n = 1; n <= 4; ++n) {
    def.n = n;
    CHECK(is_hermitian(build_ising(def), 0.0));
  }
  CHECK(ising_disorder(def) == ising_disorder(def));
}

TEST_CASE("evolve", "[channels]") {
  IsingParams p;
  p.disorder_seed = 9;
  const DenseOperator h = build_ising(p);
  CHECK(max_abs_diff(evolve(h, 0.0), DenseOperator::Identity(8, 8)) < 1e-14);
  const DenseOperator z = pauli_dense(PauliString::parse("Z"));
  DenseOperator expect = DenseOperator::Zero(2, 2);
  expect(0, 0) = std::exp(cplx(0, -0.8));
  expect(1, 1) = std::exp(cplx(0, 0.8));
  CHECK(max_abs_diff(evolve(z, 0.8), expect) < 1e-14);
  for (double t : {0.3, 1.0, 2.5}) {
    CHECK(max_abs_diff(evolve(h, t) * evolve(h, -t), DenseOperator::Identity(8, 8)) < 1e-12);
    const DenseOperator ref = (DenseOperator(cplx(0, -t) * h)).exp();
    CHECK(max_abs_diff(evolve(h, t), ref) < 1e-10);
  }
}

TEST_CASE("otoc_exact", "[channels]") {
  CHECK(otoc_exact(DenseOperator::Identity(4, 4), PauliString::parse("XI"), PauliString::parse("IY")) == 1.0);
  CHECK(otoc_exact(DenseOperator::Identity(2, 2), PauliString::parse("Y"), PauliString::parse("X")) == -1.0);
  IsingParams p;
  p.Dmax = 0.0;
  const DenseOperator u = evolve(build_ising(p), 1.0);
  const auto v = PauliString::single(3, 2, 'Y');
  const auto w = PauliString::single(3, 1, 'X');
  CHECK(std::abs(otoc_exact(u, v, w) - dense_otoc(u, v, w)) < 1e-12);
  auto rng = RandomStream::derive(35, "otoc");
  p.Dmax = 1.0;
  const DenseOperator h = build_ising(p);
  for (int i = 0; i < 20; ++i) {
    const double t = rng.uniform(0.0, 5.0);
    CHECK(std::abs(otoc_exact(evolve(h, t), v, w)) <= 1.0 + 1e-12);
  }
  CHECK_THROWS_AS(otoc_exact(u, PauliString::identity(3), w), InvalidArgument);
}

TEST_CASE("channel composition multiplies transfer matrices", "[channels]") {
  auto rng = RandomStream::derive(36, "compose");
  for (int n = 1; n <= 2; ++n) {
    const Channel a = random_channel(n, 2, rng);
    const Channel b = random_channel(n, 3, rng);
    const auto direct = channel_to_liouville([&](const DenseOperator& o) { return a.apply(b.apply(o)); }, n);
    CHECK(max_abs_diff(compose(a, b).liouville(), direct) < 1e-10);
    CHECK(compose(a, b).trace_preserving());
  }
}
