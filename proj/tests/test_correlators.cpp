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
#include <uirs/fitting.hpp>
#include <uirs/oracle_suite.hpp>

using namespace uirs;

namespace {

/// All length-m sequences over the single-qubit group.
std::vector<std::vector<CliffordElement>> all_sequences(int m) {
  const auto& group = single_qubit_group();
  std::vector<std::vector<CliffordElement>> out = {{}};
  for (int i = 0; i < m; ++i) {
    std::vector<std::vector<CliffordElement>> next;
    for (const auto& prefix : out) {
      for (const auto& g : group) {
        next.push_back(prefix);
        next.back().push_back(g);
      }
    }
    out = std::move(next);
  }
  return out;
}

std::vector<ShadowRecord> exhaustive_records(const SequenceSpec& spec) {
  std::vector<ShadowRecord> recs;
  for (auto& g : all_sequences(spec.m)) {
    ShadowRecord r;
    r.exact_probs = outcome_distribution(spec, g);
    r.gates = std::move(g);
    r.outcomes = {0};
    recs.push_back(std::move(r));
  }
  return recs;
}

SequenceSpec n1_spec(int m, const Channel& inter, const NoiseModel& noise) {
  auto spec = SequenceSpec::nominal(1, m);
  spec.interleave = inter;
  spec.noise = noise;
  return spec;
}

double integrated_kernel(const PairKernel& f, const ShadowRecord& a, const ShadowRecord& b) {
  double v = 0.0;
  for (std::size_t x = 0; x < a.exact_probs->size(); ++x) {
    for (std::size_t y = 0; y < b.exact_probs->size(); ++y) {
      v += (*a.exact_probs)[x] * (*b.exact_probs)[y] * f(static_cast<int>(x), static_cast<int>(y), a, b);
    }
  }
  return v;
}

const OtocObservables kYX(PauliString::parse("Y"), PauliString::parse("X"));

}  // namespace

TEST_CASE("f_otoc_fast examples", "[correlators]") {
  const auto rho = zero_state(1);
  const auto povm = computational_povm(1);
  const auto id = CliffordElement::identity(1);
  CHECK(std::abs(f_otoc_fast(0, 0, {id}, {id}, 1, kYX, rho, povm) - 0.25) < 1e-15);
  CHECK(f_otoc_fast(0, 0, {id, id}, {id, id}, 2, kYX, rho, povm) == 0.0);
}

TEST_CASE("f_otoc_fast equals the literal trace", "[correlators]") {
  const auto c = oracles::fast_vs_general(77);
  INFO("max error " << c.error);
  CHECK(c.passed());
}

TEST_CASE("f_general_trace structural cases", "[correlators]") {
  auto rng = RandomStream::derive(51, "general");
  const auto pp = pair_projector(1, IrrepLabel::Adjoint, IrrepLabel::Adjoint);
  const auto g1 = random_clifford(1, rng);
  const auto g2 = random_clifford(1, rng);
  LiouvilleVector u(16);
  LiouvilleVector v(16);
  for (Eigen::Index i = 0; i < 16; ++i) {
    u(i) = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
    v(i) = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
  }
  const LiouvilleMatrix b = u * v.adjoint();
  const cplx expect = v.dot(kron(tau_embedded(g1, IrrepLabel::Adjoint), tau_embedded(g2, IrrepLabel::Adjoint)) * u);
  CHECK(std::abs(f_general_trace({g1}, {g2}, 1, pp, b) - expect) < 1e-13);
  // Identity sequences with A = P_ad (x) P_ad reduce to Tr(B (P_ad (x) P_ad)).
  const auto id = CliffordElement::identity(1);
  LiouvilleMatrix rb(16, 16);
  for (Eigen::Index i = 0; i < 256; ++i) rb(i / 16, i % 16) = cplx(rng.uniform(-1, 1), 0.0);
  for (int m = 1; m <= 3; ++m) {
    std::vector<CliffordElement> seq(static_cast<std::size_t>(m), id);
    CHECK(std::abs(f_general_trace(seq, seq, m, pp, rb) - (rb * pp).trace()) < 1e-12);
  }
  LiouvilleMatrix bad = LiouvilleMatrix::Identity(16, 16);
  CHECK_THROWS_AS(f_general_trace({g1, g2}, {g2, g1}, 2, bad, rb), PreconditionError);
}

TEST_CASE("khat_independent with two records", "[correlators]") {
  auto spec = SequenceSpec::nominal(1, 1);
  const auto recs = sample_shadows(spec, 2, 3);
  PairKernel f = [](int x, int y, const ShadowRecord& a, const ShadowRecord& b) {
    return 1.0 + x + 2.0 * y + (a.gates[0].key() < b.gates[0].key() ? 0.5 : -0.25);
  };
  const auto e = khat_independent(recs, 1, f, 2, DataMode::Exact);
  const double expect = (integrated_kernel(f, recs[0], recs[1]) + integrated_kernel(f, recs[1], recs[0])) / 2.0;
  CHECK(std::abs(e.value - expect) < 1e-15);
  CHECK(std::isnan(e.stderr));
}

TEST_CASE("factorized OTOC U-statistic equals the brute-force pair sum", "[correlators]") {
  auto rng = RandomStream::derive(52, "factorized");
  for (int n = 1; n <= 2; ++n) {
    const OtocObservables obs = n == 1 ? kYX : OtocObservables::standard(2);
    for (int m = 1; m <= 3; ++m) {
      auto spec = SequenceSpec::nominal(n, m);
      spec.interleave = unitary_channel(random_unitary(Eigen::Index{1} << n, rng));
      spec.noise.spam_meas = depolarizing(0.1, n);
      spec.shots = 3;
      for (auto mode : {DataMode::Exact, DataMode::Shots}) {
        spec.mode = mode;
        // Small Clifford sets force repeated middle words.
        const auto recs = sample_shadows(spec, 40, 100 + static_cast<std::uint64_t>(m), 0, [](int nq, RandomStream& r) {
          static const auto group = enumerate_single_qubit_clifford();
          if (nq == 1) return group[r.below(6)];
          return random_clifford(nq, r);
        });
        const auto brute = khat_independent(recs, m, otoc_kernel(obs, m, spec.rho, spec.povm), spec.povm.size(), mode);
        const auto fast = khat_otoc(recs, m, obs, spec.rho, spec.povm, mode);
        const double scale = std::max(1.0, std::abs(brute.value));
        CHECK(std::abs(brute.value - fast.value) < 1e-10 * scale);
        CHECK(std::abs(brute.stderr - fast.stderr) < 1e-9 * std::max(1.0, brute.stderr));
      }
    }
  }
}

TEST_CASE("khat_independent is invariant under record permutation", "[correlators]") {
  auto spec = SequenceSpec::nominal(2, 2);
  spec.interleave = unitary_channel(evolve(build_ising({2, 1.0, 1.5, 1.0, 1.0, 3}), 0.6));
  auto recs = sample_shadows(spec, 25, 8);
  const auto obs = OtocObservables::standard(2);
  const auto f = otoc_kernel(obs, 2, spec.rho, spec.povm);
  const double before = khat_independent(recs, 2, f, 4, DataMode::Exact).value;
  auto rng = RandomStream::derive(53, "shuffle");
  std::shuffle(recs.begin(), recs.end(), rng);
  CHECK(khat_independent(recs, 2, f, 4, DataMode::Exact).value == before);
}

TEST_CASE("exhaustive n=1 pair average equals the closed form", "[correlators]") {
  const DenseOperator u = evolve(oracles::z_dominant_hamiltonian(), 0.7);
  const Channel inter = unitary_channel(u);
  auto rng = RandomStream::derive(54, "spam");
  NoiseModel noise = NoiseModel::ideal(1);
  noise.spam_prep = random_channel(1, 2, rng);
  noise.spam_meas = depolarizing(0.15, 1);
  const auto rho = zero_state(1);
  const auto povm = computational_povm(1);
  const auto eff = effective_noise(noise, inter, rho, povm);
  const auto model = independent_decay_model(otoc_A_operator(kYX), eff, rho, povm);
  for (int m = 1; m <= 3; ++m) {
    const auto recs = exhaustive_records(n1_spec(m, inter, noise));
    const double S = static_cast<double>(recs.size());
    const double ustat = khat_otoc(recs, m, kYX, rho, povm, DataMode::Exact).value;
    // Add back the a = b terms to get the average over all ordered pairs.
    const auto f = otoc_kernel(kYX, m, rho, povm);
    double diag = 0.0;
    for (const auto& r : recs) diag += integrated_kernel(f, r, r);
    const double population = (S * (S - 1.0) * ustat + diag) / (S * S);
    CHECK(std::abs(population - model.k(m)) < 1e-10);
  }
}

TEST_CASE("ratio estimator from batches", "[correlators]") {
  const std::vector<std::pair<double, double>> same(5, {0.25, 0.4});
  const auto r = otoc_ratio_from_batches(same, 2);
  CHECK(r.xbar == 0.4 / (4.0 * 0.25));
  CHECK(r.stderr == 0.0);
  CHECK(r.batches.size() == 5);
  CHECK_THROWS_AS(otoc_ratio_from_batches({{0.0, 1.0}}, 1), DegenerateDenominator);
}

TEST_CASE("otoc_ratio_estimate batches contiguously", "[correlators]") {
  auto s1 = SequenceSpec::nominal(2, 1);
  auto s2 = SequenceSpec::nominal(2, 2);
  const auto u = evolve(build_ising({2, 1.0, 1.5, 1.0, 1.0, 4}), 0.5);
  s1.interleave = s2.interleave = unitary_channel(u);
  const auto r1 = sample_shadows(s1, 600, 1);
  const auto r2 = sample_shadows(s2, 600, 2);
  const auto obs = OtocObservables::standard(2);
  const auto est = otoc_ratio_estimate(r1, r2, 3, obs, s1.rho, s1.povm, DataMode::Exact);
  REQUIRE(est.batches.size() == 3);
  const std::vector<ShadowRecord> a(r1.begin() + 200, r1.begin() + 400);
  const std::vector<ShadowRecord> b(r2.begin() + 200, r2.begin() + 400);
  const double x1 = khat_otoc(b, 2, obs, s1.rho, s1.povm, DataMode::Exact).value /
                    (4.0 * khat_otoc(a, 1, obs, s1.rho, s1.povm, DataMode::Exact).value);
  CHECK(std::abs(est.batches[1] - x1) < 1e-14);
}

TEST_CASE("unitarity correlator without noise is flat", "[correlators]") {
  const auto w = OutcomeWeights::z_on_qubit(1, 0);
  const auto eff = effective_noise(NoiseModel::ideal(1), std::nullopt, zero_state(1), computational_povm(1));
  const auto model = identical_decay_model(eff, w);
  for (int m = 1; m <= 3; ++m) {
    const auto recs = exhaustive_records(n1_spec(m, Channel::identity(1), NoiseModel::ideal(1)));
    const auto e = khat_identical_unitarity(recs, m, w, DataMode::Exact);
    CHECK(std::abs(e.value - 1.0 / 3.0) < 1e-12);
    CHECK(std::abs(model.k(m) - 1.0 / 3.0) < 1e-12);
  }
}

TEST_CASE("unitarity correlator decays as (1-p)^2 under interleaved depolarizing noise", "[correlators]") {
  const double p = 0.2;
  std::vector<FitPoint> pts;
  for (int m = 1; m <= 4; ++m) {
    const auto recs = exhaustive_records(n1_spec(m, depolarizing(p, 1), NoiseModel::ideal(1)));
    const auto e = khat_identical_unitarity(recs, m, OutcomeWeights::z_on_qubit(1, 0), DataMode::Exact);
    pts.push_back({m, e.value, 0.0});
  }
  const auto fit = fit_offset_decay(pts);
  CHECK(std::abs(fit.get("u") - (1 - p) * (1 - p)) < 1e-8);
  CHECK(std::abs(fit.get("u") - unitarity_exact(depolarizing(p, 1))) < 1e-8);
}

TEST_CASE("degenerate weights give a constant flagged estimate", "[correlators]") {
  auto spec = SequenceSpec::nominal(2, 3);
  spec.noise.left = depolarizing(0.3, 2);
  const auto recs = sample_shadows(spec, 20, 4);
  const auto e = khat_identical_unitarity(recs, 3, OutcomeWeights{{0.5, 0.5, 0.5, 0.5}}, DataMode::Exact);
  CHECK(std::abs(e.value - 0.25) < 1e-14);
  CHECK(e.stderr < 1e-14);
  CHECK(e.degenerate);
}

TEST_CASE("SHOTS-mode unitarity correlator is unbiased for the EXACT value", "[correlators]") {
  auto spec = SequenceSpec::nominal(2, 3);
  spec.noise.left = depolarizing(0.1, 2);
  spec.shots = 4;
  const auto w = OutcomeWeights::z_on_qubit(2, 0);
  const auto recs = sample_shadows(spec, 4000, 12);
  const auto exact = khat_identical_unitarity(recs, 3, w, DataMode::Exact);
  const auto shots = khat_identical_unitarity(recs, 3, w, DataMode::Shots);
  CHECK(std::abs(exact.value - shots.value) <= 3.0 * shots.stderr);
}

TEST_CASE("khat_linear", "[correlators]") {
  auto spec = SequenceSpec::nominal(1, 2);
  const auto recs = sample_shadows(spec, 10, 6);
  const auto e = khat_linear(recs, 2, [](int, const ShadowRecord&) { return 2.5; }, 2, DataMode::Exact);
  CHECK(std::abs(e.value - 2.5) < 1e-15);
  CHECK(e.stderr < 1e-15);

  // Exhaustive n=1 against the scalar form: Phi = sum Lambda_st A_st / 3 on the
  // traceless block, Theta from the boundary overlaps.
  auto rng = RandomStream::derive(55, "linear");
  const Channel lam = random_channel(1, 2, rng);
  RealMatrix a = RealMatrix::Zero(4, 4);
  for (Eigen::Index i = 1; i < 4; ++i) {
    for (Eigen::Index j = 1; j < 4; ++j) a(i, j) = rng.uniform(-1, 1);
  }
  NoiseModel noise = NoiseModel::ideal(1);
  noise.spam_meas = depolarizing(0.1, 1);
  const auto rho = zero_state(1);
  const auto povm = computational_povm(1);
  const auto eff = effective_noise(noise, lam, rho, povm);
  const RealMatrix l = eff.lambda.real();
  double phi = 0.0;
  for (Eigen::Index i = 1; i < 4; ++i) {
    for (Eigen::Index j = 1; j < 4; ++j) phi += l(i, j) * a(i, j);
  }
  phi /= 3.0;
  double tb = 0.0;
  for (std::size_t x = 0; x < 2; ++x) tb += vectorize(povm[x]).tail(3).dot(eff.effects[x].tail(3)).real();
  const double ti = vectorize(rho).tail(3).dot(eff.rho.tail(3)).real();
  const auto f = linear_trace_kernel(a.cast<cplx>(), rho, povm);
  for (int m = 1; m <= 3; ++m) {
    const auto recs_m = exhaustive_records(n1_spec(m, lam, noise));
    const double k = khat_linear(recs_m, m, f, 2, DataMode::Exact).value;
    CHECK(std::abs(k - tb * ti / 3.0 * std::pow(phi, m - 1)) < 1e-12);
  }

  // Standard RB choice: A = P_ad, depolarizing interleave, decay 1 - p.
  const auto [ptr, pad] = irrep_projectors(1);
  const auto frb = linear_trace_kernel(pad.matrix.cast<cplx>(), rho, povm);
  std::vector<double> ks;
  for (int m = 1; m <= 3; ++m) {
    ks.push_back(khat_linear(exhaustive_records(n1_spec(m, depolarizing(0.25, 1), NoiseModel::ideal(1))), m, frb, 2,
                             DataMode::Exact)
                     .value);
  }
  CHECK(std::abs(ks[1] / ks[0] - 0.75) < 1e-12);
  CHECK(std::abs(ks[2] / ks[1] - 0.75) < 1e-12);
}

TEST_CASE("statistical baseline", "[correlators]") {
  IsingParams ip;
  ip.n = 2;
  ip.disorder_seed = 2;
  const DenseOperator u = evolve(build_ising(ip), 0.8);
  const auto obs = OtocObservables::standard(2);
  const double exact = otoc_exact(u, obs.V, obs.W);
  const auto clean = baseline_statistical_otoc(u, obs, NoiseModel::ideal(2), 20000, 5);
  CHECK(std::abs(clean.value - exact) < 0.03);
  double last = -1.0;
  for (double p : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5}) {
    const auto b = baseline_statistical_otoc(u, obs, NoiseModel::depolarizing(2, 0, 0, p, p), 20000, 5);
    const double bias = std::abs(b.value - exact);
    CHECK(bias > last);
    last = bias;
  }
  // UIRS at p = 0.3 on the same budget.
  auto s1 = SequenceSpec::nominal(2, 1);
  s1.interleave = unitary_channel(u);
  s1.noise = NoiseModel::depolarizing(2, 0, 0, 0.3, 0.3);
  auto s2 = s1;
  s2.m = 2;
  const auto est = otoc_ratio_estimate(sample_shadows(s1, 10000, 21), sample_shadows(s2, 10000, 22), 10, obs, s1.rho,
                                       s1.povm, DataMode::Exact);
  const auto noisy = baseline_statistical_otoc(u, obs, s1.noise, 20000, 5);
  CHECK(std::abs(est.xbar - exact) < std::abs(noisy.value - exact));
}

TEST_CASE("ratio is SPAM independent in the exhaustive n=1 chain", "[correlators]") {
  CHECK(oracles::theta_cancellation().passed());
}
