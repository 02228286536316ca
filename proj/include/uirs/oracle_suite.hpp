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

/**
 * @file oracle_suite.hpp
 * Invariant checks of the theory oracles, each reporting its worst error.
 * Shared by `uirs oracle-check` and the acceptance runner.
 */
#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "uirs/theory.hpp"

namespace uirs::oracles {

struct Check {
  std::string name;
  double error = 0.0;
  double tolerance = 0.0;
  bool passed() const { return error <= tolerance; }
};

/// max |P_tr + P_ad - 1| for n = 1..3.
inline Check projector_sum(double tol = 1e-12) {
  double err = 0.0;
  for (int n = 1; n <= 3; ++n) {
    const auto [ptr, pad] = irrep_projectors(n);
    const auto d2 = ptr.matrix.rows();
    err = std::max(err, (ptr.matrix + pad.matrix - RealMatrix::Identity(d2, d2)).cwiseAbs().maxCoeff());
  }
  return {"projector sum P_tr + P_ad = 1", err, tol};
}

/// Exhaustive n = 1 twirl of random M against P_tr M P_tr + Tr(P_ad M)/3 P_ad.
inline Check schur_twirl(std::uint64_t seed, int trials = 10, double tol = 1e-12) {
  auto rng = RandomStream::derive(seed, "schur");
  const auto [ptr, pad] = irrep_projectors(1);
  double err = 0.0;
  for (int t = 0; t < trials; ++t) {
    RealMatrix m(4, 4);
    for (Eigen::Index i = 0; i < 16; ++i) m(i / 4, i % 4) = rng.uniform(-1.0, 1.0);
    const LiouvilleMatrix tw = single_twirl(m.cast<cplx>());
    const RealMatrix expect = ptr.matrix * m * ptr.matrix + (pad.matrix * m).trace() / 3.0 * pad.matrix;
    err = std::max(err, (tw - expect.cast<cplx>()).cwiseAbs().maxCoeff());
  }
  return {"n=1 twirl matches the Schur form", err, tol};
}

/// <<s1 (x) s2 | F (W (x) W)>> = Tr(W s1 W s1) delta_{s1,s2} for all
/// normalized Pauli pairs and all nontrivial W, n <= 2.
inline Check swap_expansion(double tol = 1e-12) {
  double err = 0.0;
  for (int n = 1; n <= 2; ++n) {
    const auto d = Eigen::Index{1} << n;
    const auto d2 = d * d;
    const DenseOperator f = swap_operator(n);
    for (Eigen::Index wi = 1; wi < d2; ++wi) {
      const DenseOperator w = pauli_dense(PauliString::from_index(n, static_cast<std::size_t>(wi)));
      const DenseOperator fww = f * kron(w, w);
      for (Eigen::Index a = 0; a < d2; ++a) {
        const DenseOperator sa = pauli_dense(PauliString::from_index(n, static_cast<std::size_t>(a))) /
                                 std::sqrt(static_cast<double>(d));
        const cplx self = (w * sa * w * sa).trace();
        for (Eigen::Index b = 0; b < d2; ++b) {
          const DenseOperator sb = pauli_dense(PauliString::from_index(n, static_cast<std::size_t>(b))) /
                                   std::sqrt(static_cast<double>(d));
          const cplx lhs = hs_inner(kron(sa, sb), fww);
          const cplx rhs = a == b ? self : cplx{0.0, 0.0};
          err = std::max(err, std::abs(lhs - rhs));
        }
      }
    }
  }
  return {"swap expansion <<s1 s2|F(W W)>> = Tr(W s1 W s1) delta", err, tol};
}

/// P_tr (x) P_tr, P_ad (x) P_tr and P_tr (x) P_ad are fixed by the n = 1
/// doubled twirl.
inline Check doubled_twirl_heads(double tol = 1e-12) {
  const auto [ptr, pad] = irrep_projectors(1);
  double err = 0.0;
  for (const auto& x : {kron(ptr.matrix, ptr.matrix), kron(pad.matrix, ptr.matrix), kron(ptr.matrix, pad.matrix)}) {
    const LiouvilleMatrix xc = x.cast<cplx>();
    err = std::max(err, (doubled_twirl(xc) - xc).cwiseAbs().maxCoeff());
  }
  return {"doubled twirl fixes P_tr P_tr, P_ad P_tr, P_tr P_ad", err, tol};
}

inline DenseOperator z_dominant_hamiltonian() {
  return 1.3 * pauli_dense(PauliString::parse("Z")) + 0.4 * pauli_dense(PauliString::parse("X"));
}

/// Exhaustive n = 1 OTOC chain: k(m)/k(m-1) = d O(t) for m = 2, 3, 4.
inline Check exact_otoc_decay_ratio(double t = 0.7, double tol = 1e-10) {
  const DenseOperator u = evolve(z_dominant_hamiltonian(), t);
  const OtocObservables obs(PauliString::parse("Y"), PauliString::parse("X"));
  const auto rho = zero_state(1);
  const auto povm = computational_povm(1);
  const auto eff = effective_noise(NoiseModel::ideal(1), unitary_channel(u), rho, povm);
  const auto tw = exhaustive_layer_twirl(otoc_A_operator(obs), eff.channel(), TwirlMode::Independent);
  const auto [bnd, init] = independent_boundary(eff, rho, povm);
  const auto k = tw.k_series(bnd, init, 4);
  const double target = 2.0 * otoc_exact(u, obs.V, obs.W);
  double err = std::abs(decay_otoc(u, obs.V, obs.W) - target);
  for (int m = 2; m <= 4; ++m) err = std::max(err, std::abs(k[m - 1] / k[m - 2] - target));
  return {"exhaustive OTOC decay k(m)/k(m-1) = d O(t), n=1", err, tol};
}

/// Random CPTP maps on one qubit as the interleaved channel: the scalar
/// Phi, the closed-form Tr(Theta Phi^{m-1}), and the exhaustive chain agree.
inline Check independent_decay_formula(std::uint64_t seed, int count = 20, double tol = 1e-10) {
  auto rng = RandomStream::derive(seed, "independent-decay");
  const OtocObservables obs(PauliString::parse("Y"), PauliString::parse("X"));
  const auto A = otoc_A_operator(obs);
  const auto rho = zero_state(1);
  const auto povm = computational_povm(1);
  double err = 0.0;
  for (int c = 0; c < count; ++c) {
    const Channel lam = random_channel(1, 1 + c % 4, rng);
    const auto eff = effective_noise(NoiseModel::ideal(1), lam, rho, povm);
    const auto tw = exhaustive_layer_twirl(A, eff.channel(), TwirlMode::Independent);
    const auto [bnd, init] = independent_boundary(eff, rho, povm);
    const auto k = tw.k_series(bnd, init, 4);
    const auto model = independent_decay_model(A, eff, rho, povm);
    const double phi = phi_independent_clifford(A, lam);
    for (int m = 1; m <= 4; ++m) err = std::max(err, std::abs(model.k(m) - k[m - 1]));
    err = std::max(err, std::abs(k[1] / k[0] - phi));
  }
  return {"independent-sequence closed form = exhaustive twirl (random channels)", err, tol};
}

/// Identical-sequence chain with random channels and SPAM: closed form,
/// exhaustive chain, and eigenvalues {1, u} of the reduced 2 x 2 block.
inline Check identical_decay_formula(std::uint64_t seed, int count = 10, double tol = 1e-10) {
  auto rng = RandomStream::derive(seed, "identical-decay");
  const auto rho = zero_state(1);
  const auto povm = computational_povm(1);
  const auto w = OutcomeWeights::z_on_qubit(1, 0);
  const LiouvilleMatrix id16 = LiouvilleMatrix::Identity(16, 16);
  const auto tp = trivial_pair(1);
  LiouvilleVector proc = LiouvilleVector::Zero(16);
  proc(0) = 1.0;
  double err = 0.0;
  for (int c = 0; c < count; ++c) {
    NoiseModel noise = NoiseModel::ideal(1);
    noise.left = random_channel(1, 2, rng);
    noise.spam_prep = Channel::depolarizing(0.1 * rng.uniform(), 1);
    noise.spam_meas = Channel::depolarizing(0.1 * rng.uniform(), 1);
    const auto eff = effective_noise(noise, std::nullopt, rho, povm);
    const auto tw = exhaustive_layer_twirl(id16, eff.channel(), TwirlMode::Identical);
    const auto [bnd, init] = identical_boundary(eff, w);
    const auto k = tw.k_series(bnd, init, 5);
    const auto model = identical_decay_model(eff, w);
    for (int m = 1; m <= 5; ++m) err = std::max(err, std::abs(model.k(m) - k[m - 1]));
    RealMatrix block(2, 2);
    const std::array<LiouvilleVector, 2> c2 = {LiouvilleVector(kron(proc, tp.b1)), LiouvilleVector(kron(proc, tp.b2))};
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) block(i, j) = c2[static_cast<std::size_t>(i)].dot(tw.layer * c2[static_cast<std::size_t>(j)]).real();
    }
    Eigen::VectorXcd ev = block.eigenvalues();
    std::vector<double> re = {ev(0).real(), ev(1).real()};
    std::sort(re.begin(), re.end());
    const double u = unitarity_exact(eff.channel());
    std::vector<double> expect = {std::min(1.0, u), std::max(1.0, u)};
    err = std::max({err, std::abs(re[0] - expect[0]), std::abs(re[1] - expect[1]),
                    std::abs(ev(0).imag()), std::abs(ev(1).imag())});
    err = std::max(err, std::abs(unitarity_phi(eff.channel())(1, 1) - u));
  }
  return {"identical-sequence closed form = exhaustive twirl, block eigenvalues {1, u}", err, tol};
}

/// Exhaustive n = 1 ratio k(2)/k(1) is the same for depolarizing SPAM
/// p in {0, 0.2, 0.4}.
inline Check theta_cancellation(double tol = 1e-10) {
  const DenseOperator u = evolve(z_dominant_hamiltonian(), 0.7);
  const OtocObservables obs(PauliString::parse("Y"), PauliString::parse("X"));
  const auto A = otoc_A_operator(obs);
  const auto rho = zero_state(1);
  const auto povm = computational_povm(1);
  std::vector<double> ratios;
  for (double p : {0.0, 0.2, 0.4}) {
    const auto noise = NoiseModel::depolarizing(1, 0.0, 0.0, p, p);
    const auto eff = effective_noise(noise, unitary_channel(u), rho, povm);
    const auto tw = exhaustive_layer_twirl(A, eff.channel(), TwirlMode::Independent);
    const auto [bnd, init] = independent_boundary(eff, rho, povm);
    const auto k = tw.k_series(bnd, init, 2);
    ratios.push_back(k[1] / k[0]);
  }
  double err = 0.0;
  for (double r : ratios) err = std::max(err, std::abs(r - ratios.front()));
  return {"SPAM-independent ratio k(2)/k(1) under depolarizing SPAM", err, tol};
}

/// Fast OTOC correlation function against the literal trace on random
/// instances with n in {1, 2} and m in {1, 2, 3}.
inline Check fast_vs_general(std::uint64_t seed, int count = 200, double tol = 1e-9) {
  auto rng = RandomStream::derive(seed, "fast-vs-general");
  double err = 0.0;
  for (int it = 0; it < count; ++it) {
    const int n = 1 + it % 2;
    const int m = 1 + (it / 2) % 3;
    const auto d2 = std::size_t{1} << (2 * n);
    PauliString v = PauliString::from_index(n, 1 + rng.below(d2 - 1));
    PauliString w = PauliString::from_index(n, 1 + rng.below(d2 - 1));
    const OtocObservables obs(v, w);
    std::vector<CliffordElement> g1;
    std::vector<CliffordElement> g2;
    for (int i = 0; i < m; ++i) {
      g1.push_back(random_clifford(n, rng));
      g2.push_back(random_clifford(n, rng));
    }
    // Matching middle layers exercise the nonzero branch of the middle factor.
    if (m == 3 && it % 3 == 0) g2[1] = g1[1];
    const auto rho = zero_state(n);
    const auto povm = computational_povm(n);
    const int x = static_cast<int>(rng.below(std::size_t{1} << n));
    const int y = static_cast<int>(rng.below(std::size_t{1} << n));
    const double fast = f_otoc_fast(x, y, g1, g2, m, obs, rho, povm);
    const cplx slow = f_general_trace(g1, g2, m, otoc_A_operator(obs), otoc_B_operator(x, y, rho, povm));
    err = std::max(err, std::abs(fast - slow));
  }
  return {"fast OTOC correlation function = literal trace", err, tol};
}

/// d O(t) against Phi of the OTOC operator for random n = 2 unitaries.
inline Check decay_vs_phi(std::uint64_t seed, int count = 5, double tol = 1e-10) {
  auto rng = RandomStream::derive(seed, "decay-vs-phi");
  double err = 0.0;
  for (int c = 0; c < count; ++c) {
    const DenseOperator u = random_unitary(4, rng);
    const OtocObservables obs(PauliString::parse("IY"), PauliString::parse("XI"));
    const double phi = phi_independent_clifford(otoc_A_operator(obs), unitary_channel(u));
    err = std::max(err, std::abs(phi - decay_otoc(u, obs.V, obs.W)));
  }
  return {"decay d O(t) = Phi of the OTOC operator, n=2", err, tol};
}

inline std::vector<Check> run_all(std::uint64_t seed = 1) {
  return {projector_sum(),        schur_twirl(seed),       swap_expansion(),
          doubled_twirl_heads(),  exact_otoc_decay_ratio(), independent_decay_formula(seed),
          identical_decay_formula(seed), theta_cancellation(), fast_vs_general(seed),
          decay_vs_phi(seed)};
}

/// Prints one PASS/FAIL line per check; returns the number of failures.
inline int report(const std::vector<Check>& checks, std::ostream& os) {
  int failures = 0;
  for (const auto& c : checks) {
    os << (c.passed() ? "PASS" : "FAIL") << "  " << c.name << "  (max error " << c.error << ", tol "
       << c.tolerance << ")\n";
    if (!c.passed()) ++failures;
  }
  return failures;
}

}  // namespace uirs::oracles
