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
 * @file theory.hpp
 * Closed-form decay models and brute-force twirl oracles.
 *
 * Two-copy Liouville vectors use the basis sigma_a (x) sigma_b with index
 * a * d^2 + b, which is also the normalized Pauli basis of the doubled
 * 2n-qubit system.
 */
#pragma once

#include <array>
#include <optional>
#include <vector>

#include "uirs/channels.hpp"
#include "uirs/clifford.hpp"
#include "uirs/correlators.hpp"

namespace uirs {

/// k(m) = Tr(theta phi^{m-1}).
struct DecayModel {
  RealMatrix theta;
  RealMatrix phi;
  bool scalar = true;

  double k(int m) const {
    if (m < 1) throw InvalidArgument("DecayModel::k: m must be at least 1");
    RealMatrix p = RealMatrix::Identity(phi.rows(), phi.cols());
    for (int i = 1; i < m; ++i) p = p * phi;
    return (theta * p).trace();
  }
};

/// Single-qubit Clifford group, enumerated once.
inline const std::vector<CliffordElement>& single_qubit_group() {
  static const std::vector<CliffordElement> group = enumerate_single_qubit_clifford();
  return group;
}

namespace detail {

inline Eigen::Index rank_of(IrrepLabel l, int n) {
  return l == IrrepLabel::Trivial ? 1 : (Eigen::Index{1} << (2 * n)) - 1;
}

inline int qubits_for_liouville(Eigen::Index d2) {
  for (int k = 1; k <= kMaxQubits; ++k) {
    if (d2 == (Eigen::Index{1} << (2 * k))) return k;
  }
  throw InvalidDimension("Liouville dimension is not 4^n");
}

}  // namespace detail

/**
 * Phi = Tr(P A^T P Lambda^{(x)2}) / (|P1| |P2|) for the single irrep-product
 * block P = P1 (x) P2 on which A is supported.
 */
inline double phi_independent_clifford(const LiouvilleMatrix& A, const Channel& lambda,
                                       double tol = 1e-10) {
  const int n = lambda.num_qubits();
  const auto d4 = Eigen::Index{1} << (4 * n);
  if (A.rows() != d4 || A.cols() != d4) throw DimensionMismatch("phi_independent_clifford: A must be d^4 x d^4");
  if (A.cwiseAbs().maxCoeff() <= tol) return 0.0;
  for (auto l1 : {IrrepLabel::Trivial, IrrepLabel::Adjoint}) {
    for (auto l2 : {IrrepLabel::Trivial, IrrepLabel::Adjoint}) {
      const LiouvilleMatrix p = pair_projector(n, l1, l2);
      if ((A - p * A * p).cwiseAbs().maxCoeff() > tol) continue;
      const LiouvilleMatrix l2x = kron(lambda.liouville(), lambda.liouville());
      const cplx tr = (A.transpose().cwiseProduct((p * l2x * p).transpose())).sum();
      return tr.real() / static_cast<double>(detail::rank_of(l1, n) * detail::rank_of(l2, n));
    }
  }
  throw PreconditionError("phi_independent_clifford: A is not supported on one irrep-product block");
}

/**
 * Decay parameter of the independent-sequence OTOC correlator, d O(t).
 * The protocol inserts U_t as rho -> U_t rho U_t^dagger, so the decay is
 * Tr(W U_t V U_t^dagger W U_t V U_t^dagger), i.e. the OTOC with the
 * Heisenberg picture taken for U_t^dagger. The two agree whenever
 * H is real in the computational basis, as for the Ising model here.
 */
inline double decay_otoc(const DenseOperator& u_t, const PauliString& v, const PauliString& w) {
  return static_cast<double>(u_t.rows()) * otoc_exact(u_t.adjoint(), v, w);
}

struct TrivialPair {
  DenseOperator B1;
  DenseOperator B2;
  LiouvilleVector b1;  // two-copy Liouville vector of B1
  LiouvilleVector b2;
  LiouvilleMatrix P_tau;
};

/// Swap F on two copies of the n-qubit space.
inline DenseOperator swap_operator(int n) {
  const auto d = Eigen::Index{1} << n;
  DenseOperator f = DenseOperator::Zero(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) f(j * d + i, i * d + j) = 1.0;
  }
  return f;
}

/// B1 = 1/d, B2 = (F - B1)/sqrt(d^2 - 1), and the rank-2 projector onto
/// their span in the two-copy Liouville space.
inline TrivialPair trivial_pair(int n) {
  if (n < 1 || n > kMaxQubits) throw InvalidArgument("trivial_pair: bad qubit count");
  const auto d = Eigen::Index{1} << n;
  const auto d2 = d * d;
  const double norm = std::sqrt(static_cast<double>(d2 - 1));
  TrivialPair t;
  t.B1 = DenseOperator::Identity(d2, d2) / static_cast<double>(d);
  t.B2 = (swap_operator(n) - t.B1) / norm;
  t.b1 = LiouvilleVector::Zero(d2 * d2);
  t.b1(0) = 1.0;
  t.b2 = LiouvilleVector::Zero(d2 * d2);
  for (Eigen::Index a = 1; a < d2; ++a) t.b2(a * d2 + a) = 1.0 / norm;
  t.P_tau = t.b1 * t.b1.adjoint() + t.b2 * t.b2.adjoint();
  return t;
}

/// Entries <<b_j| Lambda (x) Lambda |b_i>> at (i, j), read directly from
/// the transfer matrix: [[1, <<B2|L2|B1>>], [<<B1|L2|B2>>, u]].
inline RealMatrix unitarity_phi(const Channel& lambda) {
  if (!lambda.trace_preserving()) throw InvalidArgument("unitarity_phi: channel is not trace preserving");
  const Eigen::MatrixXd r = lambda.liouville().real();
  const auto d2 = r.rows();
  const double k = static_cast<double>(d2 - 1);
  RealMatrix phi(2, 2);
  phi(0, 0) = r(0, 0) * r(0, 0);
  phi(0, 1) = r.col(0).tail(d2 - 1).squaredNorm() / std::sqrt(k);
  phi(1, 0) = r.row(0).tail(d2 - 1).squaredNorm() / std::sqrt(k);
  phi(1, 1) = r.bottomRightCorner(d2 - 1, d2 - 1).squaredNorm() / k;
  return phi;
}

/**
 * Phi_ij = Tr(P_i A^T J_ij Lambda^{(x)2}) / |P_j| over copies of one irrep
 * in the two-copy space. For rank-one copies J_ij = |b_i>><<b_j| is the
 * intertwiner between copies (b_i the unit vector of P_i, sign fixed by its
 * largest entry), so J_ii = P_i and the off-diagonal entries carry the
 * coupling between copies. For higher-rank copies J_ij = P_j.
 */
inline RealMatrix phi_identical(const LiouvilleMatrix& A, const Channel& lambda,
                                const std::vector<LiouvilleMatrix>& projectors, double tol = 1e-10) {
  if (projectors.empty()) throw InvalidArgument("phi_identical: no projectors");
  const auto D = A.rows();
  if (A.cols() != D || D != lambda.liouville().rows() * lambda.liouville().rows()) {
    throw DimensionMismatch("phi_identical: A must act on the two-copy Liouville space");
  }
  std::vector<Eigen::Index> ranks;
  std::vector<LiouvilleVector> vecs;
  for (std::size_t i = 0; i < projectors.size(); ++i) {
    const auto& p = projectors[i];
    if (p.rows() != D || p.cols() != D) throw DimensionMismatch("phi_identical: projector dimension");
    if ((p * p - p).cwiseAbs().maxCoeff() > tol || (p - p.adjoint()).cwiseAbs().maxCoeff() > tol) {
      throw InvalidArgument("phi_identical: input is not an orthogonal projector");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if ((p * projectors[j]).cwiseAbs().maxCoeff() > tol) {
        throw InvalidArgument("phi_identical: projectors are not mutually orthogonal");
      }
    }
    ranks.push_back(static_cast<Eigen::Index>(std::lround(p.trace().real())));
    Eigen::Index col = 0;
    p.diagonal().cwiseAbs().maxCoeff(&col);
    LiouvilleVector v = p.col(col);
    v /= v.norm();
    Eigen::Index big = 0;
    v.cwiseAbs().maxCoeff(&big);
    if (v(big).real() < 0.0) v = -v;
    vecs.push_back(v);
  }
  const bool rank_one = std::all_of(ranks.begin(), ranks.end(), [](auto r) { return r == 1; });
  const LiouvilleMatrix l2 = kron(lambda.liouville(), lambda.liouville());
  const LiouvilleMatrix at = A.transpose();
  const auto k = static_cast<Eigen::Index>(projectors.size());
  RealMatrix phi(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      const auto& pi = projectors[static_cast<std::size_t>(i)];
      const LiouvilleMatrix jij =
          rank_one ? LiouvilleMatrix(vecs[static_cast<std::size_t>(i)] * vecs[static_cast<std::size_t>(j)].adjoint())
                   : projectors[static_cast<std::size_t>(j)];
      phi(i, j) = (pi * at * jij * l2).trace().real() / static_cast<double>(ranks[static_cast<std::size_t>(j)]);
    }
  }
  return phi;
}

/// Noise folded into the twirl picture: the channel between consecutive
/// gates Lambda_R I Lambda_L, the noisy state Lambda_R(spam_prep(rho)), and
/// the noisy effects with <<E'_x| = <<E_x| spam_meas Lambda_L.
struct EffectiveNoise {
  LiouvilleMatrix lambda;
  LiouvilleVector rho;
  std::vector<LiouvilleVector> effects;

  Channel channel() const { return Channel::from_liouville(lambda); }
};

inline EffectiveNoise effective_noise(const NoiseModel& noise, const std::optional<Channel>& interleave,
                                      const DenseOperator& rho, const std::vector<DenseOperator>& povm) {
  const LiouvilleMatrix& L = noise.left.liouville();
  const LiouvilleMatrix& R = noise.right.liouville();
  EffectiveNoise e;
  e.lambda = interleave ? LiouvilleMatrix(R * interleave->liouville() * L) : LiouvilleMatrix(R * L);
  e.rho = R * (noise.spam_prep.liouville() * vectorize(rho));
  const LiouvilleMatrix back = (noise.spam_meas.liouville() * L).adjoint();
  for (const auto& ex : povm) e.effects.push_back(back * vectorize(ex));
  return e;
}

/// Independent-sequence model on the adjoint blocks: theta = (<<bnd|Psi Psi>>)(<<Psi Psi|init>>)
/// with Psi = sum_{sigma traceless} e_sigma (x) e_sigma / sqrt(d^2 - 1).
inline DecayModel independent_decay_model(const LiouvilleMatrix& A, const EffectiveNoise& eff,
                                          const DenseOperator& rho, const std::vector<DenseOperator>& povm) {
  const auto d2 = eff.lambda.rows();
  const double norm = std::sqrt(static_cast<double>(d2 - 1));
  const LiouvilleVector r = vectorize(rho);
  cplx alpha = 0.0;
  for (Eigen::Index s = 1; s < d2; ++s) alpha += r(s) * eff.rho(s);
  alpha /= norm;
  cplx beta = 0.0;
  for (std::size_t x = 0; x < povm.size(); ++x) {
    const LiouvilleVector ex = vectorize(povm[x]);
    for (Eigen::Index s = 1; s < d2; ++s) beta += std::conj(ex(s)) * std::conj(eff.effects[x](s));
  }
  beta /= norm;
  DecayModel model;
  model.theta = RealMatrix::Constant(1, 1, (beta * beta * alpha * alpha).real());
  model.phi = RealMatrix::Constant(1, 1, phi_independent_clifford(A, eff.channel()));
  model.scalar = true;
  return model;
}

/// Identical-sequence model for the unitarity correlator with
/// observable sum_x w_x E_x: theta(j, i) = <<E'_w E'_w|b_j>> <<b_i|rho' rho'>>.
inline DecayModel identical_decay_model(const EffectiveNoise& eff, const OutcomeWeights& weights) {
  const auto d2 = eff.lambda.rows();
  const double norm = std::sqrt(static_cast<double>(d2 - 1));
  if (weights.w.size() != eff.effects.size()) throw DimensionMismatch("identical_decay_model: weight length");
  LiouvilleVector ew = LiouvilleVector::Zero(d2);
  for (std::size_t x = 0; x < eff.effects.size(); ++x) ew += weights.w[x] * eff.effects[x];
  const std::array<double, 2> bnd = {std::norm(ew(0)), ew.tail(d2 - 1).squaredNorm() / norm};
  const std::array<double, 2> init = {std::norm(eff.rho(0)), eff.rho.tail(d2 - 1).squaredNorm() / norm};
  DecayModel model;
  model.theta = RealMatrix(2, 2);
  for (int j = 0; j < 2; ++j) {
    for (int i = 0; i < 2; ++i) model.theta(j, i) = bnd[static_cast<std::size_t>(j)] * init[static_cast<std::size_t>(i)];
  }
  model.phi = unitarity_phi(eff.channel());
  model.scalar = false;
  return model;
}

enum class TwirlMode { Independent, Identical };

/**
 * Exhaustively averaged single layer for n = 1. Independent mode lives on
 * tau1 (x) tau2 (x) omega1 (x) omega2 with tau the adjoint irrep and two
 * independent gates; identical mode lives on omega^{(x)4} with one gate.
 * layer = (A (x) Lambda (x) Lambda) twirl, and
 * k(m) = <<bnd| twirl layer^{m-1} |init>>.
 */
struct LayerTwirl {
  TwirlMode mode = TwirlMode::Independent;
  LiouvilleMatrix twirl;
  LiouvilleMatrix layer;

  std::vector<double> k_series(const LiouvilleVector& bnd, const LiouvilleVector& init, int m_max) const {
    std::vector<double> out;
    LiouvilleVector v = init;
    for (int m = 1; m <= m_max; ++m) {
      if (m > 1) v = layer * v;
      out.push_back(bnd.dot(twirl * v).real());
    }
    return out;
  }
};

inline const LiouvilleMatrix& twirl_average(TwirlMode mode) {
  static const LiouvilleMatrix independent = [] {
    const auto& group = single_qubit_group();
    LiouvilleMatrix acc = LiouvilleMatrix::Zero(256, 256);
    std::vector<LiouvilleMatrix> tau;
    std::vector<LiouvilleMatrix> om;
    for (const auto& g : group) {
      tau.push_back(tau_embedded(g, IrrepLabel::Adjoint));
      om.push_back(g.omega().cast<cplx>());
    }
    // Factor order tau1, tau2, omega1, omega2; gate 1 drives tau1 and omega1.
    for (std::size_t a = 0; a < group.size(); ++a) {
      for (std::size_t b = 0; b < group.size(); ++b) {
        acc += kron(kron(tau[a], tau[b]), kron(om[a], om[b]));
      }
    }
    return LiouvilleMatrix(acc / static_cast<double>(group.size() * group.size()));
  }();
  static const LiouvilleMatrix identical = [] {
    const auto& group = single_qubit_group();
    LiouvilleMatrix acc = LiouvilleMatrix::Zero(256, 256);
    for (const auto& g : group) {
      const LiouvilleMatrix w = g.omega().cast<cplx>();
      const LiouvilleMatrix w2 = kron(w, w);
      acc += kron(w2, w2);
    }
    return LiouvilleMatrix(acc / static_cast<double>(group.size()));
  }();
  return mode == TwirlMode::Independent ? independent : identical;
}

inline LayerTwirl exhaustive_layer_twirl(const LiouvilleMatrix& A, const Channel& lambda, TwirlMode mode) {
  if (lambda.num_qubits() != 1) throw InvalidArgument("exhaustive_layer_twirl: only n = 1 is enumerable");
  if (A.rows() != 16 || A.cols() != 16) throw DimensionMismatch("exhaustive_layer_twirl: A must be 16 x 16");
  LayerTwirl t;
  t.mode = mode;
  t.twirl = twirl_average(mode);
  t.layer = kron(A, kron(lambda.liouville(), lambda.liouville())) * t.twirl;
  return t;
}

/// Boundary vectors (bra, ket) for the exhaustive independent-mode chain.
inline std::pair<LiouvilleVector, LiouvilleVector> independent_boundary(
    const EffectiveNoise& eff, const DenseOperator& rho, const std::vector<DenseOperator>& povm) {
  const LiouvilleVector r = vectorize(rho);
  LiouvilleVector bnd = LiouvilleVector::Zero(256);
  for (std::size_t x = 0; x < povm.size(); ++x) {
    const LiouvilleVector ex = vectorize(povm[x]);
    for (std::size_t y = 0; y < povm.size(); ++y) {
      const LiouvilleVector ey = vectorize(povm[y]);
      bnd += kron(kron(ex, ey), kron(eff.effects[x], eff.effects[y]));
    }
  }
  // kron on vectors returns a one-column matrix.
  const LiouvilleVector init = kron(kron(r, r), kron(eff.rho, eff.rho));
  return {bnd, init};
}

/// Boundary vectors for the exhaustive identical-mode chain.
inline std::pair<LiouvilleVector, LiouvilleVector> identical_boundary(const EffectiveNoise& eff,
                                                                      const OutcomeWeights& weights) {
  const int n = detail::qubits_for_liouville(eff.lambda.rows());
  const double d = static_cast<double>(std::size_t{1} << n);
  const LiouvilleVector one = vectorize(DenseOperator::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
  LiouvilleVector ew = LiouvilleVector::Zero(eff.lambda.rows());
  for (std::size_t x = 0; x < eff.effects.size(); ++x) ew += weights.w.at(x) * eff.effects[x];
  const LiouvilleVector proc = kron(one, one);
  const LiouvilleVector bnd = kron(proc, kron(ew, ew)) / (d * d);
  const LiouvilleVector init = kron(proc, kron(eff.rho, eff.rho));
  return {bnd, init};
}

/// Doubled twirl E_g omega(g)^{(x)2} X omega(g)^{(x)2 T} over the n = 1 group.
inline LiouvilleMatrix doubled_twirl(const LiouvilleMatrix& X) {
  const auto& group = single_qubit_group();
  LiouvilleMatrix acc = LiouvilleMatrix::Zero(X.rows(), X.cols());
  for (const auto& g : group) {
    const LiouvilleMatrix w = g.omega().cast<cplx>();
    const LiouvilleMatrix w2 = kron(w, w);
    acc += w2 * X * w2.transpose();
  }
  return acc / static_cast<double>(group.size());
}

/// Single-copy twirl E_g omega(g) X omega(g)^T over the n = 1 group.
inline LiouvilleMatrix single_twirl(const LiouvilleMatrix& X) {
  const auto& group = single_qubit_group();
  LiouvilleMatrix acc = LiouvilleMatrix::Zero(X.rows(), X.cols());
  for (const auto& g : group) {
    const LiouvilleMatrix w = g.omega().cast<cplx>();
    acc += w * X * w.transpose();
  }
  return acc / static_cast<double>(group.size());
}

}  // namespace uirs
