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
 * @file channels.hpp
 * Channels in the Pauli-Liouville representation, the disordered
 * long-range Ising model, and exact unitarity / OTOC values.
 */
#pragma once

#include <Eigen/Eigenvalues>
#include <cmath>
#include <optional>
#include <vector>

#include "uirs/pauli.hpp"
#include "uirs/rng.hpp"

namespace uirs {

/**
 * Completely positive map with its Pauli transfer matrix.
 *
 * Unitary and depolarizing channels keep their defining parameters so
 * density matrices can be propagated in O(d^3) and O(d^2) instead of going
 * through the d^2 x d^2 transfer matrix.
 */
class Channel {
 public:
  enum class Kind { General, Unitary, Depolarizing };

  Channel() : Channel(identity(1)) {}

  static Channel identity(int n) { return depolarizing_unchecked(0.0, n); }

  static Channel from_liouville(const LiouvilleMatrix& l, double tol = 1e-10) {
    const auto d2 = l.rows();
    if (l.cols() != d2) throw InvalidDimension("Channel: transfer matrix is not square");
    int n = 0;
    for (int k = 1; k <= kMaxQubits; ++k) {
      if (d2 == (Eigen::Index{1} << (2 * k))) n = k;
    }
    if (n == 0) throw InvalidDimension("Channel: transfer matrix size is not 4^n");
    Channel c;
    c.n_ = n;
    c.kind_ = Kind::General;
    c.liouville_ = l;
    Eigen::RowVectorXcd first = Eigen::RowVectorXcd::Zero(d2);
    first(0) = 1.0;
    c.trace_preserving_ = (l.row(0) - first).cwiseAbs().maxCoeff() <= tol;
    return c;
  }

  /// Channel from Kraus operators rho -> sum_k K rho K^dagger.
  static Channel from_kraus(const std::vector<DenseOperator>& kraus) {
    if (kraus.empty()) throw InvalidArgument("from_kraus: no Kraus operators");
    const int n = qubits_for_dimension(kraus.front().rows());
    auto apply = [&](const DenseOperator& rho) {
      DenseOperator out = DenseOperator::Zero(rho.rows(), rho.cols());
      for (const auto& k : kraus) out += k * rho * k.adjoint();
      return out;
    };
    return from_liouville(channel_to_liouville(apply, n));
  }

  static Channel unitary(const DenseOperator& u, double tol = 1e-10) {
    if (!is_unitary(u, tol)) throw InvalidArgument("unitary_channel: operator is not unitary");
    const int n = qubits_for_dimension(u.rows());
    Channel c;
    c.n_ = n;
    c.kind_ = Kind::Unitary;
    c.unitary_ = u;
    c.liouville_ = channel_to_liouville(
        [&](const DenseOperator& rho) -> DenseOperator { return u * rho * u.adjoint(); }, n);
    c.trace_preserving_ = true;
    return c;
  }

  static Channel depolarizing(double p, int n) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("depolarizing: p must lie in [0, 1]");
    if (n < 1 || n > kMaxQubits) throw InvalidArgument("depolarizing: bad qubit count");
    return depolarizing_unchecked(p, n);
  }

  int num_qubits() const { return n_; }
  std::size_t dim() const { return std::size_t{1} << n_; }
  const LiouvilleMatrix& liouville() const { return liouville_; }
  bool trace_preserving() const { return trace_preserving_; }
  Kind kind() const { return kind_; }
  double depolarizing_p() const { return p_; }
  const DenseOperator& unitary_matrix() const { return unitary_; }

  bool is_identity(double tol = 1e-14) const {
    return kind_ == Kind::Depolarizing && std::abs(p_) <= tol;
  }

  DenseOperator apply(const DenseOperator& rho) const {
    if (rho.rows() != static_cast<Eigen::Index>(dim()) || rho.cols() != rho.rows()) {
      throw DimensionMismatch("Channel::apply: operator has the wrong dimension");
    }
    switch (kind_) {
      case Kind::Unitary:
        return unitary_ * rho * unitary_.adjoint();
      case Kind::Depolarizing: {
        if (p_ == 0.0) return rho;
        DenseOperator out = (1.0 - p_) * rho;
        out.diagonal().array() += p_ * rho.trace() / static_cast<double>(dim());
        return out;
      }
      default:
        return devectorize(liouville_ * vectorize(rho));
    }
  }

 private:
  static Channel depolarizing_unchecked(double p, int n) {
    Channel c(0);
    c.n_ = n;
    c.kind_ = Kind::Depolarizing;
    c.p_ = p;
    const auto d2 = Eigen::Index{1} << (2 * n);
    c.liouville_ = LiouvilleMatrix::Identity(d2, d2) * (1.0 - p);
    c.liouville_(0, 0) = 1.0;
    c.trace_preserving_ = true;
    return c;
  }

  explicit Channel(int) {}

  int n_ = 1;
  Kind kind_ = Kind::General;
  LiouvilleMatrix liouville_;
  DenseOperator unitary_;
  double p_ = 0.0;
  bool trace_preserving_ = false;
};

inline Channel depolarizing(double p, int n) { return Channel::depolarizing(p, n); }

inline Channel unitary_channel(const DenseOperator& u) { return Channel::unitary(u); }

/// outer after inner.
inline Channel compose(const Channel& outer, const Channel& inner) {
  if (outer.num_qubits() != inner.num_qubits()) {
    throw DimensionMismatch("compose: channels on different qubit counts");
  }
  if (inner.is_identity()) return outer;
  if (outer.is_identity()) return inner;
  if (outer.kind() == Channel::Kind::Depolarizing && inner.kind() == Channel::Kind::Depolarizing) {
    return Channel::depolarizing(1.0 - (1.0 - outer.depolarizing_p()) * (1.0 - inner.depolarizing_p()),
                                 outer.num_qubits());
  }
  return Channel::from_liouville(outer.liouville() * inner.liouville());
}

/// Haar-random unitary via QR of a complex Ginibre matrix.
inline DenseOperator random_unitary(Eigen::Index d, RandomStream& rng) {
  auto gauss = [&rng] {
    const double u1 = 1.0 - rng.uniform();
    const double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  };
  DenseOperator g(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = cplx(gauss(), gauss());
  }
  Eigen::HouseholderQR<DenseOperator> qr(g);
  DenseOperator q = qr.householderQ();
  const DenseOperator r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < d; ++j) {
    const cplx rjj = r(j, j);
    q.col(j) *= rjj / std::abs(rjj);
  }
  return q;
}

/// Random CPTP map with `kraus_rank` Kraus operators from a Haar isometry.
inline Channel random_channel(int n, int kraus_rank, RandomStream& rng) {
  const auto d = Eigen::Index{1} << n;
  const DenseOperator big = random_unitary(d * kraus_rank, rng);
  std::vector<DenseOperator> kraus;
  for (int k = 0; k < kraus_rank; ++k) kraus.push_back(big.block(k * d, 0, d, d));
  return Channel::from_kraus(kraus);
}

/// Gate-independent noise around each gate, plus SPAM channels.
struct NoiseModel {
  Channel left;       // after each gate
  Channel right;      // before each gate
  Channel spam_prep;  // after state preparation
  Channel spam_meas;  // before measurement

  static NoiseModel ideal(int n) {
    return {Channel::identity(n), Channel::identity(n), Channel::identity(n), Channel::identity(n)};
  }

  static NoiseModel depolarizing(int n, double gate_left, double gate_right, double prep,
                                 double meas) {
    return {Channel::depolarizing(gate_left, n), Channel::depolarizing(gate_right, n),
            Channel::depolarizing(prep, n), Channel::depolarizing(meas, n)};
  }

  void validate() const {
    for (const Channel* c : {&left, &right, &spam_prep, &spam_meas}) {
      if (!c->trace_preserving()) throw InvalidArgument("NoiseModel: channel is not trace preserving");
    }
  }
};

struct IsingParams {
  int n = 3;
  double J0 = 1.0;
  double alpha = 1.5;
  double B = 1.0;
  double Dmax = 1.0;
  std::uint64_t disorder_seed = 0;
};

/// D_i, one frozen realization per disorder seed.
inline std::vector<double> ising_disorder(const IsingParams& p) {
  auto rng = RandomStream::derive(p.disorder_seed, "disorder");
  std::vector<double> d(static_cast<std::size_t>(p.n));
  for (auto& v : d) v = rng.uniform(-p.Dmax, p.Dmax);
  return d;
}

/// H = sum_{i<j} J0/|i-j|^alpha X_i X_j + (B/2) sum Z_i + sum (D_i/2) Z_i.
inline DenseOperator build_ising(const IsingParams& p) {
  if (p.n < 1 || p.n > kMaxQubits) throw InvalidArgument("build_ising: n must be in [1, 5]");
  if (p.Dmax < 0.0) throw InvalidArgument("build_ising: Dmax must be nonnegative");
  const auto d = Eigen::Index{1} << p.n;
  const auto disorder = ising_disorder(p);
  DenseOperator h = DenseOperator::Zero(d, d);
  for (int i = 0; i < p.n; ++i) {
    for (int j = i + 1; j < p.n; ++j) {
      const double jij = p.J0 / std::pow(static_cast<double>(j - i), p.alpha);
      const auto xx = multiply(PauliString::single(p.n, i, 'X'), PauliString::single(p.n, j, 'X'));
      h += jij * pauli_dense(xx.pauli);
    }
    const double field = 0.5 * (p.B + disorder[static_cast<std::size_t>(i)]);
    h += field * pauli_dense(PauliString::single(p.n, i, 'Z'));
  }
  return h;
}

/// U_t = exp(-i H t) by Hermitian eigendecomposition.
inline DenseOperator evolve(const DenseOperator& h, double t) {
  if (!is_hermitian(h, 1e-10)) throw InvalidArgument("evolve: Hamiltonian is not Hermitian");
  Eigen::SelfAdjointEigenSolver<DenseOperator> es(h);
  const Eigen::VectorXcd phases =
      (es.eigenvalues().cast<cplx>() * cplx(0.0, -t)).array().exp().matrix();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/**
 * Unitarity u = d/(d-1) E_psi Tr[L'(psi)^2] with L'(A) = L(A - Tr(A) 1/d),
 * i.e. the unital block R_u of the Pauli transfer matrix. The Haar second
 * moment of the traceless part of |psi><psi| is 1/(d(d+1)) on that block,
 * so u = Tr(R_u^dagger R_u) / (d^2 - 1). For unital channels this is the
 * average purity of the trace-removed output.
 */
inline double unitarity_exact(const Channel& c) {
  if (!c.trace_preserving()) throw InvalidArgument("unitarity_exact: channel is not trace preserving");
  const double d = static_cast<double>(c.dim());
  const Eigen::MatrixXcd& r = c.liouville();
  const auto k = r.rows() - 1;
  return r.bottomRightCorner(k, k).squaredNorm() / (d * d - 1.0);
}

inline void require_nontrivial(const PauliString& v, const PauliString& w, const char* who) {
  if (v.is_identity() || w.is_identity()) {
    throw InvalidArgument(std::string(who) + ": V and W must be nontrivial Pauli strings");
  }
  if (v.num_qubits() != w.num_qubits()) {
    throw DimensionMismatch(std::string(who) + ": V and W act on different qubit counts");
  }
}

/// O(t) = Re Tr(W V(t) W V(t)) / d with V(t) = U_t^dagger V U_t.
inline double otoc_exact(const DenseOperator& u_t, const PauliString& v, const PauliString& w) {
  require_nontrivial(v, w, "otoc_exact");
  if (u_t.rows() != static_cast<Eigen::Index>(v.dim())) {
    throw DimensionMismatch("otoc_exact: U_t and V have different dimensions");
  }
  const DenseOperator vt = u_t.adjoint() * pauli_dense(v) * u_t;
  const DenseOperator wvt = conjugate_by_pauli(w, vt);
  return trace_product_real(wvt, vt) / static_cast<double>(u_t.rows());
}

/// C(t) = 2 (1 - Re O(t)).
inline double otoc_commutator(const DenseOperator& u_t, const PauliString& v, const PauliString& w) {
  return 2.0 * (1.0 - otoc_exact(u_t, v, w));
}

}  // namespace uirs
