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
 * @file clifford.hpp
 * Clifford group elements as stabilizer tableaux.
 *
 * An element g stores, for every generator X_q and Z_q, the signed Pauli
 * g(P) = U_g^dagger P U_g. Products follow U_{g.h} = U_g U_h, so the
 * conjugation map composes contravariantly: (g.h)(P) = h(g(P)). The
 * Liouville representation omega(g) is the superoperator rho -> U rho U^dagger
 * and is a homomorphism: omega(g.h) = omega(g) omega(h).
 */
#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "uirs/pauli.hpp"
#include "uirs/rng.hpp"

namespace uirs {

class CliffordElement {
 public:
  CliffordElement() : CliffordElement(identity(1)) {}

  /// Builds from the images of X_q and Z_q; throws unless they satisfy the
  /// symplectic (commutation) conditions.
  CliffordElement(std::vector<PauliString> x_images, std::vector<PauliString> z_images)
      : n_(static_cast<int>(x_images.size())),
        x_images_(std::move(x_images)),
        z_images_(std::move(z_images)),
        cache_(std::make_shared<DenseCache>()) {
    if (n_ < 1 || n_ > kMaxQubits || static_cast<int>(z_images_.size()) != n_) {
      throw InvalidArgument("CliffordElement: tableau has the wrong number of rows");
    }
    for (const auto& p : x_images_) check_row(p);
    for (const auto& p : z_images_) check_row(p);
    if (!is_symplectic()) {
      throw InvalidArgument("CliffordElement: images violate the symplectic condition");
    }
  }

  static CliffordElement identity(int n) {
    std::vector<PauliString> xs;
    std::vector<PauliString> zs;
    for (int q = 0; q < n; ++q) {
      xs.push_back(PauliString::single(n, q, 'X'));
      zs.push_back(PauliString::single(n, q, 'Z'));
    }
    return CliffordElement(std::move(xs), std::move(zs));
  }

  static CliffordElement hadamard(int n, int q) {
    auto g = identity(n);
    std::swap(g.x_images_[static_cast<std::size_t>(q)], g.z_images_[static_cast<std::size_t>(q)]);
    return g;
  }

  /// S = diag(1, i) on qubit q: S^dagger X S = -Y.
  static CliffordElement phase_s(int n, int q) {
    auto g = identity(n);
    g.x_images_[static_cast<std::size_t>(q)] = -PauliString::single(n, q, 'Y');
    return g;
  }

  static CliffordElement cnot(int n, int control, int target) {
    if (control == target) throw InvalidArgument("cnot: control equals target");
    auto g = identity(n);
    auto xc = multiply(PauliString::single(n, control, 'X'), PauliString::single(n, target, 'X'));
    auto zt = multiply(PauliString::single(n, control, 'Z'), PauliString::single(n, target, 'Z'));
    g.x_images_[static_cast<std::size_t>(control)] = xc.pauli;
    g.z_images_[static_cast<std::size_t>(target)] = zt.pauli;
    return g;
  }

  /// Reads the tableau off a dense Clifford unitary; throws if some
  /// U^dagger P U is not a signed Pauli string.
  static CliffordElement from_unitary(const DenseOperator& u, double tol = 1e-9) {
    const int n = qubits_for_dimension(u.rows());
    const double d = static_cast<double>(u.rows());
    auto image = [&](const PauliString& p) {
      const DenseOperator c = u.adjoint() * pauli_dense(p) * u;
      for (std::size_t i = 1; i < (std::size_t{1} << (2 * n)); ++i) {
        const auto q = PauliString::from_index(n, i);
        const cplx t = trace_pauli_product(q, c) / d;
        if (std::abs(std::abs(t) - 1.0) < tol) {
          if (std::abs(t.imag()) > tol) break;
          return t.real() > 0 ? q : -q;
        }
      }
      throw InvalidArgument("from_unitary: operator does not normalize the Pauli group");
    };
    std::vector<PauliString> xs;
    std::vector<PauliString> zs;
    for (int q = 0; q < n; ++q) {
      xs.push_back(image(PauliString::single(n, q, 'X')));
      zs.push_back(image(PauliString::single(n, q, 'Z')));
    }
    return CliffordElement(std::move(xs), std::move(zs));
  }

  int num_qubits() const { return n_; }
  std::size_t dim() const { return std::size_t{1} << n_; }
  const PauliString& x_image(int q) const { return x_images_.at(static_cast<std::size_t>(q)); }
  const PauliString& z_image(int q) const { return z_images_.at(static_cast<std::size_t>(q)); }

  /// Tableau rows g(X_0..X_{n-1}) followed by g(Z_0..Z_{n-1}).
  std::vector<PauliString> tableau_rows() const {
    std::vector<PauliString> rows = x_images_;
    rows.insert(rows.end(), z_images_.begin(), z_images_.end());
    return rows;
  }

  static CliffordElement from_tableau_rows(const std::vector<PauliString>& rows) {
    if (rows.empty() || rows.size() % 2 != 0) {
      throw InvalidArgument("from_tableau_rows: expected 2n rows");
    }
    const auto n = rows.size() / 2;
    return CliffordElement({rows.begin(), rows.begin() + static_cast<long>(n)},
                           {rows.begin() + static_cast<long>(n), rows.end()});
  }

  bool is_symplectic() const {
    for (int a = 0; a < n_; ++a) {
      for (int b = 0; b < n_; ++b) {
        const auto ia = static_cast<std::size_t>(a);
        const auto ib = static_cast<std::size_t>(b);
        if (!x_images_[ia].commutes_with(x_images_[ib])) return false;
        if (!z_images_[ia].commutes_with(z_images_[ib])) return false;
        if (x_images_[ia].commutes_with(z_images_[ib]) == (a == b)) return false;
      }
    }
    return true;
  }

  /// g(p) = U^dagger p U, from the tableau in O(n * weight).
  PauliString conjugate(const PauliString& p) const {
    if (p.num_qubits() != n_) throw DimensionMismatch("conjugate: qubit count mismatch");
    // p = sign * i^{|x&z|} * prod_q X_q^{x_q} Z_q^{z_q}; map each factor.
    int phase = std::popcount(p.x_mask() & p.z_mask());
    PauliString acc = PauliString::identity(n_);
    for (int q = 0; q < n_; ++q) {
      const std::uint32_t bit = 1u << (n_ - 1 - q);
      if (p.x_mask() & bit) {
        auto prod = multiply(acc, x_images_[static_cast<std::size_t>(q)]);
        acc = prod.pauli;
        phase += prod.phase;
      }
      if (p.z_mask() & bit) {
        auto prod = multiply(acc, z_images_[static_cast<std::size_t>(q)]);
        acc = prod.pauli;
        phase += prod.phase;
      }
    }
    phase &= 3;
    // Hermitian input maps to a Hermitian output, so the residual phase is real.
    if (phase == 2) acc = -acc;
    return p.sign() < 0 ? -acc : acc;
  }

  CliffordElement inverse() const {
    // The preimage Q of a target T has X_k-bit [T anticommutes with g(Z_k)]
    // and Z_k-bit [T anticommutes with g(X_k)]; the sign is fixed afterwards.
    auto preimage = [&](const PauliString& target) {
      std::uint32_t x = 0;
      std::uint32_t z = 0;
      for (int k = 0; k < n_; ++k) {
        const std::uint32_t bit = 1u << (n_ - 1 - k);
        if (!target.commutes_with(z_images_[static_cast<std::size_t>(k)])) x |= bit;
        if (!target.commutes_with(x_images_[static_cast<std::size_t>(k)])) z |= bit;
      }
      PauliString q(n_, x, z, +1);
      return conjugate(q) == target ? q : -q;
    };
    std::vector<PauliString> xs;
    std::vector<PauliString> zs;
    for (int q = 0; q < n_; ++q) {
      xs.push_back(preimage(PauliString::single(n_, q, 'X')));
      zs.push_back(preimage(PauliString::single(n_, q, 'Z')));
    }
    return CliffordElement(std::move(xs), std::move(zs));
  }

  /// g^{-1}(p) = U p U^dagger.
  PauliString inverse_conjugate(const PauliString& p) const { return inverse().conjugate(p); }

  /// Dense unitary U_g, determined up to a global phase, cached per element.
  const DenseOperator& dense_unitary() const {
    std::call_once(cache_->flag, [this] { cache_->unitary = synthesize_unitary(); });
    return cache_->unitary;
  }

  /// U rho U^dagger.
  DenseOperator apply_to(const DenseOperator& rho) const {
    const auto& u = dense_unitary();
    return u * rho * u.adjoint();
  }

  /// Liouville representation omega(g): a signed permutation of the
  /// normalized Pauli basis, column j holding g^{-1}(sigma_j).
  RealMatrix omega() const {
    const auto inv = inverse();
    const auto d2 = static_cast<Eigen::Index>(dim() * dim());
    RealMatrix m = RealMatrix::Zero(d2, d2);
    for (Eigen::Index j = 0; j < d2; ++j) {
      const auto img = inv.conjugate(PauliString::from_index(n_, static_cast<std::size_t>(j)));
      m(static_cast<Eigen::Index>(img.basis_index()), j) = img.sign();
    }
    return m;
  }

  friend bool operator==(const CliffordElement& a, const CliffordElement& b) {
    return a.x_images_ == b.x_images_ && a.z_images_ == b.z_images_;
  }

  /// Canonical text key of the tableau, usable for ordering and hashing.
  std::string key() const {
    std::string k;
    for (const auto& p : tableau_rows()) k += p.str();
    return k;
  }

 private:
  struct DenseCache {
    std::once_flag flag;
    DenseOperator unitary;
  };

  void check_row(const PauliString& p) const {
    if (p.num_qubits() != n_) throw InvalidArgument("CliffordElement: row has wrong qubit count");
  }

  // Column-by-column synthesis of U^dagger: U^dagger|0> is the stabilizer
  // state of {g(Z_q)} and U^dagger|b> = g(X^b) U^dagger|0>.
  DenseOperator synthesize_unitary() const {
    const auto d = static_cast<Eigen::Index>(dim());
    Eigen::VectorXcd psi0;
    for (Eigen::Index k = 0; k < d; ++k) {
      Eigen::VectorXcd v = Eigen::VectorXcd::Unit(d, k);
      for (const auto& s : z_images_) v = 0.5 * (v + apply_pauli(s, v));
      if (v.squaredNorm() > 0.5 / static_cast<double>(d)) {
        psi0 = v.normalized();
        break;
      }
    }
    DenseOperator udag(d, d);
    udag.col(0) = psi0;
    for (Eigen::Index b = 1; b < d; ++b) {
      const auto low = static_cast<int>(std::countr_zero(static_cast<std::uint32_t>(b)));
      const int qubit = n_ - 1 - low;
      udag.col(b) = apply_pauli(x_images_[static_cast<std::size_t>(qubit)],
                                udag.col(b ^ (Eigen::Index{1} << low)));
    }
    return udag.adjoint();
  }

  int n_;
  std::vector<PauliString> x_images_;
  std::vector<PauliString> z_images_;
  std::shared_ptr<DenseCache> cache_;
};

/// g.h with U_{g.h} = U_g U_h.
inline CliffordElement compose(const CliffordElement& g, const CliffordElement& h) {
  if (g.num_qubits() != h.num_qubits()) throw DimensionMismatch("compose: qubit count mismatch");
  std::vector<PauliString> xs;
  std::vector<PauliString> zs;
  for (int q = 0; q < g.num_qubits(); ++q) {
    xs.push_back(h.conjugate(g.x_image(q)));
    zs.push_back(h.conjugate(g.z_image(q)));
  }
  return CliffordElement(std::move(xs), std::move(zs));
}

inline PauliString conjugate_pauli(const CliffordElement& g, const PauliString& p) {
  return g.conjugate(p);
}

/**
 * Uniform draw from the n-qubit Clifford group modulo phase.
 *
 * The symplectic part is built row by row: the image of X_q is uniform over
 * the nonidentity Paulis commuting with all earlier images, the image of Z_q
 * uniform over those that also anticommute with the new X_q image. Every
 * step has a choice count independent of earlier choices, so the result is
 * uniform on Sp(2n, 2); independent uniform signs complete it to the
 * Clifford group.
 */
inline CliffordElement random_clifford(int n, RandomStream& rng) {
  if (n < 1 || n > kMaxQubits) throw InvalidArgument("random_clifford: n must be in [1, 5]");
  const std::uint64_t space = std::uint64_t{1} << (2 * n);
  const std::uint32_t mask = (1u << n) - 1u;
  std::vector<PauliString> xs;
  std::vector<PauliString> zs;
  auto commutes_with_all = [&](const PauliString& p) {
    for (const auto& a : xs) if (!p.commutes_with(a)) return false;
    for (const auto& b : zs) if (!p.commutes_with(b)) return false;
    return true;
  };
  auto draw = [&]() {
    const auto v = rng.below(space);
    return PauliString(n, static_cast<std::uint32_t>(v) & mask,
                       static_cast<std::uint32_t>(v >> n) & mask, +1);
  };
  for (int q = 0; q < n; ++q) {
    PauliString a;
    do {
      a = draw();
    } while (a.is_identity() || !commutes_with_all(a));
    PauliString b;
    do {
      b = draw();
    } while (b.commutes_with(a) || !commutes_with_all(b));
    xs.push_back(a);
    zs.push_back(b);
  }
  for (auto& p : xs) if (rng() & 1u) p = -p;
  for (auto& p : zs) if (rng() & 1u) p = -p;
  return CliffordElement(std::move(xs), std::move(zs));
}

/// The 24 single-qubit Clifford elements (mod phase): closure of {H, S}.
inline std::vector<CliffordElement> enumerate_single_qubit_clifford() {
  const std::vector<CliffordElement> gens = {CliffordElement::hadamard(1, 0),
                                             CliffordElement::phase_s(1, 0)};
  std::vector<CliffordElement> group = {CliffordElement::identity(1)};
  std::map<std::string, std::size_t> seen = {{group.front().key(), 0}};
  for (std::size_t i = 0; i < group.size(); ++i) {
    for (const auto& gen : gens) {
      auto next = compose(group[i], gen);
      if (seen.emplace(next.key(), group.size()).second) group.push_back(std::move(next));
    }
  }
  std::sort(group.begin(), group.end(),
            [](const auto& a, const auto& b) { return a.key() < b.key(); });
  return group;
}

/// tau_ad(g): omega(g) restricted to the traceless subspace.
inline RealMatrix adjoint_rep(const CliffordElement& g) {
  const RealMatrix w = g.omega();
  return w.bottomRightCorner(w.rows() - 1, w.cols() - 1);
}

enum class IrrepLabel { Trivial, Adjoint };

inline const char* to_string(IrrepLabel l) { return l == IrrepLabel::Trivial ? "tr" : "ad"; }

/// Projector onto one irrep of the Clifford Liouville representation.
struct IrrepProjector {
  IrrepLabel label;
  RealMatrix matrix;

  Eigen::Index rank() const { return static_cast<Eigen::Index>(std::lround(matrix.trace())); }
};

/// P_tr = |1>><<1|/d and P_ad = sum over traceless normalized Paulis.
inline std::pair<IrrepProjector, IrrepProjector> irrep_projectors(int n) {
  if (n < 1 || n > kMaxQubits) throw InvalidArgument("irrep_projectors: bad qubit count");
  const auto d2 = Eigen::Index{1} << (2 * n);
  RealMatrix tr = RealMatrix::Zero(d2, d2);
  tr(0, 0) = 1.0;
  RealMatrix ad = RealMatrix::Identity(d2, d2) - tr;
  return {IrrepProjector{IrrepLabel::Trivial, tr}, IrrepProjector{IrrepLabel::Adjoint, ad}};
}

/// tau(g) embedded in the full d^2-dimensional Liouville space: P omega(g) P.
inline RealMatrix irrep_rep(const CliffordElement& g, IrrepLabel label) {
  const auto d2 = static_cast<Eigen::Index>(g.dim() * g.dim());
  if (label == IrrepLabel::Trivial) {
    RealMatrix m = RealMatrix::Zero(d2, d2);
    m(0, 0) = 1.0;
    return m;
  }
  RealMatrix w = g.omega();
  w.row(0).setZero();
  w.col(0).setZero();
  return w;
}

}  // namespace uirs
