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
 * @file pauli.hpp
 * Signed Pauli strings, dense operators, and the Pauli-Liouville
 * (normalized Pauli basis) representation of operators and channels.
 *
 * Basis ordering: a Pauli word maps to a base-4 index with digits
 * I=0, X=1, Y=2, Z=3 and qubit 0 as the most significant digit, so index 0
 * is the identity. Qubit 0 is also the most significant bit of a
 * computational-basis index and the leftmost Kronecker factor.
 */
#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include "uirs/linalg.hpp"

namespace uirs {

/**
 * Hermitian n-qubit Pauli operator sign * P_0 (x) ... (x) P_{n-1}.
 *
 * Stored in the symplectic form sign * i^{|x&z|} X^x Z^z. Bit (n-1-q) of
 * each mask belongs to qubit q, so the X mask acts on computational-basis
 * indices by XOR.
 */
class PauliString {
 public:
  PauliString() = default;

  PauliString(int n, std::uint32_t x, std::uint32_t z, int sign = +1)
      : n_(n), x_(x), z_(z), sign_(sign < 0 ? -1 : +1) {
    if (n < 1 || n > kMaxQubits) {
      throw InvalidArgument("PauliString: qubit count out of range");
    }
    const std::uint32_t mask = (1u << n) - 1u;
    if ((x & ~mask) != 0 || (z & ~mask) != 0) {
      throw InvalidArgument("PauliString: mask has bits beyond qubit count");
    }
  }

  static PauliString identity(int n) { return PauliString(n, 0, 0, +1); }

  /// Parses "[+|-]WORD" with WORD over {I,X,Y,Z}.
  static PauliString parse(std::string_view text) {
    int sign = +1;
    if (!text.empty() && (text.front() == '+' || text.front() == '-')) {
      sign = text.front() == '-' ? -1 : +1;
      text.remove_prefix(1);
    }
    const int n = static_cast<int>(text.size());
    if (n < 1 || n > kMaxQubits) {
      throw InvalidArgument("PauliString::parse: bad word length in '" +
                            std::string(text) + "'");
    }
    std::uint32_t x = 0;
    std::uint32_t z = 0;
    for (int q = 0; q < n; ++q) {
      const std::uint32_t bit = 1u << (n - 1 - q);
      switch (text[static_cast<std::size_t>(q)]) {
        case 'I': break;
        case 'X': x |= bit; break;
        case 'Y': x |= bit; z |= bit; break;
        case 'Z': z |= bit; break;
        default:
          throw InvalidArgument("PauliString::parse: bad symbol in '" +
                                std::string(text) + "'");
      }
    }
    return PauliString(n, x, z, sign);
  }

  /// Single-qubit operator `op` on `qubit`, identity elsewhere.
  static PauliString single(int n, int qubit, char op) {
    if (qubit < 0 || qubit >= n) throw InvalidArgument("PauliString::single: bad qubit");
    std::string word(static_cast<std::size_t>(n), 'I');
    word[static_cast<std::size_t>(qubit)] = op;
    return parse(word);
  }

  static PauliString from_index(int n, std::size_t index, int sign = +1) {
    std::uint32_t x = 0;
    std::uint32_t z = 0;
    for (int q = n - 1; q >= 0; --q) {
      const auto digit = index & 3u;
      index >>= 2;
      const std::uint32_t bit = 1u << (n - 1 - q);
      if (digit == 1 || digit == 2) x |= bit;
      if (digit == 2 || digit == 3) z |= bit;
    }
    if (index != 0) throw InvalidArgument("PauliString::from_index: index too large");
    return PauliString(n, x, z, sign);
  }

  int num_qubits() const { return n_; }
  std::uint32_t x_mask() const { return x_; }
  std::uint32_t z_mask() const { return z_; }
  int sign() const { return sign_; }
  std::size_t dim() const { return std::size_t{1} << n_; }

  char op(int qubit) const {
    const std::uint32_t bit = 1u << (n_ - 1 - qubit);
    const bool xb = (x_ & bit) != 0;
    const bool zb = (z_ & bit) != 0;
    return xb ? (zb ? 'Y' : 'X') : (zb ? 'Z' : 'I');
  }

  std::string word() const {
    std::string w;
    w.reserve(static_cast<std::size_t>(n_));
    for (int q = 0; q < n_; ++q) w.push_back(op(q));
    return w;
  }

  /// Signed text form, e.g. "-XZI".
  std::string str() const { return (sign_ < 0 ? "-" : "+") + word(); }

  std::size_t basis_index() const {
    std::size_t idx = 0;
    for (int q = 0; q < n_; ++q) {
      const char c = op(q);
      idx = idx * 4 + (c == 'I' ? 0 : c == 'X' ? 1 : c == 'Y' ? 2 : 3);
    }
    return idx;
  }

  bool is_identity() const { return x_ == 0 && z_ == 0; }
  int weight() const { return std::popcount(x_ | z_); }

  bool commutes_with(const PauliString& other) const {
    return ((std::popcount(x_ & other.z_) + std::popcount(z_ & other.x_)) & 1) == 0;
  }

  bool same_word(const PauliString& other) const {
    return n_ == other.n_ && x_ == other.x_ && z_ == other.z_;
  }

  PauliString operator-() const { return PauliString(n_, x_, z_, -sign_); }

  friend bool operator==(const PauliString& a, const PauliString& b) {
    return a.same_word(b) && a.sign_ == b.sign_;
  }

  /// Amplitude and target of P|b>: P|b> = amplitude * |b ^ x_mask>.
  cplx amplitude(std::uint32_t b) const {
    int power = std::popcount(x_ & z_) + 2 * std::popcount(z_ & b);
    if (sign_ < 0) power += 2;
    switch (power & 3) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }

 private:
  int n_ = 1;
  std::uint32_t x_ = 0;
  std::uint32_t z_ = 0;
  int sign_ = +1;
};

/// a * b = i^phase * pauli, with `pauli` Hermitian and phase in {0,1,2,3}.
struct PauliProduct {
  PauliString pauli;
  int phase = 0;
};

inline PauliProduct multiply(const PauliString& a, const PauliString& b) {
  if (a.num_qubits() != b.num_qubits()) {
    throw DimensionMismatch("multiply: Pauli strings on different qubit counts");
  }
  const std::uint32_t x = a.x_mask() ^ b.x_mask();
  const std::uint32_t z = a.z_mask() ^ b.z_mask();
  int e = std::popcount(a.x_mask() & a.z_mask()) + std::popcount(b.x_mask() & b.z_mask()) +
          2 * std::popcount(a.z_mask() & b.x_mask()) - std::popcount(x & z);
  if (a.sign() * b.sign() < 0) e += 2;
  e = ((e % 4) + 4) % 4;
  // Fold the real part of the phase into the sign.
  int sign = +1;
  if (e >= 2) {
    sign = -1;
    e -= 2;
  }
  return {PauliString(a.num_qubits(), x, z, sign), e};
}

/// Dense matrix of a signed Pauli string (Kronecker product times sign).
inline DenseOperator pauli_dense(const PauliString& p) {
  const auto d = static_cast<Eigen::Index>(p.dim());
  DenseOperator m = DenseOperator::Zero(d, d);
  for (std::uint32_t b = 0; b < static_cast<std::uint32_t>(d); ++b) {
    m(b ^ p.x_mask(), b) = p.amplitude(b);
  }
  return m;
}

/// out = P * in for a state vector.
inline Eigen::VectorXcd apply_pauli(const PauliString& p, const Eigen::VectorXcd& in) {
  Eigen::VectorXcd out(in.size());
  for (std::uint32_t b = 0; b < static_cast<std::uint32_t>(in.size()); ++b) {
    out(b ^ p.x_mask()) = p.amplitude(b) * in(b);
  }
  return out;
}

/// P * M * P for a Hermitian Pauli P, in O(d^2).
inline DenseOperator conjugate_by_pauli(const PauliString& p, const DenseOperator& m) {
  const auto d = m.rows();
  DenseOperator out(d, d);
  for (std::uint32_t r = 0; r < static_cast<std::uint32_t>(d); ++r) {
    const cplx ar = p.amplitude(r);
    for (std::uint32_t c = 0; c < static_cast<std::uint32_t>(d); ++c) {
      // (P M P)_{r^x, c^x} = a(r) M_{r,c} conj(a(c)) since P is Hermitian.
      out(r ^ p.x_mask(), c ^ p.x_mask()) = ar * m(r, c) * std::conj(p.amplitude(c));
    }
  }
  return out;
}

/// Tr(P * O) in O(d).
inline cplx trace_pauli_product(const PauliString& p, const DenseOperator& o) {
  cplx acc{0.0, 0.0};
  for (std::uint32_t c = 0; c < static_cast<std::uint32_t>(o.rows()); ++c) {
    acc += p.amplitude(c) * o(c, c ^ p.x_mask());
  }
  return acc;
}

/// Hilbert-Schmidt inner product Tr(A^dagger B).
inline cplx hs_inner(const DenseOperator& a, const DenseOperator& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch("hs_inner: operators of different dimension");
  }
  return (a.conjugate().cwiseProduct(b)).sum();
}

/// Coefficients Tr(sigma_i O) in the normalized Pauli basis.
inline LiouvilleVector vectorize(const DenseOperator& o) {
  if (o.rows() != o.cols()) throw InvalidDimension("vectorize: operator is not square");
  const int n = qubits_for_dimension(o.rows());
  const std::size_t d2 = std::size_t{1} << (2 * n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(o.rows()));
  LiouvilleVector v(static_cast<Eigen::Index>(d2));
  for (std::size_t i = 0; i < d2; ++i) {
    v(static_cast<Eigen::Index>(i)) = scale * trace_pauli_product(PauliString::from_index(n, i), o);
  }
  return v;
}

inline DenseOperator devectorize(const LiouvilleVector& v) {
  int n = 0;
  for (int k = 1; k <= kMaxQubits; ++k) {
    if (v.size() == (Eigen::Index{1} << (2 * k))) n = k;
  }
  if (n == 0) throw InvalidDimension("devectorize: length is not 4^n");
  const auto d = Eigen::Index{1} << n;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  DenseOperator o = DenseOperator::Zero(d, d);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v(i) == cplx{}) continue;
    const auto p = PauliString::from_index(n, static_cast<std::size_t>(i));
    for (std::uint32_t b = 0; b < static_cast<std::uint32_t>(d); ++b) {
      o(b ^ p.x_mask(), b) += scale * v(i) * p.amplitude(b);
    }
  }
  return o;
}

/// Liouville vector of an (unnormalized) signed Pauli string: sign*sqrt(d)*e_i.
inline LiouvilleVector pauli_liouville(const PauliString& p) {
  const auto d2 = static_cast<Eigen::Index>(p.dim() * p.dim());
  LiouvilleVector v = LiouvilleVector::Zero(d2);
  v(static_cast<Eigen::Index>(p.basis_index())) =
      static_cast<double>(p.sign()) * std::sqrt(static_cast<double>(p.dim()));
  return v;
}

using OperatorMap = std::function<DenseOperator(const DenseOperator&)>;

/// Transfer matrix with entries Tr(sigma_i apply(sigma_j)).
inline LiouvilleMatrix channel_to_liouville(const OperatorMap& apply, int n) {
  if (n < 1 || n > kMaxQubits) throw InvalidArgument("channel_to_liouville: bad qubit count");
  const auto d2 = Eigen::Index{1} << (2 * n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(Eigen::Index{1} << n));
  LiouvilleMatrix m(d2, d2);
  for (Eigen::Index j = 0; j < d2; ++j) {
    const DenseOperator sigma =
        scale * pauli_dense(PauliString::from_index(n, static_cast<std::size_t>(j)));
    m.col(j) = vectorize(apply(sigma));
  }
  return m;
}

}  // namespace uirs
