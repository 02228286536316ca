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

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <string>

#include "uirs/errors.hpp"

namespace uirs {

using cplx = std::complex<double>;

/// d x d complex matrix acting on the n-qubit Hilbert space.
using DenseOperator = Eigen::MatrixXcd;
/// Operator coefficients in the normalized Pauli basis (length d^2).
using LiouvilleVector = Eigen::VectorXcd;
/// Superoperator in the normalized Pauli basis (d^2 x d^2).
using LiouvilleMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr int kMaxQubits = 5;
inline constexpr double kDefaultTolerance = 1e-10;

/// Number of qubits for a Hilbert-space dimension; throws unless `dim` is a
/// power of two in [2, 2^kMaxQubits].
inline int qubits_for_dimension(Eigen::Index dim) {
  for (int n = 1; n <= kMaxQubits; ++n) {
    if (dim == (Eigen::Index{1} << n)) return n;
  }
  throw InvalidDimension("dimension " + std::to_string(dim) +
                         " is not a power of two in [2, 32]");
}

template <class A, class B>
auto kron(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  using Scalar = typename A::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(),
                                                             a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch("max_abs_diff: shape mismatch");
  }
  return (a - b).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const DenseOperator& m, double tol = kDefaultTolerance) {
  return m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

inline bool is_unitary(const DenseOperator& m, double tol = kDefaultTolerance) {
  if (m.rows() != m.cols()) return false;
  return (m.adjoint() * m - DenseOperator::Identity(m.rows(), m.cols()))
             .cwiseAbs()
             .maxCoeff() <= tol;
}

/// Real-valued Tr(a b) for Hermitian a, b, computed in O(d^2).
inline double trace_product_real(const DenseOperator& a, const DenseOperator& b) {
  return (a.transpose().cwiseProduct(b)).sum().real();
}

}  // namespace uirs
