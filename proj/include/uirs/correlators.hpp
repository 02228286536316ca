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
 * @file correlators.hpp
 * Sequence correlation functions and their estimators.
 *
 * Post-processing always uses the nominal state and POVM; only the
 * recorded probabilities or shots carry the noise.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

#include "uirs/circuit_sim.hpp"
#include "uirs/clifford.hpp"

namespace uirs {

struct OtocObservables {
  PauliString V;
  PauliString W;

  OtocObservables(PauliString v, PauliString w) : V(std::move(v)), W(std::move(w)) {
    require_nontrivial(V, W, "OtocObservables");
  }

  /// V = Y on the last qubit and W = X on the last-but-one (n >= 2).
  static OtocObservables standard(int n) {
    if (n < 2) throw InvalidArgument("OtocObservables::standard: needs at least two qubits");
    return {PauliString::single(n, n - 1, 'Y'), PauliString::single(n, n - 2, 'X')};
  }

  int num_qubits() const { return V.num_qubits(); }
};

/// Real weights w_x defining the observable sum_x w_x E_x.
struct OutcomeWeights {
  std::vector<double> w;

  /// +1 / -1 by the computational-basis value of `qubit` (qubit 0 leftmost).
  static OutcomeWeights z_on_qubit(int n, int qubit) {
    if (qubit < 0 || qubit >= n) throw InvalidArgument("OutcomeWeights: bad qubit");
    OutcomeWeights out;
    const std::size_t d = std::size_t{1} << n;
    out.w.resize(d);
    for (std::size_t x = 0; x < d; ++x) out.w[x] = ((x >> (n - 1 - qubit)) & 1u) ? -1.0 : 1.0;
    return out;
  }

  bool degenerate() const {
    for (double v : w) {
      if (!std::isfinite(v)) throw InvalidArgument("OutcomeWeights: non-finite weight");
    }
    return std::adjacent_find(w.begin(), w.end(), std::not_equal_to<>()) == w.end();
  }
};

struct Estimate {
  double value = 0.0;
  double stderr = 0.0;
  bool degenerate = false;
};

struct EstimatePoint {
  int m = 1;
  double value = 0.0;
  double stderr = 0.0;
};

struct EstimateSeries {
  std::vector<EstimatePoint> points;
  std::size_t S = 0;
  std::size_t N = 1;
  int r = 1;
  DataMode mode = DataMode::Exact;

  void add(int m, const Estimate& e) {
    if (!points.empty() && m <= points.back().m) {
      throw InvalidArgument("EstimateSeries: m must be strictly increasing");
    }
    points.push_back({m, e.value, e.stderr});
  }
};

/// Outcome weights carried by a record: the exact distribution, or the
/// empirical shot histogram.
inline std::vector<double> record_weights(const ShadowRecord& r, std::size_t num_outcomes,
                                          DataMode mode) {
  if (mode == DataMode::Exact) {
    if (!r.exact_probs) throw InvalidArgument("EXACT mode requires records with probabilities");
    if (r.exact_probs->size() != num_outcomes) {
      throw DimensionMismatch("record probabilities have the wrong length");
    }
    return *r.exact_probs;
  }
  if (r.outcomes.empty()) throw InvalidArgument("SHOTS mode requires at least one outcome");
  std::vector<double> w(num_outcomes, 0.0);
  const double inc = 1.0 / static_cast<double>(r.outcomes.size());
  for (int x : r.outcomes) {
    if (x < 0 || static_cast<std::size_t>(x) >= num_outcomes) {
      throw InvalidArgument("record outcome out of range");
    }
    w[static_cast<std::size_t>(x)] += inc;
  }
  return w;
}

namespace detail {

inline double w_sign(const PauliString& w, const PauliString& p) { return w.commutes_with(p) ? 1.0 : -1.0; }

inline void check_sequence(const std::vector<CliffordElement>& g, int m, int n, const char* who) {
  if (m < 1 || static_cast<int>(g.size()) != m) {
    throw InvalidArgument(std::string(who) + ": gate sequence length differs from m");
  }
  for (const auto& e : g) {
    if (e.num_qubits() != n) throw DimensionMismatch(std::string(who) + ": gate qubit count");
  }
}

// Tr(W P1 W P2) for signed Pauli strings.
inline double middle_factor(const PauliString& w, const PauliString& p1, const PauliString& p2) {
  if (!p1.same_word(p2)) return 0.0;
  return static_cast<double>(p1.dim()) * p1.sign() * p2.sign() * w_sign(w, p1);
}

inline double sorted_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return std::accumulate(v.begin(), v.end(), 0.0);
}

inline double jackknife_stderr(const std::vector<double>& loo) {
  const auto s = static_cast<double>(loo.size());
  if (loo.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double mean = std::accumulate(loo.begin(), loo.end(), 0.0) / s;
  double ss = 0.0;
  for (double v : loo) ss += (v - mean) * (v - mean);
  return std::sqrt((s - 1.0) / s * ss);
}

inline Estimate mean_and_stderr(const std::vector<double>& v) {
  Estimate e;
  const auto s = static_cast<double>(v.size());
  e.value = std::accumulate(v.begin(), v.end(), 0.0) / s;
  if (v.size() < 2) return e;
  double ss = 0.0;
  for (double x : v) ss += (x - e.value) * (x - e.value);
  e.stderr = std::sqrt(ss / (s - 1.0) / s);
  return e;
}

}  // namespace detail

/**
 * Fast OTOC correlation function for one outcome pair and two sequences.
 *
 * m = 1: (Tr(E_x g1(rho)) - Tr E_x/d) (Tr(E_y g2(rho)) - Tr E_y/d).
 * m >= 2: D prod_{i=2}^{m-1} Tr(W g1_i(V) W g2_i(V))
 *         (Tr(W g1_m(E_x) W g2_m(E_y)) - Tr E_x Tr E_y/d) Tr(g1_1(V) rho) Tr(g2_1(V) rho)
 * with D = (d^2 - 1)^{2(m-1)} and g(O) = U_g^dagger O U_g.
 */
inline double f_otoc_fast(int x, int y, const std::vector<CliffordElement>& g1,
                          const std::vector<CliffordElement>& g2, int m, const OtocObservables& obs,
                          const DenseOperator& rho, const std::vector<DenseOperator>& povm) {
  const int n = obs.num_qubits();
  detail::check_sequence(g1, m, n, "f_otoc_fast");
  detail::check_sequence(g2, m, n, "f_otoc_fast");
  const double d = static_cast<double>(std::size_t{1} << n);
  const auto& ex = povm.at(static_cast<std::size_t>(x));
  const auto& ey = povm.at(static_cast<std::size_t>(y));
  const double tx = ex.trace().real();
  const double ty = ey.trace().real();
  if (m == 1) {
    const auto& u1 = g1[0].dense_unitary();
    const auto& u2 = g2[0].dense_unitary();
    const double a = trace_product_real(ex, u1 * rho * u1.adjoint()) - tx / d;
    const double b = trace_product_real(ey, u2 * rho * u2.adjoint()) - ty / d;
    return a * b;
  }
  const double v1 = trace_pauli_product(g1[0].conjugate(obs.V), rho).real();
  const double v2 = trace_pauli_product(g2[0].conjugate(obs.V), rho).real();
  if (v1 == 0.0 || v2 == 0.0) return 0.0;
  double mid = std::pow(d * d - 1.0, 2.0 * (m - 1));
  for (int i = 1; i + 1 < m; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    mid *= detail::middle_factor(obs.W, g1[iu].conjugate(obs.V), g2[iu].conjugate(obs.V));
    if (mid == 0.0) return 0.0;
  }
  const auto& um1 = g1.back().dense_unitary();
  const auto& um2 = g2.back().dense_unitary();
  const DenseOperator a = um1.adjoint() * ex * um1;
  const DenseOperator b = um2.adjoint() * ey * um2;
  const double last = trace_product_real(conjugate_by_pauli(obs.W, a), b) - tx * ty / d;
  return mid * last * v1 * v2;
}

/// tau(g) = P omega(g) P on the full Liouville space, as a complex matrix.
inline LiouvilleMatrix tau_embedded(const CliffordElement& g, IrrepLabel label) {
  return irrep_rep(g, label).cast<cplx>();
}

inline LiouvilleMatrix pair_projector(int n, IrrepLabel l1, IrrepLabel l2) {
  const auto [ptr, pad] = irrep_projectors(n);
  const RealMatrix& p1 = l1 == IrrepLabel::Trivial ? ptr.matrix : pad.matrix;
  const RealMatrix& p2 = l2 == IrrepLabel::Trivial ? ptr.matrix : pad.matrix;
  return kron(p1, p2).cast<cplx>();
}

/// A = (d^2-1)^2 sum_{sigma traceless} Tr(W sigma W sigma) |sigma sigma>><<V V|
/// on the two-copy Liouville space, sigma normalized, V unnormalized.
inline LiouvilleMatrix otoc_A_operator(const OtocObservables& obs) {
  const int n = obs.num_qubits();
  const auto d = Eigen::Index{1} << n;
  const auto d2 = d * d;
  const double scale = std::pow(static_cast<double>(d2 - 1), 2.0);
  LiouvilleMatrix a = LiouvilleMatrix::Zero(d2 * d2, d2 * d2);
  const auto vi = static_cast<Eigen::Index>(obs.V.basis_index());
  const Eigen::Index col = vi * d2 + vi;
  // <<V V| = d e_V^T (x) e_V^T since V carries sign^2 = 1.
  for (Eigen::Index s = 1; s < d2; ++s) {
    const auto sigma = PauliString::from_index(n, static_cast<std::size_t>(s));
    a(s * d2 + s, col) = scale * detail::w_sign(obs.W, sigma) * static_cast<double>(d);
  }
  return a;
}

/// B_xy = |rho>><<E_x| (x) |rho>><<E_y|.
inline LiouvilleMatrix otoc_B_operator(int x, int y, const DenseOperator& rho,
                                       const std::vector<DenseOperator>& povm) {
  const LiouvilleVector r = vectorize(rho);
  const LiouvilleVector ex = vectorize(povm.at(static_cast<std::size_t>(x)));
  const LiouvilleVector ey = vectorize(povm.at(static_cast<std::size_t>(y)));
  return kron(LiouvilleMatrix(r * ex.adjoint()), LiouvilleMatrix(r * ey.adjoint()));
}

/**
 * Literal trace Tr(B [tau1(g1_m) (x) tau2(g2_m)] A ... A [tau1(g1_1) (x) tau2(g2_1)]).
 * Throws PreconditionError unless A = P A P for P = P_l1 (x) P_l2.
 */
inline cplx f_general_trace(const std::vector<CliffordElement>& g1,
                            const std::vector<CliffordElement>& g2, int m, const LiouvilleMatrix& A,
                            const LiouvilleMatrix& B, IrrepLabel l1 = IrrepLabel::Adjoint,
                            IrrepLabel l2 = IrrepLabel::Adjoint, double tol = 1e-10) {
  if (g1.empty()) throw InvalidArgument("f_general_trace: empty sequence");
  const int n = g1.front().num_qubits();
  detail::check_sequence(g1, m, n, "f_general_trace");
  detail::check_sequence(g2, m, n, "f_general_trace");
  const auto d4 = Eigen::Index{1} << (4 * n);
  if (A.rows() != d4 || A.cols() != d4 || B.rows() != d4 || B.cols() != d4) {
    throw DimensionMismatch("f_general_trace: A and B must be d^4 x d^4");
  }
  const LiouvilleMatrix p = pair_projector(n, l1, l2);
  if ((A - p * A * p).cwiseAbs().maxCoeff() > tol) {
    throw PreconditionError("f_general_trace: A is not supported on the chosen irrep block");
  }
  LiouvilleMatrix acc = kron(tau_embedded(g1[0], l1), tau_embedded(g2[0], l2));
  for (int i = 1; i < m; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    acc = kron(tau_embedded(g1[iu], l1), tau_embedded(g2[iu], l2)) * (A * acc);
  }
  return (B * acc).trace();
}

using PairKernel = std::function<double(int x, int y, const ShadowRecord& a, const ShadowRecord& b)>;

/// Fast OTOC kernel bound to observables and the nominal state / POVM.
inline PairKernel otoc_kernel(const OtocObservables& obs, int m, DenseOperator rho,
                              std::vector<DenseOperator> povm) {
  return [obs, m, rho = std::move(rho), povm = std::move(povm)](int x, int y, const ShadowRecord& a,
                                                                 const ShadowRecord& b) {
    return f_otoc_fast(x, y, a.gates, b.gates, m, obs, rho, povm);
  };
}

/**
 * Two-sample U-statistic (1/(S(S-1))) sum_{a != b} f over ordered record
 * pairs, each pair integrated against both records' outcome weights, with a
 * leave-one-record-out jackknife standard error. O(S^2 d^2) kernel calls;
 * the OTOC path below is the factorized equivalent.
 */
inline Estimate khat_independent(const std::vector<ShadowRecord>& records, int m,
                                 const PairKernel& f, std::size_t num_outcomes, DataMode mode) {
  const std::size_t S = records.size();
  if (S < 2) throw InvalidArgument("khat_independent: needs at least two records");
  std::vector<std::vector<double>> w;
  for (const auto& r : records) {
    if (static_cast<int>(r.gates.size()) != m) throw InvalidArgument("khat_independent: record length differs from m");
    w.push_back(record_weights(r, num_outcomes, mode));
  }
  RealMatrix fab = RealMatrix::Zero(static_cast<Eigen::Index>(S), static_cast<Eigen::Index>(S));
  for (std::size_t a = 0; a < S; ++a) {
    for (std::size_t b = 0; b < S; ++b) {
      if (a == b) continue;
      double v = 0.0;
      for (std::size_t x = 0; x < num_outcomes; ++x) {
        if (w[a][x] == 0.0) continue;
        for (std::size_t y = 0; y < num_outcomes; ++y) {
          if (w[b][y] == 0.0) continue;
          v += w[a][x] * w[b][y] * f(static_cast<int>(x), static_cast<int>(y), records[a], records[b]);
        }
      }
      fab(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v;
    }
  }
  // Sums over sorted values, so relabeling the records changes nothing.
  std::vector<double> row(S);
  std::vector<double> col(S);
  std::vector<double> all;
  all.reserve(S * (S - 1));
  for (std::size_t a = 0; a < S; ++a) {
    std::vector<double> r;
    std::vector<double> c;
    for (std::size_t b = 0; b < S; ++b) {
      if (a == b) continue;
      r.push_back(fab(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
      c.push_back(fab(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)));
    }
    row[a] = detail::sorted_sum(r);
    col[a] = detail::sorted_sum(c);
    all.insert(all.end(), r.begin(), r.end());
  }
  const double total = detail::sorted_sum(all);
  const double s = static_cast<double>(S);
  Estimate e;
  e.value = total / (s * (s - 1.0));
  if (S < 3) {
    e.stderr = std::numeric_limits<double>::quiet_NaN();
    return e;
  }
  std::vector<double> loo(S);
  for (std::size_t a = 0; a < S; ++a) loo[a] = (total - row[a] - col[a]) / ((s - 1.0) * (s - 2.0));
  e.stderr = detail::jackknife_stderr(loo);
  return e;
}

/**
 * Per-record data sufficient for the factorized OTOC U-statistic.
 *
 * m = 1: c = sum_x w_x (Tr(E_x g(rho)) - Tr E_x/d).
 * m >= 2: u = Tr(g_1(V) rho) prod_i sign(g_i(V)), the middle words g_i(V),
 * A = U_m^dagger (sum_x w_x E_x) U_m and t = sum_x w_x Tr E_x. Records with
 * u = 0 do not contribute to any pair.
 */
struct OtocSummary {
  double c = 0.0;
  double u = 0.0;
  double t = 0.0;
  std::vector<std::uint32_t> words;
  DenseOperator A;
};

inline OtocSummary summarize_otoc(const ShadowRecord& rec, int m, const OtocObservables& obs,
                                  const DenseOperator& rho, const std::vector<DenseOperator>& povm,
                                  DataMode mode) {
  const int n = obs.num_qubits();
  detail::check_sequence(rec.gates, m, n, "summarize_otoc");
  const auto w = record_weights(rec, povm.size(), mode);
  const double d = static_cast<double>(std::size_t{1} << n);
  OtocSummary s;
  if (m == 1) {
    const auto& u = rec.gates[0].dense_unitary();
    const DenseOperator state = u * rho * u.adjoint();
    for (std::size_t x = 0; x < w.size(); ++x) {
      if (w[x] == 0.0) continue;
      s.c += w[x] * (trace_product_real(povm[x], state) - povm[x].trace().real() / d);
    }
    return s;
  }
  s.u = trace_pauli_product(rec.gates[0].conjugate(obs.V), rho).real();
  if (s.u == 0.0) return s;
  for (int i = 1; i + 1 < m; ++i) {
    const auto p = rec.gates[static_cast<std::size_t>(i)].conjugate(obs.V);
    s.u *= p.sign();
    s.words.push_back(static_cast<std::uint32_t>(p.basis_index()));
  }
  const auto dim = static_cast<Eigen::Index>(povm.front().rows());
  DenseOperator e = DenseOperator::Zero(dim, dim);
  for (std::size_t x = 0; x < w.size(); ++x) {
    if (w[x] == 0.0) continue;
    e += w[x] * povm[x];
    s.t += w[x] * povm[x].trace().real();
  }
  const auto& um = rec.gates.back().dense_unitary();
  s.A = um.adjoint() * e * um;
  return s;
}

/// Factorized OTOC U-statistic with jackknife standard error; identical in
/// value to khat_independent with the fast kernel.
inline Estimate khat_otoc_from_summaries(const std::vector<OtocSummary>& sums, int m,
                                         const OtocObservables& obs) {
  const std::size_t S = sums.size();
  if (S < 2) throw InvalidArgument("khat_otoc: needs at least two records");
  const double s = static_cast<double>(S);
  std::vector<double> row(S, 0.0);
  double total = 0.0;
  if (m == 1) {
    double sc = 0.0;
    double sc2 = 0.0;
    for (const auto& r : sums) {
      sc += r.c;
      sc2 += r.c * r.c;
    }
    total = sc * sc - sc2;
    for (std::size_t a = 0; a < S; ++a) row[a] = sums[a].c * (sc - sums[a].c);
  } else {
    const int n = obs.num_qubits();
    const double d = static_cast<double>(std::size_t{1} << n);
    struct Group {
      DenseOperator M;
      double sut = 0.0;
      double su2t2 = 0.0;
      double su2q = 0.0;
      std::vector<std::size_t> members;
    };
    std::map<std::vector<std::uint32_t>, Group> groups;
    std::vector<double> q(S, 0.0);
    for (std::size_t a = 0; a < S; ++a) {
      const auto& r = sums[a];
      if (r.u == 0.0) continue;
      auto& g = groups[r.words];
      if (g.members.empty()) g.M = DenseOperator::Zero(r.A.rows(), r.A.cols());
      g.M += r.u * r.A;
      g.sut += r.u * r.t;
      g.su2t2 += r.u * r.u * r.t * r.t;
      q[a] = trace_product_real(conjugate_by_pauli(obs.W, r.A), r.A);
      g.su2q += r.u * r.u * q[a];
      g.members.push_back(a);
    }
    const double D = std::pow(d * d - 1.0, 2.0 * (m - 1));
    for (auto& [words, g] : groups) {
      double c = D * std::pow(d, m - 2);
      for (auto idx : words) c *= detail::w_sign(obs.W, PauliString::from_index(n, idx));
      const DenseOperator wmw = conjugate_by_pauli(obs.W, g.M);
      total += c * (trace_product_real(wmw, g.M) - g.su2q - (g.sut * g.sut - g.su2t2) / d);
      for (auto a : g.members) {
        const auto& r = sums[a];
        row[a] = c * r.u *
                 (trace_product_real(r.A, wmw) - r.u * q[a] - r.t * (g.sut - r.u * r.t) / d);
      }
    }
  }
  Estimate e;
  e.value = total / (s * (s - 1.0));
  if (S < 3) {
    e.stderr = std::numeric_limits<double>::quiet_NaN();
    return e;
  }
  std::vector<double> loo(S);
  for (std::size_t a = 0; a < S; ++a) loo[a] = (total - 2.0 * row[a]) / ((s - 1.0) * (s - 2.0));
  e.stderr = detail::jackknife_stderr(loo);
  return e;
}

inline Estimate khat_otoc(const std::vector<ShadowRecord>& records, int m, const OtocObservables& obs,
                          const DenseOperator& rho, const std::vector<DenseOperator>& povm,
                          DataMode mode) {
  std::vector<OtocSummary> sums;
  sums.reserve(records.size());
  for (const auto& r : records) sums.push_back(summarize_otoc(r, m, obs, rho, povm, mode));
  return khat_otoc_from_summaries(sums, m, obs);
}

struct RatioEstimate {
  double xbar = 0.0;
  double stderr = 0.0;
  std::vector<double> batches;
};

/// x-bar and stderr from per-batch (k(1), k(2)) estimates; x_i = k2 / (d k1).
inline RatioEstimate otoc_ratio_from_batches(const std::vector<std::pair<double, double>>& k12, int n) {
  if (k12.empty()) throw InvalidArgument("otoc_ratio: no batches");
  const double d = static_cast<double>(std::size_t{1} << n);
  RatioEstimate out;
  for (std::size_t i = 0; i < k12.size(); ++i) {
    if (std::abs(k12[i].first) < 1e-14) {
      throw DegenerateDenominator("otoc_ratio: k(1) vanishes in batch " + std::to_string(i));
    }
    out.batches.push_back(k12[i].second / (d * k12[i].first));
  }
  const auto e = detail::mean_and_stderr(out.batches);
  out.xbar = e.value;
  out.stderr = e.stderr;
  return out;
}

/// Splits both record sets into N contiguous batches and averages the
/// per-batch ratios k(2) / (d k(1)).
inline RatioEstimate otoc_ratio_estimate(const std::vector<ShadowRecord>& records_m1,
                                         const std::vector<ShadowRecord>& records_m2, std::size_t N,
                                         const OtocObservables& obs, const DenseOperator& rho,
                                         const std::vector<DenseOperator>& povm, DataMode mode) {
  if (records_m1.empty() || records_m2.empty()) throw InvalidArgument("otoc_ratio: empty record set");
  if (N < 1) throw InvalidArgument("otoc_ratio: N must be at least 1");
  auto slice = [N](const std::vector<ShadowRecord>& all, std::size_t b) {
    const std::size_t lo = b * all.size() / N;
    const std::size_t hi = (b + 1) * all.size() / N;
    return std::vector<ShadowRecord>(all.begin() + static_cast<long>(lo), all.begin() + static_cast<long>(hi));
  };
  std::vector<std::pair<double, double>> k12;
  for (std::size_t b = 0; b < N; ++b) {
    const double k1 = khat_otoc(slice(records_m1, b), 1, obs, rho, povm, mode).value;
    const double k2 = khat_otoc(slice(records_m2, b), 2, obs, rho, povm, mode).value;
    k12.emplace_back(k1, k2);
  }
  return otoc_ratio_from_batches(k12, obs.num_qubits());
}

/// Per-sequence unbiased square of the weighted expectation, averaged
/// over sequences.
inline Estimate khat_identical_unitarity(const std::vector<ShadowRecord>& records, int m,
                                         const OutcomeWeights& weights, DataMode mode) {
  if (records.empty()) throw InvalidArgument("khat_identical_unitarity: no records");
  std::vector<double> vals;
  vals.reserve(records.size());
  for (const auto& r : records) {
    if (static_cast<int>(r.gates.size()) != m) throw InvalidArgument("khat_identical_unitarity: record length differs from m");
    if (mode == DataMode::Exact) {
      const auto& p = r.exact_probs ? *r.exact_probs : throw InvalidArgument("EXACT mode requires probabilities");
      if (p.size() != weights.w.size()) throw DimensionMismatch("khat_identical_unitarity: weight length");
      double e = 0.0;
      for (std::size_t x = 0; x < p.size(); ++x) e += weights.w[x] * p[x];
      vals.push_back(e * e);
    } else {
      const auto rr = r.outcomes.size();
      if (rr < 2) throw InvalidArgument("khat_identical_unitarity: SHOTS mode needs r >= 2");
      double s1 = 0.0;
      double s2 = 0.0;
      for (int x : r.outcomes) {
        const double wx = weights.w.at(static_cast<std::size_t>(x));
        s1 += wx;
        s2 += wx * wx;
      }
      vals.push_back((s1 * s1 - s2) / (static_cast<double>(rr) * static_cast<double>(rr - 1)));
    }
  }
  auto e = detail::mean_and_stderr(vals);
  e.degenerate = weights.degenerate();
  return e;
}

using LinearKernel = std::function<double(int x, const ShadowRecord& rec)>;

/// First-order estimator (1/S) sum_i f(x_i, g_i, m).
inline Estimate khat_linear(const std::vector<ShadowRecord>& records, int m, const LinearKernel& f,
                            std::size_t num_outcomes, DataMode mode) {
  if (records.empty()) throw InvalidArgument("khat_linear: no records");
  std::vector<double> vals;
  for (const auto& r : records) {
    if (static_cast<int>(r.gates.size()) != m) throw InvalidArgument("khat_linear: record length differs from m");
    const auto w = record_weights(r, num_outcomes, mode);
    double v = 0.0;
    for (std::size_t x = 0; x < w.size(); ++x) {
      if (w[x] != 0.0) v += w[x] * f(static_cast<int>(x), r);
    }
    vals.push_back(v);
  }
  return detail::mean_and_stderr(vals);
}

/// f_A(x, g, m) = <<E_x| tau(g_m) A ... A tau(g_1) |rho>> on one Liouville copy.
inline LinearKernel linear_trace_kernel(LiouvilleMatrix A, DenseOperator rho,
                                        std::vector<DenseOperator> povm,
                                        IrrepLabel label = IrrepLabel::Adjoint) {
  return [A = std::move(A), r = vectorize(rho), povm = std::move(povm), label](int x, const ShadowRecord& rec) {
    LiouvilleVector v = tau_embedded(rec.gates[0], label) * r;
    for (std::size_t i = 1; i < rec.gates.size(); ++i) v = tau_embedded(rec.gates[i], label) * (A * v);
    return vectorize(povm.at(static_cast<std::size_t>(x))).dot(v).real();
  };
}

/**
 * Statistical-correlation baseline: (d+1) times the mean over random global
 * Cliffords g of <W(t)> <V W(t) V> on the noisy state g(rho). For a 2-design
 * the mean equals Tr(W(t) V W(t) V) / (d (d+1)) when Tr W = 0, so the
 * estimator is unbiased without SPAM noise. W(t) = U_t^dagger W U_t.
 */
inline Estimate baseline_statistical_otoc(const DenseOperator& u_t, const OtocObservables& obs,
                                          const NoiseModel& noise, std::size_t S, std::uint64_t seed,
                                          const DenseOperator* rho_in = nullptr) {
  if (S < 2) throw InvalidArgument("baseline_statistical_otoc: S must be at least 2");
  const int n = obs.num_qubits();
  const double d = static_cast<double>(std::size_t{1} << n);
  const DenseOperator rho0 = rho_in ? *rho_in : zero_state(n);
  const DenseOperator prepared = noise.spam_prep.apply(rho0);
  const DenseOperator wdense = pauli_dense(obs.W);
  std::vector<double> vals(S);
  for (std::size_t s = 0; s < S; ++s) {
    auto rng = RandomStream::derive(seed, "baseline", s);
    const auto g = random_clifford(n, rng);
    const DenseOperator state = noise.left.apply(g.apply_to(noise.right.apply(prepared)));
    const DenseOperator s1 = noise.spam_meas.apply(u_t * state * u_t.adjoint());
    const DenseOperator kicked = conjugate_by_pauli(obs.V, state);
    const DenseOperator s2 = noise.spam_meas.apply(u_t * kicked * u_t.adjoint());
    vals[s] = (d + 1.0) * trace_product_real(wdense, s1) * trace_product_real(wdense, s2);
  }
  return detail::mean_and_stderr(vals);
}

}  // namespace uirs
