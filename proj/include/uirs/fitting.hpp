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
 * @file fitting.hpp
 * Weighted Gauss-Newton fits of a p^{m-1} and a + b u^{m-1}.
 */
#pragma once

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "uirs/correlators.hpp"

namespace uirs {

struct FitPoint {
  int m = 1;
  double value = 0.0;
  double stderr = 0.0;  // <= 0 means unweighted
};

struct FitResult {
  std::vector<std::string> names;
  RealVector values;
  RealMatrix covariance;
  double residual = 0.0;  // RMS of value - model
  bool identifiable = true;
  int iterations = 0;

  double get(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return values(static_cast<Eigen::Index>(i));
    }
    throw InvalidArgument("FitResult: no parameter named " + name);
  }
};

inline std::vector<FitPoint> to_fit_points(const EstimateSeries& s) {
  std::vector<FitPoint> out;
  for (const auto& p : s.points) out.push_back({p.m, p.value, p.stderr});
  return out;
}

namespace detail {

using Model = std::function<double(const RealVector& x, int m)>;
using Gradient = std::function<RealVector(const RealVector& x, int m)>;

struct SolveResult {
  RealVector x;
  RealMatrix jtwj;
  int iterations = 0;
};

inline double weighted_cost(const Model& f, const RealVector& x, const std::vector<FitPoint>& pts,
                            const std::vector<double>& w) {
  double c = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double r = pts[i].value - f(x, pts[i].m);
    c += w[i] * r * r;
  }
  return c;
}

/// Gauss-Newton with step halving. Converged when the gradient norm drops
/// below tol, the step stalls at machine precision, or no halving of the
/// step decreases the cost.
inline SolveResult gauss_newton(const Model& f, const Gradient& grad, RealVector x,
                                const std::vector<FitPoint>& pts, const std::vector<double>& w,
                                int max_iter = 200, double tol = 1e-12) {
  const auto k = x.size();
  const auto npts = static_cast<Eigen::Index>(pts.size());
  SolveResult out;
  double cost = weighted_cost(f, x, pts, w);
  for (int it = 1; it <= max_iter; ++it) {
    out.iterations = it;
    RealMatrix j(npts, k);
    RealVector r(npts);
    for (Eigen::Index i = 0; i < npts; ++i) {
      const double sw = std::sqrt(w[static_cast<std::size_t>(i)]);
      const auto& p = pts[static_cast<std::size_t>(i)];
      j.row(i) = sw * grad(x, p.m).transpose();
      r(i) = sw * (p.value - f(x, p.m));
    }
    const RealVector g = j.transpose() * r;
    if (g.norm() <= tol * (1.0 + cost)) {
      out.x = x;
      out.jtwj = j.transpose() * j;
      return out;
    }
    const RealVector step = j.colPivHouseholderQr().solve(r);
    double t = 1.0;
    bool accepted = false;
    double moved = 0.0;
    for (int h = 0; h < 60; ++h, t *= 0.5) {
      const RealVector trial = x + t * step;
      const double c = weighted_cost(f, trial, pts, w);
      if (std::isfinite(c) && c < cost) {
        x = trial;
        cost = c;
        moved = t * step.norm();
        accepted = true;
        break;
      }
    }
    if (!accepted || moved <= 1e-15 * (1.0 + x.norm())) {
      out.x = x;
      out.jtwj = j.transpose() * j;
      return out;
    }
  }
  std::ostringstream msg;
  msg << "fit did not converge in " << max_iter << " iterations; last params " << x.transpose()
      << ", weighted cost " << cost;
  throw FitError(msg.str());
}

inline std::vector<double> fit_weights(const std::vector<FitPoint>& pts) {
  const bool weighted = std::all_of(pts.begin(), pts.end(), [](const FitPoint& p) { return p.stderr > 0.0; });
  std::vector<double> w;
  for (const auto& p : pts) w.push_back(weighted ? 1.0 / (p.stderr * p.stderr) : 1.0);
  return w;
}

inline std::size_t distinct_m(const std::vector<FitPoint>& pts) {
  std::set<int> ms;
  for (const auto& p : pts) ms.insert(p.m);
  return ms.size();
}

inline RealMatrix covariance_from(const RealMatrix& jtwj, const std::vector<FitPoint>& pts, double cost) {
  const bool weighted = std::all_of(pts.begin(), pts.end(), [](const FitPoint& p) { return p.stderr > 0.0; });
  RealMatrix cov = jtwj.completeOrthogonalDecomposition().pseudoInverse();
  const auto dof = static_cast<double>(pts.size()) - static_cast<double>(jtwj.rows());
  if (!weighted && dof > 0.0) cov *= cost / dof;
  return cov;
}

inline double rms_residual(const Model& f, const RealVector& x, const std::vector<FitPoint>& pts) {
  double s = 0.0;
  for (const auto& p : pts) {
    const double r = p.value - f(x, p.m);
    s += r * r;
  }
  return std::sqrt(s / static_cast<double>(pts.size()));
}

inline std::vector<FitPoint> sorted_by_m(std::vector<FitPoint> pts) {
  std::sort(pts.begin(), pts.end(), [](const FitPoint& a, const FitPoint& b) { return a.m < b.m; });
  return pts;
}

}  // namespace detail

/// value(m) = a p^{m-1}; negative p is allowed.
inline FitResult fit_decay(const std::vector<FitPoint>& points) {
  if (detail::distinct_m(points) < 2) throw FitError("fit_decay: needs at least two distinct m");
  const auto pts = detail::sorted_by_m(points);
  double psum = 0.0;
  int pcount = 0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const int dm = pts[i + 1].m - pts[i].m;
    if (dm == 0 || pts[i].value == 0.0) continue;
    const double ratio = pts[i + 1].value / pts[i].value;
    psum += std::copysign(std::pow(std::abs(ratio), 1.0 / dm), ratio);
    ++pcount;
  }
  double p0 = pcount > 0 ? psum / pcount : 1.0;
  if (p0 == 0.0) p0 = 1e-3;
  const double a0 = pts.front().value / std::pow(p0, pts.front().m - 1);
  detail::Model f = [](const RealVector& x, int m) { return x(0) * std::pow(x(1), m - 1); };
  detail::Gradient g = [](const RealVector& x, int m) {
    RealVector d(2);
    d(0) = std::pow(x(1), m - 1);
    d(1) = m >= 2 ? x(0) * (m - 1) * std::pow(x(1), m - 2) : 0.0;
    return d;
  };
  const auto w = detail::fit_weights(pts);
  RealVector x0(2);
  x0 << a0, p0;
  const auto sol = detail::gauss_newton(f, g, x0, pts, w);
  FitResult res;
  res.names = {"a", "p"};
  res.values = sol.x;
  res.iterations = sol.iterations;
  res.covariance = detail::covariance_from(sol.jtwj, pts, detail::weighted_cost(f, sol.x, pts, w));
  res.residual = detail::rms_residual(f, sol.x, pts);
  return res;
}

/// value(m) = a + b u^{m-1} with u = tanh(s) kept inside (-1, 1).
inline FitResult fit_offset_decay(const std::vector<FitPoint>& points) {
  if (detail::distinct_m(points) < 3) throw FitError("fit_offset_decay: needs at least three distinct m");
  const auto pts = detail::sorted_by_m(points);
  FitResult res;
  res.names = {"a", "b", "u"};
  double mean = 0.0;
  double scale = 0.0;
  for (const auto& p : pts) {
    mean += p.value;
    scale = std::max(scale, std::abs(p.value));
  }
  mean /= static_cast<double>(pts.size());
  const bool constant = std::all_of(pts.begin(), pts.end(), [&](const FitPoint& p) {
    return std::abs(p.value - pts.front().value) <= 1e-14 * std::max(1.0, scale);
  });
  if (constant) {
    res.values = RealVector(3);
    res.values << mean, 0.0, 1.0;
    res.identifiable = false;
    res.covariance = RealMatrix::Zero(3, 3);
    res.residual = 0.0;
    return res;
  }
  double usum = 0.0;
  int ucount = 0;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    const double d0 = pts[i].value - pts[i - 1].value;
    const double d1 = pts[i + 1].value - pts[i].value;
    const int dm0 = pts[i].m - pts[i - 1].m;
    const int dm1 = pts[i + 1].m - pts[i].m;
    if (d0 == 0.0 || dm0 != dm1) continue;
    const double ratio = d1 / d0;
    usum += std::copysign(std::pow(std::abs(ratio), 1.0 / dm0), ratio);
    ++ucount;
  }
  const double u0 = std::clamp(ucount > 0 ? usum / ucount : 0.5, -0.99, 0.99);
  // a and b enter linearly, so solve for them at u0.
  RealMatrix basis(static_cast<Eigen::Index>(pts.size()), 2);
  RealVector y(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    basis(static_cast<Eigen::Index>(i), 0) = 1.0;
    basis(static_cast<Eigen::Index>(i), 1) = std::pow(u0, pts[i].m - 1);
    y(static_cast<Eigen::Index>(i)) = pts[i].value;
  }
  RealVector ab = basis.colPivHouseholderQr().solve(y);
  if (!ab.allFinite()) {
    ab(0) = pts.back().value;
    ab(1) = pts.front().value - pts.back().value;
  }
  detail::Model f = [](const RealVector& x, int m) { return x(0) + x(1) * std::pow(std::tanh(x(2)), m - 1); };
  detail::Gradient g = [](const RealVector& x, int m) {
    const double u = std::tanh(x(2));
    RealVector d(3);
    d(0) = 1.0;
    d(1) = std::pow(u, m - 1);
    d(2) = m >= 2 ? x(1) * (m - 1) * std::pow(u, m - 2) * (1.0 - u * u) : 0.0;
    return d;
  };
  const auto w = detail::fit_weights(pts);
  RealVector x0(3);
  x0 << ab(0), ab(1), std::atanh(u0);
  const auto sol = detail::gauss_newton(f, g, x0, pts, w);
  const double u = std::tanh(sol.x(2));
  res.values = RealVector(3);
  res.values << sol.x(0), sol.x(1), u;
  res.iterations = sol.iterations;
  RealMatrix cov = detail::covariance_from(sol.jtwj, pts, detail::weighted_cost(f, sol.x, pts, w));
  // Map the covariance of s to u: du/ds = 1 - u^2.
  RealMatrix jac = RealMatrix::Identity(3, 3);
  jac(2, 2) = 1.0 - u * u;
  res.covariance = jac * cov * jac.transpose();
  res.residual = detail::rms_residual(f, sol.x, pts);
  return res;
}

}  // namespace uirs
