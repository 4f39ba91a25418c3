// qp_simplex.hpp - Active-set solver for convex quadratics on the probability simplex
//
// This software is licensed under the terms of the Apache Licence Version 2.0
// which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"

namespace emiprior::qp {

// Solves
//
//   min  f(x) = 0.5 x'Gx + h'x
//   s.t. x >= 0,  sum(x) = 1
//
// with G symmetric positive semidefinite, by a primal active-set method.
// The working set holds the coordinates fixed at zero; on each face the
// equality-constrained subproblem is solved in the null space of the sum
// constraint (basis e_k - e_first over the free coordinates). A singular
// reduced Hessian is handled with its eigendecomposition: components of
// the reduced gradient in the kernel give a linear descent direction that
// runs into a bound, otherwise the minimum-norm step is taken.

struct Result {
  Eigen::VectorXd x;
  double objective = 0.0;
  double kkt_residual = 0.0;  // max stationarity violation on the final face
  bool flat = false;          // minimizer not unique (singular reduced Hessian)
  int iterations = 0;
};

namespace detail {

struct FaceStep {
  Eigen::VectorXd d;  // full-length step, zero on the working set
  bool unbounded = false;
  bool singular = false;
};

inline FaceStep face_step(const Eigen::MatrixXd& g, const Eigen::VectorXd& grad,
                          const std::vector<int>& free) {
  const Eigen::Index n = g.rows();
  FaceStep out;
  out.d = Eigen::VectorXd::Zero(n);
  const auto m = static_cast<Eigen::Index>(free.size()) - 1;
  if (m <= 0) return out;
  const int f0 = free.front();

  // Z has columns e_{free[k+1]} - e_{f0}.
  Eigen::MatrixXd hz(m, m);
  Eigen::VectorXd gz(m);
  for (Eigen::Index a = 0; a < m; ++a) {
    const int ia = free[static_cast<std::size_t>(a + 1)];
    gz(a) = grad(ia) - grad(f0);
    for (Eigen::Index b = 0; b < m; ++b) {
      const int ib = free[static_cast<std::size_t>(b + 1)];
      hz(a, b) = g(ia, ib) - g(ia, f0) - g(f0, ib) + g(f0, f0);
    }
  }
  hz = 0.5 * (hz + hz.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hz);
  const Eigen::VectorXd lam = es.eigenvalues();
  const Eigen::MatrixXd& v = es.eigenvectors();
  const double lam_max = std::max(lam.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  const double cut = 1e-12 * lam_max;
  const Eigen::VectorXd proj = v.transpose() * gz;

  Eigen::VectorXd u = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd kernel = Eigen::VectorXd::Zero(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    if (lam(k) > cut) u -= (proj(k) / lam(k)) * v.col(k);
    else {
      out.singular = true;
      kernel += proj(k) * v.col(k);
    }
  }
  // Linear descent along the kernel when the gradient is not orthogonal to it.
  const double gscale = std::max(gz.cwiseAbs().maxCoeff(), 1e-300);
  if (out.singular && kernel.cwiseAbs().maxCoeff() > 1e-10 * gscale) {
    u = -kernel;
    out.unbounded = true;
  }
  for (Eigen::Index a = 0; a < m; ++a) {
    out.d(free[static_cast<std::size_t>(a + 1)]) = u(a);
    out.d(f0) -= u(a);
  }
  return out;
}

inline double kkt_residual(const Eigen::VectorXd& grad, const std::vector<bool>& at_zero,
                           const std::vector<bool>& allowed) {
  double mu = 0.0;
  int count = 0;
  for (Eigen::Index i = 0; i < grad.size(); ++i)
    if (allowed[static_cast<std::size_t>(i)] && !at_zero[static_cast<std::size_t>(i)]) {
      mu += grad(i);
      ++count;
    }
  if (count == 0) return 0.0;
  mu /= count;
  double res = 0.0;
  for (Eigen::Index i = 0; i < grad.size(); ++i) {
    if (!allowed[static_cast<std::size_t>(i)]) continue;
    if (at_zero[static_cast<std::size_t>(i)]) res = std::max(res, mu - grad(i));
    else res = std::max(res, std::abs(grad(i) - mu));
  }
  return res;
}

} // namespace detail

/// Stationarity residual of f at a feasible x: with mu the mean gradient
/// over positive coordinates, the largest |grad_i - mu| on positive
/// coordinates and (mu - grad_i)+ on zero ones. `allowed` restricts the
/// feasible set to a support.
inline double kkt_residual(const Eigen::MatrixXd& g, const Eigen::VectorXd& h,
                           const Eigen::VectorXd& x, const std::vector<bool>& allowed) {
  std::vector<bool> at_zero(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) at_zero[static_cast<std::size_t>(i)] = x(i) <= 0.0;
  return detail::kkt_residual(g * x + h, at_zero, allowed);
}

/// Minimizes over the face of the simplex spanned by `support` (indices
/// into 0..n-1); coordinates outside the support stay at zero.
inline Result solve(const Eigen::MatrixXd& g, const Eigen::VectorXd& h,
                    const std::vector<std::size_t>& support) {
  const Eigen::Index n = g.rows();
  if (g.cols() != n || h.size() != n) throw AlignmentError("QP dimensions do not match");
  if (support.empty()) throw InvariantError("QP support is empty");
  std::vector<bool> allowed(static_cast<std::size_t>(n), false);
  for (auto i : support) {
    if (static_cast<Eigen::Index>(i) >= n) throw RangeError("QP support index out of range");
    allowed[i] = true;
  }
  auto f = [&](const Eigen::VectorXd& x) { return 0.5 * x.dot(g * x) + h.dot(x); };

  // Start at the best vertex of the face.
  Result r;
  int start = static_cast<int>(support.front());
  double best = std::numeric_limits<double>::infinity();
  for (auto i : support) {
    const double v = 0.5 * g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) + h(static_cast<Eigen::Index>(i));
    if (v < best) {
      best = v;
      start = static_cast<int>(i);
    }
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  x(start) = 1.0;
  std::vector<bool> at_zero(static_cast<std::size_t>(n), true);
  at_zero[static_cast<std::size_t>(start)] = false;

  const int max_iter = 50 * static_cast<int>(n) + 50;
  bool singular = false;
  for (r.iterations = 0; r.iterations < max_iter; ++r.iterations) {
    const Eigen::VectorXd grad = g * x + h;
    std::vector<int> free;
    for (Eigen::Index i = 0; i < n; ++i)
      if (allowed[static_cast<std::size_t>(i)] && !at_zero[static_cast<std::size_t>(i)])
        free.push_back(static_cast<int>(i));

    auto step = detail::face_step(g, grad, free);
    singular = step.singular;
    const double dmax = step.d.cwiseAbs().maxCoeff();

    if (dmax > 1e-15) {
      double alpha = step.unbounded ? std::numeric_limits<double>::infinity() : 1.0;
      int blocking = -1;
      for (int i : free) {
        if (step.d(i) < 0.0) {
          const double a = -x(i) / step.d(i);
          if (a < alpha) {
            alpha = a;
            blocking = i;
          }
        }
      }
      if (blocking < 0 && step.unbounded)
        throw InvariantError("QP descent direction does not reach a bound");
      x += alpha * step.d;
      if (blocking >= 0) {
        x(blocking) = 0.0;
        at_zero[static_cast<std::size_t>(blocking)] = true;
        for (int i : free)
          if (x(i) < 0.0) x(i) = 0.0;
        continue;
      }
    }

    // At the minimizer of the current face: check the multipliers of the
    // coordinates held at zero.
    const Eigen::VectorXd g2 = g * x + h;
    double mu = 0.0;
    for (int i : free) mu += g2(i);
    mu /= static_cast<double>(free.size());
    const double tol = 1e-13 * std::max(1.0, g2.cwiseAbs().maxCoeff());
    int release = -1;
    double most_negative = -tol;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!allowed[static_cast<std::size_t>(i)] || !at_zero[static_cast<std::size_t>(i)]) continue;
      const double lambda = g2(i) - mu;
      if (lambda < most_negative) {
        most_negative = lambda;
        release = static_cast<int>(i);
      }
    }
    if (release < 0) {
      // The minimizer is unique unless the Hessian is singular on the face
      // widened by the zero coordinates whose multipliers vanish.
      std::vector<int> wide = free;
      for (Eigen::Index i = 0; i < n; ++i)
        if (allowed[static_cast<std::size_t>(i)] && at_zero[static_cast<std::size_t>(i)]
            && std::abs(g2(i) - mu) <= tol)
          wide.push_back(static_cast<int>(i));
      std::sort(wide.begin(), wide.end());
      singular = detail::face_step(g, g2, wide).singular;
      break;
    }
    at_zero[static_cast<std::size_t>(release)] = false;
  }

  // Exact feasibility: clip rounding noise and renormalize.
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!allowed[static_cast<std::size_t>(i)] || x(i) < 0.0) x(i) = 0.0;
    sum += x(i);
  }
  x /= sum;

  r.x = x;
  r.objective = f(x);
  r.flat = singular;
  r.kkt_residual = kkt_residual(g, h, x, allowed);
  return r;
}

} // namespace emiprior::qp
