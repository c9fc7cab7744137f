#include "statrcm/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace statrcm::optimize {

namespace {

double step_size(double rel_step, double xi) { return rel_step * std::max(1.0, std::abs(xi)); }

double safe_eval(const Objective& f, const Vector& x) {
  const double v = f(x);
  return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
}

bool gradient_small(const Vector& g, const Vector& x, double fx, double tol) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(g[i]) * std::max(1.0, std::abs(x[i])));
  return worst < tol * std::max(1.0, std::abs(fx));
}

}  // namespace

Vector forward_gradient(const Objective& f, const Vector& x, double fx, double rel_step, int* evaluations) {
  Vector g(x.size());
  Vector xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = step_size(rel_step, x[i]);
    xp[i] = x[i] + h;
    double fp = safe_eval(f, xp);
    if (!std::isfinite(fp)) {
      // one-sided step into the domain
      xp[i] = x[i] - h;
      fp = safe_eval(f, xp);
      g[i] = std::isfinite(fp) ? (fx - fp) / h : 0.0;
    } else {
      g[i] = (fp - fx) / h;
    }
    xp[i] = x[i];
  }
  if (evaluations) *evaluations += static_cast<int>(x.size());
  return g;
}

Vector central_gradient(const Objective& f, const Vector& x, double rel_step, int* evaluations) {
  Vector g(x.size());
  Vector xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = step_size(rel_step, x[i]);
    xp[i] = x[i] + h;
    const double fp = safe_eval(f, xp);
    xp[i] = x[i] - h;
    const double fm = safe_eval(f, xp);
    xp[i] = x[i];
    if (std::isfinite(fp) && std::isfinite(fm)) {
      g[i] = (fp - fm) / (2.0 * h);
    } else {
      g[i] = 0.0;
    }
  }
  if (evaluations) *evaluations += 2 * static_cast<int>(x.size());
  return g;
}

Matrix numerical_hessian(const Objective& f, const Vector& x, double rel_step) {
  const Eigen::Index n = x.size();
  Vector h(n);
  for (Eigen::Index i = 0; i < n; ++i) h[i] = step_size(rel_step, x[i]);
  const double f0 = f(x);
  Matrix hess(n, n);
  Vector xp = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    xp[i] = x[i] + h[i];
    const double fp = f(xp);
    xp[i] = x[i] - h[i];
    const double fm = f(xp);
    xp[i] = x[i];
    hess(i, i) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
    for (Eigen::Index j = 0; j < i; ++j) {
      xp[i] = x[i] + h[i];
      xp[j] = x[j] + h[j];
      const double fpp = f(xp);
      xp[j] = x[j] - h[j];
      const double fpm = f(xp);
      xp[i] = x[i] - h[i];
      const double fmm = f(xp);
      xp[j] = x[j] + h[j];
      const double fmp = f(xp);
      xp[i] = x[i];
      xp[j] = x[j];
      hess(i, j) = hess(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
    }
  }
  return hess;
}

BfgsResult maximize_bfgs(const Objective& f, const Vector& x0, const BfgsOptions& options) {
  const Eigen::Index n = x0.size();
  BfgsResult result;
  result.x = x0;
  result.value = safe_eval(f, x0);
  result.evaluations = 1;
  if (!std::isfinite(result.value)) return result;

  Vector x = x0;
  double fx = result.value;
  Vector g = forward_gradient(f, x, fx, options.fd_step, &result.evaluations);

  auto confirm = [&](const Vector& at, double value) {
    const Vector gc = central_gradient(f, at, options.fd_step * 10.0, &result.evaluations);
    result.gradient_norm = gc.cwiseAbs().maxCoeff();
    return std::pair{gradient_small(gc, at, value, options.gradient_tol), gc};
  };

  if (n == 0) {
    result.converged = true;
    return result;
  }
  if (gradient_small(g, x, fx, options.gradient_tol)) {
    auto [ok, gc] = confirm(x, fx);
    if (ok) {
      result.converged = true;
      return result;
    }
    g = gc;
  }

  Matrix inv_hess = Matrix::Identity(n, n);
  bool scaled = false;
  int stall = 0;
  bool restarted = false;
  double f_restart = fx;

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    result.iterations = iter;
    Vector dir = inv_hess * g;
    double slope = g.dot(dir);
    if (!(slope > 0.0)) {
      inv_hess.setIdentity();
      scaled = false;
      dir = g;
      slope = g.squaredNorm();
    }
    const double len = dir.norm();
    if (len > options.max_step) {
      dir *= options.max_step / len;
      slope *= options.max_step / len;
    }

    double alpha = 1.0;
    Vector x_new;
    double f_new = -std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int k = 0; k < 40; ++k) {
      x_new = x + alpha * dir;
      f_new = safe_eval(f, x_new);
      ++result.evaluations;
      if (std::isfinite(f_new) && f_new >= fx + 1e-4 * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (scaled || !inv_hess.isIdentity()) {
        inv_hess.setIdentity();
        scaled = false;
        g = central_gradient(f, x, options.fd_step * 10.0, &result.evaluations);
        continue;
      }
      auto [ok, gc] = confirm(x, fx);
      result.converged = ok;
      break;
    }

    const Vector g_new = forward_gradient(f, x_new, f_new, options.fd_step, &result.evaluations);
    const Vector s = x_new - x;
    const Vector y = g - g_new;  // gradient change of the minimized objective -f
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (!scaled) {
        inv_hess *= sy / y.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Vector hy = inv_hess * y;
      inv_hess += (rho * rho * y.dot(hy) + rho) * (s * s.transpose()) - rho * (hy * s.transpose() + s * hy.transpose());
    }

    const double improvement = f_new - fx;
    x = x_new;
    fx = f_new;
    g = g_new;
    result.x = x;
    result.value = fx;

    stall = improvement < options.function_tol * (1.0 + std::abs(fx)) ? stall + 1 : 0;
    if (gradient_small(g, x, fx, options.gradient_tol) || stall >= options.stall_iterations) {
      auto [ok, gc] = confirm(x, fx);
      if (ok) {
        result.converged = true;
        break;
      }
      g = gc;
      if (stall >= options.stall_iterations) {
        // Stalled with a gradient that is not small: restart from a fresh metric, and accept
        // the point once a restart no longer buys anything.
        if (restarted && fx - f_restart < options.restart_tol * (1.0 + std::abs(fx))) {
          result.converged = true;
          break;
        }
        restarted = true;
        f_restart = fx;
        inv_hess.setIdentity();
        scaled = false;
        stall = 0;
      }
    }
  }
  result.x = x;
  result.value = fx;
  return result;
}

HessianCovariance covariance_from_hessian(const Matrix& hessian, double clip_floor) {
  Matrix neg = -0.5 * (hessian + hessian.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(neg);
  Vector values = eig.eigenvalues();
  HessianCovariance out;
  out.min_eigenvalue = values.size() > 0 ? values.minCoeff() : 0.0;
  out.negative_definite = values.size() == 0 || out.min_eigenvalue > 0.0;
  if (!out.negative_definite) {
    const double floor = clip_floor * std::max(values.maxCoeff(), 1e-300);
    values = values.cwiseMax(floor);
  }
  out.cov = eig.eigenvectors() * values.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  return out;
}

}  // namespace statrcm::optimize
