#pragma once

// Derivative-free-interface quasi-Newton maximizer and finite-difference derivatives.

#include <functional>

#include <Eigen/Dense>

namespace statrcm::optimize {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
/// Objective to maximize; may return -inf (or NaN) outside its domain.
using Objective = std::function<double(const Vector&)>;

struct BfgsOptions {
  int max_iterations = 500;
  /// Stop when the central-difference gradient satisfies max_i |g_i| * max(1, |x_i|) < gradient_tol * max(1, |f|).
  double gradient_tol = 1e-6;
  /// Stop when the objective improves by less than this over `stall_iterations` iterations.
  double function_tol = 1e-9;
  int stall_iterations = 3;
  /// After a stall the metric is reset; when the gain since the previous reset is below
  /// restart_tol * (1 + |f|) the point is accepted as converged.
  double restart_tol = 1e-7;
  double fd_step = 1e-6;
  double max_step = 2.0;  ///< cap on the Euclidean length of a single step
};

struct BfgsResult {
  Vector x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  double gradient_norm = 0.0;  ///< max-norm of the last central-difference gradient
  bool converged = false;
};

/// Forward-difference gradient; `fx` is f(x).
Vector forward_gradient(const Objective& f, const Vector& x, double fx, double rel_step, int* evaluations = nullptr);
Vector central_gradient(const Objective& f, const Vector& x, double rel_step, int* evaluations = nullptr);

/// Central-difference Hessian with steps h_i = rel_step * max(1, |x_i|).
Matrix numerical_hessian(const Objective& f, const Vector& x, double rel_step = 1e-4);

/// BFGS ascent with backtracking line search. Forward differences drive the iterations;
/// convergence is confirmed with a central-difference gradient.
BfgsResult maximize_bfgs(const Objective& f, const Vector& x0, const BfgsOptions& options = {});

struct HessianCovariance {
  Matrix cov;
  /// False when -H was not positive definite and eigenvalues had to be clipped.
  bool negative_definite = true;
  double min_eigenvalue = 0.0;  ///< smallest eigenvalue of -H
};

/// Inverse of -H. When -H is not positive definite its eigenvalues are clipped from below
/// at `clip_floor` times the largest one and the result is flagged.
HessianCovariance covariance_from_hessian(const Matrix& hessian, double clip_floor = 1e-8);

}  // namespace statrcm::optimize
