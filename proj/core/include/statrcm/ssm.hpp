#pragma once

// Extended Kalman filter and fixed-interval smoother.
//
// The generic core works on any system
//
//   z_{t+1} = f_t(z_t) + u_t,   u_t ~ N(0, U)
//   y_t     = d + Z z_t + e_t,  e_t ~ N(0, H)
//
// with a possibly nonlinear f_t linearized around the filtered mean. Missing entries of
// y_t (NaN) are dropped from the update row by row. The climate model enters through
// `climate_state_space`, which augments the six physical states with the seven AR(1)
// measurement errors so that the observation equation becomes noiseless (H = 0).

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "statrcm/data.hpp"
#include "statrcm/params.hpp"

namespace statrcm::ssm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct GaussianBelief {
  Vector mean;
  Matrix cov;
};

struct StateSpace {
  Eigen::Index state_dim = 0;
  /// E[z_{t+1} | z_t]; `t` is the index of the step being left.
  std::function<Vector(const Vector& z, std::size_t t)> transition;
  std::function<Matrix(const Vector& z, std::size_t t)> jacobian;
  Matrix process_cov;
  Vector obs_intercept;
  Matrix obs_matrix;
  Matrix obs_noise_cov;
};

struct FilterStep {
  GaussianBelief predicted;
  GaussianBelief filtered;
  std::vector<int> observed;  ///< observation indices used in the update
  Vector innovation;
  Matrix innovation_cov;
  double loglik = 0.0;
  /// Jacobian of the transition that produced `predicted` (empty at the first step).
  Matrix transition_jacobian;
};

struct FilterOutput {
  std::vector<FilterStep> steps;
  double loglik = 0.0;
};

struct FilterOptions {
  /// When false only the total log-likelihood is kept.
  bool store_steps = true;
};

/// Runs the filter. `initial` is the predicted belief for the first time point.
/// Throws NumericalError when an innovation covariance is not positive definite or a
/// log-likelihood contribution is not finite.
FilterOutput kalman_filter(const StateSpace& system, const Matrix& observations, const GaussianBelief& initial,
                           const FilterOptions& options = {});

struct SmootherOutput {
  std::vector<GaussianBelief> smoothed;
};

/// Rauch-Tung-Striebel recursion over the stored per-step linearizations.
SmootherOutput rts_smooth(const FilterOutput& filter);

/// Innovation of each observed entry divided by the square root of its innovation
/// variance; (T x p) with NaN where the entry was missing.
Matrix standardized_residuals(const FilterOutput& filter, Eigen::Index obs_dim);

void symmetrize(Matrix& m);

// ---------------------------------------------------------------------------------------
// Climate model

inline constexpr int kAugmentedDim = model::kAugmentedDim;

struct InitOptions {
  double kappa = 100.0;
  /// Per-variable prior scales for (C, S_OCN, S_LND, F_CO2, T_m, T_d).
  std::array<double, model::kStateDim> scales = {1.0, 0.5, 0.5, 0.1, 0.1, 0.05};
};

/// Data-anchored prior for the first year: physical means from the first observations
/// with offsets removed, variance kappa * scale^2; measurement errors start at mean 0 with
/// their stationary covariance.
GaussianBelief init_belief(const data::ObservationRow& first, const ModelParams& params, const InitOptions& options = {});

/// Augmented 13-dimensional system of the climate model driven by `covariates`.
StateSpace climate_state_space(const ModelParams& params, const data::CovariateTable& covariates);

FilterOutput ekf_filter(const ModelParams& params, const data::ObservationTable& observations,
                        const data::CovariateTable& covariates, const InitOptions& init = {},
                        const FilterOptions& options = {});

SmootherOutput ekf_smooth(const ModelParams& params, const data::ObservationTable& observations,
                          const data::CovariateTable& covariates, const InitOptions& init = {});

}  // namespace statrcm::ssm
