#include <cmath>
#include <memory>

#include "statrcm/error.hpp"
#include "statrcm/ssm.hpp"

namespace statrcm::ssm {

namespace {

using model::kObsDim;
using model::kStateDim;

double observed_or(double value, double offset, double fallback) {
  return data::is_missing(value) ? fallback : value - offset;
}

}  // namespace

GaussianBelief init_belief(const data::ObservationRow& first, const ModelParams& params, const InitOptions& options) {
  if (first.observed_count() == 0)
    throw Error("cannot initialize the filter: the first year has no observed entries");
  const auto& o = params.offsets;
  const auto& y = first.values;

  GaussianBelief belief;
  belief.mean = Vector::Zero(kAugmentedDim);
  // A missing CO2 stock falls back to the pre-industrial level, which keeps the forcing
  // equation inside its domain.
  belief.mean[model::kCarbon] = observed_or(y[model::kObsCarbon], o.mu_c, params.constants.c_preind);
  belief.mean[model::kOceanSink] = observed_or(y[model::kObsOceanSink], o.mu_o, 0.0);
  belief.mean[model::kLandSink] = observed_or(y[model::kObsLandSink], o.mu_l, 0.0);
  belief.mean[model::kCo2Forcing] = observed_or(y[model::kObsCo2Forcing], o.mu_f, 0.0);
  belief.mean[model::kSurfaceTemp] = observed_or(y[model::kObsSurfaceTemp], o.mu_m, 0.0);
  belief.mean[model::kDeepTemp] = observed_or(y[model::kObsDeepTemp], o.mu_d, 0.0);

  belief.cov = Matrix::Zero(kAugmentedDim, kAugmentedDim);
  for (int i = 0; i < kStateDim; ++i) {
    const double s = options.scales[static_cast<std::size_t>(i)];
    belief.cov(i, i) = options.kappa * s * s;
  }
  belief.cov.bottomRightCorner(kObsDim, kObsDim) =
      model::stationary_measurement_cov(params.noise, params.constants.delta);
  return belief;
}

StateSpace climate_state_space(const ModelParams& params, const data::CovariateTable& covariates) {
  const model::SystemMatrices sys = params.system();
  const double dt = params.constants.delta;

  // Shared, immutable copies so the closures stay valid independently of the caller.
  auto phys = std::make_shared<const model::PhysicalParams>(params.physical);
  auto consts = std::make_shared<const model::Constants>(params.constants);
  auto cov_rows = std::make_shared<const std::vector<model::CovariateRow>>(covariates.rows);
  auto phi = std::make_shared<const model::ObsVector>(sys.Phi.diagonal());

  auto inputs_at = [cov_rows](std::size_t t) {
    if (t + 1 >= cov_rows->size()) throw DataError("covariates end before the observations");
    return model::StepInputs{(*cov_rows)[t + 1].emissions(), (*cov_rows)[t].exogenous_forcing()};
  };

  StateSpace space;
  space.state_dim = kAugmentedDim;
  space.transition = [phys, consts, phi, inputs_at](const Vector& z, std::size_t t) {
    Vector next(kAugmentedDim);
    const model::StateVector x = z.head<kStateDim>();
    next.head<kStateDim>() = model::transition_mean(x, inputs_at(t), *phys, *consts);
    next.tail<kObsDim>() = phi->cwiseProduct(z.tail<kObsDim>());
    return next;
  };
  space.jacobian = [phys, consts, phi](const Vector& z, std::size_t) {
    Matrix jac = Matrix::Zero(kAugmentedDim, kAugmentedDim);
    const model::StateVector x = z.head<kStateDim>();
    jac.topLeftCorner<kStateDim, kStateDim>() = model::transition_jacobian(x, *phys, *consts);
    jac.bottomRightCorner<kObsDim, kObsDim>() = phi->asDiagonal();
    return jac;
  };

  space.process_cov = Matrix::Zero(kAugmentedDim, kAugmentedDim);
  space.process_cov.topLeftCorner<kStateDim, kStateDim>() = dt * sys.R * sys.Q * sys.R.transpose();
  space.process_cov.bottomRightCorner<kObsDim, kObsDim>() = dt * sys.P;

  space.obs_intercept = sys.mu;
  space.obs_matrix = Matrix::Zero(kObsDim, kAugmentedDim);
  space.obs_matrix.leftCols<kStateDim>() = sys.A;
  space.obs_matrix.rightCols<kObsDim>().setIdentity();
  space.obs_noise_cov = Matrix::Zero(kObsDim, kObsDim);
  return space;
}

FilterOutput ekf_filter(const ModelParams& params, const data::ObservationTable& observations,
                        const data::CovariateTable& covariates, const InitOptions& init, const FilterOptions& options) {
  data::check_aligned(observations, covariates);
  const StateSpace space = climate_state_space(params, covariates);
  const GaussianBelief prior = init_belief(observations.rows.front(), params, init);
  return kalman_filter(space, observations.matrix(), prior, options);
}

SmootherOutput ekf_smooth(const ModelParams& params, const data::ObservationTable& observations,
                          const data::CovariateTable& covariates, const InitOptions& init) {
  return rts_smooth(ekf_filter(params, observations, covariates, init));
}

}  // namespace statrcm::ssm
