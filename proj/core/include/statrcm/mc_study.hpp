#pragma once

// Simulation-estimation study of the maximum-likelihood estimator.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "statrcm/data.hpp"
#include "statrcm/estimate.hpp"
#include "statrcm/params.hpp"

namespace statrcm::simulate {

/// Data-generating values of the study: the physical parameters and offsets of the
/// simulation table, noise parameters at the reported historical estimates.
ModelParams mc_true_values();

/// One synthetic observation table of `covariates.size()` years, starting from `initial`
/// with measurement errors drawn from their stationary law.
data::ObservationTable simulate_dataset(const ModelParams& truth, const data::CovariateTable& covariates,
                                        const model::ClimateState& initial, std::uint64_t seed);

struct McStudyOptions {
  std::size_t n_reps = 200;
  std::size_t n_obs = 64;
  std::uint64_t seed = 20240313;
  int threads = 1;
  /// Estimation settings per replication; the optimizer starts at the truth.
  estimate::EstimationOptions estimation = [] {
    estimate::EstimationOptions o;
    o.n_starts = 1;
    o.compute_standard_errors = false;
    return o;
  }();
};

struct McStudyResult {
  std::vector<ParamId> ids;       ///< estimated parameters, canonical order
  Eigen::MatrixXd estimates;      ///< kept replications x ids
  std::vector<std::size_t> kept;  ///< replication index of each row of `estimates`
  Eigen::VectorXd mean;
  Eigen::VectorXd std;  ///< n - 1 denominator
  std::size_t failed = 0;       ///< estimation threw
  std::size_t unconverged = 0;  ///< optimizer stopped without convergence
};

McStudyResult mc_study(const ModelParams& truth, const data::CovariateTable& covariates, const McStudyOptions& options);

}  // namespace statrcm::simulate
