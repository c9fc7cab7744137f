#include "statrcm/mc_study.hpp"

#include <cmath>
#include <optional>

#include "statrcm/error.hpp"
#include "statrcm/parallel.hpp"
#include "statrcm/rng.hpp"
#include "statrcm/simulate.hpp"
#include "statrcm/synthetic.hpp"

namespace statrcm::simulate {

ModelParams mc_true_values() {
  ModelParams p = published_estimates();
  p.physical = model::PhysicalParams{.b1 = 0.01, .b2 = 0.02, .c1 = 0.09, .c2 = 0.09, .f1 = 5.58, .f2 = 0.0,
                                     .f3 = 0.0, .gamma = 1.44, .lambda = 1.44, .h_m = 8.97, .h_d = 265.88};
  p.offsets = model::MeasurementOffsets{.mu_m = 0.28, .mu_d = 0.05};
  return p;
}

data::ObservationTable simulate_dataset(const ModelParams& truth, const data::CovariateTable& covariates,
                                        const model::ClimateState& initial, std::uint64_t seed) {
  const Scenario scenario{covariates, point_belief(initial, truth)};
  const PathEnsemble ens =
      simulate_paths(ParameterDistribution(truth), scenario, UncertaintySetup::ParamStateMeas, 1, seed);
  if (!ens.valid(0)) throw SimulationError("simulated dataset diverged");
  data::ObservationTable table;
  for (std::size_t t = 0; t < ens.horizon(); ++t) {
    data::ObservationRow row;
    row.year = ens.years()[t];
    for (int j = 0; j < model::kObsDim; ++j) row.values[static_cast<std::size_t>(j)] = ens.obs(0, t, j);
    table.rows.push_back(row);
  }
  return table;
}

McStudyResult mc_study(const ModelParams& truth, const data::CovariateTable& covariates, const McStudyOptions& options) {
  if (options.n_reps == 0) throw ConfigError("number of replications must be positive");
  if (covariates.size() < options.n_obs) throw DataError("covariates are shorter than the requested sample");
  const data::CovariateTable cov =
      covariates.slice(covariates.first_year(), covariates.first_year() + static_cast<int>(options.n_obs) - 1);
  const model::ClimateState initial = data::synthetic_initial_state(truth);

  std::vector<std::optional<estimate::EstimationResult>> fits(options.n_reps);
  std::vector<char> threw(options.n_reps, 0);
  // Replications run in parallel; the estimation inside each one stays single-threaded.
  estimate::EstimationOptions est = options.estimation;
  est.threads = 1;
  parallel_for(options.n_reps, options.threads, [&](std::size_t r) {
    try {
      const std::uint64_t key = rng::derive_key(options.seed, 0x4D43, static_cast<std::uint64_t>(r));
      const data::ObservationTable obs = simulate_dataset(truth, cov, initial, key);
      fits[r] = estimate::maximize_likelihood(obs, cov, truth.form, truth, est);
    } catch (const Error&) {
      threw[r] = 1;
    }
  });

  McStudyResult out;
  out.ids = truth.free_ids();
  std::vector<Eigen::VectorXd> rows;
  for (std::size_t r = 0; r < options.n_reps; ++r) {
    if (threw[r]) {
      ++out.failed;
      continue;
    }
    if (!fits[r]->trace.converged) {
      ++out.unconverged;
      continue;
    }
    rows.push_back(fits[r]->estimates);
    out.kept.push_back(r);
  }
  const auto k = static_cast<Eigen::Index>(out.ids.size());
  out.estimates.resize(static_cast<Eigen::Index>(rows.size()), k);
  for (std::size_t i = 0; i < rows.size(); ++i) out.estimates.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  if (rows.empty()) throw EstimationError("every replication failed");
  out.mean = out.estimates.colwise().mean().transpose();
  out.std = Eigen::VectorXd::Zero(k);
  if (rows.size() > 1) {
    const Eigen::MatrixXd centered = out.estimates.rowwise() - out.mean.transpose();
    out.std = (centered.colwise().squaredNorm() / static_cast<double>(rows.size() - 1)).cwiseSqrt().transpose();
  }
  return out;
}

}  // namespace statrcm::simulate
