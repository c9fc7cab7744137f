#include "statrcm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "statrcm/error.hpp"
#include "statrcm/parallel.hpp"
#include "statrcm/rng.hpp"

namespace statrcm::simulate {

namespace {

using model::kObsDim;
using model::kStateDim;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t stream(rng::Stream s) { return static_cast<std::uint64_t>(s); }

bool admissible(const model::PhysicalParams& p, const model::Constants& consts, double max_concentration) {
  if (!(p.h_m > 0.0) || !(p.h_d > 0.0)) return false;
  // c + f2 c^2 is monotone on c > 0 unless f2 < 0, so checking both ends covers the range.
  for (double c : {consts.c_preind, std::max(max_concentration, consts.c_preind)}) {
    const double arg = c + p.f2 * c * c;
    if (p.f1 != 0.0 && !(arg > 0.0)) return false;
  }
  return true;
}

}  // namespace

std::string_view to_string(UncertaintySetup setup) {
  switch (setup) {
    case UncertaintySetup::Deterministic:
      return "det";
    case UncertaintySetup::ParamOnly:
      return "param";
    case UncertaintySetup::ParamState:
      return "param-state";
    case UncertaintySetup::ParamStateMeas:
      return "full";
  }
  return "det";
}

UncertaintySetup parse_setup(std::string_view text) {
  for (UncertaintySetup s : kAllSetups)
    if (to_string(s) == text) return s;
  throw ConfigError("unknown uncertainty setup '" + std::string(text) + "' (expected det, param, param-state or full)");
}

Eigen::MatrixXd matrix_root(const Eigen::MatrixXd& cov) {
  if (cov.size() == 0) return cov;
  if (cov.isZero(0.0)) return Eigen::MatrixXd::Zero(cov.rows(), cov.cols());
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (cov + cov.transpose()));
  return eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

ParameterDistribution::ParameterDistribution(ModelParams center, std::vector<ParamId> ids, Eigen::MatrixXd cov)
    : center_(std::move(center)), ids_(std::move(ids)), cov_(std::move(cov)) {
  const auto n = static_cast<Eigen::Index>(ids_.size());
  if (cov_.rows() != n || cov_.cols() != n) throw SimulationError("parameter covariance does not match the parameter list");
  for (ParamId id : ids_)
    if (!is_physical(id)) throw SimulationError("only physical parameters are drawn; got " + std::string(param_name(id)));
  if (!cov_.allFinite()) throw SimulationError("parameter covariance has non-finite entries");
  root_ = matrix_root(cov_);
}

ParameterDistribution::ParameterDistribution(ModelParams center)
    : ParameterDistribution(std::move(center), {}, Eigen::MatrixXd(0, 0)) {}

ModelParams sample_physical_params(const ParameterDistribution& dist, std::uint64_t key, double max_concentration,
                                   int max_rejections) {
  const auto n = static_cast<Eigen::Index>(dist.ids().size());
  rng::CounterRng gen(key);
  for (int attempt = 0; attempt <= max_rejections; ++attempt) {
    ModelParams p = dist.center();
    if (n > 0) {
      const Eigen::VectorXd shift = dist.root() * gen.normal_vector(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const ParamId id = dist.ids()[static_cast<std::size_t>(i)];
        p.set(id, p.get(id) + shift[i]);
      }
    }
    if (admissible(p.physical, p.constants, max_concentration)) return p;
  }
  throw SimulationError("no admissible parameter draw after " + std::to_string(max_rejections) + " rejections");
}

ssm::GaussianBelief point_belief(const model::ClimateState& state, const ModelParams& params) {
  ssm::GaussianBelief b;
  b.mean = Eigen::VectorXd::Zero(model::kAugmentedDim);
  b.mean.head(kStateDim) = state.to_vector();
  b.cov = Eigen::MatrixXd::Zero(model::kAugmentedDim, model::kAugmentedDim);
  b.cov.bottomRightCorner(kObsDim, kObsDim) = model::stationary_measurement_cov(params.noise, params.constants.delta);
  return b;
}

PathEnsemble::PathEnsemble(std::size_t n_paths, std::vector<int> years)
    : n_paths_(n_paths),
      years_(std::move(years)),
      states_(n_paths * years_.size() * kStateDim, kNaN),
      obs_(n_paths * years_.size() * kObsDim, kNaN),
      valid_(n_paths, 1) {}

std::size_t PathEnsemble::invalid_count() const {
  return static_cast<std::size_t>(std::count(valid_.begin(), valid_.end(), 0));
}

PathEnsemble simulate_paths(const ParameterDistribution& dist, const Scenario& scenario, UncertaintySetup setup,
                            std::size_t n_paths, std::uint64_t seed, const SimulationOptions& options) {
  if (n_paths == 0) throw SimulationError("number of paths must be positive");
  const auto& rows = scenario.covariates.rows;
  if (rows.empty()) throw SimulationError("scenario has no years");
  if (scenario.initial.mean.size() != model::kAugmentedDim || scenario.initial.cov.rows() != model::kAugmentedDim)
    throw SimulationError("initial belief must cover the augmented state");

  std::vector<int> years;
  for (const auto& r : rows) years.push_back(r.year);
  PathEnsemble ens(n_paths, years);
  ens.setup = setup;
  ens.seed = seed;
  ens.offsets = dist.center().offsets;

  const bool draw_params = setup != UncertaintySetup::Deterministic;
  const bool state_noise = setup == UncertaintySetup::ParamState || setup == UncertaintySetup::ParamStateMeas;
  const bool meas_noise = setup == UncertaintySetup::ParamStateMeas;

  const ModelParams& center = dist.center();
  const double dt = center.constants.delta;
  const model::SystemMatrices base = center.system();
  Eigen::Matrix<double, model::kShockDim, 1> eta_sd;
  for (int i = 0; i < model::kShockDim; ++i) eta_sd[i] = std::sqrt(dt * base.Q(i, i));
  const Eigen::MatrixXd xi_root = matrix_root(dt * Eigen::MatrixXd(base.P));
  const Eigen::MatrixXd init_root = matrix_root(scenario.initial.cov);
  const std::size_t horizon = years.size();

  parallel_for(n_paths, options.threads, [&](std::size_t p) {
    const auto path = static_cast<std::uint64_t>(p);
    try {
      const ModelParams params =
          draw_params ? sample_physical_params(dist, rng::derive_key(seed, stream(rng::Stream::Parameters), path),
                                               options.max_concentration)
                      : center;
      const model::SystemMatrices sys = params.system();

      Eigen::VectorXd z = scenario.initial.mean;
      if (state_noise) {
        rng::CounterRng gen(rng::derive_key(seed, stream(rng::Stream::InitialState), path));
        z += init_root * gen.normal_vector(model::kAugmentedDim);
      }
      model::StateVector x = z.head(kStateDim);
      model::ObsVector eps = meas_noise ? model::ObsVector(z.tail(kObsDim)) : model::ObsVector::Zero();

      for (std::size_t t = 0; t < horizon; ++t) {
        const model::ObsVector y = sys.mu + sys.A * x + eps;
        if (!x.allFinite() || !y.allFinite()) throw NumericalError("simulated path is not finite", t);
        for (int i = 0; i < kStateDim; ++i) ens.state(p, t, i) = x[i];
        for (int j = 0; j < kObsDim; ++j) ens.obs(p, t, j) = y[j];
        if (t + 1 == horizon) break;

        const model::StepInputs inputs{rows[t + 1].emissions(), rows[t].exogenous_forcing()};
        model::StateVector next = model::transition_mean(x, inputs, params.physical, params.constants);
        const auto tt = static_cast<std::uint64_t>(t);
        if (state_noise) {
          rng::CounterRng gen(rng::derive_key(seed, stream(rng::Stream::StateShock), path, tt));
          Eigen::Matrix<double, model::kShockDim, 1> eta;
          for (int i = 0; i < model::kShockDim; ++i) eta[i] = eta_sd[i] * gen.normal();
          next += sys.R * eta;
        }
        if (meas_noise) {
          rng::CounterRng gen(rng::derive_key(seed, stream(rng::Stream::MeasurementShock), path, tt));
          eps = sys.Phi * eps + model::ObsVector(xi_root * gen.normal_vector(kObsDim));
        }
        x = next;
      }
    } catch (const Error&) {
      ens.set_valid(p, false);
    }
  });
  return ens;
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw SimulationError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("probability outside [0, 1]", p);
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

QuantileBands quantile_bands(const PathEnsemble& ensemble, int variable, Scale scale, const std::vector<double>& probs) {
  const int dim = scale == Scale::State ? kStateDim : kObsDim;
  if (variable < 0 || variable >= dim) throw SimulationError("variable index out of range");
  if (ensemble.n_paths() - ensemble.invalid_count() < 2) throw SimulationError("quantiles need at least two valid paths");
  QuantileBands bands;
  bands.years = ensemble.years();
  bands.probs = probs;
  bands.values.resize(static_cast<Eigen::Index>(ensemble.horizon()), static_cast<Eigen::Index>(probs.size()));
  std::vector<double> column;
  column.reserve(ensemble.n_paths());
  for (std::size_t t = 0; t < ensemble.horizon(); ++t) {
    column.clear();
    for (std::size_t p = 0; p < ensemble.n_paths(); ++p) {
      if (!ensemble.valid(p)) continue;
      column.push_back(scale == Scale::State ? ensemble.state(p, t, variable) : ensemble.obs(p, t, variable));
    }
    if (column.empty())
      throw SimulationError("every path is invalid in year " + std::to_string(ensemble.years()[t]));
    std::sort(column.begin(), column.end());
    for (std::size_t k = 0; k < probs.size(); ++k)
      bands.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) = quantile_sorted(column, probs[k]);
    bands.valid_paths.push_back(column.size());
  }
  return bands;
}

double exceedance_probability(const PathEnsemble& ensemble, double threshold, Scale scale, int first_year,
                              int last_year) {
  const auto& years = ensemble.years();
  if (years.empty() || first_year > last_year || first_year < years.front() || last_year > years.back())
    throw SimulationError("exceedance window lies outside the simulated horizon");
  const auto t0 = static_cast<std::size_t>(first_year - years.front());
  const auto t1 = static_cast<std::size_t>(last_year - years.front());
  std::size_t valid = 0;
  std::size_t hits = 0;
  for (std::size_t p = 0; p < ensemble.n_paths(); ++p) {
    if (!ensemble.valid(p)) continue;
    ++valid;
    for (std::size_t t = t0; t <= t1; ++t) {
      const double temp = scale == Scale::State ? ensemble.state(p, t, model::kSurfaceTemp) + ensemble.offsets.mu_m
                                                : ensemble.obs(p, t, model::kObsSurfaceTemp);
      if (temp > threshold) {
        ++hits;
        break;
      }
    }
  }
  if (valid == 0) throw SimulationError("no valid paths");
  return static_cast<double>(hits) / static_cast<double>(valid);
}

}  // namespace statrcm::simulate
