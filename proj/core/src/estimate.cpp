#include "statrcm/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "statrcm/error.hpp"
#include "statrcm/parallel.hpp"
#include "statrcm/rng.hpp"

namespace statrcm::estimate {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double softplus(double u) { return u > 30.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u)); }

double softplus_inverse(double v) { return v > 30.0 ? v + std::log(-std::expm1(-v)) : std::log(std::expm1(v)); }

double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }

// Typical magnitude of each free entry in unconstrained units. The optimizer and the
// Hessian work on u / scale so that all coordinates move on comparable scales.
double typical_scale(ParamId id, double value) {
  switch (id) {
    case ParamId::b1:
    case ParamId::b2:
      return 0.01;
    case ParamId::c1:
    case ParamId::c2:
      return 0.05;
    case ParamId::f1:
      return std::max(std::abs(value), 1.0);
    case ParamId::f2:
      return 1e-4;
    case ParamId::f3:
      return 0.1;
    case ParamId::mu_c:
    case ParamId::mu_l:
    case ParamId::mu_o:
    case ParamId::mu_f:
    case ParamId::mu_m:
    case ParamId::mu_d:
      return 0.1;
    default:
      return 1.0;
  }
}

Vector scales_for(const ParameterPacking& packing) {
  Vector s(static_cast<Eigen::Index>(packing.size()));
  for (std::size_t i = 0; i < packing.size(); ++i) {
    const ParamId id = packing.free_ids()[i];
    s[static_cast<Eigen::Index>(i)] = typical_scale(id, packing.reference().get(id));
  }
  return s;
}

double sample_variance(const std::vector<double>& x) {
  if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(x.size() - 1);
}

}  // namespace

double to_unconstrained(ParamKind kind, double value, Transform transform) {
  switch (kind) {
    case ParamKind::Real:
      return value;
    case ParamKind::Positive:
      if (!(value > 0.0)) throw DomainError("positive parameter out of range", value);
      return transform == Transform::Standard ? std::log(value) : softplus_inverse(value);
    case ParamKind::Variance:
      if (!(value > 0.0)) throw DomainError("variance must be positive to be estimated", value);
      return transform == Transform::Standard ? std::log(value) : softplus_inverse(value);
    case ParamKind::Correlation:
      if (!(std::abs(value) < 1.0)) throw DomainError("correlation outside (-1, 1)", value);
      return transform == Transform::Standard ? std::atanh(value) : value / std::sqrt(1.0 - value * value);
  }
  return value;
}

double from_unconstrained(ParamKind kind, double u, Transform transform) {
  switch (kind) {
    case ParamKind::Real:
      return u;
    case ParamKind::Positive:
      return transform == Transform::Standard ? std::exp(u) : softplus(u);
    case ParamKind::Variance:
      return transform == Transform::Standard ? std::exp(u) : softplus(u);
    case ParamKind::Correlation:
      return transform == Transform::Standard ? std::tanh(u) : u / std::sqrt(1.0 + u * u);
  }
  return u;
}

double natural_derivative(ParamKind kind, double u, Transform transform) {
  switch (kind) {
    case ParamKind::Real:
      return 1.0;
    case ParamKind::Positive:
      return transform == Transform::Standard ? std::exp(u) : logistic(u);
    case ParamKind::Variance:
      return transform == Transform::Standard ? std::exp(u) : logistic(u);
    case ParamKind::Correlation: {
      if (transform == Transform::Standard) {
        const double t = std::tanh(u);
        return 1.0 - t * t;
      }
      return std::pow(1.0 + u * u, -1.5);
    }
  }
  return 1.0;
}

ParameterPacking::ParameterPacking(ModelParams reference, Transform transform)
    : reference_(std::move(reference)), transform_(transform), free_(reference_.free_ids()) {}

Vector ParameterPacking::pack(const ModelParams& params) const {
  Vector u(static_cast<Eigen::Index>(free_.size()));
  for (std::size_t i = 0; i < free_.size(); ++i)
    u[static_cast<Eigen::Index>(i)] = to_unconstrained(param_kind(free_[i]), params.get(free_[i]), transform_);
  return u;
}

ModelParams ParameterPacking::unpack(const Vector& u) const {
  if (static_cast<std::size_t>(u.size()) != free_.size())
    throw EstimationError("parameter vector has the wrong length");
  ModelParams p = reference_;
  for (std::size_t i = 0; i < free_.size(); ++i) {
    const double ui = u[static_cast<Eigen::Index>(i)];
    if (!std::isfinite(ui)) throw DomainError("non-finite unconstrained parameter", ui);
    p.set(free_[i], from_unconstrained(param_kind(free_[i]), ui, transform_));
  }
  return p;
}

Vector ParameterPacking::natural_derivative(const Vector& u) const {
  Vector d(u.size());
  for (std::size_t i = 0; i < free_.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    d[k] = estimate::natural_derivative(param_kind(free_[i]), u[k], transform_);
  }
  return d;
}

std::optional<double> EstimationResult::std_error(ParamId id) const {
  if (!has_standard_errors) return std::nullopt;
  const auto it = std::find(free_ids.begin(), free_ids.end(), id);
  if (it == free_ids.end()) return std::nullopt;
  return std_errors[it - free_ids.begin()];
}

Matrix EstimationResult::covariance_block(const std::vector<ParamId>& ids) const {
  if (!has_standard_errors) throw EstimationError("no covariance has been computed");
  std::vector<Eigen::Index> pos;
  for (ParamId id : ids) {
    const auto it = std::find(free_ids.begin(), free_ids.end(), id);
    if (it == free_ids.end())
      throw EstimationError("parameter " + std::string(param_name(id)) + " is not estimated");
    pos.push_back(it - free_ids.begin());
  }
  const auto n = static_cast<Eigen::Index>(pos.size());
  Matrix block(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) block(i, j) = cov_theta(pos[i], pos[j]);
  return block;
}

double safe_log_likelihood(const ModelParams& params, const data::ObservationTable& obs,
                           const data::CovariateTable& cov, const ssm::InitOptions& init) {
  try {
    params.validate();
    const double ll = ssm::ekf_filter(params, obs, cov, init, {.store_steps = false}).loglik;
    return std::isfinite(ll) ? ll : kNegInf;
  } catch (const Error&) {
    return kNegInf;
  }
}

ModelParams default_initial_params(const data::ObservationTable& obs, model::ForcingForm form) {
  ModelParams p;
  p.physical = model::PhysicalParams{.b1 = 0.01, .b2 = 0.01, .c1 = 0.05, .c2 = 0.05, .f1 = 5.0, .f2 = 0.0,
                                     .f3 = 0.0, .gamma = 1.0, .lambda = 1.0, .h_m = 10.0, .h_d = 100.0};
  p.set_form(form);
  if (form == model::ForcingForm::SqrtOnly) p.physical.f3 = 0.378;

  std::array<double, model::kObsDim> half_var{};
  for (int j = 0; j < model::kObsDim; ++j) {
    const std::vector<double> y = obs.series(j);
    std::vector<double> diff;
    for (std::size_t t = 1; t < y.size(); ++t)
      if (!data::is_missing(y[t]) && !data::is_missing(y[t - 1])) diff.push_back(y[t] - y[t - 1]);
    const double v = sample_variance(diff);
    half_var[static_cast<std::size_t>(j)] = std::isfinite(v) ? std::max(v / 2.0, 1e-6) : 0.1;
  }
  for (std::size_t j = 0; j < p.noise.sigma2_eps.size(); ++j) p.noise.sigma2_eps[j] = half_var[j];
  // State shocks enter the sink, forcing and temperature rows (observation columns 1..5).
  for (std::size_t j = 0; j < p.noise.sigma2_eta.size(); ++j) p.noise.sigma2_eta[j] = half_var[j + 1];
  p.noise.phi.fill(0.3);
  p.noise.rho = 0.5;
  return p;
}

EstimationResult maximize_likelihood(const data::ObservationTable& obs, const data::CovariateTable& cov,
                                     model::ForcingForm form, const ModelParams& init,
                                     const EstimationOptions& options) {
  data::check_aligned(obs, cov);
  ModelParams start = init;
  if (start.form != form) start.set_form(form);

  const ParameterPacking packing(start, options.transform);
  const Vector scale = scales_for(packing);
  const auto k = static_cast<Eigen::Index>(packing.size());

  auto params_of = [&](const Vector& v) { return packing.unpack(v.cwiseProduct(scale)); };
  const optimize::Objective objective = [&](const Vector& v) {
    ModelParams p;
    try {
      p = params_of(v);
    } catch (const Error&) {
      return kNegInf;
    }
    return safe_log_likelihood(p, obs, cov, options.init);
  };

  std::vector<Vector> starts;
  auto try_add = [&](const ModelParams& p) {
    try {
      starts.push_back(packing.pack(p).cwiseQuotient(scale));
    } catch (const Error&) {
    }
  };
  try_add(start);
  if (starts.empty()) throw EstimationError("initial parameters are outside the admissible region");
  for (const ModelParams& extra : options.extra_starts) try_add(extra);

  const Vector v0 = starts.front();
  if (!std::isfinite(objective(v0))) throw EstimationError("log-likelihood is not finite at the initial parameters");
  for (int s = 1; s < options.n_starts; ++s) {
    // Redraw a few times when a perturbation leaves the admissible region.
    Vector candidate = v0;
    for (int attempt = 0; attempt < 20; ++attempt) {
      rng::CounterRng gen(rng::derive_key(options.seed, static_cast<std::uint64_t>(rng::Stream::Jitter),
                                          static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(attempt)));
      const double width = options.jitter * std::pow(0.5, attempt / 5);
      candidate = v0 + width * gen.normal_vector(k);
      if (std::isfinite(objective(candidate))) break;
      candidate = v0;
    }
    starts.push_back(candidate);
  }

  std::vector<optimize::BfgsResult> runs(starts.size());
  parallel_for(starts.size(), options.threads,
               [&](std::size_t i) { runs[i] = optimize::maximize_bfgs(objective, starts[i], options.bfgs); });

  EstimationResult result;
  std::size_t best = runs.size();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    result.trace.start_logliks.push_back(runs[i].value);
    if (!std::isfinite(runs[i].value)) continue;
    ++result.trace.finite_starts;
    if (best == runs.size() || runs[i].value > runs[best].value) best = i;
  }
  if (best == runs.size()) throw EstimationError("no start produced a finite log-likelihood");

  const optimize::BfgsResult& run = runs[best];
  result.theta_hat = params_of(run.x);
  result.free_ids = packing.free_ids();
  result.estimates.resize(k);
  for (Eigen::Index i = 0; i < k; ++i)
    result.estimates[i] = result.theta_hat.get(result.free_ids[static_cast<std::size_t>(i)]);
  result.loglik = ssm::ekf_filter(result.theta_hat, obs, cov, options.init, {.store_steps = false}).loglik;
  result.n_obs = obs.size();
  result.trace.iterations = run.iterations;
  result.trace.gradient_norm = run.gradient_norm;
  result.trace.converged = run.converged;
  result.trace.best_start = static_cast<int>(best);
  for (const auto& r : runs) result.trace.evaluations += r.evaluations;

  if (options.compute_standard_errors) attach_standard_errors(result, obs, cov, options);
  return result;
}

void attach_standard_errors(EstimationResult& result, const data::ObservationTable& obs,
                            const data::CovariateTable& cov, const EstimationOptions& options) {
  const ParameterPacking packing(result.theta_hat, options.transform);
  const Vector scale = scales_for(packing);
  const optimize::Objective objective = [&](const Vector& v) {
    try {
      return safe_log_likelihood(packing.unpack(v.cwiseProduct(scale)), obs, cov, options.init);
    } catch (const Error&) {
      return kNegInf;
    }
  };
  const Vector u_hat = packing.pack(result.theta_hat);
  const Vector v_hat = u_hat.cwiseQuotient(scale);
  const Vector dtheta_dv = packing.natural_derivative(u_hat).cwiseProduct(scale);
  const StandardErrors se = standard_errors(objective, v_hat, dtheta_dv, result.estimates, options.hessian_step);
  result.cov_theta = se.cov_theta;
  result.std_errors = se.std_errors;
  result.t_stats = se.t_stats;
  result.hessian_negative_definite = se.negative_definite;
  result.has_standard_errors = se.std_errors.allFinite();
}

}  // namespace statrcm::estimate
