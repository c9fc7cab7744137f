#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "statrcm/error.hpp"
#include "statrcm/estimate.hpp"

namespace statrcm::estimate {

StandardErrors standard_errors(const optimize::Objective& loglik_of_u, const Vector& u_hat,
                               const Vector& natural_derivative, const Vector& natural_estimates,
                               double hessian_step) {
  const Matrix hessian = optimize::numerical_hessian(loglik_of_u, u_hat, hessian_step);
  StandardErrors out;
  if (!hessian.allFinite()) {
    const auto n = u_hat.size();
    out.cov_theta = Matrix::Constant(n, n, std::numeric_limits<double>::quiet_NaN());
    out.std_errors = Vector::Constant(n, std::numeric_limits<double>::quiet_NaN());
    out.t_stats = out.std_errors;
    out.negative_definite = false;
    return out;
  }
  const optimize::HessianCovariance hc = optimize::covariance_from_hessian(hessian);
  out.negative_definite = hc.negative_definite;
  out.cov_theta = natural_derivative.asDiagonal() * hc.cov * natural_derivative.asDiagonal();
  out.std_errors = out.cov_theta.diagonal().cwiseMax(0.0).cwiseSqrt();
  out.t_stats = natural_estimates.cwiseQuotient(out.std_errors);
  return out;
}

LrTest lr_test(double restricted_loglik, double unrestricted_loglik, int df) {
  if (df < 1) throw EstimationError("likelihood-ratio test needs at least one degree of freedom");
  const double diff = unrestricted_loglik - restricted_loglik;
  if (diff < -1e-6)
    throw EstimationError("restricted log-likelihood exceeds the unrestricted one; the fits are not nested optima");
  LrTest out;
  out.df = df;
  out.statistic = 2.0 * std::max(diff, 0.0);
  out.p_value = chi2_survival(out.statistic, df);
  return out;
}

double bic(double loglik, std::size_t k, std::size_t n) {
  if (n < 1) throw EstimationError("BIC needs at least one observation");
  return -2.0 * loglik + static_cast<double>(k) * std::log(static_cast<double>(n));
}

double chi2_survival(double statistic, int df) {
  if (df < 1) throw EstimationError("chi-square needs positive degrees of freedom");
  if (statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * statistic);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("probability outside (0, 1)", p);
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

EcsEstimate ecs_with_se(double lambda_hat, double var_lambda, double f2x, double f2x_ci_halfwidth) {
  if (!(lambda_hat > 0.0)) throw DomainError("climate feedback must be positive", lambda_hat);
  if (var_lambda < 0.0) throw DomainError("variance must be non-negative", var_lambda);
  // 90% interval: half-width = 1.6449 standard deviations
  const double sd_f2x = f2x_ci_halfwidth / 1.6449;
  const double d_f = 1.0 / lambda_hat;
  const double d_lambda = -f2x / (lambda_hat * lambda_hat);
  return {f2x / lambda_hat, std::sqrt(d_f * d_f * sd_f2x * sd_f2x + d_lambda * d_lambda * var_lambda)};
}

int lr_degrees_of_freedom(model::ForcingForm form) {
  const auto full = ModelParams::default_free_mask(model::ForcingForm::Unrestricted);
  const auto restricted = ModelParams::default_free_mask(form);
  int df = 0;
  for (std::size_t i = 0; i < kParamCount; ++i) df += (full[i] && !restricted[i]) ? 1 : 0;
  return df;
}

std::vector<ModelComparisonRow> compare_forcing_forms(const data::ObservationTable& obs,
                                                      const data::CovariateTable& cov,
                                                      const EstimationOptions& options,
                                                      std::vector<EstimationResult>* fits) {
  using model::ForcingForm;
  // Each form is also started from the optima of the forms nested in it.
  const std::vector<std::pair<ForcingForm, std::vector<ForcingForm>>> plan = {
      {ForcingForm::LogOnly, {}},
      {ForcingForm::SqrtOnly, {}},
      {ForcingForm::Hansen98, {}},
      {ForcingForm::Log2, {ForcingForm::LogOnly, ForcingForm::Hansen98}},
      {ForcingForm::SqrtPlusLog, {ForcingForm::LogOnly, ForcingForm::SqrtOnly}},
      {ForcingForm::Unrestricted,
       {ForcingForm::LogOnly, ForcingForm::SqrtOnly, ForcingForm::Hansen98, ForcingForm::Log2,
        ForcingForm::SqrtPlusLog}},
  };

  std::map<ForcingForm, EstimationResult> done;
  for (const auto& [form, nested] : plan) {
    EstimationOptions opts = options;
    for (ForcingForm inner : nested) opts.extra_starts.push_back(done.at(inner).theta_hat);
    done.emplace(form, maximize_likelihood(obs, cov, form, default_initial_params(obs, form), opts));
  }

  const double unrestricted = done.at(ForcingForm::Unrestricted).loglik;
  std::vector<ModelComparisonRow> rows;
  if (fits) fits->clear();
  for (ForcingForm form : model::kAllForcingForms) {
    const EstimationResult& fit = done.at(form);
    ModelComparisonRow row;
    row.form = form;
    row.loglik = fit.loglik;
    row.k = fit.k();
    row.bic = bic(fit.loglik, fit.k(), fit.n_obs);
    row.converged = fit.trace.converged;
    if (form != ForcingForm::Unrestricted) row.lr = lr_test(fit.loglik, unrestricted, lr_degrees_of_freedom(form));
    rows.push_back(row);
    if (fits) fits->push_back(fit);
  }
  return rows;
}

}  // namespace statrcm::estimate
