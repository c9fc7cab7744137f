#pragma once

// Maximum-likelihood estimation of the climate model and the inference built on it.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "statrcm/data.hpp"
#include "statrcm/optimize.hpp"
#include "statrcm/params.hpp"
#include "statrcm/ssm.hpp"

namespace statrcm::estimate {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Maps between the free entries of ModelParams and an unconstrained vector.
///   Standard:    variances log, phi/rho atanh, heat capacities log, others identity
///   Alternative: variances and heat capacities softplus^-1, phi/rho u/sqrt(1+u^2)
/// The alternative exists to check that estimates do not depend on the parameterization.
enum class Transform { Standard, Alternative };

class ParameterPacking {
 public:
  ParameterPacking(ModelParams reference, Transform transform = Transform::Standard);

  Vector pack(const ModelParams& params) const;
  /// Free entries replaced from `u`; pinned entries copied from the reference.
  ModelParams unpack(const Vector& u) const;
  /// d theta_i / d u_i for each free entry (the transform is elementwise).
  Vector natural_derivative(const Vector& u) const;

  const std::vector<ParamId>& free_ids() const { return free_; }
  std::size_t size() const { return free_.size(); }
  const ModelParams& reference() const { return reference_; }
  Transform transform() const { return transform_; }

 private:
  ModelParams reference_;
  Transform transform_;
  std::vector<ParamId> free_;
};

double to_unconstrained(ParamKind kind, double value, Transform transform);
double from_unconstrained(ParamKind kind, double u, Transform transform);
double natural_derivative(ParamKind kind, double u, Transform transform);

struct EstimationOptions {
  optimize::BfgsOptions bfgs;
  int n_starts = 5;           ///< the first start is the initial value itself
  double jitter = 0.15;       ///< standard deviation of start perturbations in unconstrained units
  std::uint64_t seed = 20240313;
  int threads = 1;
  Transform transform = Transform::Standard;
  ssm::InitOptions init;
  bool compute_standard_errors = true;
  double hessian_step = 1e-4;
  /// Additional starting points tried before the jittered ones (e.g. nested optima).
  std::vector<ModelParams> extra_starts;
};

struct OptimizerTrace {
  int iterations = 0;
  int evaluations = 0;
  double gradient_norm = 0.0;
  bool converged = false;
  int best_start = 0;
  int finite_starts = 0;
  std::vector<double> start_logliks;
};

struct EstimationResult {
  ModelParams theta_hat;
  double loglik = 0.0;
  std::vector<ParamId> free_ids;
  Vector estimates;      ///< natural-scale free parameters
  Matrix cov_theta;      ///< natural-scale covariance of the free parameters
  Vector std_errors;
  Vector t_stats;
  bool hessian_negative_definite = false;
  bool has_standard_errors = false;
  OptimizerTrace trace;
  std::size_t n_obs = 0;

  std::size_t k() const { return free_ids.size(); }
  /// Standard error of a free parameter; nullopt when pinned or not computed.
  std::optional<double> std_error(ParamId id) const;
  /// Natural-scale covariance block for `ids` (all must be free).
  Matrix covariance_block(const std::vector<ParamId>& ids) const;
};

/// Log-likelihood, or -inf when the filter fails or parameters are inadmissible.
double safe_log_likelihood(const ModelParams& params, const data::ObservationTable& obs,
                           const data::CovariateTable& cov, const ssm::InitOptions& init = {});

/// Literature-scale starting values; variances from differenced data moments.
ModelParams default_initial_params(const data::ObservationTable& obs, model::ForcingForm form);

EstimationResult maximize_likelihood(const data::ObservationTable& obs, const data::CovariateTable& cov,
                                     model::ForcingForm form, const ModelParams& init,
                                     const EstimationOptions& options = {});

struct StandardErrors {
  Matrix cov_theta;
  Vector std_errors;
  Vector t_stats;
  bool negative_definite = true;
};

/// Numerical Hessian at the optimum, inverted in unconstrained space and mapped to the
/// natural scale with the transform Jacobian.
StandardErrors standard_errors(const optimize::Objective& loglik_of_u, const Vector& u_hat,
                               const Vector& natural_derivative, const Vector& natural_estimates,
                               double hessian_step = 1e-4);
void attach_standard_errors(EstimationResult& result, const data::ObservationTable& obs,
                            const data::CovariateTable& cov, const EstimationOptions& options = {});

struct LrTest {
  double statistic = 0.0;
  double p_value = 1.0;
  int df = 0;
};

/// 2 (unrestricted - restricted) against chi^2_df.
LrTest lr_test(double restricted_loglik, double unrestricted_loglik, int df);

double bic(double loglik, std::size_t k, std::size_t n);

double chi2_survival(double statistic, int df);
double normal_quantile(double p);

struct EcsEstimate {
  double ecs = 0.0;
  double se = 0.0;
};

inline constexpr double kDefaultF2x = 3.93;
inline constexpr double kDefaultF2xHalfWidth = 0.47;

/// ECS = F2x / lambda with a delta-method standard error; Var(F2x) from a 90% interval
/// half-width.
EcsEstimate ecs_with_se(double lambda_hat, double var_lambda, double f2x = kDefaultF2x,
                        double f2x_ci_halfwidth = kDefaultF2xHalfWidth);

struct ModelComparisonRow {
  model::ForcingForm form;
  double loglik = 0.0;
  double bic = 0.0;
  std::size_t k = 0;
  std::optional<LrTest> lr;  ///< empty for the unrestricted model
  bool converged = false;
};

/// Fits every forcing form and compares each restricted form with the unrestricted fit.
/// The unrestricted fit is also started from each restricted optimum, which keeps the
/// nested log-likelihood ordering.
std::vector<ModelComparisonRow> compare_forcing_forms(const data::ObservationTable& obs,
                                                      const data::CovariateTable& cov,
                                                      const EstimationOptions& options = {},
                                                      std::vector<EstimationResult>* fits = nullptr);

/// Per-form LR degrees of freedom versus the unrestricted model.
int lr_degrees_of_freedom(model::ForcingForm form);

}  // namespace statrcm::estimate
