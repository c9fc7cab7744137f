#pragma once

// Forward simulation of the climate model under covariate scenarios.

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "statrcm/data.hpp"
#include "statrcm/params.hpp"
#include "statrcm/ssm.hpp"

namespace statrcm::simulate {

/// Deterministic: point estimates, no noise. ParamOnly: physical parameters drawn, no noise.
/// ParamState: adds the initial-state spread and state shocks. ParamStateMeas: adds
/// measurement errors.
enum class UncertaintySetup { Deterministic, ParamOnly, ParamState, ParamStateMeas };

inline constexpr std::array<UncertaintySetup, 4> kAllSetups = {
    UncertaintySetup::Deterministic, UncertaintySetup::ParamOnly, UncertaintySetup::ParamState,
    UncertaintySetup::ParamStateMeas};

/// CLI spellings: det, param, param-state, full.
std::string_view to_string(UncertaintySetup setup);
UncertaintySetup parse_setup(std::string_view text);

/// Normal law of the physical parameters around the estimates; everything else fixed.
class ParameterDistribution {
 public:
  /// `ids` name the rows/columns of `cov`; all must be physical parameters.
  ParameterDistribution(ModelParams center, std::vector<ParamId> ids, Eigen::MatrixXd cov);
  /// Point mass at `center`.
  explicit ParameterDistribution(ModelParams center);

  const ModelParams& center() const { return center_; }
  const std::vector<ParamId>& ids() const { return ids_; }
  const Eigen::MatrixXd& cov() const { return cov_; }
  /// Square root L with L L' = cov.
  const Eigen::MatrixXd& root() const { return root_; }

 private:
  ModelParams center_;
  std::vector<ParamId> ids_;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd root_;
};

/// Symmetric PSD square root: Cholesky when possible, otherwise from the eigendecomposition
/// with negative eigenvalues clipped to zero.
Eigen::MatrixXd matrix_root(const Eigen::MatrixXd& cov);

/// Draws N(center, cov) and redraws when a draw is inadmissible: non-positive heat
/// capacity, or a forcing log argument that is not positive at some concentration in
/// [c_preind, max_concentration]. Throws SimulationError after `max_rejections` redraws.
ModelParams sample_physical_params(const ParameterDistribution& dist, std::uint64_t key, double max_concentration,
                                   int max_rejections = 1000);

struct Scenario {
  /// Row 0 is the start year, whose state is drawn from `initial`; rows 1.. drive the
  /// transitions.
  data::CovariateTable covariates;
  ssm::GaussianBelief initial;
};

/// Initial belief concentrated on a fixed physical state, with stationary measurement errors.
ssm::GaussianBelief point_belief(const model::ClimateState& state, const ModelParams& params);

class PathEnsemble {
 public:
  PathEnsemble() = default;
  PathEnsemble(std::size_t n_paths, std::vector<int> years);

  std::size_t n_paths() const { return n_paths_; }
  std::size_t horizon() const { return years_.size(); }
  const std::vector<int>& years() const { return years_; }

  double& state(std::size_t path, std::size_t t, int i) { return states_[(path * horizon() + t) * model::kStateDim + i]; }
  double state(std::size_t path, std::size_t t, int i) const {
    return states_[(path * horizon() + t) * model::kStateDim + i];
  }
  double& obs(std::size_t path, std::size_t t, int j) { return obs_[(path * horizon() + t) * model::kObsDim + j]; }
  double obs(std::size_t path, std::size_t t, int j) const { return obs_[(path * horizon() + t) * model::kObsDim + j]; }

  bool valid(std::size_t path) const { return valid_[path] != 0; }
  void set_valid(std::size_t path, bool v) { valid_[path] = v ? 1 : 0; }
  std::size_t invalid_count() const;

  UncertaintySetup setup = UncertaintySetup::Deterministic;
  std::uint64_t seed = 0;
  model::MeasurementOffsets offsets;  ///< offsets of the centre parameters

 private:
  std::size_t n_paths_ = 0;
  std::vector<int> years_;
  std::vector<double> states_;
  std::vector<double> obs_;
  std::vector<char> valid_;
};

struct SimulationOptions {
  int threads = 1;
  /// Upper end of the concentration range checked when validating parameter draws.
  double max_concentration = 2000.0;
};

/// Simulates `n_paths` trajectories. Randomness of path p comes from keys derived from
/// (seed, p, time), so results do not depend on `threads`; parameter draws do not depend
/// on the setup, which gives common random numbers across setups.
PathEnsemble simulate_paths(const ParameterDistribution& dist, const Scenario& scenario, UncertaintySetup setup,
                            std::size_t n_paths, std::uint64_t seed, const SimulationOptions& options = {});

enum class Scale { State, Observation };

struct QuantileBands {
  std::vector<int> years;
  std::vector<double> probs;
  Eigen::MatrixXd values;  ///< horizon x probs
  std::vector<std::size_t> valid_paths;
};

/// Linear interpolation between order statistics, h = (n - 1) p.
double quantile_sorted(const std::vector<double>& sorted, double p);

/// Pointwise quantiles of a state (Scale::State, index into the physical state) or an
/// observation (Scale::Observation, index into the observation vector).
QuantileBands quantile_bands(const PathEnsemble& ensemble, int variable, Scale scale,
                             const std::vector<double>& probs = {0.025, 0.5, 0.975});

/// Share of valid paths whose surface temperature exceeds `threshold` in some year of
/// [first_year, last_year]. The state scale uses T_m + mu_m, the observation scale the
/// simulated measurement (which adds the measurement error).
double exceedance_probability(const PathEnsemble& ensemble, double threshold, Scale scale, int first_year,
                              int last_year);

}  // namespace statrcm::simulate
