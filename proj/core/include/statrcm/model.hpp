#pragma once

// Physical equations of the climate model: carbon cycle, CO2 forcing, two-box
// energy balance, and the matrices of its nonlinear state-space form.
//
//   y_t       = mu + A x_t + eps_t
//   x_{t+D}   = B(x_t) + W_t + R eta_{t,D},      eta ~ N(0, D Q)
//   eps_{t+D} = Phi eps_t + xi_{t,D},            xi  ~ N(0, D P)
//
// with x = (C, S_ocn, S_lnd, F_co2, T_m, T_d).

#include <array>
#include <string_view>

#include <Eigen/Dense>

namespace statrcm::model {

inline constexpr int kStateDim = 6;
inline constexpr int kObsDim = 7;
inline constexpr int kShockDim = 5;
inline constexpr int kAugmentedDim = kStateDim + kObsDim;

using StateVector = Eigen::Matrix<double, kStateDim, 1>;
using StateMatrix = Eigen::Matrix<double, kStateDim, kStateDim>;
using ObsVector = Eigen::Matrix<double, kObsDim, 1>;
using ObsMatrix = Eigen::Matrix<double, kObsDim, kObsDim>;

/// Positions inside the physical state vector.
enum StateIndex : int { kCarbon = 0, kOceanSink, kLandSink, kCo2Forcing, kSurfaceTemp, kDeepTemp };

/// Positions inside the observation vector.
enum ObsIndex : int { kObsCarbon = 0, kObsOceanSink, kObsLandSink, kObsCo2Forcing, kObsSurfaceTemp, kObsDeepTemp, kObsOhc };

std::string_view state_name(int index);
std::string_view observation_name(int index);

/// Temperature that drives the climate feedback on the carbon sinks.
enum class SinkTemperature { Deep, Surface };

#ifdef STATRCM_SINK_SURFACE_TEMPERATURE
inline constexpr SinkTemperature kDefaultSinkTemperature = SinkTemperature::Surface;
#else
inline constexpr SinkTemperature kDefaultSinkTemperature = SinkTemperature::Deep;
#endif

struct Constants {
  double c_preind = 591.3060;  ///< pre-industrial CO2 stock, GtC
  double t_preind = 0.0;       ///< pre-industrial temperature anomaly, degC
  double delta = 1.0;          ///< time step, years
  double gtc_per_ppm = 2.127;
  SinkTemperature sink_temperature = kDefaultSinkTemperature;

  void validate() const;
};

/// Coefficients of the physical equations. `h_m`/`h_d` are the heat capacities of the
/// mixed layer and deep ocean (W yr m^-2 K^-1).
struct PhysicalParams {
  double b1 = 0.0;
  double b2 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double f1 = 0.0;
  double f2 = 0.0;
  double f3 = 0.0;
  double gamma = 0.0;
  double lambda = 0.0;
  double h_m = 1.0;
  double h_d = 1.0;
};

/// Restrictions on (f1, f2, f3) nested in the general forcing equation.
enum class ForcingForm { Unrestricted, SqrtPlusLog, Log2, SqrtOnly, LogOnly, Hansen98 };

inline constexpr std::array<ForcingForm, 6> kAllForcingForms = {
    ForcingForm::Unrestricted, ForcingForm::SqrtPlusLog, ForcingForm::Log2,
    ForcingForm::SqrtOnly,     ForcingForm::LogOnly,     ForcingForm::Hansen98};

inline constexpr double kHansen98F1 = 5.04;
inline constexpr double kHansen98F2 = 0.00023507;

std::string_view to_string(ForcingForm form);
/// Accepts the CLI spellings: unrestricted, sqrtlog, log2, sqrt, log, hansen98.
ForcingForm parse_forcing_form(std::string_view text);

/// Number of forcing coefficients the form pins (0 for Unrestricted, 3 for Hansen98).
int pinned_forcing_coefficients(ForcingForm form);
bool forcing_coefficient_free(ForcingForm form, int which /* 1, 2 or 3 */);
/// Overwrites the pinned forcing coefficients with the values the form prescribes.
void apply_forcing_form(PhysicalParams& params, ForcingForm form);

struct NoiseParams {
  std::array<double, kShockDim> sigma2_eta{};  ///< OCN, LND, F, m, d
  std::array<double, kObsDim> sigma2_eps{};    ///< C, OCN, LND, F, m, d, OHC
  std::array<double, kObsDim> phi{};
  double rho = 0.0;  ///< correlation of the deep-ocean and OHC measurement innovations

  void validate() const;
};

struct MeasurementOffsets {
  double mu_c = 0.0;
  double mu_o = 0.0;
  double mu_l = 0.0;
  double mu_f = 0.0;
  double mu_m = 0.0;
  double mu_d = 0.0;
};

struct ClimateState {
  double c = 0.0;
  double s_ocn = 0.0;
  double s_lnd = 0.0;
  double f_co2 = 0.0;
  double t_m = 0.0;
  double t_d = 0.0;

  StateVector to_vector() const;
  static ClimateState from_vector(const StateVector& v);
  static ClimateState preindustrial(const Constants& consts);
};

struct CovariateRow {
  int year = 0;
  double e_ff = 0.0;
  double e_luc = 0.0;
  double f_nonco2 = 0.0;
  double f_nat = 0.0;

  double emissions() const { return e_ff + e_luc; }
  double exogenous_forcing() const { return f_nonco2 + f_nat; }
};

/// Exogenous inputs of one transition x_t -> x_{t+D}: total emissions dated t+D and the
/// non-CO2 forcing F^Ex dated t, as they enter the discretized equations.
struct StepInputs {
  double emissions_next = 0.0;
  double exogenous_forcing = 0.0;
};

/// g_F(c) = f1 log(c + f2 c^2) + f3 sqrt(c). Throws DomainError on c <= 0 or a
/// non-positive log argument.
double forcing_level(double c, const PhysicalParams& p);
/// g_F(c) - g_F(c_preind).
double forcing_anomaly(double c, const PhysicalParams& p, const Constants& consts);
double forcing_derivative(double c, const PhysicalParams& p);

/// b c exp(-coeff t) - b c_preind.
double sink_flux_anomaly(double c, double t, double b, double coeff_c, const Constants& consts);

/// Deterministic part of the transition, E[x_{t+D} | x_t].
StateVector transition_mean(const StateVector& x, const StepInputs& inputs, const PhysicalParams& p,
                            const Constants& consts);
ClimateState transition_mean(const ClimateState& x, const StepInputs& inputs, const PhysicalParams& p,
                             const Constants& consts);

/// d transition_mean / d x.
StateMatrix transition_jacobian(const StateVector& x, const PhysicalParams& p, const Constants& consts);

/// Innovation covariance P of the measurement-error AR(1) process (per unit time).
ObsMatrix measurement_innovation_cov(const NoiseParams& noise);

/// Stationary covariance of eps_t. Solves S = Phi S Phi + D P elementwise,
/// S_ij = D P_ij / (1 - phi_i phi_j), which is (I - Phi^2)^-1 P on the diagonal.
/// Throws DomainError when some |phi_i| >= 1.
ObsMatrix stationary_measurement_cov(const NoiseParams& noise, double delta = 1.0);

struct SystemMatrices {
  Eigen::Matrix<double, kObsDim, kStateDim> A;
  ObsVector mu;
  Eigen::Matrix<double, kStateDim, kShockDim> R;
  Eigen::Matrix<double, kShockDim, kShockDim> Q;
  ObsMatrix P;
  ObsMatrix Phi;
};

SystemMatrices assemble_system(const PhysicalParams& p, const MeasurementOffsets& offsets, const NoiseParams& noise,
                               const Constants& consts);

/// The observation equation's intercept vector, (mu_C, mu_O, mu_L, mu_F, mu_m, mu_d, H_d mu_d).
ObsVector measurement_intercept(const MeasurementOffsets& offsets, double h_d);

}  // namespace statrcm::model
