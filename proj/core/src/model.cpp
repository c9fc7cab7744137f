#include "statrcm/model.hpp"

#include <cmath>
#include <string>

#include "statrcm/error.hpp"

namespace statrcm::model {

namespace {

constexpr std::array<std::string_view, kStateDim> kStateNames = {"C", "S_OCN", "S_LND", "F_CO2", "T_m", "T_d"};
constexpr std::array<std::string_view, kObsDim> kObsNames = {"C", "OCN", "LND", "Forc", "Temp", "O-Temp", "OHC"};

double sink_temperature(const StateVector& x, const Constants& consts) {
  return consts.sink_temperature == SinkTemperature::Deep ? x[kDeepTemp] : x[kSurfaceTemp];
}

}  // namespace

std::string_view state_name(int index) { return kStateNames.at(static_cast<std::size_t>(index)); }
std::string_view observation_name(int index) { return kObsNames.at(static_cast<std::size_t>(index)); }

void Constants::validate() const {
  if (!(c_preind > 0.0)) throw DomainError("pre-industrial CO2 stock must be positive", c_preind);
  if (!(delta > 0.0)) throw DomainError("time step must be positive", delta);
}

std::string_view to_string(ForcingForm form) {
  switch (form) {
    case ForcingForm::Unrestricted: return "unrestricted";
    case ForcingForm::SqrtPlusLog: return "sqrtlog";
    case ForcingForm::Log2: return "log2";
    case ForcingForm::SqrtOnly: return "sqrt";
    case ForcingForm::LogOnly: return "log";
    case ForcingForm::Hansen98: return "hansen98";
  }
  return "unknown";
}

ForcingForm parse_forcing_form(std::string_view text) {
  for (ForcingForm form : kAllForcingForms) {
    if (text == to_string(form)) return form;
  }
  throw ConfigError("unknown forcing form '" + std::string(text) +
                    "' (expected log, sqrt, log2, sqrtlog, hansen98 or unrestricted)");
}

bool forcing_coefficient_free(ForcingForm form, int which) {
  switch (form) {
    case ForcingForm::Unrestricted: return true;
    case ForcingForm::SqrtPlusLog: return which != 2;
    case ForcingForm::Log2: return which != 3;
    case ForcingForm::SqrtOnly: return which == 3;
    case ForcingForm::LogOnly: return which == 1;
    case ForcingForm::Hansen98: return false;
  }
  return false;
}

int pinned_forcing_coefficients(ForcingForm form) {
  int pinned = 0;
  for (int which = 1; which <= 3; ++which) pinned += forcing_coefficient_free(form, which) ? 0 : 1;
  return pinned;
}

void apply_forcing_form(PhysicalParams& p, ForcingForm form) {
  if (form == ForcingForm::Hansen98) {
    p.f1 = kHansen98F1;
    p.f2 = kHansen98F2;
    p.f3 = 0.0;
    return;
  }
  if (!forcing_coefficient_free(form, 1)) p.f1 = 0.0;
  if (!forcing_coefficient_free(form, 2)) p.f2 = 0.0;
  if (!forcing_coefficient_free(form, 3)) p.f3 = 0.0;
}

void NoiseParams::validate() const {
  for (double v : sigma2_eta)
    if (!(v >= 0.0)) throw DomainError("state innovation variance must be non-negative", v);
  for (double v : sigma2_eps)
    if (!(v >= 0.0)) throw DomainError("measurement innovation variance must be non-negative", v);
  for (double v : phi)
    if (!(std::abs(v) < 1.0)) throw DomainError("AR(1) coefficient violates stationarity |phi| < 1", v);
  if (!(std::abs(rho) < 1.0)) throw DomainError("correlation must satisfy |rho| < 1", rho);
}

StateVector ClimateState::to_vector() const {
  StateVector v;
  v << c, s_ocn, s_lnd, f_co2, t_m, t_d;
  return v;
}

ClimateState ClimateState::from_vector(const StateVector& v) {
  return ClimateState{v[0], v[1], v[2], v[3], v[4], v[5]};
}

ClimateState ClimateState::preindustrial(const Constants& consts) {
  return ClimateState{consts.c_preind, 0.0, 0.0, 0.0, consts.t_preind, consts.t_preind};
}

double forcing_level(double c, const PhysicalParams& p) {
  if (!(c > 0.0)) throw DomainError("CO2 stock must be positive in the forcing equation", c);
  const double log_arg = c + p.f2 * c * c;
  if (!(log_arg > 0.0)) throw DomainError("non-positive log argument c + f2 c^2 in the forcing equation", log_arg);
  return p.f1 * std::log(log_arg) + p.f3 * std::sqrt(c);
}

double forcing_anomaly(double c, const PhysicalParams& p, const Constants& consts) {
  return forcing_level(c, p) - forcing_level(consts.c_preind, p);
}

double forcing_derivative(double c, const PhysicalParams& p) {
  if (!(c > 0.0)) throw DomainError("CO2 stock must be positive in the forcing equation", c);
  const double log_arg = c + p.f2 * c * c;
  if (!(log_arg > 0.0)) throw DomainError("non-positive log argument c + f2 c^2 in the forcing equation", log_arg);
  return p.f1 * (1.0 + 2.0 * p.f2 * c) / log_arg + p.f3 / (2.0 * std::sqrt(c));
}

double sink_flux_anomaly(double c, double t, double b, double coeff_c, const Constants& consts) {
  if (!(c > 0.0)) throw DomainError("CO2 stock must be positive in the sink equation", c);
  return b * c * std::exp(-coeff_c * t) - b * consts.c_preind;
}

StateVector transition_mean(const StateVector& x, const StepInputs& inputs, const PhysicalParams& p,
                            const Constants& consts) {
  const double dt = consts.delta;
  const double t_sink = sink_temperature(x, consts);
  const double s_ocn = sink_flux_anomaly(x[kCarbon], t_sink, p.b1, p.c1, consts);
  const double s_lnd = sink_flux_anomaly(x[kCarbon], t_sink, p.b2, p.c2, consts);

  StateVector next;
  next[kCarbon] = x[kCarbon] + dt * (inputs.emissions_next - s_ocn - s_lnd);
  next[kOceanSink] = s_ocn;
  next[kLandSink] = s_lnd;
  next[kCo2Forcing] = forcing_anomaly(x[kCarbon], p, consts);
  next[kSurfaceTemp] = (1.0 - (p.gamma + p.lambda) * dt / p.h_m) * x[kSurfaceTemp] +
                       (p.gamma * dt / p.h_m) * x[kDeepTemp] +
                       (dt / p.h_m) * (x[kCo2Forcing] + inputs.exogenous_forcing);
  next[kDeepTemp] = (p.gamma * dt / p.h_d) * x[kSurfaceTemp] + (1.0 - p.gamma * dt / p.h_d) * x[kDeepTemp];
  return next;
}

ClimateState transition_mean(const ClimateState& x, const StepInputs& inputs, const PhysicalParams& p,
                             const Constants& consts) {
  return ClimateState::from_vector(transition_mean(x.to_vector(), inputs, p, consts));
}

StateMatrix transition_jacobian(const StateVector& x, const PhysicalParams& p, const Constants& consts) {
  const double dt = consts.delta;
  const double c = x[kCarbon];
  if (!(c > 0.0)) throw DomainError("CO2 stock must be positive in the sink equation", c);
  const int t_col = consts.sink_temperature == SinkTemperature::Deep ? kDeepTemp : kSurfaceTemp;
  const double t_sink = x[t_col];
  const double e1 = std::exp(-p.c1 * t_sink);
  const double e2 = std::exp(-p.c2 * t_sink);

  StateMatrix jac = StateMatrix::Zero();
  jac(kOceanSink, kCarbon) = p.b1 * e1;
  jac(kOceanSink, t_col) = -p.b1 * p.c1 * c * e1;
  jac(kLandSink, kCarbon) = p.b2 * e2;
  jac(kLandSink, t_col) = -p.b2 * p.c2 * c * e2;

  jac(kCarbon, kCarbon) = 1.0 - dt * (jac(kOceanSink, kCarbon) + jac(kLandSink, kCarbon));
  jac(kCarbon, t_col) = -dt * (jac(kOceanSink, t_col) + jac(kLandSink, t_col));

  jac(kCo2Forcing, kCarbon) = forcing_derivative(c, p);

  jac(kSurfaceTemp, kCo2Forcing) = dt / p.h_m;
  jac(kSurfaceTemp, kSurfaceTemp) = 1.0 - (p.gamma + p.lambda) * dt / p.h_m;
  jac(kSurfaceTemp, kDeepTemp) = p.gamma * dt / p.h_m;
  jac(kDeepTemp, kSurfaceTemp) = p.gamma * dt / p.h_d;
  jac(kDeepTemp, kDeepTemp) = 1.0 - p.gamma * dt / p.h_d;
  return jac;
}

ObsMatrix measurement_innovation_cov(const NoiseParams& noise) {
  ObsMatrix cov = ObsMatrix::Zero();
  for (int i = 0; i < kObsDim; ++i) cov(i, i) = noise.sigma2_eps[static_cast<std::size_t>(i)];
  const double cross = noise.rho * std::sqrt(noise.sigma2_eps[kObsDeepTemp]) * std::sqrt(noise.sigma2_eps[kObsOhc]);
  cov(kObsDeepTemp, kObsOhc) = cross;
  cov(kObsOhc, kObsDeepTemp) = cross;
  return cov;
}

ObsMatrix stationary_measurement_cov(const NoiseParams& noise, double delta) {
  for (double phi : noise.phi) {
    if (!(std::abs(phi) < 1.0)) throw DomainError("AR(1) coefficient violates stationarity |phi| < 1", phi);
  }
  const ObsMatrix p = measurement_innovation_cov(noise);
  ObsMatrix out;
  for (int i = 0; i < kObsDim; ++i) {
    for (int j = 0; j < kObsDim; ++j) {
      out(i, j) = delta * p(i, j) / (1.0 - noise.phi[static_cast<std::size_t>(i)] * noise.phi[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

ObsVector measurement_intercept(const MeasurementOffsets& o, double h_d) {
  ObsVector mu;
  mu << o.mu_c, o.mu_o, o.mu_l, o.mu_f, o.mu_m, o.mu_d, h_d * o.mu_d;
  return mu;
}

SystemMatrices assemble_system(const PhysicalParams& p, const MeasurementOffsets& offsets, const NoiseParams& noise,
                               const Constants& consts) {
  SystemMatrices sys;
  sys.A.setZero();
  for (int i = 0; i < kStateDim; ++i) sys.A(i, i) = 1.0;
  sys.A(kObsOhc, kDeepTemp) = p.h_d;

  sys.mu = measurement_intercept(offsets, p.h_d);

  sys.R.setZero();
  sys.R(kCarbon, 0) = -consts.delta;
  sys.R(kCarbon, 1) = -consts.delta;
  for (int j = 0; j < kShockDim; ++j) sys.R(j + 1, j) = 1.0;

  sys.Q.setZero();
  for (int j = 0; j < kShockDim; ++j) sys.Q(j, j) = noise.sigma2_eta[static_cast<std::size_t>(j)];

  sys.P = measurement_innovation_cov(noise);
  sys.Phi.setZero();
  for (int i = 0; i < kObsDim; ++i) sys.Phi(i, i) = noise.phi[static_cast<std::size_t>(i)];
  return sys;
}

}  // namespace statrcm::model
