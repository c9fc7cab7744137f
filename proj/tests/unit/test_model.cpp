#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "statrcm/error.hpp"
#include "statrcm/model.hpp"
#include "statrcm/params.hpp"

namespace {

using namespace statrcm;
using namespace statrcm::model;

Constants consts;

PhysicalParams log_params(double f1) {
  PhysicalParams p;
  p.b1 = 0.01;
  p.b2 = 0.02;
  p.c1 = 0.09;
  p.c2 = 0.09;
  p.f1 = f1;
  p.gamma = 1.44;
  p.lambda = 1.42;
  p.h_m = 8.97;
  p.h_d = 265.88;
  return p;
}

// Straight-line evaluation of the six update formulas.
StateVector scalar_transition(const StateVector& x, double e_next, double f_ex, const PhysicalParams& p) {
  const double c0 = 591.3060;
  const double dt = 1.0;
  const double s1 = p.b1 * x[0] * std::exp(-p.c1 * x[5]) - p.b1 * c0;
  const double s2 = p.b2 * x[0] * std::exp(-p.c2 * x[5]) - p.b2 * c0;
  const double g = p.f1 * std::log(x[0] + p.f2 * x[0] * x[0]) + p.f3 * std::sqrt(x[0]);
  const double g0 = p.f1 * std::log(c0 + p.f2 * c0 * c0) + p.f3 * std::sqrt(c0);
  StateVector out;
  out[0] = x[0] + dt * (e_next - s1 - s2);
  out[1] = s1;
  out[2] = s2;
  out[3] = g - g0;
  out[4] = x[4] + dt / p.h_m * (x[3] + f_ex - p.lambda * x[4] - p.gamma * (x[4] - x[5]));
  out[5] = x[5] + dt / p.h_d * p.gamma * (x[4] - x[5]);
  return out;
}

TEST(Forcing, AnomalyVanishesAtPreindustrial) {
  PhysicalParams p = log_params(5.58);
  p.f2 = 1e-4;
  p.f3 = 0.3;
  EXPECT_DOUBLE_EQ(forcing_anomaly(591.3060, p, consts), 0.0);
}

TEST(Forcing, DoubledStockLogForm) {
  EXPECT_NEAR(forcing_anomaly(1182.612, log_params(5.58), consts), 3.8678, 1e-4);
}

TEST(Forcing, Hansen98AtDoubledStock) {
  PhysicalParams p = log_params(0.0);
  apply_forcing_form(p, ForcingForm::Hansen98);
  const double c = 1182.612, c0 = 591.3060;
  const double expected = 5.04 * (std::log(c + 0.00023507 * c * c) - std::log(c0 + 0.00023507 * c0 * c0));
  EXPECT_NEAR(forcing_anomaly(c, p, consts), expected, 1e-12);
}

TEST(Forcing, DomainErrors) {
  EXPECT_THROW(forcing_anomaly(0.0, log_params(5.58), consts), DomainError);
  PhysicalParams p = log_params(5.58);
  p.f2 = -0.01;
  EXPECT_THROW(forcing_anomaly(200.0, p, consts), DomainError);
}

TEST(Forcing, RestrictedFormsMatchUnrestrictedWithPinnedCoefficients) {
  PhysicalParams general = log_params(5.3);
  general.f2 = 2e-4;
  general.f3 = 0.4;
  for (ForcingForm form : kAllForcingForms) {
    PhysicalParams restricted = general;
    apply_forcing_form(restricted, form);
    PhysicalParams pinned = general;
    pinned.f1 = restricted.f1;
    pinned.f2 = restricted.f2;
    pinned.f3 = restricted.f3;
    for (double c : {600.0, 850.0, 1200.0})
      EXPECT_EQ(forcing_anomaly(c, restricted, consts), forcing_anomaly(c, pinned, consts)) << to_string(form);
  }
}

TEST(Sinks, ZeroAtPreindustrialEquilibrium) {
  EXPECT_DOUBLE_EQ(sink_flux_anomaly(591.3060, 0.0, 0.02, 0.09, consts), 0.0);
}

TEST(Sinks, FeedbackMultiplier) {
  const double c = 1000.0;
  const double ratio = (sink_flux_anomaly(c, 1.0, 0.02, 0.09, consts) + 0.02 * 591.3060) / (0.02 * c);
  EXPECT_NEAR(ratio, 0.9139, 1e-4);
}

TEST(Sinks, HandEvaluation) {
  EXPECT_NEAR(sink_flux_anomaly(900.0, 1.0, 0.02, 0.09, consts), 4.6246, 1e-4);
}

TEST(Transition, PreindustrialFixedPoint) {
  const StateVector x = ClimateState::preindustrial(consts).to_vector();
  StateVector y = x;
  for (int i = 0; i < 500; ++i) y = transition_mean(y, StepInputs{}, log_params(5.58), consts);
  EXPECT_EQ(y, x);
}

TEST(Transition, TwoBoxSteadyState) {
  const PhysicalParams p = log_params(5.58);
  const double f = 2.0;
  StateVector x;
  x << 591.3060, 0.0, 0.0, 1.5, f / p.lambda, f / p.lambda;
  const StateVector y = transition_mean(x, StepInputs{0.0, f - 1.5}, p, consts);
  EXPECT_NEAR(y[kSurfaceTemp], x[kSurfaceTemp], 1e-14);
  EXPECT_NEAR(y[kDeepTemp], x[kDeepTemp], 1e-14);
}

TEST(Transition, MatchesScalarFormulas) {
  const ModelParams published = published_estimates();
  StateVector x;
  x << 870.0, 2.5, 2.0, 1.8, 1.0, 0.3;
  const StateVector got = transition_mean(x, StepInputs{10.0, 0.5}, published.physical, published.constants);
  const StateVector want = scalar_transition(x, 10.0, 0.5, published.physical);
  for (int i = 0; i < kStateDim; ++i) EXPECT_NEAR(got[i], want[i], 1e-12 * std::max(1.0, std::abs(want[i]))) << i;
}

TEST(Jacobian, ForcingEntryAtPreindustrial) {
  const PhysicalParams p = log_params(5.58);
  const StateMatrix j = transition_jacobian(ClimateState::preindustrial(consts).to_vector(), p, consts);
  EXPECT_NEAR(j(kCo2Forcing, kCarbon), 5.58 / 591.3060, 1e-15);
}

TEST(Jacobian, ForcingEntersSurfaceTemperature) {
  const PhysicalParams p = log_params(5.58);
  StateVector x;
  x << 800.0, 1.0, 1.0, 1.0, 0.5, 0.2;
  EXPECT_DOUBLE_EQ(transition_jacobian(x, p, consts)(kSurfaceTemp, kCo2Forcing), 1.0 / p.h_m);
}

TEST(Jacobian, MatchesCentralDifferences) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PhysicalParams p = log_params(5.0);
  p.f2 = 1e-4;
  p.f3 = 0.2;
  for (int rep = 0; rep < 100; ++rep) {
    StateVector x;
    x << 600.0 + 600.0 * u(gen), 4.0 * u(gen), 4.0 * u(gen), 3.0 * u(gen), 2.0 * u(gen), u(gen);
    const StateMatrix j = transition_jacobian(x, p, consts);
    for (int k = 0; k < kStateDim; ++k) {
      const double h = 1e-6 * std::max(1.0, std::abs(x[k]));
      StateVector lo = x, hi = x;
      lo[k] -= h;
      hi[k] += h;
      const StateVector fd = (transition_mean(hi, StepInputs{}, p, consts) - transition_mean(lo, StepInputs{}, p, consts)) / (2 * h);
      for (int i = 0; i < kStateDim; ++i) {
        const double scale = std::max({std::abs(j(i, k)), std::abs(fd[i]), 1e-3});
        EXPECT_LT(std::abs(fd[i] - j(i, k)) / scale, 1e-6) << "row " << i << " col " << k;
      }
    }
  }
}

TEST(Jacobian, SparsityPattern) {
  StateVector x;
  x << 800.0, 1.0, 1.0, 1.0, 0.5, 0.2;
  const StateMatrix j = transition_jacobian(x, log_params(5.58), consts);
  const int nonzero[6][6] = {{1, 0, 0, 0, 0, 1}, {1, 0, 0, 0, 0, 1}, {1, 0, 0, 0, 0, 1},
                             {1, 0, 0, 0, 0, 0}, {0, 0, 0, 1, 1, 1}, {0, 0, 0, 0, 1, 1}};
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) EXPECT_EQ(j(r, c) != 0.0, nonzero[r][c] == 1) << r << "," << c;
}

NoiseParams some_noise() {
  NoiseParams n;
  n.sigma2_eps = {0.5, 0.2, 0.3, 0.01, 0.02, 1.0, 1.0};
  n.phi = {0.1, 0.2, 0.3, 0.4, 0.5, 0.5, 0.5};
  n.rho = 0.8;
  n.sigma2_eta = {0.1, 0.2, 0.3, 0.4, 0.5};
  return n;
}

TEST(StationaryCov, WhiteNoiseIsInnovationCov) {
  NoiseParams n = some_noise();
  n.phi.fill(0.0);
  EXPECT_EQ(stationary_measurement_cov(n), measurement_innovation_cov(n));
}

TEST(StationaryCov, GeometricSeriesDiagonal) {
  const ObsMatrix s = stationary_measurement_cov(some_noise());
  EXPECT_NEAR(s(kObsDeepTemp, kObsDeepTemp), 4.0 / 3.0, 1e-14);
  EXPECT_NEAR(s(kObsOhc, kObsOhc), 4.0 / 3.0, 1e-14);
  EXPECT_NEAR(s(kObsDeepTemp, kObsOhc), 0.8 / 0.75, 1e-14);
  for (int i = 0; i < kObsDim; ++i) {
    const double phi = some_noise().phi[static_cast<std::size_t>(i)];
    EXPECT_NEAR(s(i, i), some_noise().sigma2_eps[static_cast<std::size_t>(i)] / (1 - phi * phi), 1e-14);
  }
}

TEST(StationaryCov, SolvesLyapunovAndIsPsd) {
  const NoiseParams n = some_noise();
  const ObsMatrix s = stationary_measurement_cov(n);
  const SystemMatrices sys = assemble_system(log_params(5.58), {}, n, consts);
  EXPECT_LT((s - (sys.Phi * s * sys.Phi + sys.P)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(s, s.transpose());
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<ObsMatrix>(s).eigenvalues().minCoeff(), 0.0);
}

TEST(StationaryCov, RejectsUnitRoot) {
  NoiseParams n = some_noise();
  n.phi[3] = 1.0;
  EXPECT_THROW(stationary_measurement_cov(n), DomainError);
}

TEST(System, MatrixPatterns) {
  const PhysicalParams p = log_params(5.58);
  MeasurementOffsets o;
  o.mu_m = 0.28;
  o.mu_d = 0.05;
  const SystemMatrices sys = assemble_system(p, o, some_noise(), consts);
  Eigen::Matrix<double, 1, 6> last;
  last << 0, 0, 0, 0, 0, p.h_d;
  EXPECT_EQ(sys.A.row(kObsOhc), last);
  Eigen::Matrix<double, 1, 5> r1;
  r1 << -1, -1, 0, 0, 0;
  EXPECT_EQ(sys.R.row(0), r1);
  EXPECT_DOUBLE_EQ(sys.mu[kObsOhc], p.h_d * 0.05);
  EXPECT_EQ(sys.Q, sys.Q.transpose());
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<ObsMatrix>(sys.P).eigenvalues().minCoeff(), 0.0);
}

}  // namespace
