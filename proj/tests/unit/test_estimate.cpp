#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "statrcm/error.hpp"
#include "statrcm/estimate.hpp"
#include "statrcm/mc_study.hpp"
#include "statrcm/synthetic.hpp"

namespace {

using namespace statrcm;
using namespace statrcm::estimate;
using model::ForcingForm;

TEST(Packing, RoundTripBothTransforms) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> normal;
  for (Transform tr : {Transform::Standard, Transform::Alternative}) {
    const ParameterPacking packing(simulate::mc_true_values(), tr);
    for (int rep = 0; rep < 100; ++rep) {
      Vector v(static_cast<Eigen::Index>(packing.size()));
      for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(gen);
      const Vector back = packing.pack(packing.unpack(v));
      EXPECT_LT((back - v).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Packing, FixedPoints) {
  EXPECT_EQ(to_unconstrained(ParamKind::Correlation, 0.0, Transform::Standard), 0.0);
  EXPECT_EQ(to_unconstrained(ParamKind::Variance, 1.0, Transform::Standard), 0.0);
  EXPECT_EQ(to_unconstrained(ParamKind::Correlation, 0.0, Transform::Alternative), 0.0);
}

TEST(Packing, PinnedEntriesComeFromReference) {
  ModelParams ref = simulate::mc_true_values();
  ref.set_form(ForcingForm::LogOnly);
  const ParameterPacking packing(ref);
  const ModelParams out = packing.unpack(packing.pack(ref) * 0.5);
  EXPECT_EQ(out.physical.f2, 0.0);
  EXPECT_EQ(out.physical.f3, 0.0);
  EXPECT_EQ(out.offsets.mu_c, ref.offsets.mu_c);
}

TEST(Params, FreeCountsPerForm) {
  const std::pair<ForcingForm, std::size_t> expected[] = {
      {ForcingForm::Unrestricted, 33}, {ForcingForm::SqrtPlusLog, 32}, {ForcingForm::Log2, 32},
      {ForcingForm::SqrtOnly, 31},     {ForcingForm::LogOnly, 31},     {ForcingForm::Hansen98, 30}};
  for (const auto& [form, k] : expected) {
    ModelParams p = simulate::mc_true_values();
    p.set_form(form);
    EXPECT_EQ(p.free_count(), k) << model::to_string(form);
  }
}

TEST(StandardErrors, QuadraticOracle) {
  Matrix h(3, 3);
  h << 4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0;
  const optimize::Objective f = [&](const Vector& u) { return -0.5 * u.dot(h * u); };
  const StandardErrors se = standard_errors(f, Vector::Zero(3), Vector::Ones(3), Vector::Zero(3));
  EXPECT_TRUE(se.negative_definite);
  EXPECT_LT((se.cov_theta - h.inverse()).cwiseAbs().maxCoeff(), 1e-6);
  for (Eigen::Index i = 0; i < 3; ++i) EXPECT_GE(se.std_errors[i], 0.0);
}

TEST(LrTest, PublishedComparisons) {
  EXPECT_NEAR(lr_test(923.76, 925.79, 2).statistic, 4.06, 1e-9);
  EXPECT_NEAR(lr_test(923.76, 925.79, 2).p_value, 0.1313, 0.002);
  EXPECT_NEAR(lr_test(917.17, 925.79, 2).statistic, 17.24, 1e-9);
  EXPECT_NEAR(lr_test(917.17, 925.79, 2).p_value, 0.00018, 0.002);
}

TEST(LrTest, EdgeCases) {
  const LrTest same = lr_test(100.0, 100.0, 2);
  EXPECT_EQ(same.statistic, 0.0);
  EXPECT_EQ(same.p_value, 1.0);
  EXPECT_THROW(lr_test(101.0, 100.0, 1), EstimationError);
}

TEST(Bic, Values) {
  EXPECT_NEAR(bic(923.76, 31, 64), -1718.60, 0.01);
  EXPECT_NEAR(bic(925.79, 33, 64), -1714.34, 0.01);
  EXPECT_EQ(bic(0.0, 0, 1), 0.0);
}

TEST(Distributions, KnownValues) {
  EXPECT_NEAR(chi2_survival(3.8415, 1), 0.05, 1e-5);
  EXPECT_NEAR(chi2_survival(2.0, 2), std::exp(-1.0), 1e-14);
  EXPECT_NEAR(normal_quantile(0.95), 1.6448536269514722, 1e-12);
  EXPECT_NEAR(normal_quantile(0.5), 0.0, 1e-15);
}

TEST(Ecs, Examples) {
  const EcsEstimate e = ecs_with_se(1.42, 0.51 * 0.51, 3.93, 0.47);
  EXPECT_NEAR(e.ecs, 2.77, 0.01);
  EXPECT_NEAR(e.se, 1.01, 0.01);
  EXPECT_EQ(ecs_with_se(1.42, 0.0, 3.93, 0.0).se, 0.0);
  EXPECT_DOUBLE_EQ(ecs_with_se(2.5, 0.1, 2.5, 0.3).ecs, 1.0);
  EXPECT_THROW(ecs_with_se(0.0, 0.1), Error);
}

struct Fixture {
  data::CovariateTable cov = data::synthetic_historical_covariates();
  data::ObservationTable obs;
  EstimationResult fit;

  Fixture() {
    const ModelParams truth = simulate::mc_true_values();
    obs = simulate::simulate_dataset(truth, cov, data::synthetic_initial_state(truth), 404);
    EstimationOptions opts;
    opts.n_starts = 1;
    fit = maximize_likelihood(obs, cov, ForcingForm::LogOnly, default_initial_params(obs, ForcingForm::LogOnly), opts);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

TEST(Maximize, ConvergesAndReportsFilterLoglik) {
  const Fixture& f = fixture();
  EXPECT_TRUE(f.fit.trace.converged);
  EXPECT_EQ(f.fit.loglik, ssm::ekf_filter(f.fit.theta_hat, f.obs, f.cov).loglik);
  EXPECT_EQ(f.fit.k(), 31u);
  ASSERT_TRUE(f.fit.has_standard_errors);
  for (Eigen::Index i = 0; i < f.fit.std_errors.size(); ++i) EXPECT_GE(f.fit.std_errors[i], 0.0);
  EXPECT_FALSE(f.fit.std_error(ParamId::f2).has_value());
  EXPECT_FALSE(f.fit.std_error(ParamId::mu_c).has_value());
}

TEST(Maximize, RestartAtOptimumStopsQuickly) {
  const Fixture& f = fixture();
  EstimationOptions opts;
  opts.n_starts = 1;
  opts.compute_standard_errors = false;
  const EstimationResult again = maximize_likelihood(f.obs, f.cov, ForcingForm::LogOnly, f.fit.theta_hat, opts);
  EXPECT_LE(again.trace.iterations, 3);
  EXPECT_LT(std::abs(again.loglik - f.fit.loglik), 1e-6);
}

TEST(Maximize, TransformInvariance) {
  const Fixture& f = fixture();
  EstimationOptions opts;
  opts.n_starts = 1;
  opts.compute_standard_errors = false;
  opts.transform = Transform::Alternative;
  const EstimationResult alt = maximize_likelihood(f.obs, f.cov, ForcingForm::LogOnly, f.fit.theta_hat, opts);
  for (ParamId id : f.fit.free_ids) {
    const double a = f.fit.theta_hat.get(id), b = alt.theta_hat.get(id);
    EXPECT_LT(std::abs(a - b) / std::max(1.0, std::abs(a)), 1e-4) << param_name(id);
  }
}

TEST(Maximize, RecoversForcingCoefficientOnSimulatedData) {
  const ModelParams truth = published_estimates();
  const data::CovariateTable cov = data::synthetic_historical_covariates();
  const data::ObservationTable obs = simulate::simulate_dataset(truth, cov, data::synthetic_initial_state(truth), 505);
  EstimationOptions opts;
  opts.n_starts = 1;
  opts.compute_standard_errors = false;
  const EstimationResult fit = maximize_likelihood(obs, cov, ForcingForm::LogOnly, truth, opts);
  EXPECT_NEAR(fit.theta_hat.physical.f1, 5.58, 3 * 0.01);
}

TEST(Maximize, NoFiniteStartThrows) {
  const Fixture& f = fixture();
  data::ObservationTable corrupt = f.obs;
  corrupt.rows[20].values[0] = 1e300;
  EstimationOptions opts;
  opts.n_starts = 2;
  EXPECT_THROW(maximize_likelihood(corrupt, f.cov, ForcingForm::LogOnly, f.fit.theta_hat, opts), EstimationError);
}

TEST(CompareForms, NestingAndDegreesOfFreedom) {
  const Fixture& f = fixture();
  EstimationOptions opts;
  opts.n_starts = 1;
  opts.compute_standard_errors = false;
  const std::vector<ModelComparisonRow> rows = compare_forcing_forms(f.obs, f.cov, opts);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].form, ForcingForm::Unrestricted);
  EXPECT_FALSE(rows[0].lr.has_value());
  for (const auto& row : rows) {
    EXPECT_LE(row.loglik, rows[0].loglik + 1e-4) << model::to_string(row.form);
    EXPECT_NEAR(row.bic, bic(row.loglik, row.k, 64), 1e-9);
  }
  EXPECT_EQ(lr_degrees_of_freedom(ForcingForm::LogOnly), 2);
  EXPECT_EQ(lr_degrees_of_freedom(ForcingForm::Log2), 1);
  EXPECT_EQ(lr_degrees_of_freedom(ForcingForm::Hansen98), 3);
}

}  // namespace
