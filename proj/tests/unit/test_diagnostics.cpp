#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "statrcm/diagnostics.hpp"

namespace {

using namespace statrcm::diagnostics;

// Direct summation, one loop per statistic.
struct Naive {
  double mean, std, skew, kurt, sc, jb, dw, lb1, lb5, lb10, arch;
};

double naive_lb(const std::vector<double>& e, int p) {
  const double n = static_cast<double>(e.size());
  double m = 0.0;
  for (double v : e) m += v;
  m /= n;
  double den = 0.0;
  for (double v : e) den += (v - m) * (v - m);
  double q = 0.0;
  for (int k = 1; k <= p; ++k) {
    double num = 0.0;
    for (std::size_t t = static_cast<std::size_t>(k); t < e.size(); ++t) num += (e[t] - m) * (e[t - k] - m);
    const double r = num / den;
    q += r * r / (n - k);
  }
  return n * (n + 2) * q;
}

Naive naive(const std::vector<double>& e) {
  const double n = static_cast<double>(e.size());
  Naive out{};
  for (double v : e) out.mean += v;
  out.mean /= n;
  double m2 = 0, m3 = 0, m4 = 0;
  for (double v : e) {
    const double d = v - out.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  out.std = std::sqrt(m2 / (n - 1));
  m2 /= n;
  m3 /= n;
  m4 /= n;
  out.skew = m3 / std::pow(m2, 1.5);
  out.kurt = m4 / (m2 * m2);
  out.jb = n / 6.0 * (out.skew * out.skew + (out.kurt - 3) * (out.kurt - 3) / 4.0);

  double sxy = 0, sxx = 0, dnum = 0, dden = 0;
  for (std::size_t t = 1; t < e.size(); ++t) {
    sxy += e[t] * e[t - 1];
    sxx += e[t - 1] * e[t - 1];
    dnum += (e[t] - e[t - 1]) * (e[t] - e[t - 1]);
  }
  for (double v : e) dden += v * v;
  out.sc = sxy / sxx;
  out.dw = dnum / dden;
  out.lb1 = naive_lb(e, 1);
  out.lb5 = naive_lb(e, 5);
  out.lb10 = naive_lb(e, 10);

  // e_t^2 on (1, e_{t-1}^2)
  std::vector<double> y, x;
  for (std::size_t t = 1; t < e.size(); ++t) {
    y.push_back(e[t] * e[t]);
    x.push_back(e[t - 1] * e[t - 1]);
  }
  const double k = static_cast<double>(y.size());
  double my = 0, mx = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    my += y[i];
    mx += x[i];
  }
  my /= k;
  mx /= k;
  double cxy = 0, cxx = 0, cyy = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    cxy += (x[i] - mx) * (y[i] - my);
    cxx += (x[i] - mx) * (x[i] - mx);
    cyy += (y[i] - my) * (y[i] - my);
  }
  out.arch = k * (cxy * cxy) / (cxx * cyy);
  return out;
}

void expect_close(double got, double want, const char* what) {
  EXPECT_LT(std::abs(got - want), 1e-10 * std::max(1.0, std::abs(want))) << what << ": " << got << " vs " << want;
}

TEST(Diagnostics, MatchNaiveSummation) {
  std::mt19937_64 gen(17);
  std::student_t_distribution<double> t(5.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> e(40 + 3 * rep);
    for (double& v : e) v = 0.3 + t(gen);
    const auto d = series_diagnostics(e);
    ASSERT_TRUE(d.has_value());
    const Naive n = naive(e);
    EXPECT_EQ(d->n, e.size());
    expect_close(d->mean, n.mean, "mean");
    expect_close(d->std, n.std, "std");
    expect_close(d->skewness, n.skew, "skewness");
    expect_close(d->kurtosis, n.kurt, "kurtosis");
    expect_close(d->sc, n.sc, "sc");
    expect_close(d->jb, n.jb, "jb");
    expect_close(d->dw, n.dw, "dw");
    expect_close(d->lb1, n.lb1, "lb1");
    expect_close(d->lb5, n.lb5, "lb5");
    expect_close(d->lb10, n.lb10, "lb10");
    expect_close(d->arch, n.arch, "arch");
  }
}

TEST(Diagnostics, AlternatingSeriesDurbinWatson) {
  std::vector<double> e(64);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = i % 2 == 0 ? 1.0 : -1.0;
  EXPECT_NEAR(series_diagnostics(e)->dw, 63.0 * 4.0 / 64.0, 1e-12);
}

TEST(Diagnostics, SymmetricSampleHasZeroSkew) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> normal;
  std::vector<double> e;
  for (int i = 0; i < 30; ++i) e.push_back(normal(gen));
  for (int i = 0; i < 30; ++i) e.push_back(-e[static_cast<std::size_t>(i)]);
  const auto d = series_diagnostics(e);
  EXPECT_NEAR(d->skewness, 0.0, 1e-12);
  EXPECT_NEAR(d->jb, 60.0 * (d->kurtosis - 3) * (d->kurtosis - 3) / 24.0, 1e-10);
}

TEST(Diagnostics, MissingValuesDroppedAndShortSeriesAbsent) {
  std::vector<double> e = {0.1, NAN, -0.4, 0.9, 1.2, -0.3, NAN, 0.5, -1.1, 0.2, 0.8, -0.6, 0.4, 0.0};
  const auto d = series_diagnostics(e);
  ASSERT_TRUE(d.has_value());
  EXPECT_EQ(d->n, 12u);
  e.resize(12);
  EXPECT_FALSE(series_diagnostics(e).has_value());
}

TEST(Diagnostics, ReportPerColumn) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Random(30, 2);
  r.col(1).setConstant(NAN);
  const DiagnosticsReport rep = residual_diagnostics(r, {"a", "b"});
  ASSERT_EQ(rep.series.size(), 2u);
  EXPECT_TRUE(rep.series[0].has_value());
  EXPECT_FALSE(rep.series[1].has_value());
  EXPECT_EQ(rep.names[1], "b");
}

}  // namespace
