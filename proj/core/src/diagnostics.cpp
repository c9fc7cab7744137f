#include "statrcm/diagnostics.hpp"

#include <cmath>
#include <numeric>

#include "statrcm/error.hpp"

namespace statrcm::diagnostics {

namespace {

double mean_of(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

}  // namespace

double ljung_box(std::span<const double> e, int lags) {
  const std::size_t n = e.size();
  if (lags < 1 || static_cast<std::size_t>(lags) >= n) throw Error("Ljung-Box lag order must lie in [1, n)");
  const double m = mean_of(e);
  double denom = 0.0;
  for (double v : e) denom += (v - m) * (v - m);
  double q = 0.0;
  for (int k = 1; k <= lags; ++k) {
    double num = 0.0;
    for (std::size_t t = static_cast<std::size_t>(k); t < n; ++t) num += (e[t] - m) * (e[t - k] - m);
    const double r = num / denom;
    q += r * r / static_cast<double>(n - static_cast<std::size_t>(k));
  }
  const double nn = static_cast<double>(n);
  return nn * (nn + 2.0) * q;
}

std::optional<SeriesDiagnostics> series_diagnostics(std::span<const double> residuals) {
  std::vector<double> e;
  for (double v : residuals)
    if (!std::isnan(v)) e.push_back(v);
  if (e.size() < kMinObservations) return std::nullopt;

  SeriesDiagnostics d;
  const std::size_t n = e.size();
  const double nn = static_cast<double>(n);
  d.n = n;
  d.mean = mean_of(e);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : e) {
    const double c = v - d.mean;
    m2 += c * c;
    m3 += c * c * c;
    m4 += c * c * c * c;
  }
  d.std = std::sqrt(m2 / (nn - 1.0));
  m2 /= nn;
  m3 /= nn;
  m4 /= nn;
  d.skewness = m3 / std::pow(m2, 1.5);
  d.kurtosis = m4 / (m2 * m2);
  d.jb = nn / 6.0 * (d.skewness * d.skewness + (d.kurtosis - 3.0) * (d.kurtosis - 3.0) / 4.0);

  double cross = 0.0, lagged_sq = 0.0, diff_sq = 0.0, sq = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    sq += e[t] * e[t];
    if (t == 0) continue;
    cross += e[t] * e[t - 1];
    lagged_sq += e[t - 1] * e[t - 1];
    diff_sq += (e[t] - e[t - 1]) * (e[t] - e[t - 1]);
  }
  d.sc = cross / lagged_sq;
  d.dw = diff_sq / sq;
  d.lb1 = ljung_box(e, 1);
  d.lb5 = ljung_box(e, 5);
  d.lb10 = ljung_box(e, 10);

  // ARCH(1): regress e_t^2 on (1, e_{t-1}^2)
  const std::size_t m = n - 1;
  double sx = 0.0, sy = 0.0;
  for (std::size_t t = 1; t < n; ++t) {
    sx += e[t - 1] * e[t - 1];
    sy += e[t] * e[t];
  }
  const double mx = sx / static_cast<double>(m);
  const double my = sy / static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t t = 1; t < n; ++t) {
    const double x = e[t - 1] * e[t - 1] - mx;
    const double y = e[t] * e[t] - my;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double r2 = (sxx > 0.0 && syy > 0.0) ? sxy * sxy / (sxx * syy) : 0.0;
  d.arch = static_cast<double>(m) * r2;
  return d;
}

DiagnosticsReport residual_diagnostics(const Eigen::MatrixXd& residuals, const std::vector<std::string>& names) {
  if (names.size() != static_cast<std::size_t>(residuals.cols()))
    throw Error("one series name is needed per residual column");
  DiagnosticsReport report;
  report.names = names;
  for (Eigen::Index j = 0; j < residuals.cols(); ++j) {
    const Eigen::VectorXd col = residuals.col(j);
    report.series.push_back(series_diagnostics(std::span<const double>(col.data(), static_cast<std::size_t>(col.size()))));
  }
  return report;
}

}  // namespace statrcm::diagnostics
