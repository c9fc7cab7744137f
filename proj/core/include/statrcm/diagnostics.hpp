#pragma once

// Residual diagnostics for standardized one-step-ahead prediction errors.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace statrcm::diagnostics {

inline constexpr std::size_t kMinObservations = 12;

struct SeriesDiagnostics {
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0;       ///< n - 1 denominator
  double skewness = 0.0;  ///< m3 / m2^1.5 with population moments
  double kurtosis = 0.0;  ///< raw, Gaussian = 3
  double sc = 0.0;        ///< no-intercept OLS slope of e_t on e_{t-1}
  double jb = 0.0;
  double dw = 0.0;
  double lb1 = 0.0;
  double lb5 = 0.0;
  double lb10 = 0.0;
  double arch = 0.0;  ///< (n - 1) R^2 of e_t^2 on a constant and e_{t-1}^2
};

/// Ljung-Box Q with autocorrelations about the sample mean.
double ljung_box(std::span<const double> e, int lags);

/// Missing values (NaN) are dropped; nullopt when fewer than kMinObservations remain.
std::optional<SeriesDiagnostics> series_diagnostics(std::span<const double> residuals);

struct DiagnosticsReport {
  std::vector<std::string> names;
  std::vector<std::optional<SeriesDiagnostics>> series;
};

/// One entry per column of the (T x p) residual matrix.
DiagnosticsReport residual_diagnostics(const Eigen::MatrixXd& residuals, const std::vector<std::string>& names);

}  // namespace statrcm::diagnostics
