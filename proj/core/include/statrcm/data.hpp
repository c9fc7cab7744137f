#pragma once

// Canonical CSV tables for observations, covariates and scenarios.
//
//   observations.csv  year,c_star,s_ocn_star,s_lnd_star,f_co2_star,t_m_star,t_d_star,ohc_star
//   covariates.csv    year,e_ff,e_luc,f_nonco2,f_nat
//   scenario.csv      year,e_ff,e_luc,f_nonco2,f_nat   or   year,e_total,f_nonco2,f_nat
//
// Empty observation cells are missing values. Covariates must be complete after the
// optional trailing-forcing imputation.

#include <array>
#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "statrcm/model.hpp"

namespace statrcm::data {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

inline constexpr std::array<const char*, model::kObsDim> kObservationColumns = {
    "c_star", "s_ocn_star", "s_lnd_star", "f_co2_star", "t_m_star", "t_d_star", "ohc_star"};

struct ObservationRow {
  int year = 0;
  std::array<double, model::kObsDim> values{};  ///< NaN marks a missing entry

  int observed_count() const;
};

struct ObservationTable {
  std::vector<ObservationRow> rows;
  std::vector<std::string> warnings;

  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }
  int first_year() const { return rows.front().year; }
  int last_year() const { return rows.back().year; }
  /// (T x 7) matrix with NaN in missing cells.
  Eigen::MatrixXd matrix() const;
  /// Entries of one series in time order, missing ones included as NaN.
  std::vector<double> series(int column) const;
  void validate() const;
};

struct CovariateTable {
  std::vector<model::CovariateRow> rows;
  std::vector<std::string> warnings;

  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }
  int first_year() const { return rows.front().year; }
  int last_year() const { return rows.back().year; }
  /// Contiguous sub-range [first, last] of years; throws DataError when not covered.
  CovariateTable slice(int first, int last) const;
  void validate() const;
};

using ScenarioTable = CovariateTable;

struct CovariateLoadOptions {
  /// Fill trailing empty f_nonco2 / f_nat cells with an OLS trend fitted to the last
  /// `fit_window` complete years.
  bool impute_trailing_forcing = false;
  int fit_window = 5;
};

struct ScenarioLoadOptions {
  /// When set, the scenario must start at this year.
  std::optional<int> expected_first_year;
  /// Natural forcing used for empty f_nat cells (held constant at the last in-sample value).
  std::optional<double> hold_natural_forcing;
};

ObservationTable load_observations(const std::filesystem::path& path);
CovariateTable load_covariates(const std::filesystem::path& path, const CovariateLoadOptions& options = {});
ScenarioTable load_scenario(const std::filesystem::path& path, const ScenarioLoadOptions& options = {});

void write_observations(const std::filesystem::path& path, const ObservationTable& table);
void write_covariates(const std::filesystem::path& path, const CovariateTable& table);

/// Checks that the two tables cover the same contiguous years.
void check_aligned(const ObservationTable& obs, const CovariateTable& cov);

/// Extrapolates an OLS line fitted to the last `fit_window` values over `horizon` steps.
std::vector<double> impute_linear_trend(std::span<const double> series, int fit_window, int horizon);

struct OhcConversion {
  double earth_area_m2 = 5.101e14;
  double seconds_per_year = 3.1557e7;
};

/// Ocean heat content from zettajoules to W yr m^-2.
double convert_ohc_units(double value_zj, const OhcConversion& conv = {});

}  // namespace statrcm::data
