#include "statrcm/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace statrcm::data {

namespace {

using Anchors = std::vector<std::pair<int, double>>;

double interpolate(const Anchors& anchors, int year) {
  if (year <= anchors.front().first) return anchors.front().second;
  if (year >= anchors.back().first) return anchors.back().second;
  for (std::size_t i = 1; i < anchors.size(); ++i) {
    if (year <= anchors[i].first) {
      const auto [x0, y0] = anchors[i - 1];
      const auto [x1, y1] = anchors[i];
      return y0 + (y1 - y0) * static_cast<double>(year - x0) / static_cast<double>(x1 - x0);
    }
  }
  return anchors.back().second;
}

double volcanic(int year) {
  switch (year) {
    case 1963: return -0.9;
    case 1964: return -1.2;
    case 1965: return -0.6;
    case 1966: return -0.3;
    case 1982: return -1.0;
    case 1983: return -1.3;
    case 1984: return -0.5;
    case 1991: return -1.3;
    case 1992: return -2.5;
    case 1993: return -0.9;
    case 1994: return -0.3;
    default: return 0.0;
  }
}

}  // namespace

CovariateTable synthetic_historical_covariates() {
  const Anchors e_ff = {{1959, 2.45}, {1973, 4.65}, {1980, 5.3}, {1990, 6.1}, {2000, 6.8},
                        {2010, 9.0},  {2019, 9.9},  {2020, 9.4}, {2022, 9.9}};
  const Anchors e_luc = {{1959, 1.8}, {1990, 1.6}, {2022, 1.2}};
  const Anchors f_non = {{1959, 0.05}, {1980, 0.15}, {2000, 0.3}, {2022, 0.6}};
  CovariateTable table;
  for (int year = 1959; year <= 2022; ++year) {
    const double solar = 0.05 * std::sin(2.0 * std::numbers::pi * (year - 1958) / 11.0);
    table.rows.push_back(model::CovariateRow{year, interpolate(e_ff, year), interpolate(e_luc, year),
                                             interpolate(f_non, year), 0.1 + solar + volcanic(year)});
  }
  return table;
}

ScenarioTable synthetic_mitigation_scenario(int first_year, double natural_forcing) {
  const Anchors e_total = {{2023, 10.8}, {2030, 7.0},  {2040, 3.0},  {2050, 0.5},
                           {2060, -1.5}, {2080, -3.0}, {2100, -3.7}};
  const Anchors f_non = {{2023, 0.6}, {2030, 0.55}, {2050, 0.45}, {2100, 0.3}};
  ScenarioTable table;
  for (int year = first_year; year <= 2100; ++year)
    table.rows.push_back(model::CovariateRow{year, interpolate(e_total, year), 0.0, interpolate(f_non, year), natural_forcing});
  return table;
}

model::ClimateState synthetic_initial_state(const ModelParams& params) {
  const auto& p = params.physical;
  const auto& k = params.constants;
  model::ClimateState x;
  x.c = 672.1;
  x.t_m = 0.3;
  x.t_d = 0.05;
  const double t_sink = k.sink_temperature == model::SinkTemperature::Deep ? x.t_d : x.t_m;
  x.s_ocn = model::sink_flux_anomaly(x.c, t_sink, p.b1, p.c1, k);
  x.s_lnd = model::sink_flux_anomaly(x.c, t_sink, p.b2, p.c2, k);
  x.f_co2 = model::forcing_anomaly(x.c, p, k);
  return x;
}

}  // namespace statrcm::data
