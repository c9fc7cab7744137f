#pragma once

// Built-in synthetic inputs for self-contained runs and tests. The shapes loosely follow
// the 1959-2022 emission and forcing record and a strong-mitigation pathway, but they are
// hand-made stand-ins, not data.

#include "statrcm/data.hpp"
#include "statrcm/params.hpp"

namespace statrcm::data {

/// Covariates for 1959-2022 (64 years).
CovariateTable synthetic_historical_covariates();

/// A strong-mitigation covariate pathway for `first_year`..2100; natural forcing is held at
/// `natural_forcing`.
ScenarioTable synthetic_mitigation_scenario(int first_year = 2023, double natural_forcing = 0.1);

/// Plausible 1959 physical state consistent with `params`: CO2 stock of 672.1 GtC
/// (316 ppm), T_m = 0.3, T_d = 0.05 and sinks/forcing from the deterministic equations.
model::ClimateState synthetic_initial_state(const ModelParams& params);

}  // namespace statrcm::data
