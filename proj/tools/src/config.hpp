#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "statrcm/model.hpp"
#include "statrcm/simulate.hpp"

namespace statrcm::cli {

/// Everything a run needs. Loaded from an INI file, then overridden by command-line flags.
struct RunConfig {
  // [data]
  std::filesystem::path observations;  ///< empty: built-in synthetic observations
  std::filesystem::path covariates;    ///< empty: built-in synthetic covariates
  std::filesystem::path scenario;      ///< empty: built-in mitigation pathway
  bool impute_trailing_forcing = true;
  int fit_window = 5;
  bool ohc_in_zettajoules = false;
  std::uint64_t synthetic_seed = 1959;

  // [model]
  model::ForcingForm form = model::ForcingForm::LogOnly;
  std::filesystem::path params;  ///< estimates written by `estimate`; empty: estimate first

  // [estimation]
  int n_starts = 5;
  double jitter = 0.15;
  int max_iterations = 500;
  double f2x = 3.93;
  double f2x_halfwidth = 0.47;

  // [simulation]
  std::optional<simulate::UncertaintySetup> setup;  ///< unset: every setup
  std::size_t n_paths = 10000;
  std::uint64_t seed = 20240313;
  double threshold = 1.5;
  std::optional<int> window_first;
  std::optional<int> window_last;
  bool start_from_smoothed = false;
  std::size_t trajectories = 50;

  // [mc]
  std::size_t mc_reps = 200;
  std::size_t mc_obs = 64;

  // [output]
  std::filesystem::path out_dir = "statrcm-out";
};

/// Reads an INI file. Relative data paths resolve against the file's directory. Unknown
/// keys are rejected.
RunConfig load_config(const std::filesystem::path& path);

/// Writes the resolved configuration in the same INI layout.
void write_config(const RunConfig& config, const std::filesystem::path& path);

/// Checks values that every command relies on.
void validate_config(const RunConfig& config);

}  // namespace statrcm::cli
