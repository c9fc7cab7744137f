#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "statrcm/model.hpp"

namespace statrcm {

/// Canonical ordering of the 37 unknowns:
/// physical (11), offsets (6), rho, phi (7), measurement variances (7), state variances (5).
enum class ParamId : int {
  b1, b2, c1, c2, f1, f2, f3, gamma, lambda, h_m, h_d,
  mu_c, mu_l, mu_o, mu_f, mu_m, mu_d,
  rho,
  phi_c, phi_ocn, phi_lnd, phi_f, phi_m, phi_d, phi_ohc,
  s2eps_c, s2eps_ocn, s2eps_lnd, s2eps_f, s2eps_m, s2eps_d, s2eps_ohc,
  s2eta_ocn, s2eta_lnd, s2eta_f, s2eta_m, s2eta_d,
};

inline constexpr std::size_t kParamCount = 37;

enum class ParamKind { Real, Positive, Variance, Correlation };

std::string_view param_name(ParamId id);
std::optional<ParamId> param_from_name(std::string_view name);
ParamKind param_kind(ParamId id);
bool is_physical(ParamId id);
inline std::size_t index_of(ParamId id) { return static_cast<std::size_t>(id); }
inline ParamId param_at(std::size_t i) { return static_cast<ParamId>(static_cast<int>(i)); }

/// Physical coefficients in the order they are reported and sampled:
/// b1, b2, c1, c2, f1, f2, f3, gamma, lambda, H_m, H_d.
std::vector<ParamId> physical_param_ids();

/// Full parameter set of the model plus which entries are estimated.
struct ModelParams {
  model::PhysicalParams physical;
  model::MeasurementOffsets offsets;
  model::NoiseParams noise;
  model::ForcingForm form = model::ForcingForm::LogOnly;
  model::Constants constants;
  std::array<bool, kParamCount> free{};

  double get(ParamId id) const;
  void set(ParamId id, double value);

  /// Free mask for `form`: the forcing coefficients the form pins and mu_C, mu_L, mu_O,
  /// mu_F are fixed; everything else is estimated.
  static std::array<bool, kParamCount> default_free_mask(model::ForcingForm form);

  /// Switches the forcing form, pinning coefficients and resetting the free mask.
  void set_form(model::ForcingForm new_form);
  std::vector<ParamId> free_ids() const;
  std::size_t free_count() const;
  model::SystemMatrices system() const;
  void validate() const;
};

/// Reported point estimates: Table 3 (physical, offsets) and Tables 5-6 (noise) of the
/// historical 1959-2022 fit under the logarithmic forcing form, rounded as published.
ModelParams published_estimates();

/// Reported standard errors matching `published_estimates()` (0 where pinned).
std::array<double, kParamCount> published_standard_errors();

}  // namespace statrcm
