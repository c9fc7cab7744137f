#include "statrcm/params.hpp"

#include <cmath>
#include <string>

#include "statrcm/error.hpp"

namespace statrcm {

namespace {

constexpr std::array<std::string_view, kParamCount> kNames = {
    "b1",        "b2",         "c1",         "c2",        "f1",        "f2",        "f3",
    "gamma",     "lambda",     "h_m",        "h_d",       "mu_c",      "mu_l",      "mu_o",
    "mu_f",      "mu_m",       "mu_d",       "rho",       "phi_c",     "phi_ocn",   "phi_lnd",
    "phi_f",     "phi_m",      "phi_d",      "phi_ohc",   "s2eps_c",   "s2eps_ocn", "s2eps_lnd",
    "s2eps_f",   "s2eps_m",    "s2eps_d",    "s2eps_ohc", "s2eta_ocn", "s2eta_lnd", "s2eta_f",
    "s2eta_m",   "s2eta_d",
};

constexpr int kFirstPhi = static_cast<int>(ParamId::phi_c);
constexpr int kFirstEps = static_cast<int>(ParamId::s2eps_c);
constexpr int kFirstEta = static_cast<int>(ParamId::s2eta_ocn);

}  // namespace

std::string_view param_name(ParamId id) { return kNames.at(index_of(id)); }

std::optional<ParamId> param_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kParamCount; ++i) {
    if (kNames[i] == name) return param_at(i);
  }
  return std::nullopt;
}

ParamKind param_kind(ParamId id) {
  const int i = static_cast<int>(id);
  if (id == ParamId::h_m || id == ParamId::h_d) return ParamKind::Positive;
  if (id == ParamId::rho || (i >= kFirstPhi && i < kFirstEps)) return ParamKind::Correlation;
  if (i >= kFirstEps) return ParamKind::Variance;
  return ParamKind::Real;
}

bool is_physical(ParamId id) { return static_cast<int>(id) <= static_cast<int>(ParamId::h_d); }

std::vector<ParamId> physical_param_ids() {
  std::vector<ParamId> ids;
  for (int i = 0; i <= static_cast<int>(ParamId::h_d); ++i) ids.push_back(static_cast<ParamId>(i));
  return ids;
}

double ModelParams::get(ParamId id) const {
  const int i = static_cast<int>(id);
  if (i >= kFirstEta) return noise.sigma2_eta[static_cast<std::size_t>(i - kFirstEta)];
  if (i >= kFirstEps) return noise.sigma2_eps[static_cast<std::size_t>(i - kFirstEps)];
  if (i >= kFirstPhi) return noise.phi[static_cast<std::size_t>(i - kFirstPhi)];
  switch (id) {
    case ParamId::b1: return physical.b1;
    case ParamId::b2: return physical.b2;
    case ParamId::c1: return physical.c1;
    case ParamId::c2: return physical.c2;
    case ParamId::f1: return physical.f1;
    case ParamId::f2: return physical.f2;
    case ParamId::f3: return physical.f3;
    case ParamId::gamma: return physical.gamma;
    case ParamId::lambda: return physical.lambda;
    case ParamId::h_m: return physical.h_m;
    case ParamId::h_d: return physical.h_d;
    case ParamId::mu_c: return offsets.mu_c;
    case ParamId::mu_l: return offsets.mu_l;
    case ParamId::mu_o: return offsets.mu_o;
    case ParamId::mu_f: return offsets.mu_f;
    case ParamId::mu_m: return offsets.mu_m;
    case ParamId::mu_d: return offsets.mu_d;
    case ParamId::rho: return noise.rho;
    default: break;
  }
  throw Error("unhandled parameter id");
}

void ModelParams::set(ParamId id, double value) {
  const int i = static_cast<int>(id);
  if (i >= kFirstEta) {
    noise.sigma2_eta[static_cast<std::size_t>(i - kFirstEta)] = value;
    return;
  }
  if (i >= kFirstEps) {
    noise.sigma2_eps[static_cast<std::size_t>(i - kFirstEps)] = value;
    return;
  }
  if (i >= kFirstPhi) {
    noise.phi[static_cast<std::size_t>(i - kFirstPhi)] = value;
    return;
  }
  switch (id) {
    case ParamId::b1: physical.b1 = value; return;
    case ParamId::b2: physical.b2 = value; return;
    case ParamId::c1: physical.c1 = value; return;
    case ParamId::c2: physical.c2 = value; return;
    case ParamId::f1: physical.f1 = value; return;
    case ParamId::f2: physical.f2 = value; return;
    case ParamId::f3: physical.f3 = value; return;
    case ParamId::gamma: physical.gamma = value; return;
    case ParamId::lambda: physical.lambda = value; return;
    case ParamId::h_m: physical.h_m = value; return;
    case ParamId::h_d: physical.h_d = value; return;
    case ParamId::mu_c: offsets.mu_c = value; return;
    case ParamId::mu_l: offsets.mu_l = value; return;
    case ParamId::mu_o: offsets.mu_o = value; return;
    case ParamId::mu_f: offsets.mu_f = value; return;
    case ParamId::mu_m: offsets.mu_m = value; return;
    case ParamId::mu_d: offsets.mu_d = value; return;
    case ParamId::rho: noise.rho = value; return;
    default: break;
  }
  throw Error("unhandled parameter id");
}

std::array<bool, kParamCount> ModelParams::default_free_mask(model::ForcingForm form) {
  std::array<bool, kParamCount> mask{};
  mask.fill(true);
  mask[index_of(ParamId::f1)] = model::forcing_coefficient_free(form, 1);
  mask[index_of(ParamId::f2)] = model::forcing_coefficient_free(form, 2);
  mask[index_of(ParamId::f3)] = model::forcing_coefficient_free(form, 3);
  for (ParamId id : {ParamId::mu_c, ParamId::mu_l, ParamId::mu_o, ParamId::mu_f}) mask[index_of(id)] = false;
  return mask;
}

void ModelParams::set_form(model::ForcingForm new_form) {
  form = new_form;
  model::apply_forcing_form(physical, form);
  free = default_free_mask(form);
}

std::vector<ParamId> ModelParams::free_ids() const {
  std::vector<ParamId> ids;
  for (std::size_t i = 0; i < kParamCount; ++i)
    if (free[i]) ids.push_back(param_at(i));
  return ids;
}

std::size_t ModelParams::free_count() const {
  std::size_t n = 0;
  for (bool f : free) n += f ? 1 : 0;
  return n;
}

model::SystemMatrices ModelParams::system() const {
  return model::assemble_system(physical, offsets, noise, constants);
}

void ModelParams::validate() const {
  constants.validate();
  noise.validate();
  if (!(physical.h_m > 0.0)) throw DomainError("mixed-layer heat capacity must be positive", physical.h_m);
  if (!(physical.h_d > 0.0)) throw DomainError("deep-ocean heat capacity must be positive", physical.h_d);
}

ModelParams published_estimates() {
  ModelParams p;
  p.physical = model::PhysicalParams{.b1 = 0.01, .b2 = 0.02, .c1 = 0.08, .c2 = 0.09, .f1 = 5.58, .f2 = 0.0,
                                     .f3 = 0.0, .gamma = 1.46, .lambda = 1.42, .h_m = 9.37, .h_d = 265.90};
  p.offsets = model::MeasurementOffsets{.mu_m = 0.30, .mu_d = 0.20};
  // Entries printed as 0.00 are set to 1e-4 so that every covariance stays non-degenerate.
  p.noise.sigma2_eta = {1e-4, 0.70, 1e-4, 1e-4, 0.01};
  p.noise.sigma2_eps = {0.45, 0.12, 0.42, 0.01, 0.09, 1e-4, 0.04};
  p.noise.phi = {0.78, 0.56, 0.39, 0.57, 0.15, 0.89, 0.89};
  p.noise.rho = 0.87;
  p.form = model::ForcingForm::LogOnly;
  p.free = ModelParams::default_free_mask(p.form);
  return p;
}

std::array<double, kParamCount> published_standard_errors() {
  std::array<double, kParamCount> se{};
  auto put = [&](ParamId id, double v) { se[index_of(id)] = v; };
  // Where the printed s.e. rounds to 0.00 it is recovered as estimate / t-stat.
  put(ParamId::b1, 0.01 / 11.25);
  put(ParamId::b2, 0.02 / 7.83);
  put(ParamId::c1, 0.02);
  put(ParamId::c2, 0.04);
  put(ParamId::f1, 0.01);
  put(ParamId::gamma, 0.58);
  put(ParamId::lambda, 0.51);
  put(ParamId::h_m, 2.44);
  put(ParamId::h_d, 0.41);
  put(ParamId::mu_m, 0.41);
  put(ParamId::mu_d, 0.36);
  put(ParamId::rho, 0.21);
  const std::array<double, 7> phi_se = {0.08, 0.11, 0.21, 0.15, 0.13, 0.07, 0.07};
  for (std::size_t i = 0; i < 7; ++i) se[index_of(ParamId::phi_c) + i] = phi_se[i];
  const std::array<double, 7> eps_se = {0.06, 0.01, 0.07, 0.01 / 8.97, 0.01, 1e-4, 0.02};
  for (std::size_t i = 0; i < 7; ++i) se[index_of(ParamId::s2eps_c) + i] = eps_se[i];
  const std::array<double, 5> eta_se = {0.03, 0.08, 1e-4, 0.02, 0.01 / 11.11};
  for (std::size_t i = 0; i < 5; ++i) se[index_of(ParamId::s2eta_ocn) + i] = eta_se[i];
  return se;
}

}  // namespace statrcm
