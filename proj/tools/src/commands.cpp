#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "statrcm/diagnostics.hpp"
#include "statrcm/error.hpp"
#include "statrcm/mc_study.hpp"
#include "statrcm/rng.hpp"
#include "statrcm/simulate.hpp"
#include "statrcm/ssm.hpp"
#include "statrcm/synthetic.hpp"

namespace statrcm::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(const fs::path& path) : out_(path) {
    if (!out_) throw DataError("cannot write " + path.string());
  }
  template <typename... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cells, first = false), ...);
    out_ << '\n';
  }
  std::ofstream& stream() { return out_; }

 private:
  std::ofstream out_;
};

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

struct Inputs {
  data::ObservationTable obs;
  data::CovariateTable cov;
  bool synthetic = false;
};

Inputs load_inputs(const RunConfig& c) {
  Inputs in;
  const data::CovariateLoadOptions cov_options{.impute_trailing_forcing = c.impute_trailing_forcing,
                                               .fit_window = c.fit_window};
  in.cov = c.covariates.empty() ? data::synthetic_historical_covariates() : data::load_covariates(c.covariates, cov_options);
  if (c.observations.empty()) {
    in.synthetic = true;
    const ModelParams truth = simulate::mc_true_values();
    in.obs = simulate::simulate_dataset(truth, in.cov, data::synthetic_initial_state(truth),
                                        rng::derive_key(c.synthetic_seed, 0x5359));
  } else {
    in.obs = data::load_observations(c.observations);
    if (c.ohc_in_zettajoules) {
      for (auto& row : in.obs.rows) {
        double& v = row.values[model::kObsOhc];
        if (!data::is_missing(v)) v = data::convert_ohc_units(v);
      }
    }
    in.cov = in.cov.slice(in.obs.first_year(), in.obs.last_year());
  }
  data::check_aligned(in.obs, in.cov);
  for (const auto& w : in.obs.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& w : in.cov.warnings) std::cerr << "warning: " << w << '\n';
  return in;
}

estimate::EstimationOptions estimation_options(const RunConfig& c, int threads) {
  estimate::EstimationOptions o;
  o.n_starts = c.n_starts;
  o.jitter = c.jitter;
  o.seed = c.seed;
  o.threads = threads;
  o.bfgs.max_iterations = c.max_iterations;
  return o;
}

StoredFit to_stored(const estimate::EstimationResult& r) {
  StoredFit fit;
  fit.params = r.theta_hat;
  fit.free_ids = r.free_ids;
  fit.loglik = r.loglik;
  if (r.has_standard_errors) fit.cov = r.cov_theta;
  return fit;
}

StoredFit obtain_fit(const RunConfig& c, const Inputs& in, int threads) {
  if (!c.params.empty()) return load_params_json(c.params);
  const estimate::EstimationResult r = estimate::maximize_likelihood(
      in.obs, in.cov, c.form, estimate::default_initial_params(in.obs, c.form), estimation_options(c, threads));
  return to_stored(r);
}

simulate::ParameterDistribution parameter_distribution(const StoredFit& fit) {
  std::vector<ParamId> ids;
  std::vector<Eigen::Index> pos;
  for (std::size_t i = 0; i < fit.free_ids.size(); ++i) {
    if (is_physical(fit.free_ids[i])) {
      ids.push_back(fit.free_ids[i]);
      pos.push_back(static_cast<Eigen::Index>(i));
    }
  }
  if (!fit.cov) throw SimulationError("the fitted parameters carry no covariance; parameter draws are impossible");
  Eigen::MatrixXd block(static_cast<Eigen::Index>(pos.size()), static_cast<Eigen::Index>(pos.size()));
  for (std::size_t i = 0; i < pos.size(); ++i)
    for (std::size_t j = 0; j < pos.size(); ++j)
      block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (*fit.cov)(pos[i], pos[j]);
  return simulate::ParameterDistribution(fit.params, ids, block);
}

std::size_t paths_for(simulate::UncertaintySetup setup, std::size_t requested) {
  // Deterministic paths are all identical; two suffice for the band machinery.
  return setup == simulate::UncertaintySetup::Deterministic ? 2 : requested;
}

void write_band_rows(CsvWriter& csv, const std::string& setup, const simulate::PathEnsemble& ens) {
  for (int i = 0; i < model::kStateDim; ++i) {
    const auto bands = simulate::quantile_bands(ens, i, simulate::Scale::State);
    for (std::size_t t = 0; t < bands.years.size(); ++t) {
      const auto r = static_cast<Eigen::Index>(t);
      csv.row(bands.years[t], setup, model::state_name(i), "state", num(bands.values(r, 0)), num(bands.values(r, 1)),
              num(bands.values(r, 2)));
    }
  }
  for (int j = 0; j < model::kObsDim; ++j) {
    const auto bands = simulate::quantile_bands(ens, j, simulate::Scale::Observation);
    for (std::size_t t = 0; t < bands.years.size(); ++t) {
      const auto r = static_cast<Eigen::Index>(t);
      csv.row(bands.years[t], setup, model::observation_name(j), "observation", num(bands.values(r, 0)),
              num(bands.values(r, 1)), num(bands.values(r, 2)));
    }
  }
}

void write_estimates_csv(const fs::path& path, const estimate::EstimationResult& r) {
  CsvWriter csv(path);
  csv.row("parameter", "estimate", "std_error", "t_stat");
  for (std::size_t i = 0; i < r.free_ids.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    csv.row(param_name(r.free_ids[i]), num(r.estimates[k]), r.has_standard_errors ? num(r.std_errors[k]) : "",
            r.has_standard_errors ? num(r.t_stats[k]) : "");
  }
}

void cmd_estimate(const RunConfig& c, int threads) {
  const Inputs in = load_inputs(c);
  const estimate::EstimationResult r = estimate::maximize_likelihood(
      in.obs, in.cov, c.form, estimate::default_initial_params(in.obs, c.form), estimation_options(c, threads));
  write_estimates_csv(c.out_dir / "estimates.csv", r);
  write_params_json(c.out_dir / "params.json", r);

  json summary;
  summary["form"] = std::string(model::to_string(c.form));
  summary["data"] = in.synthetic ? "synthetic" : "files";
  summary["n_obs"] = r.n_obs;
  summary["k"] = r.k();
  summary["loglik"] = r.loglik;
  summary["bic"] = estimate::bic(r.loglik, r.k(), r.n_obs);
  summary["converged"] = r.trace.converged;
  summary["iterations"] = r.trace.iterations;
  summary["best_start"] = r.trace.best_start;
  summary["hessian_negative_definite"] = r.hessian_negative_definite;
  if (const auto se = r.std_error(ParamId::lambda)) {
    const auto ecs = estimate::ecs_with_se(r.theta_hat.physical.lambda, *se * *se, c.f2x, c.f2x_halfwidth);
    summary["ecs"] = {{"value", ecs.ecs}, {"se", ecs.se}};
  }
  summary["seed"] = c.seed;
  write_json(c.out_dir / "summary.json", summary);
}

void cmd_select(const RunConfig& c, int threads) {
  const Inputs in = load_inputs(c);
  const auto rows = estimate::compare_forcing_forms(in.obs, in.cov, estimation_options(c, threads));
  CsvWriter csv(c.out_dir / "model_comparison.csv");
  csv.row("form", "k", "loglik", "bic", "lr_statistic", "df", "p_value", "converged");
  for (const auto& row : rows) {
    csv.row(model::to_string(row.form), row.k, num(row.loglik), num(row.bic), row.lr ? num(row.lr->statistic) : "",
            row.lr ? std::to_string(row.lr->df) : "", row.lr ? num(row.lr->p_value) : "", row.converged ? 1 : 0);
  }
}

void cmd_smooth(const RunConfig& c, int threads) {
  const Inputs in = load_inputs(c);
  const StoredFit fit = obtain_fit(c, in, threads);
  const auto smoothed = ssm::ekf_smooth(fit.params, in.obs, in.cov).smoothed;
  CsvWriter csv(c.out_dir / "states.csv");
  auto& out = csv.stream();
  out << "year";
  for (int i = 0; i < model::kStateDim; ++i) out << ',' << model::state_name(i) << ',' << model::state_name(i) << "_sd";
  out << ",t_m_plus_mu_m\n";
  for (std::size_t t = 0; t < smoothed.size(); ++t) {
    out << in.obs.rows[t].year;
    for (int i = 0; i < model::kStateDim; ++i)
      out << ',' << num(smoothed[t].mean[i]) << ',' << num(std::sqrt(std::max(smoothed[t].cov(i, i), 0.0)));
    out << ',' << num(smoothed[t].mean[model::kSurfaceTemp] + fit.params.offsets.mu_m) << '\n';
  }
}

void cmd_diagnose(const RunConfig& c, int threads) {
  const Inputs in = load_inputs(c);
  const StoredFit fit = obtain_fit(c, in, threads);
  const auto filter = ssm::ekf_filter(fit.params, in.obs, in.cov);
  const Eigen::MatrixXd resid = ssm::standardized_residuals(filter, model::kObsDim);

  std::vector<std::string> names;
  for (int j = 0; j < model::kObsDim; ++j) names.emplace_back(model::observation_name(j));
  const auto report = diagnostics::residual_diagnostics(resid, names);

  CsvWriter res(c.out_dir / "residuals.csv");
  auto& out = res.stream();
  out << "year";
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  for (Eigen::Index t = 0; t < resid.rows(); ++t) {
    out << in.obs.rows[static_cast<std::size_t>(t)].year;
    for (Eigen::Index j = 0; j < resid.cols(); ++j) out << ',' << num(resid(t, j));
    out << '\n';
  }

  CsvWriter csv(c.out_dir / "diagnostics.csv");
  csv.row("series", "n", "mean", "std", "skew", "kurt", "sc", "jb", "dw", "lb1", "lb5", "lb10", "arch");
  for (std::size_t j = 0; j < names.size(); ++j) {
    const auto& d = report.series[j];
    if (!d) {
      csv.row(names[j], 0, "", "", "", "", "", "", "", "", "", "", "");
      continue;
    }
    csv.row(names[j], d->n, num(d->mean), num(d->std), num(d->skewness), num(d->kurtosis), num(d->sc), num(d->jb),
            num(d->dw), num(d->lb1), num(d->lb5), num(d->lb10), num(d->arch));
  }
}

void cmd_validate(const RunConfig& c, int threads) {
  const Inputs in = load_inputs(c);
  const StoredFit fit = obtain_fit(c, in, threads);
  const auto filter = ssm::ekf_filter(fit.params, in.obs, in.cov);
  const simulate::Scenario scenario{in.cov, filter.steps.front().filtered};
  const auto setup = c.setup.value_or(simulate::UncertaintySetup::ParamStateMeas);
  const auto ens = simulate::simulate_paths(parameter_distribution(fit), scenario, setup, paths_for(setup, c.n_paths),
                                            c.seed, {.threads = threads});

  CsvWriter csv(c.out_dir / "validation_bands.csv");
  csv.row("year", "variable", "q025", "q50", "q975", "observed");
  json coverage;
  for (int j = 0; j < model::kObsDim; ++j) {
    const auto bands = simulate::quantile_bands(ens, j, simulate::Scale::Observation);
    std::size_t observed = 0, inside = 0;
    for (std::size_t t = 0; t < bands.years.size(); ++t) {
      const auto r = static_cast<Eigen::Index>(t);
      const double y = in.obs.rows[t].values[static_cast<std::size_t>(j)];
      if (!data::is_missing(y)) {
        ++observed;
        inside += (y >= bands.values(r, 0) && y <= bands.values(r, 2)) ? 1 : 0;
      }
      csv.row(bands.years[t], model::observation_name(j), num(bands.values(r, 0)), num(bands.values(r, 1)),
              num(bands.values(r, 2)), num(y));
    }
    coverage[std::string(model::observation_name(j))] =
        observed ? static_cast<double>(inside) / static_cast<double>(observed) : std::nan("");
  }
  json summary;
  summary["setup"] = std::string(simulate::to_string(setup));
  summary["n_paths"] = ens.n_paths();
  summary["invalid_paths"] = ens.invalid_count();
  summary["seed"] = c.seed;
  summary["coverage_95"] = coverage;
  write_json(c.out_dir / "validation.json", summary);
}

void cmd_project(const RunConfig& c, int threads) {
  const Inputs in = load_inputs(c);
  const StoredFit fit = obtain_fit(c, in, threads);
  const auto& last = in.cov.rows.back();

  data::ScenarioTable future;
  if (c.scenario.empty()) {
    future = data::synthetic_mitigation_scenario(last.year + 1, last.f_nat);
  } else {
    future = data::load_scenario(c.scenario, {.expected_first_year = last.year + 1, .hold_natural_forcing = last.f_nat});
  }
  simulate::Scenario scenario;
  scenario.covariates.rows.push_back(last);
  scenario.covariates.rows.insert(scenario.covariates.rows.end(), future.rows.begin(), future.rows.end());
  scenario.covariates.validate();
  scenario.initial = c.start_from_smoothed ? ssm::ekf_smooth(fit.params, in.obs, in.cov).smoothed.back()
                                           : ssm::ekf_filter(fit.params, in.obs, in.cov).steps.back().filtered;

  const int first = c.window_first.value_or(last.year + 1);
  const int final_year = c.window_last.value_or(scenario.covariates.last_year());

  std::vector<simulate::UncertaintySetup> setups;
  if (c.setup) {
    setups.push_back(*c.setup);
  } else {
    setups.assign(simulate::kAllSetups.begin(), simulate::kAllSetups.end());
  }
  const bool draws = std::any_of(setups.begin(), setups.end(),
                                 [](auto s) { return s != simulate::UncertaintySetup::Deterministic; });
  const simulate::ParameterDistribution dist =
      draws ? parameter_distribution(fit) : simulate::ParameterDistribution(fit.params);

  CsvWriter bands(c.out_dir / "projection_bands.csv");
  bands.row("year", "setup", "variable", "scale", "q025", "q50", "q975");
  CsvWriter traj(c.out_dir / "trajectories.csv");
  traj.row("setup", "path", "year", "t_m_plus_mu_m", "t_m_observed", "valid");

  json summary;
  summary["seed"] = c.seed;
  summary["threshold"] = c.threshold;
  summary["window"] = {first, final_year};
  summary["start"] = c.start_from_smoothed ? "smoothed" : "filtered";
  json per_setup;
  for (const auto setup : setups) {
    const std::string name(simulate::to_string(setup));
    const auto ens =
        simulate::simulate_paths(dist, scenario, setup, paths_for(setup, c.n_paths), c.seed, {.threads = threads});
    write_band_rows(bands, name, ens);
    for (std::size_t p = 0; p < std::min(c.trajectories, ens.n_paths()); ++p) {
      for (std::size_t t = 0; t < ens.horizon(); ++t) {
        traj.row(name, p, ens.years()[t], num(ens.state(p, t, model::kSurfaceTemp) + ens.offsets.mu_m),
                 num(ens.obs(p, t, model::kObsSurfaceTemp)), ens.valid(p) ? 1 : 0);
      }
    }
    json entry;
    entry["n_paths"] = ens.n_paths();
    entry["invalid_paths"] = ens.invalid_count();
    entry["exceedance_state"] =
        simulate::exceedance_probability(ens, c.threshold, simulate::Scale::State, first, final_year);
    entry["exceedance_observation"] =
        simulate::exceedance_probability(ens, c.threshold, simulate::Scale::Observation, first, final_year);
    per_setup[name] = entry;
  }
  summary["setups"] = per_setup;
  write_json(c.out_dir / "exceedance.json", summary);
}

void cmd_mc_study(const RunConfig& c, int threads) {
  const data::CovariateTable cov = c.covariates.empty()
                                       ? data::synthetic_historical_covariates()
                                       : data::load_covariates(c.covariates, {.impute_trailing_forcing = c.impute_trailing_forcing,
                                                                              .fit_window = c.fit_window});
  const ModelParams truth = simulate::mc_true_values();
  simulate::McStudyOptions opts;
  opts.n_reps = c.mc_reps;
  opts.n_obs = c.mc_obs;
  opts.seed = c.seed;
  opts.threads = threads;
  opts.estimation.bfgs.max_iterations = c.max_iterations;
  const auto result = simulate::mc_study(truth, cov, opts);

  CsvWriter csv(c.out_dir / "mc_study.csv");
  csv.row("parameter", "true", "mc_mean", "mc_std");
  for (std::size_t i = 0; i < result.ids.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    csv.row(param_name(result.ids[i]), num(truth.get(result.ids[i])), num(result.mean[k]), num(result.std[k]));
  }
  json summary;
  summary["replications"] = c.mc_reps;
  summary["kept"] = result.kept.size();
  summary["failed"] = result.failed;
  summary["unconverged"] = result.unconverged;
  summary["n_obs"] = c.mc_obs;
  summary["seed"] = c.seed;
  write_json(c.out_dir / "mc_summary.json", summary);
}

int exit_code(const Error& e) {
  const std::string kind = e.kind();
  if (kind == "config") return 2;
  if (kind == "data") return 3;
  return 4;
}

void print_error(const std::string& command, const std::string& kind, const std::string& message) {
  json record;
  record["error"] = kind;
  record["command"] = command;
  record["message"] = message;
  std::cerr << record.dump() << '\n';
}

}  // namespace

void write_params_json(const fs::path& path, const estimate::EstimationResult& r) {
  json j;
  j["form"] = std::string(model::to_string(r.theta_hat.form));
  j["loglik"] = r.loglik;
  j["constants"] = {{"c_preind", r.theta_hat.constants.c_preind},
                    {"t_preind", r.theta_hat.constants.t_preind},
                    {"delta", r.theta_hat.constants.delta},
                    {"gtc_per_ppm", r.theta_hat.constants.gtc_per_ppm}};
  json values;
  for (std::size_t i = 0; i < kParamCount; ++i) values[std::string(param_name(param_at(i)))] = r.theta_hat.get(param_at(i));
  j["values"] = values;
  json free = json::array();
  for (ParamId id : r.free_ids) free.push_back(std::string(param_name(id)));
  j["free"] = free;
  if (r.has_standard_errors) {
    json cov = json::array();
    for (Eigen::Index a = 0; a < r.cov_theta.rows(); ++a) {
      json row = json::array();
      for (Eigen::Index b = 0; b < r.cov_theta.cols(); ++b) row.push_back(r.cov_theta(a, b));
      cov.push_back(row);
    }
    j["cov"] = cov;
  } else {
    j["cov"] = nullptr;
  }
  write_json(path, j);
}

StoredFit load_params_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read parameter file " + path.string());
  json j;
  try {
    j = json::parse(in);
    StoredFit fit;
    fit.params.set_form(model::parse_forcing_form(j.at("form").get<std::string>()));
    const auto& k = j.at("constants");
    fit.params.constants.c_preind = k.at("c_preind").get<double>();
    fit.params.constants.t_preind = k.at("t_preind").get<double>();
    fit.params.constants.delta = k.at("delta").get<double>();
    fit.params.constants.gtc_per_ppm = k.at("gtc_per_ppm").get<double>();
    for (const auto& [name, value] : j.at("values").items()) {
      const auto id = param_from_name(name);
      if (!id) throw ConfigError("unknown parameter '" + name + "' in " + path.string());
      fit.params.set(*id, value.get<double>());
    }
    fit.params.free.fill(false);
    for (const auto& name : j.at("free")) {
      const auto id = param_from_name(name.get<std::string>());
      if (!id) throw ConfigError("unknown parameter in the free list of " + path.string());
      fit.params.free[index_of(*id)] = true;
      fit.free_ids.push_back(*id);
    }
    fit.loglik = j.value("loglik", 0.0);
    if (!j.at("cov").is_null()) {
      const auto n = static_cast<Eigen::Index>(fit.free_ids.size());
      Eigen::MatrixXd cov(n, n);
      const auto& rows = j.at("cov");
      if (rows.size() != fit.free_ids.size()) throw ConfigError("covariance size does not match the free list");
      for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) cov(a, b) = rows.at(static_cast<std::size_t>(a)).at(static_cast<std::size_t>(b)).get<double>();
      fit.cov = cov;
    }
    fit.params.validate();
    return fit;
  } catch (const json::exception& e) {
    throw ConfigError("malformed parameter file " + path.string() + ": " + e.what());
  }
}

void dispatch(const std::string& command, const RunConfig& config, int threads) {
  validate_config(config);
  fs::create_directories(config.out_dir);
  write_config(config, config.out_dir / "config.ini");
  if (command == "estimate") return cmd_estimate(config, threads);
  if (command == "select") return cmd_select(config, threads);
  if (command == "smooth") return cmd_smooth(config, threads);
  if (command == "diagnose") return cmd_diagnose(config, threads);
  if (command == "validate") return cmd_validate(config, threads);
  if (command == "project") return cmd_project(config, threads);
  if (command == "mc-study") return cmd_mc_study(config, threads);
  throw ConfigError("unknown command '" + command + "'");
}

int run(int argc, char** argv) {
  CLI::App app{"Statistical reduced-complexity climate model"};
  std::string command;
  std::string config_path, out_dir, form, setup;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<double> threshold;
  int threads = 1;
  app.add_option("command", command, "estimate | select | smooth | diagnose | validate | project | mc-study")
      ->required();
  app.add_option("--config", config_path, "INI run configuration");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--paths", paths, "number of simulated paths");
  app.add_option("--form", form, "log | sqrt | log2 | sqrtlog | hansen98 | unrestricted");
  app.add_option("--setup", setup, "det | param | param-state | full | all");
  app.add_option("--threshold", threshold, "temperature threshold in degrees C");
  app.add_option("--threads", threads, "worker threads (results do not depend on it)")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error(command, "usage", e.what());
    return 2;
  }

  try {
    RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (seed) config.seed = *seed;
    if (paths) config.n_paths = *paths;
    if (!form.empty()) config.form = model::parse_forcing_form(form);
    if (!setup.empty()) {
      config.setup = setup == "all" ? std::nullopt : std::optional(simulate::parse_setup(setup));
    }
    if (threshold) config.threshold = *threshold;
    dispatch(command, config, threads);
    return 0;
  } catch (const Error& e) {
    print_error(command, e.kind(), e.what());
    return exit_code(e);
  } catch (const std::exception& e) {
    print_error(command, "internal", e.what());
    return 1;
  }
}

}  // namespace statrcm::cli
