#include "config.hpp"

#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "statrcm/error.hpp"

namespace statrcm::cli {

namespace pt = boost::property_tree;

namespace {

const std::set<std::string> kKnownKeys = {
    "data.observations",     "data.covariates",      "data.scenario",         "data.impute_trailing_forcing",
    "data.fit_window",       "data.ohc_in_zettajoules", "data.synthetic_seed", "model.form",
    "model.params",          "estimation.n_starts",  "estimation.jitter",     "estimation.max_iterations",
    "estimation.f2x",        "estimation.f2x_halfwidth", "simulation.setup",  "simulation.n_paths",
    "simulation.seed",       "simulation.threshold", "simulation.window_first", "simulation.window_last",
    "simulation.start",      "simulation.trajectories", "mc.reps",            "mc.obs",
    "output.dir",
};

template <typename T>
T read(const pt::ptree& tree, const std::string& key, T fallback) {
  if (!tree.get_optional<std::string>(key)) return fallback;
  try {
    return tree.get<T>(key);
  } catch (const pt::ptree_bad_data&) {
    throw ConfigError("invalid value for '" + key + "'");
  }
}

bool read_bool(const pt::ptree& tree, const std::string& key, bool fallback) {
  const auto text = tree.get_optional<std::string>(key);
  if (!text) return fallback;
  if (*text == "true" || *text == "1" || *text == "yes") return true;
  if (*text == "false" || *text == "0" || *text == "no") return false;
  throw ConfigError("invalid boolean for '" + key + "': " + *text);
}

std::filesystem::path read_path(const pt::ptree& tree, const std::string& key, const std::filesystem::path& base) {
  const auto text = tree.get_optional<std::string>(key);
  if (!text || text->empty()) return {};
  std::filesystem::path p(*text);
  return p.is_absolute() ? p : base / p;
}

std::string to_text(double v) {
  std::ostringstream os;
  os.precision(15);
  os << v;
  return os.str();
}

}  // namespace

RunConfig load_config(const std::filesystem::path& path) {
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("cannot read config " + path.string() + ": " + e.message());
  }
  for (const auto& [section, body] : tree) {
    for (const auto& [key, value] : body) {
      if (!kKnownKeys.count(section + "." + key)) throw ConfigError("unknown config key '" + section + "." + key + "'");
    }
  }
  const std::filesystem::path base = path.parent_path();
  RunConfig c;
  c.observations = read_path(tree, "data.observations", base);
  c.covariates = read_path(tree, "data.covariates", base);
  c.scenario = read_path(tree, "data.scenario", base);
  c.impute_trailing_forcing = read_bool(tree, "data.impute_trailing_forcing", c.impute_trailing_forcing);
  c.fit_window = read(tree, "data.fit_window", c.fit_window);
  c.ohc_in_zettajoules = read_bool(tree, "data.ohc_in_zettajoules", c.ohc_in_zettajoules);
  c.synthetic_seed = read(tree, "data.synthetic_seed", c.synthetic_seed);

  if (auto form = tree.get_optional<std::string>("model.form")) c.form = model::parse_forcing_form(*form);
  c.params = read_path(tree, "model.params", base);

  c.n_starts = read(tree, "estimation.n_starts", c.n_starts);
  c.jitter = read(tree, "estimation.jitter", c.jitter);
  c.max_iterations = read(tree, "estimation.max_iterations", c.max_iterations);
  c.f2x = read(tree, "estimation.f2x", c.f2x);
  c.f2x_halfwidth = read(tree, "estimation.f2x_halfwidth", c.f2x_halfwidth);

  if (auto setup = tree.get_optional<std::string>("simulation.setup"); setup && *setup != "all")
    c.setup = simulate::parse_setup(*setup);
  c.n_paths = read(tree, "simulation.n_paths", c.n_paths);
  c.seed = read(tree, "simulation.seed", c.seed);
  c.threshold = read(tree, "simulation.threshold", c.threshold);
  if (tree.get_optional<std::string>("simulation.window_first")) c.window_first = read(tree, "simulation.window_first", 0);
  if (tree.get_optional<std::string>("simulation.window_last")) c.window_last = read(tree, "simulation.window_last", 0);
  if (auto start = tree.get_optional<std::string>("simulation.start")) {
    if (*start == "smoothed") {
      c.start_from_smoothed = true;
    } else if (*start != "filtered") {
      throw ConfigError("simulation.start must be 'filtered' or 'smoothed'");
    }
  }
  c.trajectories = read(tree, "simulation.trajectories", c.trajectories);

  c.mc_reps = read(tree, "mc.reps", c.mc_reps);
  c.mc_obs = read(tree, "mc.obs", c.mc_obs);

  if (auto dir = read_path(tree, "output.dir", base); !dir.empty()) c.out_dir = dir;
  return c;
}

void write_config(const RunConfig& c, const std::filesystem::path& path) {
  pt::ptree tree;
  tree.put("data.observations", c.observations.string());
  tree.put("data.covariates", c.covariates.string());
  tree.put("data.scenario", c.scenario.string());
  tree.put("data.impute_trailing_forcing", c.impute_trailing_forcing ? "true" : "false");
  tree.put("data.fit_window", c.fit_window);
  tree.put("data.ohc_in_zettajoules", c.ohc_in_zettajoules ? "true" : "false");
  tree.put("data.synthetic_seed", c.synthetic_seed);
  tree.put("model.form", std::string(model::to_string(c.form)));
  tree.put("model.params", c.params.string());
  tree.put("estimation.n_starts", c.n_starts);
  tree.put("estimation.jitter", to_text(c.jitter));
  tree.put("estimation.max_iterations", c.max_iterations);
  tree.put("estimation.f2x", to_text(c.f2x));
  tree.put("estimation.f2x_halfwidth", to_text(c.f2x_halfwidth));
  tree.put("simulation.setup", c.setup ? std::string(simulate::to_string(*c.setup)) : std::string("all"));
  tree.put("simulation.n_paths", c.n_paths);
  tree.put("simulation.seed", c.seed);
  tree.put("simulation.threshold", to_text(c.threshold));
  if (c.window_first) tree.put("simulation.window_first", *c.window_first);
  if (c.window_last) tree.put("simulation.window_last", *c.window_last);
  tree.put("simulation.start", c.start_from_smoothed ? "smoothed" : "filtered");
  tree.put("simulation.trajectories", c.trajectories);
  tree.put("mc.reps", c.mc_reps);
  tree.put("mc.obs", c.mc_obs);
  tree.put("output.dir", c.out_dir.string());
  pt::write_ini(path.string(), tree);
}

void validate_config(const RunConfig& c) {
  if (c.n_starts < 1) throw ConfigError("estimation.n_starts must be at least 1");
  if (!(c.jitter >= 0.0)) throw ConfigError("estimation.jitter must be non-negative");
  if (c.max_iterations < 1) throw ConfigError("estimation.max_iterations must be at least 1");
  if (c.fit_window < 2) throw ConfigError("data.fit_window must be at least 2");
  if (c.n_paths == 0) throw ConfigError("simulation.n_paths must be positive");
  if (c.mc_reps == 0) throw ConfigError("mc.reps must be positive");
  if (c.mc_obs < 12) throw ConfigError("mc.obs must be at least 12");
  if (!(c.f2x_halfwidth >= 0.0)) throw ConfigError("estimation.f2x_halfwidth must be non-negative");
  if (c.window_first && c.window_last && *c.window_first > *c.window_last)
    throw ConfigError("simulation.window_first is after simulation.window_last");
}

}  // namespace statrcm::cli
