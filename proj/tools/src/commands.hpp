#pragma once

#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "statrcm/estimate.hpp"

namespace statrcm::cli {

inline const std::vector<std::string> kCommands = {"estimate", "select",  "smooth",  "diagnose",
                                                   "validate", "project", "mc-study"};

/// Parameters written by `estimate` and read back by the simulation commands.
struct StoredFit {
  ModelParams params;
  std::vector<ParamId> free_ids;
  std::optional<Eigen::MatrixXd> cov;  ///< natural-scale covariance of the free entries
  double loglik = 0.0;
};

void write_params_json(const std::filesystem::path& path, const estimate::EstimationResult& result);
StoredFit load_params_json(const std::filesystem::path& path);

/// Runs one command; artifacts go to config.out_dir. Throws statrcm::Error on failure.
void dispatch(const std::string& command, const RunConfig& config, int threads);

/// Full command-line entry point. Returns the process exit status; failures print a JSON
/// error record on stderr.
int run(int argc, char** argv);

}  // namespace statrcm::cli
