#ifndef LRCYCLE_CONFIG_H_
#define LRCYCLE_CONFIG_H_

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lrcycle/io.h"
#include "lrcycle/model.h"

namespace lrcycle {

// Parameters of every subcommand. Fields irrelevant to a subcommand are
// ignored by it but still echoed.
struct RunConfig {
  std::string command;

  // Inputs.
  std::string dataset;  // CSV
  std::string lifted;   // lifted spec JSON, alternative to dataset
  std::string series;   // spectrum: CSV with a header
  std::string column = "norm";

  // Shared numerics.
  double gamma = 1.9;
  std::int64_t steps = 20000;
  Index window = 1024;
  double tol_newton = 1e-12;
  double tol_cycle = 1e-7;
  std::uint64_t seed = 1;
  std::string out = ".";

  // run
  std::vector<double> w0;  // empty: zeros; base length on a lifted problem: zero tail
  double tail_noise = 0.0;
  std::vector<Index> coords;
  Index tail_window = 2048;
  double divergence_bound = std::numeric_limits<double>::infinity();

  // analyze-1d
  double c = 3.0;
  std::vector<double> gammas;  // sweep; empty: just gamma
  int grid_points = 10000;
  double grid_span = 20.0;
  double cobweb_w0 = 3.0;
  int cobweb_steps = 30;

  // lift
  std::optional<Index> dim;  // nullopt: minimum dimension

  // hunt
  int trials = 1000;
  int first_trial = 0;
  std::int64_t budget = 4000;
  int probes = 64;
  int max_hits = 0;

  // scale
  double scale = 2.0;

  // verify
  std::string suite = "all";

  bool operator==(const RunConfig&) const = default;
};

Json to_json(const RunConfig& cfg);
// Keys absent from j keep their defaults. Unknown keys are rejected.
RunConfig config_from_json(const Json& j);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace lrcycle

#endif  // LRCYCLE_CONFIG_H_
