#include "lrcycle/config.h"

#include <cmath>
#include <set>

namespace lrcycle {

namespace {

template <typename T>
void read(const Json& j, const char* key, T& field, std::set<std::string>& seen) {
  seen.insert(key);
  if (j.contains(key)) field = j.at(key).get<T>();
}

}  // namespace

Json to_json(const RunConfig& cfg) {
  Json j;
  j["command"] = cfg.command;
  j["dataset"] = cfg.dataset;
  j["lifted"] = cfg.lifted;
  j["series"] = cfg.series;
  j["column"] = cfg.column;
  j["gamma"] = cfg.gamma;
  j["steps"] = cfg.steps;
  j["window"] = cfg.window;
  j["tol_newton"] = cfg.tol_newton;
  j["tol_cycle"] = cfg.tol_cycle;
  j["seed"] = cfg.seed;
  j["out"] = cfg.out;
  j["w0"] = cfg.w0;
  j["tail_noise"] = cfg.tail_noise;
  j["coords"] = cfg.coords;
  j["tail_window"] = cfg.tail_window;
  j["divergence_bound"] =
      std::isfinite(cfg.divergence_bound) ? Json(cfg.divergence_bound) : Json(nullptr);
  j["c"] = cfg.c;
  j["gammas"] = cfg.gammas;
  j["grid_points"] = cfg.grid_points;
  j["grid_span"] = cfg.grid_span;
  j["cobweb_w0"] = cfg.cobweb_w0;
  j["cobweb_steps"] = cfg.cobweb_steps;
  j["dim"] = cfg.dim ? Json(*cfg.dim) : Json("auto");
  j["trials"] = cfg.trials;
  j["first_trial"] = cfg.first_trial;
  j["budget"] = cfg.budget;
  j["probes"] = cfg.probes;
  j["max_hits"] = cfg.max_hits;
  j["scale"] = cfg.scale;
  j["suite"] = cfg.suite;
  return j;
}

RunConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("config must be a JSON object");
  RunConfig cfg;
  std::set<std::string> seen;
  try {
    read(j, "command", cfg.command, seen);
    read(j, "dataset", cfg.dataset, seen);
    read(j, "lifted", cfg.lifted, seen);
    read(j, "series", cfg.series, seen);
    read(j, "column", cfg.column, seen);
    read(j, "gamma", cfg.gamma, seen);
    read(j, "steps", cfg.steps, seen);
    read(j, "window", cfg.window, seen);
    read(j, "tol_newton", cfg.tol_newton, seen);
    read(j, "tol_cycle", cfg.tol_cycle, seen);
    read(j, "seed", cfg.seed, seen);
    read(j, "out", cfg.out, seen);
    read(j, "w0", cfg.w0, seen);
    read(j, "tail_noise", cfg.tail_noise, seen);
    read(j, "coords", cfg.coords, seen);
    read(j, "tail_window", cfg.tail_window, seen);
    seen.insert("divergence_bound");
    if (j.contains("divergence_bound") && !j.at("divergence_bound").is_null()) {
      cfg.divergence_bound = j.at("divergence_bound").get<double>();
    }
    read(j, "c", cfg.c, seen);
    read(j, "gammas", cfg.gammas, seen);
    read(j, "grid_points", cfg.grid_points, seen);
    read(j, "grid_span", cfg.grid_span, seen);
    read(j, "cobweb_w0", cfg.cobweb_w0, seen);
    read(j, "cobweb_steps", cfg.cobweb_steps, seen);
    seen.insert("dim");
    if (j.contains("dim")) {
      const Json& d = j.at("dim");
      if (d.is_string() && d.get<std::string>() == "auto") {
        cfg.dim.reset();
      } else {
        cfg.dim = d.get<Index>();
      }
    }
    read(j, "trials", cfg.trials, seen);
    read(j, "first_trial", cfg.first_trial, seen);
    read(j, "budget", cfg.budget, seen);
    read(j, "probes", cfg.probes, seen);
    read(j, "max_hits", cfg.max_hits, seen);
    read(j, "scale", cfg.scale, seen);
    read(j, "suite", cfg.suite, seen);
  } catch (const Json::exception& e) {
    throw InputError(std::string("bad config value: ") + e.what());
  }
  for (const auto& item : j.items()) {
    if (!seen.count(item.key())) throw InputError("unknown config key '" + item.key() + "'");
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  try {
    return config_from_json(Json::parse(read_text(path)));
  } catch (const Json::parse_error& e) {
    throw InputError("cannot parse " + path.string() + ": " + e.what());
  }
}

}  // namespace lrcycle
