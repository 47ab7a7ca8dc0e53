// lrcycle: command-line front end. Parsing only; the commands live in the
// library.

#include <functional>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "lrcycle/commands.h"
#include "lrcycle/config.h"

namespace {

using lrcycle::RunConfig;

// Options bind into `flags`; only options actually given override the
// config-file/default values.
class Binder {
 public:
  explicit Binder(RunConfig& flags) : flags_(flags) {}

  template <typename T>
  void add(CLI::App* app, const std::string& name, T RunConfig::*member, const std::string& help) {
    CLI::Option* opt = app->add_option(name, flags_.*member, help);
    if constexpr (std::is_same_v<T, std::vector<double>> || std::is_same_v<T, std::vector<long>>) {
      opt->delimiter(',');
    }
    appliers_.emplace_back(opt, [member](RunConfig& to, const RunConfig& from) {
      to.*member = from.*member;
    });
  }

  void add_dim(CLI::App* app) {
    CLI::Option* opt = app->add_option("--dim", dim_, "ambient dimension d, or 'auto' for the minimum");
    appliers_.emplace_back(opt, [this](RunConfig& to, const RunConfig&) {
      if (dim_ == "auto") {
        to.dim.reset();
      } else {
        try {
          std::size_t used = 0;
          to.dim = std::stol(dim_, &used);
          if (used != dim_.size()) throw std::invalid_argument(dim_);
        } catch (const std::exception&) {
          throw CLI::ValidationError("--dim", "expected an integer or 'auto'");
        }
      }
    });
  }

  void apply(RunConfig& to) const {
    for (const auto& [opt, fn] : appliers_) {
      if (opt->count() > 0) fn(to, flags_);
    }
  }

 private:
  RunConfig& flags_;
  std::string dim_;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&, const RunConfig&)>>> appliers_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient descent cycles in logistic regression"};
  app.require_subcommand(1);

  RunConfig flags;
  Binder bind(flags);
  std::string config_path;

  auto common = [&](CLI::App* sub, bool numerics) {
    sub->add_option("--config", config_path, "JSON config; flags override it");
    bind.add(sub, "--out", &RunConfig::out, "output directory (default .)");
    if (numerics) {
      bind.add(sub, "--gamma", &RunConfig::gamma, "step-size multiplier, eta = gamma / lambda");
      bind.add(sub, "--steps", &RunConfig::steps, "GD steps (default 20000)");
      bind.add(sub, "--window", &RunConfig::window, "spectrum window, a power of two (default 1024)");
      bind.add(sub, "--tol-newton", &RunConfig::tol_newton, "Newton gradient tolerance (default 1e-12)");
      bind.add(sub, "--tol-cycle", &RunConfig::tol_cycle, "relative recurrence tolerance (default 1e-7)");
      bind.add(sub, "--seed", &RunConfig::seed, "random seed");
    }
  };

  CLI::App* solve = app.add_subcommand("solve", "Newton solve: w*, lambda");
  common(solve, true);
  bind.add(solve, "--dataset", &RunConfig::dataset, "dataset CSV");
  bind.add(solve, "--lifted", &RunConfig::lifted, "lifted spec JSON {base_csv, ambient_dim}");

  CLI::App* run = app.add_subcommand("run", "GD trajectory, cycle detection, spectrum");
  common(run, true);
  bind.add(run, "--dataset", &RunConfig::dataset, "dataset CSV");
  bind.add(run, "--lifted", &RunConfig::lifted, "lifted spec JSON {base_csv, ambient_dim}");
  bind.add(run, "--w0", &RunConfig::w0, "initial point, comma separated (base coordinates for lifted)");
  bind.add(run, "--tail-noise", &RunConfig::tail_noise, "norm of random noise added to the padding coordinates");
  bind.add(run, "--coords", &RunConfig::coords, "coordinates to record in the trajectory CSV");
  bind.add(run, "--tail-window", &RunConfig::tail_window, "trailing iterates kept exactly (default 2048)");
  bind.add(run, "--divergence-bound", &RunConfig::divergence_bound, "exit 3 once ||w|| exceeds this");

  CLI::App* analyze = app.add_subcommand("analyze-1d", "1D sphere map: lemmas, cobweb");
  common(analyze, true);
  bind.add(analyze, "--c", &RunConfig::c, "class ratio c >= 1");
  bind.add(analyze, "--gammas", &RunConfig::gammas, "gamma sweep, comma separated");
  bind.add(analyze, "--grid-points", &RunConfig::grid_points, "lemma grid size (default 10000)");
  bind.add(analyze, "--grid-span", &RunConfig::grid_span, "lemma grid covers (w*, w* + span]");
  bind.add(analyze, "--cobweb-w0", &RunConfig::cobweb_w0, "cobweb starting point");
  bind.add(analyze, "--cobweb-steps", &RunConfig::cobweb_steps, "cobweb steps");

  CLI::App* lift = app.add_subcommand("lift", "pad a 2D base onto the sphere in R^d");
  common(lift, true);
  bind.add(lift, "--dataset", &RunConfig::dataset, "2D base CSV");
  bind.add_dim(lift);

  CLI::App* hunt = app.add_subcommand("hunt", "search random 2D datasets for stable cycles");
  common(hunt, true);
  bind.add(hunt, "--trials", &RunConfig::trials, "datasets to try");
  bind.add(hunt, "--first-trial", &RunConfig::first_trial, "index of the first trial");
  bind.add(hunt, "--budget", &RunConfig::budget, "GD steps per probe");
  bind.add(hunt, "--probes", &RunConfig::probes, "initializations per dataset");
  bind.add(hunt, "--max-hits", &RunConfig::max_hits, "stop after this many hits (0: no limit)");

  CLI::App* scale = app.add_subcommand("scale", "check scaling invariance on a dataset");
  common(scale, true);
  bind.add(scale, "--dataset", &RunConfig::dataset, "dataset CSV");
  bind.add(scale, "--c", &RunConfig::scale, "scale factor c > 0");
  bind.add(scale, "--w0", &RunConfig::w0, "initial point, comma separated");

  CLI::App* verify = app.add_subcommand("verify", "run acceptance suites");
  common(verify, false);
  bind.add(verify, "--suite", &RunConfig::suite,
           "onedim, scaling, lift, cycle, large, oracles, classical, all, or a criterion id");

  CLI::App* spectrum = app.add_subcommand("spectrum", "power spectrum of a CSV column");
  common(spectrum, true);
  bind.add(spectrum, "--series", &RunConfig::series, "CSV with a header row");
  bind.add(spectrum, "--column", &RunConfig::column, "column name (default norm)");

  RunConfig cfg;
  try {
    app.parse(argc, argv);
    if (!config_path.empty()) cfg = lrcycle::load_config(config_path);
    bind.apply(cfg);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return lrcycle::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lrcycle::kExitUsage;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  return lrcycle::run_command(cfg, std::cout, std::cerr);
}
