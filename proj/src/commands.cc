#include "lrcycle/commands.h"

#include <algorithm>
#include <future>
#include <random>

#include "lrcycle/acceptance.h"
#include "lrcycle/errors.h"

namespace lrcycle {

namespace {

namespace fs = std::filesystem;

struct LoadedProblem {
  Problem problem;
  Vector w_star;
  double lambda = 0.0;
  Index base_dim = 0;
  bool lifted = false;
};

LoadedProblem load_problem(const RunConfig& cfg) {
  NewtonOptions opts;
  opts.tol = cfg.tol_newton;
  if (!cfg.lifted.empty()) {
    const LiftedSpec spec = load_lifted_spec(cfg.lifted);
    const Dataset base = load_dataset_csv(spec.base_csv);
    LiftedDataset lifted(base.examples(), spec.ambient_dim);
    const SolveReport solved = solve_newton(base, opts);
    const Vector w_star = lifted_solution(solved.w_star, spec.ambient_dim);
    const double lambda = lambda_max(lifted, w_star);
    return {Problem(std::in_place_type<LiftedDataset>, std::move(lifted)), w_star, lambda,
            base.dim(), true};
  }
  if (cfg.dataset.empty()) throw std::invalid_argument("give --dataset or --lifted");
  Dataset data = load_dataset_csv(cfg.dataset);
  const SolveReport solved = solve_newton(data, opts);
  const Index d = data.dim();
  return {Problem(std::in_place_type<Dataset>, std::move(data)), solved.w_star, solved.lambda_max,
          d, false};
}

Vector initial_point(const RunConfig& cfg, const LoadedProblem& lp) {
  const Index d = dim(lp.problem);
  Vector w0 = Vector::Zero(d);
  const Index given = static_cast<Index>(cfg.w0.size());
  if (given == d || (lp.lifted && given == lp.base_dim)) {
    for (Index j = 0; j < given; ++j) w0(j) = cfg.w0[static_cast<std::size_t>(j)];
  } else if (given != 0) {
    throw DimensionMismatch("--w0 has " + std::to_string(given) + " entries, problem has d = " +
                            std::to_string(d));
  }
  if (cfg.tail_noise > 0.0) {
    // Lifted problems: noise on the padding coordinates only.
    const Index from = lp.lifted ? lp.base_dim : 0;
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal;
    Vector noise = Vector::Zero(d);
    for (Index j = from; j < d; ++j) noise(j) = normal(rng);
    if (noise.norm() > 0.0) w0 += noise * (cfg.tail_noise / noise.norm());
  }
  return w0;
}

Json with_config(const RunConfig& cfg, Json body) {
  Json j;
  j["config"] = to_json(cfg);
  for (auto& item : body.items()) j[item.key()] = std::move(item.value());
  return j;
}

fs::path out_path(const RunConfig& cfg, const char* name) { return fs::path(cfg.out) / name; }

}  // namespace

void cmd_solve(const RunConfig& cfg, std::ostream& out) {
  Json body;
  if (!cfg.lifted.empty()) {
    const LoadedProblem lp = load_problem(cfg);
    const auto& lifted = std::get<LiftedDataset>(lp.problem);
    body["w_star"] = to_json(lp.w_star);
    body["lambda"] = lp.lambda;
    body["grad_norm"] = lifted_grad(lp.w_star, lifted).norm();
    body["separable"] = false;
    body["ambient_dim"] = lifted.ambient_dim();
  } else {
    if (cfg.dataset.empty()) throw std::invalid_argument("give --dataset or --lifted");
    NewtonOptions opts;
    opts.tol = cfg.tol_newton;
    body = to_json(solve_newton(load_dataset_csv(cfg.dataset), opts));
  }
  const Json j = with_config(cfg, std::move(body));
  write_text(out_path(cfg, "solve.json"), j.dump(2) + "\n");
  out << "w_star = " << j["w_star"].dump() << "\nlambda = " << format_double(j["lambda"].get<double>())
      << "\n";
}

void cmd_run(const RunConfig& cfg, std::ostream& out) {
  if (!(cfg.gamma > 0.0)) throw std::invalid_argument("--gamma must be positive");
  const LoadedProblem lp = load_problem(cfg);
  const double eta = step_size(cfg.gamma, lp.lambda);
  RecordSpec rec;
  rec.coords = cfg.coords;
  rec.tail_window = cfg.tail_window;
  rec.divergence_bound = cfg.divergence_bound;
  const Trajectory traj = run_gd(lp.problem, initial_point(cfg, lp), eta, cfg.steps, rec);
  write_text(out_path(cfg, "trajectory.csv"), trajectory_csv(traj));

  Json body;
  body["lambda"] = lp.lambda;
  body["eta"] = eta;
  body["steps_run"] = traj.steps_run;
  std::optional<CycleReport> cycle = detect_cycle_recurrence(traj, cfg.tol_cycle);
  std::vector<SpectralPeak> peaks;
  std::optional<int> spectral;
  if (static_cast<Index>(traj.norm_series.size()) >= cfg.window) {
    const auto spectrum = power_spectrum(traj.norm_series, cfg.window);
    peaks = top_peaks(spectrum, 8);
    spectral = dominant_period(spectrum);
  }
  std::string floquet_note;
  if (cycle) {
    cycle->spectral_peaks = peaks;
    cycle->spectral_period = spectral;
    try {
      cycle->floquet_multipliers = floquet_multipliers(cycle->cycle_points, eta, lp.problem);
    } catch (const DimensionTooLarge& e) {
      floquet_note = e.what();
    }
    body.update(to_json(*cycle));
  } else {
    CycleReport none;
    none.spectral_peaks = peaks;
    none.spectral_period = spectral;
    body.update(to_json(none));
    body["period"] = nullptr;
    body["recurrence_residual"] = nullptr;
  }
  if (!floquet_note.empty()) body["floquet_note"] = floquet_note;
  const double fixed = floquet_multipliers({lp.w_star}, eta, lp.problem).front();
  body["fixed_point_max_multiplier"] = fixed;
  body["fixed_point_stable"] = fixed < 1.0;
  write_text(out_path(cfg, "cycle.json"), with_config(cfg, std::move(body)).dump(2) + "\n");

  out << "eta = " << format_double(eta) << "\nperiod = "
      << (cycle ? std::to_string(cycle->period) : std::string("none"))
      << "\nspectral period = " << (spectral ? std::to_string(*spectral) : std::string("none"))
      << "\nfixed point " << (fixed < 1.0 ? "stable" : "unstable") << " (max multiplier "
      << format_double(fixed) << ")\n";
  if (cycle && cycle->floquet_multipliers) {
    out << "cycle " << (cycle->floquet_multipliers->front() < 1.0 ? "stable" : "unstable")
        << " (max Floquet magnitude " << format_double(cycle->floquet_multipliers->front()) << ")\n";
  }
}

void cmd_analyze1d(const RunConfig& cfg, std::ostream& out) {
  const onedim::Problem p(cfg.c);
  const std::vector<double> gammas = cfg.gammas.empty() ? std::vector<double>{cfg.gamma} : cfg.gammas;
  const onedim::LemmaGrid grid{cfg.grid_points, cfg.grid_span, 1e-12};

  std::vector<std::future<Json>> jobs;
  for (double gamma : gammas) {
    jobs.push_back(std::async(std::launch::async, [&p, grid, gamma] {
      Json r;
      r["gamma"] = gamma;
      r["eta"] = step_size(gamma, p.lambda());
      try {
        const auto [left, right] = onedim::stationary_points(p, gamma);
        r["stationary_points"] = {left, right};
      } catch (const NoStationaryPoints&) {
        r["stationary_points"] = nullptr;
      }
      r["crossing_point"] = onedim::crossing_point(p, gamma);
      r["rate_estimate"] = onedim::rate_estimate(gamma);
      r["lemmas"] = to_json(onedim::verify_lemmas(p, gamma, grid));
      return r;
    }));
  }
  Json results = Json::array();
  for (auto& job : jobs) results.push_back(job.get());

  Json body;
  body["c"] = p.c();
  body["w_star"] = p.w_star();
  body["lambda"] = p.lambda();
  body["results"] = std::move(results);
  body["all_pass"] = true;
  write_text(out_path(cfg, "lemmas.json"), with_config(cfg, std::move(body)).dump(2) + "\n");

  const double gamma = gammas.front();
  const auto segments = onedim::cobweb(cfg.cobweb_w0, cfg.cobweb_steps, p, gamma);
  write_text(out_path(cfg, "cobweb.csv"), cobweb_csv(segments));
  double lo = std::min(cfg.cobweb_w0, p.w_star());
  double hi = std::max(cfg.cobweb_w0, p.w_star());
  for (const auto& s : segments) {
    lo = std::min({lo, s.w_from, s.w_to});
    hi = std::max({hi, s.w_from, s.w_to});
  }
  lo -= 1.0;
  hi += 1.0;
  std::string curve = "w,T\n";
  const int points = 401;
  for (int k = 0; k < points; ++k) {
    const double w = lo + (hi - lo) * k / (points - 1);
    curve += format_double(w) + ',' + format_double(onedim::map_T(w, p, gamma)) + '\n';
  }
  write_text(out_path(cfg, "map_curve.csv"), curve);

  out << "c = " << format_double(p.c()) << ", w* = " << format_double(p.w_star())
      << ", lambda = " << format_double(p.lambda()) << "\nlemmas pass for " << gammas.size()
      << " gamma value(s)\n";
}

void cmd_lift(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.dataset.empty()) throw std::invalid_argument("give --dataset with the 2D base CSV");
  const Dataset base = load_dataset_csv(cfg.dataset);
  const LiftAnalysis a = analyze_lift(base.examples(), cfg.dim, cfg.tol_newton);
  for (const auto& w : a.report.warnings) err << "warning: " << w << "\n";
  write_text(out_path(cfg, "lifted_base.csv"), examples_to_csv(a.base));
  write_lifted_spec(out_path(cfg, "lifted.json"), {"lifted_base.csv", a.report.chosen_dim});
  write_text(out_path(cfg, "lift.json"), with_config(cfg, to_json(a.report)).dump(2) + "\n");
  out << "min_dim = " << a.report.min_dim << "\nchosen_dim = " << a.report.chosen_dim
      << "\nlambda_b = " << format_double(a.report.lambda_b)
      << "\nlambda_lifted = " << format_double(a.report.lambda_lifted) << "\n";
}

void cmd_hunt(const RunConfig& cfg, std::ostream& out) {
  HuntConfig h;
  h.gamma = cfg.gamma;
  h.trials = cfg.trials;
  h.first_trial = cfg.first_trial;
  h.seed = cfg.seed;
  h.budget = cfg.budget;
  h.probes = cfg.probes;
  h.max_hits = cfg.max_hits;
  h.tol_cycle = cfg.tol_cycle;
  const std::vector<HuntResult> hits = hunt_cycles(h);

  const Json config = to_json(cfg);
  std::string lines;
  for (const HuntResult& r : hits) {
    Json j = to_json(r);
    j["config"] = config;
    lines += j.dump() + "\n";
  }
  write_text(out_path(cfg, "hunt.jsonl"), lines);

  // With max_hits the search stops early; the rate covers the trials run.
  const int run = hits.empty() || cfg.max_hits <= 0 || static_cast<int>(hits.size()) < cfg.max_hits
                      ? cfg.trials
                      : hits.back().trial - cfg.first_trial + 1;
  Json body;
  body["exploratory"] = true;
  body["trials_run"] = run;
  body["hits"] = hits.size();
  body["hit_rate"] = run > 0 ? static_cast<double>(hits.size()) / run : 0.0;
  Json periods = Json::array();
  for (const HuntResult& r : hits) periods.push_back(r.cycle.period);
  body["periods"] = std::move(periods);
  write_text(out_path(cfg, "hunt_summary.json"), with_config(cfg, std::move(body)).dump(2) + "\n");
  out << hits.size() << " stable cycle(s) in " << run << " trial(s) at gamma = "
      << format_double(cfg.gamma) << " (exploratory hit rate, not a prediction)\n";
  for (const HuntResult& r : hits) {
    out << "  trial " << r.trial << ": period " << r.cycle.period << ", max Floquet magnitude "
        << format_double(r.cycle.floquet_multipliers->front()) << ", basin sample "
        << format_double(r.basin_sample) << "\n";
  }
}

void cmd_scale(const RunConfig& cfg, std::ostream& out) {
  if (cfg.dataset.empty()) throw std::invalid_argument("give --dataset");
  const Dataset data = load_dataset_csv(cfg.dataset);
  Vector w0 = Vector::Zero(data.dim());
  if (!cfg.w0.empty()) {
    if (static_cast<Index>(cfg.w0.size()) != data.dim()) throw DimensionMismatch("--w0 size");
    for (Index j = 0; j < data.dim(); ++j) w0(j) = cfg.w0[static_cast<std::size_t>(j)];
  }
  const ScalingCheck r = verify_scaling(data, cfg.scale, w0, cfg.gamma, cfg.steps);
  write_text(out_path(cfg, "scaled.csv"), examples_to_csv(scale_dataset(data, cfg.scale).examples()));
  write_text(out_path(cfg, "scaling.json"), with_config(cfg, to_json(r)).dump(2) + "\n");
  out << "max deviation = " << format_double(r.max_deviation)
      << "\nlambda ratio error = " << format_double(r.lambda_ratio_error) << "\n";
}

bool cmd_verify(const RunConfig& cfg, std::ostream& out) {
  Json lines = Json::array();
  bool all = true;
  for (const std::string& id : acceptance::suite_criteria(cfg.suite)) {
    const acceptance::Outcome o = acceptance::run(id);
    out << acceptance::format_line(o) << "\n" << std::flush;
    all = all && o.passed;
    lines.push_back({{"id", o.id}, {"title", o.title}, {"passed", o.passed}, {"detail", o.detail}});
  }
  Json body;
  body["passed"] = all;
  body["criteria"] = std::move(lines);
  write_text(out_path(cfg, "verify.json"), with_config(cfg, std::move(body)).dump(2) + "\n");
  return all;
}

void cmd_spectrum(const RunConfig& cfg, std::ostream& out) {
  if (cfg.series.empty()) throw std::invalid_argument("give --series (a CSV with a header)");
  const std::vector<double> series = load_csv_column(cfg.series, cfg.column);
  const auto spectrum = power_spectrum(series, cfg.window);
  const auto period = dominant_period(spectrum);
  write_text(out_path(cfg, "spectrum.csv"), spectrum_csv(spectrum));
  Json peaks = Json::array();
  for (const auto& p : top_peaks(spectrum, 8)) peaks.push_back({{"frequency", p.frequency}, {"power", p.power}});
  Json body;
  body["spectral_peaks"] = std::move(peaks);
  body["spectral_period"] = period ? Json(*period) : Json(nullptr);
  write_text(out_path(cfg, "spectrum.json"), with_config(cfg, std::move(body)).dump(2) + "\n");
  out << "spectral period = " << (period ? std::to_string(*period) : std::string("none")) << "\n";
}

int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.command == "solve") {
      cmd_solve(cfg, out);
    } else if (cfg.command == "run") {
      cmd_run(cfg, out);
    } else if (cfg.command == "analyze-1d") {
      cmd_analyze1d(cfg, out);
    } else if (cfg.command == "lift") {
      cmd_lift(cfg, out, err);
    } else if (cfg.command == "hunt") {
      cmd_hunt(cfg, out);
    } else if (cfg.command == "scale") {
      cmd_scale(cfg, out);
    } else if (cfg.command == "verify") {
      return cmd_verify(cfg, out) ? kExitOk : kExitInvariant;
    } else if (cfg.command == "spectrum") {
      cmd_spectrum(cfg, out);
    } else {
      err << "error: unknown command '" << cfg.command << "'\n";
      return kExitUsage;
    }
    return kExitOk;
  } catch (const SeparableData& e) {
    err << "error: separable data: " << e.what() << "\ncertificate: " << e.certificate() << "\n";
    return kExitSeparable;
  } catch (const Diverged& e) {
    err << "error: divergence: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const NonFiniteValue& e) {
    err << "error: divergence: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const InvariantViolation& e) {
    err << "error: invariant violation: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvariant;
  }
}

}  // namespace lrcycle
