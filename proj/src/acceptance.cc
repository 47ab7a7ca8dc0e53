#include "lrcycle/acceptance.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "lrcycle/dynamics.h"
#include "lrcycle/errors.h"
#include "lrcycle/io.h"
#include "lrcycle/lift.h"
#include "lrcycle/onedim.h"
#include "lrcycle/solver.h"
#include "lrcycle/transforms.h"

#ifndef LRCYCLE_DATA_DIR
#define LRCYCLE_DATA_DIR "data"
#endif

namespace lrcycle::acceptance {

namespace {

constexpr double kCs[] = {1.5, 2.0, 3.0, 10.0, 100.0};
constexpr double kGammas[] = {1.1, 1.3, 1.5, 1.7, 1.9, 1.99};
constexpr double kTrendGammas[] = {1.5, 1.8, 1.95, 1.99};

std::filesystem::path& fixture_path() {
  static std::filesystem::path path = std::filesystem::path(LRCYCLE_DATA_DIR) / "base_cycle.jsonl";
  return path;
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", x);
  return buf;
}

struct Check {
  bool passed = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok && passed) {
      passed = false;
      detail.str("");
      detail << "FAILED: " << what;
    }
  }
};

// m positives at +1 and k negatives folded to -1, so c = m/k.
Dataset sphere_1d(int m, int k) {
  Examples x(m + k, 1);
  x.topRows(m).setOnes();
  x.bottomRows(k).setConstant(-1.0);
  return Dataset(std::move(x));
}

// Non-separable random datasets without outliers.
std::vector<Dataset> random_datasets(int count, std::uint64_t seed, const std::vector<Index>& dims) {
  std::mt19937_64 rng(seed);
  std::vector<Dataset> out;
  while (static_cast<int>(out.size()) < count) {
    GeneratorConfig g;
    g.dim = dims[out.size() % dims.size()];
    g.n_min = 20;
    g.n_max = 60;
    g.outlier_fraction = 0.0;
    Dataset d = generate_dataset(g, rng);
    try {
      solve_newton(d);
    } catch (const SeparableData&) {
      continue;
    }
    out.push_back(std::move(d));
  }
  return out;
}

Vector random_tail_noise(Index dim, Index tail_from, double norm, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector v = Vector::Zero(dim);
  for (Index j = tail_from; j < dim; ++j) v(j) = normal(rng);
  return v * (norm / v.norm());
}

// 1: every grid orbit reaches |w - ln c| <= 1e-8 within 1e6 steps, through
// the closed-form map and through solver + GD on explicit 1D datasets.
void criterion_1(Check& ck) {
  const int ratios[][2] = {{3, 2}, {2, 1}, {3, 1}, {10, 1}, {100, 1}};
  long worst_closed = 0;
  long worst_pipeline = 0;
  long runs = 0;
  for (int ci = 0; ci < 5; ++ci) {
    const double c = kCs[ci];
    const onedim::Problem p(c);
    const Dataset data = sphere_1d(ratios[ci][0], ratios[ci][1]);
    const SolveReport solved = solve_newton(data);
    ck.require(std::fabs(solved.w_star(0) - std::log(c)) <= 1e-10,
               "solver w* differs from ln c for c = " + sci(c));
    for (double gamma : kGammas) {
      const double eta = step_size(gamma, solved.lambda_max);
      for (int k = 0; k <= 100; ++k) {
        const double w0 = -50.0 + k;
        long t = 0;
        for (double w = w0; std::fabs(w - std::log(c)) > 1e-8; w = onedim::map_T(w, p, gamma)) {
          if (++t > 1000000) break;
        }
        ck.require(t <= 1000000, "closed-form orbit did not converge: c = " + sci(c) +
                                     ", gamma = " + sci(gamma) + ", w0 = " + sci(w0));
        worst_closed = std::max(worst_closed, t);

        Vector w = Vector::Constant(1, w0);
        long s = 0;
        while (std::fabs(w(0) - std::log(c)) > 1e-8 && s <= 1000000) {
          w -= eta * grad(w, data);
          ++s;
        }
        ck.require(s <= 1000000, "dataset GD did not converge: c = " + sci(c) +
                                     ", gamma = " + sci(gamma) + ", w0 = " + sci(w0));
        worst_pipeline = std::max(worst_pipeline, s);
        ++runs;
      }
    }
  }
  if (ck.passed) {
    ck.detail << runs << " orbits x 2 routes; worst steps: closed form " << worst_closed
              << ", dataset GD " << worst_pipeline;
  }
}

// 2: zero lemma violations on 1e4-point grids for every (c, gamma).
void criterion_2(Check& ck) {
  double min_margin = std::numeric_limits<double>::infinity();
  long checked = 0;
  for (double c : kCs) {
    for (double gamma : kGammas) {
      try {
        const onedim::LemmaReport r = onedim::verify_lemmas(onedim::Problem(c), gamma, {10000, 20.0, 1e-12});
        checked += r.checked;
        if (r.crossings > 0) min_margin = std::min(min_margin, r.worst_bound_margin);
      } catch (const LemmaViolation& e) {
        ck.require(false, "c = " + sci(c) + ", gamma = " + sci(gamma) + ": " + e.what());
      }
    }
  }
  if (ck.passed) ck.detail << checked << " points, 0 violations, min bound margin " << sci(min_margin);
}

// Worst right-left-right ratio inside (w*, w~) over a grid and over orbits
// started from the acceptance w0 grid.
double worst_two_step_ratio(double c, double gamma, Check& ck) {
  const onedim::Problem p(c);
  const double ws = p.w_star();
  const double wt = onedim::crossing_point(p, gamma);
  const double bound = onedim::rate_estimate(gamma) + 1e-12;
  double worst = 0.0;
  auto visit = [&](double w) {
    if (!(w > ws && w < wt)) return;
    const double w1 = onedim::map_T(w, p, gamma);
    if (!(w1 < ws)) return;
    const double ratio = (onedim::map_T(w1, p, gamma) - ws) / (w - ws);
    ck.require(ratio <= bound, "two-step ratio " + sci(ratio) + " exceeds the rate bound at c = " +
                                   sci(c) + ", gamma = " + sci(gamma));
    worst = std::max(worst, ratio);
  };
  const int points = 10000;
  for (int k = 1; k <= points; ++k) visit(ws + (wt - ws) * k / (points + 1.0));
  for (int k = 0; k <= 100; ++k) {
    double w = -50.0 + k;
    for (int t = 0; t < 20000 && std::fabs(w - ws) > 1e-12; ++t) {
      visit(w);
      w = onedim::map_T(w, p, gamma);
    }
  }
  return worst;
}

// 3: two-step ratios inside (w*, w~) stay below 1 - (2-gamma)/gamma, and
// approach it as gamma -> 2.
void criterion_3(Check& ck) {
  for (double c : kCs) {
    for (double gamma : kGammas) worst_two_step_ratio(c, gamma, ck);
  }
  std::ostringstream trend;
  for (double c : kCs) {
    double prev_ratio = -1.0;
    double prev_gap = std::numeric_limits<double>::infinity();
    for (double gamma : kTrendGammas) {
      const double ratio = worst_two_step_ratio(c, gamma, ck);
      const double gap = onedim::rate_estimate(gamma) - ratio;
      ck.require(ratio > prev_ratio, "worst ratio not increasing in gamma at c = " + sci(c));
      ck.require(gap < prev_gap, "gap to the bound not shrinking in gamma at c = " + sci(c));
      prev_ratio = ratio;
      prev_gap = gap;
      if (c == 3.0) trend << " " << sci(gamma) << ":" << sci(ratio) << "/" << sci(onedim::rate_estimate(gamma));
    }
  }
  if (ck.passed) ck.detail << "no bound violations; c=3 worst/bound by gamma" << trend.str();
}

// 4: Fact 1 on 20 datasets x 3 scale factors.
void criterion_4(Check& ck) {
  const std::vector<Dataset> sets = random_datasets(20, 404, {1, 2, 5});
  std::mt19937_64 rng(4040);
  std::normal_distribution<double> normal;
  double worst_dev = 0.0;
  double worst_lambda = 0.0;
  for (const Dataset& d : sets) {
    Vector w0(d.dim());
    for (Index j = 0; j < d.dim(); ++j) w0(j) = 2.0 * normal(rng);
    for (double c : {0.5, 2.0, 10.0}) {
      const ScalingCheck r = verify_scaling(d, c, w0, 1.9, 500);
      worst_dev = std::max(worst_dev, r.max_deviation);
      worst_lambda = std::max(worst_lambda, r.lambda_ratio_error);
      ck.require(r.max_deviation <= 1e-10, "trajectory deviation " + sci(r.max_deviation));
      ck.require(r.lambda_ratio_error <= 1e-10, "lambda ratio error " + sci(r.lambda_ratio_error));
    }
  }
  if (ck.passed) {
    ck.detail << "60 pairs; max deviation " << sci(worst_dev) << ", max |lambda^/(c^2 lambda) - 1| "
              << sci(worst_lambda);
  }
}

// 5: norms, lifted stationarity, block Hessian, lifted curvature.
void criterion_5(Check& ck) {
  std::mt19937_64 rng(505);
  int bases = 0;
  int lambda_checks = 0;
  int below_checks = 0;
  int block_checks = 0;
  double worst = 0.0;
  while (bases < 20) {
    GeneratorConfig g;
    g.n_min = 5;
    g.n_max = 15;
    g.outlier_fraction = 0.0;
    const Dataset raw = generate_dataset(g, rng);
    Examples base = normalize_into_ball(raw.examples());
    // Shrink some rows so the padding is not negligible everywhere.
    std::uniform_real_distribution<double> shrink(0.3, 1.0);
    for (Index i = 0; i < base.rows(); ++i) base.row(i) *= shrink(rng);
    SolveReport solved;
    try {
      solved = solve_newton(Dataset(base));
    } catch (const SeparableData&) {
      continue;
    }
    ++bases;
    const double cb = c_b(base, solved.w_star);
    const Index dmin = min_dimension(solved.lambda_max, cb);
    std::vector<Index> dims = {dmin, dmin + 5, 30};
    if (dmin - 1 >= 3) dims.push_back(dmin - 1);
    for (const Index d : dims) {
      const LiftedDataset lifted = lift(base, d);
      const Vector w_star = lifted_solution(solved.w_star, d);

      double norm_err = 0.0;
      if (d <= kMaxMaterializeDim) {
        const Dataset m = lifted.materialize();
        norm_err = (m.examples().rowwise().norm().array() - 1.0).abs().maxCoeff();
      } else {
        for (Index i = 0; i < base.rows(); ++i) {
          const double sq = base.row(i).squaredNorm() + lifted.padding()(i) * lifted.padding()(i);
          norm_err = std::max(norm_err, std::fabs(std::sqrt(sq) - 1.0));
        }
      }
      ck.require(norm_err <= 1e-12, "lifted example norm off by " + sci(norm_err));

      const double g = lifted_grad(w_star, lifted).norm();
      ck.require(g <= 1e-10, "lifted gradient at the lifted solution " + sci(g));

      if (d <= kMaxMaterializeDim) {
        const double r = verify_block_hessian(lifted, w_star).max();
        worst = std::max(worst, r);
        ck.require(r <= 1e-10, "block Hessian residual " + sci(r));
        ++block_checks;
      }

      const double lam = lambda_max(lifted, w_star);
      const double tail = cb / static_cast<double>(d - 2);
      if (d >= dmin) {
        ck.require(std::fabs(lam - solved.lambda_max) <= 1e-9,
                   "lifted lambda " + sci(lam) + " != lambda_b " + sci(solved.lambda_max) +
                       " at d = " + std::to_string(d));
        ++lambda_checks;
      } else if (tail > solved.lambda_max) {
        ck.require(std::fabs(lam - tail) <= 1e-9,
                   "lifted lambda " + sci(lam) + " != c_b/(d-2) " + sci(tail) +
                       " at d = " + std::to_string(d));
        ++below_checks;
      }
    }
  }
  if (ck.passed) {
    ck.detail << "20 bases; " << block_checks << " block checks (max residual " << sci(worst) << "), "
              << lambda_checks << " lambda = lambda_b checks, " << below_checks
              << " lambda = c_b/(d-2) checks";
  }
}

struct CycleFixture {
  HuntResult hit;
  double scale = 1.0;
  Examples base;           // normalized into the ball
  std::vector<Vector> cycle;  // in normalized coordinates
};

CycleFixture load_fixture(Check& ck) {
  const std::string text = read_text(cycle_fixture());
  const auto eol = text.find('\n');
  CycleFixture f{hunt_result_from_json(Json::parse(text.substr(0, eol))), 1.0, {}, {}};
  const Dataset& data = f.hit.dataset;
  const int k = f.hit.cycle.period;

  // Independent re-verification of the base cycle.
  const SolveReport solved = solve_newton(data);
  const double eta = step_size(f.hit.gamma, solved.lambda_max);
  RecordSpec rec;
  rec.tail_window = 2048;
  const Problem problem(std::in_place_type<Dataset>, data);
  const Trajectory traj = run_gd(problem, f.hit.cycle.cycle_points.front(), eta, 4096, rec);
  const auto found = detect_cycle_recurrence(traj, 1e-7);
  ck.require(found && found->period == k, "fixture base cycle not reproduced");
  if (found) {
    const auto floquet = floquet_multipliers(found->cycle_points, eta, problem);
    ck.require(floquet.front() < 1.0, "fixture base cycle is not stable");
  }

  f.scale = data.examples().rowwise().norm().maxCoeff();
  f.base = data.examples() / f.scale;
  if (found) {
    for (const Vector& p : found->cycle_points) f.cycle.push_back(p * f.scale);
  }
  return f;
}

void lifted_cycle_run(Check& ck, const CycleFixture& f, Index d, std::int64_t steps, bool full) {
  const int k = f.hit.cycle.period;
  const LiftedDataset lifted = lift(f.base, d);
  const Problem problem(std::in_place_type<LiftedDataset>, lifted);
  const SolveReport base_solved = solve_newton(Dataset(f.base));
  const double lambda = lambda_max(lifted, lifted_solution(base_solved.w_star, d));
  const double eta = step_size(f.hit.gamma, lambda);

  Vector w0 = lifted_solution(f.cycle.front(), d);
  w0 += random_tail_noise(d, 2, 1e-4, 606);
  RecordSpec rec;
  rec.tail_window = 2048;
  const Trajectory traj = run_gd(problem, w0, eta, steps, rec);

  const auto found = detect_cycle_recurrence(traj, 1e-7);
  ck.require(found.has_value(), "no recurrence in the lifted run at d = " + std::to_string(d));
  if (!found) return;
  ck.require(found->period == k, "lifted period " + std::to_string(found->period) +
                                     " != base period " + std::to_string(k));
  const auto spectral = dominant_period(power_spectrum(traj.norm_series, 1024));
  ck.require(spectral == k, "dominant spectral period " +
                                (spectral ? std::to_string(*spectral) : std::string("none")) +
                                " != " + std::to_string(k));
  const double tail = traj.last().tail(d - 2).cwiseAbs().maxCoeff();
  ck.require(tail < 1e-8, "tail coordinates at " + sci(tail));
  double top = 0.0;
  if (full) {
    const auto floquet = floquet_multipliers(found->cycle_points, eta, problem);
    top = floquet.front();
    ck.require(top < 1.0, "lifted Floquet magnitude " + sci(top));
  }
  if (ck.passed) {
    ck.detail << "k = " << k << ", d = " << d << ", spectral period " << *spectral
              << ", residual " << sci(found->recurrence_residual) << ", max |tail| " << sci(tail);
    if (full) ck.detail << ", max |Floquet| " << sci(top);
  }
}

// 6: the lifted problem at d = max(min_dim, 50) follows the base cycle.
void criterion_6(Check& ck) {
  const CycleFixture f = load_fixture(ck);
  if (!ck.passed) return;
  const SolveReport solved = solve_newton(Dataset(f.base));
  const Index dmin = min_dimension(solved.lambda_max, c_b(f.base, solved.w_star));
  lifted_cycle_run(ck, f, std::max<Index>(dmin, 50), 20000, true);
}

// 6b: same base at d = 5000 through the structured gradient.
void criterion_6b(Check& ck) {
  const CycleFixture f = load_fixture(ck);
  if (!ck.passed) return;
  const SolveReport solved = solve_newton(Dataset(f.base));
  const Index dmin = min_dimension(solved.lambda_max, c_b(f.base, solved.w_star));
  ck.require(dmin <= 5000, "fixture needs d >= " + std::to_string(dmin));
  if (!ck.passed) return;
  lifted_cycle_run(ck, f, 5000, 20000, false);
}

// 7: derivative oracles.
void criterion_7(Check& ck) {
  std::mt19937_64 rng(707);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<Index> dims(1, 6);
  std::uniform_int_distribution<Index> sizes(5, 40);
  double worst_grad = 0.0;
  double worst_hess = 0.0;
  double worst_lift = 0.0;
  const int cases = 120;
  for (int c = 0; c < cases; ++c) {
    const Index d = dims(rng);
    Examples x(sizes(rng), d);
    for (Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
    const Dataset data(x);
    Vector w(d);
    for (Index j = 0; j < d; ++j) w(j) = normal(rng);

    const Vector g = grad(w, data);
    const Matrix h = hessian(w, data);
    const double step = 1e-5;
    Vector g_fd(d);
    Matrix h_fd(d, d);
    for (Index j = 0; j < d; ++j) {
      Vector wp = w;
      Vector wm = w;
      wp(j) += step;
      wm(j) -= step;
      g_fd(j) = (loss(wp, data) - loss(wm, data)) / (2.0 * step);
      h_fd.col(j) = (grad(wp, data) - grad(wm, data)) / (2.0 * step);
    }
    const double eg = (g - g_fd).norm() / (g.norm() + 1e-8);
    const double eh = (h - h_fd).cwiseAbs().maxCoeff() / (h.cwiseAbs().maxCoeff() + 1e-8);
    worst_grad = std::max(worst_grad, eg);
    worst_hess = std::max(worst_hess, eh);
    ck.require(eg <= 1e-6, "gradient vs finite differences " + sci(eg));
    ck.require(eh <= 1e-5, "Hessian vs gradient differences " + sci(eh));

    Examples base(sizes(rng), 2);
    for (Index i = 0; i < base.size(); ++i) base.data()[i] = normal(rng);
    base = normalize_into_ball(base);
    std::uniform_real_distribution<double> shrink(0.2, 1.0);
    for (Index i = 0; i < base.rows(); ++i) base.row(i) *= shrink(rng);
    const Index ambient = 3 + static_cast<Index>(c % 18);
    const LiftedDataset lifted(base, ambient);
    Vector v(ambient);
    for (Index j = 0; j < ambient; ++j) v(j) = normal(rng);
    const double el = (lifted_grad(v, lifted) - grad(v, lifted.materialize())).norm();
    worst_lift = std::max(worst_lift, el);
    ck.require(el <= 1e-12, "lifted gradient vs materialized " + sci(el));
  }
  if (ck.passed) {
    ck.detail << cases << " cases each; max rel err grad " << sci(worst_grad) << ", hessian "
              << sci(worst_hess) << ", lifted grad abs err " << sci(worst_lift);
  }
}

// 8: monotone loss for eta <= 1/smoothness; instability of w* at gamma = 2.5.
void criterion_8(Check& ck) {
  const std::vector<Dataset> sets = random_datasets(20, 808, {1, 2, 5});
  std::mt19937_64 rng(8080);
  std::normal_distribution<double> normal;
  double min_top = std::numeric_limits<double>::infinity();
  for (const Dataset& d : sets) {
    const Problem problem(std::in_place_type<Dataset>, d);
    Vector w(d.dim());
    for (Index j = 0; j < d.dim(); ++j) w(j) = 3.0 * normal(rng);
    const double eta = 1.0 / smoothness(d);
    double prev = loss(w, d);
    for (int t = 0; t < 500; ++t) {
      w -= eta * grad(w, d);
      const double cur = loss(w, d);
      // Rounding slack only: once the decrease drops below an ulp it is noise.
      ck.require(cur <= prev + 4.0 * std::numeric_limits<double>::epsilon() * std::fabs(prev),
                 "loss increased at step " + std::to_string(t + 1));
      prev = cur;
    }

    const SolveReport solved = solve_newton(d);
    const Matrix h = hessian(solved.w_star, d);
    const double lmin = Eigen::SelfAdjointEigenSolver<Matrix>(h, Eigen::EigenvaluesOnly).eigenvalues()(0);
    ck.require(lmin > 0.0, "degenerate fixed point");
    const auto floquet = floquet_multipliers({solved.w_star}, step_size(2.5, solved.lambda_max), problem);
    min_top = std::min(min_top, floquet.front());
    ck.require(floquet.front() > 1.0, "fixed point stable at gamma = 2.5");
  }
  if (ck.passed) {
    ck.detail << "20 datasets monotone over 500 steps; gamma = 2.5 smallest top Floquet magnitude "
              << sci(min_top);
  }
}

const char* title(const std::string& id) {
  if (id == "1") return "1D global convergence";
  if (id == "2") return "1D lemma suite";
  if (id == "3") return "two-step rate bound";
  if (id == "4") return "scaling invariance";
  if (id == "5") return "lift correctness";
  if (id == "6") return "lifted cycle preservation and spectrum";
  if (id == "6b") return "lifted cycle at d = 5000";
  if (id == "7") return "derivative oracles";
  if (id == "8") return "classical regime and instability above 2/lambda";
  throw std::invalid_argument("unknown acceptance criterion '" + id + "'");
}

}  // namespace

std::vector<std::string> criterion_ids() { return {"1", "2", "3", "4", "5", "6", "6b", "7", "8"}; }

std::vector<std::string> suite_criteria(const std::string& suite) {
  if (suite == "all") return criterion_ids();
  if (suite == "onedim") return {"1", "2", "3"};
  if (suite == "scaling") return {"4"};
  if (suite == "lift") return {"5"};
  if (suite == "cycle") return {"6"};
  if (suite == "large") return {"6b"};
  if (suite == "oracles") return {"7"};
  if (suite == "classical") return {"8"};
  const auto ids = criterion_ids();
  if (std::find(ids.begin(), ids.end(), suite) != ids.end()) return {suite};
  throw std::invalid_argument("unknown suite '" + suite + "'");
}

void set_cycle_fixture(const std::filesystem::path& path) { fixture_path() = path; }

std::filesystem::path cycle_fixture() { return fixture_path(); }

Outcome run(const std::string& id) {
  Outcome o;
  o.id = id;
  o.title = title(id);
  const auto start = std::chrono::steady_clock::now();
  Check ck;
  try {
    if (id == "1") criterion_1(ck);
    if (id == "2") criterion_2(ck);
    if (id == "3") criterion_3(ck);
    if (id == "4") criterion_4(ck);
    if (id == "5") criterion_5(ck);
    if (id == "6") criterion_6(ck);
    if (id == "6b") criterion_6b(ck);
    if (id == "7") criterion_7(ck);
    if (id == "8") criterion_8(ck);
  } catch (const std::exception& e) {
    ck.require(false, std::string("exception: ") + e.what());
  }
  o.passed = ck.passed;
  o.detail = ck.detail.str();
  o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return o;
}

std::string format_line(const Outcome& o) {
  char secs[32];
  std::snprintf(secs, sizeof(secs), "%.1fs", o.seconds);
  return std::string(o.passed ? "PASS" : "FAIL") + "  criterion " + o.id + " (" + o.title + ", " +
         secs + "): " + o.detail;
}

}  // namespace lrcycle::acceptance
