#include "lrcycle/transforms.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <string>
#include <thread>

#include "lrcycle/errors.h"
#include "lrcycle/logistic.h"
#include "lrcycle/solver.h"

namespace lrcycle {

namespace {

Vector random_direction(Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector v(dim);
  do {
    for (Index i = 0; i < dim; ++i) v(i) = normal(rng);
  } while (v.norm() == 0.0);
  return v / v.norm();
}

// GD on K initializations at once; rows of `v` are iterates.
void batched_gd(const Examples& x, double eta, std::int64_t steps, Matrix& v) {
  const double scale = eta / static_cast<double>(x.rows());
  Matrix z(v.rows(), x.rows());
  for (std::int64_t t = 0; t < steps; ++t) {
    z.noalias() = v * x.transpose();
    z = z.unaryExpr([](double s) { return sigmoid(-s); });
    v.noalias() += scale * (z * x);
  }
}

std::optional<HuntResult> run_trial(const HuntConfig& cfg, int trial) {
  std::mt19937_64 rng = trial_rng(cfg.seed, trial);
  Dataset data = generate_dataset(cfg.generator, rng);

  SolveReport solved;
  try {
    solved = solve_newton(data);
  } catch (const SeparableData&) {
    return std::nullopt;
  } catch (const NoConvergence&) {
    return std::nullopt;
  }
  if (solved.w_star.norm() > cfg.max_wstar_norm) return std::nullopt;
  Eigen::SelfAdjointEigenSolver<Matrix> es(hessian(solved.w_star, data), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < cfg.min_conditioning * es.eigenvalues().maxCoeff()) {
    return std::nullopt;
  }

  const double eta = step_size(cfg.gamma, solved.lambda_max);
  const Index d = data.dim();
  std::uniform_real_distribution<double> log_radius(-2.0, 3.0);
  Matrix v(cfg.probes, d);
  for (int k = 0; k < cfg.probes; ++k) {
    const double r = std::exp(log_radius(rng));
    v.row(k) = (solved.w_star + r * random_direction(d, rng)).transpose();
  }
  batched_gd(data.examples(), eta, cfg.budget, v);

  const Problem problem(std::in_place_type<Dataset>, data);
  RecordSpec rec;
  rec.tail_window = cfg.tail_window;
  int examined = 0;
  for (int k = 0; k < cfg.probes && examined < 4; ++k) {
    const Vector end = v.row(k).transpose();
    if (!end.allFinite()) continue;
    const double dist = (end - solved.w_star).norm();
    if (dist <= 1e-6 * (1.0 + solved.w_star.norm()) || dist > 1e6) continue;
    ++examined;

    const Trajectory traj = run_gd(problem, end, eta, cfg.tail_window - 1, rec);
    std::optional<CycleReport> cycle = detect_cycle_recurrence(traj, cfg.tol_cycle);
    if (!cycle || cycle->period < 2) continue;
    const std::vector<double> floquet = floquet_multipliers(cycle->cycle_points, eta, problem);
    if (floquet.front() >= 1.0) continue;

    // Restart from a perturbed cycle point; a transient would not come back.
    const Vector start = cycle->cycle_points.front() + 1e-6 * random_direction(d, rng);
    const Trajectory again = run_gd(problem, start, eta, cfg.budget, rec);
    const std::optional<CycleReport> check = detect_cycle_recurrence(again, cfg.tol_cycle);
    if (!check || check->period != cycle->period ||
        check->recurrence_residual > cfg.tol_cycle) {
      continue;
    }

    int on_cycle = 0;
    for (int j = 0; j < cfg.probes; ++j) {
      const Vector pj = v.row(j).transpose();
      for (const Vector& c : cycle->cycle_points) {
        if ((pj - c).norm() <= 1e-6 * (1.0 + c.norm())) {
          ++on_cycle;
          break;
        }
      }
    }

    cycle->floquet_multipliers = floquet;
    HuntResult hit{trial,         std::move(data),
                   cfg.gamma,     solved.lambda_max,
                   eta,           solved.w_star,
                   std::move(*cycle), static_cast<double>(on_cycle) / cfg.probes,
                   check->recurrence_residual};
    return hit;
  }
  return std::nullopt;
}

}  // namespace

Dataset scale_dataset(const Dataset& d, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("scale factor must be positive");
  return Dataset(d.examples() * c);
}

ScalingCheck verify_scaling(const Dataset& d, double c, const Vector& w0, double gamma,
                            std::int64_t steps) {
  if (steps < 1) throw std::invalid_argument("verify_scaling needs steps >= 1");
  const Dataset scaled = scale_dataset(d, c);
  const SolveReport base = solve_newton(d);
  const SolveReport hat = solve_newton(scaled);

  RecordSpec rec;
  rec.tail_window = steps + 1;
  const Trajectory a = run_gd(Problem(std::in_place_type<Dataset>, d), w0,
                              step_size(gamma, base.lambda_max), steps, rec);
  const Trajectory b = run_gd(Problem(std::in_place_type<Dataset>, scaled), w0 / c,
                              step_size(gamma, hat.lambda_max), steps, rec);

  ScalingCheck out;
  for (std::size_t t = 0; t < a.tail.size(); ++t) {
    const Vector expected = a.tail[t] / c;
    out.max_deviation =
        std::fmax(out.max_deviation, (b.tail[t] - expected).norm() / (1.0 + expected.norm()));
  }
  out.lambda = base.lambda_max;
  out.lambda_scaled = hat.lambda_max;
  out.lambda_ratio_error = std::fabs(hat.lambda_max / (c * c * base.lambda_max) - 1.0);
  const Vector expected_star = base.w_star / c;
  out.w_star_error = (hat.w_star - expected_star).norm() / (1.0 + expected_star.norm());
  return out;
}

Dataset generate_dataset(const GeneratorConfig& cfg, std::mt19937_64& rng) {
  if (cfg.dim < 1 || cfg.n_min < 1 || cfg.n_max < cfg.n_min) {
    throw std::invalid_argument("invalid generator configuration");
  }
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<Index> size(cfg.n_min, cfg.n_max);

  const Index n = size(rng);
  Vector mu(cfg.dim);
  for (Index j = 0; j < cfg.dim; ++j) mu(j) = cfg.mean_scale * normal(rng);
  Examples x(n, cfg.dim);
  for (Index i = 0; i < n; ++i) {
    const double y = unit(rng) < 0.5 ? 1.0 : -1.0;
    for (Index j = 0; j < cfg.dim; ++j) x(i, j) = y * mu(j) + cfg.noise_scale * normal(rng);
    const double label = unit(rng) < cfg.flip_fraction ? -y : y;
    x.row(i) *= label;
  }
  const double stretch =
      std::uniform_real_distribution<double>(cfg.outlier_scale_min, cfg.outlier_scale_max)(rng);
  for (Index i = 0; i < n; ++i) {
    if (unit(rng) < cfg.outlier_fraction) x.row(i) *= stretch;
  }
  return Dataset(std::move(x));
}

std::mt19937_64 trial_rng(std::uint64_t seed, int trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial)};
  return std::mt19937_64(seq);
}

std::vector<HuntResult> hunt_cycles(const HuntConfig& cfg) {
  if (!(cfg.gamma > 0.0 && cfg.gamma < 2.0)) {
    throw std::invalid_argument("hunt needs 0 < gamma < 2");
  }
  if (cfg.trials < 0 || cfg.first_trial < 0 || cfg.probes < 1 || cfg.budget < 1 || cfg.tail_window < 4) {
    throw std::invalid_argument("invalid hunt configuration");
  }
  const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  const int batch = static_cast<int>(workers) * 8;
  std::vector<HuntResult> hits;
  const int last = cfg.first_trial + cfg.trials;
  for (int begin = cfg.first_trial; begin < last; begin += batch) {
    const int end = std::min(last, begin + batch);
    std::vector<std::optional<HuntResult>> slots(static_cast<std::size_t>(end - begin));
    std::atomic<int> next{begin};
    auto work = [&] {
      for (int t = next++; t < end; t = next++) {
        slots[static_cast<std::size_t>(t - begin)] = run_trial(cfg, t);
      }
    };
    if (workers == 1) {
      work();
    } else {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    for (auto& s : slots) {
      if (s) hits.push_back(std::move(*s));
    }
    if (cfg.max_hits > 0 && static_cast<int>(hits.size()) >= cfg.max_hits) {
      hits.erase(hits.begin() + cfg.max_hits, hits.end());
      break;
    }
  }
  return hits;
}

}  // namespace lrcycle
