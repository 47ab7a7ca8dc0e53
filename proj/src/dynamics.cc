#include "lrcycle/dynamics.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "lrcycle/errors.h"
#include "lrcycle/fft.h"
#include "lrcycle/logistic.h"

namespace lrcycle {

namespace {

bool is_power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

std::vector<double> sorted_magnitudes(const Matrix& m) {
  Eigen::EigenSolver<Matrix> es(m, false);
  std::vector<double> mags;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) mags.push_back(std::abs(es.eigenvalues()(i)));
  std::sort(mags.begin(), mags.end(), std::greater<>());
  return mags;
}

Matrix monodromy(const std::vector<Vector>& points, double eta,
                 const std::function<Matrix(const Vector&)>& hess, Index dim) {
  Matrix m = Matrix::Identity(dim, dim);
  for (const Vector& p : points) {
    const Matrix jac = Matrix::Identity(dim, dim) - eta * hess(p);
    m = jac * m;
  }
  return m;
}

}  // namespace

Trajectory run_gd(const Problem& problem, const Vector& w0, double eta, std::int64_t steps,
                  const RecordSpec& record) {
  if (!(eta > 0.0)) throw std::invalid_argument("step size must be positive");
  if (steps < 0) throw std::invalid_argument("steps must be non-negative");
  const Index d = dim(problem);
  if (w0.size() != d) {
    throw DimensionMismatch("w0 has dimension " + std::to_string(w0.size()) + ", problem has " +
                            std::to_string(d));
  }
  if (record.tail_window < 1) throw std::invalid_argument("tail window must be >= 1");
  for (Index c : record.coords) {
    if (c < 0 || c >= d) throw DimensionMismatch("recorded coordinate out of range");
  }

  Trajectory traj;
  traj.w0 = w0;
  traj.eta = eta;
  traj.norm_series.reserve(static_cast<std::size_t>(steps) + 1);
  for (Index c : record.coords) traj.sampled_coords[c].reserve(steps + 1);

  const std::size_t cap = static_cast<std::size_t>(record.tail_window);
  std::vector<Vector> ring;
  ring.reserve(std::min<std::size_t>(cap, static_cast<std::size_t>(steps) + 1));
  std::size_t head = 0;  // next slot to overwrite once full

  auto observe = [&](const Vector& w, std::int64_t t) {
    const double norm = w.norm();
    if (!std::isfinite(norm)) {
      throw NonFiniteValue("non-finite iterate at step " + std::to_string(t), t);
    }
    if (norm > record.divergence_bound) {
      throw Diverged("||w|| = " + std::to_string(norm) + " exceeded the divergence bound at step " +
                         std::to_string(t),
                     t);
    }
    traj.norm_series.push_back(norm);
    for (Index c : record.coords) traj.sampled_coords[c].push_back(w(c));
    if (ring.size() < cap) {
      ring.push_back(w);
    } else {
      ring[head] = w;
      head = (head + 1) % cap;
    }
  };

  std::visit(
      [&](const auto& data) {
        Vector w = w0;
        observe(w, 0);
        if (record.record_loss) traj.loss_series.push_back(loss(w, data));
        for (std::int64_t t = 1; t <= steps; ++t) {
          w -= eta * grad(w, data);
          observe(w, t);
          if (record.record_loss) traj.loss_series.push_back(loss(w, data));
        }
      },
      problem);

  traj.steps_run = steps;
  traj.tail.reserve(ring.size());
  const std::size_t start = ring.size() < cap ? 0 : head;
  for (std::size_t i = 0; i < ring.size(); ++i) traj.tail.push_back(ring[(start + i) % ring.size()]);
  traj.tail_start = steps + 1 - static_cast<std::int64_t>(traj.tail.size());
  return traj;
}

std::optional<CycleReport> detect_cycle_recurrence(const Trajectory& traj, double tol) {
  const auto& tail = traj.tail;
  const std::size_t n = tail.size();
  if (n < 2) return std::nullopt;
  std::vector<double> norms(n);
  for (std::size_t t = 0; t < n; ++t) norms[t] = tail[t].norm();
  for (std::size_t k = 1; k <= n / 2; ++k) {
    double residual = 0.0;
    bool ok = true;
    for (std::size_t t = 0; t + k < n; ++t) {
      const double r = (tail[t + k] - tail[t]).norm();
      if (r > tol * (1.0 + norms[t])) {
        ok = false;
        break;
      }
      residual = std::fmax(residual, r);
    }
    if (!ok) continue;
    CycleReport report;
    report.period = static_cast<int>(k);
    report.recurrence_residual = residual;
    report.cycle_points.assign(tail.end() - static_cast<std::ptrdiff_t>(k), tail.end());
    return report;
  }
  return std::nullopt;
}

std::vector<SpectralPeak> power_spectrum(const std::vector<double>& series, Index window) {
  if (!is_power_of_two(window)) throw std::invalid_argument("spectrum window must be a power of two");
  if (static_cast<std::size_t>(window) > series.size()) {
    throw std::invalid_argument("spectrum window " + std::to_string(window) +
                                " exceeds series length " + std::to_string(series.size()));
  }
  const auto first = series.end() - window;
  double mean = 0.0;
  for (auto it = first; it != series.end(); ++it) mean += *it;
  mean /= static_cast<double>(window);
  std::vector<std::complex<double>> buf;
  buf.reserve(static_cast<std::size_t>(window));
  for (auto it = first; it != series.end(); ++it) buf.emplace_back(*it - mean, 0.0);
  fft_radix2(buf);
  std::vector<SpectralPeak> out;
  for (Index k = 0; k <= window / 2; ++k) {
    out.push_back({static_cast<double>(k) / static_cast<double>(window),
                   std::norm(buf[static_cast<std::size_t>(k)]) / static_cast<double>(window)});
  }
  return out;
}

std::vector<SpectralPeak> top_peaks(const std::vector<SpectralPeak>& spectrum, std::size_t count) {
  std::vector<SpectralPeak> peaks;
  for (std::size_t k = 1; k < spectrum.size(); ++k) {
    const double p = spectrum[k].power;
    const bool left = k == 1 || p >= spectrum[k - 1].power;
    const bool right = k + 1 == spectrum.size() || p >= spectrum[k + 1].power;
    if (left && right && p > 0.0) peaks.push_back(spectrum[k]);
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [](const SpectralPeak& a, const SpectralPeak& b) { return a.power > b.power; });
  if (peaks.size() > count) peaks.resize(count);
  return peaks;
}

std::optional<int> dominant_period(const std::vector<SpectralPeak>& spectrum) {
  if (spectrum.size() < 3) return std::nullopt;
  const double window = 2.0 * static_cast<double>(spectrum.size() - 1);
  std::vector<double> powers;
  std::size_t best = 1;
  for (std::size_t k = 1; k < spectrum.size(); ++k) {
    powers.push_back(spectrum[k].power);
    if (spectrum[k].power > spectrum[best].power) best = k;
  }
  const double peak = spectrum[best].power;
  // Below this the series is constant up to rounding.
  constexpr double kPowerFloor = 1e-20;
  const double med = median(powers);
  if (!(peak > 10.0 * med) || peak <= kPowerFloor) return std::nullopt;

  std::vector<double> strong;
  for (const SpectralPeak& p : top_peaks(spectrum, spectrum.size())) {
    if (p.power >= 0.1 * peak && p.power > 10.0 * med) strong.push_back(p.frequency);
  }
  const int max_period = static_cast<int>(window / 2);
  for (int k = 2; k <= max_period; ++k) {
    const double slack = static_cast<double>(k) / window;
    const bool fits = std::all_of(strong.begin(), strong.end(), [&](double f) {
      const double j = f * k;
      return std::round(j) >= 1.0 && std::fabs(j - std::round(j)) <= slack;
    });
    if (fits) return k;
  }
  return static_cast<int>(std::lround(1.0 / spectrum[best].frequency));
}

std::vector<double> floquet_multipliers(const std::vector<Vector>& cycle_points, double eta,
                                        const Problem& problem, double tail_tol) {
  if (cycle_points.empty()) throw std::invalid_argument("cycle has no points");
  const Index d = dim(problem);
  for (const Vector& p : cycle_points) {
    if (p.size() != d) throw DimensionMismatch("cycle point dimension does not match problem");
  }
  if (d <= kMaxMaterializeDim) {
    return sorted_magnitudes(monodromy(
        cycle_points, eta, [&](const Vector& w) { return hessian(w, problem); }, d));
  }
  const auto* lifted = std::get_if<LiftedDataset>(&problem);
  if (lifted == nullptr) {
    throw DimensionTooLarge("Floquet multipliers need d <= " + std::to_string(kMaxMaterializeDim) +
                            " for explicit datasets");
  }
  const Index db = lifted->base_dim();
  const Index m = lifted->tail_dim();
  for (const Vector& p : cycle_points) {
    if (p.tail(m).cwiseAbs().maxCoeff() > tail_tol) {
      throw DimensionTooLarge(
          "structured Floquet multipliers need the cycle on the tail-free subspace");
    }
  }
  // On the tail-free subspace the lifted Hessian is block diagonal: the base
  // Hessian and (1/(n_b m)) sum sigma'(a_i) s_i^2 times the identity.
  const Dataset base(lifted->base());
  std::vector<Vector> base_points;
  double tail_product = 1.0;
  for (const Vector& p : cycle_points) {
    base_points.push_back(p.head(db));
    const Vector a = lifted->base() * p.head(db);
    double c = 0.0;
    for (Index i = 0; i < a.size(); ++i) {
      c += sigmoid_slope(a(i)) * lifted->padding()(i) * lifted->padding()(i);
    }
    c /= static_cast<double>(lifted->base_size() * m);
    tail_product *= 1.0 - eta * c;
  }
  std::vector<double> mags = sorted_magnitudes(monodromy(
      base_points, eta, [&](const Vector& w) { return hessian(w, base); }, db));
  mags.insert(mags.end(), static_cast<std::size_t>(m), std::fabs(tail_product));
  std::sort(mags.begin(), mags.end(), std::greater<>());
  return mags;
}

}  // namespace lrcycle
