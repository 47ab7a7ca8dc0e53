#ifndef LRCYCLE_DYNAMICS_H_
#define LRCYCLE_DYNAMICS_H_

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "lrcycle/model.h"

namespace lrcycle {

struct RecordSpec {
  // Coordinates whose full series is kept (Figure 2 style panels).
  std::vector<Index> coords;
  // Number of trailing full iterates kept exactly.
  Index tail_window = 2048;
  bool record_loss = false;
  // ||w_t|| above this raises Diverged.
  double divergence_bound = std::numeric_limits<double>::infinity();
};

struct Trajectory {
  Vector w0;
  double eta = 0.0;
  std::int64_t steps_run = 0;
  std::vector<double> norm_series;  // ||w_t||, t = 0..steps_run
  std::vector<double> loss_series;  // only with RecordSpec::record_loss
  std::map<Index, std::vector<double>> sampled_coords;
  // Last min(tail_window, steps_run + 1) iterates, oldest first; tail[0] is
  // w_{tail_start}.
  std::vector<Vector> tail;
  std::int64_t tail_start = 0;

  const Vector& last() const { return tail.back(); }
};

// w_{t+1} = w_t - eta grad(w_t), lifted problems through the structured
// gradient. Throws NonFiniteValue / Diverged with the step index.
Trajectory run_gd(const Problem& problem, const Vector& w0, double eta, std::int64_t steps,
                  const RecordSpec& record = {});

struct SpectralPeak {
  double frequency;  // cycles per step, in [0, 1/2]
  double power;
};

struct CycleReport {
  int period = 0;
  // max over the tail window of ||w_{t+k} - w_t||
  double recurrence_residual = 0.0;
  // k consecutive iterates ending at the last tail entry.
  std::vector<Vector> cycle_points;
  std::vector<SpectralPeak> spectral_peaks;
  std::optional<int> spectral_period;
  std::optional<std::vector<double>> floquet_multipliers;
};

// Smallest k in [1, W/2] with ||w_{t+k} - w_t|| <= tol (1 + ||w_t||) across
// the whole tail window. nullopt if none qualifies.
std::optional<CycleReport> detect_cycle_recurrence(const Trajectory& traj, double tol = 1e-7);

// |DFT|^2 / window of the mean-removed last `window` samples, bins 0..window/2.
// window must be a power of two no larger than the series.
std::vector<SpectralPeak> power_spectrum(const std::vector<double>& series, Index window = 1024);

// Highest local maxima of a spectrum (DC excluded), strongest first.
std::vector<SpectralPeak> top_peaks(const std::vector<SpectralPeak>& spectrum, std::size_t count);

// Period implied by the dominant nonzero frequency, if its power exceeds 10x
// the median bin power. Harmonics are folded back onto the fundamental.
std::optional<int> dominant_period(const std::vector<SpectralPeak>& spectrum);

// Magnitudes (descending) of the eigenvalues of prod_j (I - eta H(w_j)).
// Datasets and lifted problems with d <= 64 materialize the Hessians; larger
// lifted problems use the block structure on the tail-free subspace and
// require every tail coordinate of the cycle to be below tail_tol.
std::vector<double> floquet_multipliers(const std::vector<Vector>& cycle_points, double eta,
                                        const Problem& problem, double tail_tol = 1e-6);

}  // namespace lrcycle

#endif  // LRCYCLE_DYNAMICS_H_
