#ifndef LRCYCLE_TRANSFORMS_H_
#define LRCYCLE_TRANSFORMS_H_

#include <cstdint>
#include <random>
#include <vector>

#include "lrcycle/dynamics.h"
#include "lrcycle/model.h"

namespace lrcycle {

// Every example multiplied by c > 0.
Dataset scale_dataset(const Dataset& d, double c);

struct ScalingCheck {
  double max_deviation = 0.0;  // max_t ||w^_t - w_t/c|| / (1 + ||w_t/c||)
  double lambda = 0.0;
  double lambda_scaled = 0.0;
  double lambda_ratio_error = 0.0;  // |lambda^ / (c^2 lambda) - 1|
  double w_star_error = 0.0;        // ||w^* - w*/c|| / (1 + ||w*/c||)
};

// Runs GD on d from w0 with eta = gamma/lambda and on c*d from w0/c with
// eta^ = gamma/lambda^, each with its own solve, and compares the two.
ScalingCheck verify_scaling(const Dataset& d, double c, const Vector& w0, double gamma,
                            std::int64_t steps);

// Two Gaussian clusters at +-mu with shared covariance, a flipped-label
// fraction, and a fraction of rows stretched by one random factor per
// dataset. Labels are folded into the rows.
struct GeneratorConfig {
  Index dim = 2;
  Index n_min = 4;
  Index n_max = 19;  // inclusive
  double mean_scale = 1.0;
  double noise_scale = 1.0;
  double flip_fraction = 0.25;
  double outlier_fraction = 0.25;
  double outlier_scale_min = 2.0;
  double outlier_scale_max = 30.0;
};

Dataset generate_dataset(const GeneratorConfig& cfg, std::mt19937_64& rng);

struct HuntConfig {
  double gamma = 1.9;
  int trials = 1000;
  int first_trial = 0;  // trials first_trial .. first_trial + trials - 1
  std::uint64_t seed = 1;
  std::int64_t budget = 4000;  // GD steps per probe
  int probes = 64;             // random initializations per dataset
  int max_hits = 0;            // stop after this many hits (0: run all trials)
  double tol_cycle = 1e-7;
  Index tail_window = 128;
  // Skip near-separable instances: huge ||w*|| or an ill-conditioned Hessian.
  double max_wstar_norm = 10.0;
  double min_conditioning = 1e-4;
  GeneratorConfig generator;
};

struct HuntResult {
  int trial = 0;
  Dataset dataset;
  double gamma = 0.0;
  double lambda = 0.0;
  double eta = 0.0;
  Vector w_star;
  CycleReport cycle;        // floquet_multipliers filled in
  double basin_sample = 0.0;  // fraction of probes that ended on the cycle
  double reverify_residual = 0.0;
};

// Samples datasets and initializations, keeps stable cycles of period >= 2
// that survive a restart from a perturbed cycle point. Deterministic in the
// seed; results ordered by trial index.
std::vector<HuntResult> hunt_cycles(const HuntConfig& cfg);

// Trial-level seed derivation used by hunt_cycles.
std::mt19937_64 trial_rng(std::uint64_t seed, int trial);

}  // namespace lrcycle

#endif  // LRCYCLE_TRANSFORMS_H_
