#ifndef LRCYCLE_SOLVER_H_
#define LRCYCLE_SOLVER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "lrcycle/model.h"

namespace lrcycle {

struct SolveReport {
  Vector w_star;
  double lambda_max = 0.0;
  double grad_norm = 0.0;
  int newton_iters = 0;
  bool separable = false;
  // ||grad|| before each Newton step and at the end.
  std::vector<double> residuals;
};

struct NewtonOptions {
  double tol = 1e-12;
  // ||w|| beyond this while the gradient is still above tol => separable.
  double divergence_bound = 1e4;
  int max_iters = 200;
  double armijo_slope = 1e-4;
  double backtrack = 0.5;
  // Run the exact cone check before iterating when d <= 3 (and n is small
  // enough for the O(n^(d-1)) enumeration).
  bool exact_separability_check = true;
  double eigen_tol = 1e-12;
};

// Damped Newton from w = 0. Throws SeparableData, NonFiniteValue or
// NoConvergence.
SolveReport solve_newton(const Dataset& d, const NewtonOptions& opts = {});

// Exact check for d <= 3: returns a nonzero w with Xw >= 0 (some entry
// strictly positive) if one exists, i.e. the loss has no finite minimizer.
// Throws DimensionTooLarge for d > 3.
std::optional<Vector> separating_direction(const Dataset& d);

enum class EigenMethod { kLanczos, kPower };

struct EigenOptions {
  double tol = 1e-12;
  int max_iters = 100000;
  std::uint64_t seed = 0x5eed;
  EigenMethod method = EigenMethod::kLanczos;
};

using LinearOperator = std::function<Vector(const Vector&)>;

// Largest eigenvalue of a symmetric PSD operator. Throws NoConvergence.
double top_eigenvalue(const LinearOperator& op, Index dim, const EigenOptions& opts = {});

// lambda_max of the Hessian at w_star, matrix-free.
double lambda_max(const Problem& p, const Vector& w_star, const EigenOptions& opts = {});
double lambda_max(const Dataset& d, const Vector& w_star, const EigenOptions& opts = {});
double lambda_max(const LiftedDataset& l, const Vector& w_star, const EigenOptions& opts = {});

// gamma / lambda. Throws std::invalid_argument unless both are positive.
double step_size(double gamma, double lambda);

}  // namespace lrcycle

#endif  // LRCYCLE_SOLVER_H_
