#ifndef LRCYCLE_LIFT_H_
#define LRCYCLE_LIFT_H_

#include <optional>
#include <string>
#include <vector>

#include "lrcycle/model.h"

namespace lrcycle {

// Divides every row by the largest row norm. Throws for an all-zero input.
Examples normalize_into_ball(const Examples& x);

// Pads a 2D base (row norms <= 1) onto the unit sphere in R^d, d >= 3.
LiftedDataset lift(const Examples& base, Index d);

// c_b = (1/n_b) sum sigma'(x_i . w_b*) s_i^2, independent of d.
double c_b(const Examples& base, const Vector& w_b_star);

// Smallest d >= 3 with lambda_b >= c_b / (d - 2). Ratios within 1e-12 of an
// integer are treated as that integer.
Index min_dimension(double lambda_b, double c_b);

// (w_b*, 0_{d-2})
Vector lifted_solution(const Vector& w_b_star, Index d);

struct BlockResiduals {
  double top_left = 0.0;      // vs. base Hessian at w_b*
  double bottom_right = 0.0;  // vs. c_b / (d - 2) I
  double off_diagonal = 0.0;  // vs. 0
  double max() const;
};

// Materializes the lifted Hessian at w_star (d <= 64) and compares its blocks
// to the predicted ones. Throws DimensionTooLarge above 64.
BlockResiduals verify_block_hessian(const LiftedDataset& l, const Vector& w_star);

struct LiftReport {
  double scale = 1.0;  // base rows were divided by this
  Vector w_b_star;
  double lambda_b = 0.0;
  double c_b = 0.0;
  Index min_dim = 3;
  Index chosen_dim = 3;
  double grad_norm_at_lifted_solution = 0.0;
  double lambda_lifted = 0.0;
  std::optional<BlockResiduals> block_check;
  std::vector<std::string> warnings;
};

struct LiftAnalysis {
  LiftReport report;
  Examples base;  // normalized base actually lifted
  LiftedDataset lifted;
};

// Normalizes the base into the ball if needed, solves it, and builds the
// lifted problem at d (min_dimension when d is nullopt).
LiftAnalysis analyze_lift(const Examples& base, std::optional<Index> d, double newton_tol = 1e-12);

}  // namespace lrcycle

#endif  // LRCYCLE_LIFT_H_
