#include "lrcycle/lift.h"

#include <cmath>
#include <string>

#include "lrcycle/errors.h"
#include "lrcycle/logistic.h"
#include "lrcycle/solver.h"

namespace lrcycle {

Examples normalize_into_ball(const Examples& x) {
  const double largest = x.rowwise().norm().maxCoeff();
  if (!(largest > 0.0)) throw std::invalid_argument("cannot normalize an all-zero dataset");
  return x / largest;
}

LiftedDataset lift(const Examples& base, Index d) {
  if (base.cols() != 2) {
    throw DimensionMismatch("lift expects a 2-dimensional base, got " +
                            std::to_string(base.cols()));
  }
  if (d < 3) throw std::invalid_argument("lift needs d >= 3, got " + std::to_string(d));
  return LiftedDataset(base, d);
}

double c_b(const Examples& base, const Vector& w_b_star) {
  if (w_b_star.size() != base.cols()) throw DimensionMismatch("c_b: w_b* dimension mismatch");
  const Vector a = base * w_b_star;
  double sum = 0.0;
  for (Index i = 0; i < base.rows(); ++i) {
    const double s2 = std::fmax(0.0, 1.0 - base.row(i).squaredNorm());
    sum += sigmoid_slope(a(i)) * s2;
  }
  return sum / static_cast<double>(base.rows());
}

Index min_dimension(double lambda_b, double c_b) {
  if (!(lambda_b > 0.0) || !(c_b >= 0.0)) {
    throw std::invalid_argument("min_dimension needs lambda_b > 0 and c_b >= 0");
  }
  const double q = c_b / lambda_b;
  const double nearest = std::round(q);
  const double need = std::fabs(q - nearest) <= 1e-12 * std::fmax(1.0, q) ? nearest : std::ceil(q);
  return std::max<Index>(3, 2 + static_cast<Index>(need));
}

Vector lifted_solution(const Vector& w_b_star, Index d) {
  if (d < 3 || d <= w_b_star.size()) throw std::invalid_argument("lifted_solution needs d >= 3");
  Vector w = Vector::Zero(d);
  w.head(w_b_star.size()) = w_b_star;
  return w;
}

double BlockResiduals::max() const {
  return std::fmax(top_left, std::fmax(bottom_right, off_diagonal));
}

BlockResiduals verify_block_hessian(const LiftedDataset& l, const Vector& w_star) {
  if (l.dim() > kMaxMaterializeDim) {
    throw DimensionTooLarge("block Hessian check materializes the Hessian; d <= " +
                            std::to_string(kMaxMaterializeDim));
  }
  const Index db = l.base_dim();
  const Index m = l.tail_dim();
  const Matrix h = hessian(w_star, l.materialize());
  const Vector wb = w_star.head(db);
  const Matrix predicted_top = hessian(wb, Dataset(l.base()));
  const double predicted_tail = c_b(l.base(), wb) / static_cast<double>(m);

  BlockResiduals r;
  r.top_left = (h.topLeftCorner(db, db) - predicted_top).cwiseAbs().maxCoeff();
  r.bottom_right =
      (h.bottomRightCorner(m, m) - predicted_tail * Matrix::Identity(m, m)).cwiseAbs().maxCoeff();
  r.off_diagonal = h.topRightCorner(db, m).cwiseAbs().maxCoeff();
  return r;
}

LiftAnalysis analyze_lift(const Examples& base, std::optional<Index> d, double newton_tol) {
  if (base.cols() != 2) throw DimensionMismatch("lift expects a 2-dimensional base");
  LiftReport report;
  Examples normalized = base;
  const double largest = base.rowwise().norm().maxCoeff();
  if (largest > 1.0) {
    normalized = normalize_into_ball(base);
    report.scale = largest;
  }

  NewtonOptions opts;
  opts.tol = newton_tol;
  const SolveReport solved = solve_newton(Dataset(normalized), opts);
  report.w_b_star = solved.w_star;
  report.lambda_b = solved.lambda_max;
  report.c_b = c_b(normalized, solved.w_star);
  report.min_dim = min_dimension(report.lambda_b, report.c_b);
  report.chosen_dim = d.value_or(report.min_dim);
  if (report.chosen_dim < report.min_dim) {
    report.warnings.push_back("d = " + std::to_string(report.chosen_dim) +
                              " is below the minimum dimension " +
                              std::to_string(report.min_dim) +
                              "; the lifted curvature is c_b/(d-2), not lambda_b");
  }

  LiftedDataset lifted = lift(normalized, report.chosen_dim);
  const Vector w_star = lifted_solution(solved.w_star, report.chosen_dim);
  report.grad_norm_at_lifted_solution = lifted_grad(w_star, lifted).norm();
  report.lambda_lifted = lambda_max(lifted, w_star);
  if (report.chosen_dim <= kMaxMaterializeDim) {
    report.block_check = verify_block_hessian(lifted, w_star);
  }
  return {std::move(report), std::move(normalized), std::move(lifted)};
}

}  // namespace lrcycle
