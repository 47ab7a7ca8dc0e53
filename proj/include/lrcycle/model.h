#ifndef LRCYCLE_MODEL_H_
#define LRCYCLE_MODEL_H_

#include <Eigen/Dense>
#include <variant>

namespace lrcycle {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Examples = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Lifted datasets are only materialized up to this ambient dimension outside
// of tests.
inline constexpr Index kMaxMaterializeDim = 64;

// n x d examples with labels folded into signs: row i stores y_i x_i, so the
// objective is (1/n) sum log(1 + exp(-w.x_i)) throughout. Immutable.
class Dataset {
 public:
  explicit Dataset(Examples signed_examples);

  // Folds labels in {-1, +1} into the rows.
  static Dataset from_labeled(const Examples& x, const Vector& labels);

  Index size() const { return x_.rows(); }
  Index dim() const { return x_.cols(); }
  const Examples& examples() const { return x_; }

 private:
  Examples x_;
};

// Implicit sphere-lifted dataset. Each base row x_i (norm <= 1) stands for
// the 2m examples (x_i, +s_i e_j) and (x_i, -s_i e_j), j = 1..m, where
// m = ambient_dim - base_dim and s_i = sqrt(1 - |x_i|^2). Every implicit
// example has unit norm. Storage is O(n_b * d_b).
class LiftedDataset {
 public:
  LiftedDataset(Examples base, Index ambient_dim);

  const Examples& base() const { return base_; }
  const Vector& padding() const { return s_; }
  Index ambient_dim() const { return ambient_dim_; }
  Index dim() const { return ambient_dim_; }
  Index base_dim() const { return base_.cols(); }
  Index tail_dim() const { return ambient_dim_ - base_.cols(); }
  Index base_size() const { return base_.rows(); }
  // Number of implicit examples, 2 (d - d_b) n_b.
  Index size() const { return 2 * tail_dim() * base_size(); }

  // Explicit rows in the order: for each i, (x_i, s_i e_1..e_m) then
  // (x_i, -s_i e_1..e_m). Throws DimensionTooLarge above max_dim.
  Dataset materialize(Index max_dim = kMaxMaterializeDim) const;

 private:
  Examples base_;
  Vector s_;
  Index ambient_dim_;
};

using Problem = std::variant<Dataset, LiftedDataset>;

Index dim(const Problem& p);

double loss(const Vector& w, const Dataset& d);
Vector grad(const Vector& w, const Dataset& d);
Matrix hessian(const Vector& w, const Dataset& d);
Vector hvp(const Vector& w, const Vector& v, const Dataset& d);
// lambda_max(X^T X) / (4n): global bound on the Hessian spectrum.
double smoothness(const Dataset& d);

double loss(const Vector& w, const LiftedDataset& l);
// Structured gradient, O(n_b d). Equals grad(w, l.materialize()).
Vector lifted_grad(const Vector& w, const LiftedDataset& l);
inline Vector grad(const Vector& w, const LiftedDataset& l) { return lifted_grad(w, l); }
Vector hvp(const Vector& w, const Vector& v, const LiftedDataset& l);
// Dense Hessian assembled from hvp columns; d <= kMaxMaterializeDim.
Matrix hessian(const Vector& w, const LiftedDataset& l);

double loss(const Vector& w, const Problem& p);
Vector grad(const Vector& w, const Problem& p);
Vector hvp(const Vector& w, const Vector& v, const Problem& p);
Matrix hessian(const Vector& w, const Problem& p);

// Hessian at a fixed point as a reusable linear operator: the per-example
// curvatures are computed once, each apply() is O(n d).
class HessianOperator {
 public:
  HessianOperator(const Problem& p, const Vector& w);
  Vector apply(const Vector& v) const;
  Index dim() const { return dim_; }

 private:
  const Problem* problem_;
  Index dim_;
  Vector weights_;  // Dataset: n curvatures; lifted: n_b x m x 2, row-major
};

}  // namespace lrcycle

#endif  // LRCYCLE_MODEL_H_
