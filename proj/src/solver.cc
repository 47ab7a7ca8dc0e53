#include "lrcycle/solver.h"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "lrcycle/errors.h"

namespace lrcycle {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::string format_vector(const Vector& v) {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v(i);
  os << "]";
  return os.str();
}

Vector newton_direction(const Matrix& h, const Vector& g) {
  Eigen::LDLT<Matrix> ldlt(h);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
    Vector p = ldlt.solve(-g);
    if (p.allFinite() && (h * p + g).norm() <= 1e-8 * (g.norm() + kEps)) return p;
  }
  // Rank-deficient data: minimum-norm step keeps iterates in the row space.
  return h.completeOrthogonalDecomposition().solve(-g);
}

Vector random_unit(Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = normal(rng);
  return v / v.norm();
}

double power_iteration(const LinearOperator& op, Index dim, const EigenOptions& opts) {
  Vector v = random_unit(dim, opts.seed);
  double rho = 0.0;
  for (int it = 0; it < opts.max_iters; ++it) {
    Vector hv = op(v);
    const double next = v.dot(hv);
    const double norm = hv.norm();
    if (norm == 0.0) return 0.0;
    if (it > 0 && std::fabs(next - rho) <= opts.tol * std::fmax(1.0, std::fabs(next))) {
      return next;
    }
    rho = next;
    v = hv / norm;
  }
  throw NoConvergence("power iteration did not converge in " + std::to_string(opts.max_iters) +
                      " iterations");
}

// Lanczos with full reorthogonalization. Stops when the Ritz residual of the
// top pair drops below tol * |theta| or the Krylov space becomes invariant.
double lanczos(const LinearOperator& op, Index dim, const EigenOptions& opts) {
  const Index max_steps = std::min<Index>(dim, opts.max_iters);
  Matrix q(dim, max_steps + 1);
  q.col(0) = random_unit(dim, opts.seed);
  std::vector<double> alpha, beta;
  double theta = 0.0;
  for (Index j = 0; j < max_steps; ++j) {
    Vector z = op(q.col(j));
    const double a = q.col(j).dot(z);
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass) {
      const Vector c = q.leftCols(j + 1).transpose() * z;
      z -= q.leftCols(j + 1) * c;
    }
    const double b = z.norm();
    beta.push_back(b);

    const Index k = j + 1;
    const bool check = k <= 64 || k % 8 == 0 || k == max_steps;
    if (!check) {
      q.col(k) = z / b;
      continue;
    }
    Matrix t = Matrix::Zero(k, k);
    for (Index i = 0; i < k; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(t);
    theta = es.eigenvalues()(k - 1);
    const double residual = b * std::fabs(es.eigenvectors()(k - 1, k - 1));
    const double scale = std::fmax(std::fabs(theta), std::numeric_limits<double>::min());
    if (residual <= opts.tol * scale || b <= 1e-14 * scale || k == dim) return theta;
    q.col(k) = z / b;
  }
  if (max_steps == dim) return theta;
  throw NoConvergence("Lanczos did not converge in " + std::to_string(max_steps) + " steps");
}

}  // namespace

std::optional<Vector> separating_direction(const Dataset& d) {
  const Index dim = d.dim();
  if (dim > 3) throw DimensionTooLarge("exact separability check supports d <= 3");
  const auto& x = d.examples();

  // Work inside the row space; the cone {w : Xw >= 0} restricted to it is
  // pointed, so if it is nontrivial it has an extreme ray with r-1
  // independent active rows.
  Eigen::JacobiSVD<Matrix> svd(Matrix(x), Eigen::ComputeFullV);
  const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  Index rank = 0;
  for (Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > 1e-12 * std::fmax(smax, 1e-300)) ++rank;
  }
  if (rank == 0) return std::nullopt;
  const Matrix basis = svd.matrixV().leftCols(rank);  // dim x r
  const Matrix y = Matrix(x) * basis;                  // n x r

  auto try_candidate = [&](const Vector& c) -> std::optional<Vector> {
    if (c.norm() == 0.0) return std::nullopt;
    const Vector u = c / c.norm();
    const Vector w = basis * u;
    const Vector m = Matrix(x) * w;
    double best = 0.0;
    for (Index i = 0; i < m.size(); ++i) {
      const double scale = 1e-12 * x.row(i).norm();
      if (m(i) < -scale) return std::nullopt;
      best = std::fmax(best, m(i) - scale);
    }
    if (best <= 0.0) return std::nullopt;
    return w;
  };

  const Index n = y.rows();
  std::vector<Vector> candidates;
  if (rank == 1) {
    candidates.push_back(Vector::Ones(1));
  } else if (rank == 2) {
    for (Index i = 0; i < n; ++i) candidates.push_back(Eigen::Vector2d(-y(i, 1), y(i, 0)));
  } else {
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        const Eigen::Vector3d a = y.row(i).transpose();
        const Eigen::Vector3d b = y.row(j).transpose();
        candidates.push_back(a.cross(b));
      }
    }
  }
  for (const Vector& c : candidates) {
    if (auto w = try_candidate(c)) return w;
    if (auto w = try_candidate(-c)) return w;
  }
  return std::nullopt;
}

SolveReport solve_newton(const Dataset& d, const NewtonOptions& opts) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("Newton tolerance must be positive");

  const bool exact = opts.exact_separability_check &&
                     (d.dim() <= 2 || (d.dim() == 3 && d.size() <= 200));
  if (exact) {
    if (auto w = separating_direction(d)) {
      throw SeparableData("dataset is linearly separable",
                          "separating direction w = " + format_vector(*w) +
                              " satisfies x_i . w >= 0 for every example");
    }
  }

  SolveReport report;
  Vector w = Vector::Zero(d.dim());
  double f = loss(w, d);
  Vector g = grad(w, d);
  for (int it = 0;; ++it) {
    if (!g.allFinite() || !std::isfinite(f)) {
      throw NonFiniteValue("non-finite value in Newton iteration", it);
    }
    const double gn = g.norm();
    report.residuals.push_back(gn);
    if (gn <= opts.tol) {
      report.newton_iters = it;
      report.grad_norm = gn;
      break;
    }
    if (w.norm() > opts.divergence_bound) {
      throw SeparableData("Newton iterates diverged",
                          "divergence: ||w|| = " + std::to_string(w.norm()) + " exceeded " +
                              std::to_string(opts.divergence_bound) +
                              " with ||grad|| = " + std::to_string(gn));
    }
    if (it >= opts.max_iters) {
      throw NoConvergence("Newton did not reach ||grad|| <= " + std::to_string(opts.tol) +
                          " in " + std::to_string(opts.max_iters) + " iterations (||grad|| = " +
                          std::to_string(gn) + ")");
    }

    const Vector p = newton_direction(hessian(w, d), g);
    const double slope = g.dot(p);
    // Rounding slack lets the full step through once f has flattened to
    // machine precision near the optimum.
    const double slack = 8.0 * kEps * std::fabs(f);
    double t = 1.0;
    Vector trial = w + p;
    double ft = loss(trial, d);
    while (ft > f + opts.armijo_slope * t * slope + slack && t > 1e-20) {
      t *= opts.backtrack;
      trial = w + t * p;
      ft = loss(trial, d);
    }
    Vector gt = grad(trial, d);
    if (t <= 1e-20 && gt.norm() >= gn) {
      throw NoConvergence("line search failed at ||grad|| = " + std::to_string(gn));
    }
    w = std::move(trial);
    f = ft;
    g = std::move(gt);
  }
  // A stationary point with every margin positive is a separating direction.
  const Vector margins = d.examples() * w;
  if (margins.minCoeff() > 0.0) {
    throw SeparableData("dataset is linearly separable",
                        "separating direction w = " + format_vector(w) +
                            " satisfies x_i . w > 0 for every example");
  }
  report.w_star = w;
  EigenOptions eo;
  eo.tol = opts.eigen_tol;
  report.lambda_max = lambda_max(d, w, eo);
  return report;
}

double top_eigenvalue(const LinearOperator& op, Index dim, const EigenOptions& opts) {
  if (dim < 1) throw std::invalid_argument("operator dimension must be positive");
  return opts.method == EigenMethod::kPower ? power_iteration(op, dim, opts)
                                            : lanczos(op, dim, opts);
}

double lambda_max(const Problem& p, const Vector& w_star, const EigenOptions& opts) {
  const HessianOperator h(p, w_star);
  return top_eigenvalue([&](const Vector& v) { return h.apply(v); }, h.dim(), opts);
}

double lambda_max(const Dataset& d, const Vector& w_star, const EigenOptions& opts) {
  return lambda_max(Problem(std::in_place_type<Dataset>, d), w_star, opts);
}

double lambda_max(const LiftedDataset& l, const Vector& w_star, const EigenOptions& opts) {
  return lambda_max(Problem(std::in_place_type<LiftedDataset>, l), w_star, opts);
}

double step_size(double gamma, double lambda) {
  if (!(gamma > 0.0) || !(lambda > 0.0)) {
    throw std::invalid_argument("step size needs gamma > 0 and lambda > 0");
  }
  return gamma / lambda;
}

}  // namespace lrcycle
