#include "lrcycle/model.h"

#include <cmath>
#include <string>

#include "lrcycle/errors.h"
#include "lrcycle/logistic.h"

namespace lrcycle {

namespace {

void check_dim(const Vector& w, Index expected, const char* what) {
  if (w.size() != expected) {
    throw DimensionMismatch(std::string(what) + ": vector has dimension " +
                            std::to_string(w.size()) + ", problem has " +
                            std::to_string(expected));
  }
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

Dataset::Dataset(Examples signed_examples) : x_(std::move(signed_examples)) {
  if (x_.rows() < 1 || x_.cols() < 1) {
    throw std::invalid_argument("dataset needs at least one example and one feature");
  }
  if (!x_.allFinite()) throw NonFiniteValue("dataset contains non-finite entries");
}

Dataset Dataset::from_labeled(const Examples& x, const Vector& labels) {
  if (labels.size() != x.rows()) {
    throw DimensionMismatch("label count " + std::to_string(labels.size()) +
                            " does not match example count " + std::to_string(x.rows()));
  }
  Examples folded = x;
  for (Index i = 0; i < x.rows(); ++i) {
    if (labels(i) != 1.0 && labels(i) != -1.0) {
      throw std::invalid_argument("labels must be -1 or +1, row " + std::to_string(i));
    }
    folded.row(i) *= labels(i);
  }
  return Dataset(std::move(folded));
}

LiftedDataset::LiftedDataset(Examples base, Index ambient_dim)
    : base_(std::move(base)), ambient_dim_(ambient_dim) {
  if (base_.rows() < 1 || base_.cols() < 1) {
    throw std::invalid_argument("lifted dataset needs a non-empty base");
  }
  if (!base_.allFinite()) throw NonFiniteValue("base dataset contains non-finite entries");
  if (ambient_dim_ <= base_.cols()) {
    throw std::invalid_argument("ambient dimension " + std::to_string(ambient_dim_) +
                                " must exceed the base dimension " +
                                std::to_string(base_.cols()));
  }
  s_.resize(base_.rows());
  for (Index i = 0; i < base_.rows(); ++i) {
    const double sq = base_.row(i).squaredNorm();
    if (sq > (1.0 + 1e-12) * (1.0 + 1e-12)) {
      throw std::invalid_argument("base row " + std::to_string(i) + " has norm " +
                                  std::to_string(std::sqrt(sq)) + " > 1");
    }
    s_(i) = std::sqrt(std::fmax(0.0, 1.0 - sq));
  }
}

Dataset LiftedDataset::materialize(Index max_dim) const {
  if (ambient_dim_ > max_dim) {
    throw DimensionTooLarge("refusing to materialize a lifted dataset of dimension " +
                            std::to_string(ambient_dim_));
  }
  const Index m = tail_dim();
  const Index db = base_dim();
  Examples x = Examples::Zero(size(), ambient_dim_);
  Index row = 0;
  for (Index i = 0; i < base_size(); ++i) {
    for (double sign : {1.0, -1.0}) {
      for (Index j = 0; j < m; ++j) {
        x.row(row).head(db) = base_.row(i);
        x(row, db + j) = sign * s_(i);
        ++row;
      }
    }
  }
  return Dataset(std::move(x));
}

Index dim(const Problem& p) {
  return std::visit([](const auto& d) { return d.dim(); }, p);
}

double loss(const Vector& w, const Dataset& d) {
  check_dim(w, d.dim(), "loss");
  const Vector z = d.examples() * w;
  double sum = 0.0;
  for (Index i = 0; i < z.size(); ++i) sum += softplus(-z(i));
  return sum / static_cast<double>(d.size());
}

Vector grad(const Vector& w, const Dataset& d) {
  check_dim(w, d.dim(), "grad");
  Vector p = d.examples() * w;
  for (Index i = 0; i < p.size(); ++i) p(i) = sigmoid(-p(i));
  return -(d.examples().transpose() * p) / static_cast<double>(d.size());
}

Matrix hessian(const Vector& w, const Dataset& d) {
  check_dim(w, d.dim(), "hessian");
  const Vector z = d.examples() * w;
  Matrix scaled = d.examples();
  for (Index i = 0; i < z.size(); ++i) scaled.row(i) *= std::sqrt(sigmoid_slope(z(i)));
  Matrix h = scaled.transpose() * scaled / static_cast<double>(d.size());
  return 0.5 * (h + h.transpose());
}

Vector hvp(const Vector& w, const Vector& v, const Dataset& d) {
  check_dim(w, d.dim(), "hvp");
  check_dim(v, d.dim(), "hvp direction");
  const Vector z = d.examples() * w;
  Vector t = d.examples() * v;
  for (Index i = 0; i < t.size(); ++i) t(i) *= sigmoid_slope(z(i));
  return d.examples().transpose() * t / static_cast<double>(d.size());
}

double smoothness(const Dataset& d) {
  const auto& x = d.examples();
  const Matrix gram = d.dim() <= d.size() ? Matrix(x.transpose() * x) : Matrix(x * x.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff() / (4.0 * static_cast<double>(d.size()));
}

double loss(const Vector& w, const LiftedDataset& l) {
  check_dim(w, l.dim(), "loss");
  const Index db = l.base_dim();
  const Index m = l.tail_dim();
  const Vector a = l.base() * w.head(db);
  const auto tail = w.tail(m);
  double sum = 0.0;
  for (Index i = 0; i < l.base_size(); ++i) {
    const double s = l.padding()(i);
    for (Index j = 0; j < m; ++j) {
      sum += softplus(-(a(i) + s * tail(j))) + softplus(-(a(i) - s * tail(j)));
    }
  }
  return sum / static_cast<double>(l.size());
}

Vector lifted_grad(const Vector& w, const LiftedDataset& l) {
  check_dim(w, l.dim(), "lifted_grad");
  const Index db = l.base_dim();
  const Index m = l.tail_dim();
  const Vector a = l.base() * w.head(db);
  const auto tail = w.tail(m);
  Vector coeff(l.base_size());
  Vector g = Vector::Zero(l.dim());
  auto g_tail = g.tail(m);
  for (Index i = 0; i < l.base_size(); ++i) {
    const double s = l.padding()(i);
    double c = 0.0;
    for (Index j = 0; j < m; ++j) {
      const double pp = sigmoid(-(a(i) + s * tail(j)));
      const double pm = sigmoid(-(a(i) - s * tail(j)));
      c += pp + pm;
      g_tail(j) -= s * (pp - pm);
    }
    coeff(i) = c;
  }
  g.head(db) = -(l.base().transpose() * coeff);
  return g / static_cast<double>(l.size());
}

Vector hvp(const Vector& w, const Vector& v, const LiftedDataset& l) {
  check_dim(w, l.dim(), "hvp");
  check_dim(v, l.dim(), "hvp direction");
  return HessianOperator(Problem(std::in_place_type<LiftedDataset>, l), w).apply(v);
}

Matrix hessian(const Vector& w, const LiftedDataset& l) {
  check_dim(w, l.dim(), "hessian");
  if (l.dim() > kMaxMaterializeDim) {
    throw DimensionTooLarge("lifted Hessian is only materialized up to dimension " +
                            std::to_string(kMaxMaterializeDim));
  }
  const Problem p(std::in_place_type<LiftedDataset>, l);
  const HessianOperator op(p, w);
  Matrix h(l.dim(), l.dim());
  for (Index k = 0; k < l.dim(); ++k) h.col(k) = op.apply(Vector::Unit(l.dim(), k));
  return 0.5 * (h + h.transpose());
}

double loss(const Vector& w, const Problem& p) {
  return std::visit([&](const auto& d) { return loss(w, d); }, p);
}

Vector grad(const Vector& w, const Problem& p) {
  return std::visit([&](const auto& d) { return grad(w, d); }, p);
}

Vector hvp(const Vector& w, const Vector& v, const Problem& p) {
  return std::visit([&](const auto& d) { return hvp(w, v, d); }, p);
}

Matrix hessian(const Vector& w, const Problem& p) {
  return std::visit([&](const auto& d) { return hessian(w, d); }, p);
}

HessianOperator::HessianOperator(const Problem& p, const Vector& w)
    : problem_(&p), dim_(lrcycle::dim(p)) {
  check_dim(w, dim_, "HessianOperator");
  std::visit(Overloaded{
                 [&](const Dataset& d) {
                   weights_ = d.examples() * w;
                   for (Index i = 0; i < weights_.size(); ++i) {
                     weights_(i) = sigmoid_slope(weights_(i));
                   }
                 },
                 [&](const LiftedDataset& l) {
                   const Index m = l.tail_dim();
                   const Vector a = l.base() * w.head(l.base_dim());
                   weights_.resize(2 * m * l.base_size());
                   for (Index i = 0; i < l.base_size(); ++i) {
                     const double s = l.padding()(i);
                     for (Index j = 0; j < m; ++j) {
                       const double t = s * w(l.base_dim() + j);
                       weights_(2 * (i * m + j)) = sigmoid_slope(a(i) + t);
                       weights_(2 * (i * m + j) + 1) = sigmoid_slope(a(i) - t);
                     }
                   }
                 },
             },
             *problem_);
}

Vector HessianOperator::apply(const Vector& v) const {
  check_dim(v, dim_, "HessianOperator::apply");
  return std::visit(
      Overloaded{
          [&](const Dataset& d) -> Vector {
            Vector t = d.examples() * v;
            t.array() *= weights_.array();
            return d.examples().transpose() * t / static_cast<double>(d.size());
          },
          [&](const LiftedDataset& l) -> Vector {
            const Index db = l.base_dim();
            const Index m = l.tail_dim();
            const Vector b = l.base() * v.head(db);
            const auto v_tail = v.tail(m);
            Vector out = Vector::Zero(dim_);
            auto out_tail = out.tail(m);
            Vector coeff(l.base_size());
            for (Index i = 0; i < l.base_size(); ++i) {
              const double s = l.padding()(i);
              double c = 0.0;
              for (Index j = 0; j < m; ++j) {
                const double hp = weights_(2 * (i * m + j));
                const double hm = weights_(2 * (i * m + j) + 1);
                const double tp = hp * (b(i) + s * v_tail(j));
                const double tm = hm * (b(i) - s * v_tail(j));
                c += tp + tm;
                out_tail(j) += s * (tp - tm);
              }
              coeff(i) = c;
            }
            out.head(db) = l.base().transpose() * coeff;
            return out / static_cast<double>(l.size());
          },
      },
      *problem_);
}

}  // namespace lrcycle
