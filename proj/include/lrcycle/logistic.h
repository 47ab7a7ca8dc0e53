#ifndef LRCYCLE_LOGISTIC_H_
#define LRCYCLE_LOGISTIC_H_

#include <cmath>

namespace lrcycle {

// Scalar pieces of the logistic loss. All are branch-stable for |z| in the
// hundreds, which GD trajectories routinely visit.

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^z) = max(z, 0) + log1p(e^-|z|)
inline double softplus(double z) {
  return std::fmax(z, 0.0) + std::log1p(std::exp(-std::fabs(z)));
}

// sigma'(z) = sigma(z) sigma(-z); also the second derivative of softplus.
inline double sigmoid_slope(double z) {
  const double e = std::exp(-std::fabs(z));
  const double d = 1.0 + e;
  return e / (d * d);
}

// sigma(a) - sigma(b) without cancellation:
//   sinh((a-b)/2) / (2 cosh(a/2) cosh(b/2)).
inline double sigmoid_difference(double a, double b) {
  if (std::fabs(a) > 600.0 || std::fabs(b) > 600.0) return sigmoid(a) - sigmoid(b);
  return std::sinh(0.5 * (a - b)) / (2.0 * std::cosh(0.5 * a) * std::cosh(0.5 * b));
}

inline double logit(double p) { return std::log(p) - std::log1p(-p); }

}  // namespace lrcycle

#endif  // LRCYCLE_LOGISTIC_H_
