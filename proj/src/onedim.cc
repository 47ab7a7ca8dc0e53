#include "lrcycle/onedim.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lrcycle/errors.h"
#include "lrcycle/logistic.h"

namespace lrcycle::onedim {

namespace {

void require_oscillatory_gamma(double gamma, const char* what) {
  if (!(gamma > 1.0 && gamma < 2.0)) {
    throw std::invalid_argument(std::string(what) + " requires 1 < gamma < 2, got " +
                                std::to_string(gamma));
  }
}

// sigma(w* + delta) - sigma(w*), accurate relative to delta.
double sigma_increment(double delta, const Problem& p) {
  const double a = p.w_star() + delta;
  if (std::fabs(a) > 600.0) return sigmoid(a) - p.target();
  return std::sinh(0.5 * delta) / (2.0 * std::cosh(0.5 * a) * std::cosh(0.5 * p.w_star()));
}

// The GD map in deviation coordinates delta = w - w*.
double step_deviation(double delta, const Problem& p, double eta) {
  return delta - eta * sigma_increment(delta, p);
}

}  // namespace

Problem::Problem(double c) : c_(c) {
  if (!(c >= 1.0) || !std::isfinite(c)) {
    throw std::invalid_argument("1D problem needs c >= 1, got " + std::to_string(c));
  }
  w_star_ = std::log(c);
  target_ = c / (c + 1.0);
  lambda_ = c / ((c + 1.0) * (c + 1.0));
}

double grad_1d(double w, const Problem& p) { return sigmoid(w) - p.target(); }

double map_T(double w, const Problem& p, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  return w - (gamma / p.lambda()) * sigmoid_difference(w, p.w_star());
}

double map_slope(double w, const Problem& p, double gamma) {
  return 1.0 - gamma * sigmoid_slope(w) / p.lambda();
}

double avg_slope_R(double w, const Problem& p) {
  const double delta = w - p.w_star();
  if (delta == 0.0) return p.lambda();
  return sigma_increment(delta, p) / delta;
}

std::pair<double, double> stationary_points(const Problem& p, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  const double q = 4.0 * p.lambda() / gamma;  // 4 sigma'(w_r)
  if (q > 1.0) {
    throw NoStationaryPoints("sigma'(w*)/gamma = " + std::to_string(p.lambda() / gamma) +
                             " exceeds 1/4; T is monotone");
  }
  // sigma(w_r) = (1 + r)/2 with r = sqrt(1 - q), and 1 - sigma(w_r) = q / (2(1 + r)).
  const double r = std::sqrt(1.0 - q);
  const double w_r = 2.0 * std::log1p(r) - std::log(q);
  return {-w_r, w_r};
}

double crossing_point(const Problem& p, double gamma) {
  require_oscillatory_gamma(gamma, "crossing_point");
  const double eta = gamma / p.lambda();
  // f(delta) < 0 near 0 (eta R -> gamma > 1) and > 0 far right (eta R -> 0).
  auto f = [&](double delta) { return step_deviation(delta, p, eta); };
  double lo = 0.0;
  double hi = 1.0;
  while (f(hi) <= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e8) throw BracketFailure("no sign change found for the crossing point");
  }
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) <= 0.0 ? lo : hi) = mid;
  }
  const double w_tilde = p.w_star() + 0.5 * (lo + hi);
  const double check = eta * avg_slope_R(w_tilde, p);
  if (std::fabs(check - 1.0) > 1e-10) {
    throw InvariantViolation("crossing point identity eta R(w~) = 1 off by " +
                             std::to_string(check - 1.0));
  }
  return w_tilde;
}

double two_step_bound(double w, const Problem& p, double gamma) {
  if (!(w > p.w_star())) throw std::invalid_argument("two_step_bound requires w > w*");
  require_oscillatory_gamma(gamma, "two_step_bound");
  const double ratio = avg_slope_R(w, p) / p.lambda();
  return 1.0 - gamma * (2.0 - gamma) * ratio * ratio;
}

double rate_estimate(double gamma) {
  require_oscillatory_gamma(gamma, "rate_estimate");
  return 1.0 - (2.0 - gamma) / gamma;
}

LemmaReport verify_lemmas(const Problem& p, double gamma, const LemmaGrid& grid) {
  require_oscillatory_gamma(gamma, "verify_lemmas");
  if (grid.points < 1 || !(grid.span > 0.0)) {
    throw std::invalid_argument("lemma grid needs points >= 1 and span > 0");
  }
  const double eta = gamma / p.lambda();
  LemmaReport report;
  report.worst_bound_margin = INFINITY;
  report.worst_ratio = -INFINITY;
  for (int k = 1; k <= grid.points; ++k) {
    const double d0 = grid.span * static_cast<double>(k) / grid.points;
    const double w = p.w_star() + d0;
    const double d1 = step_deviation(d0, p, eta);
    const double one_step = std::fabs(d1) / d0;
    ++report.checked;
    report.worst_one_step_ratio = std::fmax(report.worst_one_step_ratio, one_step);
    if (one_step >= 1.0 + grid.slack) {
      throw LemmaViolation("one-step contraction fails: |T(w)-w*|/|w-w*| = " +
                               std::to_string(one_step),
                           w);
    }
    if (d1 >= 0.0) continue;
    ++report.crossings;
    const double d2 = step_deviation(d1, p, eta);
    const double ratio = d2 / d0;
    if (ratio <= -grid.slack) {
      throw LemmaViolation("double crossing fails: T^2(w) - w* = " + std::to_string(d2), w);
    }
    const double bound = two_step_bound(w, p, gamma);
    if (ratio > bound + grid.slack) {
      throw LemmaViolation("two-step bound fails: ratio " + std::to_string(ratio) +
                               " > bound " + std::to_string(bound),
                           w);
    }
    report.worst_ratio = std::fmax(report.worst_ratio, ratio);
    report.worst_bound_margin = std::fmin(report.worst_bound_margin, bound - ratio);
  }
  if (report.crossings == 0) {
    report.worst_ratio = 0.0;
    report.worst_bound_margin = 0.0;
  }
  return report;
}

std::vector<CobwebSegment> cobweb(double w0, int steps, const Problem& p, double gamma) {
  if (steps < 1) throw std::invalid_argument("cobweb needs steps >= 1");
  std::vector<CobwebSegment> out;
  out.reserve(2 * static_cast<std::size_t>(steps));
  double w = w0;
  for (int t = 0; t < steps; ++t) {
    const double next = map_T(w, p, gamma);
    out.push_back({w, next, SegmentKind::kVertical});
    out.push_back({w, next, SegmentKind::kDiagonal});
    w = next;
  }
  return out;
}

std::string to_string(SegmentKind kind) {
  return kind == SegmentKind::kVertical ? "vertical" : "diagonal";
}

}  // namespace lrcycle::onedim
