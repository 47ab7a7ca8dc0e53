#ifndef LRCYCLE_ONEDIM_H_
#define LRCYCLE_ONEDIM_H_

#include <string>
#include <utility>
#include <vector>

namespace lrcycle::onedim {

// One-dimensional data on the unit sphere: m copies of x = +1 and n copies of
// x = -1 (labels folded), summarized by c = m / n >= 1. Then
//   L'(w) = sigma(w) - c/(c+1),  w* = ln c,  lambda = sigma'(w*) = c/(c+1)^2.
class Problem {
 public:
  explicit Problem(double c);

  double c() const { return c_; }
  double w_star() const { return w_star_; }
  double lambda() const { return lambda_; }
  // sigma(w*) = c / (c + 1)
  double target() const { return target_; }

 private:
  double c_;
  double w_star_;
  double lambda_;
  double target_;
};

double grad_1d(double w, const Problem& p);

// GD map with eta = gamma / lambda: T(w) = w - eta (sigma(w) - sigma(w*)).
double map_T(double w, const Problem& p, double gamma);
// T'(w) = 1 - gamma sigma'(w) / sigma'(w*)
double map_slope(double w, const Problem& p, double gamma);

// Mean of sigma' over (w, w*): (sigma(w) - sigma(w*)) / (w - w*), extended
// continuously by sigma'(w*) at w = w*.
double avg_slope_R(double w, const Problem& p);

// Critical points of T: sigma'(w_r) = lambda / gamma, w_l = -w_r. Throws
// NoStationaryPoints when lambda / gamma > 1/4.
std::pair<double, double> stationary_points(const Problem& p, double gamma);

// The unique w~ > w* with T(w~) = w*, by bisection. Requires 1 < gamma < 2.
double crossing_point(const Problem& p, double gamma);

// 1 - gamma (2 - gamma) R(w)^2 / sigma'(w*)^2, for w > w*.
double two_step_bound(double w, const Problem& p, double gamma);

// Per-two-step contraction factor inside (w*, w~): 1 - (2 - gamma) / gamma.
double rate_estimate(double gamma);

struct LemmaGrid {
  int points = 10000;
  // Starting points are w* + span * k / points, k = 1..points.
  double span = 20.0;
  double slack = 1e-12;
};

struct LemmaReport {
  long checked = 0;
  long crossings = 0;  // starting points with T(w) < w*
  double worst_one_step_ratio = 0.0;   // max |T(w) - w*| / |w - w*|
  double worst_ratio = 0.0;            // max two-step ratio over crossings
  double worst_bound_margin = 0.0;     // min (bound - ratio) over crossings
};

// Checks, for every grid point w > w*:
//   one-step contraction |T(w) - w*| < |w - w*|;
//   double crossing: T(w) < w*  =>  T(T(w)) > w*;
//   two-step bound: (T^2(w) - w*) / (w - w*) <= two_step_bound(w).
// Throws LemmaViolation at the first failure.
LemmaReport verify_lemmas(const Problem& p, double gamma, const LemmaGrid& grid = {});

enum class SegmentKind { kVertical, kDiagonal };

// One cobweb segment. kVertical: (w_from, w_from) -> (w_from, w_to) with
// w_to = T(w_from). kDiagonal: (w_from, w_to) -> (w_to, w_to).
struct CobwebSegment {
  double w_from;
  double w_to;
  SegmentKind kind;
};

std::vector<CobwebSegment> cobweb(double w0, int steps, const Problem& p, double gamma);

std::string to_string(SegmentKind kind);

}  // namespace lrcycle::onedim

#endif  // LRCYCLE_ONEDIM_H_
