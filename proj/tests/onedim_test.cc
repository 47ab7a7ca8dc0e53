#include "lrcycle/onedim.h"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "lrcycle/errors.h"
#include "lrcycle/logistic.h"
#include "lrcycle/model.h"
#include "lrcycle/solver.h"

namespace lrcycle::onedim {
namespace {

constexpr double kCs[] = {1.0, 1.5, 2.0, 3.0, 10.0, 100.0};

// Bisection for the root of f on [lo, hi], f(lo) and f(hi) of opposite sign.
template <typename F>
double Bisect(const F& f, double lo, double hi) {
  const bool lo_negative = f(lo) < 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((f(mid) < 0.0) == lo_negative ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TEST(ProblemTest, ClosedForms) {
  const Problem p(3.0);
  EXPECT_NEAR(p.w_star(), std::log(3.0), 1e-15);
  EXPECT_NEAR(p.lambda(), 0.1875, 1e-15);
  EXPECT_NEAR(p.target(), 0.75, 1e-15);
  EXPECT_EQ(Problem(1.0).w_star(), 0.0);
  EXPECT_THROW(Problem(0.5), std::invalid_argument);
}

TEST(MapTest, FixedPointAtLogC) {
  for (double c : kCs) {
    const Problem p(c);
    for (double gamma : {0.5, 1.5, 1.99}) EXPECT_NEAR(map_T(p.w_star(), p, gamma), std::log(c), 1e-14);
  }
}

TEST(MapTest, MatchesGradientStepOnExplicitDataset) {
  Examples x(4, 1);
  x << 1, 1, 1, -1;
  const Dataset d(x);
  const Problem p(3.0);
  const double eta = 1.8 / p.lambda();
  for (double w : {-20.0, -1.0, 0.3, 1.0986, 4.0, 30.0}) {
    const double step = w - eta * grad(Vector::Constant(1, w), d)(0);
    EXPECT_NEAR(map_T(w, p, 1.8), step, 1e-12 * (1.0 + std::fabs(w)));
    EXPECT_NEAR(grad_1d(w, p), grad(Vector::Constant(1, w), d)(0), 1e-15);
  }
}

TEST(MapTest, SlopeMatchesFiniteDifferences) {
  for (double c : kCs) {
    const Problem p(c);
    for (double w = -10.0; w <= 10.0; w += 0.37) {
      const double h = 1e-5;
      const double fd = (map_T(w + h, p, 1.7) - map_T(w - h, p, 1.7)) / (2 * h);
      EXPECT_NEAR(map_slope(w, p, 1.7), fd, 1e-8 * (1.0 + std::fabs(fd)));
    }
  }
}

TEST(MapTest, SlopeNegativeExactlyBetweenStationaryPoints) {
  for (double c : kCs) {
    const Problem p(c);
    for (double gamma : {1.1, 1.5, 1.9}) {
      const auto [left, right] = stationary_points(p, gamma);
      for (double w = -15.0; w <= 15.0; w += 0.01) {
        if (std::fabs(w - left) < 1e-9 || std::fabs(w - right) < 1e-9) continue;
        EXPECT_EQ(map_slope(w, p, gamma) < 0.0, w > left && w < right) << "w = " << w;
      }
    }
  }
}

TEST(StationaryPointsTest, MatchBisectionOracle) {
  for (double c : kCs) {
    const Problem p(c);
    for (double gamma : {1.05, 1.5, 1.99, 3.0}) {
      const auto [left, right] = stationary_points(p, gamma);
      const double level = p.lambda() / gamma;
      const double oracle = Bisect([&](double w) { return sigmoid_slope(w) - level; }, 0.0, 60.0);
      EXPECT_NEAR(right, oracle, 1e-10);
      EXPECT_NEAR(left, -oracle, 1e-10);
    }
  }
  EXPECT_THROW(stationary_points(Problem(1.0), 0.9), NoStationaryPoints);
}

TEST(AvgSlopeTest, MatchesQuadrature) {
  for (double c : kCs) {
    const Problem p(c);
    EXPECT_NEAR(avg_slope_R(p.w_star(), p), p.lambda(), 1e-15);
    for (double w : {-7.0, -0.5, p.w_star() + 1e-9, p.w_star() + 0.3, 4.0, 12.0}) {
      // Composite Simpson of sigma' over [w*, w].
      const int n = 2000;
      const double a = p.w_star();
      const double h = (w - a) / n;
      double s = sigmoid_slope(a) + sigmoid_slope(w);
      for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * sigmoid_slope(a + k * h);
      const double oracle = s * h / 3.0 / (w - a);
      EXPECT_NEAR(avg_slope_R(w, p), oracle, 1e-10);
    }
  }
}

TEST(CrossingPointTest, SatisfiesDefiningIdentities) {
  for (double c : kCs) {
    const Problem p(c);
    for (double gamma : {1.05, 1.3, 1.8, 1.99}) {
      const double wt = crossing_point(p, gamma);
      EXPECT_GT(wt, p.w_star());
      EXPECT_NEAR(map_T(wt, p, gamma), p.w_star(), 1e-9);
      EXPECT_NEAR(gamma / p.lambda() * avg_slope_R(wt, p), 1.0, 1e-10);
    }
  }
  EXPECT_THROW(crossing_point(Problem(3.0), 0.9), std::invalid_argument);
  EXPECT_THROW(crossing_point(Problem(3.0), 2.0), std::invalid_argument);
}

TEST(CrossingPointTest, GrowsWithGamma) {
  for (double c : kCs) {
    const Problem p(c);
    double prev = 0.0;
    for (double gamma : {1.05, 1.1, 1.2}) {
      const double gap = crossing_point(p, gamma) - p.w_star();
      EXPECT_GT(gap, prev);
      prev = gap;
    }
  }
}

TEST(RateTest, Arithmetic) {
  EXPECT_NEAR(rate_estimate(1.8), 8.0 / 9.0, 1e-15);
  EXPECT_NEAR(rate_estimate(4.0 / 3.0), 0.5, 1e-15);
  EXPECT_GT(rate_estimate(1.999), 0.998);
  const Problem p(3.0);
  // At w -> w* the bound tends to (1 - gamma)^2.
  EXPECT_NEAR(two_step_bound(p.w_star() + 1e-9, p, 1.8), 0.64, 1e-8);
  EXPECT_THROW(two_step_bound(p.w_star(), p, 1.8), std::invalid_argument);
}

TEST(LemmaTest, DefaultGridPasses) {
  const LemmaReport r = verify_lemmas(Problem(3.0), 1.8);
  EXPECT_EQ(r.checked, 10000);
  EXPECT_GT(r.crossings, 0);
  EXPECT_LT(r.worst_one_step_ratio, 1.0);
  EXPECT_GE(r.worst_bound_margin, -1e-12);
  EXPECT_NO_THROW(verify_lemmas(Problem(1.0001), 1.99));
  EXPECT_NO_THROW(verify_lemmas(Problem(3.0), 1.0 + 1e-9));
  EXPECT_THROW(verify_lemmas(Problem(3.0), 2.1), std::invalid_argument);
}

TEST(PropertyTest, SignsAlternateAfterEnteringCrossingInterval) {
  for (double c : kCs) {
    const Problem p(c);
    for (double gamma : {1.2, 1.6, 1.95}) {
      const double wt = crossing_point(p, gamma);
      for (double w0 = -50.0; w0 <= 50.0; w0 += 1.0) {
        double w = w0;
        bool inside = false;
        for (int t = 0; t < 5000 && std::fabs(w - p.w_star()) > 1e-12; ++t) {
          const double next = map_T(w, p, gamma);
          inside = inside || (w > p.w_star() && w < wt);
          if (inside && std::fabs(next - p.w_star()) > 1e-12) {
            ASSERT_LT((w - p.w_star()) * (next - p.w_star()), 0.0)
                << "c = " << c << ", gamma = " << gamma << ", w0 = " << w0;
          }
          w = next;
        }
      }
    }
  }
}

TEST(CobwebTest, ConstantOrbitAtFixedPoint) {
  const Problem p(3.0);
  for (const CobwebSegment& s : cobweb(p.w_star(), 5, p, 1.8)) {
    EXPECT_NEAR(s.w_from, p.w_star(), 1e-15);
    EXPECT_NEAR(s.w_to, p.w_star(), 1e-15);
  }
}

TEST(CobwebTest, SegmentsAlternateAndFollowTheMap) {
  const Problem p(3.0);
  const auto segs = cobweb(3.0, 20, p, 1.8);
  ASSERT_EQ(segs.size(), 40u);
  for (std::size_t i = 0; i < segs.size(); ++i) {
    EXPECT_EQ(segs[i].kind, i % 2 == 0 ? SegmentKind::kVertical : SegmentKind::kDiagonal);
    // Each segment carries the pair (w, T(w)) of its step.
    EXPECT_EQ(segs[i].w_to, map_T(segs[i].w_from, p, 1.8));
    if (i % 2 == 1) EXPECT_EQ(segs[i].w_from, segs[i - 1].w_from);
    if (i >= 2 && i % 2 == 0) EXPECT_EQ(segs[i].w_from, segs[i - 1].w_to);
  }
  EXPECT_EQ(to_string(SegmentKind::kVertical), "vertical");
  EXPECT_EQ(to_string(SegmentKind::kDiagonal), "diagonal");
  EXPECT_THROW(cobweb(3.0, 0, p, 1.8), std::invalid_argument);
}

TEST(CobwebTest, FromTheLeftIncreasingThenOscillating) {
  const Problem p(3.0);
  const double wt = crossing_point(p, 1.8);
  for (double w0 : {-5.0, -1.0, 0.5}) {
    const auto segs = cobweb(w0, 60, p, 1.8);
    std::vector<double> orbit = {w0};
    for (const auto& s : segs) {
      if (s.kind == SegmentKind::kVertical) orbit.push_back(s.w_to);
    }
    std::size_t t = 0;
    for (; orbit[t] < p.w_star(); ++t) EXPECT_GT(orbit[t + 1], orbit[t]) << "w0 = " << w0;
    while (t < orbit.size() && orbit[t] >= wt) ++t;
    ASSERT_LT(t, orbit.size());
    for (; t + 1 < orbit.size() && std::fabs(orbit[t + 1] - p.w_star()) > 1e-13; ++t) {
      EXPECT_LT((orbit[t] - p.w_star()) * (orbit[t + 1] - p.w_star()), 0.0) << "t = " << t;
    }
  }
}

}  // namespace
}  // namespace lrcycle::onedim
