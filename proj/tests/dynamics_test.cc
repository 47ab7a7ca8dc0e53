#include "lrcycle/dynamics.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "lrcycle/errors.h"
#include "lrcycle/fft.h"
#include "lrcycle/io.h"
#include "lrcycle/logistic.h"
#include "lrcycle/onedim.h"
#include "lrcycle/solver.h"
#include "test_util.h"

namespace lrcycle {
namespace {

using testing::RandomBase;
using testing::RandomExamples;
using testing::RandomVector;

Problem AsProblem(const Dataset& d) { return Problem(std::in_place_type<Dataset>, d); }
Problem AsProblem(const LiftedDataset& l) { return Problem(std::in_place_type<LiftedDataset>, l); }

HuntResult LoadFixture(const char* name) {
  const std::string text = read_text(std::filesystem::path(LRCYCLE_TEST_DATA_DIR) / name);
  return hunt_result_from_json(Json::parse(text.substr(0, text.find('\n'))));
}

Trajectory Synthetic(const std::vector<Vector>& tail) {
  Trajectory t;
  t.tail = tail;
  t.steps_run = static_cast<std::int64_t>(tail.size()) - 1;
  return t;
}

TEST(RunGdTest, RecordsDocumentedShapes) {
  std::mt19937_64 rng(21);
  const Dataset d(RandomExamples(10, 3, rng));
  RecordSpec rec;
  rec.coords = {0, 2};
  rec.tail_window = 16;
  rec.record_loss = true;
  const Vector w0 = RandomVector(3, rng);
  const Trajectory t = run_gd(AsProblem(d), w0, 0.5, 40, rec);
  EXPECT_EQ(t.steps_run, 40);
  EXPECT_EQ(t.norm_series.size(), 41u);
  EXPECT_EQ(t.loss_series.size(), 41u);
  EXPECT_EQ(t.sampled_coords.at(2).size(), 41u);
  ASSERT_EQ(t.tail.size(), 16u);
  EXPECT_EQ(t.tail_start, 25);

  // Replay by hand: the tail holds exact iterates, oldest first.
  Vector w = w0;
  for (int s = 0; s <= 40; ++s) {
    EXPECT_EQ(t.norm_series[s], w.norm());
    EXPECT_EQ(t.sampled_coords.at(0)[s], w(0));
    if (s >= 25) {
      EXPECT_EQ(t.tail[s - 25], w);
    }
    w -= 0.5 * grad(w, d);
  }

  const Trajectory short_run = run_gd(AsProblem(d), w0, 0.5, 3, rec);
  EXPECT_EQ(short_run.tail.size(), 4u);
  EXPECT_EQ(short_run.tail.front(), w0);
}

TEST(RunGdTest, FixedPointStaysPutAndRunsAreBitwiseReproducible) {
  Examples x(4, 1);
  x << 1, 1, 1, -1;
  const Dataset d(x);
  const SolveReport r = solve_newton(d);
  const Trajectory t = run_gd(AsProblem(d), r.w_star, step_size(1.9, r.lambda_max), 100);
  // The multiplier at w* is 1 - 1.9 = -0.9: the Newton error never grows.
  const double start = std::fabs(r.w_star(0) - std::log(3.0));
  EXPECT_LE(start, 1e-11);
  for (double n : t.norm_series) EXPECT_LE(std::fabs(n - std::log(3.0)), start + 1e-15);

  std::mt19937_64 rng(22);
  const LiftedDataset l(RandomBase(5, rng), 30);
  const Vector w0 = RandomVector(30, rng);
  const Trajectory a = run_gd(AsProblem(l), w0, 3.0, 500);
  const Trajectory b = run_gd(AsProblem(l), w0, 3.0, 500);
  EXPECT_EQ(a.norm_series, b.norm_series);
  EXPECT_EQ(a.last(), b.last());
}

TEST(RunGdTest, LiftedRunMatchesMaterializedRun) {
  std::mt19937_64 rng(23);
  const LiftedDataset l(RandomBase(6, rng), 12);
  const Vector w0 = RandomVector(12, rng);
  const Trajectory a = run_gd(AsProblem(l), w0, 4.0, 300);
  const Trajectory b = run_gd(AsProblem(l.materialize()), w0, 4.0, 300);
  EXPECT_LE((a.last() - b.last()).norm(), 1e-12);
}

TEST(RunGdTest, ErrorsCarryTheStepIndex) {
  std::mt19937_64 rng(24);
  const Dataset d(RandomExamples(5, 2, rng));
  RecordSpec rec;
  rec.divergence_bound = 10.0;
  try {
    run_gd(AsProblem(d), Vector::Constant(2, 1.0), 1e3, 100, rec);
    FAIL() << "expected Diverged";
  } catch (const Diverged& e) {
    EXPECT_GE(e.step(), 1);
  }
  try {
    run_gd(AsProblem(d), Vector::Constant(2, 1.0), 1e308, 100);
    FAIL() << "expected NonFiniteValue";
  } catch (const NonFiniteValue& e) {
    EXPECT_GE(e.step(), 1);
  }
  EXPECT_THROW(run_gd(AsProblem(d), Vector::Zero(3), 1.0, 1), DimensionMismatch);
  EXPECT_THROW(run_gd(AsProblem(d), Vector::Zero(2), 0.0, 1), std::invalid_argument);
}

TEST(RunGdTest, ClassicalRegimeLossIsMonotone) {
  std::mt19937_64 rng(25);
  for (int c = 0; c < 20; ++c) {
    const Dataset d(RandomExamples(20, 1 + c % 4, rng));
    RecordSpec rec;
    rec.record_loss = true;
    const Trajectory t = run_gd(AsProblem(d), RandomVector(d.dim(), rng, 3.0), 1.0 / smoothness(d), 300, rec);
    for (std::size_t s = 1; s < t.loss_series.size(); ++s) {
      EXPECT_LE(t.loss_series[s],
                t.loss_series[s - 1] * (1.0 + 4.0 * std::numeric_limits<double>::epsilon()));
    }
  }
}

TEST(RecurrenceTest, ConvergedTrajectoryHasPeriodOne) {
  Examples x(4, 1);
  x << 1, 1, 1, -1;
  const Dataset d(x);
  const SolveReport r = solve_newton(d);
  RecordSpec rec;
  rec.tail_window = 64;
  const Trajectory t = run_gd(AsProblem(d), Vector::Constant(1, 5.0), step_size(1.5, r.lambda_max), 3000, rec);
  const auto c = detect_cycle_recurrence(t);
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ(c->period, 1);
  EXPECT_LE(c->recurrence_residual, 1e-7);
}

TEST(RecurrenceTest, TwoCycleJustAboveThreshold) {
  // 1D map at gamma = 2.05: solve T(T(w)) = w, T(w) != w, by bisection.
  const onedim::Problem p(3.0);
  const double gamma = 2.05;
  auto f = [&](double w) { return onedim::map_T(onedim::map_T(w, p, gamma), p, gamma) - w; };
  double lo = p.w_star() + 1e-3;
  double hi = lo;
  while (f(hi) * f(lo) > 0.0) hi += 1e-3;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) * f(lo) > 0.0 ? lo : hi) = mid;
  }
  const double w1 = 0.5 * (lo + hi);
  ASSERT_GT(std::fabs(onedim::map_T(w1, p, gamma) - w1), 1e-3);

  Examples x(4, 1);
  x << 1, 1, 1, -1;
  const Dataset d(x);
  const double eta = step_size(gamma, p.lambda());
  RecordSpec rec;
  rec.tail_window = 64;
  const Trajectory t = run_gd(AsProblem(d), Vector::Constant(1, w1), eta, 200, rec);
  const auto c = detect_cycle_recurrence(t);
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ(c->period, 2);
  ASSERT_EQ(c->cycle_points.size(), 2u);
  const auto floquet = floquet_multipliers(c->cycle_points, eta, AsProblem(d));
  EXPECT_LT(floquet.front(), 1.0);
  // The fixed point itself is unstable here.
  EXPECT_GT(floquet_multipliers({Vector::Constant(1, p.w_star())}, eta, AsProblem(d)).front(), 1.0);
}

TEST(RecurrenceTest, SyntheticCyclesAndCaps) {
  std::mt19937_64 rng(26);
  std::vector<Vector> pattern;
  for (int j = 0; j < 5; ++j) pattern.push_back(RandomVector(3, rng));
  std::vector<Vector> tail;
  for (int s = 0; s < 64; ++s) tail.push_back(pattern[s % 5]);
  const auto c = detect_cycle_recurrence(Synthetic(tail));
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ(c->period, 5);
  EXPECT_EQ(c->recurrence_residual, 0.0);
  EXPECT_EQ(c->cycle_points.back(), tail.back());

  std::vector<Vector> noisy = tail;
  for (Vector& v : noisy) v += RandomVector(3, rng, 1e-3);
  EXPECT_FALSE(detect_cycle_recurrence(Synthetic(noisy)).has_value());

  // A period longer than half the window is never reported.
  std::vector<Vector> long_pattern;
  for (int s = 0; s < 40; ++s) long_pattern.push_back(pattern[0] * (1.0 + 0.1 * (s % 30)));
  EXPECT_FALSE(detect_cycle_recurrence(Synthetic(long_pattern)).has_value());
}

TEST(FftTest, MatchesDirectDft) {
  std::mt19937_64 rng(27);
  std::normal_distribution<double> normal;
  for (std::size_t n : {1u, 2u, 8u, 64u, 1024u}) {
    std::vector<std::complex<double>> x(n);
    for (auto& v : x) v = {normal(rng), normal(rng)};
    std::vector<std::complex<double>> y = x;
    fft_radix2(y);
    for (std::size_t k = 0; k < n; ++k) {
      std::complex<long double> acc = 0;
      for (std::size_t t = 0; t < n; ++t) {
        const long double angle = -2.0L * std::numbers::pi_v<long double> * static_cast<long double>(k * t % n) / n;
        acc += std::complex<long double>(x[t].real(), x[t].imag()) *
               std::complex<long double>(std::cos(angle), std::sin(angle));
      }
      EXPECT_NEAR(y[k].real(), static_cast<double>(acc.real()), 1e-10 * std::sqrt(n));
      EXPECT_NEAR(y[k].imag(), static_cast<double>(acc.imag()), 1e-10 * std::sqrt(n));
    }
  }
  std::vector<std::complex<double>> bad(6);
  EXPECT_THROW(fft_radix2(bad), std::invalid_argument);
}

TEST(SpectrumTest, DefinitionAndValidation) {
  std::mt19937_64 rng(28);
  std::normal_distribution<double> normal;
  std::vector<double> series(1500);
  for (double& v : series) v = normal(rng);
  const auto spec = power_spectrum(series, 256);
  ASSERT_EQ(spec.size(), 129u);
  // Direct definition on the last 256 samples, mean removed.
  const auto first = series.end() - 256;
  double mean = 0.0;
  for (auto it = first; it != series.end(); ++it) mean += *it;
  mean /= 256;
  for (std::size_t k = 0; k < spec.size(); k += 7) {
    std::complex<double> acc = 0;
    for (int t = 0; t < 256; ++t) acc += (first[t] - mean) * std::polar(1.0, -2.0 * std::numbers::pi * k * t / 256.0);
    EXPECT_NEAR(spec[k].frequency, k / 256.0, 1e-15);
    EXPECT_NEAR(spec[k].power, std::norm(acc) / 256.0, 1e-9);
  }
  EXPECT_THROW(power_spectrum(series, 1000), std::invalid_argument);
  EXPECT_THROW(power_spectrum(series, 2048), std::invalid_argument);

  const std::vector<double> constant(1024, 3.25);
  for (const auto& p : power_spectrum(constant, 1024)) EXPECT_LE(p.power, 1e-20);
  EXPECT_FALSE(dominant_period(power_spectrum(constant, 1024)).has_value());
}

TEST(SpectrumTest, SineOfPeriodThirteen) {
  std::vector<double> s(1024);
  for (int t = 0; t < 1024; ++t) s[t] = std::sin(2.0 * std::numbers::pi * t / 13.0);
  const auto spec = power_spectrum(s, 1024);
  const auto peaks = top_peaks(spec, 3);
  ASSERT_FALSE(peaks.empty());
  EXPECT_NEAR(peaks.front().frequency, 79.0 / 1024.0, 1e-15);
  for (std::size_t i = 1; i < peaks.size(); ++i) EXPECT_LE(peaks[i].power, peaks[i - 1].power);
  EXPECT_EQ(dominant_period(spec), 13);
}

TEST(SpectrumTest, PeriodicSequencesAndNoise) {
  std::mt19937_64 rng(29);
  std::normal_distribution<double> normal;
  std::vector<double> alternating(1024);
  for (int t = 0; t < 1024; ++t) alternating[t] = 1.0 + (t % 2 ? 0.3 : -0.3);
  EXPECT_EQ(dominant_period(power_spectrum(alternating, 1024)), 2);

  for (int k : {3, 6, 13, 24, 63}) {
    std::vector<double> pattern(k);
    for (double& v : pattern) v = normal(rng);
    std::vector<double> s(2048);
    for (int t = 0; t < 2048; ++t) s[t] = pattern[t % k];
    EXPECT_EQ(dominant_period(power_spectrum(s, 1024)), k) << "k = " << k;
  }

  std::vector<SpectralPeak> flat;
  for (int k = 0; k <= 512; ++k) flat.push_back({k / 1024.0, 1.0});
  EXPECT_FALSE(dominant_period(flat).has_value());
  EXPECT_FALSE(dominant_period(power_spectrum(std::vector<double>(1024, 2.5), 1024)).has_value());
}

TEST(FloquetTest, FixedPointMultipliersAreOneMinusGammaMuOverLambda) {
  std::mt19937_64 rng(30);
  const Dataset d(RandomExamples(30, 3, rng));
  const SolveReport r = solve_newton(d);
  const Eigen::VectorXd mu = Eigen::SelfAdjointEigenSolver<Matrix>(hessian(r.w_star, d)).eigenvalues();
  for (double gamma : {0.5, 1.5, 2.5}) {
    auto got = floquet_multipliers({r.w_star}, step_size(gamma, r.lambda_max), AsProblem(d));
    std::vector<double> expected;
    for (Index i = 0; i < 3; ++i) expected.push_back(std::fabs(1.0 - gamma * mu(i) / r.lambda_max));
    std::sort(expected.rbegin(), expected.rend());
    ASSERT_EQ(got.size(), 3u);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(got[i], expected[i], 1e-10);
    EXPECT_EQ(got.front() > 1.0, gamma > 2.0);
  }
}

TEST(FloquetTest, HuntedCycleMatchesFiniteDifferenceJacobian) {
  const HuntResult h = LoadFixture("base_cycle_long.jsonl");
  const Problem p = AsProblem(h.dataset);
  const auto& pts = h.cycle.cycle_points;
  const auto got = floquet_multipliers(pts, h.eta, p);
  EXPECT_LT(got.front(), 1.0);

  // Oracle: central-difference Jacobian of the k-fold GD map.
  auto k_fold = [&](Vector w) {
    for (std::size_t j = 0; j < pts.size(); ++j) w -= h.eta * grad(w, h.dataset);
    return w;
  };
  Matrix jac(2, 2);
  const double step = 1e-7;
  for (Index j = 0; j < 2; ++j) {
    Vector e = Vector::Zero(2);
    e(j) = step;
    jac.col(j) = (k_fold(pts.front() + e) - k_fold(pts.front() - e)) / (2 * step);
  }
  Eigen::EigenSolver<Matrix> es(jac);
  std::vector<double> oracle = {std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(1))};
  std::sort(oracle.rbegin(), oracle.rend());
  EXPECT_NEAR(got[0], oracle[0], 1e-4);
  EXPECT_NEAR(got[1], oracle[1], 1e-4);
}

// Per-step tail curvature at a tail-free point: (1 / (n_b m)) sum sigma'(a_i) s_i^2.
double TailCurvature(const LiftedDataset& l, const Vector& w) {
  const Vector a = l.base() * w.head(2);
  double s = 0.0;
  for (Index i = 0; i < l.base_size(); ++i) s += sigmoid_slope(a(i)) * l.padding()(i) * l.padding()(i);
  return s / static_cast<double>(l.base_size() * l.tail_dim());
}

TEST(FloquetTest, LiftedRoutesAgreeWithBlockPrediction) {
  const HuntResult h = LoadFixture("base_cycle.jsonl");
  const double scale = h.dataset.examples().rowwise().norm().maxCoeff();
  const Examples base = h.dataset.examples() / scale;
  const double eta = h.eta * scale * scale;
  const auto base_mult = floquet_multipliers(
      {h.cycle.cycle_points[0] * scale, h.cycle.cycle_points[1] * scale}, eta, AsProblem(Dataset(base)));

  for (Index d : {20, 40, 300}) {
    const LiftedDataset l(base, d);
    std::vector<Vector> pts;
    double tail = 1.0;
    for (const Vector& p : h.cycle.cycle_points) {
      Vector w = Vector::Zero(d);
      w.head(2) = p * scale;
      pts.push_back(w);
      tail *= 1.0 - eta * TailCurvature(l, w);
    }
    const auto got = floquet_multipliers(pts, eta, AsProblem(l));
    ASSERT_EQ(static_cast<Index>(got.size()), d);
    std::vector<double> expected = base_mult;
    for (Index j = 2; j < d; ++j) expected.push_back(std::fabs(tail));
    std::sort(expected.rbegin(), expected.rend());
    for (Index j = 0; j < d; ++j) EXPECT_NEAR(got[j], expected[j], 1e-9) << "d = " << d;
  }

  // Large lifted problems need a tail-free cycle.
  const LiftedDataset l(base, 100);
  Vector w = Vector::Constant(100, 0.1);
  EXPECT_THROW(floquet_multipliers({w}, eta, AsProblem(l)), DimensionTooLarge);
}

}  // namespace
}  // namespace lrcycle
