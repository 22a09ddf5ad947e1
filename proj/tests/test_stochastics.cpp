#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "pimetro/stochastics.hpp"

using namespace pimetro;

namespace {

// Density of 1/D for D ~ N(1, s^2), used as an independent oracle.
double reciprocal_density(double x, double s) {
  const double z = (1.0 / x - 1.0) / s;
  return std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * std::numbers::pi) * x * x);
}

// Simpson integral of f over [a, b].
template <class F>
double simpson(F f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace

TEST_CASE("same seed gives the same stream") {
  Rng a = rng_new(42), b = rng_new(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds give different normal streams") {
  Rng a = rng_new(1), b = rng_new(2);
  bool differ = false;
  for (int i = 0; i < 100; ++i) differ |= a.next_standard_normal() != b.next_standard_normal();
  CHECK(differ);
}

TEST_CASE("child streams depend only on seed and index") {
  Rng parent = rng_new(7);
  Rng c1 = parent.derive_child(3);
  parent.next_u64();
  parent.next_u64();
  Rng c2 = parent.derive_child(3);
  for (int i = 0; i < 100; ++i) CHECK(c1.next_u64() == c2.next_u64());
  CHECK(rng_new(7).derive_child(3).seed() == child_seed(7, 3));
  CHECK(child_seed(7, 3) != child_seed(7, 4));
  CHECK(child_seed(7, 3) != child_seed(8, 3));
}

TEST_CASE("next_unit stays in [0, 1)") {
  Rng r(5);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.next_unit();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("sample_normal edge cases") {
  Rng r(1);
  CHECK(sample_normal(r, 0.0, 0.0) == 0.0);
  CHECK(sample_normal(r, 3.25, 0.0) == 3.25);
  CHECK_THROWS_AS(sample_normal(r, 0.0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(sample_normal(r, 0.0, std::nan("")), std::invalid_argument);
}

TEST_CASE("sample_normal moments at 1e6 draws") {
  Rng r(12345);
  const int n = 1'000'000;
  double sum = 0.0, sum2 = 0.0;
  int within = 0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_normal(r, 5.0, 2.0);
    sum += x;
    sum2 += x * x;
    within += (x >= 3.0 && x <= 7.0);
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean - 5.0) < 0.01);
  CHECK(std::abs(var - 4.0) < 0.03);
  const double expected_within = std::erf(1.0 / std::sqrt(2.0));
  CHECK(std::abs(static_cast<double>(within) / n - expected_within) < 0.01);
}

TEST_CASE("sample_uniform range and moments") {
  Rng r(99);
  CHECK(sample_uniform(r, 0.5, 0.5) == 0.5);
  CHECK_THROWS_AS(sample_uniform(r, 1.0, 0.0), std::invalid_argument);
  const int n = 1'000'000;
  const double lo = -0.18, hi = 0.0;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_uniform(r, lo, hi);
    REQUIRE(x >= lo);
    REQUIRE(x <= hi);
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean - (lo + hi) / 2.0) < 3e-4);
  CHECK(std::abs(var - (hi - lo) * (hi - lo) / 12.0) < 3e-5);
}

TEST_CASE("reciprocal curve with zero stdev is the exact ratio") {
  ReciprocalStudyConfig cfg;
  cfg.numerator_mean = 3.0;
  cfg.denominator_mean = 2.0;
  cfg.denominator_stdevs = {0.0};
  cfg.samples_per_point = 10'000;
  const auto pts = reciprocal_peak_curve(cfg, Rng(1));
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].peak_location == 1.5);
  CHECK(pts[0].central_mean == 1.5);
  CHECK(pts[0].central_fraction == 1.0);
}

TEST_CASE("reciprocal curve matches the analytic ratio density") {
  ReciprocalStudyConfig cfg;
  cfg.denominator_stdevs = {0.2, 0.4};
  cfg.samples_per_point = 2'000'000;
  const auto pts = reciprocal_peak_curve(cfg, Rng(3), 2);
  REQUIRE(pts.size() == 2);
  for (const auto& p : pts) {
    const double s = p.denominator_stdev;
    // Mode of 1/D solves 2 s^2 x^2 + x - 1 = 0.
    const double mode = (-1.0 + std::sqrt(1.0 + 8.0 * s * s)) / (4.0 * s * s);
    CHECK(std::abs(p.peak_location - mode) < 0.03);
    const auto f = [s](double x) { return reciprocal_density(x, s); };
    const double mass = simpson(f, 0.2, 5.0);
    const double mean = simpson([&](double x) { return x * f(x); }, 0.2, 5.0) / mass;
    CHECK(std::abs(p.central_fraction - mass) < 2e-3);
    CHECK(std::abs(p.central_mean - mean) < 2e-3);
  }
}

TEST_CASE("reciprocal curve does not depend on thread count") {
  ReciprocalStudyConfig cfg;
  cfg.samples_per_point = 3'000'000;
  cfg.denominator_stdevs = {0.1, 0.3};
  const auto a = reciprocal_peak_curve(cfg, Rng(11), 1);
  const auto b = reciprocal_peak_curve(cfg, Rng(11), 4);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].peak_location == b[i].peak_location);
    CHECK(a[i].central_mean == b[i].central_mean);
    CHECK(a[i].central_fraction == b[i].central_fraction);
  }
}

TEST_CASE("reciprocal config validation") {
  ReciprocalStudyConfig cfg;
  cfg.samples_per_point = 10;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.denominator_mean = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.numerator_mean = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
