#pragma once

#include <cstdint>
#include <vector>

namespace pimetro {

/**
 * Seedable random stream (xoshiro256** state expanded from the seed with
 * splitmix64).
 *
 * The sample stream is a pure function of the seed. Every sampling routine
 * below is written in terms of next_u64() and portable arithmetic, so the
 * same seed yields the same draws on every platform with IEEE doubles.
 *
 * Child streams are keyed by (seed, index) and do not depend on how far the
 * parent has advanced, so work split across threads can be re-assembled by
 * index and match a serial run exactly.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double next_unit();

  /// Standard normal deviate (Marsaglia polar method, spare cached).
  double next_standard_normal();

  Rng derive_child(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline Rng rng_new(std::uint64_t seed) { return Rng(seed); }

/// Seed of the child stream derive_child(index) would produce.
std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index);

/// One draw from N(mean, stdev^2). stdev == 0 returns mean exactly.
/// Throws std::invalid_argument for negative or non-finite stdev.
double sample_normal(Rng& rng, double mean, double stdev);

/// One draw from U[lo, hi]. lo == hi returns lo. Throws if lo > hi.
double sample_uniform(Rng& rng, double lo, double hi);

// ---------------------------------------------------------------------------
// Ratio-of-normals study

struct ReciprocalStudyConfig {
  double numerator_mean = 1.0;
  double numerator_stdev = 0.0;
  double denominator_mean = 1.0;
  std::vector<double> denominator_stdevs{0.0, 0.1, 0.2, 0.3, 0.4};
  std::uint64_t samples_per_point = 100'000'000;
  double bin_width = 0.01;

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;

  /// numerator_mean / denominator_mean; the mode and mean with no spread.
  double deterministic_ratio() const { return numerator_mean / denominator_mean; }
};

struct ReciprocalPoint {
  double denominator_stdev = 0.0;
  /// Center of the most populated bin inside the central window.
  double peak_location = 0.0;
  /// Mean of the samples that fall inside the central window.
  double central_mean = 0.0;
  /// Fraction of samples inside the central window.
  double central_fraction = 0.0;
};

/**
 * Samples numerator/denominator ratios for every denominator stdev in the
 * grid and estimates the mode and the central mean.
 *
 * Bins are aligned so that the deterministic ratio r is a bin center. The
 * central window is [r/5, 5r]; samples outside it (including the sign-flipped
 * ratios from denominators near zero) are retained as out-of-window mass.
 * Ties for the mode go to the lower bin.
 *
 * Each grid point is split into fixed-size chunks with their own child
 * stream, so the result is independent of `threads`.
 */
std::vector<ReciprocalPoint> reciprocal_peak_curve(const ReciprocalStudyConfig& cfg,
                                                   const Rng& rng, unsigned threads = 1);

}  // namespace pimetro
