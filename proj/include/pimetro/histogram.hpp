#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pimetro/measurement.hpp"
#include "pimetro/stochastics.hpp"

namespace pimetro {

/// Counts of integer outcomes over a closed window [lo, hi], with
/// underflow/overflow tallies for values outside it.
class Histogram {
 public:
  explicit Histogram(int lo = 1, int hi = 16);

  void record(int value);

  int lo() const { return lo_; }
  int hi() const { return hi_; }
  std::int64_t count(int bin) const;
  std::span<const std::int64_t> counts() const { return counts_; }
  std::int64_t underflow() const { return underflow_; }
  std::int64_t overflow() const { return overflow_; }
  std::int64_t total() const { return total_; }
  std::int64_t in_window() const { return total_ - underflow_ - overflow_; }

  bool operator==(const Histogram&) const = default;

 private:
  int lo_;
  int hi_;
  std::vector<std::int64_t> counts_;
  std::int64_t underflow_ = 0;
  std::int64_t overflow_ = 0;
  std::int64_t total_ = 0;
};

struct StoppingCriteria {
  std::int64_t min_peak_count = 5;
  /// The peak must be at least this multiple of each adjacent bin.
  double peak_dominance = 1.05;
  int min_consecutive_bins = 5;
  /// Bins above this fraction of the peak form the monotone group.
  double threshold_fraction = 0.20;

  void validate() const;

  bool operator==(const StoppingCriteria&) const = default;
};

/// In-window bin with the largest count, lowest bin on ties.
/// Throws std::invalid_argument when no value fell inside the window.
int peak_bin(const Histogram& hist);

/**
 * True when the histogram shows a single identifiable peak:
 *  (a) peak >= min_peak_count and >= dominance x each neighbour
 *      (a missing neighbour at the window edge counts as 0);
 *  (b) the maximal run of consecutive bins around the peak whose counts
 *      exceed threshold_fraction x peak is at least min_consecutive_bins long;
 *  (c) inside that run counts never increase moving away from the peak.
 */
bool stopping_met(const Histogram& hist, const StoppingCriteria& criteria);

inline constexpr std::int64_t kDefaultMaxMeasurements = 10'000;

struct CampaignResult {
  /// Peak value selected when the stopping rule fired; empty otherwise.
  std::optional<int> selected;
  /// Second-iteration outcomes entered into the histogram.
  std::int64_t measurements = 0;
  /// Trials with a first quotient other than 21 (never recorded).
  std::int64_t discarded = 0;
  Histogram histogram;
  std::uint64_t seed = 0;
  std::string config_digest;
};

/// Repeats trials, recording second quotients of non-discarded trials,
/// until the stopping rule fires or max_measurements are recorded.
CampaignResult run_campaign(Rng& rng, const TrialConfig& cfg, const StoppingCriteria& criteria,
                            std::int64_t max_measurements = kDefaultMaxMeasurements);

/// run_campaign with a recording budget and no stopping rule; the peak of
/// the final histogram (if any in-window value was seen) is selected.
CampaignResult run_fixed_budget(Rng& rng, const TrialConfig& cfg, std::int64_t budget);

}  // namespace pimetro
