#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pimetro/config.hpp"
#include "pimetro/histogram.hpp"
#include "pimetro/measurement.hpp"

namespace pimetro {

enum class AblationMode { all_errors, fixed_only, random_only, none };

const char* to_string(AblationMode mode);
/// Accepts "all-errors", "fixed-only", "random-only", "none" (or with '_').
AblationMode ablation_mode_from_string(const std::string& text);

/// fixed_only switches random errors off, random_only switches fixed errors
/// off, none switches both off.
TrialConfig apply_ablation(TrialConfig cfg, AblationMode mode);

/// Half-width of the normal-approximation 95 % binomial interval.
double binomial_ci_half_width(double fraction, std::int64_t n);

/// Spearman rank correlation (average ranks for ties).
double spearman_correlation(const std::vector<double>& x, const std::vector<double>& y);

struct CampaignOutcome {
  std::optional<int> selected;
  std::int64_t measurements = 0;
  std::int64_t discarded = 0;

  bool operator==(const CampaignOutcome&) const = default;
};

struct SuccessSummary {
  std::int64_t campaigns = 0;
  /// Campaigns whose selected value was 5.
  double success_fraction = 0.0;
  double ci_half_width = 0.0;
  /// Mean measurements over campaigns that reached a decision (NaN if none).
  double mean_measurements = 0.0;
  double no_decision_fraction = 0.0;
  /// Selected value -> number of campaigns (no-decision campaigns excluded).
  std::map<int, std::int64_t> selections;
  std::vector<CampaignOutcome> outcomes;
};

/// Campaign i runs on Rng(seed).derive_child(i); output is independent of
/// `threads` (0 = all cores).
SuccessSummary success_probability(const SimulationConfig& cfg, std::int64_t n_campaigns,
                                   std::uint64_t seed, unsigned threads = 0);

struct BudgetSummary {
  std::int64_t budget = 0;
  std::int64_t campaigns = 0;
  double success_fraction = 0.0;
  double ci_half_width = 0.0;
};

/// Records exactly `budget` measurements per campaign and selects the peak.
BudgetSummary fixed_budget_success(const TrialConfig& cfg, std::int64_t budget,
                                   std::int64_t n_campaigns, std::uint64_t seed,
                                   unsigned threads = 0);

struct AblationDistribution {
  AblationMode mode = AblationMode::all_errors;
  std::int64_t trials = 0;
  /// Trials with first quotient 21 (the conditioning set).
  std::int64_t conditioned = 0;
  std::map<int, std::int64_t> counts;

  double fraction(int second_quotient) const;
  /// Most frequent second quotient, lowest on ties. Throws if empty.
  int mode_value() const;
};

/// Raw trial outcomes, no stopping rule. Trial i uses
/// Rng(seed).derive_child(i).
AblationDistribution ablation_distribution(const TrialConfig& cfg, AblationMode mode,
                                           std::int64_t n_trials, std::uint64_t seed,
                                           unsigned threads = 0);

struct RadiusRow {
  double radius = 0.0;
  std::int64_t trials = 0;
  double fraction_first_21 = 0.0;
  double ci_half_width = 0.0;
};

/// Fraction of first iterations equal to 21 per radius. The circumference
/// stdev override is dropped so every radius uses the linear fit.
std::vector<RadiusRow> radius_first_iteration_sweep(const std::vector<double>& radii,
                                                    std::int64_t trials_per_radius,
                                                    const TrialConfig& cfg_template,
                                                    std::uint64_t seed, unsigned threads = 0);

class CostCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepSpec {
  std::vector<double> radii{200, 300, 450, 600, 900};
  std::vector<std::int64_t> budgets{25, 50, 100, 200, 325, 500};
  std::int64_t campaigns_per_cell = 400;
  std::uint64_t seed = 1;
  /// Upper bound on recorded measurements across the whole grid.
  std::int64_t cost_cap = 100'000'000;

  void validate() const;
  /// radii x campaigns x max(budgets): measurements actually simulated.
  std::int64_t cost() const;
};

struct GridResult {
  std::vector<double> radii;
  std::vector<std::int64_t> budgets;
  std::int64_t campaigns_per_cell = 0;
  /// success[r][b]
  std::vector<std::vector<double>> success;

  /// Largest (max - min) over budgets at a fixed radius.
  double budget_range() const;
  /// Largest (max - min) over radii at a fixed budget.
  double radius_range() const;
};

/**
 * Fixed-budget success fraction for every (radius, budget) cell. Campaign i
 * of every cell uses Rng(seed).derive_child(i) (common random numbers), so
 * a larger budget extends the same measurement sequence and a one-cell grid
 * equals fixed_budget_success with the same seed. The override is dropped
 * as in the radius sweep. Throws CostCapExceeded before doing any work.
 */
GridResult radius_budget_grid(const SweepSpec& spec, const TrialConfig& cfg_template,
                              unsigned threads = 0);

}  // namespace pimetro
