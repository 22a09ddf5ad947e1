#include "pimetro/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pimetro/parallel.hpp"

namespace pimetro {

const char* to_string(AblationMode mode) {
  switch (mode) {
    case AblationMode::all_errors:
      return "all-errors";
    case AblationMode::fixed_only:
      return "fixed-only";
    case AblationMode::random_only:
      return "random-only";
    case AblationMode::none:
      return "none";
  }
  return "all-errors";
}

AblationMode ablation_mode_from_string(const std::string& text) {
  std::string t = text;
  std::replace(t.begin(), t.end(), '_', '-');
  for (auto m : {AblationMode::all_errors, AblationMode::fixed_only, AblationMode::random_only,
                 AblationMode::none}) {
    if (t == to_string(m)) return m;
  }
  throw std::invalid_argument("unknown ablation mode '" + text +
                              "' (expected all-errors, fixed-only, random-only, none)");
}

TrialConfig apply_ablation(TrialConfig cfg, AblationMode mode) {
  switch (mode) {
    case AblationMode::all_errors:
      break;
    case AblationMode::fixed_only:
      cfg.errors.random_errors_enabled = false;
      break;
    case AblationMode::random_only:
      cfg.errors.fixed_errors_enabled = false;
      break;
    case AblationMode::none:
      cfg.errors.fixed_errors_enabled = false;
      cfg.errors.random_errors_enabled = false;
      break;
  }
  return cfg;
}

double binomial_ci_half_width(double fraction, std::int64_t n) {
  if (n <= 0) return std::numeric_limits<double>::quiet_NaN();
  return 1.96 * std::sqrt(fraction * (1.0 - fraction) / static_cast<double>(n));
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("spearman_correlation: need two equal-length series, n >= 2");
  }
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

SuccessSummary success_probability(const SimulationConfig& cfg, std::int64_t n_campaigns,
                                   std::uint64_t seed, unsigned threads) {
  if (n_campaigns < 1) throw std::invalid_argument("n_campaigns must be >= 1");
  cfg.validate();
  const Rng root(seed);

  SuccessSummary out;
  out.campaigns = n_campaigns;
  out.outcomes.resize(static_cast<std::size_t>(n_campaigns));
  parallel_for_index(out.outcomes.size(), threads, [&](std::size_t i) {
    Rng rng = root.derive_child(i);
    const CampaignResult c = run_campaign(rng, cfg.trial, cfg.stopping, cfg.max_measurements);
    out.outcomes[i] = CampaignOutcome{c.selected, c.measurements, c.discarded};
  });

  std::int64_t successes = 0, decided = 0, decided_measurements = 0;
  for (const auto& o : out.outcomes) {
    if (!o.selected) continue;
    ++decided;
    decided_measurements += o.measurements;
    ++out.selections[*o.selected];
    if (*o.selected == kExpectedSecondQuotient) ++successes;
  }
  const auto n = static_cast<double>(n_campaigns);
  out.success_fraction = static_cast<double>(successes) / n;
  out.ci_half_width = binomial_ci_half_width(out.success_fraction, n_campaigns);
  out.no_decision_fraction = static_cast<double>(n_campaigns - decided) / n;
  out.mean_measurements = decided == 0 ? std::numeric_limits<double>::quiet_NaN()
                                       : static_cast<double>(decided_measurements) /
                                             static_cast<double>(decided);
  return out;
}

BudgetSummary fixed_budget_success(const TrialConfig& cfg, std::int64_t budget,
                                   std::int64_t n_campaigns, std::uint64_t seed,
                                   unsigned threads) {
  if (budget < 1) throw std::invalid_argument("budget must be >= 1");
  if (n_campaigns < 1) throw std::invalid_argument("n_campaigns must be >= 1");
  const Rng root(seed);
  std::vector<char> success(static_cast<std::size_t>(n_campaigns), 0);
  parallel_for_index(success.size(), threads, [&](std::size_t i) {
    Rng rng = root.derive_child(i);
    const CampaignResult c = run_fixed_budget(rng, cfg, budget);
    success[i] = c.selected && *c.selected == kExpectedSecondQuotient;
  });
  BudgetSummary out;
  out.budget = budget;
  out.campaigns = n_campaigns;
  out.success_fraction =
      static_cast<double>(std::count(success.begin(), success.end(), 1)) /
      static_cast<double>(n_campaigns);
  out.ci_half_width = binomial_ci_half_width(out.success_fraction, n_campaigns);
  return out;
}

double AblationDistribution::fraction(int second_quotient) const {
  if (conditioned == 0) return 0.0;
  const auto it = counts.find(second_quotient);
  return it == counts.end() ? 0.0
                            : static_cast<double>(it->second) / static_cast<double>(conditioned);
}

int AblationDistribution::mode_value() const {
  if (counts.empty()) throw std::invalid_argument("ablation distribution is empty");
  auto best = counts.begin();
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

AblationDistribution ablation_distribution(const TrialConfig& cfg, AblationMode mode,
                                           std::int64_t n_trials, std::uint64_t seed,
                                           unsigned threads) {
  if (n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
  const TrialConfig ablated = apply_ablation(cfg, mode);
  ablated.validate();
  const Rng root(seed);
  std::vector<TrialResult> results(static_cast<std::size_t>(n_trials));
  parallel_for_index(results.size(), threads, [&](std::size_t i) {
    Rng rng = root.derive_child(i);
    results[i] = simulate_trial(rng, ablated);
  });

  AblationDistribution out;
  out.mode = mode;
  out.trials = n_trials;
  for (const auto& r : results) {
    if (r.discarded) continue;
    ++out.conditioned;
    ++out.counts[r.second_quotient];
  }
  return out;
}

std::vector<RadiusRow> radius_first_iteration_sweep(const std::vector<double>& radii,
                                                    std::int64_t trials_per_radius,
                                                    const TrialConfig& cfg_template,
                                                    std::uint64_t seed, unsigned threads) {
  if (radii.empty()) throw std::invalid_argument("radius sweep needs at least one radius");
  if (trials_per_radius < 1) throw std::invalid_argument("trials_per_radius must be >= 1");
  const Rng root(seed);
  std::vector<std::int64_t> hits(radii.size(), 0);
  parallel_for_index(radii.size(), threads, [&](std::size_t r) {
    TrialConfig cfg = cfg_template;
    cfg.radius = radii[r];
    cfg.errors.circumference_stdev_override.reset();
    cfg.validate();
    const Rng stream = root.derive_child(r);
    std::int64_t count = 0;
    for (std::int64_t t = 0; t < trials_per_radius; ++t) {
      Rng rng = stream.derive_child(static_cast<std::uint64_t>(t));
      const double piece = sample_circumference_piece(rng, cfg);
      if (!(piece > 0.0)) continue;
      if (first_iteration(rng, cfg, piece).quotient == kExpectedFirstQuotient) ++count;
    }
    hits[r] = count;
  });

  std::vector<RadiusRow> rows;
  for (std::size_t r = 0; r < radii.size(); ++r) {
    RadiusRow row;
    row.radius = radii[r];
    row.trials = trials_per_radius;
    row.fraction_first_21 =
        static_cast<double>(hits[r]) / static_cast<double>(trials_per_radius);
    row.ci_half_width = binomial_ci_half_width(row.fraction_first_21, trials_per_radius);
    rows.push_back(row);
  }
  return rows;
}

void SweepSpec::validate() const {
  if (radii.empty() || budgets.empty()) throw std::invalid_argument("grid needs radii and budgets");
  for (double r : radii) {
    if (!(r > 0.0)) throw std::invalid_argument("grid radii must be > 0");
  }
  for (auto b : budgets) {
    if (b < 1) throw std::invalid_argument("grid budgets must be >= 1");
  }
  if (campaigns_per_cell < 1) throw std::invalid_argument("campaigns_per_cell must be >= 1");
  if (cost_cap < 1) throw std::invalid_argument("cost_cap must be >= 1");
}

std::int64_t SweepSpec::cost() const {
  const std::int64_t max_budget = *std::max_element(budgets.begin(), budgets.end());
  const double c = static_cast<double>(radii.size()) * static_cast<double>(campaigns_per_cell) *
                   static_cast<double>(max_budget);
  return c > 9.0e18 ? std::numeric_limits<std::int64_t>::max() : static_cast<std::int64_t>(c);
}

double GridResult::budget_range() const {
  double best = 0.0;
  for (const auto& row : success) {
    const auto [lo, hi] = std::minmax_element(row.begin(), row.end());
    best = std::max(best, *hi - *lo);
  }
  return best;
}

double GridResult::radius_range() const {
  double best = 0.0;
  for (std::size_t b = 0; b < budgets.size(); ++b) {
    double lo = 1.0, hi = 0.0;
    for (const auto& row : success) {
      lo = std::min(lo, row[b]);
      hi = std::max(hi, row[b]);
    }
    best = std::max(best, hi - lo);
  }
  return best;
}

GridResult radius_budget_grid(const SweepSpec& spec, const TrialConfig& cfg_template,
                              unsigned threads) {
  spec.validate();
  if (spec.cost() > spec.cost_cap) {
    throw CostCapExceeded("grid cost " + std::to_string(spec.cost()) +
                          " measurements exceeds cap " + std::to_string(spec.cost_cap));
  }
  std::vector<std::int64_t> checkpoints = spec.budgets;
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  const std::int64_t max_budget = checkpoints.back();

  const std::size_t n_r = spec.radii.size();
  const auto n_c = static_cast<std::size_t>(spec.campaigns_per_cell);
  // hits[(r * n_c + c) * n_checkpoints + k]
  std::vector<char> hits(n_r * n_c * checkpoints.size(), 0);
  const Rng root(spec.seed);

  std::vector<TrialConfig> cfgs;
  for (double radius : spec.radii) {
    TrialConfig cfg = cfg_template;
    cfg.radius = radius;
    cfg.errors.circumference_stdev_override.reset();
    cfg.validate();
    cfgs.push_back(cfg);
  }

  parallel_for_index(n_r * n_c, threads, [&](std::size_t job) {
    const std::size_t r = job / n_c;
    const std::size_t c = job % n_c;
    Rng rng = root.derive_child(c);
    Histogram hist;
    std::int64_t recorded = 0;
    std::size_t k = 0;
    while (recorded < max_budget) {
      const TrialResult t = simulate_trial(rng, cfgs[r]);
      if (t.discarded) continue;
      hist.record(t.second_quotient);
      ++recorded;
      while (k < checkpoints.size() && checkpoints[k] == recorded) {
        hits[job * checkpoints.size() + k] =
            hist.in_window() > 0 && peak_bin(hist) == kExpectedSecondQuotient;
        ++k;
      }
    }
  });

  GridResult out;
  out.radii = spec.radii;
  out.budgets = spec.budgets;
  out.campaigns_per_cell = spec.campaigns_per_cell;
  out.success.assign(n_r, std::vector<double>(spec.budgets.size(), 0.0));
  for (std::size_t r = 0; r < n_r; ++r) {
    for (std::size_t b = 0; b < spec.budgets.size(); ++b) {
      const auto k = static_cast<std::size_t>(
          std::lower_bound(checkpoints.begin(), checkpoints.end(), spec.budgets[b]) -
          checkpoints.begin());
      std::int64_t s = 0;
      for (std::size_t c = 0; c < n_c; ++c) s += hits[(r * n_c + c) * checkpoints.size() + k];
      out.success[r][b] = static_cast<double>(s) / static_cast<double>(n_c);
    }
  }
  return out;
}

}  // namespace pimetro
