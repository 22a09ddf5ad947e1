#include "pimetro/histogram.hpp"

#include <stdexcept>

#include "pimetro/config.hpp"

namespace pimetro {

Histogram::Histogram(int lo, int hi) : lo_(lo), hi_(hi) {
  if (hi < lo) throw std::invalid_argument("histogram window must satisfy lo <= hi");
  counts_.assign(static_cast<std::size_t>(hi - lo + 1), 0);
}

void Histogram::record(int value) {
  ++total_;
  if (value < lo_) {
    ++underflow_;
  } else if (value > hi_) {
    ++overflow_;
  } else {
    ++counts_[static_cast<std::size_t>(value - lo_)];
  }
}

std::int64_t Histogram::count(int bin) const {
  if (bin < lo_ || bin > hi_) return 0;
  return counts_[static_cast<std::size_t>(bin - lo_)];
}

void StoppingCriteria::validate() const {
  if (min_peak_count < 1) throw std::invalid_argument("min_peak_count must be >= 1");
  if (!(peak_dominance > 1.0)) throw std::invalid_argument("peak_dominance must be > 1");
  if (min_consecutive_bins < 1) throw std::invalid_argument("min_consecutive_bins must be >= 1");
  if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0)) {
    throw std::invalid_argument("threshold_fraction must be in (0, 1)");
  }
}

int peak_bin(const Histogram& hist) {
  if (hist.in_window() == 0) {
    throw std::invalid_argument("peak_bin: histogram has no in-window counts");
  }
  const auto counts = hist.counts();
  std::size_t best = 0;
  for (std::size_t i = 1; i < counts.size(); ++i) {
    if (counts[i] > counts[best]) best = i;
  }
  return hist.lo() + static_cast<int>(best);
}

bool stopping_met(const Histogram& hist, const StoppingCriteria& criteria) {
  if (hist.in_window() < criteria.min_peak_count) return false;
  const auto c = hist.counts();
  const int n = static_cast<int>(c.size());
  const int p = peak_bin(hist) - hist.lo();
  const auto peak = static_cast<double>(c[p]);

  // (a)
  if (c[p] < criteria.min_peak_count) return false;
  const double below = p > 0 ? static_cast<double>(c[p - 1]) : 0.0;
  const double above = p + 1 < n ? static_cast<double>(c[p + 1]) : 0.0;
  if (peak < criteria.peak_dominance * below || peak < criteria.peak_dominance * above) {
    return false;
  }

  // (b)
  const double threshold = criteria.threshold_fraction * peak;
  int first = p;
  while (first > 0 && static_cast<double>(c[first - 1]) > threshold) --first;
  int last = p;
  while (last + 1 < n && static_cast<double>(c[last + 1]) > threshold) ++last;
  if (last - first + 1 < criteria.min_consecutive_bins) return false;

  // (c)
  for (int i = first; i < p; ++i) {
    if (c[i] > c[i + 1]) return false;
  }
  for (int i = p; i < last; ++i) {
    if (c[i + 1] > c[i]) return false;
  }
  return true;
}

namespace {

SimulationConfig as_simulation(const TrialConfig& cfg, const StoppingCriteria& criteria,
                               std::int64_t max_measurements) {
  SimulationConfig sim;
  sim.trial = cfg;
  sim.stopping = criteria;
  sim.max_measurements = max_measurements;
  return sim;
}

}  // namespace

CampaignResult run_campaign(Rng& rng, const TrialConfig& cfg, const StoppingCriteria& criteria,
                            std::int64_t max_measurements) {
  if (max_measurements < 1) throw std::invalid_argument("max_measurements must be >= 1");
  cfg.validate();
  criteria.validate();

  CampaignResult out;
  out.seed = rng.seed();
  out.config_digest = config_digest(as_simulation(cfg, criteria, max_measurements));
  while (out.measurements < max_measurements) {
    const TrialResult t = simulate_trial(rng, cfg);
    if (t.discarded) {
      ++out.discarded;
      continue;
    }
    out.histogram.record(t.second_quotient);
    ++out.measurements;
    if (stopping_met(out.histogram, criteria)) {
      out.selected = peak_bin(out.histogram);
      break;
    }
  }
  return out;
}

CampaignResult run_fixed_budget(Rng& rng, const TrialConfig& cfg, std::int64_t budget) {
  if (budget < 1) throw std::invalid_argument("budget must be >= 1");
  cfg.validate();

  CampaignResult out;
  out.seed = rng.seed();
  out.config_digest = config_digest(as_simulation(cfg, StoppingCriteria{}, budget));
  while (out.measurements < budget) {
    const TrialResult t = simulate_trial(rng, cfg);
    if (t.discarded) {
      ++out.discarded;
      continue;
    }
    out.histogram.record(t.second_quotient);
    ++out.measurements;
  }
  if (out.histogram.in_window() > 0) out.selected = peak_bin(out.histogram);
  return out;
}

}  // namespace pimetro
