// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cli_app.hpp"
#include "pimetro/continued_fraction.hpp"
#include "pimetro/experiments.hpp"
#include "pimetro/report.hpp"
#include "pimetro/stochastics.hpp"

namespace fs = std::filesystem;
using namespace pimetro;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
  std::vector<std::string> info;
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Verdict()> check;
};

const unsigned kThreads = 0;

Verdict zero_error_oracle() {
  constexpr long double pi = 3.141592653589793238462643383279502884L;
  Verdict v{true, "", {}};
  for (double radius : {100.0, 200.0, 450.0, 900.0}) {
    const long double six_r = 6.0L * radius;
    const long double c6 = 2.0L * pi * radius - six_r;
    const auto q1 = static_cast<int>(std::floor(six_r / c6));
    const long double remainder = six_r - q1 * c6;
    const auto q2 = static_cast<int>(std::floor(c6 / remainder + 0.5L));
    TrialConfig cfg;
    cfg.radius = radius;
    cfg.errors = zero_error_model();
    Rng rng(1);
    const TrialResult t = simulate_trial(rng, cfg);
    v.pass = v.pass && q1 == 21 && q2 == 5 && t.first_quotient == q1 && t.second_quotient == q2;
    v.detail += fmt::format("R={}:({},{}) ", radius, t.first_quotient, t.second_quotient);
  }
  return v;
}

Verdict fixed_only() {
  const auto d = ablation_distribution(TrialConfig{}, AblationMode::fixed_only, 10000, 2, kThreads);
  return {d.conditioned == 10000 && d.fraction(7) == 1.0,
          fmt::format("fraction(7)={:.4f} over {} trials (seed 2)", d.fraction(7), d.trials), {}};
}

Verdict random_only() {
  const auto d = ablation_distribution(TrialConfig{}, AblationMode::random_only, 10000, 3, kThreads);
  const int mode = d.mode_value();
  const double f = d.fraction(4);
  Verdict v{mode == 4 && f >= 0.58 && f <= 0.72,
            fmt::format("mode={} fraction(4)={:.4f} fraction(5)={:.4f} over {} conditioned trials "
                        "(seed 3), need [0.58, 0.72]",
                        mode, f, d.fraction(5), d.conditioned),
            {}};
  SimulationConfig sim;
  sim.trial = apply_ablation(sim.trial, AblationMode::random_only);
  const SuccessSummary s = success_probability(sim, 1000, 3, kThreads);
  const auto it = s.selections.find(4);
  const double campaign_four = it == s.selections.end() ? 0.0 : static_cast<double>(it->second) / 1000.0;
  v.info.push_back(fmt::format("campaign level (stopping rule, 1000 campaigns): selects 4 in {:.3f}",
                               campaign_four));
  return v;
}

Verdict headline() {
  const SuccessSummary s = success_probability(SimulationConfig{}, 500, 9, kThreads);
  Verdict v{s.success_fraction >= 0.65 && s.success_fraction <= 0.85 &&
                s.mean_measurements >= 250.0 && s.mean_measurements <= 420.0,
            fmt::format("success={:.3f} (+/-{:.3f}) mean_measurements={:.1f} no_decision={:.3f} "
                        "over 500 campaigns (seed 9), need [0.65, 0.85] and [250, 420]",
                        s.success_fraction, s.ci_half_width, s.mean_measurements,
                        s.no_decision_fraction),
            {}};
  std::string sel;
  for (const auto& [value, n] : s.selections) sel += fmt::format(" {}:{}", value, n);
  v.info.push_back("selections:" + sel);
  return v;
}

Verdict budgets() {
  const BudgetSummary b50 = fixed_budget_success(TrialConfig{}, 50, 1000, 4, kThreads);
  const BudgetSummary b100 = fixed_budget_success(TrialConfig{}, 100, 1000, 4, kThreads);
  return {b50.success_fraction > 0.40 && b100.success_fraction > 0.50,
          fmt::format("budget 50: {:.3f}, budget 100: {:.3f} over 1000 campaigns (seed 4)",
                      b50.success_fraction, b100.success_fraction),
          {}};
}

Verdict radius_sweep() {
  std::vector<double> radii;
  for (int r = 100; r <= 600; r += 50) radii.push_back(r);
  const auto rows = radius_first_iteration_sweep(radii, 10000, TrialConfig{}, 5, kThreads);
  std::vector<double> x, y;
  double at450 = 0.0, at100 = 0.0;
  for (const auto& row : rows) {
    x.push_back(row.radius);
    y.push_back(row.fraction_first_21);
    if (row.radius == 450.0) at450 = row.fraction_first_21;
    if (row.radius == 100.0) at100 = row.fraction_first_21;
  }
  const double rho = spearman_correlation(x, y);
  return {at450 >= 0.95 && rho > 0.9 && at100 < at450,
          fmt::format("fraction at 450={:.4f} at 100={:.4f} spearman={:.3f} (10000 trials/radius, seed 5)",
                      at450, at100, rho),
          {}};
}

Verdict continued_fractions() {
  const CFExpansion e = cf_expand(std::numbers::pi / 3.0, 3, 0.0);
  const Rational c = convergent(e.quotients);
  const double pi = pi_estimate(c);
  bool ok = e.quotients == std::vector<std::int64_t>{1, 21, 5} && c == Rational(111, 106) &&
            fmt::format("{:.6f}", pi) == "3.141509";
  std::int64_t checked = 0;
  for (std::int64_t p = 1; p <= 1000 && ok; ++p) {
    for (std::int64_t q = 1; q <= 1000; ++q) {
      if (std::gcd(p, q) != 1) continue;
      const CFExpansion exact = cf_expand(Rational(p, q));
      const CFExpansion euclid = canonical(
          {euclid_quotients(static_cast<double>(p), static_cast<double>(q), 1 << 20, 0.0), true});
      if (!(convergent(exact.quotients) == Rational(p, q)) || euclid.quotients != exact.quotients) {
        ok = false;
        break;
      }
      ++checked;
    }
  }
  return {ok, fmt::format("pi/3 -> [{}] = {} -> pi={:.6f}; {} reduced p/q round-trips",
                          fmt::join(e.quotients, ","), c.to_string(), pi, checked),
          {}};
}

Verdict reciprocal() {
  ReciprocalStudyConfig cfg;  // 1e8 samples per point, stdevs 0..0.4
  const auto pts = reciprocal_peak_curve(cfg, Rng(6), kThreads);
  bool ok = pts.size() == cfg.denominator_stdevs.size();
  std::string detail;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i > 0) {
      ok = ok && pts[i].peak_location <= pts[i - 1].peak_location &&
           pts[i].central_mean >= pts[i - 1].central_mean;
    }
    detail += fmt::format("s={}:peak={:.2f},mean={:.5f} ", pts[i].denominator_stdev,
                          pts[i].peak_location, pts[i].central_mean);
  }
  return {ok, detail + fmt::format("({} samples/point, seed 6)", cfg.samples_per_point), {}};
}

Verdict sensitivity() {
  const SweepSpec spec;  // radii 200..900, budgets 25..500, 400 campaigns/cell, seed 1
  const GridResult g = radius_budget_grid(spec, TrialConfig{}, kThreads);
  Verdict v{g.budget_range() > g.radius_range(),
            fmt::format("budget range={:.3f} radius range={:.3f}", g.budget_range(), g.radius_range()),
            {}};
  for (std::size_t i = 0; i < g.radii.size(); ++i) {
    std::string row = fmt::format("R={}:", g.radii[i]);
    for (double s : g.success[i]) row += fmt::format(" {:.3f}", s);
    v.info.push_back(row);
  }
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict reproducibility() {
  const std::vector<std::vector<std::string>> commands{
      {"trial", "--seed", "11"},
      {"campaign", "--seed", "11"},
      {"success", "--campaigns", "100", "--seed", "11"},
      {"budget", "--budget", "50,100", "--campaigns", "100", "--seed", "11"},
      {"ablate", "--mode", "random-only", "--trials", "2000", "--campaigns", "50", "--seed", "11"},
      {"sweep-radius", "--trials", "1000", "--seed", "11"},
      {"grid", "--radii", "300,450", "--budgets", "25,50", "--campaigns", "50", "--seed", "11"},
      {"cf", "--value", "pi/3", "--terms", "3"},
      {"recip", "--samples", "2000000", "--seed", "11"},
  };
  const fs::path root = fs::temp_directory_path() / "pimetro_acceptance_repro";
  bool ok = true;
  std::string failures;
  std::size_t files = 0;
  for (const auto& cmd : commands) {
    std::vector<std::map<std::string, std::string>> runs;
    for (const char* threads : {"1", "1", "4"}) {
      const fs::path dir = root / fmt::format("{}_{}", cmd[0], runs.size());
      fs::remove_all(dir);
      fs::create_directories(dir);
      auto args = cmd;
      args.insert(args.end(), {"--out", dir.string(), "--threads", threads});
      std::ostringstream out, err;
      const int code = cli::run(args, out, err);
      std::map<std::string, std::string> produced{{"stdout", out.str()}};
      for (const auto& e : fs::directory_iterator(dir)) produced[e.path().filename().string()] = slurp(e.path());
      if (code != 0) {
        ok = false;
        failures += cmd[0] + "(exit) ";
      }
      runs.push_back(std::move(produced));
    }
    files += runs[0].size() - 1;
    if (runs[0] != runs[1] || runs[1] != runs[2]) {
      ok = false;
      failures += cmd[0] + " ";
    }
  }
  fs::remove_all(root);
  return {ok,
          fmt::format("{} commands, {} output files, runs x2 at 1 thread and once at 4{}",
                      commands.size(), files, failures.empty() ? "" : "; differing: " + failures),
          {}};
}

Verdict rounding_rule() {
  TrialConfig literal;
  literal.rounding = RoundingRule::literal_text;
  const auto lit = ablation_distribution(literal, AblationMode::fixed_only, 10000, 7, kThreads);
  const auto near = ablation_distribution(TrialConfig{}, AblationMode::fixed_only, 10000, 7, kThreads);
  return {lit.fraction(8) == 1.0 && near.fraction(7) == 1.0,
          fmt::format("literal: fraction(8)={:.4f}; nearest: fraction(7)={:.4f} (seed 7)",
                      lit.fraction(8), near.fraction(7)),
          {}};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "zero-error oracle", 1, zero_error_oracle},
      {2, "fixed-only ablation", 5, fixed_only},
      {3, "random-only ablation", 10, random_only},
      {4, "headline success", 300, headline},
      {5, "fixed-budget curves", 120, budgets},
      {6, "radius sweep", 120, radius_sweep},
      {7, "continued fractions", 30, continued_fractions},
      {8, "reciprocal-normal study", 300, reciprocal},
      {9, "sensitivity grid", 600, sensitivity},
      {10, "reproducibility", 60, reproducibility},
      {11, "rounding-rule regression", 5, rounding_rule},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what(), {}};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_seconds;
    const bool pass = v.pass && in_time;
    failed += !pass;
    std::cout << fmt::format("{} criterion {:>2} {}: {} [{:.2f} s / {:.0f} s{}]\n",
                             pass ? "PASS" : "FAIL", c.id, c.name, v.detail, secs,
                             c.budget_seconds, in_time ? "" : ", over time budget");
    for (const auto& line : v.info) std::cout << "     info: " << line << "\n";
    std::cout.flush();
  }
  std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
