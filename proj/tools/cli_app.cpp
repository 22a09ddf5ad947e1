#include "cli_app.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "pimetro/continued_fraction.hpp"
#include "pimetro/experiments.hpp"
#include "pimetro/report.hpp"
#include "pimetro/stochastics.hpp"

namespace pimetro::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

/// Option text for a config key: radius -> --radius, cut_match_stdev -> --cut-match-stdev.
std::string flag_for_key(const std::string& key) {
  std::string flag = key;
  for (char& ch : flag) {
    if (ch == '_') ch = '-';
  }
  return "--" + flag;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Common {
  std::uint64_t seed = 1;
  std::string config_path;
  std::string out_dir;
  unsigned threads = 0;
  std::vector<std::string> formats{"csv", "json", "svg"};
  bool zero_errors = false;
  // One slot per config key, in config_keys() order.
  std::vector<std::string> key_values;
};

struct Resolved {
  SimulationConfig sim;
  fs::path out_dir;
  std::set<std::string> formats;
};

Resolved resolve(const Common& c, const CLI::App& sub,
                 const std::vector<CLI::Option*>& key_options) {
  std::optional<std::string> text;
  if (!c.config_path.empty()) text = read_file(c.config_path);

  std::vector<std::pair<std::string, std::string>> flags;
  if (c.zero_errors) {
    flags.emplace_back("fixed_errors_enabled", "false");
    flags.emplace_back("random_errors_enabled", "false");
  }
  const auto& keys = config_keys();
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (key_options[i]->count() > 0) flags.emplace_back(keys[i].name, c.key_values[i]);
  }
  (void)sub;

  Resolved r;
  r.sim = resolve_config(text, flags);
  if (!c.out_dir.empty()) {
    r.out_dir = c.out_dir;
  } else if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') {
    r.out_dir = env;
  } else {
    r.out_dir = ".";
  }
  for (const auto& f : c.formats) {
    if (f != "csv" && f != "json" && f != "svg") {
      throw ConfigError("formats", "unknown output format '" + f + "' (csv, json, svg)");
    }
    r.formats.insert(f);
  }
  return r;
}

Json config_json(const SimulationConfig& sim) {
  Json j = Json::object();
  for (const auto& [k, v] : config_entries(sim)) j[k] = v;
  return j;
}

Json provenance(const std::string& command, std::uint64_t seed, const SimulationConfig& sim) {
  Json j;
  j["command"] = command;
  j["tool_version"] = kToolVersion;
  j["seed"] = seed;
  j["config_digest"] = config_digest(sim);
  j["config"] = config_json(sim);
  return j;
}

class Outputs {
 public:
  Outputs(const Resolved& r, std::string stem) : r_(r), stem_(std::move(stem)) {}

  void csv(const CsvTable& table, const std::string& suffix = "") const {
    if (!r_.formats.contains("csv")) return;
    write(stem_ + suffix + ".csv", table.str());
  }
  void json(const Json& j) const {
    if (!r_.formats.contains("json")) return;
    write(stem_ + ".json", j.dump(2) + "\n");
  }
  void svg(const Histogram& h, const std::string& title) const {
    if (!r_.formats.contains("svg") || h.total() == 0) return;
    write(stem_ + ".svg", histogram_svg(h, title));
  }

 private:
  void write(const std::string& name, const std::string& content) const {
    std::error_code ec;
    fs::create_directories(r_.out_dir, ec);
    if (ec) throw IoError(r_.out_dir, "cannot create output directory: " + ec.message());
    write_text_file(r_.out_dir / name, content);
  }

  const Resolved& r_;
  std::string stem_;
};

std::string fixed3(double v) { return format_fixed(v, 3); }

Json histogram_json(const Histogram& h) {
  Json j;
  j["window"] = {h.lo(), h.hi()};
  Json counts = Json::object();
  for (int b = h.lo(); b <= h.hi(); ++b) counts[std::to_string(b)] = h.count(b);
  j["counts"] = counts;
  j["underflow"] = h.underflow();
  j["overflow"] = h.overflow();
  j["total"] = h.total();
  return j;
}

CsvTable histogram_csv(const Histogram& h) {
  CsvTable t({"bin", "count"});
  for (int b = h.lo(); b <= h.hi(); ++b) t.add_row({std::to_string(b), std::to_string(h.count(b))});
  return t;
}

/// Parses "pi", "pi/3", "p/q" or a decimal. Returns the rational when exact.
std::pair<double, std::optional<Rational>> parse_cf_value(const std::string& text) {
  if (text == "pi") return {std::numbers::pi, std::nullopt};
  if (text == "pi/3") return {std::numbers::pi / 3.0, std::nullopt};
  if (const auto slash = text.find('/'); slash != std::string::npos) {
    try {
      std::size_t used_p = 0, used_q = 0;
      const std::string ps = text.substr(0, slash), qs = text.substr(slash + 1);
      const long long p = std::stoll(ps, &used_p);
      const long long q = std::stoll(qs, &used_q);
      if (used_p != ps.size() || used_q != qs.size()) throw std::invalid_argument("trailing text");
      const Rational r(p, q);
      return {r.to_double(), r};
    } catch (const std::exception&) {
      throw ConfigError("value", "expected pi, pi/3, p/q or a decimal, got '" + text + "'");
    }
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing text");
    return {v, std::nullopt};
  } catch (const std::exception&) {
    throw ConfigError("value", "expected pi, pi/3, p/q or a decimal, got '" + text + "'");
  }
}

std::string quotient_list(const std::vector<std::int64_t>& q) {
  std::string s = "[";
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(q[i]);
  }
  return s + "]";
}

std::string distribution_line(const AblationDistribution& d) {
  std::string s = "{";
  bool first = true;
  for (const auto& [value, count] : d.counts) {
    const double f = d.fraction(value);
    if (f < 0.0005) continue;
    if (!first) s += ", ";
    first = false;
    s += fmt::format("{}: {:.3f}", value, f);
  }
  return s + "}";
}

}  // namespace

SimulationConfig resolve_config(const std::optional<std::string>& config_text,
                                const std::vector<std::pair<std::string, std::string>>& flags) {
  SimulationConfig cfg;
  if (config_text) {
    for (const auto& [k, v] : parse_config_pairs(*config_text)) set_config_value(cfg, k, v);
  }
  for (const auto& [k, v] : flags) set_config_value(cfg, k, v);
  cfg.validate();
  return cfg;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulator for the iterated wire-remainder measurement of pi/3", "pimetro"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  Common common;
  const auto& keys = config_keys();
  common.key_values.resize(keys.size());
  std::map<const CLI::App*, std::vector<CLI::Option*>> key_options;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", common.seed, "base seed")->capture_default_str();
    sub->add_option("--config", common.config_path, "flat key = value config file");
    sub->add_option("--out", common.out_dir,
                    std::string("output directory (default $") + kOutDirEnv + " or .)");
    sub->add_option("--threads", common.threads, "worker threads, 0 = all cores")
        ->capture_default_str();
    sub->add_option("--formats", common.formats, "subset of csv,json,svg")->delimiter(',');
    sub->add_flag("--zero-errors", common.zero_errors, "switch off fixed and random errors");
    auto& opts = key_options[sub];
    for (std::size_t i = 0; i < keys.size(); ++i) {
      opts.push_back(sub->add_option(flag_for_key(keys[i].name), common.key_values[i],
                                     keys[i].description));
    }
  };

  // trial
  auto* trial = app.add_subcommand("trial", "simulate one measurement, print it as JSON");
  add_common(trial);

  // campaign
  auto* campaign = app.add_subcommand("campaign", "one campaign under the stopping rule");
  add_common(campaign);

  // success
  std::int64_t campaigns = 500;
  auto* success = app.add_subcommand("success", "success rate over many campaigns");
  add_common(success);
  success->add_option("--campaigns", campaigns, "number of campaigns")->capture_default_str();

  // budget
  std::vector<std::int64_t> budgets{50, 100};
  std::int64_t budget_campaigns = 1000;
  auto* budget = app.add_subcommand("budget", "success rate at fixed measurement budgets");
  add_common(budget);
  budget->add_option("--budget", budgets, "budgets (comma separated)")->delimiter(',');
  budget->add_option("--campaigns", budget_campaigns, "campaigns per budget")
      ->capture_default_str();

  // ablate
  std::string mode_text = "all-errors";
  std::int64_t ablate_trials = 10000;
  std::int64_t ablate_campaigns = 0;
  auto* ablate = app.add_subcommand("ablate", "raw outcome distribution with error classes removed");
  add_common(ablate);
  ablate->add_option("--mode", mode_text, "all-errors | fixed-only | random-only | none")
      ->capture_default_str();
  ablate->add_option("--trials", ablate_trials, "trials")->capture_default_str();
  ablate->add_option("--campaigns", ablate_campaigns,
                     "also run this many stopping-rule campaigns under the ablation");

  // sweep-radius
  std::vector<double> sweep_radii{100, 150, 200, 250, 300, 350, 400, 450, 500, 550, 600};
  std::int64_t sweep_trials = 20000;
  auto* sweep = app.add_subcommand("sweep-radius", "first-iteration success versus radius");
  add_common(sweep);
  sweep->add_option("--radii", sweep_radii, "radii in mm (comma separated)")->delimiter(',');
  sweep->add_option("--trials", sweep_trials, "trials per radius")->capture_default_str();

  // grid
  SweepSpec grid_spec;
  auto* grid = app.add_subcommand("grid", "fixed-budget success over radius x budget");
  add_common(grid);
  grid->add_option("--radii", grid_spec.radii, "radii in mm")->delimiter(',');
  grid->add_option("--budgets", grid_spec.budgets, "measurement budgets")->delimiter(',');
  grid->add_option("--campaigns", grid_spec.campaigns_per_cell, "campaigns per cell")
      ->capture_default_str();
  grid->add_option("--cost-cap", grid_spec.cost_cap, "maximum simulated measurements")
      ->capture_default_str();

  // cf
  std::string cf_value = "pi/3";
  int cf_terms = 3;
  double cf_tolerance = 0.0;
  auto* cf = app.add_subcommand("cf", "continued fraction, convergent and pi estimate");
  add_common(cf);
  cf->add_option("--value", cf_value, "pi, pi/3, p/q or a decimal")->capture_default_str();
  cf->add_option("--terms", cf_terms, "maximum number of terms")->capture_default_str();
  cf->add_option("--tolerance", cf_tolerance, "stop when the fractional part is below this");

  // recip
  ReciprocalStudyConfig recip_cfg;
  auto* recip = app.add_subcommand("recip", "mode and mean of a ratio of normals");
  add_common(recip);
  recip->add_option("--numerator-mean", recip_cfg.numerator_mean)->capture_default_str();
  recip->add_option("--numerator-stdev", recip_cfg.numerator_stdev)->capture_default_str();
  recip->add_option("--denominator-mean", recip_cfg.denominator_mean)->capture_default_str();
  recip->add_option("--stdevs", recip_cfg.denominator_stdevs, "denominator stdev grid")
      ->delimiter(',');
  recip->add_option("--samples", recip_cfg.samples_per_point, "samples per grid point")
      ->capture_default_str();
  recip->add_option("--bin-width", recip_cfg.bin_width)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  CLI::App* sub = app.get_subcommands().front();

  try {
    const Resolved r = resolve(common, *sub, key_options[sub]);
    const SimulationConfig& sim = r.sim;
    const std::string name = sub->get_name();
    Json prov = provenance(name, common.seed, sim);

    if (sub == trial) {
      Rng rng(common.seed);
      const TrialResult t = simulate_trial(rng, sim.trial);
      Json j;
      j["first_quotient"] = t.first_quotient;
      j["second_quotient"] = t.second_quotient;
      j["c_minus_six_r"] = t.c_minus_six_r;
      j["remainder_piece"] = t.remainder_piece;
      j["discarded"] = t.discarded;
      j["degenerate"] = t.degenerate;
      j["seed"] = common.seed;
      j["config_digest"] = config_digest(sim);
      out << j.dump() << "\n";
      return kOk;
    }

    const Outputs files(r, name == "sweep-radius" ? "sweep_radius" : name);

    if (sub == campaign) {
      Rng rng(common.seed);
      const CampaignResult c = run_campaign(rng, sim.trial, sim.stopping, sim.max_measurements);
      files.csv(histogram_csv(c.histogram));
      Json res;
      res["selected"] = c.selected ? Json(*c.selected) : Json(nullptr);
      res["measurements"] = c.measurements;
      res["discarded"] = c.discarded;
      res["histogram"] = histogram_json(c.histogram);
      prov["results"] = res;
      files.json(prov);
      files.svg(c.histogram, "campaign");
      out << "selected=" << (c.selected ? std::to_string(*c.selected) : "none")
          << " measurements=" << c.measurements << " discarded=" << c.discarded << "\n";
      return kOk;
    }

    if (sub == success) {
      const SuccessSummary s = success_probability(sim, campaigns, common.seed, common.threads);
      CsvTable summary({"success_fraction", "ci_half_width", "mean_measurements",
                        "no_decision_fraction", "campaigns"});
      summary.add_row({format_fixed(s.success_fraction), format_fixed(s.ci_half_width),
                       format_fixed(s.mean_measurements), format_fixed(s.no_decision_fraction),
                       std::to_string(s.campaigns)});
      files.csv(summary);
      CsvTable per({"campaign", "selected", "measurements", "discarded"});
      for (std::size_t i = 0; i < s.outcomes.size(); ++i) {
        const auto& o = s.outcomes[i];
        per.add_row({std::to_string(i), o.selected ? std::to_string(*o.selected) : "none",
                     std::to_string(o.measurements), std::to_string(o.discarded)});
      }
      files.csv(per, "_campaigns");
      Json res;
      res["campaigns"] = s.campaigns;
      res["success_fraction"] = s.success_fraction;
      res["ci_half_width"] = s.ci_half_width;
      res["mean_measurements"] =
          std::isnan(s.mean_measurements) ? Json(nullptr) : Json(s.mean_measurements);
      res["no_decision_fraction"] = s.no_decision_fraction;
      Json sel = Json::object();
      for (const auto& [v, n] : s.selections) sel[std::to_string(v)] = n;
      res["selections"] = sel;
      prov["results"] = res;
      files.json(prov);
      out << "success=" << fixed3(s.success_fraction)
          << " mean_measurements=" << format_fixed(s.mean_measurements, 1)
          << " no_decision=" << fixed3(s.no_decision_fraction) << "\n";
      return kOk;
    }

    if (sub == budget) {
      CsvTable t({"budget", "success_fraction", "ci_half_width", "campaigns"});
      Json rows = Json::array();
      std::string line;
      for (auto b : budgets) {
        const BudgetSummary s =
            fixed_budget_success(sim.trial, b, budget_campaigns, common.seed, common.threads);
        t.add_row({std::to_string(b), format_fixed(s.success_fraction),
                   format_fixed(s.ci_half_width), std::to_string(s.campaigns)});
        rows.push_back({{"budget", b}, {"success_fraction", s.success_fraction},
                        {"ci_half_width", s.ci_half_width}, {"campaigns", s.campaigns}});
        if (!line.empty()) line += ' ';
        line += fmt::format("budget{}={:.3f}", b, s.success_fraction);
      }
      files.csv(t);
      prov["results"] = rows;
      files.json(prov);
      out << line << "\n";
      return kOk;
    }

    if (sub == ablate) {
      AblationMode mode;
      try {
        mode = ablation_mode_from_string(mode_text);
      } catch (const std::invalid_argument& e) {
        throw ConfigError("mode", e.what());
      }
      const AblationDistribution d =
          ablation_distribution(sim.trial, mode, ablate_trials, common.seed, common.threads);
      CsvTable t({"second_quotient", "count", "fraction"});
      Histogram h;
      Json dist = Json::object();
      for (const auto& [v, n] : d.counts) {
        t.add_row({std::to_string(v), std::to_string(n), format_fixed(d.fraction(v))});
        dist[std::to_string(v)] = n;
        for (std::int64_t k = 0; k < n; ++k) h.record(v);
      }
      files.csv(t);
      Json res;
      res["mode"] = to_string(mode);
      res["trials"] = d.trials;
      res["conditioned"] = d.conditioned;
      res["counts"] = dist;
      if (ablate_campaigns > 0) {
        SimulationConfig ablated = sim;
        ablated.trial = apply_ablation(sim.trial, mode);
        const SuccessSummary s =
            success_probability(ablated, ablate_campaigns, common.seed, common.threads);
        CsvTable sel({"selected", "campaigns", "fraction"});
        Json sj = Json::object();
        for (const auto& [v, n] : s.selections) {
          sel.add_row({std::to_string(v), std::to_string(n),
                       format_fixed(static_cast<double>(n) / static_cast<double>(s.campaigns))});
          sj[std::to_string(v)] = n;
        }
        files.csv(sel, "_campaigns");
        res["campaign_selections"] = sj;
        res["campaign_no_decision_fraction"] = s.no_decision_fraction;
      }
      prov["parameters"] = {{"mode", to_string(mode)}, {"trials", ablate_trials},
                            {"campaigns", ablate_campaigns}};
      prov["results"] = res;
      files.json(prov);
      if (h.total() > 0) files.svg(h, std::string("ablation ") + to_string(mode));
      out << "mode=" << to_string(mode) << " " << distribution_line(d) << "\n";
      return kOk;
    }

    if (sub == sweep) {
      const auto rows =
          radius_first_iteration_sweep(sweep_radii, sweep_trials, sim.trial, common.seed,
                                       common.threads);
      CsvTable t({"radius", "trials", "fraction_first_21", "ci_half_width"});
      Json jr = Json::array();
      std::vector<double> xs, ys;
      for (const auto& row : rows) {
        t.add_row({format_real(row.radius), std::to_string(row.trials),
                   format_fixed(row.fraction_first_21), format_fixed(row.ci_half_width)});
        jr.push_back({{"radius", row.radius}, {"fraction_first_21", row.fraction_first_21}});
        xs.push_back(row.radius);
        ys.push_back(row.fraction_first_21);
      }
      files.csv(t);
      const double rho = rows.size() >= 2 ? spearman_correlation(xs, ys) : std::nan("");
      prov["results"] = {{"rows", jr}, {"spearman", std::isnan(rho) ? Json(nullptr) : Json(rho)}};
      files.json(prov);
      out << "radii=" << rows.size() << " spearman=" << fixed3(rho) << "\n";
      return kOk;
    }

    if (sub == grid) {
      grid_spec.seed = common.seed;
      const GridResult g = radius_budget_grid(grid_spec, sim.trial, common.threads);
      CsvTable t({"radius", "budget", "success_fraction", "ci_half_width", "campaigns"});
      for (std::size_t i = 0; i < g.radii.size(); ++i) {
        for (std::size_t b = 0; b < g.budgets.size(); ++b) {
          const double s = g.success[i][b];
          t.add_row({format_real(g.radii[i]), std::to_string(g.budgets[b]), format_fixed(s),
                     format_fixed(binomial_ci_half_width(s, g.campaigns_per_cell)),
                     std::to_string(g.campaigns_per_cell)});
        }
      }
      files.csv(t);
      prov["parameters"] = {{"radii", grid_spec.radii}, {"budgets", grid_spec.budgets},
                            {"campaigns_per_cell", grid_spec.campaigns_per_cell}};
      prov["results"] = {{"success", g.success},
                         {"budget_range", g.budget_range()},
                         {"radius_range", g.radius_range()}};
      files.json(prov);
      out << "budget_range=" << fixed3(g.budget_range())
          << " radius_range=" << fixed3(g.radius_range()) << "\n";
      return kOk;
    }

    if (sub == cf) {
      const auto [x, exact] = parse_cf_value(cf_value);
      const CFExpansion e = exact ? cf_expand(*exact, cf_terms) : cf_expand(x, cf_terms, cf_tolerance);
      const auto conv = convergents(e.quotients);
      CsvTable t({"term", "quotient", "convergent"});
      for (std::size_t i = 0; i < e.quotients.size(); ++i) {
        t.add_row({std::to_string(i), std::to_string(e.quotients[i]), conv[i].to_string()});
      }
      files.csv(t);
      const Rational last = conv.back();
      // The estimate treats the expanded value as pi/3.
      const double pi = pi_estimate(last);
      prov["parameters"] = {{"value", cf_value}, {"terms", cf_terms}, {"tolerance", cf_tolerance}};
      prov["results"] = {{"quotients", e.quotients}, {"exact", e.exact},
                         {"convergent", last.to_string()}, {"pi_estimate", pi}};
      files.json(prov);
      out << "quotients=" << quotient_list(e.quotients) << " convergent=" << last.to_string()
          << " pi=" << format_fixed(pi, 7) << "\n";
      return kOk;
    }

    if (sub == recip) {
      try {
        recip_cfg.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError("recip", e.what());
      }
      const auto curve = reciprocal_peak_curve(recip_cfg, Rng(common.seed), common.threads);
      CsvTable t({"denominator_stdev", "peak_location", "central_mean", "central_fraction"});
      Json rows = Json::array();
      for (const auto& p : curve) {
        t.add_row({format_real(p.denominator_stdev), format_fixed(p.peak_location),
                   format_fixed(p.central_mean, 9), format_fixed(p.central_fraction, 9)});
        rows.push_back({{"denominator_stdev", p.denominator_stdev},
                        {"peak_location", p.peak_location},
                        {"central_mean", p.central_mean},
                        {"central_fraction", p.central_fraction}});
      }
      files.csv(t);
      prov["parameters"] = {{"numerator_mean", recip_cfg.numerator_mean},
                            {"numerator_stdev", recip_cfg.numerator_stdev},
                            {"denominator_mean", recip_cfg.denominator_mean},
                            {"denominator_stdevs", recip_cfg.denominator_stdevs},
                            {"samples_per_point", recip_cfg.samples_per_point},
                            {"bin_width", recip_cfg.bin_width}};
      prov["results"] = rows;
      files.json(prov);
      out << "points=" << curve.size() << " peak_first=" << format_fixed(curve.front().peak_location, 4)
          << " peak_last=" << format_fixed(curve.back().peak_location, 4) << "\n";
      return kOk;
    }

    err << "error: unhandled subcommand " << name << "\n";
    return kInternalError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << "\n";
    return kConfigError;
  } catch (const CostCapExceeded& e) {
    err << "cost cap exceeded: " << e.what() << "\n";
    return kCostCapExceeded;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kInternalError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("pimetro");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace pimetro::cli
