#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli_app.hpp"
#include "pimetro/experiments.hpp"
#include "pimetro/report.hpp"

namespace fs = std::filesystem;
using pimetro::cli::run;

namespace {

struct Output {
  int code;
  std::string out;
  std::string err;
};

Output invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "pimetro_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Every file under `dir`, keyed by name.
std::map<std::string, std::string> files_in(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) files[e.path().filename().string()] = slurp(e.path());
  return files;
}

struct GoldenCase {
  std::string name;
  std::vector<std::string> args;
};

const std::vector<GoldenCase>& golden_cases() {
  static const std::vector<GoldenCase> cases{
      {"campaign", {"campaign", "--seed", "7"}},
      {"success", {"success", "--campaigns", "40", "--seed", "9"}},
      {"budget", {"budget", "--budget", "10,30", "--campaigns", "50", "--seed", "2"}},
      {"ablate", {"ablate", "--mode", "random-only", "--trials", "500", "--campaigns", "20"}},
      {"sweep_radius", {"sweep-radius", "--radii", "100,300,450", "--trials", "300"}},
      {"grid", {"grid", "--radii", "300,450", "--budgets", "10,20", "--campaigns", "20"}},
      {"cf", {"cf", "--value", "pi/3", "--terms", "3"}},
      {"recip", {"recip", "--stdevs", "0,0.2", "--samples", "20000"}},
  };
  return cases;
}

}  // namespace

TEST_CASE("trial prints json") {
  const Output o = invoke({"trial", "--seed", "1", "--radius", "450"});
  REQUIRE(o.code == 0);
  const auto j = nlohmann::json::parse(o.out);
  for (const char* key : {"first_quotient", "second_quotient", "c_minus_six_r", "remainder_piece",
                          "seed", "config_digest"}) {
    CHECK(j.contains(key));
  }
  const Output z = invoke({"trial", "--zero-errors"});
  REQUIRE(z.code == 0);
  const auto jz = nlohmann::json::parse(z.out);
  CHECK(jz["first_quotient"] == 21);
  CHECK(jz["second_quotient"] == 5);
}

TEST_CASE("exit codes") {
  const Output bad_radius = invoke({"trial", "--radius", "-5"});
  CHECK(bad_radius.code == 2);
  CHECK(bad_radius.err.find("radius") != std::string::npos);
  CHECK(invoke({"trial", "--no-such-flag"}).code == 2);
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"cf", "--value", "seven"}).code == 2);
  CHECK(invoke({"ablate", "--mode", "sideways"}).code == 2);
  CHECK(invoke({"success", "--formats", "pdf"}).code == 2);
  CHECK(invoke({"grid", "--cost-cap", "10"}).code == 3);
  CHECK(invoke({"trial", "--config", "/nonexistent/pimetro.conf"}).code == 2);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("config file and flag precedence on the command line") {
  const fs::path dir = scratch("config");
  {
    std::ofstream f(dir / "run.conf");
    f << "radius = 300\nrandom_errors_enabled = false\n";
  }
  const std::string conf = (dir / "run.conf").string();
  const auto file_only = nlohmann::json::parse(invoke({"trial", "--config", conf}).out);
  const auto with_flag =
      nlohmann::json::parse(invoke({"trial", "--config", conf, "--radius", "600"}).out);
  const double c6_300 = file_only["c_minus_six_r"];
  const double c6_600 = with_flag["c_minus_six_r"];
  CHECK(c6_300 == doctest::Approx(2 * 3.14159265358979 * 300 - 1800 + 0.0285 + 0.285));
  CHECK(c6_600 == doctest::Approx(2 * 3.14159265358979 * 600 - 3600 + 0.0285 + 0.285));

  {
    std::ofstream f(dir / "bad.conf");
    f << "colour = red\n";
  }
  const Output bad = invoke({"trial", "--config", (dir / "bad.conf").string()});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("colour") != std::string::npos);
}

TEST_CASE("summary lines") {
  const fs::path dir = scratch("summary");
  const Output cf = invoke({"cf", "--value", "pi/3", "--terms", "3", "--out", dir.string()});
  CHECK(cf.out == "quotients=[1,21,5] convergent=111/106 pi=3.1415094\n");
  const Output ab = invoke({"ablate", "--mode", "fixed-only", "--trials", "1000", "--out", dir.string()});
  CHECK(ab.out == "mode=fixed-only {7: 1.000}\n");
}

TEST_CASE("success summary matches the library") {
  const fs::path dir = scratch("success");
  const Output o = invoke({"success", "--campaigns", "50", "--seed", "9", "--out", dir.string()});
  REQUIRE(o.code == 0);
  const pimetro::SuccessSummary s = pimetro::success_probability(pimetro::SimulationConfig{}, 50, 9);
  std::ostringstream expected;
  expected << "success=" << pimetro::format_fixed(s.success_fraction, 3)
           << " mean_measurements=" << pimetro::format_fixed(s.mean_measurements, 1)
           << " no_decision=" << pimetro::format_fixed(s.no_decision_fraction, 3) << "\n";
  CHECK(o.out == expected.str());
  CHECK(fs::exists(dir / "success.csv"));
  CHECK(fs::exists(dir / "success_campaigns.csv"));
  const auto j = nlohmann::json::parse(slurp(dir / "success.json"));
  CHECK(j["seed"] == 9);
  CHECK(j["tool_version"] == pimetro::cli::kToolVersion);
  CHECK(j["config_digest"] == pimetro::config_digest(pimetro::SimulationConfig{}));
  CHECK(j["config"]["radius"] == "450");
}

TEST_CASE("format selection") {
  const fs::path dir = scratch("formats");
  REQUIRE(invoke({"campaign", "--formats", "csv", "--out", dir.string()}).code == 0);
  const auto files = files_in(dir);
  CHECK(files.size() == 1);
  CHECK(files.contains("campaign.csv"));
}

TEST_CASE("output directory from the environment") {
  const fs::path dir = scratch("env");
  ::setenv(pimetro::cli::kOutDirEnv, dir.string().c_str(), 1);
  const Output o = invoke({"cf"});
  ::unsetenv(pimetro::cli::kOutDirEnv);
  REQUIRE(o.code == 0);
  CHECK(fs::exists(dir / "cf.csv"));
}

TEST_CASE("golden outputs") {
  const fs::path golden_root = PIMETRO_GOLDEN_DIR;
  const bool update = std::getenv("PIMETRO_UPDATE_GOLDEN") != nullptr;
  for (const auto& c : golden_cases()) {
    CAPTURE(c.name);
    const fs::path dir = scratch("golden_" + c.name);
    auto args = c.args;
    args.insert(args.end(), {"--out", dir.string(), "--threads", "2"});
    const Output o = invoke(args);
    REQUIRE(o.code == 0);
    auto produced = files_in(dir);
    produced["stdout.txt"] = o.out;
    const fs::path gdir = golden_root / c.name;
    if (update) {
      fs::remove_all(gdir);
      fs::create_directories(gdir);
      for (const auto& [name, content] : produced) {
        std::ofstream(gdir / name, std::ios::binary) << content;
      }
      continue;
    }
    REQUIRE(fs::is_directory(gdir));
    const auto expected = files_in(gdir);
    CHECK(produced.size() == expected.size());
    for (const auto& [name, content] : expected) {
      CAPTURE(name);
      REQUIRE(produced.contains(name));
      CHECK(produced[name] == content);
    }
  }
}

TEST_CASE("outputs are identical across runs and thread counts") {
  for (const auto& c : golden_cases()) {
    CAPTURE(c.name);
    std::vector<std::map<std::string, std::string>> runs;
    for (const char* threads : {"1", "4", "4"}) {
      const fs::path dir = scratch("threads_" + c.name + "_" + std::to_string(runs.size()));
      auto args = c.args;
      args.insert(args.end(), {"--out", dir.string(), "--threads", threads});
      const Output o = invoke(args);
      REQUIRE(o.code == 0);
      auto files = files_in(dir);
      files["stdout.txt"] = o.out;
      runs.push_back(std::move(files));
    }
    CHECK(runs[0] == runs[1]);
    CHECK(runs[1] == runs[2]);
  }
}
