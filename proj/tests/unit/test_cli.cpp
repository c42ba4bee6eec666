#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "cli.hpp"

namespace fs = std::filesystem;
using mfsg::ExperimentConfig;
using mfsg::json;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / ("mfsg-cli-test-" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Runs the installed driver with stdout/stderr discarded; returns its exit status.
int drive(const std::string& args) {
  const char* bin = std::getenv("MFSG_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "MFSG_BIN is not set");
  const int status = std::system((std::string(bin) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("git blob hash of known contents") {
  CHECK(mfsg::git_blob_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  CHECK(mfsg::git_blob_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST_CASE("config text round trip and rejection") {
  for (const std::string& cmd : mfsg::commands()) {
    ExperimentConfig c;
    c.command = cmd;
    c.seed = 18446744073709551615ULL;
    c.repetitions = 3;
    c.out = "some/dir";
    c.params = mfsg::default_params(cmd);
    const ExperimentConfig back = ExperimentConfig::from_text(c.to_text());
    CHECK(back.to_text() == c.to_text());
    CHECK(back.seed == c.seed);
  }
  const auto c = ExperimentConfig::from_text(R"({"command":"iamp","delta":0.05,"n":100})");
  CHECK(c.params["delta"].get<double>() == 0.05);
  CHECK(c.params["xi"] == "0.5:2");
  // Integers are accepted for real-valued keys and stored as reals.
  CHECK(ExperimentConfig::from_text(R"({"command":"bp","scale":2})").params["scale"].is_number_float());

  using mf::Error;
  CHECK_THROWS_AS(ExperimentConfig::from_text(R"({"command":"iamp","deltaa":0.1})"), Error);
  CHECK_THROWS_AS(ExperimentConfig::from_text(R"({"command":"iamp","n":"4000"})"), Error);
  CHECK_THROWS_AS(ExperimentConfig::from_text(R"({"command":"iamp","n":1.5})"), Error);
  CHECK_THROWS_AS(ExperimentConfig::from_text(R"({"command":"iamp","seed":-1})"), Error);
  CHECK_THROWS_AS(ExperimentConfig::from_text(R"({"command":"iamp","seeds":0})"), Error);
  CHECK_THROWS_AS(ExperimentConfig::from_text(R"({"command":"nope"})"), Error);
  CHECK_THROWS_AS(ExperimentConfig::from_text(R"({"n":3})"), Error);
  CHECK_THROWS_AS(ExperimentConfig::from_text("[1,2]"), Error);
  CHECK_THROWS_AS(ExperimentConfig::from_text("{"), Error);
}

TEST_CASE("error kinds map to exit codes") {
  using mf::ErrorKind;
  CHECK(mfsg::exit_code_for(ErrorKind::usage) == 2);
  CHECK(mfsg::exit_code_for(ErrorKind::invalid_input) == 2);
  CHECK(mfsg::exit_code_for(ErrorKind::resource_limit) == 3);
  CHECK(mfsg::exit_code_for(ErrorKind::numeric) == 4);
  CHECK(mfsg::exit_code_for(ErrorKind::diverged) == 4);
}

TEST_CASE("oracle on a fixed 2x2 matrix") {
  // H(σ)/n = ¼(σᵀAσ) with A = [[0.5,-2],[-2,1]]: max is ¼(1.5 + 4) at σ1 = -σ2.
  const fs::path m = scratch() / "a.txt";
  std::ofstream(m) << "0.5 -2\n-2 1\n";
  const fs::path out = scratch() / "oracle";
  REQUIRE(drive("oracle --n 2 --matrix " + m.string() + " --beta 1,2,4 --out " + out.string()) == 0);
  const json report = json::parse(slurp(out / "report.json"));
  CHECK(report["aggregate"]["opt"]["mean"].get<double>() == doctest::Approx(1.375));
  CHECK(report["extra"]["argmax_rep0"] == json({-1, 1}));
  CHECK(report["config"]["matrix"] == m.string());
  CHECK(report["input_hash"].get<std::string>().size() == 40);
  CHECK(fs::exists(out / "metrics.csv"));

  // The embedded config reproduces the run.
  const fs::path again = scratch() / "oracle-again";
  json cfg = json::parse(slurp(out / "config.json"));
  cfg["out"] = again.string();
  std::ofstream(scratch() / "cfg.json") << cfg.dump();
  REQUIRE(drive("oracle --config " + (scratch() / "cfg.json").string()) == 0);
  CHECK(slurp(again / "metrics.csv") == slurp(out / "metrics.csv"));
}

TEST_CASE("parisi spherical quadratic prints the closed form") {
  const fs::path out = scratch() / "parisi";
  REQUIRE(drive("parisi --boundary spherical --xi 0.5:2 --out " + out.string()) == 0);
  const json report = json::parse(slurp(out / "report.json"));
  CHECK(report["summary"].get<std::string>().rfind("P = 1.000000", 0) == 0);
  CHECK(report["aggregate"]["value"].get<double>() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("exit codes of the driver") {
  const std::string out = " --out " + (scratch() / "codes").string();
  CHECK(drive("--version") == 0);
  CHECK(drive("") == 2);
  CHECK(drive("frobnicate") == 2);
  CHECK(drive("oracle --bogus 1" + out) == 2);
  CHECK(drive("oracle --n two" + out) == 2);
  CHECK(drive("parisi --boundary hyperbolic" + out) == 2);
  CHECK(drive("oracle --n 23 --beta 1" + out) == 3);
  CHECK(drive("bp --tree-n 8 --max-iters 1 --tol 0" + out) == 4);
  CHECK(drive("bp --tree-n 8" + out) == 0);
}

TEST_CASE("identical configs give byte-identical metric CSVs") {
  for (const std::string args : {"bp --tree-n 9 --seeds 3 --seed 5", "spiked --n 300 --steps 4 --seeds 2",
                                 "amp-se --n 500 --steps 4 --mc 2000 --seeds 2"}) {
    const fs::path a = scratch() / "rep-a", b = scratch() / "rep-b";
    fs::remove_all(a);
    fs::remove_all(b);
    REQUIRE(drive(std::string(args) + " --out " + a.string()) == 0);
    REQUIRE(setenv("MEANFIELD_THREADS", "3", 1) == 0);
    REQUIRE(drive(std::string(args) + " --out " + b.string()) == 0);
    unsetenv("MEANFIELD_THREADS");
    for (const auto& entry : fs::directory_iterator(a))
      if (entry.path().extension() == ".csv") CHECK_MESSAGE(slurp(entry.path()) == slurp(b / entry.path().filename()), args);
  }
}
