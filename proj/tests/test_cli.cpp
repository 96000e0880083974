#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tailchain/cli.hpp"

using namespace tailchain;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch() {
  const auto dir = std::filesystem::temp_directory_path() / "tailchain_cli_test";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string simulated(const std::string& process, const std::string& steps) {
  const auto path = (scratch() / (process + ".csv")).string();
  REQUIRE(cli({"simulate", "--process", process, "--steps", steps, "--seed", "5", "--output", path}).code == 0);
  return path;
}

}  // namespace

TEST_CASE("gamma2 report carries the interface fields") {
  const auto path = simulated("gaussian_walk", "60");
  const auto r = cli({"gamma2", "--input", path, "--rho", "0.25", "--seed", "7", "--iterations", "100"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  for (const char* key : {"gamma2", "weights", "method", "n", "rho", "seed", "config"}) CHECK(doc.contains(key));
  CHECK(doc["n"] == 61);
  CHECK(doc["rho"] == 0.25);
  CHECK(doc["seed"] == 7);
  CHECK(doc["config"]["rho"] == "0.25");
  CHECK_FALSE(doc["config"].contains("threads"));
}

TEST_CASE("exit codes") {
  CHECK(cli({}).code == exit_usage_error);
  CHECK(cli({"gamma2", "--input", "x.csv", "--no-such-flag"}).code == exit_usage_error);
  CHECK(cli({"frobnicate"}).code == exit_usage_error);
  CHECK(cli({"gamma2", "--input", "/nonexistent.csv"}).code == exit_data_error);
  CHECK(cli({"study", "--name", "nope"}).code == exit_usage_error);
  CHECK(cli({"bound", "--alpha", "1", "--c-rho", "1.5"}).code == exit_usage_error);
  CHECK(cli({"--help"}).code == exit_ok);

  const auto bad = scratch() / "ragged.csv";
  std::ofstream(bad) << "1,2\n3\n";
  const auto r = cli({"gamma2", "--input", bad.string()});
  CHECK(r.code == exit_data_error);
  CHECK(r.err.find("line 2") != std::string::npos);
}

TEST_CASE("config files merge under explicit flags") {
  const auto path = simulated("stable_levy_walk", "80");
  const auto cfg = scratch() / "g.cfg";
  std::ofstream(cfg) << "# comment\ninput = " << path << "\nrho = 0.5\niterations = 50\nseed = 3\n";
  const auto a = nlohmann::json::parse(cli({"gamma2", "--config", cfg.string()}).out);
  CHECK(a["rho"] == 0.5);
  CHECK(a["seed"] == 3);
  const auto b = nlohmann::json::parse(cli({"gamma2", "--config", cfg.string(), "--rho", "2"}).out);
  CHECK(b["rho"] == 2.0);

  std::ofstream(scratch() / "bad.cfg") << "input = " << path << "\nbogus = 1\n";
  CHECK(cli({"gamma2", "--config", (scratch() / "bad.cfg").string()}).code == exit_usage_error);
}

TEST_CASE("saved config reproduces the report byte for byte") {
  const auto path = simulated("beta_prime_walk", "120");
  const auto cfg = (scratch() / "an.cfg").string();
  const auto first = cli({"analyze", "--input", path, "--iterations", "80", "--save-config", cfg});
  REQUIRE(first.code == 0);
  const auto again = cli({"analyze", "--config", cfg, "--threads", "3"});
  REQUIRE(again.code == 0);
  CHECK(first.out == again.out);
}

TEST_CASE("analyze bundles every estimator and reports failures inline") {
  const auto path = simulated("gaussian_walk", "30");
  const auto r = cli({"analyze", "--input", path, "--iterations", "50"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["window"] == 200);
  CHECK(doc["rho"] == 0.25);
  CHECK(doc["block_size"] == 10);
  CHECK(doc["gamma2"].contains("gamma2"));
  // 30 increments are too few for the reciprocal fit or the stable index.
  CHECK(doc["reciprocal_tail_fit"].contains("error"));
  CHECK(doc["stable_index"].contains("error"));
}

TEST_CASE("curve subcommands write two-column CSV") {
  const auto path = simulated("gaussian_walk", "300");
  for (const std::string sub : {"ballmass", "cover"}) {
    const auto curve = scratch() / (sub + ".csv");
    const auto r = cli({sub, "--input", path, "--r-max", "5", "--rho", "5", "--curve", curve.string()});
    REQUIRE(r.code == 0);
    const auto text = slurp(curve);
    CHECK(text.rfind("r,", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 101);
  }
  const auto curve = scratch() / "k.csv";
  REQUIRE(cli({"kfunction", "--input", path, "--r-max", "5", "--curve", curve.string()}).code == 0);
  CHECK(slurp(curve).rfind("r,k\n", 0) == 0);
}

TEST_CASE("tail-fit and stable-index") {
  const auto path = simulated("stable_levy_walk", "3000");
  const auto tf = cli({"tail-fit", "--input", path});
  REQUIRE(tf.code == 0);
  CHECK(nlohmann::json::parse(tf.out).contains("alpha_survival"));
  const auto si = cli({"stable-index", "--input", path, "--blocks", "0;1"});
  REQUIRE(si.code == 0);
  CHECK(nlohmann::json::parse(si.out)["per_block"].size() == 2);
  CHECK(cli({"stable-index", "--input", path, "--blocks", "0;x"}).code == exit_usage_error);
}

TEST_CASE("study subcommand writes its report") {
  const auto dir = scratch() / "study";
  std::filesystem::remove_all(dir);
  const auto r = cli({"study", "--name", "exponent_comparison", "--replicates", "2", "--steps", "200", "--out-dir",
                      dir.string()});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(slurp(dir / "exponent_comparison.json"));
  CHECK(doc["runtime_seconds"].is_null());
  CHECK(doc["config"]["replicates"] == "2");
  CHECK(doc["spec"]["replicates"] == 2);
}
