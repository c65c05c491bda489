#include <doctest.h>

#include <unistd.h>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "pklap/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pklap::cli;

namespace {

// Fresh scratch directory per test case, removed afterwards.
struct Scratch {
  fs::path dir;
  Scratch() {
    static int counter = 0;
    dir = fs::temp_directory_path() / ("pklap_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(dir);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
  std::string write(const std::string& name, const json& doc) const {
    std::ofstream(path(name)) << doc.dump();
    return path(name);
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "pklap");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

json base_config(int m, const std::string& builtin) {
  return {{"m", m}, {"n", 1}, {"p", std::vector<double>(m, 2.0)}, {"lambda", 1.0},
          {"nonlinearity", {{"builtin", builtin}}}, {"seed", 7}};
}

json power_config(int m, double p, double s) {
  json cfg = base_config(m, "power");
  cfg["p"] = std::vector<double>(m, p);
  cfg["nonlinearity"]["params"] = {{"a", 1}, {"b", 1}, {"s", s}, {"r", s}};
  return cfg;
}

}  // namespace

TEST_CASE("doubles round-trip through the output format") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> mantissa(-1.0, 1.0);
  std::uniform_int_distribution<int> exponent(-300, 300);
  for (int i = 0; i < 2000; ++i) {
    const double x = std::ldexp(mantissa(rng), exponent(rng));
    const std::string s = format_double(x);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == x);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("schema violations are rejected before computing") {
  json ok = base_config(3, "example2");
  CHECK_NOTHROW(parse_config(ok));

  json bad = ok;
  bad["p"] = {0.5, 2.0, 2.0};
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = ok;
  bad["p"] = {2.0, 2.0};
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = ok;
  bad["lambda"] = -1.0;
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = ok;
  bad.erase("lambda");
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = ok;
  bad["n"] = 2;
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = ok;
  bad["colour"] = "blue";
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = ok;
  bad["nonlinearity"]["builtin"] = "example9";
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = ok;
  bad["solver"] = {{"startz", 3}};
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = ok;
  bad["solver"] = {{"starts", 0}};
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = ok;
  bad["solver"] = {{"subspace", "Q"}};
  CHECK_THROWS_AS(parse_config(bad), ConfigError);

  // parameter problems surface from the builder
  CHECK_THROWS_AS(build_builtin(parse_config(base_config(3, "example1"))), ConfigError);
  json neg = power_config(2, 2.0, 2.0);
  neg["nonlinearity"]["params"]["a"] = -1;
  CHECK_THROWS_AS(build_builtin(parse_config(neg)), ConfigError);

  const ProblemConfig parsed = parse_config(power_config(2, 3.0, 4.0));
  CHECK(parsed.p == std::vector<double>{3.0, 3.0});
  CHECK(parsed.seed == 7);
}

TEST_CASE("check routes the examples") {
  Scratch s;
  const std::string report = s.path("report.json");
  REQUIRE(run_cli({"check", s.write("ex2.json", base_config(3, "example2")), "-o", report}) == kSuccess);
  json doc = json::parse(slurp(report));
  CHECK(doc["p_minus"] == 2.0);
  CHECK(doc["p_plus"] == 2.0);
  CHECK(doc["routing"][0]["result"] == "Case I (s⁻=3 > p⁺=2), any λ>0");
  CHECK(doc["routing"][0]["hypotheses_hold_on_samples"] == true);

  REQUIRE(run_cli({"check", s.write("pw.json", power_config(2, 2.0, 2.0)), "-o", report}) == kSuccess);
  doc = json::parse(slurp(report));
  CHECK(doc["routing"][0]["result"] == "corollary, λ ∈ (λ3, +∞)");
  CHECK(doc["routing"][0]["lambda_interval"][0] == 2.0);
  CHECK(doc["thresholds"]["lambda3"] == 2.0);

  json bad = base_config(2, "example3");
  bad["p"] = {0.5, 2.0};
  CHECK(run_cli({"check", s.write("bad.json", bad), "-o", report}) == kInvalidInput);
  CHECK(run_cli({"check", s.path("missing.json")}) == kInvalidInput);
  std::ofstream(s.path("broken.json")) << "{\"m\": 3,";
  CHECK(run_cli({"check", s.path("broken.json")}) == kInvalidInput);
}

TEST_CASE("solve writes values and summary, deterministically") {
  Scratch s;
  const std::string config = s.write("ex2.json", base_config(3, "example2"));
  const std::vector<std::string> flags{"--values", s.path("a.csv"), "--summary", s.path("a.json"), "--starts", "16"};
  std::vector<std::string> args{"solve", config};
  args.insert(args.end(), flags.begin(), flags.end());
  REQUIRE(run_cli(args) == kSuccess);
  REQUIRE(run_cli({"solve", config, "--values", s.path("b.csv"), "--summary", s.path("b.json"), "--starts", "16"}) ==
          kSuccess);
  CHECK(slurp(s.path("a.csv")) == slurp(s.path("b.csv")));
  CHECK(slurp(s.path("a.json")) == slurp(s.path("b.json")));

  const std::string csv = slurp(s.path("a.csv"));
  CHECK(csv.rfind("solution_id,k,component,value\n", 0) == 0);
  const json summary = json::parse(slurp(s.path("a.json")));
  CHECK(summary["solution_count"].get<int>() >= 3);
  for (const json& sol : summary["solutions"]) {
    CHECK(sol.contains("J_m"));
    CHECK(sol.contains("morse_index"));
    CHECK(sol.contains("classification"));
    CHECK(sol.contains("in_Y"));
    CHECK(sol.contains("method"));
  }
  // no leftover temporaries
  for (const auto& entry : fs::directory_iterator(s.dir)) CHECK(entry.path().extension() != ".tmp");

  // a different seed may change the set, the format stays
  CHECK(run_cli({"solve", config, "--seed", "99", "--values", s.path("c.csv"), "--summary", s.path("c.json")}) ==
        kSuccess);
}

TEST_CASE("solve exit codes") {
  Scratch s;
  const json zero = [] {
    json c = power_config(3, 2.0, 2.0);
    c["nonlinearity"]["params"]["a"] = 0;
    c["nonlinearity"]["params"]["b"] = 0;
    return c;
  }();
  REQUIRE(run_cli({"solve", s.write("zero.json", zero), "--values", s.path("z.csv"), "--summary", s.path("z.json")}) ==
          kSuccess);
  const json summary = json::parse(slurp(s.path("z.json")));
  REQUIRE(summary["solution_count"] == 1);
  CHECK(summary["solutions"][0]["norm"] == 0.0);

  json hard = base_config(3, "example2");
  hard["solver"] = {{"starts", 1}, {"max_iterations", 1}, {"test_zero", false}, {"mountain_pass", false}};
  CHECK(run_cli({"solve", s.write("hard.json", hard), "--values", s.path("h.csv"), "--summary", s.path("h.json")}) ==
        kFailed);

  json sub = base_config(3, "example2");
  sub["p"] = {1.5, 2.0, 2.0};
  CHECK(run_cli({"solve", s.write("sub.json", sub), "--values", s.path("s.csv"), "--summary", s.path("s.json")}) ==
        kInvalidInput);
  CHECK(run_cli({"solve", s.write("t.json", base_config(3, "example2")), "--tol", "-1"}) == kInvalidInput);
}

TEST_CASE("sweep") {
  Scratch s;
  json cfg = base_config(2, "example3");
  cfg["solver"] = {{"subspace", "Y"}, {"starts", 8}};
  const std::string config = s.write("ex3.json", cfg);
  CHECK(run_cli({"sweep", config, "--lambda-min", "2", "--lambda-max", "1", "--steps", "3"}) == kInvalidInput);
  CHECK(run_cli({"sweep", config, "--lambda-min", "1", "--lambda-max", "2", "--steps", "0"}) == kInvalidInput);
  CHECK(run_cli({"sweep", config, "--lambda-min", "1"}) == kInvalidInput);

  REQUIRE(run_cli({"sweep", config, "--lambda-min", "0.5", "--lambda-max", "8", "--steps", "1", "-o", s.path("one.csv")}) ==
          kSuccess);
  std::istringstream one(slurp(s.path("one.csv")));
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(one, line)) {
    if (!line.empty() && line[0] != '#') rows.push_back(line);
  }
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "lambda,count,nontrivial_count,min_J_m");
  CHECK(rows[1].rfind("0.5,", 0) == 0);

  REQUIRE(run_cli({"sweep", config, "--lambda-min", "0.5", "--lambda-max", "8", "--steps", "5", "-o", s.path("s.csv")}) ==
          kSuccess);
  const std::string text = slurp(s.path("s.csv"));
  CHECK(text.find("# A_estimate: [") != std::string::npos);
}

TEST_CASE("gradcheck") {
  Scratch s;
  json ex1 = base_config(4, "example1");
  CHECK(run_cli({"gradcheck", s.write("ex1.json", ex1), "--points", "100", "-o", s.path("g.json")}) == kSuccess);
  CHECK(json::parse(slurp(s.path("g.json")))["passed"] == true);
  CHECK(run_cli({"gradcheck", s.write("pw.json", power_config(2, 3.0, 4.0)), "-o", s.path("p.json")}) == kSuccess);

  CHECK(run_cli({"gradcheck", s.path("ex1.json"), "--corrupt-derivative", "-o", s.path("bad.json")}) == kFailed);
  const json bad = json::parse(slurp(s.path("bad.json")));
  CHECK(bad["passed"] == false);
  CHECK(bad["worst"]["point"].size() == 4);
  CHECK(run_cli({"gradcheck", s.path("ex1.json"), "--points", "0"}) == kInvalidInput);
}

TEST_CASE("help and unknown commands") {
  CHECK(run_cli({"--help"}) == kSuccess);
  CHECK(run_cli({"frobnicate"}) == kInvalidInput);
  CHECK(run_cli({}) == kInvalidInput);
}

TEST_CASE("the shipped configurations parse") {
  const char* dir = std::getenv("PKLAP_CONFIG_DIR");
  if (!dir) return;
  for (const char* name : {"example1.json", "example2.json", "example3.json", "power.json"}) {
    CAPTURE(name);
    const ProblemConfig cfg = load_config((fs::path(dir) / name).string());
    CHECK_NOTHROW(build_builtin(cfg));
  }
}
