#pragma once

// Batch front end: configuration loading, the four subcommands and their
// output files. Commands return process exit codes:
//   0 success, 1 invalid input, 2 contract not met, 3 internal error.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pklap/analysis.hpp"
#include "pklap/builtins.hpp"
#include "pklap/solvers.hpp"

namespace pklap::cli {

enum ExitCode : int { kSuccess = 0, kInvalidInput = 1, kFailed = 2, kInternal = 3 };

/// Schema violation in a configuration file or flag.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LambdaStarSettings {
  std::vector<double> r_grid;
  int samples = 200;
};

struct ProblemConfig {
  int m = 0;
  int n = 1;
  std::vector<double> p;
  double lambda = 0.0;
  std::string builtin;
  nlohmann::json params = nlohmann::json::object();
  SolverConfig solver;
  std::uint64_t seed = 0;
  std::optional<LambdaStarSettings> lambda_star;
};

/// Validates the whole document before anything is computed.
ProblemConfig parse_config(const nlohmann::json& doc);
/// Reads and parses a file; I/O and JSON syntax errors become ConfigError.
ProblemConfig load_config(const std::string& path);

/// Builds the built-in named in the configuration. Parameter errors are
/// reported as ConfigError.
Builtin build_builtin(const ProblemConfig& cfg);
Problem build_problem(const ProblemConfig& cfg, const Builtin& builtin);

/// Shortest decimal string that parses back to the same double; "inf",
/// "-inf" and "nan" for non-finite values.
std::string format_double(double x);

/// Writes through a temporary file in the same directory, then renames.
void write_atomic(const std::string& path, const std::string& contents);

/// Same nonlinearity with dF/du1 scaled by 1.01, for negative controls.
Nonlinearity corrupt_derivative(const Nonlinearity& nl);

/// Routing of a configuration to the applicable multiplicity results.
struct Route {
  std::string result;    ///< e.g. "Case I (s⁻=3 > p⁺=2), any λ>0"
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;  ///< +inf for open-ended intervals
  bool lambda_in_range = false;
  bool hypotheses_hold_on_samples = false;
  std::string note;
};

std::vector<Route> route(const ProblemConfig& cfg, const Builtin& builtin,
                         const std::vector<CheckReport>& growth, const std::vector<CheckReport>& bounds,
                         const std::optional<Thresholds>& thresholds);

struct CheckOptions {
  std::string output = "check_report.json";
};
struct SolveOptions {
  std::string values_output = "solutions.csv";
  std::string summary_output = "summary.json";
  std::optional<double> tol;
  std::optional<int> starts;
  std::optional<std::uint64_t> seed;
};
struct SweepOptions {
  std::string output = "sweep.csv";
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  int steps = 0;
};
struct GradcheckOptions {
  std::string output = "gradcheck.json";
  int points = 100;
  double step = 1e-6;
  bool corrupt = false;
};

int cmd_check(const std::string& config_path, const CheckOptions& opt);
int cmd_solve(const std::string& config_path, const SolveOptions& opt);
int cmd_sweep(const std::string& config_path, const SweepOptions& opt);
int cmd_gradcheck(const std::string& config_path, const GradcheckOptions& opt);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv);

}  // namespace pklap::cli
