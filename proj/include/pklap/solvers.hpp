#pragma once

// Searches for several critical points of J_m: multistart Newton on the
// gradient, deflation, subspace-restricted minimization, a string-method
// mountain pass and λ sweeps with warm starts.
//
// Everything runs sequentially. Each random start draws from its own
// counter-seeded generator, so a fixed (problem, config) always yields the
// same SolutionSet.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pklap/core.hpp"
#include "pklap/subspace.hpp"

namespace pklap {

struct SolverConfig {
  int starts = 16;
  int max_iterations = 100;
  double residual_tol = 1e-10;
  double dedupe_tol = 1e-6;  ///< relative: distinct iff ||u - v|| > tol * max(1, ||u||)
  double deflation_power = 2.0;
  double deflation_shift = 1.0;
  /// Required > 0 when some p(k) < 2.
  double regularization_eps = 0.0;
  std::uint64_t seed = 0;
  double start_radius = 3.0;
  /// Where Newton iterates and random starts live. The full residual is
  /// always what decides convergence.
  Subspace subspace = Subspace::full;
  int max_deflation_rounds = 8;
  bool mountain_pass = true;
  /// Evaluate u = 0 directly before any Newton start. Every built-in has
  /// f(k,0,0,0) = 0, so turning this off is the only way to let a search
  /// come back empty.
  bool test_zero = true;
  int path_points = 21;
  int path_iterations = 4000;
  /// Climbing-image gradient norm at which the path hands over to Newton.
  double handoff_tol = 1e-4;
  /// Verify post hoc that -u solves whenever u does (F even in (u1, u2)).
  bool check_symmetry = false;

  /// Throws std::invalid_argument on a non-positive tolerance or count.
  void validate() const;
};

enum class Method { newton, deflated, mountain_pass, subspace_min };
std::string to_string(Method m);

struct Provenance {
  int start_index = 0;  ///< -1 for the direct test of u = 0
  Method method = Method::newton;
  bool warm_start = false;
};

struct SolveResult {
  bool converged = false;
  SolutionRecord record;  ///< best iterate when not converged
  int iterations = 0;
  std::string message;
  /// The gradient restricted to cfg.subspace vanished but the full
  /// residual did not.
  bool subspace_critical = false;
};

struct SolutionSet {
  std::vector<SolutionRecord> records;  ///< sorted by J_m
  std::vector<Provenance> provenance;   ///< parallel to records
  /// Subspace-critical points that fail the full residual test.
  std::vector<SolutionRecord> discrepancies;
  bool symmetry_checked = false;
  /// Indices of records whose negation does not verify.
  std::vector<int> symmetry_failures;
  int attempts = 0;
  int failures = 0;
};

/// Relative distance test used for deduplication. When collapse_constants is
/// set (F == 0), sequences differing by a constant are identified.
bool is_distinct(const PeriodicSequence& a, const PeriodicSequence& b, double tol,
                 bool collapse_constants = false);

/// Identification used by the solution pool: a and b are the same solution
/// when they are not distinct in the relative metric, or when the points at
/// 1/4, 1/2 and 3/4 of the segment between them all solve to residual_tol.
/// The second rule merges the continuum of numerical roots that a
/// degenerate solution (such as u = 0 when F vanishes to high order) drags
/// along its flat directions.
bool same_solution(const Problem& prob, const PeriodicSequence& a, const PeriodicSequence& b,
                   const SolverConfig& cfg);

/// Builds the full record at u: residual, action, Morse summary, Y membership.
SolutionRecord make_record(const PeriodicSequence& u, const Problem& prob);

/// Damped Newton on the gradient with a finite-difference Jacobian. When
/// some p(k) < 2, iterates on the ε-regularized gradient with ε halved over
/// several stages, then polishes at ε = 0 if min|Δu| > 10ε.
SolveResult newton_solve(const Problem& prob, const PeriodicSequence& u0, const SolverConfig& cfg);

/// Deflation factor Π_i (||u - u_i||^{-q} + σ).
double deflation_factor(const PeriodicSequence& u, const std::vector<PeriodicSequence>& known,
                        double power, double shift);

/// Newton on M(u) * gradient(u), M the deflation factor of `known`. The
/// reported residual is the undeflated one.
SolveResult deflated_solve(const Problem& prob, const SolutionSet& known,
                           const PeriodicSequence& u0, const SolverConfig& cfg);

enum class Objective { action, negated_action, mu_plus_lambda_potential, mu };
std::string to_string(Objective o);

struct MinimizeResult {
  SolveResult solve;  ///< record carries the J_m residual at the minimizer
  double objective_value = 0.0;
  double projected_gradient_norm = 0.0;
};

/// BFGS on the subspace followed by a Newton polish of the objective's
/// projected gradient. Divergence beyond 1e6 * start_radius is reported as a
/// non-coercive objective.
MinimizeResult minimize(const Problem& prob, Subspace subspace, Objective objective,
                        const SolverConfig& cfg,
                        const std::optional<PeriodicSequence>& start = std::nullopt);

/// Climbing-image string between two points, then Newton from the path
/// maximum. Throws std::invalid_argument when u_a == u_b.
SolveResult mountain_pass(const Problem& prob, const PeriodicSequence& u_a,
                          const PeriodicSequence& u_b, const SolverConfig& cfg);

/// Zero test, multistart Newton, deflation rounds, optional mountain pass,
/// then dedupe and sort by J_m. Warm starts are tried before random ones.
SolutionSet find_multiple(const Problem& prob, const SolverConfig& cfg,
                          const std::vector<PeriodicSequence>& warm_starts = {});

/// Indices of records u for which -u fails the residual test.
std::vector<int> odd_symmetry_failures(const Problem& prob, const SolutionSet& set, double tol);

struct LambdaInterval {
  double lo = 0.0;
  double hi = 0.0;
};

struct SweepResult {
  std::vector<double> lambda_grid;
  std::vector<int> counts;
  std::vector<int> nontrivial_counts;
  std::vector<double> min_action;  ///< NaN when nothing converged
  std::vector<LambdaInterval> A_estimate;
  std::vector<std::string> failures;  ///< empty string when the λ ran cleanly
  std::vector<SolutionSet> sets;
};

/// Geometric grid of `steps` points from lo to hi (a single point lo when
/// steps == 1).
std::vector<double> geometric_grid(double lo, double hi, int steps);

/// find_multiple at each λ, warm-started from the previous λ's solutions.
/// A_estimate joins maximal runs of grid points with count >= 3.
SweepResult lambda_sweep(const Problem& prob_template, const std::vector<double>& lambda_grid,
                         const SolverConfig& cfg);

}  // namespace pklap
