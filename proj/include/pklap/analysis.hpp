#pragma once

// Numerical checks of the hypotheses behind the multiplicity results:
// norm inequalities, the constant ξ, the λ thresholds, growth and sign
// conditions on F, (anti-)coercivity probes, (B.2)/(B.3) and a sampled λ*.
//
// Every verdict obtained by sampling is evidence, not proof: a condition
// that survives the samples is reported as holds_on_samples.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pklap/core.hpp"

namespace pklap {

/// Constants of the growth conditions (A.4)-(A.6):
///   F(k,u1,u2) >= α1(k)|u1|^{s(k)} + α2(k)|u2|^{r(k)} + α3(k)  for |u1|,|u2| >= M,
///   F >= 0 on |u1| + |u2| <= 2η.
struct GrowthProfile {
  PeriodicFunction s;
  PeriodicFunction r;
  PeriodicFunction alpha1;
  PeriodicFunction alpha2;
  PeriodicFunction alpha3;
  double M = 1.0;
  double eta = 0.5;

  /// Validates s, r >= 2, α1, α2 >= 0, M >= 1, η > 0 and a common period.
  GrowthProfile(PeriodicFunction s, PeriodicFunction r, PeriodicFunction alpha1,
                PeriodicFunction alpha2, PeriodicFunction alpha3, double M, double eta);

  double s_minus() const { return s.min(); }
  double s_plus() const { return s.max(); }
  double r_minus() const { return r.min(); }
  double r_plus() const { return r.max(); }
  double alpha1_minus() const { return alpha1.min(); }
  double alpha2_minus() const { return alpha2.min(); }
  double alpha3_minus() const { return alpha3.min(); }
  int period() const { return s.period(); }
  /// False when some α1(k) or α2(k) is zero (e.g. the second example with even m).
  bool alpha_positive() const { return alpha1.min() > 0.0 && alpha2.min() > 0.0; }
};

/// Constants of (A.7)-(A.9): F <= C everywhere, F < 0 on 0 < |u_i| <= ρ1,
/// F > 0 on ρ2 < |u_i| <= ρ3.
struct BoundProfile {
  double C = 0.0;
  double rho1 = 0.0;
  double rho2 = 0.0;
  double rho3 = 0.0;

  /// Validates ρ3 >= ρ2 > ρ1 > 0.
  BoundProfile(double C, double rho1, double rho2, double rho3);
};

struct Thresholds {
  double lambda1 = 0.0;  ///< +inf when α1⁻ = 0
  double lambda2 = 0.0;  ///< +inf when α2⁻ = 0
  double lambda3 = 0.0;  ///< +inf when α1⁻ + α2⁻ = 0
  double xi = 0.0;
  std::optional<double> r2;
};

enum class Verdict { holds_on_samples, violated, inconclusive };
std::string to_string(Verdict v);

/// A concrete point at which a condition was evaluated.
struct Witness {
  int k = 0;                  ///< period index, when relevant
  std::vector<double> point;  ///< flattened evaluation point
  double parameter = 0.0;     ///< exponent s or radius, when relevant
  double value = 0.0;         ///< signed slack at the point (negative = violated)
  std::string note;
};

struct CheckReport {
  std::string name;
  Verdict verdict = Verdict::inconclusive;
  std::optional<Witness> witness;
  long long samples = 0;
  double margin = 0.0;  ///< worst-case slack over the samples
  std::uint64_t seed = 0;
  std::string detail;
};

/// Slack used by the inequality checks: violated iff
/// margin < -1e-10 * max(1, |lhs|, |rhs|).
inline constexpr double kInequalitySlack = 1e-10;

/// Σ|u(k)|^s <= m ||u||^s  (s > 0)
CheckReport check_c1(const PeriodicSequence& u, double s);
/// Σ|u(k)|^s >= m^{(2-s)/2} ||u||^s  (s >= 2, else std::domain_error)
CheckReport check_c2(const PeriodicSequence& u, double s);
/// Σ|Δu(k-1)|^{p(k-1)} <= m (2^{p⁺} ||u||^{p⁺} + 1)
CheckReport check_c3(const PeriodicSequence& u, const ExponentFunction& p);

/// C.1, C.2 and C.3 over `samples` seeded random draws each. Sequences
/// have log-uniform scale in [1e-3, 1e3]; s is uniform in [1, 6] for C.1 and
/// [2, 6] for C.2. C.3 uses `p` when given, otherwise a fresh exponent with
/// values in [1, 4] per sample. The reported margin is the worst slack
/// divided by max(1, |lhs|, |rhs|).
std::vector<CheckReport> inequality_suite(int m, int n, int samples, std::uint64_t seed,
                                          const std::optional<ExponentFunction>& p = std::nullopt);

struct XiOptions {
  int starts = 32;
  double tolerance = 1e-10;
  int max_iterations = 20000;
  std::uint64_t seed = 7;
};

struct XiResult {
  double value = 0.0;                 ///< best minimum found
  bool converged = false;             ///< some start met the tolerance
  std::optional<double> closed_form;  ///< 2 - 2cos(2π/m) when p⁺ = 2
  int starts = 0;
};

/// min over {u in Y : ||u|| = 1} of Σ|Δu(k-1)|^{p⁺}, by multistart
/// projected gradient on the sphere.
XiResult xi_search(int m, int n, double p_plus, const XiOptions& options = {});
double xi_constant(int m, int n, double p_plus);

/// Smallest nonzero eigenvalue of the cycle-graph Laplacian on m vertices.
double cycle_laplacian_gap(int m);

/// λ1, λ2, λ3 by direct substitution, ξ from xi_constant, and
/// r2 = Σ (1/p(k-1)) (2ρ1)^{p(k-1)} when rho1 is given.
Thresholds thresholds(const Problem& prob, const GrowthProfile& g,
                      std::optional<double> rho1 = std::nullopt);

/// Σ (1/p(k-1)) (2ρ1)^{p(k-1)}
double r2_constant(const ExponentFunction& p, double rho1);

/// Point-wise slacks; the checks and witness replay share these.
double a4_slack(const Nonlinearity& nl, const GrowthProfile& g, int k, const Vec& u1, const Vec& u2);
double a5_slack(const Nonlinearity& nl, int k, const Vec& u1, const Vec& u2);
/// |F| / (|u1|^{e1} + |u2|^{e2})
double a6_quotient(const Nonlinearity& nl, int k, const Vec& u1, const Vec& u2, double e1, double e2);

/// One report per condition: A.4, A.5, A.6.1, A.6.2, A.6.3, plus
/// "alpha-positive" flagging α_i(k) = 0.
std::vector<CheckReport> check_growth(const Nonlinearity& nl, const GrowthProfile& g,
                                      int sample_budget, std::uint64_t seed = 1);

/// One report per condition: A.7, A.8, A.9.
///
/// A.8 / A.9 are tested over the whole period at each sampled (u1, u2):
/// F(k,u1,u2) must have the required sign (non-strict) for every k and the
/// strict sign for at least one k. This admits weights such as |sin(kπ/m)|
/// that vanish at k = m.
std::vector<CheckReport> check_bounds(const Nonlinearity& nl, const BoundProfile& b,
                                      int sample_budget, std::uint64_t seed = 1);

/// Signed slacks at one (u1, u2) evaluated over k = 1..m. Positive means the
/// condition holds at the point.
double a7_slack(const Nonlinearity& nl, const BoundProfile& b, int k, const Vec& u1, const Vec& u2);
double a8_slack(const Nonlinearity& nl, const Vec& u1, const Vec& u2);
double a9_slack(const Nonlinearity& nl, const Vec& u1, const Vec& u2);

struct ProbeOptions {
  int random_directions = 32;
  /// Also probe the cycle-Laplacian eigenbasis (the directions along which
  /// the Dirichlet part is extremal).
  bool include_modes = true;
  std::vector<double> radii{1.0, 10.0, 100.0, 1000.0};
  std::uint64_t seed = 1;
};

/// Values of J_m along t*d for the given radii; overflow becomes -inf.
std::vector<double> action_along_ray(const Problem& prob, const PeriodicSequence& direction,
                                     const std::vector<double>& radii);

/// True when J strictly decreases from the second radius on and
/// J(last) < J(first) - 1.
bool ray_decreases(const std::vector<double>& values);

CheckReport anticoercivity_probe(const Problem& prob, const ProbeOptions& options = {});

struct B2B3Options {
  double r = 0.0;
  double ball_radius = 10.0;
  int sample_budget = 20000;
  std::uint64_t seed = 1;
};

struct B2B3Report {
  CheckReport b2;
  CheckReport b3;
  double inf_global = 0.0;
  double inf_sublevel = 0.0;
  double inf_level = 0.0;
};

/// Monte-Carlo estimates of inf_Y J, inf_{mu<=r} J and inf_{mu=r} J with
/// x̃ = 0, where J = potential restricted to Y.
B2B3Report check_b2_b3(const Problem& prob, const B2B3Options& options);

/// Largest t with mu(t*d) <= r along a unit direction (bisection; mu is
/// nondecreasing along rays through 0). +inf if d is constant.
double sublevel_radius(const PeriodicSequence& direction, const ExponentFunction& p, double r);

struct LambdaStarCurve {
  double r = 0.0;
  long long samples = 0;
  double sup_term = 0.0;    ///< sampled sup of Σ F over {mu < r}
  double inner_inf = 0.0;   ///< sampled inf of the quotient
};

struct LambdaStarResult {
  double estimate = 0.0;  ///< may be +inf (1/0 read as +inf)
  double outer_inf = 0.0;
  std::vector<LambdaStarCurve> curves;
  std::uint64_t seed = 0;
};

/// Sampled estimate on Y of
///   λ* = ( inf_r inf_{mu(u)<r} [ sup_{mu<r} Ψ - Ψ(u) ] / (r - mu(u)) )^{-1},
/// with Ψ = Σ F(k, u(k+1), u(k)), so that J_m = mu - λΨ, and 1/0 = +inf.
///
/// For each r, every sample direction contributes a point on {mu = r}
/// (used only for the sup, which by continuity equals the sup over the open
/// sublevel) and one interior point (used for both). Sample i of grid entry j
/// is seeded by (seed, j, i), so doubling samples_per_r extends the sample
/// set and the sup term can only grow. Both sampled extrema are biased; the
/// per-r curves are returned for inspection.
LambdaStarResult lambda_star_estimate(const Problem& prob, const std::vector<double>& r_grid,
                                      int samples_per_r, std::uint64_t seed);

}  // namespace pklap
