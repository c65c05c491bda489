#pragma once

// Built-in scalar (n = 1) nonlinearities with their hypothesis constants.

#include <optional>
#include <string>

#include "pklap/analysis.hpp"
#include "pklap/core.hpp"

namespace pklap {

struct Builtin {
  std::string name;
  Nonlinearity nonlinearity;
  std::optional<GrowthProfile> growth;
  std::optional<BoundProfile> bounds;
};

/// cos²(kπ/m), exactly 0 at 2k = m (mod 2m) and exactly 1 at k = 0 (mod m).
double cos_squared_pi_ratio(long long k, int m);
/// |sin(kπ/m)|, exactly 0 at k = 0 (mod m) and exactly 1 at 2k = m (mod 2m).
double abs_sin_pi_ratio(long long k, int m);

/// F(k,t1,t2) = t1⁴ + t2⁴ + (-1)^k sin(t1⁴ + t2⁴), with the closed-form
///   f = 4 t2³ (2 + (-1)^k (cos(t1⁴ + t2⁴) - cos(t2⁴ + t3⁴))).
/// Profile: M = 1, η = 1/2, α1 = α2 = 1, α3 = -1, s = r = 4 (k even) / 2 (k odd).
/// Requires even m.
Builtin make_example1(int m);

/// F(k,t1,t2) = cos²(kπ/m) |t1 t2|⁴, with the closed-form
///   f = 4 t2³ (cos²((k-1)π/m) t3⁴ + cos²(kπ/m) t1⁴).
/// Profile: M = 2^{1/4}, α1 = α2 = cos²(kπ/m), α3 = 0, s = r = sin(kπ/m) + 3.
/// For even m, α_i(m/2) = 0 and the profile is flagged by check_growth.
Builtin make_example2(int m);

/// F(k,u1,u2) = -sin(u1² + u2²) |sin(kπ/m)|.
/// Bounds: C = 1, ρ1 = 0.5, ρ2 = sqrt(π/2) + 0.1, ρ3 = sqrt(π) - 0.1; the
/// sign conditions are re-checked by sampling at construction and a
/// violation throws std::logic_error.
Builtin make_example3(int m);

/// F(k,u1,u2) = a |u1|^{s(k)} + b |u2|^{r(k)}, a, b >= 0, s, r >= 2.
/// Profile: α1 = a, α2 = b, α3 = 0, M = 1, η = 1.
Builtin make_power(int m, double a, double b, const PeriodicFunction& s, const PeriodicFunction& r);

/// Dispatch by name: example1, example2, example3 (power needs parameters).
Builtin make_builtin(const std::string& name, int m);

}  // namespace pklap
