#pragma once

// Reference formulas written out independently of the library: scalar
// loops over plain vectors, no shared helpers. Tests compare the library
// against these rather than against itself.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

using Rhs = std::function<double(int k, double t1, double t2, double t3)>;

inline double phi(double a, double p) {
  if (a == 0.0) return 0.0;
  return std::pow(std::abs(a), p - 2.0) * a;
}

/// Printed closed form of f for the first example.
inline double example1_f(int k, double t1, double t2, double t3) {
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  const double a = std::pow(t1, 4) + std::pow(t2, 4);
  const double b = std::pow(t2, 4) + std::pow(t3, 4);
  return 4.0 * std::pow(t2, 3) * (2.0 + sign * (std::cos(a) - std::cos(b)));
}

/// Printed closed form of f for the second example with period m.
inline Rhs example2_f(int m) {
  return [m](int k, double t1, double t2, double t3) {
    const double c_prev = std::pow(std::cos((k - 1) * kPi / m), 2);
    const double c_here = std::pow(std::cos(k * kPi / m), 2);
    return 4.0 * std::pow(t2, 3) * (c_prev * std::pow(t3, 4) + c_here * std::pow(t1, 4));
  };
}

/// f for the third example, differentiated by hand:
/// F = -sin(u1^2 + u2^2) |sin(kπ/m)|.
inline Rhs example3_f(int m) {
  return [m](int k, double t1, double t2, double t3) {
    const double w_prev = std::abs(std::sin((k - 1) * kPi / m));
    const double w_here = std::abs(std::sin(k * kPi / m));
    return -2.0 * t2 * (w_prev * std::cos(t2 * t2 + t3 * t3) + w_here * std::cos(t1 * t1 + t2 * t2));
  };
}

/// Residual of the scalar periodic problem at k = 1..m:
///   phi_{p(k)}(u(k+1)-u(k)) - phi_{p(k-1)}(u(k)-u(k-1)) + λ f(k, u(k+1), u(k), u(k-1)).
/// p and u hold one period, index 0 is k = 1.
inline std::vector<double> residual(const std::vector<double>& u, const std::vector<double>& p, double lambda,
                                    const Rhs& f) {
  const int m = static_cast<int>(u.size());
  auto at = [&](const std::vector<double>& v, int k) { return v[((k - 1) % m + m) % m]; };
  std::vector<double> out(m);
  for (int k = 1; k <= m; ++k) {
    const double forward = phi(at(u, k + 1) - at(u, k), at(p, k));
    const double backward = phi(at(u, k) - at(u, k - 1), at(p, k - 1));
    out[k - 1] = forward - backward + lambda * f(k, at(u, k + 1), at(u, k), at(u, k - 1));
  }
  return out;
}

inline double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace oracle
