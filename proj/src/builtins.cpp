#include "pklap/builtins.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pklap {

namespace {

constexpr double kPi = std::numbers::pi;

double sign_of_power(int k) { return (k % 2 == 0) ? 1.0 : -1.0; }

Vec scalar(double x) { return Vec::Constant(1, x); }

void require_scalar(const Vec& u1, const Vec& u2) {
  if (u1.size() != 1 || u2.size() != 1) {
    throw std::invalid_argument("built-in nonlinearities are defined for n = 1 only");
  }
}

}  // namespace

double cos_squared_pi_ratio(long long k, int m) {
  const long long r = ((k % (2LL * m)) + 2LL * m) % (2LL * m);
  if (r % m == 0) return 1.0;
  if (2 * r == m || 2 * r == 3LL * m) return 0.0;
  const double c = std::cos(kPi * static_cast<double>(r) / m);
  return c * c;
}

double abs_sin_pi_ratio(long long k, int m) {
  const long long r = ((k % (2LL * m)) + 2LL * m) % (2LL * m);
  if (r % m == 0) return 0.0;
  if (2 * r == m || 2 * r == 3LL * m) return 1.0;
  return std::abs(std::sin(kPi * static_cast<double>(r) / m));
}

Builtin make_example1(int m) {
  if (m < 2 || m % 2 != 0) throw std::invalid_argument("example1: m must be even and >= 2");
  auto F = [](int k, const Vec& u1, const Vec& u2) {
    require_scalar(u1, u2);
    const double q = std::pow(u1[0], 4) + std::pow(u2[0], 4);
    return q + sign_of_power(k) * std::sin(q);
  };
  auto dF_du1 = [](int k, const Vec& u1, const Vec& u2) {
    const double q = std::pow(u1[0], 4) + std::pow(u2[0], 4);
    return scalar(4.0 * std::pow(u1[0], 3) * (1.0 + sign_of_power(k) * std::cos(q)));
  };
  auto dF_du2 = [](int k, const Vec& u1, const Vec& u2) {
    const double q = std::pow(u1[0], 4) + std::pow(u2[0], 4);
    return scalar(4.0 * std::pow(u2[0], 3) * (1.0 + sign_of_power(k) * std::cos(q)));
  };
  auto f = [](int k, const Vec& t1, const Vec& t2, const Vec& t3) {
    const double a = std::pow(std::abs(t1[0]), 4) + std::pow(std::abs(t2[0]), 4);
    const double b = std::pow(std::abs(t2[0]), 4) + std::pow(std::abs(t3[0]), 4);
    return scalar(4.0 * std::pow(t2[0], 3) * (2.0 + sign_of_power(k) * (std::cos(a) - std::cos(b))));
  };
  Nonlinearity::Options options;
  options.f_direct = f;
  Nonlinearity nl(m, 1, F, dF_du1, dF_du2, std::move(options));

  auto alternating = PeriodicFunction::generate(m, [](int k) { return k % 2 == 0 ? 4.0 : 2.0; });
  GrowthProfile profile(alternating, alternating, PeriodicFunction::constant(m, 1.0),
                        PeriodicFunction::constant(m, 1.0), PeriodicFunction::constant(m, -1.0),
                        1.0, 0.5);
  return Builtin{"example1", std::move(nl), std::move(profile), std::nullopt};
}

Builtin make_example2(int m) {
  if (m < 2) throw std::invalid_argument("example2: m must be >= 2");
  auto F = [m](int k, const Vec& u1, const Vec& u2) {
    require_scalar(u1, u2);
    return cos_squared_pi_ratio(k, m) * std::pow(std::abs(u1[0] * u2[0]), 4);
  };
  auto dF_du1 = [m](int k, const Vec& u1, const Vec& u2) {
    return scalar(4.0 * cos_squared_pi_ratio(k, m) * std::pow(u1[0], 3) * std::pow(u2[0], 4));
  };
  auto dF_du2 = [m](int k, const Vec& u1, const Vec& u2) {
    return scalar(4.0 * cos_squared_pi_ratio(k, m) * std::pow(u1[0], 4) * std::pow(u2[0], 3));
  };
  auto f = [m](int k, const Vec& t1, const Vec& t2, const Vec& t3) {
    return scalar(4.0 * std::pow(t2[0], 3) *
                  (cos_squared_pi_ratio(k - 1, m) * std::pow(t3[0], 4) +
                   cos_squared_pi_ratio(k, m) * std::pow(t1[0], 4)));
  };
  Nonlinearity::Options options;
  options.f_direct = f;
  Nonlinearity nl(m, 1, F, dF_du1, dF_du2, std::move(options));

  auto exponent = PeriodicFunction::generate(m, [m](int k) {
    return (k % m == 0 ? 0.0 : std::sin(kPi * k / m)) + 3.0;
  });
  auto alpha = PeriodicFunction::generate(m, [m](int k) { return cos_squared_pi_ratio(k, m); });
  GrowthProfile profile(exponent, exponent, alpha, alpha, PeriodicFunction::constant(m, 0.0),
                        std::pow(2.0, 0.25), 0.5);
  return Builtin{"example2", std::move(nl), std::move(profile), std::nullopt};
}

Builtin make_example3(int m) {
  if (m < 2) throw std::invalid_argument("example3: m must be >= 2");
  auto F = [m](int k, const Vec& u1, const Vec& u2) {
    require_scalar(u1, u2);
    return -std::sin(u1[0] * u1[0] + u2[0] * u2[0]) * abs_sin_pi_ratio(k, m);
  };
  auto dF_du1 = [m](int k, const Vec& u1, const Vec& u2) {
    return scalar(-2.0 * u1[0] * std::cos(u1[0] * u1[0] + u2[0] * u2[0]) * abs_sin_pi_ratio(k, m));
  };
  auto dF_du2 = [m](int k, const Vec& u1, const Vec& u2) {
    return scalar(-2.0 * u2[0] * std::cos(u1[0] * u1[0] + u2[0] * u2[0]) * abs_sin_pi_ratio(k, m));
  };
  Nonlinearity nl(m, 1, F, dF_du1, dF_du2);
  BoundProfile bounds(1.0, 0.5, std::sqrt(kPi / 2.0) + 0.1, std::sqrt(kPi) - 0.1);

  for (const CheckReport& rep : check_bounds(nl, bounds, 1000, 0xE3)) {
    if (rep.verdict != Verdict::holds_on_samples) {
      throw std::logic_error("example3: bound profile fails " + rep.name);
    }
  }
  return Builtin{"example3", std::move(nl), std::nullopt, std::move(bounds)};
}

Builtin make_power(int m, double a, double b, const PeriodicFunction& s, const PeriodicFunction& r) {
  if (!(a >= 0.0) || !(b >= 0.0)) throw std::invalid_argument("power: a, b must be >= 0");
  if (s.period() != m || r.period() != m) throw std::invalid_argument("power: s, r must have period m");
  if (s.min() < 2.0 || r.min() < 2.0) throw std::invalid_argument("power: s, r must be >= 2");
  auto F = [a, b, s, r](int k, const Vec& u1, const Vec& u2) {
    return a * std::pow(u1.norm(), s(k)) + b * std::pow(u2.norm(), r(k));
  };
  // ∇ |u|^e = e |u|^{e-2} u, which is 0 at u = 0 for e >= 2.
  auto grad_power = [](const Vec& u, double e) -> Vec {
    const double norm = u.norm();
    if (norm == 0.0) return Vec::Zero(u.size());
    return e * std::pow(norm, e - 2.0) * u;
  };
  auto dF_du1 = [a, s, grad_power](int k, const Vec& u1, const Vec&) -> Vec {
    return a * grad_power(u1, s(k));
  };
  auto dF_du2 = [b, r, grad_power](int k, const Vec&, const Vec& u2) -> Vec {
    return b * grad_power(u2, r(k));
  };
  Nonlinearity::Options options;
  options.identically_zero = (a == 0.0 && b == 0.0);
  // n is fixed to 1 for the built-in; the callables themselves are dimension-agnostic.
  Nonlinearity nl(m, 1, F, dF_du1, dF_du2, std::move(options));
  GrowthProfile profile(s, r, PeriodicFunction::constant(m, a), PeriodicFunction::constant(m, b),
                        PeriodicFunction::constant(m, 0.0), 1.0, 1.0);
  return Builtin{"power", std::move(nl), std::move(profile), std::nullopt};
}

Builtin make_builtin(const std::string& name, int m) {
  if (name == "example1") return make_example1(m);
  if (name == "example2") return make_example2(m);
  if (name == "example3") return make_example3(m);
  throw std::invalid_argument("unknown built-in '" + name + "'");
}

}  // namespace pklap
