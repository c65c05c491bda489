#include "pklap/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "pklap/functional.hpp"
#include "pklap/operators.hpp"
#include "pklap/random.hpp"
#include "pklap/subspace.hpp"

namespace pklap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Streams for derive_seed; one per sampling loop.
enum Stream : std::uint64_t {
  kXiStart = 0x10,
  kA4 = 0x20,
  kA5,
  kA6,
  kA7 = 0x30,
  kA8,
  kA9,
  kProbe = 0x40,
  kB2Global = 0x50,
  kB2Sub,
  kB2Level,
  kLambdaStar = 0x60,
  kInequalities = 0x70,
};

std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

std::vector<double> concat(const Vec& a, const Vec& b) {
  std::vector<double> out = to_std(a);
  out.insert(out.end(), b.data(), b.data() + b.size());
  return out;
}

Vec random_unit(std::mt19937_64& rng, Eigen::Index dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec v(dim);
  do {
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = gauss(rng);
  } while (v.norm() == 0.0);
  return v.normalized();
}

CheckReport inequality_report(std::string name, double lhs, double rhs, double margin,
                              const PeriodicSequence& u, double parameter) {
  CheckReport rep;
  rep.name = std::move(name);
  rep.samples = 1;
  rep.margin = margin;
  const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
  if (margin < -kInequalitySlack * scale) {
    rep.verdict = Verdict::violated;
    rep.witness = Witness{0, to_std(u.flat()), parameter, margin, ""};
  } else {
    rep.verdict = Verdict::holds_on_samples;
  }
  std::ostringstream d;
  d.precision(17);
  d << "lhs=" << lhs << " rhs=" << rhs;
  rep.detail = d.str();
  return rep;
}

double sum_powers(const PeriodicSequence& u, double s) {
  double sum = 0.0;
  for (int k = 1; k <= u.period(); ++k) sum += std::pow(u.at(k).norm(), s);
  return sum;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::holds_on_samples: return "holds_on_samples";
    case Verdict::violated: return "violated";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

GrowthProfile::GrowthProfile(PeriodicFunction s_, PeriodicFunction r_, PeriodicFunction a1,
                             PeriodicFunction a2, PeriodicFunction a3, double M_, double eta_)
    : s(std::move(s_)),
      r(std::move(r_)),
      alpha1(std::move(a1)),
      alpha2(std::move(a2)),
      alpha3(std::move(a3)),
      M(M_),
      eta(eta_) {
  const int m = s.period();
  if (r.period() != m || alpha1.period() != m || alpha2.period() != m || alpha3.period() != m) {
    throw std::invalid_argument("GrowthProfile: all functions must share the period m");
  }
  if (s.min() < 2.0 || r.min() < 2.0) {
    throw std::invalid_argument("GrowthProfile: exponents s, r must be >= 2");
  }
  if (alpha1.min() < 0.0 || alpha2.min() < 0.0) {
    throw std::invalid_argument("GrowthProfile: alpha1, alpha2 must be nonnegative");
  }
  if (!(M >= 1.0)) throw std::invalid_argument("GrowthProfile: M must be >= 1");
  if (!(eta > 0.0)) throw std::invalid_argument("GrowthProfile: eta must be positive");
}

BoundProfile::BoundProfile(double C_, double rho1_, double rho2_, double rho3_)
    : C(C_), rho1(rho1_), rho2(rho2_), rho3(rho3_) {
  if (!(rho1 > 0.0 && rho2 > rho1 && rho3 >= rho2)) {
    throw std::invalid_argument("BoundProfile: need rho3 >= rho2 > rho1 > 0");
  }
}

// (C.1)-(C.3)

namespace {

struct Sides {
  double lhs;
  double rhs;
  double margin;  // positive when the inequality holds
};

Sides c1_sides(const PeriodicSequence& u, double s) {
  if (!(s > 0.0)) throw std::domain_error("check_c1: s must be positive");
  const double lhs = sum_powers(u, s);
  const double rhs = u.period() * std::pow(euclidean_norm(u), s);
  return {lhs, rhs, rhs - lhs};
}

Sides c2_sides(const PeriodicSequence& u, double s) {
  if (!(s >= 2.0)) throw std::domain_error("check_c2: s must be >= 2");
  const double lhs = sum_powers(u, s);
  const double rhs =
      std::pow(static_cast<double>(u.period()), (2.0 - s) / 2.0) * std::pow(euclidean_norm(u), s);
  return {lhs, rhs, lhs - rhs};
}

Sides c3_sides(const PeriodicSequence& u, const ExponentFunction& p) {
  if (p.period() != u.period()) throw std::invalid_argument("check_c3: period mismatch");
  double lhs = 0.0;
  for (int k = 1; k <= u.period(); ++k) lhs += std::pow((u.at(k) - u.at(k - 1)).norm(), p(k - 1));
  const double pp = p.p_plus();
  const double rhs = u.period() * (std::pow(2.0, pp) * std::pow(euclidean_norm(u), pp) + 1.0);
  return {lhs, rhs, rhs - lhs};
}

}  // namespace

CheckReport check_c1(const PeriodicSequence& u, double s) {
  const Sides c = c1_sides(u, s);
  return inequality_report("C.1", c.lhs, c.rhs, c.margin, u, s);
}

CheckReport check_c2(const PeriodicSequence& u, double s) {
  const Sides c = c2_sides(u, s);
  return inequality_report("C.2", c.lhs, c.rhs, c.margin, u, s);
}

CheckReport check_c3(const PeriodicSequence& u, const ExponentFunction& p) {
  const Sides c = c3_sides(u, p);
  return inequality_report("C.3", c.lhs, c.rhs, c.margin, u, p.p_plus());
}

std::vector<CheckReport> inequality_suite(int m, int n, int samples, std::uint64_t seed,
                                          const std::optional<ExponentFunction>& p) {
  if (samples < 1) throw std::invalid_argument("inequality_suite: samples must be >= 1");
  if (p && p->period() != m) throw std::invalid_argument("inequality_suite: period mismatch");
  std::vector<CheckReport> out;
  const char* names[3] = {"C.1", "C.2", "C.3"};
  for (int which = 0; which < 3; ++which) {
    CheckReport agg;
    agg.name = names[which];
    agg.verdict = Verdict::holds_on_samples;
    agg.seed = seed;
    agg.samples = samples;
    agg.margin = kInf;
    for (int i = 0; i < samples; ++i) {
      auto rng = make_rng(seed, kInequalities + which, static_cast<std::uint64_t>(i));
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      const double scale = std::pow(10.0, -3.0 + 6.0 * unit(rng));
      const PeriodicSequence u(m, n, random_unit(rng, Eigen::Index{m} * n) * scale);
      double parameter = 0.0;
      Sides c{};
      if (which == 0) {
        parameter = 1.0 + 5.0 * unit(rng);
        c = c1_sides(u, parameter);
      } else if (which == 1) {
        parameter = 2.0 + 4.0 * unit(rng);
        c = c2_sides(u, parameter);
      } else {
        const ExponentFunction q =
            p ? *p
              : ExponentFunction(
                    PeriodicFunction::generate(m, [&](int) { return 1.0 + 3.0 * unit(rng); }).values());
        parameter = q.p_plus();
        c = c3_sides(u, q);
      }
      const double relative = c.margin / std::max({1.0, std::abs(c.lhs), std::abs(c.rhs)});
      agg.margin = std::min(agg.margin, relative);
      if (relative < -kInequalitySlack && agg.verdict != Verdict::violated) {
        agg.verdict = Verdict::violated;
        agg.witness = Witness{0, to_std(u.flat()), parameter, c.margin, "sample " + std::to_string(i)};
      }
    }
    out.push_back(std::move(agg));
  }
  return out;
}

// ξ

double cycle_laplacian_gap(int m) {
  if (m < 2) throw std::invalid_argument("cycle_laplacian_gap: m must be >= 2");
  return 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi / m);
}

namespace {

struct SphereObjective {
  int m, n;
  double p;
  ExponentFunction exponent;

  double value(const Vec& u) const {
    double sum = 0.0;
    for (int k = 0; k < m; ++k) {
      const int next = (k + 1) % m;
      sum += std::pow((u.segment(next * n, n) - u.segment(k * n, n)).norm(), p);
    }
    return sum;
  }

  // ∇ Σ|Δu|^p = -p * Δ(φ_p(Δu)); zero-mean by telescoping.
  Vec grad(const Vec& u) const {
    return -p * p_laplacian(PeriodicSequence(m, n, u), exponent).flat();
  }
};

struct SphereResult {
  double value;
  bool converged;
};

SphereResult minimize_on_sphere(const SphereObjective& obj, Vec u, const XiOptions& opt) {
  u.normalize();
  double value = obj.value(u);
  double step = 0.1;
  for (int it = 0; it < opt.max_iterations; ++it) {
    const Vec g = obj.grad(u);
    const Vec tangent = g - g.dot(u) * u;
    const double tnorm = tangent.norm();
    if (tnorm <= opt.tolerance * std::max(1.0, value)) return {value, true};
    // Armijo backtracking along the retraction u - a*t, normalized.
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      Vec trial = u - step * tangent;
      // Stay in Y despite rounding drift.
      trial -= PeriodicSequence::constant(obj.m, period_mean(PeriodicSequence(obj.m, obj.n, trial))).flat();
      trial.normalize();
      const double tv = obj.value(trial);
      if (tv <= value - 1e-4 * step * tnorm * tnorm) {
        u = std::move(trial);
        value = tv;
        accepted = true;
        step *= 2.0;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return {value, tnorm <= 1e3 * opt.tolerance * std::max(1.0, value)};
  }
  return {value, false};
}

}  // namespace

XiResult xi_search(int m, int n, double p_plus, const XiOptions& options) {
  if (m < 2 || n < 1) throw std::invalid_argument("xi_search: need m >= 2, n >= 1");
  if (!(p_plus >= 1.0)) throw std::invalid_argument("xi_search: p_plus must be >= 1");
  SphereObjective obj{m, n, p_plus, ExponentFunction::constant(m, p_plus)};
  const Mat basis = subspace_basis(Subspace::Y, m, n);
  XiResult out;
  out.value = kInf;
  out.starts = options.starts;
  for (int s = 0; s < options.starts; ++s) {
    auto rng = make_rng(options.seed, kXiStart, static_cast<std::uint64_t>(s));
    const Vec start = basis * random_unit(rng, basis.cols());
    const SphereResult r = minimize_on_sphere(obj, start, options);
    if (r.value < out.value) out.value = r.value;
    out.converged = out.converged || r.converged;
  }
  if (p_plus == 2.0) out.closed_form = cycle_laplacian_gap(m);
  return out;
}

double xi_constant(int m, int n, double p_plus) { return xi_search(m, n, p_plus).value; }

Thresholds thresholds(const Problem& prob, const GrowthProfile& g, std::optional<double> rho1) {
  if (g.period() != prob.m()) throw std::invalid_argument("thresholds: period mismatch");
  const double m = prob.m();
  const double pp = prob.exponent().p_plus();
  const double pm = prob.exponent().p_minus();
  const double numerator = std::pow(2.0, pp) * std::pow(m, pp / 2.0);
  auto over = [&](double alpha) { return alpha > 0.0 ? numerator / (pm * alpha) : kInf; };
  Thresholds t;
  t.lambda1 = over(g.alpha1_minus());
  t.lambda2 = over(g.alpha2_minus());
  t.lambda3 = over(g.alpha1_minus() + g.alpha2_minus());
  t.xi = xi_constant(prob.m(), prob.n(), pp);
  if (rho1) t.r2 = r2_constant(prob.exponent(), *rho1);
  return t;
}

double r2_constant(const ExponentFunction& p, double rho1) {
  double r2 = 0.0;
  for (int k = 1; k <= p.period(); ++k) {
    const double pk = p(k - 1);
    r2 += std::pow(2.0 * rho1, pk) / pk;
  }
  return r2;
}

// (A.4)-(A.6)

double a4_slack(const Nonlinearity& nl, const GrowthProfile& g, int k, const Vec& u1, const Vec& u2) {
  const double bound = g.alpha1(k) * std::pow(u1.norm(), g.s(k)) +
                       g.alpha2(k) * std::pow(u2.norm(), g.r(k)) + g.alpha3(k);
  return nl.F(k, u1, u2) - bound;
}

double a5_slack(const Nonlinearity& nl, int k, const Vec& u1, const Vec& u2) {
  return nl.F(k, u1, u2);
}

double a6_quotient(const Nonlinearity& nl, int k, const Vec& u1, const Vec& u2, double e1, double e2) {
  const double denom = std::pow(u1.norm(), e1) + std::pow(u2.norm(), e2);
  if (denom == 0.0) return 0.0;
  return std::abs(nl.F(k, u1, u2)) / denom;
}

namespace {

struct Worst {
  double slack = kInf;
  Witness witness;
  bool violated = false;
};

CheckReport finish(std::string name, const Worst& w, long long samples, std::uint64_t seed,
                   std::string detail = {}) {
  CheckReport rep;
  rep.name = std::move(name);
  rep.samples = samples;
  rep.seed = seed;
  rep.margin = w.slack;
  rep.detail = std::move(detail);
  if (samples == 0) {
    rep.verdict = Verdict::inconclusive;
  } else if (w.violated) {
    rep.verdict = Verdict::violated;
    rep.witness = w.witness;
  } else {
    rep.verdict = Verdict::holds_on_samples;
  }
  return rep;
}

}  // namespace

std::vector<CheckReport> check_growth(const Nonlinearity& nl, const GrowthProfile& g,
                                      int sample_budget, std::uint64_t seed) {
  if (g.period() != nl.period()) throw std::invalid_argument("check_growth: period mismatch");
  if (sample_budget < 1000) throw std::invalid_argument("check_growth: sample_budget must be >= 1000");
  const int m = nl.period();
  const int n = nl.dim();
  std::vector<CheckReport> reports;

  {  // (A.4) on |u_i| in [M, M+10]
    Worst w;
    for (int i = 0; i < sample_budget; ++i) {
      auto rng = make_rng(seed, kA4, static_cast<std::uint64_t>(i));
      std::uniform_real_distribution<double> mag(g.M, g.M + 10.0);
      const int k = i % m + 1;
      const Vec u1 = mag(rng) * random_unit(rng, n);
      const Vec u2 = mag(rng) * random_unit(rng, n);
      // Relative slack: F and the bound both grow like |u|^s.
      const double rel = a4_slack(nl, g, k, u1, u2) / std::max(1.0, std::abs(nl.F(k, u1, u2)));
      if (rel < w.slack) {
        w.slack = rel;
        w.witness = Witness{k, concat(u1, u2), 0.0, rel, "relative slack"};
      }
      if (rel < -1e-9) w.violated = true;
    }
    reports.push_back(finish("A.4", w, sample_budget, seed, "margin is relative to max(1, |F|)"));
  }

  {  // (A.5) on |u1| + |u2| <= 2η
    Worst w;
    for (int i = 0; i < sample_budget; ++i) {
      auto rng = make_rng(seed, kA5, static_cast<std::uint64_t>(i));
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      const int k = i % m + 1;
      const double t = 2.0 * g.eta * unit(rng);
      const double theta = unit(rng);
      const Vec u1 = theta * t * random_unit(rng, n);
      const Vec u2 = (1.0 - theta) * t * random_unit(rng, n);
      const double slack = a5_slack(nl, k, u1, u2);
      if (slack < w.slack) {
        w.slack = slack;
        w.witness = Witness{k, concat(u1, u2), 0.0, slack, ""};
      }
      if (slack < -1e-12) w.violated = true;
    }
    reports.push_back(finish("A.5", w, sample_budget, seed));
  }

  // (A.6.x): sup of the quotient on shells |u1| + |u2| = 10^{-j}, j = 1..8.
  struct Limit {
    const char* name;
    double e1, e2;
  };
  const Limit limits[] = {{"A.6.1", g.s_plus(), g.r_minus()},
                          {"A.6.2", g.s_minus(), g.r_plus()},
                          {"A.6.3", g.s_minus(), g.r_minus()}};
  const int per_shell = std::max(3 * m, sample_budget / 8);
  for (const Limit& lim : limits) {
    std::vector<double> shell_max;
    Witness last_witness;
    for (int j = 1; j <= 8; ++j) {
      const double t = std::pow(10.0, -j);
      double qmax = 0.0;
      for (int i = 0; i < per_shell; ++i) {
        auto rng = make_rng(seed, kA6, static_cast<std::uint64_t>(j) * 1000003ULL + i);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const int k = i % m + 1;
        // Pin the two axes and the diagonal for every k, then random splits.
        const int pinned = i / m;
        const double theta = pinned == 0 ? 1.0 : pinned == 1 ? 0.0 : pinned == 2 ? 0.5 : unit(rng);
        const Vec u1 = theta * t * random_unit(rng, n);
        const Vec u2 = (1.0 - theta) * t * random_unit(rng, n);
        const double q = a6_quotient(nl, k, u1, u2, lim.e1, lim.e2);
        if (q > qmax || i == 0) {
          qmax = std::max(q, qmax);
          last_witness = Witness{k, concat(u1, u2), t, 1e-3 - q, "innermost shell quotient"};
        }
      }
      shell_max.push_back(qmax);
    }
    Worst w;
    w.slack = 1e-3 - shell_max.back();
    w.violated = !(shell_max.back() < 1e-3);
    w.witness = last_witness;
    std::ostringstream d;
    d.precision(6);
    d << "shell maxima:";
    for (double q : shell_max) d << ' ' << q;
    reports.push_back(finish(lim.name, w, static_cast<long long>(per_shell) * 8, seed, d.str()));
  }

  {  // α1(k), α2(k) > 0
    Worst w;
    w.slack = std::min(g.alpha1_minus(), g.alpha2_minus());
    if (!g.alpha_positive()) {
      w.violated = true;
      for (int k = 1; k <= m; ++k) {
        if (g.alpha1(k) <= 0.0 || g.alpha2(k) <= 0.0) {
          w.witness = Witness{k, {g.alpha1(k), g.alpha2(k)}, 0.0, std::min(g.alpha1(k), g.alpha2(k)),
                              "alpha_i(k) must be positive"};
          break;
        }
      }
    }
    reports.push_back(finish("alpha-positive", w, m, seed));
  }
  return reports;
}

// (A.7)-(A.9)

double a7_slack(const Nonlinearity& nl, const BoundProfile& b, int k, const Vec& u1, const Vec& u2) {
  return b.C - nl.F(k, u1, u2);
}

namespace {

std::pair<double, double> f_range(const Nonlinearity& nl, const Vec& u1, const Vec& u2) {
  double lo = kInf, hi = -kInf;
  for (int k = 1; k <= nl.period(); ++k) {
    const double v = nl.F(k, u1, u2);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

Vec sample_shell(std::mt19937_64& rng, int n, double lo, double hi) {
  // magnitude in (lo, hi]
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double mag = hi - (hi - lo) * unit(rng);
  return mag * random_unit(rng, n);
}

}  // namespace

double a8_slack(const Nonlinearity& nl, const Vec& u1, const Vec& u2) {
  const auto [lo, hi] = f_range(nl, u1, u2);
  return hi > 0.0 ? -hi : -lo;
}

double a9_slack(const Nonlinearity& nl, const Vec& u1, const Vec& u2) {
  const auto [lo, hi] = f_range(nl, u1, u2);
  return lo < 0.0 ? lo : hi;
}

std::vector<CheckReport> check_bounds(const Nonlinearity& nl, const BoundProfile& b,
                                      int sample_budget, std::uint64_t seed) {
  if (sample_budget < 1000) throw std::invalid_argument("check_bounds: sample_budget must be >= 1000");
  const int m = nl.period();
  const int n = nl.dim();
  std::vector<CheckReport> reports;

  {  // (A.7) on the box [-1e3, 1e3]^{2n}
    Worst w;
    const double tol = 1e-12 * std::max(1.0, std::abs(b.C));
    for (int i = 0; i < sample_budget; ++i) {
      auto rng = make_rng(seed, kA7, static_cast<std::uint64_t>(i));
      std::uniform_real_distribution<double> coord(-1e3, 1e3);
      const int k = i % m + 1;
      Vec u1(n), u2(n);
      for (int c = 0; c < n; ++c) u1[c] = coord(rng);
      for (int c = 0; c < n; ++c) u2[c] = coord(rng);
      const double slack = a7_slack(nl, b, k, u1, u2);
      if (slack < w.slack) {
        w.slack = slack;
        w.witness = Witness{k, concat(u1, u2), 0.0, slack, ""};
      }
      if (slack < -tol) w.violated = true;
    }
    reports.push_back(finish("A.7", w, sample_budget, seed));
  }

  auto sign_check = [&](const char* name, Stream stream, double lo, double hi, auto slack_fn) {
    Worst w;
    for (int i = 0; i < sample_budget; ++i) {
      auto rng = make_rng(seed, stream, static_cast<std::uint64_t>(i));
      const Vec u1 = sample_shell(rng, n, lo, hi);
      const Vec u2 = sample_shell(rng, n, lo, hi);
      const double slack = slack_fn(u1, u2);
      if (slack < w.slack) {
        w.slack = slack;
        w.witness = Witness{0, concat(u1, u2), 0.0, slack, "sign required for all k, strict for some k"};
      }
      if (!(slack > 0.0)) w.violated = true;
    }
    reports.push_back(finish(name, w, sample_budget, seed));
  };
  sign_check("A.8", kA8, 0.0, b.rho1,
             [&](const Vec& u1, const Vec& u2) { return a8_slack(nl, u1, u2); });
  sign_check("A.9", kA9, b.rho2, b.rho3,
             [&](const Vec& u1, const Vec& u2) { return a9_slack(nl, u1, u2); });
  return reports;
}

// Anti-coercivity

std::vector<double> action_along_ray(const Problem& prob, const PeriodicSequence& direction,
                                     const std::vector<double>& radii) {
  std::vector<double> values;
  values.reserve(radii.size());
  for (double t : radii) {
    double v;
    try {
      v = action(direction * t, prob);
    } catch (const EvaluationError&) {
      v = -kInf;
    } catch (const std::invalid_argument&) {
      // t*d overflowed to inf in some entry.
      v = -kInf;
    }
    if (std::isnan(v)) v = -kInf;
    values.push_back(v);
  }
  return values;
}

bool ray_decreases(const std::vector<double>& values) {
  if (values.size() < 2) return false;
  for (std::size_t i = 2; i < values.size(); ++i) {
    if (!(values[i] < values[i - 1]) && !(values[i] == -kInf)) return false;
  }
  return values.back() < values.front() - 1.0;
}

CheckReport anticoercivity_probe(const Problem& prob, const ProbeOptions& options) {
  const auto& radii = options.radii;
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] > radii[i - 1])) throw std::invalid_argument("anticoercivity_probe: radii must increase");
  }
  const int m = prob.m();
  const int n = prob.n();
  std::vector<Vec> directions;
  if (options.include_modes) {
    const Mat modes = fourier_modes(m, n);
    for (Eigen::Index c = 0; c < modes.cols(); ++c) directions.emplace_back(modes.col(c));
  }
  for (int i = 0; i < options.random_directions; ++i) {
    auto rng = make_rng(options.seed, kProbe, static_cast<std::uint64_t>(i));
    directions.push_back(random_unit(rng, static_cast<Eigen::Index>(m) * n));
  }

  Worst w;
  for (std::size_t i = 0; i < directions.size(); ++i) {
    const PeriodicSequence d(m, n, directions[i]);
    const std::vector<double> values = action_along_ray(prob, d, radii);
    const double drop = values.back() - (values.front() - 1.0);  // must be < 0
    const bool ok = ray_decreases(values);
    const double slack = ok ? -drop : std::min(-drop, 0.0);
    if (!ok && !w.violated) {
      w.violated = true;
      std::ostringstream note;
      note.precision(17);
      note << "J along ray:";
      for (double v : values) note << ' ' << v;
      w.witness = Witness{0, to_std(directions[i]), static_cast<double>(i), slack, note.str()};
    }
    w.slack = std::min(w.slack, slack);
  }
  CheckReport rep = finish("anti-coercivity", w, static_cast<long long>(directions.size()), options.seed);
  return rep;
}

// (B.2), (B.3)

double sublevel_radius(const PeriodicSequence& direction, const ExponentFunction& p, double r) {
  auto mu_at = [&](double t) { return mu(direction * t, p); };
  double hi = 1.0;
  while (mu_at(hi) <= r) {
    hi *= 2.0;
    if (hi > 1e12) return kInf;
  }
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mu_at(mid) <= r) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

B2B3Report check_b2_b3(const Problem& prob, const B2B3Options& options) {
  if (!(options.r > 0.0)) throw std::invalid_argument("check_b2_b3: r must be positive");
  const int m = prob.m();
  const int n = prob.n();
  const Mat basis = subspace_basis(Subspace::Y, m, n);
  const auto dimY = static_cast<double>(basis.cols());
  const int per_set = options.sample_budget / 3;
  const PeriodicSequence zero(m, n);

  B2B3Report out;
  out.inf_global = kInf;
  out.inf_sublevel = kInf;
  out.inf_level = kInf;
  Vec argmin_sub, argmin_level;

  for (int i = 0; i < per_set; ++i) {
    auto rng = make_rng(options.seed, kB2Global, static_cast<std::uint64_t>(i));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double t = options.ball_radius * std::pow(unit(rng), 1.0 / dimY);
    const PeriodicSequence u(m, n, t * (basis * random_unit(rng, basis.cols())));
    out.inf_global = std::min(out.inf_global, potential(u, prob));
  }
  for (int i = 0; i < per_set; ++i) {
    auto rng = make_rng(options.seed, kB2Sub, static_cast<std::uint64_t>(i));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const PeriodicSequence d(m, n, basis * random_unit(rng, basis.cols()));
    const double tmax = sublevel_radius(d, prob.exponent(), options.r);
    if (!std::isfinite(tmax)) continue;
    const PeriodicSequence u = d * (tmax * std::pow(unit(rng), 1.0 / dimY));
    const double v = potential(u, prob);
    if (v < out.inf_sublevel) {
      out.inf_sublevel = v;
      argmin_sub = u.flat();
    }
  }
  for (int i = 0; i < per_set; ++i) {
    auto rng = make_rng(options.seed, kB2Level, static_cast<std::uint64_t>(i));
    const PeriodicSequence d(m, n, basis * random_unit(rng, basis.cols()));
    const double tmax = sublevel_radius(d, prob.exponent(), options.r);
    if (!std::isfinite(tmax)) continue;
    const PeriodicSequence u = d * tmax;
    const double v = potential(u, prob);
    if (v < out.inf_level) {
      out.inf_level = v;
      argmin_level = u.flat();
    }
  }
  // x̃ = 0 belongs to the ball and to the sublevel set.
  const double j0 = potential(zero, prob);
  out.inf_global = std::min(out.inf_global, j0);
  if (j0 < out.inf_sublevel) {
    out.inf_sublevel = j0;
    argmin_sub = zero.flat();
  }

  auto tol = [](double a, double b) { return 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); };

  Worst w2;
  w2.slack = out.inf_sublevel - out.inf_global;
  if (!(out.inf_global < out.inf_sublevel - tol(out.inf_global, out.inf_sublevel))) {
    w2.violated = true;
    w2.witness = Witness{0, to_std(argmin_sub), options.r, w2.slack,
                         "sublevel point whose J is not above the sampled global infimum"};
  }
  out.b2 = finish("B.2", w2, per_set == 0 ? 0 : 2LL * per_set + 1, options.seed);

  Worst w3;
  w3.slack = out.inf_level - j0;
  const bool level_sampled = std::isfinite(out.inf_level);
  if (level_sampled && !(j0 < out.inf_level - tol(j0, out.inf_level))) {
    w3.violated = true;
    w3.witness = Witness{0, to_std(argmin_level), options.r, w3.slack,
                         "level-set point with J not above J(0)"};
  }
  out.b3 = finish("B.3", w3, level_sampled ? per_set : 0, options.seed);
  return out;
}

// λ*

LambdaStarResult lambda_star_estimate(const Problem& prob, const std::vector<double>& r_grid,
                                      int samples_per_r, std::uint64_t seed) {
  if (samples_per_r < 1) throw std::invalid_argument("lambda_star_estimate: samples_per_r must be >= 1");
  const int m = prob.m();
  const int n = prob.n();
  const Mat basis = subspace_basis(Subspace::Y, m, n);
  const auto dimY = static_cast<double>(basis.cols());
  LambdaStarResult out;
  out.seed = seed;
  out.outer_inf = kInf;

  for (std::size_t j = 0; j < r_grid.size(); ++j) {
    const double r = r_grid[j];
    if (!(r > 0.0)) throw std::invalid_argument("lambda_star_estimate: r must be positive");
    std::vector<double> psi_inside, mu_inside;
    double sup = -kInf;
    for (int i = 0; i < samples_per_r; ++i) {
      auto rng = make_rng(seed, kLambdaStar + j, static_cast<std::uint64_t>(i));
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      const PeriodicSequence d(m, n, basis * random_unit(rng, basis.cols()));
      const double tmax = sublevel_radius(d, prob.exponent(), r);
      if (!std::isfinite(tmax)) continue;
      const double boundary_psi = -potential(d * tmax, prob);
      const PeriodicSequence u = d * (tmax * std::pow(unit(rng), 1.0 / dimY));
      const double mu_u = mu(u, prob);
      const double psi_u = -potential(u, prob);
      sup = std::max({sup, boundary_psi, psi_u});
      if (mu_u < r) {
        psi_inside.push_back(psi_u);
        mu_inside.push_back(mu_u);
      }
    }
    LambdaStarCurve curve;
    curve.r = r;
    curve.samples = static_cast<long long>(psi_inside.size());
    curve.sup_term = sup;
    curve.inner_inf = kInf;
    for (std::size_t i = 0; i < psi_inside.size(); ++i) {
      const double q = (sup - psi_inside[i]) / (r - mu_inside[i]);
      curve.inner_inf = std::min(curve.inner_inf, q);
    }
    out.outer_inf = std::min(out.outer_inf, curve.inner_inf);
    out.curves.push_back(curve);
  }
  if (std::isinf(out.outer_inf)) {
    out.estimate = std::numeric_limits<double>::quiet_NaN();  // nothing sampled
  } else {
    out.estimate = (out.outer_inf == 0.0) ? kInf : 1.0 / out.outer_inf;
  }
  return out;
}

}  // namespace pklap
