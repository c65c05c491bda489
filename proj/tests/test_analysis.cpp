#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "pklap/analysis.hpp"
#include "pklap/builtins.hpp"

using namespace pklap;

namespace {

const CheckReport& find(const std::vector<CheckReport>& reports, const std::string& name) {
  for (const CheckReport& r : reports) {
    if (r.name == name) return r;
  }
  FAIL("no report named " << name);
  throw std::logic_error("unreachable");
}

Problem power_problem(int m, double p, double lambda) {
  const Builtin b = make_power(m, 1.0, 1.0, PeriodicFunction::constant(m, p), PeriodicFunction::constant(m, p));
  return Problem(ExponentFunction::constant(m, p), b.nonlinearity, lambda);
}

}  // namespace

TEST_CASE("single-point inequality checks") {
  const PeriodicSequence u = PeriodicSequence::scalar({1.0, -2.0, 0.5});
  CHECK(check_c1(u, 3.0).verdict == Verdict::holds_on_samples);
  CHECK(check_c2(u, 4.0).verdict == Verdict::holds_on_samples);
  CHECK(check_c3(u, ExponentFunction({2.0, 3.0, 2.5})).verdict == Verdict::holds_on_samples);
  CHECK_THROWS_AS(check_c2(u, 1.5), std::domain_error);

  // C.2 is tight on constant sequences: Σ|c|^s = m |c|^s = m^{(2-s)/2} (√m |c|)^s
  const PeriodicSequence c = PeriodicSequence::scalar({2.0, 2.0, 2.0, 2.0});
  const CheckReport tight = check_c2(c, 3.0);
  CHECK(tight.verdict == Verdict::holds_on_samples);
  CHECK(std::abs(tight.margin) < 1e-12);
}

TEST_CASE("inequality suite holds on seeded samples") {
  for (int m : {2, 3, 7}) {
    const std::vector<CheckReport> suite = inequality_suite(m, 1, 2000, 5);
    REQUIRE(suite.size() == 3);
    for (const CheckReport& r : suite) {
      CAPTURE(r.name);
      CHECK(r.verdict == Verdict::holds_on_samples);
      CHECK(r.samples == 2000);
    }
  }
}

TEST_CASE("ξ for p⁺ = 2 is the cycle Laplacian gap") {
  for (int m = 2; m <= 8; ++m) {
    const double gap = 2.0 - 2.0 * std::cos(2.0 * oracle::kPi / m);
    CHECK(cycle_laplacian_gap(m) == doctest::Approx(gap).epsilon(1e-12));
    const XiResult xi = xi_search(m, 1, 2.0);
    CHECK(xi.converged);
    REQUIRE(xi.closed_form);
    CHECK(*xi.closed_form == doctest::Approx(gap).epsilon(1e-12));
    CHECK(std::abs(xi.value - gap) <= 1e-7);
  }
}

TEST_CASE("ξ for m = 2 and general p⁺") {
  // Y is spanned by (1, -1)/√2; both differences have modulus √2, so
  // ξ = 2 · 2^{p/2}.
  for (double p : {2.5, 3.0, 4.0}) {
    CHECK(xi_constant(2, 1, p) == doctest::Approx(2.0 * std::pow(2.0, p / 2.0)).epsilon(1e-8));
  }
}

TEST_CASE("thresholds by direct substitution") {
  const Builtin b = make_power(2, 1.0, 1.0, PeriodicFunction::constant(2, 2.0), PeriodicFunction::constant(2, 2.0));
  const Problem prob(ExponentFunction::constant(2, 2.0), b.nonlinearity, 1.0);
  const Thresholds t = thresholds(prob, *b.growth, 0.5);
  // 2^{p⁺} m^{p⁺/2} / (p⁻ α) = 4 * 2 / 2 / α
  CHECK(t.lambda1 == doctest::Approx(4.0));
  CHECK(t.lambda2 == doctest::Approx(4.0));
  CHECK(t.lambda3 == doctest::Approx(2.0));
  REQUIRE(t.r2);
  // Σ (1/2)(2·0.5)^2 over two indices
  CHECK(*t.r2 == doctest::Approx(1.0));

  const Builtin even = make_example2(4);
  const Thresholds inf = thresholds(Problem(ExponentFunction::constant(4, 2.0), even.nonlinearity, 1.0), *even.growth);
  CHECK(std::isinf(inf.lambda1));
  CHECK(std::isinf(inf.lambda3));
}

TEST_CASE("growth conditions of the first example") {
  const Builtin b = make_example1(4);
  const std::vector<CheckReport> g = check_growth(b.nonlinearity, *b.growth, 2000, 1);
  CHECK(find(g, "A.4").verdict == Verdict::holds_on_samples);
  CHECK(find(g, "A.5").verdict == Verdict::holds_on_samples);
  CHECK(find(g, "A.6.3").verdict == Verdict::holds_on_samples);
  // the example is built so that these two fail
  CHECK(find(g, "A.6.1").verdict == Verdict::violated);
  CHECK(find(g, "A.6.2").verdict == Verdict::violated);
  CHECK(find(g, "A.6.1").witness.has_value());
}

TEST_CASE("growth conditions of the second example") {
  const Builtin odd = make_example2(3);
  for (const CheckReport& r : check_growth(odd.nonlinearity, *odd.growth, 2000, 1)) {
    CAPTURE(r.name);
    CHECK(r.verdict == Verdict::holds_on_samples);
  }
  const Builtin even = make_example2(4);
  CHECK(find(check_growth(even.nonlinearity, *even.growth, 1000, 1), "alpha-positive").verdict == Verdict::violated);
}

TEST_CASE("a wrong growth constant is caught") {
  const Builtin b = make_example2(3);
  GrowthProfile wrong = *b.growth;
  wrong.alpha3 = PeriodicFunction::constant(3, 5.0);
  const CheckReport a4 = find(check_growth(b.nonlinearity, wrong, 2000, 1), "A.4");
  CHECK(a4.verdict == Verdict::violated);
  REQUIRE(a4.witness);
  CHECK(a4.witness->value < 0.0);
}

TEST_CASE("sign conditions of the third example") {
  const Builtin b = make_example3(3);
  for (const CheckReport& r : check_bounds(b.nonlinearity, *b.bounds, 2000, 1)) {
    CAPTURE(r.name);
    CHECK(r.verdict == Verdict::holds_on_samples);
  }
  // ρ1 = 1.5 reaches u1^2 + u2^2 > π, where F turns positive
  const CheckReport a8 = find(check_bounds(b.nonlinearity, BoundProfile(1.0, 1.5, 1.6, 1.7), 2000, 1), "A.8");
  CHECK(a8.verdict == Verdict::violated);
}

TEST_CASE("anti-coercivity probe") {
  const Builtin b2 = make_example2(3);
  CHECK(anticoercivity_probe(Problem(ExponentFunction::constant(3, 2.0), b2.nonlinearity, 1.0)).verdict ==
        Verdict::holds_on_samples);
  const Builtin b3 = make_example3(2);
  CHECK(anticoercivity_probe(Problem(ExponentFunction::constant(2, 2.0), b3.nonlinearity, 1.0)).verdict ==
        Verdict::violated);
  // borderline case s = r = p⁺ brackets λ3 = 2
  CHECK(anticoercivity_probe(power_problem(2, 2.0, 1.0)).verdict == Verdict::violated);
  CHECK(anticoercivity_probe(power_problem(2, 2.0, 4.0)).verdict == Verdict::holds_on_samples);
}

TEST_CASE("ray values and the decrease test") {
  CHECK(ray_decreases({0.0, -5.0, -50.0, -500.0}));
  CHECK_FALSE(ray_decreases({0.0, -5.0, -5.0, -500.0}));
  CHECK_FALSE(ray_decreases({0.0, 1.0, 2.0, 3.0}));
  const Problem prob = power_problem(2, 2.0, 4.0);
  const std::vector<double> v = action_along_ray(prob, PeriodicSequence::scalar({1.0, 0.0}), {1.0, 10.0});
  // mu((t, 0)) = t^2, ΣF = 2 t^2, J = t^2 - 8 t^2
  CHECK(v[0] == doctest::Approx(-7.0));
  CHECK(v[1] == doctest::Approx(-700.0));
}

TEST_CASE("(B.2) and (B.3) on quadratic potentials") {
  // F = |u1|^2 + |u2|^2: the potential -ΣF is unbounded below on Y, so B.2
  // holds, while 0 is its maximum, so B.3 fails.
  B2B3Options options;
  options.r = 1.0;
  options.sample_budget = 3000;
  const B2B3Report up = check_b2_b3(power_problem(3, 2.0, 1.0), options);
  CHECK(up.b2.verdict == Verdict::holds_on_samples);
  CHECK(up.b3.verdict == Verdict::violated);

  // F = -(|u1|^2 + |u2|^2): the potential has a strict minimum at 0
  auto F = [](int, const Vec& a, const Vec& b) { return -(a.squaredNorm() + b.squaredNorm()); };
  auto d1 = [](int, const Vec& a, const Vec&) -> Vec { return -2.0 * a; };
  auto d2 = [](int, const Vec&, const Vec& b) -> Vec { return -2.0 * b; };
  const Problem down(ExponentFunction::constant(3, 2.0), Nonlinearity(3, 1, F, d1, d2), 1.0);
  const B2B3Report r = check_b2_b3(down, options);
  CHECK(r.b2.verdict == Verdict::violated);
  CHECK(r.b3.verdict == Verdict::holds_on_samples);
  CHECK(r.inf_global == 0.0);
}

TEST_CASE("sublevel radius") {
  // mu(t d) = t^2 Σ|Δd|^2 / 2 for p = 2; d = (1, -1)/√2 gives Σ|Δd|^2 = 4
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(sublevel_radius(PeriodicSequence::scalar({s, -s}), ExponentFunction::constant(2, 2.0), 8.0) ==
        doctest::Approx(2.0).epsilon(1e-9));
  CHECK(std::isinf(sublevel_radius(PeriodicSequence::scalar({s, s}), ExponentFunction::constant(2, 2.0), 8.0)));
}

TEST_CASE("λ* estimator") {
  const Problem flat(ExponentFunction::constant(3, 2.0), Nonlinearity::zero(3, 1), 1.0);
  CHECK(std::isinf(lambda_star_estimate(flat, {0.5, 1.0}, 50, 1).estimate));

  const Builtin b = make_example3(2);
  const Problem prob(ExponentFunction::constant(2, 2.0), b.nonlinearity, 1.0);
  const std::vector<double> grid{6.5, 7.5, 8.5, 9.0};
  const LambdaStarResult small = lambda_star_estimate(prob, grid, 100, 4);
  const LambdaStarResult large = lambda_star_estimate(prob, grid, 200, 4);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(large.curves[i].sup_term >= small.curves[i].sup_term);
  CHECK(std::isfinite(small.estimate));
  CHECK(small.estimate > 0.0);
  CHECK(lambda_star_estimate(prob, grid, 100, 4).estimate == small.estimate);
}
