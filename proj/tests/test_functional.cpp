#include <doctest.h>

#include <cmath>

#include "pklap/builtins.hpp"
#include "pklap/functional.hpp"
#include "pklap/operators.hpp"

using namespace pklap;

TEST_CASE("action on a hand-computed point") {
  // m = 2, p = (2, 3), F = |u1|^2 + |u2|^2 (power a = b = 1, s = r = 2).
  // u = (1, 0): Δu(1) = -1, Δu(2) = 1.
  // mu = |Δu(0)|^{p(0)}/p(0) + |Δu(1)|^{p(1)}/p(1) with k-1 = 0 ≡ 2:
  //    = 1/3 + 1/2.
  // ΣF(k, u(k+1), u(k)) = (0 + 1) + (1 + 0) = 2.
  const Builtin b = make_power(2, 1.0, 1.0, PeriodicFunction::constant(2, 2.0), PeriodicFunction::constant(2, 2.0));
  const Problem prob(ExponentFunction({2.0, 3.0}), b.nonlinearity, 0.5);
  const PeriodicSequence u = PeriodicSequence::scalar({1.0, 0.0});
  CHECK(mu(u, prob) == doctest::Approx(1.0 / 3.0 + 0.5));
  CHECK(potential(u, prob) == doctest::Approx(-2.0));
  CHECK(action(u, prob) == doctest::Approx(1.0 / 3.0 + 0.5 - 0.5 * 2.0));
}

TEST_CASE("the gradient is the negated residual") {
  const Builtin b = make_example1(4);
  const Problem prob(ExponentFunction({2.0, 2.5, 3.0, 2.2}), b.nonlinearity, 0.8);
  const PeriodicSequence u = PeriodicSequence::scalar({0.4, -0.7, 0.2, 1.1});
  const PeriodicSequence g = gradient(u, prob);
  const Residual r = residual(u, prob);
  CHECK(euclidean_norm(g + r.values) < 1e-14);
  CHECK(euclidean_norm(mu_gradient(u, prob.exponent()) + prob.lambda() * potential_gradient(u, prob.nonlinearity()) - g) <
        1e-13);
}

TEST_CASE("gradient check passes for smooth instances and catches a wrong derivative") {
  for (const std::string name : {"example1", "example2", "example3"}) {
    CAPTURE(name);
    const Builtin b = make_builtin(name, 4);
    const Problem prob(ExponentFunction({2.0, 3.0, 2.5, 4.0}), b.nonlinearity, 1.3);
    const GradientCheck gc = gradient_check(prob, 50, 1e-6, 3);
    CHECK(gc.points == 50);
    CHECK(gc.max_relative_error <= 1e-6);
  }

  const Builtin b = make_example2(3);
  auto wrong = [&](int k, const Vec& a, const Vec& c) -> Vec { return 1.01 * b.nonlinearity.dF_du1(k, a, c); };
  Nonlinearity::Options skip;
  skip.skip_direct_check = true;
  const Nonlinearity bad(
      3, 1, [&](int k, const Vec& a, const Vec& c) { return b.nonlinearity.F(k, a, c); }, wrong,
      [&](int k, const Vec& a, const Vec& c) -> Vec { return b.nonlinearity.dF_du2(k, a, c); }, skip);
  const Problem prob(ExponentFunction::constant(3, 2.0), bad, 1.0);
  const GradientCheck gc = gradient_check(prob, 50, 1e-6, 3);
  CHECK(gc.max_relative_error > 1e-4);
  CHECK(gc.worst_index >= 0);
  CHECK(gc.worst_point.size() == 3);
}

TEST_CASE("gradient check is reproducible") {
  const Builtin b = make_example1(2);
  const Problem prob(ExponentFunction({2.0, 3.0}), b.nonlinearity, 1.0);
  CHECK(gradient_check(prob, 20, 1e-6, 9).max_relative_error ==
        gradient_check(prob, 20, 1e-6, 9).max_relative_error);
}

TEST_CASE("Hessian of the pure operator at p = 2 is the cycle Laplacian") {
  const Problem prob(ExponentFunction::constant(4, 2.0), Nonlinearity::zero(4, 1), 1.0);
  const PeriodicSequence u = PeriodicSequence::scalar({0.1, 0.2, -0.3, 0.4});
  const HessianFD h = hessian_fd(u, prob);
  Mat laplacian = Mat::Zero(4, 4);
  for (int i = 0; i < 4; ++i) {
    laplacian(i, i) = 2.0;
    laplacian(i, (i + 1) % 4) = -1.0;
    laplacian(i, (i + 3) % 4) = -1.0;
  }
  CHECK((h.matrix - laplacian).norm() < 1e-6);
  const SpectralSummary s = summarize_spectrum(h.matrix);
  // eigenvalues 0, 2, 2, 4
  CHECK(s.zero_count == 1);
  CHECK(s.positive_count == 3);
  CHECK(s.eigenvalues.back() == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("Morse index distinguishes a minimum from a saddle") {
  // F = |u1|^2 + |u2|^2 makes ΣF = 2Σ|u|^2, so the Hessian of J_m at 0 is
  // L_3 - 4λ I with L_3 the cycle Laplacian.
  const Builtin quad = make_power(3, 1.0, 1.0, PeriodicFunction::constant(3, 2.0), PeriodicFunction::constant(3, 2.0));
  const PeriodicSequence zero(3, 1);
  // eigenvalues of L_3 are 0, 3, 3
  const Problem small(ExponentFunction::constant(3, 2.0), quad.nonlinearity, 0.5);
  CHECK(morse_summary(zero, small).negative_count == 1);
  const Problem large(ExponentFunction::constant(3, 2.0), quad.nonlinearity, 1.0);
  CHECK(morse_summary(zero, large).negative_count == 3);
}
