#include <doctest.h>

#include "pklap/core.hpp"

using namespace pklap;

TEST_CASE("indices wrap into one period") {
  CHECK(wrap_index(1, 4) == 1);
  CHECK(wrap_index(4, 4) == 4);
  CHECK(wrap_index(0, 4) == 4);
  CHECK(wrap_index(5, 4) == 1);
  CHECK(wrap_index(-3, 4) == 1);
  CHECK(wrap_index(-4, 4) == 4);

  const PeriodicSequence u = PeriodicSequence::scalar({1.0, 2.0, 3.0});
  CHECK(u.at(0, 0) == 3.0);
  CHECK(u.at(4, 0) == 1.0);
  CHECK(u.at(-1, 0) == 2.0);
}

TEST_CASE("sequence arithmetic and norms") {
  const PeriodicSequence u = PeriodicSequence::scalar({3.0, 4.0});
  const PeriodicSequence v = PeriodicSequence::scalar({1.0, -1.0});
  CHECK(euclidean_norm(u) == doctest::Approx(5.0));
  CHECK(inner_product(u, v) == doctest::Approx(-1.0));
  CHECK((u - v).at(2, 0) == 5.0);
  CHECK((2.0 * v).at(1, 0) == 2.0);
  CHECK_THROWS_AS(u + PeriodicSequence::scalar({1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("Y and W split a sequence orthogonally") {
  const PeriodicSequence u = PeriodicSequence::scalar({1.0, -2.0, 5.0, 0.5});
  const PeriodicSequence y = project_Y(u);
  const PeriodicSequence w = project_W(u);
  CHECK(period_mean(y).norm() < 1e-15);
  CHECK(w.at(1, 0) == doctest::Approx(1.125));
  CHECK(w.at(3, 0) == doctest::Approx(1.125));
  CHECK(std::abs(inner_product(y, w)) < 1e-14);
  CHECK(euclidean_norm(y + w - u) < 1e-14);
  CHECK(is_in_Y(y));
  CHECK_FALSE(is_in_Y(u));
}

TEST_CASE("exponents below one are rejected") {
  CHECK_THROWS_AS(ExponentFunction({2.0, 0.5}), std::invalid_argument);
  const ExponentFunction p({2.0, 3.5, 2.5});
  CHECK(p.p_minus() == 2.0);
  CHECK(p.p_plus() == 3.5);
  CHECK(p(4) == 2.0);
}

TEST_CASE("a potential must vanish at the origin") {
  auto grad = [](int, const Vec& a, const Vec&) -> Vec { return Vec::Zero(a.size()); };
  CHECK_THROWS_AS(Nonlinearity(2, 1, [](int, const Vec&, const Vec&) { return 1.0; }, grad, grad),
                  std::invalid_argument);
}

TEST_CASE("a closed-form right-hand side is checked against the potential") {
  // F = u1^2 u2^2, so f = 2 u2 (u3^2 + u1^2); the deliberately wrong
  // version drops the u3 term.
  auto F = [](int, const Vec& a, const Vec& b) { return a.squaredNorm() * b.squaredNorm(); };
  auto d1 = [](int, const Vec& a, const Vec& b) -> Vec { return 2.0 * b.squaredNorm() * a; };
  auto d2 = [](int, const Vec& a, const Vec& b) -> Vec { return 2.0 * a.squaredNorm() * b; };
  Nonlinearity::Options good;
  good.f_direct = [](int, const Vec& t1, const Vec& t2, const Vec& t3) -> Vec {
    return 2.0 * (t3.squaredNorm() + t1.squaredNorm()) * t2;
  };
  CHECK_NOTHROW(Nonlinearity(3, 1, F, d1, d2, good));
  Nonlinearity::Options bad;
  bad.f_direct = [](int, const Vec& t1, const Vec& t2, const Vec&) -> Vec { return 2.0 * t1.squaredNorm() * t2; };
  CHECK_THROWS_AS(Nonlinearity(3, 1, F, d1, d2, bad), std::invalid_argument);
}

TEST_CASE("non-finite potentials raise EvaluationError") {
  auto F = [](int, const Vec& a, const Vec&) { return a.norm() > 1.0 ? std::nan("") : 0.0; };
  auto grad = [](int, const Vec& a, const Vec&) -> Vec { return Vec::Zero(a.size()); };
  const Nonlinearity nl(2, 1, F, grad, grad);
  CHECK_THROWS_AS(nl.F(1, Vec::Constant(1, 2.0), Vec::Zero(1)), EvaluationError);
}
