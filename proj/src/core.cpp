#include "pklap/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pklap/random.hpp"

namespace pklap {

int wrap_index(long long k, int m) {
  if (m < 1) throw std::invalid_argument("wrap_index: period must be positive");
  long long r = k % m;
  if (r <= 0) r += m;
  return static_cast<int>(r);
}

// PeriodicFunction

PeriodicFunction::PeriodicFunction(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("PeriodicFunction: empty period");
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("PeriodicFunction: non-finite value");
  }
  auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
  min_ = *lo;
  max_ = *hi;
}

PeriodicFunction PeriodicFunction::generate(int m, const std::function<double(int)>& fn) {
  std::vector<double> v(static_cast<std::size_t>(m));
  for (int k = 1; k <= m; ++k) v[k - 1] = fn(k);
  return PeriodicFunction(std::move(v));
}

PeriodicFunction PeriodicFunction::constant(int m, double value) {
  return PeriodicFunction(std::vector<double>(static_cast<std::size_t>(m), value));
}

ExponentFunction::ExponentFunction(std::vector<double> values)
    : PeriodicFunction(std::move(values)) {
  if (p_minus() < 1.0) {
    throw std::invalid_argument("ExponentFunction: p(k) must be >= 1");
  }
}

ExponentFunction ExponentFunction::constant(int m, double p) {
  return ExponentFunction(std::vector<double>(static_cast<std::size_t>(m), p));
}

// PeriodicSequence

PeriodicSequence::PeriodicSequence(int m, int n) : m_(m), n_(n) {
  if (m < 2) throw std::invalid_argument("PeriodicSequence: period m must be >= 2");
  if (n < 1) throw std::invalid_argument("PeriodicSequence: dimension n must be >= 1");
  data_ = Vec::Zero(static_cast<Eigen::Index>(m) * n);
}

PeriodicSequence::PeriodicSequence(int m, int n, Vec flat) : PeriodicSequence(m, n) {
  if (flat.size() != data_.size()) {
    throw std::invalid_argument("PeriodicSequence: expected m*n values");
  }
  if (!flat.allFinite()) throw std::invalid_argument("PeriodicSequence: non-finite entry");
  data_ = std::move(flat);
}

PeriodicSequence PeriodicSequence::constant(int m, const Vec& a) {
  Vec flat(static_cast<Eigen::Index>(m) * a.size());
  for (int k = 0; k < m; ++k) flat.segment(k * a.size(), a.size()) = a;
  return PeriodicSequence(m, static_cast<int>(a.size()), std::move(flat));
}

PeriodicSequence PeriodicSequence::scalar(const std::vector<double>& values) {
  Vec flat = Eigen::Map<const Vec>(values.data(), static_cast<Eigen::Index>(values.size()));
  return PeriodicSequence(static_cast<int>(values.size()), 1, std::move(flat));
}

void PeriodicSequence::check_compatible(const PeriodicSequence& other) const {
  if (other.m_ != m_ || other.n_ != n_) {
    throw std::invalid_argument("PeriodicSequence: shape mismatch");
  }
}

PeriodicSequence PeriodicSequence::operator+(const PeriodicSequence& other) const {
  check_compatible(other);
  return PeriodicSequence(m_, n_, data_ + other.data_);
}

PeriodicSequence PeriodicSequence::operator-(const PeriodicSequence& other) const {
  check_compatible(other);
  return PeriodicSequence(m_, n_, data_ - other.data_);
}

PeriodicSequence PeriodicSequence::operator-() const { return PeriodicSequence(m_, n_, -data_); }

PeriodicSequence PeriodicSequence::operator*(double s) const {
  return PeriodicSequence(m_, n_, data_ * s);
}

// Nonlinearity

namespace {

constexpr double kZeroAnchorTol = 1e-12;
constexpr double kDirectRhsTol = 1e-9;

void require_finite(const Vec& v, const char* what) {
  if (!v.allFinite()) throw EvaluationError(std::string(what) + " returned a non-finite value");
}

}  // namespace

Nonlinearity::Nonlinearity(int m, int n, PotentialFn F, PotentialGradFn dF_du1,
                           PotentialGradFn dF_du2)
    : Nonlinearity(m, n, std::move(F), std::move(dF_du1), std::move(dF_du2), Options{}) {}

Nonlinearity::Nonlinearity(int m, int n, PotentialFn F, PotentialGradFn dF_du1,
                           PotentialGradFn dF_du2, Options options)
    : m_(m),
      n_(n),
      F_(std::move(F)),
      dF_du1_(std::move(dF_du1)),
      dF_du2_(std::move(dF_du2)),
      f_direct_(std::move(options.f_direct)),
      identically_zero_(options.identically_zero) {
  if (m < 2) throw std::invalid_argument("Nonlinearity: period m must be >= 2");
  if (n < 1) throw std::invalid_argument("Nonlinearity: dimension n must be >= 1");
  if (!F_ || !dF_du1_ || !dF_du2_) throw std::invalid_argument("Nonlinearity: missing callable");

  const Vec zero = Vec::Zero(n);
  for (int k = 1; k <= m; ++k) {
    const double value = F_(k, zero, zero);
    if (!(std::abs(value) <= kZeroAnchorTol)) {
      std::ostringstream msg;
      msg << "Nonlinearity: F(" << k << ",0,0) = " << value << " violates F(k,0,0) = 0";
      throw std::invalid_argument(msg.str());
    }
  }

  if (f_direct_ && !options.skip_direct_check) {
    const double mismatch = direct_rhs_mismatch(16, 0x5eedULL, 1.0);
    if (!(mismatch <= kDirectRhsTol)) {
      std::ostringstream msg;
      msg << "Nonlinearity: closed-form f disagrees with the assembled f (max relative gap "
          << mismatch << ")";
      throw std::invalid_argument(msg.str());
    }
  }
}

Nonlinearity Nonlinearity::zero(int m, int n) {
  auto F = [](int, const Vec&, const Vec&) { return 0.0; };
  auto dF = [n](int, const Vec&, const Vec&) -> Vec { return Vec::Zero(n); };
  Options options;
  options.identically_zero = true;
  return Nonlinearity(m, n, F, dF, dF, std::move(options));
}

double Nonlinearity::F(long long k, const Vec& u1, const Vec& u2) const {
  const double value = F_(wrap_index(k, m_), u1, u2);
  if (!std::isfinite(value)) throw EvaluationError("F returned a non-finite value");
  return value;
}

Vec Nonlinearity::dF_du1(long long k, const Vec& u1, const Vec& u2) const {
  Vec g = dF_du1_(wrap_index(k, m_), u1, u2);
  require_finite(g, "dF/du1");
  return g;
}

Vec Nonlinearity::dF_du2(long long k, const Vec& u1, const Vec& u2) const {
  Vec g = dF_du2_(wrap_index(k, m_), u1, u2);
  require_finite(g, "dF/du2");
  return g;
}

Vec Nonlinearity::f(long long k, const Vec& u1, const Vec& u2, const Vec& u3) const {
  return dF_du1(k - 1, u2, u3) + dF_du2(k, u1, u2);
}

Vec Nonlinearity::f_direct(long long k, const Vec& u1, const Vec& u2, const Vec& u3) const {
  if (!f_direct_) throw std::logic_error("Nonlinearity: no closed-form f supplied");
  Vec v = (*f_direct_)(wrap_index(k, m_), u1, u2, u3);
  require_finite(v, "f_direct");
  return v;
}

double Nonlinearity::direct_rhs_mismatch(int samples, std::uint64_t seed, double radius) const {
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    auto rng = make_rng(seed, 0xA1, static_cast<std::uint64_t>(i));
    std::uniform_int_distribution<int> pick_k(1, m_);
    std::uniform_real_distribution<double> coord(-radius, radius);
    const int k = pick_k(rng);
    Vec u1(n_), u2(n_), u3(n_);
    for (int c = 0; c < n_; ++c) u1[c] = coord(rng);
    for (int c = 0; c < n_; ++c) u2[c] = coord(rng);
    for (int c = 0; c < n_; ++c) u3[c] = coord(rng);
    const Vec assembled = f(k, u1, u2, u3);
    const Vec direct = f_direct(k, u1, u2, u3);
    const double scale = std::max(1.0, assembled.lpNorm<Eigen::Infinity>());
    worst = std::max(worst, (assembled - direct).lpNorm<Eigen::Infinity>() / scale);
  }
  return worst;
}

// Problem

Problem::Problem(ExponentFunction exponent, Nonlinearity nonlinearity, double lambda)
    : exponent_(std::move(exponent)), nonlinearity_(std::move(nonlinearity)), lambda_(lambda) {
  if (!(lambda_ > 0.0) || !std::isfinite(lambda_)) {
    throw std::invalid_argument("Problem: lambda must be a positive finite number");
  }
  if (exponent_.period() != nonlinearity_.period()) {
    throw std::invalid_argument("Problem: exponent and nonlinearity must share the period m");
  }
}

Problem Problem::with_lambda(double lambda) const { return Problem(exponent_, nonlinearity_, lambda); }

Problem Problem::with_exponent(ExponentFunction exponent) const {
  return Problem(std::move(exponent), nonlinearity_, lambda_);
}

void Problem::check_compatible(const PeriodicSequence& u) const {
  if (u.period() != m() || u.dim() != n()) {
    throw std::invalid_argument("Problem: sequence shape does not match (m, n)");
  }
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::minimum: return "minimum";
    case Classification::saddle: return "saddle";
    case Classification::maximum: return "maximum";
    case Classification::degenerate: return "degenerate";
  }
  return "degenerate";
}

// Norms and the Y ⊕ W decomposition

double euclidean_norm(const PeriodicSequence& u) { return u.flat().norm(); }

double inner_product(const PeriodicSequence& u, const PeriodicSequence& v) {
  if (u.period() != v.period() || u.dim() != v.dim()) {
    throw std::invalid_argument("inner_product: shape mismatch");
  }
  return u.flat().dot(v.flat());
}

Vec period_mean(const PeriodicSequence& u) {
  Vec mean = Vec::Zero(u.dim());
  for (int k = 1; k <= u.period(); ++k) mean += u.at(k);
  return mean / static_cast<double>(u.period());
}

PeriodicSequence project_W(const PeriodicSequence& u) {
  return PeriodicSequence::constant(u.period(), period_mean(u));
}

PeriodicSequence project_Y(const PeriodicSequence& u) { return u - project_W(u); }

double mean_tolerance(const PeriodicSequence& u) {
  return 1e-8 * std::max(1.0, euclidean_norm(u));
}

bool is_in_Y(const PeriodicSequence& u) {
  return euclidean_norm(project_W(u)) <= mean_tolerance(u);
}

}  // namespace pklap
