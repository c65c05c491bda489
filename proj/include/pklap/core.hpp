#pragma once

// Domain types for m-periodic sequences u: Z -> R^n and the discrete
// p(k)-Laplacian problem built on them.
//
// Logical indices run 1..m. Every other integer is wrapped into that range,
// so u(0) == u(m) and u(m+1) == u(1).

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pklap {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Raised when an operation needs a derivative that does not exist
/// (p(k) = 1 somewhere).
struct NonsmoothError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Raised when a user-supplied F (or its derivatives) produced inf/nan.
struct EvaluationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Representative of k modulo m in 1..m.
int wrap_index(long long k, int m);

/// Real-valued m-periodic function on Z, stored over one period.
class PeriodicFunction {
 public:
  PeriodicFunction() = default;
  explicit PeriodicFunction(std::vector<double> values);

  /// Builds values fn(1), ..., fn(m).
  static PeriodicFunction generate(int m, const std::function<double(int)>& fn);
  static PeriodicFunction constant(int m, double value);

  double operator()(long long k) const { return values_[wrap_index(k, period()) - 1]; }
  int period() const { return static_cast<int>(values_.size()); }
  double min() const { return min_; }
  double max() const { return max_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
  double min_ = 0.0;
  double max_ = 0.0;
};

/// The variable exponent p: Z -> [1, inf).
class ExponentFunction : public PeriodicFunction {
 public:
  ExponentFunction() = default;
  explicit ExponentFunction(std::vector<double> values);
  static ExponentFunction constant(int m, double p);

  double p_minus() const { return min(); }
  double p_plus() const { return max(); }
};

/// One period of an m-periodic sequence of points in R^n.
///
/// Storage is flat: entry (k, c) lives at (k-1)*n + c. Instances are
/// immutable; arithmetic returns new sequences.
class PeriodicSequence {
 public:
  PeriodicSequence(int m, int n);
  PeriodicSequence(int m, int n, Vec flat);

  static PeriodicSequence constant(int m, const Vec& a);
  static PeriodicSequence scalar(const std::vector<double>& values);

  int period() const { return m_; }
  int dim() const { return n_; }
  Eigen::Index size() const { return data_.size(); }

  auto at(long long k) const { return data_.segment(offset(k), n_); }
  double at(long long k, int component) const { return data_[offset(k) + component]; }
  const Vec& flat() const { return data_; }

  PeriodicSequence operator+(const PeriodicSequence& other) const;
  PeriodicSequence operator-(const PeriodicSequence& other) const;
  PeriodicSequence operator-() const;
  PeriodicSequence operator*(double s) const;

 private:
  Eigen::Index offset(long long k) const {
    return static_cast<Eigen::Index>(wrap_index(k, m_) - 1) * n_;
  }
  void check_compatible(const PeriodicSequence& other) const;

  int m_;
  int n_;
  Vec data_;
};

inline PeriodicSequence operator*(double s, const PeriodicSequence& u) { return u * s; }

/// F(k, u1, u2)
using PotentialFn = std::function<double(int k, const Vec& u1, const Vec& u2)>;
/// Partial derivative of F with respect to u1 or u2.
using PotentialGradFn = std::function<Vec(int k, const Vec& u1, const Vec& u2)>;
/// f(k, u1, u2, u3) written out in closed form.
using RhsFn = std::function<Vec(int k, const Vec& u1, const Vec& u2, const Vec& u3)>;

/// The potential F together with its partial derivatives. The right-hand
/// side of the equation is assembled as
///   f(k, u1, u2, u3) = dF/du1(k-1, u2, u3) + dF/du2(k, u1, u2).
///
/// User functions always receive k already wrapped into 1..m, so the
/// assembled problem is m-periodic in k by construction.
class Nonlinearity {
 public:
  struct Options {
    std::optional<RhsFn> f_direct;
    /// Set for F == 0; the solvers then collapse constant-shift duplicates.
    bool identically_zero = false;
    /// Skip the construction-time agreement check against f_direct.
    bool skip_direct_check = false;
  };

  /// Throws std::invalid_argument if |F(k,0,0)| > 1e-12 for some k, or if
  /// f_direct disagrees with the assembled f on seeded sample points.
  Nonlinearity(int m, int n, PotentialFn F, PotentialGradFn dF_du1, PotentialGradFn dF_du2,
               Options options);
  Nonlinearity(int m, int n, PotentialFn F, PotentialGradFn dF_du1, PotentialGradFn dF_du2);

  /// F == 0 with zero derivatives.
  static Nonlinearity zero(int m, int n);

  int period() const { return m_; }
  int dim() const { return n_; }
  bool identically_zero() const { return identically_zero_; }
  bool has_direct_rhs() const { return f_direct_.has_value(); }

  double F(long long k, const Vec& u1, const Vec& u2) const;
  Vec dF_du1(long long k, const Vec& u1, const Vec& u2) const;
  Vec dF_du2(long long k, const Vec& u1, const Vec& u2) const;

  /// Right-hand side assembled from the two partial derivatives.
  Vec f(long long k, const Vec& u1, const Vec& u2, const Vec& u3) const;
  /// The closed-form right-hand side, when one was supplied.
  Vec f_direct(long long k, const Vec& u1, const Vec& u2, const Vec& u3) const;

  /// Largest |f_direct - f| over `samples` seeded points with components in
  /// [-radius, radius]. Requires has_direct_rhs().
  double direct_rhs_mismatch(int samples, std::uint64_t seed, double radius) const;

 private:
  int m_;
  int n_;
  PotentialFn F_;
  PotentialGradFn dF_du1_;
  PotentialGradFn dF_du2_;
  std::optional<RhsFn> f_direct_;
  bool identically_zero_ = false;
};

/// The problem
///   Δ(φ_{p(k-1)}(Δu(k-1))) + λ f(k, u(k+1), u(k), u(k-1)) = 0,  u(k+m) = u(k)
/// where φ_p(a) = |a|^{p-2} a.
class Problem {
 public:
  Problem(ExponentFunction exponent, Nonlinearity nonlinearity, double lambda);

  int m() const { return nonlinearity_.period(); }
  int n() const { return nonlinearity_.dim(); }
  double lambda() const { return lambda_; }
  const ExponentFunction& exponent() const { return exponent_; }
  const Nonlinearity& nonlinearity() const { return nonlinearity_; }

  Problem with_lambda(double lambda) const;
  Problem with_exponent(ExponentFunction exponent) const;

  /// Throws std::invalid_argument if u does not match (m, n).
  void check_compatible(const PeriodicSequence& u) const;

 private:
  ExponentFunction exponent_;
  Nonlinearity nonlinearity_;
  double lambda_;
};

enum class Classification { minimum, saddle, maximum, degenerate };

std::string to_string(Classification c);

/// A converged (or best-effort) critical point of the action functional.
struct SolutionRecord {
  PeriodicSequence u;
  double residual_norm = 0.0;
  double action_value = 0.0;
  int morse_index = 0;
  bool in_Y = false;
  Classification classification = Classification::degenerate;
  /// p(k) < 2 and the final unregularized polish was skipped.
  bool regularized = false;
};

/// (Σ_{k=1..m} |u(k)|^2)^{1/2}
double euclidean_norm(const PeriodicSequence& u);
double inner_product(const PeriodicSequence& u, const PeriodicSequence& v);

/// Period mean of u.
Vec period_mean(const PeriodicSequence& u);

/// Orthogonal projection onto W, the constant sequences.
PeriodicSequence project_W(const PeriodicSequence& u);
/// Orthogonal projection onto Y = W^⊥, the zero-mean sequences.
PeriodicSequence project_Y(const PeriodicSequence& u);

/// Tolerance used for membership in Y: 1e-8 * max(1, ||u||).
double mean_tolerance(const PeriodicSequence& u);
bool is_in_Y(const PeriodicSequence& u);

}  // namespace pklap
