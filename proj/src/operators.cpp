#include "pklap/operators.hpp"

#include <cmath>

namespace pklap {

PeriodicSequence forward_difference(const PeriodicSequence& u) {
  const int m = u.period();
  const int n = u.dim();
  Vec w(u.size());
  for (int k = 1; k <= m; ++k) w.segment((k - 1) * n, n) = u.at(k + 1) - u.at(k);
  return PeriodicSequence(m, n, std::move(w));
}

Vec phi_p(const Vec& a, double p) {
  const double r = a.norm();
  if (r == 0.0) return Vec::Zero(a.size());
  if (p == 2.0) return a;
  return std::pow(r, p - 2.0) * a;
}

Vec phi_p_regularized(const Vec& a, double p, double eps) {
  if (eps == 0.0) return phi_p(a, p);
  if (p == 2.0) return a;
  return std::pow(a.squaredNorm() + eps * eps, 0.5 * (p - 2.0)) * a;
}

PeriodicSequence p_laplacian(const PeriodicSequence& u, const ExponentFunction& p, double eps) {
  const int m = u.period();
  const int n = u.dim();
  const PeriodicSequence du = forward_difference(u);
  // flux(k) = phi_{p(k)}(Δu(k)), cached once per k.
  Mat flux(n, m);
  for (int k = 1; k <= m; ++k) flux.col(k - 1) = phi_p_regularized(du.at(k), p(k), eps);
  Vec out(u.size());
  for (int k = 1; k <= m; ++k) {
    const int prev = wrap_index(k - 1, m);
    out.segment((k - 1) * n, n) = flux.col(k - 1) - flux.col(prev - 1);
  }
  if (!out.allFinite()) throw EvaluationError("p-Laplacian produced a non-finite value");
  return PeriodicSequence(m, n, std::move(out));
}

Residual residual(const PeriodicSequence& u, const Problem& prob) { return residual(u, prob, 0.0); }

Residual residual(const PeriodicSequence& u, const Problem& prob, double eps) {
  prob.check_compatible(u);
  const int m = u.period();
  const int n = u.dim();
  Vec values = p_laplacian(u, prob.exponent(), eps).flat();
  const auto& nl = prob.nonlinearity();
  if (!nl.identically_zero()) {
    for (int k = 1; k <= m; ++k) {
      values.segment((k - 1) * n, n) +=
          prob.lambda() * nl.f(k, u.at(k + 1), u.at(k), u.at(k - 1));
    }
  }
  if (!values.allFinite()) throw EvaluationError("residual: non-finite value (f overflow)");
  const double norm = values.norm();
  return Residual{PeriodicSequence(m, n, std::move(values)), norm};
}

}  // namespace pklap
