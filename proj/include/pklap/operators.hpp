#pragma once

#include "pklap/core.hpp"

namespace pklap {

/// w(k) = u(k+1) - u(k)
PeriodicSequence forward_difference(const PeriodicSequence& u);

/// |a|^{p-2} a, with phi_p(0, p) = 0 for every p >= 1.
Vec phi_p(const Vec& a, double p);

/// (|a|^2 + eps^2)^{(p-2)/2} a. Equals phi_p for eps = 0.
Vec phi_p_regularized(const Vec& a, double p, double eps);

struct Residual {
  PeriodicSequence values;
  double norm = 0.0;
};

/// Left-hand side of the equation at every k = 1..m:
///   phi_{p(k)}(Δu(k)) - phi_{p(k-1)}(Δu(k-1)) + λ f(k, u(k+1), u(k), u(k-1)).
/// u solves the periodic problem iff every value is zero.
///
/// Throws EvaluationError if f overflows.
Residual residual(const PeriodicSequence& u, const Problem& prob);

/// Same with phi_p replaced by its eps-regularization (used by the solvers
/// when some p(k) < 2).
Residual residual(const PeriodicSequence& u, const Problem& prob, double eps);

/// Operator part only (λ = 0): Δ(phi_{p(k-1)}(Δu(k-1))).
PeriodicSequence p_laplacian(const PeriodicSequence& u, const ExponentFunction& p, double eps = 0.0);

}  // namespace pklap
