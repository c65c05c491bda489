#pragma once

// The action functional
//   J_m(u) = Σ_{k=1..m} [ (1/p(k-1)) |Δu(k-1)|^{p(k-1)} - λ F(k, u(k+1), u(k)) ]
// split as J_m = mu + λ * potential, plus first- and second-order information.

#include <string>
#include <vector>

#include "pklap/core.hpp"

namespace pklap {

double action(const PeriodicSequence& u, const Problem& prob);

/// Σ (1/p(k-1)) |Δu(k-1)|^{p(k-1)}; nonnegative, zero on constants.
double mu(const PeriodicSequence& u, const ExponentFunction& p);
double mu(const PeriodicSequence& u, const Problem& prob);

/// -Σ F(k, u(k+1), u(k)).
double potential(const PeriodicSequence& u, const Nonlinearity& nl);
double potential(const PeriodicSequence& u, const Problem& prob);

/// Exact gradient of J_m: the negated residual. Throws NonsmoothError if
/// p(k) = 1 for some k.
PeriodicSequence gradient(const PeriodicSequence& u, const Problem& prob);

/// Gradient with phi_p eps-regularized (for p(k) < 2 iterations).
PeriodicSequence gradient(const PeriodicSequence& u, const Problem& prob, double eps);

PeriodicSequence mu_gradient(const PeriodicSequence& u, const ExponentFunction& p);
PeriodicSequence potential_gradient(const PeriodicSequence& u, const Nonlinearity& nl);

struct GradientCheck {
  double max_relative_error = 0.0;
  int points = 0;
  int worst_index = -1;
  Vec worst_point;     ///< flattened u at the worst sample
  Vec worst_analytic;  ///< gradient(u) there
  Vec worst_numeric;   ///< central differences of J_m there
};

/// Compares gradient() with central differences of action() at `points`
/// seeded samples with entries uniform in [-radius, radius]. The error at a
/// point is ||analytic - numeric||_inf / max(1, ||analytic||_inf); the
/// difference step for entry j is step * max(1, |u_j|).
GradientCheck gradient_check(const Problem& prob, int points, double step, std::uint64_t seed,
                             double radius = 1.0);

struct HessianFD {
  Mat matrix;          ///< symmetrized (H + H^T) / 2
  double asymmetry = 0.0;  ///< ||H - H^T||_F / max(||H||_F, tiny)
  std::vector<std::string> warnings;
};

/// Default central-difference step: 1e-5 * max(1, ||u||).
double default_hessian_step(const PeriodicSequence& u);

/// Central-difference Jacobian of the gradient.
HessianFD hessian_fd(const PeriodicSequence& u, const Problem& prob, double step);
HessianFD hessian_fd(const PeriodicSequence& u, const Problem& prob);

struct SpectralSummary {
  std::vector<double> eigenvalues;  ///< ascending
  int negative_count = 0;
  int zero_count = 0;
  int positive_count = 0;
  double zero_tolerance = 0.0;
  Classification classification = Classification::degenerate;
  std::vector<std::string> warnings;
};

/// Counts eigenvalues of a symmetric matrix against
/// zero_tol = 1e-7 * max(1, spectral radius) and classifies.
SpectralSummary summarize_spectrum(const Mat& symmetric);

/// Eigen-decomposition of hessian_fd(u, prob). When some p(k) < 2 and
/// Δu(k) is near zero the Hessian need not exist; the summary is then
/// reported as degenerate with a warning.
SpectralSummary morse_summary(const PeriodicSequence& u, const Problem& prob);

}  // namespace pklap
