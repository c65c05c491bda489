#include "pklap/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "pklap/functional.hpp"
#include "pklap/operators.hpp"
#include "pklap/random.hpp"

namespace pklap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Seed streams. Each start index draws from its own generator.
constexpr std::uint64_t kStreamStarts = 1;
constexpr std::uint64_t kStreamPerturb = 2;
constexpr std::uint64_t kStreamMinimize = 3;
constexpr std::uint64_t kStreamDeflation = 100;

constexpr int kRegularizationStages = 8;
constexpr int kMaxPerturbations = 3;
constexpr double kDivergenceFactor = 1e6;
// Relative size of the last Newton step required, with the residual, for convergence.
constexpr double kStepTol = 1e-8;

using Field = std::function<Vec(const Vec&)>;

/// Coordinates z of a subspace with orthonormal basis B; u = B z.
class Coordinates {
 public:
  Coordinates(Subspace s, int m, int n) : m_(m), n_(n), full_(s == Subspace::full) {
    if (!full_) basis_ = subspace_basis(s, m, n);
  }

  PeriodicSequence lift(const Vec& z) const {
    return PeriodicSequence(m_, n_, full_ ? z : Vec(basis_ * z));
  }
  Vec restrict(const PeriodicSequence& u) const {
    return full_ ? u.flat() : Vec(basis_.transpose() * u.flat());
  }
  Eigen::Index dim() const { return full_ ? Eigen::Index{m_} * n_ : basis_.cols(); }

 private:
  int m_;
  int n_;
  bool full_;
  Mat basis_;
};

Vec gaussian(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = normal(rng);
  return v;
}

/// Uniform point in the ball of the given radius.
Vec ball_point(Eigen::Index d, double radius, std::mt19937_64& rng) {
  Vec v = gaussian(d, rng);
  while (v.norm() == 0.0) v = gaussian(d, rng);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double t = std::pow(uniform(rng), 1.0 / static_cast<double>(d));
  return v.normalized() * (radius * t);
}

Mat fd_jacobian(const Field& field, const Vec& z) {
  const double h = 1e-6 * std::max(1.0, z.norm());
  const Eigen::Index d = z.size();
  Mat J(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    Vec zp = z;
    Vec zm = z;
    zp[j] += h;
    zm[j] -= h;
    J.col(j) = (field(zp) - field(zm)) / (2.0 * h);
  }
  return J;
}

struct Deflation {
  std::vector<PeriodicSequence> known;
  double power = 2.0;
  double shift = 1.0;
};

/// log of the deflation factor and its gradient with respect to u.
std::pair<double, Vec> log_deflation(const PeriodicSequence& u, const Deflation& d) {
  double log_m = 0.0;
  Vec grad = Vec::Zero(u.size());
  for (const PeriodicSequence& ui : d.known) {
    const Vec diff = u.flat() - ui.flat();
    const double dist = diff.norm();
    if (dist == 0.0) return {kInf, grad};
    const double pole = std::pow(dist, -d.power);
    const double factor = pole + d.shift;
    log_m += std::log(factor);
    grad += (-d.power * pole / (dist * dist * factor)) * diff;
  }
  return {log_m, grad};
}

struct CoreOptions {
  double tol = 1e-10;
  int max_iterations = 100;
  double divergence_radius = kInf;
  const Deflation* deflation = nullptr;
};

struct CoreResult {
  Vec z;
  bool converged = false;
  int iterations = 0;
  double norm = kInf;
  std::string message;
};

/// Damped Newton for field(z) = 0 with a minimum-norm step from a complete
/// orthogonal decomposition (the Jacobian is singular along constants
/// whenever F vanishes to high order). With deflation the step is rescaled
/// by 1 / (1 - ∇log M · δ) and the merit becomes M(u)|field(z)|.
///
/// A small residual alone does not end the iteration: near a degenerate root
/// (e.g. u = 0 when F vanishes to order 8) Newton converges linearly and the
/// residual drops below tolerance long before the iterate arrives. The step
/// must settle too, and steady linear contraction with ratio ρ is sped up by
/// the multiplicity-corrected step δ / (1 - ρ).
CoreResult newton_core(const Field& field, const Coordinates& coords, Vec z,
                       const CoreOptions& opt, std::mt19937_64& rng) {
  CoreResult out;
  auto safe_field = [&](const Vec& x, Vec& g) {
    try {
      g = field(x);
      return g.allFinite();
    } catch (const EvaluationError&) {
      return false;
    }
  };
  auto log_weight = [&](const Vec& x) {
    return opt.deflation ? log_deflation(coords.lift(x), *opt.deflation).first : 0.0;
  };

  Vec G;
  if (!safe_field(z, G)) {
    out.z = z;
    out.message = "non-finite gradient at the start point";
    return out;
  }
  int perturbations = 0;
  Vec previous_step;
  for (int it = 0;; ++it) {
    out.z = z;
    out.norm = G.norm();
    out.iterations = it;

    const Mat J = fd_jacobian(field, z);
    Vec delta;
    bool usable = J.allFinite();
    if (usable) {
      Eigen::CompleteOrthogonalDecomposition<Mat> cod(J);
      usable = cod.rank() > 0;
      if (usable) delta = -cod.solve(G);
      usable = usable && delta.allFinite();
    }
    if (out.norm <= opt.tol &&
        (!usable || delta.norm() <= kStepTol * std::max(1.0, z.norm()))) {
      out.converged = true;
      return out;
    }
    if (it >= opt.max_iterations) {
      out.message = out.norm <= opt.tol ? "residual within tolerance but the iterate is still moving"
                                        : "max_iterations exceeded";
      return out;
    }
    if (usable && opt.deflation) {
      const PeriodicSequence u = coords.lift(z);
      const Vec w = coords.restrict(
          PeriodicSequence(u.period(), u.dim(), log_deflation(u, *opt.deflation).second));
      const double denom = 1.0 - w.dot(delta);
      if (std::abs(denom) > 1e-12) delta /= denom;
      usable = delta.allFinite();
    }

    bool accepted = false;
    if (usable) {
      const double merit0 = std::log(out.norm) + log_weight(z);
      auto try_step = [&](const Vec& step, double t) {
        const Vec trial = z + step;
        Vec Gt;
        if (!safe_field(trial, Gt)) return false;
        const double merit = std::log(Gt.norm()) + log_weight(trial);
        if (!(merit < merit0 + std::log1p(-1e-4 * t))) return false;
        z = trial;
        G = std::move(Gt);
        return true;
      };
      if (previous_step.size() == delta.size() && delta.norm() > 0.0) {
        const double rho = delta.norm() / previous_step.norm();
        const double cosine = delta.dot(previous_step) / (delta.norm() * previous_step.norm());
        if (cosine > 0.99 && rho >= 0.5 && rho < 0.99) {
          accepted = try_step(std::min(1.0 / (1.0 - rho), 50.0) * delta, 1.0);
        }
      }
      for (double t = 1.0; !accepted && t >= 1e-10; t *= 0.5) accepted = try_step(t * delta, t);
      previous_step = delta;
    }
    if (!accepted) {
      previous_step.resize(0);
      if (perturbations >= kMaxPerturbations) {
        out.message = usable ? "line search stalled" : "singular finite-difference Jacobian";
        return out;
      }
      ++perturbations;
      const Vec kick = gaussian(z.size(), rng) * (1e-3 * std::max(1.0, z.norm()) /
                                                  std::sqrt(static_cast<double>(z.size())));
      Vec Gk;
      if (safe_field(z + kick, Gk)) {
        z += kick;
        G = std::move(Gk);
      }
      continue;
    }
    if (coords.lift(z).flat().norm() > opt.divergence_radius) {
      out.z = z;
      out.norm = G.norm();
      out.iterations = it + 1;
      out.message = "iterate diverged";
      return out;
    }
  }
}

double min_difference(const PeriodicSequence& u) {
  const PeriodicSequence du = forward_difference(u);
  double best = kInf;
  for (int k = 1; k <= u.period(); ++k) best = std::min(best, du.at(k).norm());
  return best;
}

PeriodicSequence zero_like(const Problem& prob) { return PeriodicSequence(prob.m(), prob.n()); }

SolveResult failed(const Problem& prob, const PeriodicSequence& best, int iterations,
                   std::string message) {
  SolveResult r{false, make_record(best, prob), iterations, std::move(message), false};
  return r;
}

/// Shared body of newton_solve and deflated_solve.
SolveResult solve_impl(const Problem& prob, const PeriodicSequence& u0, const SolverConfig& cfg,
                       const Deflation* deflation) {
  cfg.validate();
  prob.check_compatible(u0);
  const double p_minus = prob.exponent().p_minus();
  if (p_minus <= 1.0) throw NonsmoothError("newton_solve: p(k) must exceed 1 everywhere");
  const bool regularize = p_minus < 2.0;
  if (regularize && !(cfg.regularization_eps > 0.0)) {
    throw std::invalid_argument("newton_solve: p(k) < 2 requires regularization_eps > 0");
  }

  const Coordinates coords(cfg.subspace, prob.m(), prob.n());
  auto field_at = [&](double eps) -> Field {
    return [&prob, &coords, eps](const Vec& z) {
      return coords.restrict(gradient(coords.lift(z), prob, eps));
    };
  };
  CoreOptions opt;
  opt.tol = cfg.residual_tol;
  opt.max_iterations = cfg.max_iterations;
  opt.divergence_radius = kDivergenceFactor * std::max(cfg.start_radius, euclidean_norm(u0));
  opt.deflation = deflation;
  auto rng = make_rng(cfg.seed, kStreamPerturb);

  Vec z = coords.restrict(u0);
  int iterations = 0;
  bool flagged = false;
  if (regularize) {
    double eps = cfg.regularization_eps;
    double last_eps = eps;
    for (int stage = 0; stage < kRegularizationStages; ++stage, eps *= 0.5) {
      CoreResult r = newton_core(field_at(eps), coords, z, opt, rng);
      iterations += r.iterations;
      z = r.z;
      last_eps = eps;
      if (!r.converged) {
        return failed(prob, coords.lift(z), iterations, "regularized stage: " + r.message);
      }
    }
    if (min_difference(coords.lift(z)) > 10.0 * last_eps) {
      CoreResult polish = newton_core(field_at(0.0), coords, z, opt, rng);
      iterations += polish.iterations;
      if (polish.converged) {
        z = polish.z;
      } else {
        flagged = true;
      }
    } else {
      flagged = true;
    }
  } else {
    CoreResult r = newton_core(field_at(0.0), coords, z, opt, rng);
    iterations = r.iterations;
    z = r.z;
    if (!r.converged) return failed(prob, coords.lift(z), iterations, r.message);
  }

  SolveResult out{false, make_record(coords.lift(z), prob), iterations, "", false};
  out.record.regularized = flagged;
  if (out.record.residual_norm <= cfg.residual_tol) {
    out.converged = true;
  } else if (cfg.subspace != Subspace::full) {
    out.subspace_critical = true;
    std::ostringstream msg;
    msg << "critical on " << to_string(cfg.subspace) << " but the full residual is "
        << out.record.residual_norm;
    out.message = msg.str();
  } else {
    out.message = flagged ? "regularized iterate misses the unregularized tolerance"
                          : "converged gradient but residual above tolerance";
  }
  return out;
}

std::vector<PeriodicSequence> sequences_of(const SolutionSet& set) {
  std::vector<PeriodicSequence> out;
  out.reserve(set.records.size());
  for (const SolutionRecord& r : set.records) out.push_back(r.u);
  return out;
}

double spectral_radius(const Mat& symmetric) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(symmetric, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

PeriodicSequence project_onto(Subspace s, const PeriodicSequence& v) {
  switch (s) {
    case Subspace::full: return v;
    case Subspace::Y: return project_Y(v);
    case Subspace::W: return project_W(v);
  }
  return v;
}

/// Re-spaces path points to equal arc length on [first, last], keeping both fixed.
void redistribute(std::vector<Vec>& path, int first, int last) {
  if (last - first < 2) return;
  std::vector<double> s(last - first + 1, 0.0);
  for (int i = first + 1; i <= last; ++i) {
    s[i - first] = s[i - first - 1] + (path[i] - path[i - 1]).norm();
  }
  const double total = s.back();
  if (total == 0.0) return;
  std::vector<Vec> old(path.begin() + first, path.begin() + last + 1);
  int seg = 0;
  for (int j = 1; j < last - first; ++j) {
    const double target = total * j / (last - first);
    while (seg + 1 < static_cast<int>(s.size()) - 1 && s[seg + 1] < target) ++seg;
    const double len = s[seg + 1] - s[seg];
    const double w = len > 0.0 ? (target - s[seg]) / len : 0.0;
    path[first + j] = (1.0 - w) * old[seg] + w * old[seg + 1];
  }
}

}  // namespace

void SolverConfig::validate() const {
  if (starts < 1) throw std::invalid_argument("SolverConfig: starts must be >= 1");
  if (max_iterations < 0) throw std::invalid_argument("SolverConfig: max_iterations must be >= 0");
  if (!(residual_tol > 0.0) || !(dedupe_tol > 0.0)) {
    throw std::invalid_argument("SolverConfig: tolerances must be positive");
  }
  if (!(deflation_power > 0.0) || !(deflation_shift > 0.0)) {
    throw std::invalid_argument("SolverConfig: deflation power and shift must be positive");
  }
  if (!(regularization_eps >= 0.0)) {
    throw std::invalid_argument("SolverConfig: regularization_eps must be >= 0");
  }
  if (!(start_radius > 0.0)) throw std::invalid_argument("SolverConfig: start_radius must be positive");
  if (max_deflation_rounds < 0) throw std::invalid_argument("SolverConfig: max_deflation_rounds must be >= 0");
  if (path_points < 3) throw std::invalid_argument("SolverConfig: path_points must be >= 3");
  if (!(handoff_tol > 0.0)) throw std::invalid_argument("SolverConfig: handoff_tol must be positive");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::newton: return "newton";
    case Method::deflated: return "deflated";
    case Method::mountain_pass: return "mountain_pass";
    case Method::subspace_min: return "subspace_min";
  }
  return "newton";
}

std::string to_string(Objective o) {
  switch (o) {
    case Objective::action: return "J_m";
    case Objective::negated_action: return "-J_m";
    case Objective::mu_plus_lambda_potential: return "mu+lambda*J";
    case Objective::mu: return "mu";
  }
  return "J_m";
}

bool is_distinct(const PeriodicSequence& a, const PeriodicSequence& b, double tol,
                 bool collapse_constants) {
  if (collapse_constants) {
    return euclidean_norm(project_Y(a) - project_Y(b)) >
           tol * std::max(1.0, euclidean_norm(project_Y(a)));
  }
  return euclidean_norm(a - b) > tol * std::max(1.0, euclidean_norm(a));
}

bool same_solution(const Problem& prob, const PeriodicSequence& a, const PeriodicSequence& b,
                   const SolverConfig& cfg) {
  if (!is_distinct(a, b, cfg.dedupe_tol, prob.nonlinearity().identically_zero())) return true;
  for (double t : {0.25, 0.5, 0.75}) {
    try {
      if (!(residual((1.0 - t) * a + t * b, prob).norm <= cfg.residual_tol)) return false;
    } catch (const EvaluationError&) {
      return false;
    }
  }
  return true;
}

SolutionRecord make_record(const PeriodicSequence& u, const Problem& prob) {
  SolutionRecord r{u};
  try {
    r.residual_norm = residual(u, prob).norm;
    r.action_value = action(u, prob);
  } catch (const EvaluationError&) {
    r.residual_norm = kInf;
    r.action_value = kNaN;
    return r;
  }
  r.in_Y = is_in_Y(u);
  const SpectralSummary s = morse_summary(u, prob);
  r.morse_index = s.negative_count;
  r.classification = s.classification;
  return r;
}

SolveResult newton_solve(const Problem& prob, const PeriodicSequence& u0, const SolverConfig& cfg) {
  return solve_impl(prob, u0, cfg, nullptr);
}

double deflation_factor(const PeriodicSequence& u, const std::vector<PeriodicSequence>& known,
                        double power, double shift) {
  double factor = 1.0;
  for (const PeriodicSequence& ui : known) {
    const double dist = euclidean_norm(u - ui);
    factor *= std::pow(dist, -power) + shift;
  }
  return factor;
}

SolveResult deflated_solve(const Problem& prob, const SolutionSet& known,
                           const PeriodicSequence& u0, const SolverConfig& cfg) {
  const Deflation deflation{sequences_of(known), cfg.deflation_power, cfg.deflation_shift};
  SolveResult r = solve_impl(prob, u0, cfg, &deflation);
  if (!r.converged) return r;
  for (const PeriodicSequence& ui : deflation.known) {
    if (same_solution(prob, r.record.u, ui, cfg)) {
      r.converged = false;
      r.message = "converged onto a known solution";
      return r;
    }
  }
  return r;
}

MinimizeResult minimize(const Problem& prob, Subspace subspace, Objective objective,
                        const SolverConfig& cfg, const std::optional<PeriodicSequence>& start) {
  cfg.validate();
  const Coordinates coords(subspace, prob.m(), prob.n());
  auto value_of = [&](const PeriodicSequence& u) {
    switch (objective) {
      case Objective::action: return action(u, prob);
      case Objective::negated_action: return -action(u, prob);
      case Objective::mu_plus_lambda_potential:
        return mu(u, prob) + prob.lambda() * potential(u, prob);
      case Objective::mu: return mu(u, prob);
    }
    return action(u, prob);
  };
  auto gradient_of = [&](const PeriodicSequence& u) -> PeriodicSequence {
    switch (objective) {
      case Objective::action: return gradient(u, prob);
      case Objective::negated_action: return -gradient(u, prob);
      case Objective::mu_plus_lambda_potential:
        return mu_gradient(u, prob.exponent()) + prob.lambda() * potential_gradient(u, prob.nonlinearity());
      case Objective::mu: return mu_gradient(u, prob.exponent());
    }
    return gradient(u, prob);
  };
  const Field field = [&](const Vec& z) { return coords.restrict(gradient_of(coords.lift(z))); };
  auto value_z = [&](const Vec& z) {
    try {
      const double v = value_of(coords.lift(z));
      return std::isfinite(v) ? v : kInf;
    } catch (const EvaluationError&) {
      return kInf;
    }
  };

  Vec z;
  if (start) {
    prob.check_compatible(*start);
    z = coords.restrict(*start);
  } else {
    auto rng = make_rng(cfg.seed, kStreamMinimize);
    z = ball_point(coords.dim(), cfg.start_radius, rng);
  }
  const double guard = kDivergenceFactor * cfg.start_radius;

  MinimizeResult out{failed(prob, coords.lift(z), 0, "")};
  auto finish = [&](const Vec& zf, int iterations, std::string message, bool converged) {
    PeriodicSequence u = coords.lift(zf);
    if (subspace == Subspace::Y) u = project_Y(u);
    out.solve = SolveResult{converged, make_record(u, prob), iterations, std::move(message), false};
    out.objective_value = value_of(u);
    out.projected_gradient_norm = coords.restrict(gradient_of(u)).norm();
    return out;
  };

  // BFGS to a moderate tolerance, then Newton on the projected gradient.
  const double bfgs_tol = std::max(cfg.residual_tol, 1e-7);
  const Eigen::Index d = coords.dim();
  Mat H = Mat::Identity(d, d);
  double f = value_z(z);
  Vec g = field(z);
  int it = 0;
  const int max_bfgs = 50 * std::max(cfg.max_iterations, 1);
  for (; it < max_bfgs && g.norm() > bfgs_tol; ++it) {
    Vec dir = -H * g;
    if (dir.dot(g) >= 0.0) {
      H = Mat::Identity(d, d);
      dir = -g;
    }
    double t = 1.0;
    Vec trial;
    double ft = kInf;
    for (; t >= 1e-14; t *= 0.5) {
      trial = z + t * dir;
      ft = value_z(trial);
      if (ft <= f + 1e-4 * t * g.dot(dir)) break;
    }
    if (t < 1e-14) break;
    const Vec gt = field(trial);
    const Vec s = trial - z;
    const Vec y = gt - g;
    const double sy = s.dot(y);
    if (sy > 1e-14 * s.norm() * y.norm()) {
      if (it == 0) H *= sy / y.squaredNorm();
      const double rho = 1.0 / sy;
      const Mat I = Mat::Identity(d, d);
      H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) + rho * s * s.transpose();
    }
    z = trial;
    f = ft;
    g = gt;
    if (coords.lift(z).flat().norm() > guard) {
      return finish(z, it + 1,
                    "objective " + to_string(objective) + " is not coercive on " +
                        to_string(subspace) + " (divergence guard)",
                    false);
    }
  }

  CoreOptions opt;
  opt.tol = cfg.residual_tol;
  opt.max_iterations = cfg.max_iterations;
  opt.divergence_radius = guard;
  auto rng = make_rng(cfg.seed, kStreamPerturb);
  const CoreResult polish = newton_core(field, coords, z, opt, rng);
  it += polish.iterations;
  if (polish.converged && value_z(polish.z) <= f + 1e-8 * std::max(1.0, std::abs(f))) {
    return finish(polish.z, it, "", true);
  }
  const bool ok = g.norm() <= cfg.residual_tol;
  return finish(z, it, ok ? "" : "projected gradient above tolerance", ok);
}

SolveResult mountain_pass(const Problem& prob, const PeriodicSequence& u_a,
                          const PeriodicSequence& u_b, const SolverConfig& cfg) {
  cfg.validate();
  prob.check_compatible(u_a);
  prob.check_compatible(u_b);
  if (!is_distinct(u_a, u_b, cfg.dedupe_tol)) {
    throw std::invalid_argument("mountain_pass: endpoints must be distinct");
  }
  const int m = prob.m();
  const int n = prob.n();
  const int P = cfg.path_points;
  auto seq = [&](const Vec& v) { return PeriodicSequence(m, n, v); };
  auto energy = [&](const Vec& v) {
    try {
      return action(seq(v), prob);
    } catch (const EvaluationError&) {
      return kInf;
    }
  };
  auto grad = [&](const Vec& v) { return project_onto(cfg.subspace, gradient(seq(v), prob)).flat(); };

  std::vector<Vec> path(P);
  for (int i = 0; i < P; ++i) {
    const double t = static_cast<double>(i) / (P - 1);
    path[i] = (1.0 - t) * u_a.flat() + t * u_b.flat();
  }
  // Explicit gradient flow is stable for steps below 2 / (largest curvature).
  double curvature = 1e-12;
  for (const Vec& v : path) curvature = std::max(curvature, spectral_radius(hessian_fd(seq(v), prob).matrix));
  const double h = 0.5 / curvature;

  int c = 0;
  int it = 0;
  for (;; ++it) {
    std::vector<double> E(P);
    for (int i = 0; i < P; ++i) E[i] = energy(path[i]);
    c = static_cast<int>(std::max_element(E.begin(), E.end()) - E.begin());
    if (c == 0 || c == P - 1) {
      return failed(prob, seq(path[c]), it, "no separating barrier detected");
    }
    const Vec gc = grad(path[c]);
    if (gc.norm() <= cfg.handoff_tol * std::max(1.0, path[c].norm()) || it >= cfg.path_iterations) break;

    std::vector<Vec> next = path;
    for (int i = 1; i < P - 1; ++i) {
      Vec tau = path[i + 1] - path[i - 1];
      const double len = tau.norm();
      if (len > 0.0) tau /= len;
      const Vec g = (i == c) ? gc : grad(path[i]);
      const double along = g.dot(tau);
      next[i] = path[i] - h * (i == c ? Vec(g - 2.0 * along * tau) : Vec(g - along * tau));
    }
    path = std::move(next);
    redistribute(path, 0, c);
    redistribute(path, c, P - 1);
  }

  SolverConfig polish_cfg = cfg;
  SolveResult r = newton_solve(prob, seq(path[c]), polish_cfg);
  r.iterations += it;
  if (!r.converged) {
    r.message = "mountain pass polish failed: " + r.message;
    return r;
  }
  if (!is_distinct(r.record.u, u_a, cfg.dedupe_tol) || !is_distinct(r.record.u, u_b, cfg.dedupe_tol)) {
    r.converged = false;
    r.message = "no separating barrier detected";
  }
  return r;
}

std::vector<int> odd_symmetry_failures(const Problem& prob, const SolutionSet& set, double tol) {
  std::vector<int> out;
  for (std::size_t i = 0; i < set.records.size(); ++i) {
    double r = kInf;
    try {
      r = residual(-set.records[i].u, prob).norm;
    } catch (const EvaluationError&) {
    }
    if (!(r <= tol)) out.push_back(static_cast<int>(i));
  }
  return out;
}

SolutionSet find_multiple(const Problem& prob, const SolverConfig& cfg,
                          const std::vector<PeriodicSequence>& warm_starts) {
  cfg.validate();
  SolutionSet set;
  const Coordinates coords(cfg.subspace, prob.m(), prob.n());

  auto is_new = [&](const SolutionRecord& rec, const std::vector<SolutionRecord>& pool) {
    return std::all_of(pool.begin(), pool.end(), [&](const SolutionRecord& other) {
      return !same_solution(prob, rec.u, other.u, cfg);
    });
  };
  auto add = [&](SolutionRecord rec, Provenance prov) {
    if (!is_new(rec, set.records)) return false;
    set.records.push_back(std::move(rec));
    set.provenance.push_back(prov);
    return true;
  };
  auto note_result = [&](SolveResult& r, Provenance prov) {
    ++set.attempts;
    if (r.converged) return add(std::move(r.record), prov);
    ++set.failures;
    if (r.subspace_critical && is_new(r.record, set.discrepancies)) {
      set.discrepancies.push_back(std::move(r.record));
    }
    return false;
  };
  auto random_start = [&](std::uint64_t stream, std::uint64_t index) {
    auto rng = make_rng(cfg.seed, stream, index);
    return coords.lift(ball_point(coords.dim(), cfg.start_radius, rng));
  };

  // (1) the trivial candidate
  if (cfg.test_zero) {
    SolutionRecord zero = make_record(zero_like(prob), prob);
    ++set.attempts;
    if (zero.residual_norm <= cfg.residual_tol) {
      add(std::move(zero), Provenance{-1, Method::newton, false});
    } else {
      ++set.failures;
    }
  }

  // (2) warm starts, then random starts
  for (std::size_t i = 0; i < warm_starts.size(); ++i) {
    SolveResult r = newton_solve(prob, warm_starts[i], cfg);
    note_result(r, Provenance{static_cast<int>(i), Method::newton, true});
  }
  for (int i = 0; i < cfg.starts; ++i) {
    SolveResult r = newton_solve(prob, random_start(kStreamStarts, i), cfg);
    note_result(r, Provenance{i, Method::newton, false});
  }

  // (3) deflation rounds against a frozen snapshot of the pool
  if (!set.records.empty()) {
    for (int round = 0; round < cfg.max_deflation_rounds; ++round) {
      const SolutionSet snapshot = set;
      std::vector<std::pair<SolutionRecord, Provenance>> found;
      for (int i = 0; i < cfg.starts; ++i) {
        SolveResult r = deflated_solve(prob, snapshot, random_start(kStreamDeflation + round, i), cfg);
        ++set.attempts;
        if (!r.converged) {
          ++set.failures;
          if (r.subspace_critical && is_new(r.record, set.discrepancies)) {
            set.discrepancies.push_back(std::move(r.record));
          }
          continue;
        }
        found.emplace_back(std::move(r.record), Provenance{i, Method::deflated, false});
      }
      int added = 0;
      for (auto& [rec, prov] : found) added += add(std::move(rec), prov) ? 1 : 0;
      if (added == 0) break;
    }
  }

  auto sort_by_action = [&]() {
    std::vector<std::size_t> order(set.records.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return set.records[a].action_value < set.records[b].action_value;
    });
    std::vector<SolutionRecord> records;
    std::vector<Provenance> provenance;
    for (std::size_t i : order) {
      records.push_back(set.records[i]);
      provenance.push_back(set.provenance[i]);
    }
    set.records = std::move(records);
    set.provenance = std::move(provenance);
  };
  sort_by_action();

  // (4) mountain pass between the two lowest records
  if (cfg.mountain_pass && set.records.size() >= 2) {
    ++set.attempts;
    try {
      SolveResult r = mountain_pass(prob, set.records[0].u, set.records[1].u, cfg);
      if (r.converged) {
        add(std::move(r.record), Provenance{-1, Method::mountain_pass, false});
      } else {
        ++set.failures;
      }
    } catch (const std::exception&) {
      ++set.failures;
    }
    sort_by_action();
  }

  if (cfg.check_symmetry) {
    set.symmetry_checked = true;
    set.symmetry_failures = odd_symmetry_failures(prob, set, 10.0 * cfg.residual_tol);
  }
  return set;
}

std::vector<double> geometric_grid(double lo, double hi, int steps) {
  if (!(lo > 0.0) || steps < 1) throw std::invalid_argument("geometric_grid: need lo > 0, steps >= 1");
  if (steps == 1) return {lo};
  if (!(hi > lo)) throw std::invalid_argument("geometric_grid: need hi > lo");
  std::vector<double> grid(steps);
  const double ratio = std::log(hi / lo);
  for (int i = 0; i < steps; ++i) grid[i] = lo * std::exp(ratio * i / (steps - 1));
  grid.back() = hi;
  return grid;
}

SweepResult lambda_sweep(const Problem& prob_template, const std::vector<double>& lambda_grid,
                         const SolverConfig& cfg) {
  if (lambda_grid.empty()) throw std::invalid_argument("lambda_sweep: empty grid");
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    if (!(lambda_grid[i] > 0.0) || (i > 0 && !(lambda_grid[i] > lambda_grid[i - 1]))) {
      throw std::invalid_argument("lambda_sweep: grid must be positive and increasing");
    }
  }
  SweepResult out;
  out.lambda_grid = lambda_grid;
  std::vector<PeriodicSequence> warm;
  for (double lambda : lambda_grid) {
    SolutionSet set;
    std::string failure;
    try {
      set = find_multiple(prob_template.with_lambda(lambda), cfg, warm);
    } catch (const std::exception& e) {
      failure = e.what();
    }
    int nontrivial = 0;
    double min_action = kNaN;
    for (const SolutionRecord& r : set.records) {
      if (euclidean_norm(r.u) > cfg.dedupe_tol) ++nontrivial;
      if (std::isnan(min_action) || r.action_value < min_action) min_action = r.action_value;
    }
    out.counts.push_back(static_cast<int>(set.records.size()));
    out.nontrivial_counts.push_back(nontrivial);
    out.min_action.push_back(set.records.empty() ? kNaN : min_action);
    out.failures.push_back(failure);
    warm = sequences_of(set);
    out.sets.push_back(std::move(set));
  }
  for (std::size_t i = 0; i < lambda_grid.size();) {
    if (out.counts[i] < 3) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < lambda_grid.size() && out.counts[j + 1] >= 3) ++j;
    out.A_estimate.push_back(LambdaInterval{lambda_grid[i], lambda_grid[j]});
    i = j + 1;
  }
  return out;
}

}  // namespace pklap
