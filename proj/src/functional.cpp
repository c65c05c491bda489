#include "pklap/functional.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pklap/operators.hpp"
#include "pklap/random.hpp"

namespace pklap {

namespace {

void require_smooth(const ExponentFunction& p) {
  if (p.p_minus() <= 1.0) {
    throw NonsmoothError("gradient: p(k) = 1 somewhere, the derivative is set-valued");
  }
}

}  // namespace

double mu(const PeriodicSequence& u, const ExponentFunction& p) {
  if (p.period() != u.period()) throw std::invalid_argument("mu: period mismatch");
  double sum = 0.0;
  for (int k = 1; k <= u.period(); ++k) {
    const double pk = p(k - 1);
    const double r = (u.at(k) - u.at(k - 1)).norm();
    sum += std::pow(r, pk) / pk;
  }
  return sum;
}

double mu(const PeriodicSequence& u, const Problem& prob) {
  prob.check_compatible(u);
  return mu(u, prob.exponent());
}

double potential(const PeriodicSequence& u, const Nonlinearity& nl) {
  if (nl.period() != u.period() || nl.dim() != u.dim()) {
    throw std::invalid_argument("potential: shape mismatch");
  }
  if (nl.identically_zero()) return 0.0;
  double sum = 0.0;
  for (int k = 1; k <= u.period(); ++k) sum += nl.F(k, u.at(k + 1), u.at(k));
  return -sum;
}

double potential(const PeriodicSequence& u, const Problem& prob) {
  return potential(u, prob.nonlinearity());
}

double action(const PeriodicSequence& u, const Problem& prob) {
  prob.check_compatible(u);
  const double value = mu(u, prob.exponent()) + prob.lambda() * potential(u, prob.nonlinearity());
  if (!std::isfinite(value)) throw EvaluationError("action: non-finite value");
  return value;
}

PeriodicSequence gradient(const PeriodicSequence& u, const Problem& prob) {
  return gradient(u, prob, 0.0);
}

PeriodicSequence gradient(const PeriodicSequence& u, const Problem& prob, double eps) {
  require_smooth(prob.exponent());
  return -residual(u, prob, eps).values;
}

PeriodicSequence mu_gradient(const PeriodicSequence& u, const ExponentFunction& p) {
  require_smooth(p);
  return -p_laplacian(u, p);
}

PeriodicSequence potential_gradient(const PeriodicSequence& u, const Nonlinearity& nl) {
  const int m = u.period();
  const int n = u.dim();
  Vec g = Vec::Zero(u.size());
  if (!nl.identically_zero()) {
    for (int k = 1; k <= m; ++k) {
      g.segment((k - 1) * n, n) = -nl.f(k, u.at(k + 1), u.at(k), u.at(k - 1));
    }
  }
  return PeriodicSequence(m, n, std::move(g));
}

GradientCheck gradient_check(const Problem& prob, int points, double step, std::uint64_t seed,
                             double radius) {
  if (points < 1) throw std::invalid_argument("gradient_check: points must be >= 1");
  if (!(step > 0.0)) throw std::invalid_argument("gradient_check: step must be positive");
  const int m = prob.m();
  const int n = prob.n();
  const Eigen::Index d = Eigen::Index{m} * n;
  GradientCheck out;
  out.points = points;
  for (int i = 0; i < points; ++i) {
    auto rng = make_rng(seed, 0x90, static_cast<std::uint64_t>(i));
    std::uniform_real_distribution<double> unit(-radius, radius);
    Vec x(d);
    for (Eigen::Index j = 0; j < d; ++j) x[j] = unit(rng);
    const PeriodicSequence u(m, n, x);
    const Vec analytic = gradient(u, prob).flat();
    Vec numeric(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      const double h = step * std::max(1.0, std::abs(x[j]));
      Vec plus = x;
      Vec minus = x;
      plus[j] += h;
      minus[j] -= h;
      numeric[j] = (action(PeriodicSequence(m, n, plus), prob) -
                    action(PeriodicSequence(m, n, minus), prob)) / (2.0 * h);
    }
    const double err =
        (analytic - numeric).lpNorm<Eigen::Infinity>() / std::max(1.0, analytic.lpNorm<Eigen::Infinity>());
    if (out.worst_index < 0 || err > out.max_relative_error) {
      out.max_relative_error = err;
      out.worst_index = i;
      out.worst_point = x;
      out.worst_analytic = analytic;
      out.worst_numeric = numeric;
    }
  }
  return out;
}

double default_hessian_step(const PeriodicSequence& u) {
  return 1e-5 * std::max(1.0, euclidean_norm(u));
}

HessianFD hessian_fd(const PeriodicSequence& u, const Problem& prob) {
  return hessian_fd(u, prob, default_hessian_step(u));
}

HessianFD hessian_fd(const PeriodicSequence& u, const Problem& prob, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("hessian_fd: step must be positive");
  prob.check_compatible(u);
  HessianFD out;
  if (prob.exponent().p_minus() < 2.0) {
    out.warnings.emplace_back(
        "p(k) < 2 somewhere: the second derivative of |a|^p is singular at Δu = 0");
  }
  const Eigen::Index d = u.size();
  const int m = u.period();
  const int n = u.dim();
  Mat H(d, d);
  // Columns are independent; evaluated in index order so the result is
  // reproducible bit for bit.
  for (Eigen::Index j = 0; j < d; ++j) {
    Vec plus = u.flat();
    Vec minus = u.flat();
    plus[j] += step;
    minus[j] -= step;
    const Vec gp = gradient(PeriodicSequence(m, n, std::move(plus)), prob).flat();
    const Vec gm = gradient(PeriodicSequence(m, n, std::move(minus)), prob).flat();
    H.col(j) = (gp - gm) / (2.0 * step);
  }
  const double scale = H.norm();
  out.asymmetry = scale > 0.0 ? (H - H.transpose()).norm() / scale : 0.0;
  if (out.asymmetry > 1e-4) {
    std::ostringstream msg;
    msg << "finite-difference Hessian asymmetry " << out.asymmetry << " exceeds 1e-4";
    out.warnings.push_back(msg.str());
  }
  out.matrix = 0.5 * (H + H.transpose());
  return out;
}

SpectralSummary summarize_spectrum(const Mat& symmetric) {
  SpectralSummary s;
  Eigen::SelfAdjointEigenSolver<Mat> solver(symmetric, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    s.warnings.emplace_back("eigenvalue solver failed");
    return s;
  }
  const Vec& ev = solver.eigenvalues();
  s.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  const double radius = ev.size() > 0 ? ev.cwiseAbs().maxCoeff() : 0.0;
  s.zero_tolerance = 1e-7 * std::max(1.0, radius);
  for (double e : s.eigenvalues) {
    if (std::abs(e) <= s.zero_tolerance) {
      ++s.zero_count;
    } else if (e < 0.0) {
      ++s.negative_count;
    } else {
      ++s.positive_count;
    }
  }
  if (s.zero_count > 0) {
    s.classification = Classification::degenerate;
  } else if (s.negative_count == 0) {
    s.classification = Classification::minimum;
  } else if (s.positive_count == 0) {
    s.classification = Classification::maximum;
  } else {
    s.classification = Classification::saddle;
  }
  return s;
}

SpectralSummary morse_summary(const PeriodicSequence& u, const Problem& prob) {
  const double step = default_hessian_step(u);
  bool nonsmooth = false;
  if (prob.exponent().p_minus() < 2.0) {
    const PeriodicSequence du = forward_difference(u);
    for (int k = 1; k <= u.period(); ++k) {
      if (prob.exponent()(k) < 2.0 && du.at(k).norm() <= 10.0 * step) nonsmooth = true;
    }
  }
  SpectralSummary s;
  try {
    HessianFD h = hessian_fd(u, prob, step);
    s = summarize_spectrum(h.matrix);
    s.warnings.insert(s.warnings.end(), h.warnings.begin(), h.warnings.end());
  } catch (const NonsmoothError& e) {
    s.warnings.emplace_back(e.what());
    nonsmooth = true;
  }
  if (nonsmooth) {
    s.classification = Classification::degenerate;
    s.warnings.emplace_back("Hessian may not exist (p(k) < 2 with Δu(k) near 0); reported degenerate");
  }
  return s;
}

}  // namespace pklap
