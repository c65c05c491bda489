#include "pklap/subspace.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace pklap {

std::string to_string(Subspace s) {
  switch (s) {
    case Subspace::full: return "H_m";
    case Subspace::Y: return "Y";
    case Subspace::W: return "W";
  }
  return "H_m";
}

Subspace parse_subspace(const std::string& name) {
  if (name == "H_m" || name == "full" || name == "H") return Subspace::full;
  if (name == "Y") return Subspace::Y;
  if (name == "W") return Subspace::W;
  throw std::invalid_argument("unknown subspace '" + name + "' (expected H_m, Y or W)");
}

Mat subspace_basis(Subspace s, int m, int n) {
  const Eigen::Index dim = static_cast<Eigen::Index>(m) * n;
  switch (s) {
    case Subspace::full:
      return Mat::Identity(dim, dim);
    case Subspace::W: {
      Mat B = Mat::Zero(dim, n);
      const double w = 1.0 / std::sqrt(static_cast<double>(m));
      for (int k = 0; k < m; ++k)
        for (int c = 0; c < n; ++c) B(k * n + c, c) = w;
      return B;
    }
    case Subspace::Y: {
      // Column (j, c): (1, ..., 1, -j, 0, ..., 0) / sqrt(j (j+1)) in component c.
      Mat B = Mat::Zero(dim, static_cast<Eigen::Index>(m - 1) * n);
      for (int j = 1; j < m; ++j) {
        const double w = 1.0 / std::sqrt(static_cast<double>(j) * (j + 1));
        for (int c = 0; c < n; ++c) {
          const Eigen::Index col = static_cast<Eigen::Index>(j - 1) * n + c;
          for (int k = 0; k < j; ++k) B(k * n + c, col) = w;
          B(j * n + c, col) = -j * w;
        }
      }
      return B;
    }
  }
  throw std::logic_error("subspace_basis: unreachable");
}

Mat fourier_modes(int m, int n) {
  const Eigen::Index dim = static_cast<Eigen::Index>(m) * n;
  Mat modes(dim, dim);
  Eigen::Index col = 0;
  auto add_mode = [&](const std::function<double(int)>& shape) {
    Vec v(m);
    for (int k = 1; k <= m; ++k) v[k - 1] = shape(k);
    v.normalize();
    for (int c = 0; c < n; ++c) {
      Vec full = Vec::Zero(dim);
      for (int k = 0; k < m; ++k) full[k * n + c] = v[k];
      modes.col(col++) = full;
    }
  };
  add_mode([](int) { return 1.0; });
  for (int j = 1; 2 * j < m; ++j) {
    const double omega = 2.0 * std::numbers::pi * j / m;
    add_mode([omega](int k) { return std::cos(omega * k); });
    add_mode([omega](int k) { return std::sin(omega * k); });
  }
  if (m % 2 == 0) add_mode([](int k) { return (k % 2 == 0) ? 1.0 : -1.0; });
  return modes;
}

}  // namespace pklap
