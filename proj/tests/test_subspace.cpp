#include <doctest.h>

#include "pklap/subspace.hpp"

using namespace pklap;

TEST_CASE("subspace bases are orthonormal and complementary") {
  for (int m : {2, 3, 6}) {
    for (int n : {1, 2}) {
      const Mat y = subspace_basis(Subspace::Y, m, n);
      const Mat w = subspace_basis(Subspace::W, m, n);
      CHECK(y.cols() == (m - 1) * n);
      CHECK(w.cols() == n);
      CHECK((y.transpose() * y - Mat::Identity(y.cols(), y.cols())).norm() < 1e-12);
      CHECK((y.transpose() * w).norm() < 1e-12);
      CHECK(subspace_basis(Subspace::full, m, n).cols() == m * n);
    }
  }
}

TEST_CASE("Fourier modes diagonalize the cycle Laplacian") {
  const int m = 6;
  Mat laplacian = Mat::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    laplacian(i, i) = 2.0;
    laplacian(i, (i + 1) % m) = -1.0;
    laplacian(i, (i + m - 1) % m) = -1.0;
  }
  const Mat q = fourier_modes(m, 1);
  CHECK((q.transpose() * q - Mat::Identity(m, m)).norm() < 1e-12);
  const Mat d = q.transpose() * laplacian * q;
  CHECK((d - Mat(d.diagonal().asDiagonal())).norm() < 1e-12);
}

TEST_CASE("subspace names") {
  CHECK(parse_subspace("Y") == Subspace::Y);
  CHECK(parse_subspace("H_m") == Subspace::full);
  CHECK(parse_subspace("W") == Subspace::W);
  CHECK(to_string(Subspace::Y) == "Y");
  CHECK_THROWS_AS(parse_subspace("Z"), std::invalid_argument);
}
