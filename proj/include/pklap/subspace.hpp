#pragma once

#include <string>

#include "pklap/core.hpp"

namespace pklap {

/// H_m = Y ⊕ W; `full` is H_m itself.
enum class Subspace { full, Y, W };

std::string to_string(Subspace s);
Subspace parse_subspace(const std::string& name);

/// Orthonormal basis of the subspace as columns of an (mn x d) matrix.
/// Y uses a Helmert-type basis, W the normalized constant sequences.
Mat subspace_basis(Subspace s, int m, int n);

/// Cycle-graph Laplacian eigenbasis tensored with R^n: the constant mode,
/// cos/sin pairs, and the alternating mode for even m. Orthonormal columns.
Mat fourier_modes(int m, int n);

}  // namespace pklap
