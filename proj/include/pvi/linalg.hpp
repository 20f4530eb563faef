#pragma once

#include <vector>

#include "pvi/numerics.hpp"

namespace pvi {

using Matrix = std::vector<std::vector<Complex>>;

struct DetResult {
  Complex value;
  Real min_pivot;  // smallest pivot magnitude met during elimination
};

// LU with partial pivoting at the current working precision.
DetResult det_lu(Matrix m);
// Laplace expansion along the first row; exponential cost, for small n only.
Complex det_cofactor(const Matrix& m);
// Solves m x = rhs by LU with partial pivoting.
std::vector<Complex> solve_lu(Matrix m, std::vector<Complex> rhs);

}  // namespace pvi
