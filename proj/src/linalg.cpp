#include "pvi/linalg.hpp"

#include <utility>

namespace pvi {

namespace {

// In-place LU; returns the sign-adjusted product of pivots and records the smallest pivot.
// When rhs is given the same row operations are applied to it.
Complex eliminate(Matrix& m, std::vector<Complex>* rhs, Real& min_pivot) {
  const size_t n = m.size();
  Complex det(1);
  min_pivot = -1;
  for (size_t k = 0; k < n; ++k) {
    size_t piv = k;
    Real best = abs(m[k][k]);
    for (size_t i = k + 1; i < n; ++i) {
      Real v = abs(m[i][k]);
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (min_pivot < 0 || best < min_pivot) min_pivot = best;
    if (best == 0) return Complex();
    if (piv != k) {
      std::swap(m[piv], m[k]);
      if (rhs) std::swap((*rhs)[piv], (*rhs)[k]);
      det = -det;
    }
    det *= m[k][k];
    Complex inv = Complex(1) / m[k][k];
    for (size_t i = k + 1; i < n; ++i) {
      Complex f = m[i][k] * inv;
      if (f.is_zero()) continue;
      for (size_t j = k + 1; j < n; ++j) m[i][j] -= f * m[k][j];
      m[i][k] = f;
      if (rhs) (*rhs)[i] -= f * (*rhs)[k];
    }
  }
  if (min_pivot < 0) min_pivot = 0;
  return det;
}

}  // namespace

DetResult det_lu(Matrix m) {
  DetResult r;
  if (m.empty()) {
    r.value = Complex(1);
    r.min_pivot = Real(1);
    return r;
  }
  r.value = eliminate(m, nullptr, r.min_pivot);
  return r;
}

Complex det_cofactor(const Matrix& m) {
  const size_t n = m.size();
  if (n == 0) return Complex(1);
  if (n == 1) return m[0][0];
  Complex sum;
  for (size_t c = 0; c < n; ++c) {
    Matrix minor(n - 1);
    for (size_t i = 1; i < n; ++i)
      for (size_t j = 0; j < n; ++j)
        if (j != c) minor[i - 1].push_back(m[i][j]);
    Complex term = m[0][c] * det_cofactor(minor);
    if (c % 2) sum -= term;
    else sum += term;
  }
  return sum;
}

std::vector<Complex> solve_lu(Matrix m, std::vector<Complex> rhs) {
  const size_t n = m.size();
  Real mp;
  Complex d = eliminate(m, &rhs, mp);
  if (d.is_zero()) throw Error(ErrorCode::ZeroDeterminant, "singular linear system");
  std::vector<Complex> x(n);
  for (size_t ii = n; ii-- > 0;) {
    Complex s = rhs[ii];
    for (size_t j = ii + 1; j < n; ++j) s -= m[ii][j] * x[j];
    x[ii] = s / m[ii][ii];
  }
  return x;
}

}  // namespace pvi
