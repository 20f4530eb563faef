#pragma once

#include <doctest.h>

#include <random>
#include <string>

#include "pvi/numerics.hpp"

namespace pvi::test {

inline PrecisionContext make_ctx(int bits = 256, double tol = 1e-30) {
  PrecisionContext c;
  c.bits = bits;
  c.tol = tol;
  return c;
}

inline Real R(const char* s) { return real_from_string(s); }
inline Complex C(const char* re, const char* im = "0") { return complex_from_string(re, im); }

inline double dist(const Complex& a, const Complex& b) { return to_double(abs(a - b)); }
inline double rel(const Complex& a, const Complex& b) { return to_double(rel_diff(a, b)); }

// Uniform double in [lo, hi) as an exactly representable Real.
inline Real uniform(std::mt19937_64& g, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return Real(d(g));
}

}  // namespace pvi::test
