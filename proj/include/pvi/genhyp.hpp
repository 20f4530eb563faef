#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <vector>

#include "pvi/numerics.hpp"
#include "pvi/weights.hpp"

namespace pvi {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

struct Partition {
  std::vector<int> parts;  // weakly decreasing, no trailing zeros

  Partition() = default;
  explicit Partition(std::vector<int> p);
  int weight() const;
  int length() const { return static_cast<int>(parts.size()); }
  int operator[](int i) const { return i < length() ? parts[i] : 0; }
  // Column lengths.
  Partition conjugate() const;
};

// All partitions of w with at most max_len parts, in reverse lexicographic order.
std::vector<Partition> partitions_of_weight(int w, int max_len);

// prod_{j=1}^{N} (a - j + 1)_{kappa_j}
Complex gen_pochhammer(const Complex& a, const Partition& kappa, int N, const PrecisionContext& ctx);
Complex gen_pochhammer_kernel(const Complex& a, const Partition& kappa, int N);

// prod over cells of (arm + leg + 1).
Rational hook_product(const Partition& kappa);
// s_kappa(1, ..., 1) with N ones: prod over cells (N + j - i) / h(i, j).
Rational schur_unit_value(const Partition& kappa, int N);
// s_kappa(t, ..., t) = t^{|kappa|} s_kappa(1^N).
Complex schur_equal_args(const Partition& kappa, int N, const Complex& t, const PrecisionContext& ctx);

struct SeriesControl {
  int max_weight = 80;
  double tail_tol = 1e-30;
};

struct SeriesResult {
  Complex value;
  Real tail;          // |last shell| + |previous shell|
  int shells = 0;     // number of weight shells summed (0 .. max_weight)
  bool converged = false;
};

// 2F1^{(1)}(a, b; c; t, ..., t) with N equal arguments, summed by weight shells.
SeriesResult f21_general(const Complex& a, const Complex& b, const Complex& c, int N, const Complex& t,
                         const SeriesControl& control, const PrecisionContext& ctx);

// lim_{eps -> 0} eps * 2F1^{(1)}(a, b; c_base + eps; t, ..., t) for c_base = N - 1: only partitions of
// length N survive.
SeriesResult f21_limit_shell(const Complex& a, const Complex& b, const Complex& c_base, int N, const Complex& t,
                             const SeriesControl& control, const PrecisionContext& ctx);

// Same function as an N x N determinant of derivatives of the classical 2F1(a-N+1, b-N+1; c-N+1; t).
// Valid at t = 1 when Re(c - a - b) > 0.
Complex f21_equal_det(const Complex& a, const Complex& b, const Complex& c, int N, const Complex& t,
                      const PrecisionContext& ctx);

enum class F21Method { Series, Determinant };

struct GenhypReflections {
  Complex r, rbar;
};

// Toeplitz average with its t^{mu N} factor removed (xi = 0):
// prod_{j<N} j! Gamma(2 omega1 + j + 1) / (Gamma(1+mu+omega+j) Gamma(1-mu+omegabar+j)) * 2F1^{(1)}(-2mu, -mu-omega; N-mu+omegabar; t).
Complex genhyp_average(const WeightParams& p, int N, F21Method m, const SeriesControl& control,
                       const PrecisionContext& ctx);
GenhypReflections genhyp_reflections(const WeightParams& p, int N, F21Method m, const SeriesControl& control,
                                     const PrecisionContext& ctx);

// Gamma product for the generalized average at t = 1.
Complex euler_gamma_product(const Complex& mu, const Complex& omega, const Complex& omegabar, int N,
                            const PrecisionContext& ctx);

}  // namespace pvi
