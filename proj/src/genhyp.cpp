#include "pvi/genhyp.hpp"

#include <algorithm>
#include <functional>

#include "pvi/linalg.hpp"

namespace pvi {

Partition::Partition(std::vector<int> p) : parts(std::move(p)) {
  while (!parts.empty() && parts.back() == 0) parts.pop_back();
  for (size_t i = 0; i < parts.size(); ++i) {
    if (parts[i] < 0 || (i > 0 && parts[i] > parts[i - 1]))
      throw Error(ErrorCode::InvalidArgument, "partition parts must be weakly decreasing and nonnegative");
  }
}

int Partition::weight() const {
  int w = 0;
  for (int x : parts) w += x;
  return w;
}

Partition Partition::conjugate() const {
  std::vector<int> c;
  if (parts.empty()) return Partition();
  for (int j = 0; j < parts[0]; ++j) {
    int n = 0;
    for (int x : parts)
      if (x > j) ++n;
    c.push_back(n);
  }
  return Partition(c);
}

namespace {

void enumerate(int w, int max_len, int max_part, std::vector<int>& cur, std::vector<Partition>& out) {
  if (w == 0) {
    out.emplace_back(cur);
    return;
  }
  if (max_len == 0) return;
  for (int k = std::min(w, max_part); k >= 1; --k) {
    cur.push_back(k);
    enumerate(w - k, max_len - 1, k, cur, out);
    cur.pop_back();
  }
}

void check_length(const Partition& kappa, int N) {
  if (kappa.length() > N) throw Error(ErrorCode::InvalidArgument, "partition longer than the number of variables");
}

}  // namespace

std::vector<Partition> partitions_of_weight(int w, int max_len) {
  if (w < 0) throw Error(ErrorCode::InvalidArgument, "negative partition weight");
  std::vector<Partition> out;
  std::vector<int> cur;
  enumerate(w, max_len, w, cur, out);
  return out;
}

Complex gen_pochhammer_kernel(const Complex& a, const Partition& kappa, int N) {
  check_length(kappa, N);
  Complex v(1);
  for (int j = 0; j < kappa.length(); ++j) v *= pochhammer(a - Complex(j), kappa[j]);
  return v;
}

Complex gen_pochhammer(const Complex& a, const Partition& kappa, int N, const PrecisionContext& ctx) {
  return escalate(ctx, [&] { return gen_pochhammer_kernel(rounded(a), kappa, N); });
}

Rational hook_product(const Partition& kappa) {
  Partition c = kappa.conjugate();
  BigInt h = 1;
  for (int i = 0; i < kappa.length(); ++i)
    for (int j = 0; j < kappa[i]; ++j) h *= (kappa[i] - j - 1) + (c[j] - i - 1) + 1;
  return Rational(h);
}

Rational schur_unit_value(const Partition& kappa, int N) {
  check_length(kappa, N);
  BigInt num = 1;
  for (int i = 0; i < kappa.length(); ++i)
    for (int j = 0; j < kappa[i]; ++j) num *= N + j - i;
  return Rational(num) / hook_product(kappa);
}

namespace {

Real rational_to_real(const Rational& q) {
  Real n(boost::multiprecision::numerator(q).str());
  Real d(boost::multiprecision::denominator(q).str());
  return n / d;
}

// Sum of prod_j row[j][kappa_j] * prod_{i<j} (l_i - l_j)^2, l_j = kappa_j + N - 1 - j,
// over partitions of weight w with at most N parts (exactly N when full_length).
class ShellSum {
 public:
  ShellSum(int N, bool full_length, const std::vector<std::vector<Complex>>& row)
      : N_(N), full_(full_length), row_(row), l_(N) {}

  Complex shell(int w) {
    acc_ = Complex();
    dfs(0, w, w, Complex(1), Real(1));
    return acc_;
  }

 private:
  void dfs(int j, int max_part, int remaining, const Complex& prod, const Real& vand) {
    if (j == N_) {
      if (remaining == 0) acc_ += prod * Complex(vand);
      return;
    }
    int lo = full_ ? 1 : 0;
    int rows_left = N_ - j;
    lo = std::max(lo, (remaining + rows_left - 1) / rows_left);
    int hi = std::min(max_part, remaining);
    if (full_) hi = std::min(hi, remaining - (rows_left - 1));
    for (int k = hi; k >= lo; --k) {
      const Complex& rf = row_[j][k];
      if (rf.is_zero()) continue;
      int lj = k + N_ - 1 - j;
      l_[j] = lj;
      Real v = vand;
      for (int i = 0; i < j; ++i) {
        long d = l_[i] - lj;
        v *= Real(d * d);
      }
      dfs(j + 1, k, remaining - k, prod * rf, v);
    }
  }

  int N_;
  bool full_;
  const std::vector<std::vector<Complex>>& row_;
  std::vector<int> l_;
  Complex acc_;
};

// row[j][k] = (a-j)_k (b-j)_k / ((c-j)_k (k+N-1-j)!) times (k+N-1-j) when with_l.
std::vector<std::vector<Complex>> row_factors(const Complex& a, const Complex& b, const Complex& c, int N, int M,
                                              bool with_l) {
  std::vector<std::vector<Complex>> row(N, std::vector<Complex>(M + 1));
  for (int j = 0; j < N; ++j) {
    Complex v = Complex(Real(1) / factorial_real(N - 1 - j));
    bool zero = false;
    for (int k = 0; k <= M; ++k) {
      if (zero) {
        row[j][k] = Complex();
        continue;
      }
      row[j][k] = with_l ? v * Complex(k + N - 1 - j) : v;
      if (k == M) break;
      Complex num = (a - Complex(j) + Complex(k)) * (b - Complex(j) + Complex(k));
      if (num.is_zero()) {
        zero = true;
        continue;
      }
      Complex den = c - Complex(j) + Complex(k);
      if (den.is_zero()) throw Error(ErrorCode::ParameterPole, "generalized Pochhammer of c vanishes");
      v = v * num / (den * Complex(k + N - j));
    }
  }
  return row;
}

SeriesResult sum_shells(ShellSum& sum_of, const Complex& t, int N, const SeriesControl& control, bool limit) {
  Real superfact(1);
  for (int k = 1; k < N; ++k) superfact *= factorial_real(k);
  Complex scale(Real(1) / superfact);
  if (limit) scale = scale / Complex(factorial_real(N - 1));
  SeriesResult res;
  Real tol(control.tail_tol);
  Complex sum, tp(1), prev;
  int first = limit ? N : 0;
  for (int w = 0; w < first; ++w) tp *= t;
  for (int w = first; w <= control.max_weight; ++w) {
    Complex cur = sum_of.shell(w) * tp * scale;
    tp *= t;
    sum += cur;
    res.shells = w + 1;
    if (w > first) {
      Real bound = tol * abs(sum);
      Real a = abs(cur), b = abs(prev);
      res.tail = a + b;
      if (a <= bound && b <= bound) {
        res.converged = true;
        break;
      }
      if (w == control.max_weight && !b.is_zero() && a >= b)
        throw Error(ErrorCode::TruncationNotConverged, "generalized hypergeometric shells are not decreasing");
    }
    prev = cur;
  }
  res.value = sum;
  return res;
}

SeriesResult round_result(SeriesResult r) {
  r.value = rounded(r.value);
  r.tail = rounded(r.tail);
  return r;
}

}  // namespace

Complex schur_equal_args(const Partition& kappa, int N, const Complex& t, const PrecisionContext& ctx) {
  ctx.validate();
  WorkingPrecision wp(ctx.bits + 32);
  Complex v = pow(rounded(t), long(kappa.weight())) * Complex(rational_to_real(schur_unit_value(kappa, N)));
  WorkingPrecision back(ctx.bits);
  return rounded(v);
}

SeriesResult f21_general(const Complex& a, const Complex& b, const Complex& c, int N, const Complex& t,
                         const SeriesControl& control, const PrecisionContext& ctx) {
  ctx.validate();
  if (N < 1) throw Error(ErrorCode::InvalidArgument, "f21_general needs N >= 1");
  if (control.max_weight < 0) throw Error(ErrorCode::InvalidArgument, "negative max_weight");
  SeriesResult r;
  {
    WorkingPrecision wp(ctx.bits + 32);
    auto row = row_factors(rounded(a), rounded(b), rounded(c), N, control.max_weight, false);
    ShellSum shells(N, false, row);
    r = sum_shells(shells, rounded(t), N, control, false);
  }
  WorkingPrecision back(ctx.bits);
  return round_result(r);
}

SeriesResult f21_limit_shell(const Complex& a, const Complex& b, const Complex& c_base, int N, const Complex& t,
                             const SeriesControl& control, const PrecisionContext& ctx) {
  ctx.validate();
  if (N < 1) throw Error(ErrorCode::InvalidArgument, "f21_limit_shell needs N >= 1");
  if (c_base != Complex(N - 1)) throw Error(ErrorCode::InvalidArgument, "f21_limit_shell needs c_base = N - 1");
  SeriesResult r;
  {
    WorkingPrecision wp(ctx.bits + 32);
    auto row = row_factors(rounded(a), rounded(b), Complex(N), N, control.max_weight, true);
    ShellSum shells(N, true, row);
    r = sum_shells(shells, rounded(t), N, control, true);
  }
  WorkingPrecision back(ctx.bits);
  return round_result(r);
}

namespace {

Complex f21_equal_det_kernel(const Complex& a, const Complex& b, const Complex& c, int N, const Complex& t) {
  Complex ap = a - Complex(N - 1), bp = b - Complex(N - 1), cp = c - Complex(N - 1);
  int mmax = 2 * (N - 1);
  std::vector<Complex> G(mmax + 1);
  for (int m = 0; m <= mmax; ++m) {
    Complex coef = pochhammer(ap, m) * pochhammer(bp, m) / pochhammer(cp, m);
    G[m] = coef * hyp2f1(ap + Complex(m), bp + Complex(m), cp + Complex(m), t);
  }
  Matrix M(N, std::vector<Complex>(N));
  for (int i = 0; i < N; ++i) {
    for (int k = 0; k < N; ++k) {
      Complex s;
      for (int q = 0; q <= std::min(i, k); ++q) {
        Real bin = factorial_real(i) / (factorial_real(q) * factorial_real(i - q));
        Real fall = factorial_real(k) / factorial_real(k - q);
        s += Complex(bin * fall) * pow(t, long(k - q)) * G[k + i - q];
      }
      M[i][k] = s / Complex(factorial_real(i));
    }
  }
  Complex pref(1);
  for (int j = 1; j <= N; ++j) {
    Complex d = pochhammer(ap, N - j) * pochhammer(bp, N - j);
    if (d.is_zero()) throw Error(ErrorCode::ParameterPole, "determinant form degenerate for these parameters");
    pref *= pochhammer(cp, N - j) / d;
  }
  return pref * det_lu(M).value;
}

}  // namespace

Complex f21_equal_det(const Complex& a, const Complex& b, const Complex& c, int N, const Complex& t,
                      const PrecisionContext& ctx) {
  if (N < 1) throw Error(ErrorCode::InvalidArgument, "f21_equal_det needs N >= 1");
  return escalate(ctx, [&] { return f21_equal_det_kernel(rounded(a), rounded(b), rounded(c), N, rounded(t)); });
}

namespace {

Complex f21_any(const Complex& a, const Complex& b, const Complex& c, int N, const Complex& t, F21Method m,
                const SeriesControl& control, const PrecisionContext& ctx) {
  if (m == F21Method::Determinant) return f21_equal_det(a, b, c, N, t, ctx);
  SeriesResult r = f21_general(a, b, c, N, t, control, ctx);
  if (!r.converged) throw Error(ErrorCode::TruncationNotConverged, "shell sum did not reach the tail tolerance");
  return r.value;
}

}  // namespace

Complex genhyp_average(const WeightParams& p, int N, F21Method m, const SeriesControl& control,
                       const PrecisionContext& ctx) {
  if (!p.xi.is_zero()) throw Error(ErrorCode::DomainError, "generalized hypergeometric form needs xi = 0");
  const Complex one(1), two(2);
  Complex w1 = p.omega1();
  Complex pref = escalate(ctx, [&] {
    WeightParams q = p.rounded_copy();
    Complex v(1);
    for (int j = 0; j < N; ++j)
      v *= Complex(factorial_real(j)) * gamma(two * w1 + Complex(j + 1)) *
           rgamma(one + q.mu + q.omega + Complex(j)) * rgamma(one - q.mu + q.omegabar + Complex(j));
    return v;
  });
  Complex F = f21_any(-two * p.mu, -p.mu - p.omega, Complex(N) - p.mu + p.omegabar, N, p.t, m, control, ctx);
  WorkingPrecision wp(ctx.bits);
  return rounded(pref * F);
}

GenhypReflections genhyp_reflections(const WeightParams& p, int N, F21Method m, const SeriesControl& control,
                                     const PrecisionContext& ctx) {
  if (!p.xi.is_zero()) throw Error(ErrorCode::DomainError, "generalized hypergeometric form needs xi = 0");
  if (N < 1) throw Error(ErrorCode::InvalidArgument, "reflections need N >= 1");
  const Complex one(1), two(2);
  Complex mu = p.mu, om = p.omega, omb = p.omegabar;
  Complex F0 = f21_any(-two * mu, -mu - om, Complex(N) - mu + omb, N, p.t, m, control, ctx);
  Complex Fr = f21_any(-two * mu, one - mu - om, Complex(N + 1) - mu + omb, N, p.t, m, control, ctx);
  Complex Fb = f21_any(-two * mu, -one - mu - om, Complex(N - 1) - mu + omb, N, p.t, m, control, ctx);
  WorkingPrecision wp(ctx.bits + 32);
  Complex sgn((N % 2) ? -1 : 1);
  GenhypReflections g;
  g.r = sgn * pochhammer(mu + om, N) / pochhammer(one - mu + omb, N) * Fr / F0;
  g.rbar = sgn * pochhammer(-mu + omb, N) / pochhammer(one + mu + om, N) * Fb / F0;
  WorkingPrecision back(ctx.bits);
  g.r = rounded(g.r);
  g.rbar = rounded(g.rbar);
  return g;
}

Complex euler_gamma_product(const Complex& mu, const Complex& omega, const Complex& omegabar, int N,
                            const PrecisionContext& ctx) {
  return escalate(ctx, [&] {
    Complex m = rounded(mu), o = rounded(omega), ob = rounded(omegabar);
    Complex w1 = (o + ob) / Complex(2);
    Complex two(2);
    Complex v(1);
    for (int j = 1; j <= N; ++j) {
      Complex J(j);
      v *= gamma(J + two * m + two * w1) * gamma(J - m + ob) * rgamma(J + two * w1) * rgamma(J + m + ob);
    }
    return v;
  });
}

}  // namespace pvi
