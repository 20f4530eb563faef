#include "pvi/numerics.hpp"

#include <boost/multiprecision/gmp.hpp>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

namespace pvi {

namespace mp = boost::multiprecision;

const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::PoleAtC: return "PoleAtC";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::ParameterPole: return "ParameterPole";
    case ErrorCode::SingularPoint: return "SingularPoint";
    case ErrorCode::ZeroDeterminant: return "ZeroDeterminant";
    case ErrorCode::NearSingular: return "NearSingular";
    case ErrorCode::SlowConvergence: return "SlowConvergence";
    case ErrorCode::ZeroW0: return "ZeroW0";
    case ErrorCode::DivisionBreakdown: return "DivisionBreakdown";
    case ErrorCode::DegenerateOmega: return "DegenerateOmega";
    case ErrorCode::RootAmbiguity: return "RootAmbiguity";
    case ErrorCode::PoleStep: return "PoleStep";
    case ErrorCode::ZeroTau: return "ZeroTau";
    case ErrorCode::TruncationNotConverged: return "TruncationNotConverged";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what, int index)
    : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code), index_(index) {}

void PrecisionContext::validate() const {
  if (bits < 64) throw Error(ErrorCode::InvalidArgument, "bits must be >= 64");
  if (!(tol > 0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
  if (tol < std::ldexp(1.0, -bits + 16))
    throw Error(ErrorCode::InvalidArgument, "tol below 2^(16-bits)");
  if (max_escalations < 0) throw Error(ErrorCode::InvalidArgument, "max_escalations < 0");
}

PrecisionContext PrecisionContext::with_bits(int b) const {
  PrecisionContext c = *this;
  c.bits = b;
  return c;
}

unsigned bits_to_digits10(int bits) {
  return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120));
}

WorkingPrecision::WorkingPrecision(int bits) : saved_(Real::default_precision()) {
  Real::default_precision(bits_to_digits10(bits));
}

WorkingPrecision::~WorkingPrecision() { Real::default_precision(saved_); }

int current_bits() {
  return static_cast<int>(std::ceil(Real::default_precision() * 3.3219280948873623));
}

int digits_for_bits(int bits) { return static_cast<int>(bits_to_digits10(bits)); }

// ---------------------------------------------------------------- complex

Complex& Complex::operator+=(const Complex& o) {
  re += o.re;
  im += o.im;
  return *this;
}

Complex& Complex::operator-=(const Complex& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}

Complex& Complex::operator*=(const Complex& o) {
  Real r = re * o.re - im * o.im;
  Real i = re * o.im + im * o.re;
  re = r;
  im = i;
  return *this;
}

Complex& Complex::operator/=(const Complex& o) {
  if (o.im == 0) {
    re /= o.re;
    im /= o.re;
    return *this;
  }
  Real d = o.re * o.re + o.im * o.im;
  Real r = (re * o.re + im * o.im) / d;
  Real i = (im * o.re - re * o.im) / d;
  re = r;
  im = i;
  return *this;
}

Complex operator+(Complex a, const Complex& b) { return a += b; }
Complex operator-(Complex a, const Complex& b) { return a -= b; }
Complex operator*(Complex a, const Complex& b) { return a *= b; }
Complex operator/(Complex a, const Complex& b) { return a /= b; }
Complex operator-(const Complex& a) { return Complex(-a.re, -a.im); }
bool operator==(const Complex& a, const Complex& b) { return a.re == b.re && a.im == b.im; }
bool operator!=(const Complex& a, const Complex& b) { return !(a == b); }

Complex conj(const Complex& z) { return Complex(z.re, -z.im); }
Real norm(const Complex& z) { return z.re * z.re + z.im * z.im; }
Real abs(const Complex& z) { return mp::hypot(z.re, z.im); }
Real arg(const Complex& z) { return mp::atan2(z.im, z.re); }

Complex exp(const Complex& z) {
  Real m = mp::exp(z.re);
  if (z.im == 0) return Complex(m);
  return Complex(m * mp::cos(z.im), m * mp::sin(z.im));
}

Complex log(const Complex& z) {
  if (z.is_zero()) throw Error(ErrorCode::DomainError, "log(0)");
  return Complex(mp::log(abs(z)), arg(z));
}

Complex sqrt(const Complex& z) {
  if (z.is_zero()) return Complex();
  Real r = abs(z);
  Real a = mp::sqrt((r + mp::abs(z.re)) / 2);
  if (z.re >= 0) return Complex(a, z.im / (2 * a));
  Real b = z.im >= 0 ? a : Real(-a);
  return Complex(mp::abs(z.im) / (2 * a), b);
}

Complex pow(const Complex& z, long n) {
  if (n < 0) return Complex(1) / pow(z, -n);
  Complex r(1), b = z;
  while (n) {
    if (n & 1) r *= b;
    n >>= 1;
    if (n) b *= b;
  }
  return r;
}

Complex pow(const Complex& z, const Complex& w) {
  if (w.is_zero()) return Complex(1);
  if (z.is_zero()) {
    if (w.re > 0) return Complex();
    throw Error(ErrorCode::DomainError, "0 raised to non-positive power");
  }
  if (is_integer(w) && mp::abs(w.re) < 1000000) return pow(z, static_cast<long>(w.re));
  return exp(w * log(z));
}

Complex sin(const Complex& z) {
  if (z.im == 0) return Complex(mp::sin(z.re));
  return Complex(mp::sin(z.re) * mp::cosh(z.im), mp::cos(z.re) * mp::sinh(z.im));
}

Complex cos(const Complex& z) {
  if (z.im == 0) return Complex(mp::cos(z.re));
  return Complex(mp::cos(z.re) * mp::cosh(z.im), -mp::sin(z.re) * mp::sinh(z.im));
}

Complex expi(const Real& theta) { return Complex(mp::cos(theta), mp::sin(theta)); }
Complex polar(const Real& r, const Real& theta) { return Complex(r * mp::cos(theta), r * mp::sin(theta)); }
Complex I() { return Complex(Real(0), Real(1)); }

Real pi_real() {
  Real r;
  mpfr_const_pi(r.backend().data(), MPFR_RNDN);
  return r;
}

Real real_from_string(const std::string& s) {
  try {
    return Real(s);
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument, "not a number: " + s);
  }
}

Complex complex_from_string(const std::string& re, const std::string& im) {
  return Complex(real_from_string(re), real_from_string(im));
}

Real rel_diff(const Complex& a, const Complex& b) {
  Real d = abs(a - b);
  Real s = std::max(abs(a), abs(b));
  if (s < 1) return d;
  return d / s;
}

Real rounded(const Real& x) { return Real(x, Real::default_precision()); }
Complex rounded(const Complex& z) { return Complex(rounded(z.re), rounded(z.im)); }

double to_double(const Real& x) { return x.convert_to<double>(); }

Real pow2(int e) {
  Real r(1);
  return mp::ldexp(r, e);
}

bool is_integer(const Complex& z) { return z.im == 0 && z.re == mp::floor(z.re); }
bool is_nonpositive_integer(const Complex& z) { return is_integer(z) && z.re <= 0; }

bool near_integer(const Complex& z, const Real& eps) {
  return mp::abs(z.im) < eps && mp::abs(z.re - mp::round(z.re)) < eps;
}

// ---------------------------------------------------------------- gamma

namespace {

std::mutex g_bern_mutex;
std::vector<mp::mpz_int> g_tangent;  // g_tangent[k-1] = tangent number T_{2k-1}

// B_{2k} = (-1)^{k-1} 2k T_{2k-1} / (4^k (4^k - 1))
void bernoulli_b2k(int k, mp::mpz_int& num, mp::mpz_int& den) {
  std::lock_guard<std::mutex> lock(g_bern_mutex);
  int n = static_cast<int>(g_tangent.size());
  if (k > n) {
    int m = std::max(k, 2 * n);
    std::vector<mp::mpz_int> t(m + 1);
    t[1] = 1;
    for (int j = 2; j <= m; ++j) t[j] = (j - 1) * t[j - 1];
    for (int j = 2; j <= m; ++j)
      for (int i = j; i <= m; ++i) t[i] = (i - j) * t[i - 1] + (i - j + 2) * t[i];
    g_tangent.assign(t.begin() + 1, t.end());
  }
  mp::mpz_int four_k = mp::mpz_int(1) << (2 * k);
  num = 2 * k * g_tangent[k - 1];
  if (k % 2 == 0) num = -num;
  den = four_k * (four_k - 1);
}

Real real_from_mpz(const mp::mpz_int& z) {
  Real r;
  mpfr_set_z(r.backend().data(), z.backend().data(), MPFR_RNDN);
  return r;
}

Complex gamma_stirling(const Complex& z0, int bits) {
  // z0 has Re >= 1/2
  double R = 0.3 * bits + 10;
  long m = 0;
  double re = to_double(z0.re);
  if (re < R) m = static_cast<long>(std::ceil(R - re));
  Complex z = z0 + Complex(Real(m));
  Complex lz = log(z);
  Complex s = (z - Complex(Real(0.5))) * lz - z + Complex(mp::log(2 * pi_real()) / 2);
  Complex zinv = Complex(1) / z;
  Complex zinv2 = zinv * zinv;
  Complex zp = zinv;
  Real thresh = pow2(-(bits + 10));
  for (int k = 1; k < 100000; ++k) {
    mp::mpz_int num, den;
    bernoulli_b2k(k, num, den);
    Real coef = real_from_mpz(num) / (real_from_mpz(den) * (2 * k) * (2 * k - 1));
    Complex term = zp * Complex(coef);
    s += term;
    if (abs(term) < thresh) break;
    zp *= zinv2;
  }
  Complex g = exp(s);
  if (m > 0) {
    Complex p(1);
    for (long j = 0; j < m; ++j) p *= z0 + Complex(Real(j));
    g /= p;
  }
  return g;
}

}  // namespace

Complex gamma(const Complex& z) {
  if (is_nonpositive_integer(z)) throw Error(ErrorCode::ParameterPole, "Gamma at nonpositive integer");
  int bits = current_bits();
  if (z.is_real()) return Complex(mp::tgamma(z.re));
  Complex r;
  {
    WorkingPrecision wp(bits + 24);
    if (z.re < Real(0.5)) {
      Real p = pi_real();
      Complex one_minus = Complex(1) - z;
      r = Complex(p) / (sin(Complex(p) * z) * gamma_stirling(one_minus, bits + 24));
    } else {
      r = gamma_stirling(z, bits + 24);
    }
  }
  return rounded(r);
}

Complex rgamma(const Complex& z) {
  if (is_nonpositive_integer(z)) return Complex();
  return Complex(1) / gamma(z);
}

Complex pochhammer(const Complex& a, int n) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "pochhammer with n < 0");
  Complex r(1);
  for (int j = 0; j < n; ++j) r *= a + Complex(j);
  return r;
}

Real factorial_real(int n) {
  Real r(1);
  for (int j = 2; j <= n; ++j) r *= j;
  return r;
}

// ---------------------------------------------------------------- 2F1

namespace {

struct FD {
  Complex f;
  Complex df;
};

Real series_eps() { return pow2(-(current_bits() + 8)); }

// Terminating polynomial when a or b is a nonpositive integer; returns -1 otherwise.
long terminating_degree(const Complex& a, const Complex& b) {
  long m = -1;
  if (is_nonpositive_integer(a)) m = static_cast<long>(-a.re);
  if (is_nonpositive_integer(b)) {
    long mb = static_cast<long>(-b.re);
    m = m < 0 ? mb : std::min(m, mb);
  }
  return m;
}

FD series(const Complex& a, const Complex& b, const Complex& c, const Complex& z) {
  Complex term(1), sum(1), dsum;
  Real eps = series_eps();
  int small = 0;
  for (long n = 0; n < 200000; ++n) {
    Complex cn = c + Complex(Real(n));
    Complex num = (a + Complex(Real(n))) * (b + Complex(Real(n)));
    if (num.is_zero()) return {sum, dsum};
    if (cn.is_zero()) throw Error(ErrorCode::PoleAtC, "c is a nonpositive integer");
    Complex ratio = num / (cn * Complex(Real(n + 1)));
    term *= ratio * z;
    sum += term;
    dsum += term * Complex(Real(n + 1)) / z;
    Real at = abs(term);
    if (at <= eps * abs(sum) && abs(ratio * z) < Real(0.9)) {
      if (++small >= 2) return {sum, dsum};
    } else {
      small = 0;
    }
  }
  throw Error(ErrorCode::NoConvergence, "2F1 series");
}

// F and F' at z0 + h from F, F' at z0 by Taylor expansion of the hypergeometric ODE.
FD taylor_step(const Complex& a, const Complex& b, const Complex& c, const Complex& z0,
               const FD& s, const Complex& h) {
  Complex p0 = z0 * (Complex(1) - z0);
  Complex p1 = Complex(1) - Complex(2) * z0;
  Complex apb1 = a + b + Complex(1);
  Complex q0 = c - apb1 * z0;
  Complex q1 = -apb1;
  Complex ab = a * b;
  Complex h2 = h * h;
  Complex e0 = s.f, e1 = s.df * h;
  Complex f = e0 + e1, dfh = e1;  // dfh = h * F'
  Real eps = series_eps();
  Real scale = std::max(abs(e0), abs(e1));
  int small = 0;
  for (long m = 0; m < 200000; ++m) {
    Complex mm{Real(m)};
    Complex t1 = (p1 * mm + q0) * Complex(Real(m + 1)) * e1 * h;
    Complex t2 = (q1 * mm - Complex(Real(m * (m - 1))) - ab) * e0 * h2;
    Complex e2 = -(t1 + t2) / (p0 * Complex(Real((m + 2) * (m + 1))));
    f += e2;
    dfh += e2 * Complex(Real(m + 2));
    scale = std::max(scale, abs(f));
    if (abs(e2) <= eps * scale && m > 4) {
      if (++small >= 3) return {f, dfh / h};
    } else {
      small = 0;
    }
    e0 = e1;
    e1 = e2;
  }
  throw Error(ErrorCode::NoConvergence, "2F1 ODE continuation");
}

FD continue_segment(const Complex& a, const Complex& b, const Complex& c, Complex z, FD s,
                    const Complex& target) {
  for (int guard = 0; guard < 100000; ++guard) {
    Complex d = target - z;
    Real len = abs(d);
    if (len == 0) return s;
    Real rho = std::min(abs(z), abs(Complex(1) - z));
    Real step = rho / 3;
    Complex h = step >= len ? d : d * Complex(step / len);
    s = taylor_step(a, b, c, z, s, h);
    z = step >= len ? target : z + h;
  }
  throw Error(ErrorCode::NoConvergence, "2F1 path too long");
}

Complex hyp2f1_core(const Complex& a, const Complex& b, const Complex& c, const Complex& z) {
  if (z.is_zero()) return Complex(1);
  long m = terminating_degree(a, b);
  if (m >= 0) {
    Complex term(1), sum(1);
    for (long n = 0; n < m; ++n) {
      Complex cn = c + Complex(Real(n));
      if (cn.is_zero()) throw Error(ErrorCode::PoleAtC, "c pole before termination");
      term *= (a + Complex(Real(n))) * (b + Complex(Real(n))) / (cn * Complex(Real(n + 1))) * z;
      sum += term;
    }
    return sum;
  }
  if (is_nonpositive_integer(c)) throw Error(ErrorCode::PoleAtC, "c is a nonpositive integer");
  if (z == Complex(1)) {
    Complex s = c - a - b;
    if (!(s.re > 0)) throw Error(ErrorCode::DomainError, "2F1 at z=1 requires Re(c-a-b) > 0");
    return gamma(c) * gamma(s) * rgamma(c - a) * rgamma(c - b);
  }
  Real az = abs(z);
  if (az <= Real(0.5)) return series(a, b, c, z).f;
  std::vector<Complex> path;
  Complex start;
  if (z.im == 0 && z.re > 1) {
    // on the cut: continued from below
    start = Complex(Real(0.4));
    path = {Complex(Real(1), Real(-0.6)), z};
  } else {
    start = z * Complex(Real(0.45) / az);
    path = {z};
  }
  FD s = series(a, b, c, start);
  Complex cur = start;
  for (const auto& p : path) {
    s = continue_segment(a, b, c, cur, s, p);
    cur = p;
  }
  return s.f;
}

}  // namespace

Complex hyp2f1(const Complex& a, const Complex& b, const Complex& c, const Complex& z) {
  int bits = current_bits();
  Complex r;
  {
    WorkingPrecision wp(bits + 16);
    r = hyp2f1_core(a, b, c, z);
  }
  return rounded(r);
}

Complex hyp2f1_regularized(const Complex& a, const Complex& b, const Complex& c, const Complex& z) {
  if (is_nonpositive_integer(c)) {
    int k = static_cast<int>(-c.re);
    if (z.is_zero()) return Complex();
    Complex one(1);
    Complex pref = pochhammer(a, k + 1) * pochhammer(b, k + 1) / Complex(factorial_real(k + 1));
    if (pref.is_zero()) return Complex();
    return pref * pow(z, static_cast<long>(k + 1)) *
           hyp2f1(a + Complex(k + 1), b + Complex(k + 1), Complex(k + 2), z);
  }
  if (z == Complex(1) && terminating_degree(a, b) < 0) {
    Complex s = c - a - b;
    if (!(s.re > 0)) throw Error(ErrorCode::DomainError, "2F1 at z=1 requires Re(c-a-b) > 0");
    return gamma(s) * rgamma(c - a) * rgamma(c - b);
  }
  return rgamma(c) * hyp2f1(a, b, c, z);
}

Complex hyp2f1_dz(const Complex& a, const Complex& b, const Complex& c, const Complex& z) {
  Complex ab = a * b;
  if (ab.is_zero()) return Complex();
  if (is_nonpositive_integer(c) && terminating_degree(a, b) < 0)
    throw Error(ErrorCode::PoleAtC, "c is a nonpositive integer");
  return ab / c * hyp2f1(a + Complex(1), b + Complex(1), c + Complex(1), z);
}

// ---------------------------------------------------------------- elliptic

namespace {

struct Agm {
  Real a;
  Real csum;  // sum 2^{n-1} c_n^2
};

Agm agm_with_sum(const Real& k0) {
  Real k = rounded(k0);
  Real a(1), b = mp::sqrt(Real(1) - k * k), c = k;
  Real sum = c * c / 2;
  Real w(1);
  Real eps = pow2(-(current_bits() + 4));
  for (int n = 0; n < 64 + current_bits(); ++n) {
    if (mp::abs(a - b) <= eps * a) break;
    Real an = (a + b) / 2;
    Real bn = mp::sqrt(a * b);
    c = (a - b) / 2;
    sum += w * c * c;
    w *= 2;
    a = an;
    b = bn;
  }
  return {a, sum};
}

}  // namespace

Real ellipk(const Real& k) {
  if (k < 0 || k >= 1) throw Error(ErrorCode::DomainError, "K(k) requires 0 <= k < 1");
  int bits = current_bits();
  Real r;
  {
    WorkingPrecision wp(bits + 16);
    Agm g = agm_with_sum(k);
    r = pi_real() / (2 * g.a);
  }
  return rounded(r);
}

Real ellipe(const Real& k) {
  if (k < 0 || k > 1) throw Error(ErrorCode::DomainError, "E(k) requires 0 <= k <= 1");
  if (k == 1) return Real(1);
  int bits = current_bits();
  Real r;
  {
    WorkingPrecision wp(bits + 16);
    Agm g = agm_with_sum(k);
    r = pi_real() / (2 * g.a) * (1 - g.csum);
  }
  return rounded(r);
}

// ---------------------------------------------------------------- escalating wrappers

Complex gauss_2f1(const Complex& a, const Complex& b, const Complex& c, const Complex& z,
                  const PrecisionContext& ctx) {
  return escalate(ctx, [&] { return hyp2f1(a, b, c, z); });
}

Complex gauss_2f1_regularized(const Complex& a, const Complex& b, const Complex& c,
                              const Complex& z, const PrecisionContext& ctx) {
  return escalate(ctx, [&] { return hyp2f1_regularized(a, b, c, z); });
}

Complex gauss_2f1_dz(const Complex& a, const Complex& b, const Complex& c, const Complex& z,
                     const PrecisionContext& ctx) {
  return escalate(ctx, [&] { return hyp2f1_dz(a, b, c, z); });
}

Real elliptic_K(const Real& k, const PrecisionContext& ctx) {
  return escalate(ctx, [&] { return Complex(ellipk(k)); }).re;
}

Real elliptic_E(const Real& k, const PrecisionContext& ctx) {
  return escalate(ctx, [&] { return Complex(ellipe(k)); }).re;
}

Complex pochhammer(const Complex& a, int n, const PrecisionContext& ctx) {
  ctx.validate();
  WorkingPrecision wp(ctx.bits);
  return pochhammer(a, n);
}

// ---------------------------------------------------------------- formatting

std::string format_real(const Real& x, int digits) {
  Real v = x;
  std::string s = v.str(digits, std::ios::fixed);
  bool all_zero = true;
  for (char ch : s)
    if (ch >= '1' && ch <= '9') all_zero = false;
  if (all_zero && !s.empty() && s[0] == '-') s.erase(0, 1);
  return s;
}

std::string format_complex(const Complex& z, int digits) {
  std::string re = format_real(z.re, digits);
  std::string im = format_real(z.im, digits);
  if (im[0] == '-') return re + im + "i";
  return re + "+" + im + "i";
}

}  // namespace pvi
