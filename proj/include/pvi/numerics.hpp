#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pvi {

using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                           boost::multiprecision::et_off>;

enum class ErrorCode {
  PoleAtC,
  NoConvergence,
  DomainError,
  ParameterPole,
  SingularPoint,
  ZeroDeterminant,
  NearSingular,
  SlowConvergence,
  ZeroW0,
  DivisionBreakdown,
  DegenerateOmega,
  RootAmbiguity,
  PoleStep,
  ZeroTau,
  TruncationNotConverged,
  InvalidArgument,
};

const char* error_name(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, int index = -1);
  ErrorCode code() const { return code_; }
  int index() const { return index_; }

 private:
  ErrorCode code_;
  int index_;
};

struct PrecisionContext {
  int bits = 256;
  double tol = 1e-30;
  int max_escalations = 2;

  void validate() const;
  PrecisionContext with_bits(int b) const;
};

// Sets the default precision of newly created Real values for the lifetime of
// the object.
class WorkingPrecision {
 public:
  explicit WorkingPrecision(int bits);
  ~WorkingPrecision();
  WorkingPrecision(const WorkingPrecision&) = delete;
  WorkingPrecision& operator=(const WorkingPrecision&) = delete;

 private:
  unsigned saved_;
};

int current_bits();
unsigned bits_to_digits10(int bits);

struct Complex {
  Real re;
  Real im;

  Complex() : re(0), im(0) {}
  Complex(const Real& r) : re(r), im(0) {}  // NOLINT(google-explicit-constructor)
  Complex(const Real& r, const Real& i) : re(r), im(i) {}
  Complex(int r) : re(r), im(0) {}  // NOLINT(google-explicit-constructor)
  Complex(double r) : re(r), im(0) {}  // NOLINT(google-explicit-constructor)
  Complex(double r, double i) : re(r), im(i) {}

  Complex& operator+=(const Complex& o);
  Complex& operator-=(const Complex& o);
  Complex& operator*=(const Complex& o);
  Complex& operator/=(const Complex& o);

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }
};

Complex operator+(Complex a, const Complex& b);
Complex operator-(Complex a, const Complex& b);
Complex operator*(Complex a, const Complex& b);
Complex operator/(Complex a, const Complex& b);
Complex operator-(const Complex& a);
bool operator==(const Complex& a, const Complex& b);
bool operator!=(const Complex& a, const Complex& b);

Complex conj(const Complex& z);
Real abs(const Complex& z);
Real norm(const Complex& z);
Real arg(const Complex& z);
Complex exp(const Complex& z);
Complex log(const Complex& z);
Complex sqrt(const Complex& z);
Complex pow(const Complex& z, const Complex& w);
Complex pow(const Complex& z, long n);
Complex sin(const Complex& z);
Complex cos(const Complex& z);
Complex expi(const Real& theta);  // e^{i theta}
Complex polar(const Real& r, const Real& theta);
Complex I();

Real pi_real();
Real real_from_string(const std::string& s);
Complex complex_from_string(const std::string& re, const std::string& im = "0");

// Relative distance |a-b| / max(|a|,|b|), or |a-b| when both are tiny.
Real rel_diff(const Complex& a, const Complex& b);
double to_double(const Real& x);
Real pow2(int e);  // 2^e at the current precision
// Copies carry their source precision; these round to the current default.
Real rounded(const Real& x);
Complex rounded(const Complex& z);

// True when z is an integer <= 0 (exact test).
bool is_nonpositive_integer(const Complex& z);
bool is_integer(const Complex& z);
bool near_integer(const Complex& z, const Real& eps);

// Kernels evaluated at the current working precision (no escalation).
Complex gamma(const Complex& z);
Complex rgamma(const Complex& z);  // 1/Gamma, zero at the poles
Complex pochhammer(const Complex& a, int n);
Real factorial_real(int n);
Complex hyp2f1(const Complex& a, const Complex& b, const Complex& c, const Complex& z);
Complex hyp2f1_regularized(const Complex& a, const Complex& b, const Complex& c,
                           const Complex& z);
Complex hyp2f1_dz(const Complex& a, const Complex& b, const Complex& c, const Complex& z);
Real ellipk(const Real& k);
Real ellipe(const Real& k);

// Public operations with precision escalation.
Complex gauss_2f1(const Complex& a, const Complex& b, const Complex& c, const Complex& z,
                  const PrecisionContext& ctx);
Complex gauss_2f1_regularized(const Complex& a, const Complex& b, const Complex& c,
                              const Complex& z, const PrecisionContext& ctx);
Complex gauss_2f1_dz(const Complex& a, const Complex& b, const Complex& c, const Complex& z,
                     const PrecisionContext& ctx);
Real elliptic_K(const Real& k, const PrecisionContext& ctx);
Real elliptic_E(const Real& k, const PrecisionContext& ctx);
Complex pochhammer(const Complex& a, int n, const PrecisionContext& ctx);

// Runs f at ctx.bits and at doubled precision until two successive results agree
// to ctx.tol. The result is returned at the last (highest) precision.
template <class F>
Complex escalate(const PrecisionContext& ctx, F&& f) {
  ctx.validate();
  int b = ctx.bits;
  Complex prev;
  {
    WorkingPrecision wp(b + 32);
    prev = f();
  }
  for (int e = 0; e <= ctx.max_escalations; ++e) {
    b *= 2;
    Complex cur;
    {
      WorkingPrecision wp(b + 32);
      cur = f();
    }
    if (rel_diff(prev, cur) < Real(ctx.tol)) return rounded(cur);
    prev = cur;
  }
  throw Error(ErrorCode::NoConvergence, "precision escalation exhausted");
}

std::string format_real(const Real& x, int digits);
// "re+imi" / "re-imi" in fixed notation with the given number of digits after the point.
std::string format_complex(const Complex& z, int digits);
int digits_for_bits(int bits);

}  // namespace pvi
