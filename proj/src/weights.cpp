#include "pvi/weights.hpp"

#include "pvi/quadrature.hpp"

namespace pvi {

namespace mp = boost::multiprecision;

// ---------------------------------------------------------------- parameters

WeightParams WeightParams::from_omegas(const Complex& mu, const Complex& omega1,
                                       const Complex& omega2, const Complex& xi,
                                       const Complex& t) {
  WeightParams p;
  p.mu = mu;
  p.omega = omega1 + I() * omega2;
  p.omegabar = omega1 - I() * omega2;
  p.xi = xi;
  p.t = t;
  return p;
}

Complex WeightParams::omega1() const { return (omega + omegabar) / Complex(2); }
Complex WeightParams::omega2() const { return (omega - omegabar) / (Complex(2) * I()); }

bool WeightParams::is_regular() const {
  Complex w1 = omega1();
  return !is_integer(-mu - omega) && !is_integer(Complex(2) * w1) && !is_integer(Complex(2) * mu);
}

namespace {

bool on_unit_circle(const Complex& t) {
  return mp::abs(abs(t) - 1) < pow2(-(current_bits() / 2));
}

}  // namespace

bool WeightParams::positivity_regime() const {
  Complex w1 = omega1(), w2 = omega2();
  if (mu.im != 0 || w1.im != 0 || w2.im != 0 || xi.im != 0) return false;
  if (!(xi.re < 1)) return false;
  if (!(2 * w1.re > -1) || !(2 * mu.re > -1)) return false;
  return on_unit_circle(t);
}

WeightParams WeightParams::rounded_copy() const {
  WeightParams p;
  p.mu = rounded(mu);
  p.omega = rounded(omega);
  p.omegabar = rounded(omegabar);
  p.xi = rounded(xi);
  p.t = rounded(t);
  return p;
}

int xi_sign(const Complex& t) { return t.im < 0 ? -1 : 1; }

Complex xi_from_physical(const Complex& xi_phys, const Complex& mu, const Complex& t) {
  int s = xi_sign(t);
  Complex ph = exp(Complex(Real(0), 2 * s * pi_real()) * mu);
  return Complex(1) - (Complex(1) - xi_phys) * ph;
}

// ---------------------------------------------------------------- models

ModelKind ModelKind::generalized(const WeightParams& p) {
  ModelKind m;
  m.tag = ModelTag::GeneralizedJacobi;
  m.general = p;
  return m;
}

ModelKind ModelKind::cue_gap(const Real& phi, const Complex& xi) {
  ModelKind m;
  m.tag = ModelTag::CueGap;
  m.phi = phi;
  m.xi = xi;
  return m;
}

ModelKind ModelKind::cue_charpoly(const Complex& u, const Complex& mu) {
  ModelKind m;
  m.tag = ModelTag::CueCharPoly;
  m.u = u;
  m.mu = mu;
  return m;
}

ModelKind ModelKind::ising_low(const Real& k) {
  ModelKind m;
  m.tag = ModelTag::IsingLowT;
  m.k = k;
  return m;
}

ModelKind ModelKind::ising_high(const Real& k) {
  ModelKind m;
  m.tag = ModelTag::IsingHighT;
  m.k = k;
  return m;
}

void ModelKind::validate() const {
  switch (tag) {
    case ModelTag::GeneralizedJacobi:
      break;
    case ModelTag::CueGap:
      if (phi < 0 || phi > 2 * pi_real())
        throw Error(ErrorCode::DomainError, "CueGap requires 0 <= phi <= 2 pi");
      break;
    case ModelTag::CueCharPoly:
      if (!(mu.re > Real(-0.5))) throw Error(ErrorCode::DomainError, "CueCharPoly requires Re(mu) > -1/2");
      break;
    case ModelTag::IsingLowT:
      if (!(k >= 1)) throw Error(ErrorCode::DomainError, "IsingLowT requires k >= 1");
      break;
    case ModelTag::IsingHighT:
      if (!(k > 0) || k > 1) throw Error(ErrorCode::DomainError, "IsingHighT requires 0 < k <= 1");
      break;
  }
}

const char* model_tag_name(ModelTag t) {
  switch (t) {
    case ModelTag::GeneralizedJacobi: return "general";
    case ModelTag::CueGap: return "cue-gap";
    case ModelTag::CueCharPoly: return "cue-charpoly";
    case ModelTag::IsingLowT: return "ising-low";
    case ModelTag::IsingHighT: return "ising-high";
  }
  return "unknown";
}

std::string ModelKind::name() const { return model_tag_name(tag); }

// ---------------------------------------------------------------- weight

namespace {

Real wrap_angle(Real a) {
  Real p = pi_real();
  while (a > p) a -= 2 * p;
  while (a <= -p) a += 2 * p;
  return a;
}

struct AngleData {
  Real theta;
  Real d1;  // angular distance to z = -1
  Real d2;  // angular distance to z = -1/t (|t| = 1 only)
  bool xi_arc = false;
};

// Weight for |t| = 1 written through the distances so that it stays accurate next to the
// branch points:  1 + e^{i a} = 2 cos(a/2) e^{i a/2}.
Complex weight_circle(const WeightParams& p, const Real& phi, const AngleData& a) {
  Complex w1 = p.omega1();
  Real psi = wrap_angle(a.theta + phi);
  Complex e = -I() * p.mu * Complex(phi);
  e += (-p.mu - p.omega) * I() * Complex(a.theta);
  e += Complex(2) * w1 * Complex(mp::log(2 * mp::sin(a.d1 / 2))) + I() * w1 * Complex(a.theta);
  e += Complex(2) * p.mu * Complex(mp::log(2 * mp::sin(a.d2 / 2))) + I() * p.mu * Complex(psi);
  Complex v = exp(e);
  if (a.xi_arc) v *= Complex(1) - p.xi;
  return v;
}

// |t| < 1: no branch point of (1 + tz) on the circle.
Complex weight_inside(const WeightParams& p, const AngleData& a) {
  Complex w1 = p.omega1();
  Complex z = expi(a.theta);
  Complex e = (-p.mu - p.omega) * I() * Complex(a.theta);
  e += Complex(2) * w1 * Complex(mp::log(2 * mp::sin(a.d1 / 2))) + I() * w1 * Complex(a.theta);
  Complex v = exp(e) * pow(Complex(1) + p.t * z, Complex(2) * p.mu);
  if (!p.mu.is_zero()) v *= pow(p.t, -p.mu);
  return v;
}

}  // namespace

Complex weight_eval(const WeightParams& p, const Complex& z) {
  if (mp::abs(abs(z) - 1) > pow2(-(current_bits() / 2)))
    throw Error(ErrorCode::DomainError, "weight_eval requires |z| = 1");
  AngleData a;
  a.theta = arg(z);
  Real pi = pi_real();
  a.d1 = pi - mp::abs(a.theta);
  if (a.d1 == 0) throw Error(ErrorCode::SingularPoint, "weight at z = -1");
  if (on_unit_circle(p.t)) {
    Real phi = arg(p.t);
    Real psi = wrap_angle(a.theta + phi);
    a.d2 = pi - mp::abs(psi);
    if (a.d2 == 0) throw Error(ErrorCode::SingularPoint, "weight at z = -1/t");
    Real ths = wrap_angle(pi - phi);
    if (phi > 0) a.xi_arc = a.theta > ths;
    else if (phi < 0) a.xi_arc = a.theta < ths;
    return weight_circle(p, phi, a);
  }
  if (abs(p.t) > 1) throw Error(ErrorCode::DomainError, "weight_eval supports |t| <= 1");
  return weight_inside(p, a);
}

// ---------------------------------------------------------------- moments

namespace {

struct XiTerm {
  Complex C;  // s xi/(2 pi i) e^{-s i pi x} Gamma(2mu+1)Gamma(2w1+1)/Gamma(2mu+2w1+2)
  Complex x, y, alpha, beta, gamma_;
};

XiTerm xi_term_data(const WeightParams& p, int n) {
  XiTerm d;
  Complex w1 = p.omega1();
  int s = xi_sign(p.t);
  Real pi = pi_real();
  d.x = Complex(n) + p.mu - p.omegabar;
  d.y = Complex(2) * p.mu + Complex(2) * w1 + Complex(1);
  d.alpha = Complex(2) * p.mu + Complex(1);
  d.beta = Complex(1 + n) + p.mu + p.omega;
  d.gamma_ = Complex(2) * p.mu + Complex(2) * w1 + Complex(2);
  Complex ph = exp(Complex(Real(0), -s * pi) * d.x);
  d.C = Complex(Real(s)) * p.xi / Complex(Real(0), 2 * pi) * ph * gamma(d.alpha) *
        gamma(Complex(2) * w1 + Complex(1)) * rgamma(d.gamma_);
  return d;
}

Complex first_term(const WeightParams& p, int n) {
  Complex w1 = p.omega1();
  Complex a = Complex(-2) * p.mu;
  Complex b = Complex(-n) - p.mu - p.omega;
  Complex c = Complex(1 - n) - p.mu + p.omegabar;
  Complex pre = gamma(Complex(2) * w1 + Complex(1)) * rgamma(Complex(1 + n) + p.mu + p.omega);
  if (pre.is_zero()) return Complex();
  return pre * hyp2f1_regularized(a, b, c, p.t);
}

Complex xi_term(const WeightParams& p, int n) {
  if (p.xi.is_zero()) return Complex();
  Complex omt = Complex(1) - p.t;
  if (omt.is_zero()) return Complex();
  if (p.t.is_zero()) throw Error(ErrorCode::DomainError, "xi term at t = 0");
  XiTerm d = xi_term_data(p, n);
  return d.C * pow(p.t, d.x) * pow(omt, d.y) * hyp2f1(d.alpha, d.beta, d.gamma_, omt);
}

}  // namespace

Complex scaled_moment_kernel(const WeightParams& p, int n) {
  return first_term(p, n) + xi_term(p, n);
}

Complex moment_kernel(const WeightParams& p, int n) {
  if (p.t.is_zero()) {
    if (p.mu.is_zero()) return scaled_moment_kernel(p, n);
    throw Error(ErrorCode::DomainError, "moment at t = 0 needs the scaled form");
  }
  return pow(p.t, -p.mu) * scaled_moment_kernel(p, n);
}

Complex moment2_kernel(const WeightParams& p, int n) {
  if (p.t.is_zero()) throw Error(ErrorCode::DomainError, "second moment form at t = 0");
  Complex x = Complex(n) + p.mu - p.omegabar;
  Complex A = first_term(p, n);
  if (p.xi.is_zero()) return pow(p.t, -p.mu) * A;
  Complex sn = sin(Complex(pi_real()) * x);
  if (abs(sn) < pow2(-(current_bits() / 2)))
    throw Error(ErrorCode::ParameterPole, "second moment form singular for integer n+mu-omegabar");
  int s = xi_sign(p.t);
  Complex ph = exp(Complex(Real(0), -s * pi_real()) * x);
  Complex K = Complex(Real(s)) * p.xi * ph / (Complex(Real(0), 2) * sn);
  Complex w1 = p.omega1();
  Complex omt = Complex(1) - p.t;
  Complex y = Complex(2) * p.mu + Complex(2) * w1 + Complex(1);
  Complex B;
  if (!omt.is_zero()) {
    B = gamma(Complex(2) * p.mu + Complex(1)) * rgamma(Complex(1 - n) + p.mu + p.omegabar) *
        pow(p.t, x) * pow(omt, y) *
        hyp2f1_regularized(Complex(2) * p.mu + Complex(1), Complex(1 + n) + p.mu + p.omega,
                           Complex(1) + x, p.t);
  }
  return pow(p.t, -p.mu) * ((Complex(1) + K) * A - K * B);
}

Complex moment_dt_kernel(const WeightParams& p, int n) {
  if (p.t.is_zero()) throw Error(ErrorCode::DomainError, "moment derivative at t = 0");
  Complex w1 = p.omega1();
  Complex a = Complex(-2) * p.mu;
  Complex b = Complex(-n) - p.mu - p.omega;
  Complex c = Complex(1 - n) - p.mu + p.omegabar;
  Complex pre = gamma(Complex(2) * w1 + Complex(1)) * rgamma(Complex(1 + n) + p.mu + p.omega);
  Complex A, dA;
  if (!pre.is_zero()) {
    A = pre * hyp2f1_regularized(a, b, c, p.t);
    dA = pre * a * b * hyp2f1_regularized(a + Complex(1), b + Complex(1), c + Complex(1), p.t);
  }
  Complex B, dB;
  if (!p.xi.is_zero()) {
    Complex omt = Complex(1) - p.t;
    if (omt.is_zero()) throw Error(ErrorCode::DomainError, "moment derivative at t = 1 with xi != 0");
    XiTerm d = xi_term_data(p, n);
    Complex tx = pow(p.t, d.x), oy = pow(omt, d.y);
    Complex F = hyp2f1(d.alpha, d.beta, d.gamma_, omt);
    Complex dF = hyp2f1_dz(d.alpha, d.beta, d.gamma_, omt);
    B = d.C * tx * oy * F;
    dB = d.C * (d.x * tx / p.t * oy * F - d.y * tx * oy / omt * F - tx * oy * dF);
  }
  Complex tm = pow(p.t, -p.mu);
  return -p.mu * tm / p.t * (A + B) + tm * (dA + dB);
}

Complex toeplitz_moment(const WeightParams& p, int n, const PrecisionContext& ctx) {
  if (!(p.mu.re > Real(-0.5)) || !(p.omega1().re > Real(-0.5)))
    throw Error(ErrorCode::DomainError, "moments require Re(mu), Re(omega1) > -1/2");
  Complex v = escalate(ctx, [&] { return moment_kernel(p.rounded_copy(), n); });
  Complex x = Complex(n) + p.mu - p.omegabar;
  if (!p.xi.is_zero() && !p.t.is_zero() && !near_integer(x, Real(1e-8))) {
    Complex v2 = toeplitz_moment2(p, n, ctx);
    if (rel_diff(v, v2) > Real(ctx.tol))
      throw Error(ErrorCode::NoConvergence, "moment forms disagree at n = " + std::to_string(n), n);
  }
  return v;
}

Complex toeplitz_moment2(const WeightParams& p, int n, const PrecisionContext& ctx) {
  return escalate(ctx, [&] { return moment2_kernel(p.rounded_copy(), n); });
}

// ---------------------------------------------------------------- model closed forms

Complex model_moment_kernel(const ModelKind& m, int n) {
  Real pi = pi_real();
  switch (m.tag) {
    case ModelTag::GeneralizedJacobi:
      return moment_kernel(m.general.rounded_copy(), n);
    case ModelTag::CueGap: {
      Real phi = rounded(m.phi);
      Complex xi = rounded(m.xi);
      if (n == 0) return Complex(1) - xi * Complex(phi / (2 * pi));
      Complex t = expi(phi);
      Complex v = xi / Complex(Real(0), 2 * pi) * (pow(t, long(n)) - Complex(1)) / Complex(n);
      return (n % 2 == 0) ? -v : v;
    }
    case ModelTag::CueCharPoly: {
      Complex mu = rounded(m.mu);
      Real au = abs(rounded(m.u));
      if (au > 1) {
        ModelKind inv = ModelKind::cue_charpoly(Complex(1 / au), mu);
        return pow(Complex(au * au), mu) * model_moment_kernel(inv, -n);
      }
      Complex t(au * au);
      int mm = n < 0 ? -n : n;
      Complex v = pochhammer(mu + Complex(1 - mm), mm) / Complex(factorial_real(mm)) *
                  hyp2f1(-mu, -mu + Complex(mm), Complex(mm + 1), t);
      if (n > 0) v *= pow(t, long(mm));
      return v;
    }
    case ModelTag::IsingLowT: {
      Real k = rounded(m.k);
      Complex t(1 / (k * k));
      Real half(0.5);
      if (n <= 0) {
        int mm = -n;
        Real c = mp::tgamma(mm + half) * mp::sqrt(pi) / factorial_real(mm) / pi;
        if (mm % 2) c = -c;
        return Complex(c) * hyp2f1(Complex(-half), Complex(mm + half), Complex(mm + 1), t);
      }
      Real c = mp::tgamma(n - half) * mp::tgamma(Real(1.5)) / factorial_real(n) / pi;
      if (n % 2 == 0) c = -c;
      return Complex(c) * pow(t, long(n)) * hyp2f1(Complex(half), Complex(n - half), Complex(n + 1), t);
    }
    case ModelTag::IsingHighT: {
      Real k = rounded(m.k);
      Complex t(k * k);
      Real half(0.5);
      if (n <= 0) {
        int mm = -n;
        Real c = mp::pow(k, 2 * mm + 1) * mp::tgamma(mm + half) * mp::tgamma(Real(1.5)) /
                 factorial_real(mm + 1) / pi;
        if (mm % 2) c = -c;
        return Complex(c) * hyp2f1(Complex(half), Complex(mm + half), Complex(mm + 2), t);
      }
      Real c = mp::tgamma(n - half) * mp::sqrt(pi) / factorial_real(n - 1) / (pi * k);
      if (n % 2 == 0) c = -c;
      return Complex(c) * hyp2f1(Complex(-half), Complex(n - half), Complex(n), t);
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown model");
}

Complex model_moments(const ModelKind& m, int n, const PrecisionContext& ctx) {
  m.validate();
  if (m.tag == ModelTag::GeneralizedJacobi) return toeplitz_moment(m.general, n, ctx);
  return escalate(ctx, [&] { return model_moment_kernel(m, n); });
}

WeightParams equivalent_params(const ModelKind& m) {
  switch (m.tag) {
    case ModelTag::GeneralizedJacobi:
      return m.general;
    case ModelTag::CueGap:
      if (m.phi > pi_real())
        throw Error(ErrorCode::DomainError, "CueGap maps onto the general weight only for phi <= pi");
      return WeightParams{Complex(), Complex(), Complex(), m.xi, expi(m.phi)};
    case ModelTag::CueCharPoly: {
      Real au = abs(m.u);
      if (au > 1) throw Error(ErrorCode::DomainError, "CueCharPoly map needs |u| <= 1");
      Complex h = m.mu / Complex(2);
      return WeightParams{h, h, h, Complex(), Complex(au * au)};
    }
    case ModelTag::IsingLowT: {
      Real q(0.25);
      return WeightParams{Complex(q), Complex(Real(-0.75)), Complex(q), Complex(),
                          Complex(1 / (m.k * m.k))};
    }
    case ModelTag::IsingHighT:
      break;
  }
  throw Error(ErrorCode::InvalidArgument, "no generalized Jacobi map for this model");
}

Complex equivalence_factor(const ModelKind& m) {
  if (m.tag == ModelTag::GeneralizedJacobi || m.tag == ModelTag::CueGap) return Complex(1);
  WeightParams p = equivalent_params(m);
  return pow(p.t, p.mu);
}

MomentFn moment_source(const WeightParams& p) {
  return [p](int n) { return moment_kernel(p.rounded_copy(), n); };
}

MomentFn moment_source(const ModelKind& m) {
  return [m](int n) { return model_moment_kernel(m, n); };
}

// ---------------------------------------------------------------- quadrature oracle

Complex weight_circle_integral(const WeightParams& p0, const std::function<Complex(const Complex&)>& g,
                               const Real& rel_tol) {
  WeightParams p = p0.rounded_copy();
  Real pi = pi_real();
  bool circle = on_unit_circle(p.t);
  if (!circle) {
    if (abs(p.t) > 1) throw Error(ErrorCode::DomainError, "quadrature oracle supports |t| <= 1");
    if (!p.xi.is_zero()) throw Error(ErrorCode::DomainError, "xi arc undefined for |t| < 1");
  }
  Real phi = circle ? Real(arg(p.t)) : Real(0);
  Real ths = wrap_angle(pi - phi);
  std::vector<Real> cuts{-pi};
  if (circle && ths > -pi && ths < pi) cuts.push_back(ths);
  cuts.push_back(pi);

  Complex total;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    Real lo = cuts[i], hi = cuts[i + 1];
    bool lo_is_pi = (i == 0), hi_is_pi = (i + 2 == cuts.size());
    bool arc = false;
    if (circle && cuts.size() == 3) arc = (phi > 0) ? (i == 1) : (phi < 0 && i == 0);
    auto f = [&](const Real& th, const Real& da, const Real& db) {
      AngleData a;
      a.theta = th;
      a.xi_arc = arc;
      a.d1 = pi - mp::abs(th);
      if (lo_is_pi && da < db) a.d1 = da;
      if (hi_is_pi && db < da) a.d1 = db;
      if (circle) {
        Real psi = wrap_angle(th + phi);
        a.d2 = pi - mp::abs(psi);
        if (!lo_is_pi && da < db) a.d2 = da;
        if (!hi_is_pi && db < da) a.d2 = db;
        if (cuts.size() == 2) {
          // t = 1: both branch points sit at z = -1
          a.d2 = a.d1;
        }
        return weight_circle(p, phi, a) * g(expi(th));
      }
      return weight_inside(p, a) * g(expi(th));
    };
    total += tanh_sinh(f, lo, hi, rel_tol).value;
  }
  return total / Complex(2 * pi);
}

Complex quadrature_moment(const WeightParams& p, int n, const PrecisionContext& ctx) {
  WorkingPrecision wp(ctx.bits + 32);
  Real tol = Real(ctx.tol) * Real(1e-3);
  Complex v = weight_circle_integral(p, [n](const Complex& z) { return pow(z, long(-n)); }, tol);
  return rounded(v);
}

}  // namespace pvi
