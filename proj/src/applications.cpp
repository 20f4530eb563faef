#include "pvi/applications.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "pvi/oracle.hpp"

namespace pvi {

namespace mp = boost::multiprecision;

const AppRoute* ApplicationResult::route(const std::string& name) const {
  for (const auto& r : routes)
    if (r.name == name) return &r;
  return nullptr;
}

int ApplicationResult::successful_routes() const {
  int n = 0;
  for (const auto& r : routes)
    if (r.ok) ++n;
  return n;
}

namespace {

int work_bits(const PrecisionContext& ctx, int n_max) { return std::max(ctx.bits, 64 + 8 * n_max) + 32; }

std::vector<Complex> round_all(const std::vector<Complex>& v) {
  std::vector<Complex> out;
  out.reserve(v.size());
  for (const auto& z : v) out.push_back(rounded(z));
  return out;
}

void add_route(ApplicationResult& res, const std::string& name, const std::function<void(AppRoute&)>& fill) {
  AppRoute r;
  r.name = name;
  try {
    fill(r);
    r.ok = true;
  } catch (const Error& e) {
    r.ok = false;
    r.code = e.code();
    r.error = error_name(e.code());
    r.message = e.what();
    r.value.clear();
    r.r.clear();
    r.rbar.clear();
  }
  res.routes.push_back(std::move(r));
}

// Picks the first successful route in the order they were added and measures the others against it.
void finish(ApplicationResult& res, int bits) {
  WorkingPrecision wp(bits);
  res.max_deviation = Real(0);
  const AppRoute* primary = nullptr;
  for (const auto& r : res.routes) {
    if (r.ok) {
      primary = &r;
      break;
    }
  }
  if (!primary) {
    const AppRoute& first = res.routes.front();
    throw Error(first.code, "no route succeeded: " + first.message);
  }
  res.primary = primary->name;
  res.value = primary->value;
  for (const auto& r : res.routes) {
    if (!r.ok || &r == primary) continue;
    for (int n = 0; n <= res.n_max; ++n) res.max_deviation = std::max<Real>(res.max_deviation, rel_diff(r.value[n], res.value[n]));
  }
}

// T_0 = 1, T_1 = w0, T_{n+1} T_{n-1} = T_n^2 (1 - r_n rbar_n).
std::vector<Complex> tau_from_products(const Complex& w0, const std::vector<Complex>& r, const std::vector<Complex>& rb,
                                       int n_max) {
  std::vector<Complex> T(n_max + 1);
  T[0] = Complex(1);
  if (n_max >= 1) T[1] = w0;
  for (int n = 1; n < n_max; ++n) {
    if (T[n - 1].is_zero()) throw Error(ErrorCode::ZeroTau, "tau function vanished", n - 1);
    T[n + 1] = T[n] * T[n] * (Complex(1) - r[n] * rb[n]) / T[n - 1];
  }
  return T;
}

void check_nonzero(const Complex& z, int n, const char* what) {
  if (z.is_zero()) throw Error(ErrorCode::DivisionBreakdown, what, n);
}

// Shell sums are used when the number of partitions they would visit fits the budget.
F21Method pick_method(int N, const Complex& t, const SeriesControl& sc, double budget, bool limit) {
  double at = to_double(abs(t));
  if (at >= 1) return F21Method::Determinant;
  if (at == 0) return F21Method::Series;
  int W = static_cast<int>(std::ceil(std::log(sc.tail_tol) / std::log(at))) + 4 + (limit ? N : 0);
  if (W > sc.max_weight) return F21Method::Determinant;
  std::vector<double> dp(W + 1, 0.0);
  dp[0] = 1;
  for (int part = 1; part <= N; ++part)
    for (int w = part; w <= W; ++w) dp[w] += dp[w - part];
  double total = 0;
  for (double x : dp) total += x;
  return total <= budget ? F21Method::Series : F21Method::Determinant;
}

SeriesControl series_control(const ApplicationOptions& opt, const PrecisionContext& ctx) {
  SeriesControl sc = opt.series;
  if (sc.tail_tol <= 0) sc.tail_tol = ctx.tol;
  return sc;
}

// Equal-argument 2F1^(1) by the cheaper method; records the shell tail.
Complex f21_auto(const Complex& a, const Complex& b, const Complex& c, int N, const Complex& t,
                 const SeriesControl& sc, const ApplicationOptions& opt, const PrecisionContext& ctx, AppRoute& route,
                 bool& used_series) {
  if (pick_method(N, t, sc, opt.series_budget, false) == F21Method::Determinant) {
    used_series = false;
    return f21_equal_det(a, b, c, N, t, ctx);
  }
  SeriesResult s = f21_general(a, b, c, N, t, sc, ctx);
  if (!s.converged) throw Error(ErrorCode::TruncationNotConverged, "shell sum did not reach the tail tolerance", N);
  route.tail = std::max<Real>(route.tail, s.tail);
  return s.value;
}

std::string genhyp_name(int n_series, int n_det) {
  if (n_det == 0) return "genhyp-series";
  return n_series == 0 ? "genhyp-det" : "genhyp-mixed";
}

}  // namespace

// ---------------------------------------------------------------- CUE characteristic polynomial

Complex cue_charpoly_unit(const Complex& mu, int N, const PrecisionContext& ctx) {
  return escalate(ctx, [&] {
    Complex m = rounded(mu);
    Complex v(1);
    for (int j = 0; j < N; ++j) {
      Complex g = gamma(Complex(j + 1) + m);
      v *= Complex(factorial_real(j)) * gamma(Complex(j + 1) + Complex(2) * m) / (g * g);
    }
    return v;
  });
}

ApplicationResult cue_charpoly(const Complex& u, const Complex& mu, int n_max, const PrecisionContext& ctx,
                               const ApplicationOptions& opt) {
  ctx.validate();
  if (n_max < 0) throw Error(ErrorCode::InvalidArgument, "n_max must be nonnegative");
  if (!(mu.re > Real(-0.5))) throw Error(ErrorCode::DomainError, "Re(mu) must exceed -1/2");
  ApplicationResult res;
  res.model = ModelKind::cue_charpoly(u, mu);
  res.quantity = "F_N";
  res.n_max = n_max;
  Real au = abs(u);
  bool special = au.is_zero() || au == 1 || mu.is_zero();
  if (special) {
    add_route(res, "closed-form", [&](AppRoute& r) {
      for (int n = 0; n <= n_max; ++n)
        r.value.push_back(au == 1 && !mu.is_zero() ? cue_charpoly_unit(mu, n, ctx) : Complex(1));
    });
  }
  if (!special || !opt.short_circuit) {
    bool outside = au > 1;
    int wb = work_bits(ctx, n_max);
    add_route(res, "recurrence", [&](AppRoute& route) {
      std::vector<Complex> r(n_max + 2), rb(n_max + 2), T;
      {
        WorkingPrecision wp(wb);
        Complex m = rounded(mu);
        Real a0 = rounded(au);
        Complex a(outside ? 1 / (a0 * a0) : a0 * a0);
        Complex F0 = hyp2f1(-m, -m, Complex(1), a);
        check_nonzero(F0, 0, "F_1 vanished");
        r[0] = Complex(1);
        r[1] = -m * hyp2f1(-m, -m + Complex(1), Complex(2), a) / F0;
        for (int n = 1; n < n_max; ++n) {
          Complex an = pow(a, long(n)), an1 = pow(a, long(n - 1));
          check_nonzero(r[n], n, "reflection coefficient vanished");
          Complex lhs = Complex(2) * an * r[n] * r[n - 1] - a - Complex(1);
          Complex prev;
          if (n > 1) {
            Complex rm2 = r[n - 2];
            prev = (Complex(1) - an1 * r[n - 1] * r[n - 1]) / r[n - 1] *
                   ((Complex(n) + m) * a * r[n] + (Complex(n - 2) + m) * rm2);
          }
          Complex q = Complex(1) - an * r[n] * r[n];
          check_nonzero(q, n, "1 - u^{2n} r_n^2 vanished");
          Complex c = (Complex(n + 1) + m) * a;
          check_nonzero(c, n, "leading coefficient vanished");
          r[n + 1] = ((lhs + prev) * r[n] / q - (Complex(n - 1) + m) * r[n - 1]) / c;
        }
        for (int n = 0; n <= n_max + 1; ++n) rb[n] = pow(a, long(n)) * r[n];
        T = tau_from_products(F0, r, rb, n_max);
        if (outside) {
          Complex s = pow(Complex(a0 * a0), m);
          Complex sp(1);
          for (int n = 0; n <= n_max; ++n) {
            T[n] *= sp;
            sp *= s;
          }
          // reflection through the circle swaps r and rbar
          for (int n = 1; n <= n_max; ++n) std::swap(r[n], rb[n]);
        }
      }
      route.value = round_all(T);
      r.resize(n_max + 1);
      rb.resize(n_max + 1);
      route.r = round_all(r);
      route.rbar = round_all(rb);
    });
    SeriesControl sc = series_control(opt, ctx);
    int n_series = 0, n_det = 0;
    add_route(res, "genhyp", [&](AppRoute& route) {
      WorkingPrecision wp(ctx.bits);
      Real a0 = rounded(au);
      Complex a(au > 1 ? 1 / (a0 * a0) : a0 * a0);
      route.tail = Real(0);
      route.value.push_back(Complex(1));
      for (int n = 1; n <= n_max; ++n) {
        bool s = true;
        Complex F = f21_auto(-mu, -mu, Complex(n), n, a, sc, opt, ctx, route, s);
        ++(s ? n_series : n_det);
        if (au > 1) F = F * pow(Complex(a0 * a0), mu * Complex(n));
        route.value.push_back(F);
      }
    });
    res.routes.back().name = genhyp_name(n_series, n_det);
    if (opt.run_oracle) {
      add_route(res, "oracle", [&](AppRoute& route) {
        CoefficientTable tab = build_table_oracle(res.model, n_max, ctx);
        route.value.assign(tab.T.begin(), tab.T.begin() + n_max + 1);
        route.r.assign(tab.r.begin(), tab.r.begin() + n_max + 1);
        route.rbar.assign(tab.rbar.begin(), tab.rbar.begin() + n_max + 1);
      });
    }
  }
  finish(res, ctx.bits);
  return res;
}

// ---------------------------------------------------------------- CUE gap probability

namespace {

void check_phi(const Real& phi) {
  if (!(phi > 0) || !(phi < 2 * pi_real())) throw Error(ErrorCode::DomainError, "phi must lie in (0, 2 pi)");
}

Complex gap_x1(const Real& phi, const Complex& xi) {
  Real pi = pi_real();
  Complex e1 = Complex(1) - xi * Complex(phi / (2 * pi));
  if (e1.is_zero()) throw Error(ErrorCode::ZeroW0, "E_1 vanished");
  return -xi / Complex(pi) * Complex(mp::sin(phi / 2)) / e1;
}

// Third-order relation solved for x_{n+1}.
Complex gap_third_step(const std::vector<Complex>& x, int n, const Real& c) {
  auto X = [&](int j) { return j < 0 ? Complex() : x[j]; };
  Complex xn = X(n), xm = X(n - 1);
  check_nonzero(xn, n, "x_n vanished");
  Complex lhs = Complex(2) * xn * xm - Complex(2 * c);
  Complex prev;
  if (n > 1) {
    check_nonzero(xm, n - 1, "x_{n-1} vanished");
    prev = (Complex(1) - xm * xm) / xm * (Complex(n) * xn + Complex(n - 2) * X(n - 2));
  }
  Complex q = Complex(1) - xn * xn;
  check_nonzero(q, n, "1 - x_n^2 vanished");
  return ((lhs + prev) * xn / q - Complex(n - 1) * xm) / Complex(n + 1);
}

std::vector<Complex> gap_x_kernel(const Real& phi, const Complex& xi, int n_max) {
  std::vector<Complex> x(n_max + 1);
  x[0] = Complex(1);
  if (n_max >= 1) x[1] = gap_x1(phi, xi);
  Real c = mp::cos(phi / 2);
  for (int n = 1; n < n_max; ++n) x[n + 1] = gap_third_step(x, n, c);
  return x;
}

std::vector<Complex> gap_E(const Real& phi, const Complex& xi, const std::vector<Complex>& x, int n_max) {
  std::vector<Complex> rr(n_max + 1);
  for (int n = 0; n <= n_max; ++n) rr[n] = x[n];
  return tau_from_products(Complex(1) - xi * Complex(phi / (2 * pi_real())), rr, rr, n_max);
}

void gap_reflections(const Real& phi, const std::vector<Complex>& x, AppRoute& route) {
  for (size_t n = 0; n < x.size(); ++n) {
    Complex h = expi(phi * Real(static_cast<long>(n)) / 2);
    route.r.push_back(rounded(x[n] / h));
    route.rbar.push_back(rounded(x[n] * h));
  }
}

}  // namespace

std::vector<Complex> cue_gap_x(const Real& phi, const Complex& xi, int n_max, const PrecisionContext& ctx) {
  ctx.validate();
  check_phi(phi);
  std::vector<Complex> x;
  {
    WorkingPrecision wp(work_bits(ctx, n_max));
    x = gap_x_kernel(rounded(phi), rounded(xi), n_max);
  }
  WorkingPrecision back(ctx.bits);
  return round_all(x);
}

ApplicationResult cue_gap(const Real& phi, const Complex& xi, int n_max, const PrecisionContext& ctx,
                          const ApplicationOptions& opt) {
  ctx.validate();
  check_phi(phi);
  if (n_max < 0) throw Error(ErrorCode::InvalidArgument, "n_max must be nonnegative");
  ApplicationResult res;
  res.model = ModelKind::cue_gap(phi, xi);
  res.quantity = "E_N";
  res.n_max = n_max;
  if (xi.is_zero()) {
    add_route(res, "closed-form", [&](AppRoute& r) { r.value.assign(n_max + 1, Complex(1)); });
  }
  if (!xi.is_zero() || !opt.short_circuit) {
    int wb = work_bits(ctx, n_max);
    std::vector<Complex> third;
    add_route(res, "recurrence", [&](AppRoute& route) {
      std::vector<Complex> E;
      {
        WorkingPrecision wp(wb);
        Real ph = rounded(phi);
        third = gap_x_kernel(ph, rounded(xi), n_max);
        E = gap_E(ph, rounded(xi), third, n_max);
        gap_reflections(ph, third, route);
      }
      route.value = round_all(E);
    });
    add_route(res, "quadratic", [&](AppRoute& route) {
      std::vector<Complex> E;
      {
        WorkingPrecision wp(wb);
        Real ph = rounded(phi);
        Complex z = rounded(xi);
        Real c = mp::cos(ph / 2);
        std::vector<Complex> x(n_max + 1);
        x[0] = Complex(1);
        if (n_max >= 1) x[1] = gap_x1(ph, z);
        for (int n = 1; n < n_max; ++n) {
          Complex xn = x[n], xm = x[n - 1], o = Complex(1) - xn * xn;
          Complex A = o * o * Complex((n + 1) * (n + 1));
          Complex B = Complex(2 * (n * n - 1)) * (Complex(1) - xn * xn * xn * xn) * xm +
                      Complex(4 * n) * Complex(c) * xn * o * Complex(n + 1);
          Complex C = o * o * Complex((n - 1) * (n - 1)) * xm * xm +
                      Complex(4 * n) * Complex(c) * xn * o * Complex(n - 1) * xm +
                      Complex(4 * n * n) * xn * xn * (Complex(c * c) - xn * xn);
          check_nonzero(A, n, "quadratic degenerates to linear");
          Complex disc = sqrt(B * B - Complex(4) * A * C);
          Complex s = (B.re * disc.re + B.im * disc.im >= 0) ? B + disc : B - disc;
          Complex y1 = -s / (Complex(2) * A);
          Complex y2 = s.is_zero() ? y1 : Complex(-2) * C / s;
          // the root is the one continuing the third-order solution
          Complex pred = gap_third_step(x, n, c);
          Real d1 = abs(y1 - pred), d2 = abs(y2 - pred);
          Real sep = abs(y1 - y2);
          if (sep > pow2(-(wb / 2)) * std::max<Real>(Real(1), abs(pred)) && mp::abs(d1 - d2) < pow2(-(wb / 2)) * sep)
            throw Error(ErrorCode::RootAmbiguity, "both quadratic roots equidistant from the prediction", n + 1);
          x[n + 1] = d1 <= d2 ? y1 : y2;
        }
        E = gap_E(ph, z, x, n_max);
        gap_reflections(ph, x, route);
      }
      route.value = round_all(E);
    });
    if (opt.run_oracle) {
      add_route(res, "oracle", [&](AppRoute& route) {
        CoefficientTable tab = build_table_oracle(res.model, n_max, ctx);
        route.value.assign(tab.T.begin(), tab.T.begin() + n_max + 1);
        route.r.assign(tab.r.begin(), tab.r.begin() + n_max + 1);
        route.rbar.assign(tab.rbar.begin(), tab.rbar.begin() + n_max + 1);
      });
    }
  }
  finish(res, ctx.bits);
  return res;
}

std::vector<Real> cue_gap_occupancy(const Real& phi, int N, const PrecisionContext& ctx) {
  ctx.validate();
  check_phi(phi);
  if (N < 0) throw Error(ErrorCode::InvalidArgument, "N must be nonnegative");
  if (N == 0) return {Real(1)};
  std::vector<Real> out;
  {
    WorkingPrecision wp(work_bits(ctx, N) + 2 * N);
    Real ph = rounded(phi);
    // E_N is a polynomial of degree N in s = 1 - xi; its s^k coefficient is Prob(k).
    std::vector<Real> s(N + 1), e(N + 1);
    for (int j = 0; j <= N; ++j) {
      s[j] = Real(j) / N;
      MomentCache w(moment_source(ModelKind::cue_gap(ph, Complex(1 - s[j]))));
      e[j] = toeplitz_det_kernel(w, 0, N).re;
    }
    // Newton divided differences, then expansion into monomials.
    std::vector<Real> dd = e;
    for (int lvl = 1; lvl <= N; ++lvl)
      for (int j = N; j >= lvl; --j) dd[j] = (dd[j] - dd[j - 1]) / (s[j] - s[j - lvl]);
    std::vector<Real> poly(N + 1, Real(0));
    poly[0] = dd[N];
    for (int j = N - 1; j >= 0; --j) {
      for (int d = N; d >= 1; --d) poly[d] = poly[d - 1] - s[j] * poly[d];
      poly[0] = dd[j] - s[j] * poly[0];
    }
    out = poly;
  }
  WorkingPrecision back(ctx.bits);
  for (auto& v : out) v = rounded(v);
  return out;
}

// ---------------------------------------------------------------- Ising diagonal correlation

std::pair<Complex, Complex> ising_initial_values(const Real& k0, IsingRegime regime, const PrecisionContext& ctx) {
  ctx.validate();
  WorkingPrecision wp(ctx.bits + 32);
  Real k = rounded(k0);
  Real k2 = k * k;
  std::pair<Complex, Complex> v;
  if (k == 1) {
    v = {Complex(Real(1) / 3), Complex(-1)};
  } else if (regime == IsingRegime::LowT) {
    if (!(k > 1)) throw Error(ErrorCode::DomainError, "low temperature needs k > 1");
    Real K = ellipk(1 / k), E = ellipe(1 / k);
    v = {Complex((2 - k2) / 3 + (k2 - 1) / 3 * K / E), Complex(-1 + (k2 - 1) / k2 * K / E)};
  } else {
    if (!(k > 0 && k < 1)) throw Error(ErrorCode::DomainError, "high temperature needs 0 < k < 1");
    Real K = ellipk(k), E = ellipe(k);
    Real D = (k2 - 1) * K + E;
    v = {Complex((2 / k2 - E / D) / 3), Complex(-k2 * E / D)};
  }
  WorkingPrecision back(ctx.bits);
  return {rounded(v.first), rounded(v.second)};
}

Complex ising_critical_value(int N, const PrecisionContext& ctx) {
  return escalate(ctx, [&] {
    Complex v(1);
    Real half(0.5);
    for (int j = 1; j <= N; ++j) {
      Real g = factorial_real(j - 1);
      v *= Complex(g * g / (mp::tgamma(j + half) * mp::tgamma(j - half)));
    }
    return v;
  });
}

namespace {

struct IsingRun {
  std::vector<Complex> r, rb, T;
};

// Runs both first-order recurrences at the current precision; returns reflections in the
// convention of the model's moment matrix.
IsingRun ising_recurrence_kernel(const Real& k, IsingRegime regime, int n_max, const PrecisionContext& ctx) {
  Real k2 = k * k;
  bool high = regime == IsingRegime::HighT && k != 1;
  // the high temperature recurrence is the low temperature one with k -> 1/k on rescaled data
  Complex ki(high ? k2 : 1 / k2);
  auto init = ising_initial_values(k, regime, ctx.with_bits(current_bits()));
  Complex w0;
  if (k == 1) {
    w0 = Complex(2 / pi_real());
  } else if (!high) {
    w0 = Complex(2 * ellipe(1 / k) / pi_real());
  } else {
    w0 = Complex(2 * ((k2 - 1) * ellipk(k) + ellipe(k)) / (pi_real() * k));
  }
  IsingRun run;
  std::vector<Complex>& r = run.r;
  std::vector<Complex>& rb = run.rb;
  r.assign(n_max + 2, Complex());
  rb.assign(n_max + 2, Complex());
  r[0] = rb[0] = Complex(1);
  r[1] = rounded(init.first);
  rb[1] = rounded(init.second);
  const Complex one(1);
  for (int n = 1; n < n_max; ++n) {
    Complex q = one - r[n] * rb[n];
    check_nonzero(q, n, "1 - r_n rbar_n vanished");
    Complex ca = Complex(2 * n + 3) * ki * q;
    Complex cb = Complex(2 * n + 1) * q;
    Complex sa = Complex(2 * n) * (ki + one - Complex(2 * n - 1) * ki * r[n] * rb[n - 1]) * r[n] +
                 Complex(2 * n - 3) * (Complex(2 * n - 1) * r[n] * rb[n] + one) * r[n - 1];
    Complex sb = Complex(2 * n) * (Complex(2 * n - 3) * rb[n] * r[n - 1] + ki + one) * rb[n] +
                 Complex(2 * n - 1) * ki * (Complex(-(2 * n + 1)) * r[n] * rb[n] + one) * rb[n - 1];
    r[n + 1] = -sa / ca;
    rb[n + 1] = -sb / cb;
  }
  run.T = tau_from_products(w0, r, rb, n_max);
  r.resize(n_max + 1);
  rb.resize(n_max + 1);
  if (high) {
    Complex kk(k2), s(1);
    for (int n = 0; n <= n_max; ++n) {
      r[n] *= s;
      rb[n] /= s;
      s *= kk;
    }
  }
  return run;
}

bool is_inf(const Real& k) { return mp::isinf(k); }

}  // namespace

ApplicationResult ising_diagonal(const Real& k, IsingRegime regime, int n_max, const PrecisionContext& ctx,
                                 const ApplicationOptions& opt) {
  ctx.validate();
  if (n_max < 0) throw Error(ErrorCode::InvalidArgument, "n_max must be nonnegative");
  bool low = regime == IsingRegime::LowT;
  if (low && !(k >= 1)) throw Error(ErrorCode::DomainError, "low temperature needs k >= 1");
  if (!low && !(k >= 0 && k <= 1)) throw Error(ErrorCode::DomainError, "high temperature needs 0 <= k <= 1");
  ApplicationResult res;
  res.quantity = "sigma_N";
  res.n_max = n_max;
  bool zero_t = low && is_inf(k);  // zero temperature
  bool inf_t = !low && k == 0;     // infinite temperature
  bool critical = k == 1;
  if (!zero_t && !inf_t) res.model = low ? ModelKind::ising_low(k) : ModelKind::ising_high(k);
  bool special = zero_t || inf_t || critical;
  if (special) {
    add_route(res, "closed-form", [&](AppRoute& r) {
      for (int n = 0; n <= n_max; ++n) {
        if (critical)
          r.value.push_back(ising_critical_value(n, ctx));
        else
          r.value.push_back(Complex(zero_t || n == 0 ? 1 : 0));
      }
      if (critical) {
        for (int n = 0; n <= n_max; ++n) {
          WorkingPrecision wp(ctx.bits);
          r.r.push_back(n == 0 ? Complex(1) : Complex(Real(n % 2 ? 1 : -1) / ((2 * n + 1) * (2 * n - 1))));
          r.rbar.push_back(Complex(n % 2 ? -1 : 1));
        }
      }
    });
    if (zero_t || inf_t) {
      res.notes.push_back(zero_t ? "zero temperature" : "infinite temperature");
      finish(res, ctx.bits);
      return res;
    }
  }
  if (!special || !opt.short_circuit) {
    add_route(res, "recurrence", [&](AppRoute& route) {
      IsingRun run;
      {
        WorkingPrecision wp(work_bits(ctx, n_max));
        run = ising_recurrence_kernel(rounded(k), regime, n_max, ctx);
      }
      route.value = round_all(run.T);
      route.r = round_all(run.r);
      route.rbar = round_all(run.rb);
    });
    if (!critical) {
      SeriesControl sc = series_control(opt, ctx);
      int n_series = 0, n_det = 0;
      add_route(res, "genhyp", [&](AppRoute& route) {
        WorkingPrecision wp(ctx.bits);
        Real kk = rounded(k);
        Real half(0.5);
        route.tail = Real(0);
        route.value.push_back(Complex(1));
        for (int n = 1; n <= n_max; ++n) {
          bool s = true;
          if (low) {
            Complex t(1 / (kk * kk));
            Complex F = f21_auto(Complex(-half), Complex(half), Complex(n), n, t, sc, opt, ctx, route, s);
            // t^{N/4} times the prefactor prod_j j! Gamma(j+1/2) / (Gamma(j+1/2) Gamma(j+1)) = 1
            route.value.push_back(F);
          } else {
            Complex t(kk * kk);
            Complex F = f21_auto(Complex(half), Complex(half), Complex(n + 1), n, t, sc, opt, ctx, route, s);
            Real dfact(1);
            for (int j = 1; j <= 2 * n - 1; j += 2) dfact *= j;
            route.value.push_back(Complex(dfact / (mp::pow(Real(2), n) * factorial_real(n)) * mp::pow(kk, n)) * F);
          }
          ++(s ? n_series : n_det);
        }
      });
      res.routes.back().name = genhyp_name(n_series, n_det);
    }
    if (opt.run_oracle) {
      add_route(res, "oracle", [&](AppRoute& route) {
        CoefficientTable tab = build_table_oracle(res.model, n_max, ctx);
        route.value.assign(tab.T.begin(), tab.T.begin() + n_max + 1);
        route.r.assign(tab.r.begin(), tab.r.begin() + n_max + 1);
        route.rbar.assign(tab.rbar.begin(), tab.rbar.begin() + n_max + 1);
      });
    }
  }
  finish(res, ctx.bits);
  return res;
}

IsingLimitReport ising_limit_check(const Real& k, int n_max, const PrecisionContext& ctx, int burn_in) {
  ctx.validate();
  if (!(k > 1)) throw Error(ErrorCode::DomainError, "the limit check needs k > 1");
  IsingLimitReport rep;
  rep.burn_in = burn_in;
  WorkingPrecision wp(ctx.bits);
  if (is_inf(k)) {
    rep.limit = Real(1);
    rep.deviation.assign(n_max + 1, Real(0));
    rep.monotone = true;
    return rep;
  }
  Real kk = rounded(k);
  rep.limit = mp::pow(1 - 1 / (kk * kk), Real(0.25));
  IsingRun run;
  {
    WorkingPrecision w2(work_bits(ctx, n_max));
    run = ising_recurrence_kernel(rounded(kk), IsingRegime::LowT, n_max, ctx);
  }
  for (int n = 0; n <= n_max; ++n) rep.deviation.push_back(rounded(abs(run.T[n] - Complex(rep.limit))));
  rep.monotone = true;
  for (int n = std::max(burn_in, 0) + 1; n <= n_max; ++n)
    if (rep.deviation[n] > rep.deviation[n - 1]) rep.monotone = false;
  return rep;
}

}  // namespace pvi
