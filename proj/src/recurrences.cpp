#include "pvi/recurrences.hpp"

#include <algorithm>
#include <functional>

namespace pvi {

namespace {

struct Seq {
  std::vector<Complex> v;
  Complex operator[](int n) const {
    if (n < 0 || n >= static_cast<int>(v.size())) return Complex();
    return v[n];
  }
};

struct Q {
  Complex mu, om, omb, t, w1;
};

Q make_q(const WeightParams& p) { return {p.mu, p.omega, p.omegabar, p.t, p.omega1()}; }
// omega <-> omegabar, t -> 1/t; applied together with r <-> rbar.
Q swapped(const Q& q) { return {q.mu, q.omb, q.om, Complex(1) / q.t, q.w1}; }

Complex C(int n) { return Complex(n); }

Complex eq_rrecur_a(int N, const Seq& r, const Seq& rb, const Q& q) {
  const Complex one(1);
  Complex v = one - r[N] * rb[N];
  Complex out = q.t * r[N] * rb[N - 1] + r[N - 1] * rb[N] - q.t - one -
                v / r[N] * ((C(N + 1) + q.mu + q.omb) * q.t * r[N + 1] + (C(N - 1) + q.mu + q.om) * r[N - 1]);
  Complex vm = one - r[N - 1] * rb[N - 1];
  if (!vm.is_zero())
    out += vm / rb[N - 1] * ((C(N) + q.mu + q.om) * rb[N] + (C(N - 2) + q.mu + q.omb) * q.t * rb[N - 2]);
  return out;
}

Complex eq_rrecur_b(int N, const Seq& r, const Seq& rb, const Q& q) {
  const Complex one(1);
  Complex v = one - r[N] * rb[N];
  Complex out = q.t * r[N] * rb[N - 1] + r[N - 1] * rb[N] - q.t - one -
                v / rb[N] * ((C(N + 1) + q.mu + q.om) * rb[N + 1] + (C(N - 1) + q.mu + q.omb) * q.t * rb[N - 1]);
  Complex vm = one - r[N - 1] * rb[N - 1];
  if (!vm.is_zero())
    out += vm / r[N - 1] * ((C(N) + q.mu + q.omb) * q.t * r[N] + (C(N - 2) + q.mu + q.om) * r[N - 2]);
  return out;
}

Complex eq_second_order(int N, const Seq& r, const Seq& rb, const Q& q) {
  return (C(N + 1) + q.mu + q.omb) * q.t * r[N + 1] * rb[N] - (C(N - 1) + q.mu + q.omb) * q.t * r[N] * rb[N - 1] -
         (C(N + 1) + q.mu + q.om) * rb[N + 1] * r[N] + (C(N - 1) + q.mu + q.om) * rb[N] * r[N - 1];
}

Complex eq_two_one(int N, const Seq& r, const Seq& rb, const Q& q) {
  const Complex one(1), two(2);
  Complex d = q.omb - q.om;
  return (C(N + 1) + q.mu + q.omb) * d * q.t * (one - r[N] * rb[N]) * r[N + 1] +
         (C(N - 1) + q.mu + q.om) * (two * (C(N) + q.mu + q.om) * r[N] * rb[N] + d) * r[N - 1] -
         (C(N - 1) + q.mu + q.omb) * (two * C(N) + two * q.mu + two * q.w1) * q.t * r[N] * r[N] * rb[N - 1] +
         (d * C(N) * (q.t + one) - (two * q.mu + two * q.w1) * (q.mu * (one - q.t) + q.om * q.t - q.omb)) * r[N];
}

Complex eq_two_zero(int N, const Seq& r, const Seq& rb, const Q& q) {
  const Complex one(1), two(2);
  Complex v = one - r[N] * rb[N];
  Complex X = v * ((C(N + 1) + q.mu + q.omb) * (C(N) + q.mu + q.omb) * q.t * r[N + 1] -
                   (C(N) + q.mu + q.om) * (C(N - 1) + q.mu + q.om) * r[N - 1]);
  Complex L = (X + C(N) * (C(N) + two * q.w1) * (q.t - one) * r[N]) *
              (X + (C(N) + two * q.mu) * (C(N) + two * q.mu + two * q.w1) * (q.t - one) * r[N]);
  Complex s = two * C(N) + two * q.mu + two * q.w1;
  Complex R = -s * s * q.t * v * ((C(N + 1) + q.mu + q.omb) * r[N + 1] + (C(N) + q.mu + q.om) * r[N]) *
              ((C(N) + q.mu + q.omb) * r[N] + (C(N - 1) + q.mu + q.om) * r[N - 1]);
  return L - R;
}

Complex eq_one_one_a(int N, const Seq& r, const Seq& rb, const Q& q) {
  const Complex one(1), two(2);
  Complex v = one - r[N] * rb[N];
  Complex P = r[N] * rb[N];
  Complex a = C(N) + q.mu + q.om;
  Complex base = -a * v * q.t * ((C(N + 1) + q.mu + q.omb) * r[N + 1] * rb[N] + (C(N - 1) + q.mu + q.omb) * r[N] * rb[N - 1]) +
                 two * a * a * P * P - a * a * (q.t + one) * P;
  Complex L = (base - two * a * q.omb * (q.t - one) * P + (q.mu - q.omb) * (q.mu + q.omb) * (q.t - one)) *
              (base + two * a * q.om * (q.t - one) * P + (q.mu - q.om) * (q.mu + q.om) * (q.t - one));
  Complex e = two * a * P + q.omb - q.om;
  Complex R = -e * e * v * ((C(N + 1) + q.mu + q.omb) * q.t * r[N + 1] + a * r[N]) *
              (a * rb[N] + (C(N - 1) + q.mu + q.omb) * q.t * rb[N - 1]);
  return L - R;
}

Complex eq_one_one_b(int N, const Seq& r, const Seq& rb, const Q& q) {
  const Complex one(1);
  Complex base = (C(N + 1) + q.mu + q.omb) * (C(N) + q.mu + q.omb) * q.t * r[N + 1] * rb[N] -
                 (C(N + 1) + q.mu + q.om) * (C(N) + q.mu + q.om) * rb[N + 1] * r[N];
  Complex L = (base + (q.omb - q.mu) * (q.omb + q.mu) * (q.t - one)) * (base + (q.om - q.mu) * (q.om + q.mu) * (q.t - one));
  Complex d = q.omb - q.om;
  Complex R = d * d * ((C(N + 1) + q.mu + q.omb) * q.t * r[N + 1] + (C(N) + q.mu + q.om) * r[N]) *
              ((C(N + 1) + q.mu + q.om) * rb[N + 1] + (C(N) + q.mu + q.omb) * q.t * rb[N]);
  return L - R;
}

using EqFn = Complex (*)(int, const Seq&, const Seq&, const Q&);

Complex partner(EqFn f, int N, const Seq& r, const Seq& rb, const Q& q) { return f(N, rb, r, swapped(q)); }

Real threshold() { return pow2(-(current_bits() / 2)); }

struct Breakdown {
  int index;
};

// Root of f, which must be affine in x.
Complex solve_linear(const std::function<Complex(const Complex&)>& f, int index) {
  Complex f0 = f(Complex(0)), f1 = f(Complex(1));
  Complex slope = f1 - f0;
  Real scale = std::max(Real(1), std::max(abs(f0), abs(f1)));
  if (abs(slope) < threshold() * scale) throw Breakdown{index};
  return -f0 / slope;
}

struct QuadRoots {
  std::vector<Complex> roots;
};

// Roots of f, a polynomial of degree <= 2 in x.
QuadRoots solve_quadratic(const std::function<Complex(const Complex&)>& f, int index) {
  Complex f0 = f(Complex(0)), f1 = f(Complex(1)), fm = f(Complex(-1));
  Complex a = (f1 + fm) / Complex(2) - f0;
  Complex b = (f1 - fm) / Complex(2);
  Complex c = f0;
  Real scale = std::max(Real(1), std::max(abs(f0), std::max(abs(f1), abs(fm))));
  Real th = threshold() * scale;
  if (abs(a) < th) {
    if (abs(b) < th) throw Breakdown{index};
    return {{-c / b}};
  }
  Complex sd = sqrt(b * b - Complex(4) * a * c);
  Complex qp = b + sd, qm = b - sd;
  Complex qq = abs(qp) >= abs(qm) ? qp : qm;
  qq = -qq / Complex(2);
  if (qq.is_zero()) return {{Complex(), Complex()}};
  return {{qq / a, c / qq}};
}

Complex pick_root(const QuadRoots& qr, const std::optional<Complex>& pred, int index, std::vector<std::string>& ev) {
  if (qr.roots.size() == 1) return qr.roots[0];
  if (!pred) throw Error(ErrorCode::RootAmbiguity, "no predictor for quadratic root", index);
  Real d0 = abs(qr.roots[0] - *pred), d1 = abs(qr.roots[1] - *pred);
  Real tol = Real(1e-20) * std::max(Real(1), abs(*pred));
  if (d0 < tol && d1 < tol && abs(qr.roots[0] - qr.roots[1]) > pow2(-(current_bits() / 2)))
    throw Error(ErrorCode::RootAmbiguity, "both quadratic roots match the predictor", index);
  int k = d0 <= d1 ? 0 : 1;
  ev.push_back("root " + std::to_string(index) + ": " + std::to_string(k));
  return qr.roots[k];
}

// Per-index determinant oracle at the current precision.
class Splicer {
 public:
  explicit Splicer(const WeightParams& p) : w_(moment_source(p)) {}
  std::pair<Complex, Complex> reflection(int n) {
    if (n == 0) return {Complex(1), Complex(1)};
    Complex d0 = toeplitz_det_kernel(w_, 0, n);
    if (d0.is_zero()) throw Error(ErrorCode::ZeroDeterminant, "I^0_n = 0", n);
    Complex sgn((n % 2) ? -1 : 1);
    return {sgn * toeplitz_det_kernel(w_, 1, n) / d0, sgn * toeplitz_det_kernel(w_, -1, n) / d0};
  }

 private:
  MomentCache w_;
};

InitialValues initial_kernel(const WeightParams& p) {
  InitialValues iv;
  iv.w0 = moment_kernel(p, 0);
  if (abs(iv.w0) < threshold()) throw Error(ErrorCode::ZeroW0, "w_0 vanishes");
  iv.r1 = -moment_kernel(p, -1) / iv.w0;
  iv.rbar1 = -moment_kernel(p, 1) / iv.w0;
  return iv;
}

void fill_derived(CoefficientTable& tab, const std::vector<Complex>& T, bool reflections) {
  int n = tab.n_max;
  for (int j = 0; j <= n; ++j) {
    tab.T[j] = T[j];
    tab.I0[j] = T[j];
    if (T[j + 1].is_zero()) throw Error(ErrorCode::ZeroTau, "T vanishes", j + 1);
    tab.kappa[j] = sqrt(T[j] / T[j + 1]);
  }
  if (!reflections) return;
  Complex lk, lbk, mk;
  std::vector<Complex> lks(n + 1);
  for (int j = 0; j <= n; ++j) {
    if (j > 0) {
      lk += tab.r[j] * tab.rbar[j - 1];
      lbk += tab.rbar[j] * tab.r[j - 1];
    }
    lks[j] = lk;
    if (j >= 2) mk += tab.r[j] * (tab.rbar[j - 2] + tab.rbar[j - 1] * lks[j - 2]);
    tab.l[j] = lk * tab.kappa[j];
    tab.lbar[j] = lbk * tab.kappa[j];
    tab.m[j] = mk * tab.kappa[j];
  }
}

std::vector<Complex> tau_extended(const std::vector<Complex>& r, const std::vector<Complex>& rb, const Complex& w0,
                                  int n_max) {
  std::vector<Complex> T(n_max + 2);
  T[0] = Complex(1);
  if (n_max + 1 >= 1) T[1] = w0;
  for (int n = 1; n <= n_max; ++n) {
    if (T[n - 1].is_zero()) throw Error(ErrorCode::ZeroTau, "T vanishes", n - 1);
    T[n + 1] = T[n] * T[n] * (Complex(1) - r[n] * rb[n]) / T[n - 1];
  }
  return T;
}

// ---------------------------------------------------------------- reflection routes

RouteResult reflection_kernel(RouteId id, const WeightParams& p, int n_max, const RouteOptions& opt) {
  RouteResult res;
  res.route = id;
  res.bits = current_bits();
  Q q = make_q(p);
  InitialValues iv = initial_kernel(p);
  Seq r, rb;
  r.v.assign(n_max + 2, Complex());
  rb.v.assign(n_max + 2, Complex());
  r.v[0] = rb.v[0] = Complex(1);
  r.v[1] = iv.r1;
  rb.v[1] = iv.rbar1;
  Splicer oracle(p);

  bool quadratic = id == RouteId::OneOneBilinear || id == RouteId::OneOneNext || id == RouteId::TwoZeroPair;
  CoefficientTable pred;
  if (quadratic) {
    WorkingPrecision lo(std::max(128, res.bits / 2));
    try {
      pred = build_table_kernel(moment_source(p), n_max);
    } catch (const Error&) {
      pred.n_max = -1;
    }
  }
  auto predictor = [&](bool bar, int n) -> std::optional<Complex> {
    if (n > pred.n_max) return std::nullopt;
    return bar ? pred.rbar[n] : pred.r[n];
  };

  Real small = threshold();
  for (int N = 1; N < n_max; ++N) {
    int k = N + 1;
    bool bad = opt.inject_breakdown == k;
    for (int j : {N, N - 1})
      if (abs(r[j]) < small || abs(rb[j]) < small) bad = true;
    if (!bad) {
      try {
        auto set_r = [&](const Complex& x) { r.v[k] = x; };
        auto set_rb = [&](const Complex& x) { rb.v[k] = x; };
        auto lin = [&](EqFn f, bool bar, bool use_partner) {
          return solve_linear(
              [&](const Complex& x) {
                bar ? set_rb(x) : set_r(x);
                return use_partner ? partner(f, N, r, rb, q) : f(N, r, rb, q);
              },
              k);
        };
        auto quad = [&](EqFn f, bool bar, bool use_partner) {
          QuadRoots qr = solve_quadratic(
              [&](const Complex& x) {
                bar ? set_rb(x) : set_r(x);
                return use_partner ? partner(f, N, r, rb, q) : f(N, r, rb, q);
              },
              k);
          return pick_root(qr, predictor(bar, k), k, res.events);
        };
        Complex nr, nrb;
        switch (id) {
          case RouteId::TwoTwoA:
            nr = lin(eq_rrecur_a, false, false);
            r.v[k] = nr;
            nrb = lin(eq_rrecur_b, true, false);
            break;
          case RouteId::TwoTwoB:
            nr = lin(eq_rrecur_a, false, false);
            r.v[k] = nr;
            nrb = lin(eq_second_order, true, false);
            break;
          case RouteId::TwoOnePair:
            nr = lin(eq_two_one, false, false);
            r.v[k] = nr;
            nrb = lin(eq_two_one, true, true);
            break;
          case RouteId::OneOneBilinear:
            nr = quad(eq_one_one_a, false, false);
            r.v[k] = nr;
            nrb = quad(eq_one_one_a, true, true);
            break;
          case RouteId::TwoZeroPair:
            nr = quad(eq_two_zero, false, false);
            r.v[k] = nr;
            nrb = lin(eq_second_order, true, false);
            break;
          case RouteId::OneOneNext: {
            // rbar_{N+1} is affine in r_{N+1} through the second-order relation.
            auto rb_of = [&](const Complex& x) {
              r.v[k] = x;
              return solve_linear(
                  [&](const Complex& y) {
                    rb.v[k] = y;
                    return eq_second_order(N, r, rb, q);
                  },
                  k);
            };
            QuadRoots qr = solve_quadratic(
                [&](const Complex& x) {
                  Complex y = rb_of(x);
                  r.v[k] = x;
                  rb.v[k] = y;
                  return eq_one_one_b(N, r, rb, q);
                },
                k);
            nr = pick_root(qr, predictor(false, k), k, res.events);
            nrb = rb_of(nr);
            break;
          }
          default:
            throw Error(ErrorCode::InvalidArgument, "not a reflection route");
        }
        r.v[k] = nr;
        rb.v[k] = nrb;
      } catch (const Breakdown&) {
        bad = true;
      }
    }
    if (bad) {
      if (!opt.allow_splice) throw Error(ErrorCode::DivisionBreakdown, "recurrence breakdown", k);
      auto [a, b] = oracle.reflection(k);
      r.v[k] = a;
      rb.v[k] = b;
      res.spliced.push_back(k);
      res.events.push_back("splice " + std::to_string(k));
    }
  }

  res.table.resize(n_max);
  for (int n = 0; n <= n_max; ++n) {
    res.table.r[n] = r[n];
    res.table.rbar[n] = rb[n];
    res.table.source[n] = route_name(id);
  }
  for (int n : res.spliced)
    if (n <= n_max) res.table.source[n] = "oracle";
  fill_derived(res.table, tau_extended(r.v, rb.v, iv.w0, n_max), true);
  return res;
}

// ---------------------------------------------------------------- discrete Painleve

void check_pole(const Complex& d, int index) {
  if (abs(d) < threshold()) throw Breakdown{index};
}

RouteResult dpv_kernel(const WeightParams& p, int n_max, bool conj, const RouteOptions& opt) {
  RouteResult res;
  res.route = conj ? RouteId::DPainleveGFConj : RouteId::DPainleveGF;
  res.bits = current_bits();
  Q q = make_q(p);
  const Complex one(1), two(2);
  const Complex& t = q.t;
  InitialValues iv = initial_kernel(p);
  Splicer oracle(p);
  Seq r, rb;
  r.v.assign(n_max + 3, Complex());
  rb.v.assign(n_max + 3, Complex());
  r.v[0] = rb.v[0] = one;
  auto ledger = [&](int N) {
    res.dpv_alpha.push_back({-two * q.mu, C(N - 1) + q.mu + q.om, C(1 - N), -two * q.w1, C(N) + q.mu + q.omb});
  };
  auto splice = [&](int k) {
    if (!opt.allow_splice) throw Error(ErrorCode::PoleStep, "dPV pole", k);
    auto [a, b] = oracle.reflection(k);
    res.spliced.push_back(k);
    res.events.push_back("splice " + std::to_string(k));
    return std::make_pair(a, b);
  };
  Complex lk_prev;  // l_{N-1}/kappa_{N-1}

  if (!conj) {
    r.v[1] = iv.r1;
    auto g_of = [&](int N) {  // from r_N / r_{N-1}
      Complex A = C(N - 1) + q.mu + q.om, B = C(N) + q.mu + q.omb;
      Complex rho = r[N] / r[N - 1];
      return t * (A + B * rho) / (A + B * t * rho);
    };
    Complex g = g_of(1);
    Complex f_prev(0);
    res.g.push_back(g);
    res.f.push_back(f_prev);
    for (int N = 1; N <= n_max; ++N) {
      ledger(N);
      Complex f;
      bool bad = opt.inject_breakdown == N + 1;
      if (!bad) {
        try {
          check_pole(g - one, N);
          check_pole(g - t, N);
          f = -f_prev + two * q.w1 + (C(N - 1) + q.mu + q.om) / (g - one) + (C(N) + q.mu + q.omb) * t / (g - t);
          check_pole(f, N);
          check_pole(f - two * q.w1, N);
          Complex gn = t * (f + C(N)) * (f + C(N) + two * q.mu) / (f * (f - two * q.w1)) / g;
          Complex A = C(N) + q.mu + q.om, B = C(N + 1) + q.mu + q.omb;
          check_pole(gn - one, N + 1);
          r.v[N + 1] = A * (t - gn) / (B * t * (gn - one)) * r[N];
          // f_N (1-t) = t lk_N - N - (N+1+mu+omb)(1 - r_N rbar_N) t r_{N+1}/r_N, linear in rbar_N
          check_pole(r[N], N);
          rb.v[N] = solve_linear(
              [&](const Complex& y) {
                Complex lk = lk_prev + r[N] * rb[N - 1];
                return t * lk - C(N) - B * (one - r[N] * y) * t * r[N + 1] / r[N] - f * (one - t);
              },
              N);
          g = gn;
        } catch (const Breakdown&) {
          bad = true;
        }
      }
      if (bad) {
        auto [a, b] = splice(N + 1);
        r.v[N + 1] = a;
        rb.v[N] = oracle.reflection(N).second;
        Complex lk = lk_prev + r[N] * rb[N - 1];
        Complex B = C(N + 1) + q.mu + q.omb;
        f = (t * lk - C(N) - B * (one - r[N] * rb[N]) * t * r[N + 1] / r[N]) / (one - t);
        g = g_of(N + 1);
        (void)b;
      }
      lk_prev = lk_prev + r[N] * rb[N - 1];
      f_prev = f;
      res.f.push_back(f);
      res.g.push_back(g);
    }
  } else {
    rb.v[1] = iv.rbar1;
    auto gb_of = [&](int N) {
      Complex A = C(N - 1) + q.mu + q.omb, B = C(N) + q.mu + q.om;
      Complex rho = rb[N] / rb[N - 1];
      return (A + B / t * rho) / (A + B * rho);
    };
    Complex g = gb_of(1);
    Complex f_prev(0);
    res.g.push_back(g);
    res.f.push_back(f_prev);
    Complex it = one / t;
    for (int N = 1; N <= n_max; ++N) {
      ledger(N);
      Complex f;
      bool bad = opt.inject_breakdown == N + 1;
      if (!bad) {
        try {
          check_pole(g - one, N);
          check_pole(g - it, N);
          f = -f_prev + two * q.mu + (C(N) + q.mu + q.om) / (g - one) + (C(N - 1) + q.mu + q.omb) * it / (g - it);
          // fbar_N (1-t) = -t lk_N + N t + (N-1+mu+omb)(1 - r_N rbar_N) t rbar_{N-1}/rbar_N, linear in r_N
          check_pole(rb[N], N);
          r.v[N] = solve_linear(
              [&](const Complex& x) {
                Complex lk = lk_prev + x * rb[N - 1];
                return -t * lk + C(N) * t + (C(N - 1) + q.mu + q.omb) * (one - x * rb[N]) * t * rb[N - 1] / rb[N] -
                       f * (one - t);
              },
              N);
          check_pole(f, N);
          check_pole(f - two * q.mu, N);
          Complex gn = (f + C(N)) * (f + C(N) + two * q.w1) / (f * (f - two * q.mu)) * it / g;
          Complex A = C(N) + q.mu + q.omb, B = C(N + 1) + q.mu + q.om;
          check_pole(gn - it, N + 1);
          rb.v[N + 1] = A * (one - gn) / (B * (gn - it)) * rb[N];
          g = gn;
        } catch (const Breakdown&) {
          bad = true;
        }
      }
      if (bad) {
        auto [a, b] = splice(N + 1);
        rb.v[N + 1] = b;
        r.v[N] = oracle.reflection(N).first;
        Complex lk = lk_prev + r[N] * rb[N - 1];
        f = (-t * lk + C(N) * t + (C(N - 1) + q.mu + q.omb) * (one - r[N] * rb[N]) * t * rb[N - 1] / rb[N]) / (one - t);
        g = gb_of(N + 1);
        (void)a;
      }
      lk_prev = lk_prev + r[N] * rb[N - 1];
      f_prev = f;
      res.f.push_back(f);
      res.g.push_back(g);
    }
  }

  res.table.resize(n_max);
  for (int n = 0; n <= n_max; ++n) {
    res.table.r[n] = r[n];
    res.table.rbar[n] = rb[n];
    res.table.source[n] = route_name(res.route);
  }
  for (int n : res.spliced)
    if (n <= n_max) res.table.source[n] = "oracle";
  fill_derived(res.table, tau_extended(r.v, rb.v, iv.w0, n_max), true);
  return res;
}

// ---------------------------------------------------------------- tau schemes

// d/dphi log w_0 with t = e^{i phi}.
Complex dlog_w0_dphi(const WeightParams& p) {
  return I() * p.t * moment_dt_kernel(p, 0) / moment_kernel(p, 0);
}

RouteResult tau_kernel(const WeightParams& p, int n_max, bool l14) {
  RouteResult res;
  res.route = l14 ? RouteId::TauL14 : RouteId::TauL01;
  res.bits = current_bits();
  res.has_reflections = false;
  Q q = make_q(p);
  const Complex one(1), two(2);
  const Complex &mu = q.mu, &om = q.om, &omb = q.omb, &w1 = q.w1;
  if (mu.is_zero()) throw Error(ErrorCode::DomainError, "tau schemes need mu != 0");
  Complex w0 = moment_kernel(p, 0);
  if (abs(w0) < threshold()) throw Error(ErrorCode::ZeroW0, "w_0 vanishes");
  Complex X = dlog_w0_dphi(p);
  std::vector<Complex> T(n_max + 2);
  T[0] = one;
  T[1] = w0;
  Complex t, g, f;
  if (!l14) {
    Complex q0 = (one + I() / mu * X) / two;
    t = one / (one - q.t);
    check_pole(q0 - one, 0);
    check_pole(q0 - t, 0);
    g = q0 / (q0 - one);
    f = (one + mu + omb) * (q0 - one) + (mu + om) * q0 - (two * w1 + one) * q0 * (q0 - one) / (q0 - t);
  } else {
    X += I() * mu;
    Complex q0 = w1 / mu * (-I() * X) / (mu + om + I() * X);
    t = q.t;
    check_pole(q0 - one, 0);
    check_pole(q0, 0);
    check_pole(one - t, 0);
    g = (q0 - t) / (q0 - one);
    f = ((mu + om) * (q0 - one) + (mu + omb) * (q0 - t) - two * w1 * (q0 - t) * (q0 - one) / q0) / (one - t);
  }
  Complex f_prev;
  try {
    for (int N = 0; N <= n_max; ++N) {
      Complex Nc = C(N);
      check_pole(g, N);
      check_pole(g - one, N);
      Complex qN, pN, ratio;
      if (!l14) {
        if (N > 0) {
          check_pole(t * (g - one) - g, N);
          f = -f_prev + mu + om + (Nc + two * mu) / (g - one) + (Nc + one + two * w1) * t / (t * (g - one) - g);
        }
        qN = g / (g - one);
        check_pole(t + (one - t) * g, N);
        pN = (g - one) * (g - one) / g * f - (Nc + one + mu + omb) * (g - one) / g - (mu + om) * (g - one) +
             (Nc + one + two * w1) * (g - one) / (t + (one - t) * g);
        if (N >= 1) {
          Complex rhs = qN * (qN - one) * pN * pN + (two * mu + two * w1) * qN * pN - (mu + omb) * pN -
                        Nc * (Nc + two * mu + two * w1);
          ratio = -rhs / ((Nc + mu + om) * (Nc + mu + omb));
        }
        check_pole(f, N);
        check_pole(f - mu - om, N);
        Complex gn = t / (t - one) * (f + Nc + one) * (f + Nc + one + mu + omb) / (f * (f - mu - om)) / g;
        f_prev = f;
        g = gn;
      } else {
        if (N > 0) {
          check_pole(g - t, N);
          f = -f_prev + mu + omb + (Nc + two * mu) / (g - one) + (Nc + two * w1) * t / (g - t);
        }
        check_pole(g - t, N);
        qN = (g - t) / (g - one);
        pN = (g - one) / ((one - t) * g) *
             ((g - one) * f - (mu + omb) * g + (Nc + two * w1) * (one - t) * g / (g - t) - Nc - mu - om);
        if (N >= 1) {
          Complex rhs = qN * (qN - one) * (qN - one) * pN * pN +
                        ((two * mu - Nc) * qN + Nc + two * w1) * (qN - one) * pN - two * mu * Nc * qN -
                        Nc * (Nc + two * w1);
          ratio = -rhs / ((Nc + mu + om) * (Nc + mu + omb));
        }
        check_pole(f, N);
        check_pole(f - mu - omb, N);
        Complex gn = t * (f + Nc + one) * (f + Nc + mu + om) / (f * (f - mu - omb)) / g;
        f_prev = f;
        g = gn;
      }
      res.q.push_back(qN);
      res.p.push_back(pN);
      if (N >= 1) {
        if (T[N - 1].is_zero()) throw Error(ErrorCode::ZeroTau, "T vanishes", N - 1);
        T[N + 1] = T[N] * T[N] * ratio / T[N - 1];
      }
    }
  } catch (const Breakdown& b) {
    throw Error(ErrorCode::PoleStep, "tau scheme pole", b.index);
  }
  res.table.resize(n_max);
  for (int n = 0; n <= n_max; ++n) res.table.source[n] = route_name(res.route);
  fill_derived(res.table, T, false);
  return res;
}

RouteResult kernel(RouteId id, const WeightParams& p, int n_max, const RouteOptions& opt) {
  WeightParams pr = p.rounded_copy();
  switch (id) {
    case RouteId::DPainleveGF:
      return dpv_kernel(pr, n_max, false, opt);
    case RouteId::DPainleveGFConj:
      return dpv_kernel(pr, n_max, true, opt);
    case RouteId::TauL01:
      return tau_kernel(pr, n_max, false);
    case RouteId::TauL14:
      return tau_kernel(pr, n_max, true);
    default:
      return reflection_kernel(id, pr, n_max, opt);
  }
}

void check_guards(RouteId id, const WeightParams& p, int n_max, int bits) {
  if (n_max < 1) throw Error(ErrorCode::InvalidArgument, "routes need N_max >= 1");
  WorkingPrecision wp(bits);
  if (id == RouteId::TwoOnePair || id == RouteId::OneOneNext) {
    if (abs(p.omega - p.omegabar) < pow2(-(bits / 4)))
      throw Error(ErrorCode::DegenerateOmega, "route requires omega != omegabar");
  }
  if (id == RouteId::TauL14 && !p.xi.is_zero())
    throw Error(ErrorCode::DomainError, "TauL14 requires xi = 0");
}

}  // namespace

const char* route_name(RouteId r) {
  switch (r) {
    case RouteId::TwoTwoA: return "TwoTwoA";
    case RouteId::TwoTwoB: return "TwoTwoB";
    case RouteId::TwoOnePair: return "TwoOnePair";
    case RouteId::OneOneBilinear: return "OneOneBilinear";
    case RouteId::OneOneNext: return "OneOneNext";
    case RouteId::TwoZeroPair: return "TwoZeroPair";
    case RouteId::DPainleveGF: return "DPainleveGF";
    case RouteId::DPainleveGFConj: return "DPainleveGFConj";
    case RouteId::TauL01: return "TauL01";
    case RouteId::TauL14: return "TauL14";
  }
  return "unknown";
}

std::vector<RouteId> all_routes() {
  return {RouteId::TwoTwoA,    RouteId::TwoTwoB,     RouteId::TwoOnePair,     RouteId::OneOneBilinear,
          RouteId::OneOneNext, RouteId::TwoZeroPair, RouteId::DPainleveGF,    RouteId::DPainleveGFConj,
          RouteId::TauL01,     RouteId::TauL14};
}

std::optional<RouteId> parse_route(const std::string& s) {
  for (RouteId r : all_routes())
    if (s == route_name(r)) return r;
  return std::nullopt;
}

bool route_has_reflections(RouteId r) { return r != RouteId::TauL01 && r != RouteId::TauL14; }

InitialValues initial_conditions(const WeightParams& p, const PrecisionContext& ctx) {
  InitialValues iv;
  iv.w0 = toeplitz_moment(p, 0, ctx);
  if (abs(iv.w0) < pow2(-(ctx.bits / 2))) throw Error(ErrorCode::ZeroW0, "w_0 vanishes");
  iv.r1 = -toeplitz_moment(p, -1, ctx) / iv.w0;
  iv.rbar1 = -toeplitz_moment(p, 1, ctx) / iv.w0;
  return iv;
}

int route_bits(const PrecisionContext& ctx, int n_max) { return std::max({ctx.bits, 256, 64 + 8 * n_max}); }

RouteResult run_route(RouteId id, const WeightParams& p, int n_max, const PrecisionContext& ctx,
                      const RouteOptions& opt) {
  ctx.validate();
  int bits = route_bits(ctx, n_max);
  check_guards(id, p, n_max, bits);
  RouteResult lo, hi;
  {
    WorkingPrecision wp(2 * bits);
    hi = kernel(id, p, n_max, opt);
  }
  {
    WorkingPrecision wp(bits);
    lo = kernel(id, p, n_max, opt);
  }
  WorkingPrecision wp(bits);
  int n = n_max + 1;
  lo.err_r.assign(n, Real(0));
  lo.err_rbar.assign(n, Real(0));
  lo.err_T.assign(n, Real(0));
  for (int j = 0; j < n; ++j) {
    lo.err_T[j] = rounded(rel_diff(lo.table.T[j], hi.table.T[j]));
    if (lo.has_reflections) {
      lo.err_r[j] = rounded(rel_diff(lo.table.r[j], hi.table.r[j]));
      lo.err_rbar[j] = rounded(rel_diff(lo.table.rbar[j], hi.table.rbar[j]));
    }
  }
  lo.l_health = Real(0);
  if (lo.has_reflections && !p.t.is_zero()) {
    Real small = pow2(-(bits / 2));
    for (int j = 1; j < n_max; ++j) {
      if (abs(lo.table.r[j]) < small || abs(lo.table.rbar[j]) < small) continue;
      Subleading s = subleading_from_reflections(p, lo.table, j);
      lo.l_health = std::max(lo.l_health, rel_diff(s.lk, lo.table.lk(j)));
    }
  }
  return lo;
}

RouteResult run_two_two(const WeightParams& p, int n_max, const PrecisionContext& ctx, bool variant_b,
                        const RouteOptions& opt) {
  return run_route(variant_b ? RouteId::TwoTwoB : RouteId::TwoTwoA, p, n_max, ctx, opt);
}
RouteResult run_two_one_pair(const WeightParams& p, int n_max, const PrecisionContext& ctx, const RouteOptions& opt) {
  return run_route(RouteId::TwoOnePair, p, n_max, ctx, opt);
}
RouteResult run_one_one(const WeightParams& p, int n_max, OneOneVariant v, const PrecisionContext& ctx,
                        const RouteOptions& opt) {
  return run_route(v == OneOneVariant::Bilinear ? RouteId::OneOneBilinear : RouteId::OneOneNext, p, n_max, ctx, opt);
}
RouteResult run_two_zero_pair(const WeightParams& p, int n_max, const PrecisionContext& ctx, const RouteOptions& opt) {
  return run_route(RouteId::TwoZeroPair, p, n_max, ctx, opt);
}
RouteResult run_dpv(const WeightParams& p, int n_max, bool conj, const PrecisionContext& ctx, const RouteOptions& opt) {
  return run_route(conj ? RouteId::DPainleveGFConj : RouteId::DPainleveGF, p, n_max, ctx, opt);
}
RouteResult run_tau_L01(const WeightParams& p, int n_max, const PrecisionContext& ctx) {
  return run_route(RouteId::TauL01, p, n_max, ctx);
}
RouteResult run_tau_L14(const WeightParams& p, int n_max, const PrecisionContext& ctx) {
  return run_route(RouteId::TauL14, p, n_max, ctx);
}

std::vector<Complex> tau_from_reflections(const CoefficientTable& table) {
  int n = table.n_max;
  std::vector<Complex> T(n + 1);
  T[0] = Complex(1);
  if (n >= 1) T[1] = table.T[1];
  for (int j = 1; j < n; ++j) {
    if (T[j - 1].is_zero()) throw Error(ErrorCode::ZeroTau, "T vanishes", j - 1);
    T[j + 1] = T[j] * T[j] * (Complex(1) - table.r[j] * table.rbar[j]) / T[j - 1];
  }
  return T;
}

Subleading subleading_from_reflections(const WeightParams& p, const CoefficientTable& tab, int n) {
  if (n < 1 || n + 1 > tab.n_max) throw Error(ErrorCode::InvalidArgument, "subleading needs 1 <= N < n_max");
  const auto& r = tab.r;
  const auto& rb = tab.rbar;
  Complex N(n), one(1), two(2);
  Complex mu = p.mu, om = p.omega, omb = p.omegabar, t = p.t;
  Complex tail = (N + mu - om) * t + N - mu + omb;
  Subleading s;
  s.lk = ((N + one + mu + omb) * t * (r[n + 1] / r[n] - r[n + 1] * rb[n]) + (N - one + mu + om) * r[n - 1] / r[n] -
          (N - one + mu + omb) * t * r[n] * rb[n - 1] + tail) /
         (two * t);
  s.lk_alt = ((N + one + mu + om) * rb[n + 1] / rb[n] + (N - one + mu + omb) * t * (rb[n - 1] / rb[n] - r[n] * rb[n - 1]) -
              (N + one + mu + omb) * t * r[n + 1] * rb[n] + tail) /
             (two * t);
  Complex it = one / t;
  Complex tailb = (N + mu - omb) * it + N - mu + om;
  s.lbk = ((N + one + mu + om) * it * (rb[n + 1] / rb[n] - rb[n + 1] * r[n]) +
           (N - one + mu + omb) * rb[n - 1] / rb[n] - (N - one + mu + om) * it * rb[n] * r[n - 1] + tailb) /
          (two * it);
  Complex lrec = (N + mu + omb) * t * s.lk - (N + mu + om) * s.lbk - N * (mu * (t - one) + omb - om * t);
  s.lrecur_residual = abs(lrec) / std::max(Real(1), abs(N * (mu * (t - one) + omb - om * t)));
  return s;
}

RelationResiduals relation_residuals(const WeightParams& p, const CoefficientTable& tab, int n) {
  if (n < 1 || n + 1 > tab.n_max) throw Error(ErrorCode::InvalidArgument, "relation residuals need 1 <= N < n_max");
  Seq r{tab.r}, rb{tab.rbar};
  Q q = make_q(p);
  RelationResiduals o;
  o.two_two_a = eq_rrecur_a(n, r, rb, q);
  o.two_two_b = eq_rrecur_b(n, r, rb, q);
  o.second_order = eq_second_order(n, r, rb, q);
  o.two_one = eq_two_one(n, r, rb, q);
  o.two_one_partner = partner(eq_two_one, n, r, rb, q);
  o.two_zero = eq_two_zero(n, r, rb, q);
  o.two_zero_partner = partner(eq_two_zero, n, r, rb, q);
  o.one_one_a = eq_one_one_a(n, r, rb, q);
  o.one_one_a_partner = partner(eq_one_one_a, n, r, rb, q);
  o.one_one_b = eq_one_one_b(n, r, rb, q);
  return o;
}

}  // namespace pvi
