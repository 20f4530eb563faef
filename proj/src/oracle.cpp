#include "pvi/oracle.hpp"

#include <random>

namespace pvi {

namespace mp = boost::multiprecision;

void CoefficientTable::resize(int n) {
  n_max = n;
  size_t s = static_cast<size_t>(n + 1);
  for (auto* v : {&r, &rbar, &kappa, &l, &lbar, &m, &I0, &T}) v->assign(s, Complex());
  source.assign(s, "oracle");
}

const Complex& MomentCache::get(int n) {
  auto it = cache_.find(n);
  if (it != cache_.end()) return it->second;
  return cache_.emplace(n, f_(n)).first->second;
}

// ---------------------------------------------------------------- determinants

namespace {

Matrix toeplitz_matrix(MomentCache& w, int eps, int n) {
  Matrix a(n, std::vector<Complex>(n));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) a[j][k] = w.get(-eps + j - k);
  return a;
}

bool table_agrees(const CoefficientTable& a, const CoefficientTable& b, const Real& tol) {
  for (int n = 0; n <= a.n_max; ++n) {
    if (rel_diff(a.r[n], b.r[n]) > tol || rel_diff(a.rbar[n], b.rbar[n]) > tol ||
        rel_diff(a.T[n], b.T[n]) > tol)
      return false;
  }
  return true;
}

CoefficientTable rounded_table(const CoefficientTable& t) {
  CoefficientTable o = t;
  for (auto* v : {&o.r, &o.rbar, &o.kappa, &o.l, &o.lbar, &o.m, &o.I0, &o.T})
    for (auto& x : *v) x = rounded(x);
  return o;
}

template <class F>
CoefficientTable escalate_table(const PrecisionContext& ctx, F&& f) {
  ctx.validate();
  int b = ctx.bits;
  CoefficientTable prev;
  {
    WorkingPrecision wp(b + 32);
    prev = f();
  }
  Real tol(ctx.tol);
  for (int e = 0; e <= ctx.max_escalations; ++e) {
    b *= 2;
    CoefficientTable cur;
    {
      WorkingPrecision wp(b + 32);
      cur = f();
    }
    if (table_agrees(prev, cur, tol)) return rounded_table(cur);
    prev = cur;
  }
  throw Error(ErrorCode::NoConvergence, "table escalation exhausted");
}

}  // namespace

Complex toeplitz_det_kernel(MomentCache& w, int eps, int n, std::vector<std::string>* notes) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "negative determinant size");
  if (n == 0) return Complex(1);
  DetResult d = det_lu(toeplitz_matrix(w, eps, n));
  if (notes && d.min_pivot < pow2(-(current_bits() / 2)))
    notes->push_back("NearSingular: I^" + std::to_string(eps) + "_" + std::to_string(n));
  return d.value;
}

Complex toeplitz_det(const WeightParams& p, int eps, int n, const PrecisionContext& ctx) {
  return escalate(ctx, [&] {
    MomentCache w(moment_source(p));
    return toeplitz_det_kernel(w, eps, n);
  });
}

Complex toeplitz_det_cofactor(const WeightParams& p, int eps, int n, const PrecisionContext& ctx) {
  if (n > 8) throw Error(ErrorCode::InvalidArgument, "cofactor expansion limited to n <= 8");
  return escalate(ctx, [&] {
    MomentCache w(moment_source(p));
    return det_cofactor(toeplitz_matrix(w, eps, n));
  });
}

std::pair<Complex, Complex> reflection_from_dets(const WeightParams& p, int n, const PrecisionContext& ctx) {
  if (n == 0) return {Complex(1), Complex(1)};
  Complex sgn((n % 2) ? -1 : 1);
  Complex r = escalate(ctx, [&] {
    MomentCache w(moment_source(p));
    Complex d0 = toeplitz_det_kernel(w, 0, n);
    if (d0.is_zero()) throw Error(ErrorCode::ZeroDeterminant, "I^0_n = 0", n);
    return sgn * toeplitz_det_kernel(w, 1, n) / d0;
  });
  Complex rb = escalate(ctx, [&] {
    MomentCache w(moment_source(p));
    Complex d0 = toeplitz_det_kernel(w, 0, n);
    if (d0.is_zero()) throw Error(ErrorCode::ZeroDeterminant, "I^0_n = 0", n);
    return sgn * toeplitz_det_kernel(w, -1, n) / d0;
  });
  return {r, rb};
}

CoefficientTable build_table_kernel(const MomentFn& wf, int n_max) {
  MomentCache w(wf);
  CoefficientTable tab;
  tab.resize(n_max);
  std::vector<Complex> I0(n_max + 2);
  for (int n = 0; n <= n_max + 1; ++n) I0[n] = toeplitz_det_kernel(w, 0, n, &tab.notes);
  for (int n = 0; n <= n_max; ++n) {
    if (I0[n].is_zero() || I0[n + 1].is_zero())
      throw Error(ErrorCode::ZeroDeterminant, "vanishing Toeplitz determinant", n);
    Complex sgn((n % 2) ? -1 : 1);
    tab.I0[n] = I0[n];
    tab.T[n] = I0[n];
    tab.r[n] = n == 0 ? Complex(1) : sgn * toeplitz_det_kernel(w, 1, n, &tab.notes) / I0[n];
    tab.rbar[n] = n == 0 ? Complex(1) : sgn * toeplitz_det_kernel(w, -1, n, &tab.notes) / I0[n];
    tab.kappa[n] = sqrt(I0[n] / I0[n + 1]);
  }
  // l_n / kappa_n = sum_{j<n} r_{j+1} rbar_j; m_n / kappa_n = sum_{j=1}^{n-1} r_{j+1}(rbar_{j-1} + rbar_j l_{j-1}/kappa_{j-1})
  Complex lk, lbk, mk;
  std::vector<Complex> lks(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0) {
      lk += tab.r[n] * tab.rbar[n - 1];
      lbk += tab.rbar[n] * tab.r[n - 1];
    }
    lks[n] = lk;
    if (n >= 2) mk += tab.r[n] * (tab.rbar[n - 2] + tab.rbar[n - 1] * lks[n - 2]);
    tab.l[n] = lk * tab.kappa[n];
    tab.lbar[n] = lbk * tab.kappa[n];
    tab.m[n] = mk * tab.kappa[n];
  }
  return tab;
}

CoefficientTable build_table_oracle(const WeightParams& p, int n_max, const PrecisionContext& ctx) {
  return escalate_table(ctx, [&] { return build_table_kernel(moment_source(p), n_max); });
}

CoefficientTable build_table_oracle(const ModelKind& m, int n_max, const PrecisionContext& ctx) {
  m.validate();
  return escalate_table(ctx, [&] { return build_table_kernel(moment_source(m), n_max); });
}

// ---------------------------------------------------------------- Caratheodory / OPUC

Complex caratheodory(const WeightParams& p, const Complex& z, const PrecisionContext& ctx) {
  Real az = abs(z);
  if (mp::abs(az - 1) < Real(1e-3))
    throw Error(ErrorCode::SlowConvergence, "Caratheodory series with |z| near 1");
  if (z.is_zero()) return Complex(1);
  bool inside = az < 1;
  return escalate(ctx, [&] {
    auto w = moment_source(p);
    Complex zz = inside ? rounded(z) : Complex(1) / rounded(z);
    Real q = abs(zz);
    Real tail_tol = Real(ctx.tol) / 64;
    Complex sum;
    Complex zp(1);
    Real wmax(0);
    for (int k = 1; k < 100000; ++k) {
      zp *= zz;
      Complex wk = w(inside ? k : -k);
      wmax = std::max(wmax, abs(wk));
      sum += wk * zp;
      if (k >= 4 && wmax * abs(zp) * q / (1 - q) < tail_tol) break;
    }
    return inside ? Complex(1) + Complex(2) * sum : Complex(-1) - Complex(2) * sum;
  });
}

Complex caratheodory_quadrature(const WeightParams& p, const Complex& z) {
  Real tol = pow2(-(current_bits() - 24));
  return weight_circle_integral(
      p, [&z](const Complex& s) { return (s + z) / (s - z); }, tol);
}

OpucEval opuc_eval_kernel(const CoefficientTable& tab, int n, const Complex& z, const Complex& F) {
  if (n + 1 > tab.n_max) throw Error(ErrorCode::InvalidArgument, "table too short for opuc_eval");
  OpucEval e;
  e.z = z;
  e.phi.resize(n + 1);
  e.phistar.resize(n + 1);
  e.eps.resize(n + 1);
  e.epsstar.resize(n + 1);
  Complex k0 = tab.kappa[0];
  e.phi[0] = k0;
  e.phistar[0] = k0;
  e.eps[0] = Complex(1) / k0 + k0 * F;
  e.epsstar[0] = Complex(1) / k0 - k0 * F;
  for (int j = 0; j < n; ++j) {
    Complex c = tab.kappa[j + 1] / tab.kappa[j];
    const Complex& r = tab.r[j + 1];
    const Complex& rb = tab.rbar[j + 1];
    e.phi[j + 1] = c * (z * e.phi[j] + r * e.phistar[j]);
    e.phistar[j + 1] = c * (e.phistar[j] + rb * z * e.phi[j]);
    e.eps[j + 1] = c * (z * e.eps[j] - r * e.epsstar[j]);
    e.epsstar[j + 1] = c * (e.epsstar[j] - rb * z * e.eps[j]);
  }
  return e;
}

OpucEval opuc_eval(const WeightParams& p, const CoefficientTable& tab, const Complex& z,
                   const PrecisionContext& ctx) {
  WorkingPrecision wp(ctx.bits + 32);
  Complex F = caratheodory_quadrature(p, z);
  OpucEval e = opuc_eval_kernel(tab, tab.n_max - 1, z, F);
  WorkingPrecision back(ctx.bits);
  for (auto* v : {&e.phi, &e.phistar, &e.eps, &e.epsstar})
    for (auto& x : *v) x = rounded(x);
  return e;
}

// ---------------------------------------------------------------- coefficient functions

Complex spectral_W(const WeightParams& p, const Complex& z) {
  return z * (Complex(1) + z) * (Complex(1) + p.t * z) / p.t;
}

Complex spectral_V(const WeightParams& p, const Complex& z) {
  Complex it = Complex(1) / p.t;
  Complex w1 = p.omega1();
  return ((-p.mu - p.omega) * (z + Complex(1)) * (z + it) + Complex(2) * w1 * z * (z + it) +
          Complex(2) * p.mu * z * (z + Complex(1))) /
         Complex(2);
}

CoefficientFunctions coefficient_functions(const WeightParams& p, const CoefficientTable& tab, int n,
                                           const Complex& z) {
  if (n + 2 > tab.n_max) throw Error(ErrorCode::InvalidArgument, "table too short for coefficient functions");
  const auto& r = tab.r;
  const auto& rb = tab.rbar;
  Complex N(n);
  Complex mu = p.mu, om = p.omega, omb = p.omegabar, t = p.t, w1 = p.omega1();
  Complex one(1), two(2);
  Complex kr = tab.kappa[n] / tab.kappa[n + 1];
  CoefficientFunctions c;
  c.Theta = kr * ((N + one + mu + omb) * z - r[n] / r[n + 1] * (N + mu + om) / t);
  c.ThetaStar = kr * (-rb[n] / rb[n + 1] * (N + mu + omb) * z + (N + one + mu + om) / t);
  Complex v1 = one - r[n + 1] * rb[n + 1];
  Complex lk1 = tab.lk(n + 1);
  Complex h = one + (mu + omb) / two;
  c.Omega = h * z * z +
            ((N + two + mu + omb) * v1 * r[n + 2] / r[n + 1] - lk1 + h * (one + t) / t - w1 - mu / t) * z -
            (N + (mu + om) / two) / t;
  Complex hs = (mu + omb) / two;
  c.OmegaStar = -hs * z * z +
                (lk1 - (N + mu + omb) * v1 * rb[n] / rb[n + 1] - hs * (one + t) / t + w1 + mu / t) * z +
                (N + one + (mu + om) / two) / t;
  return c;
}

// ---------------------------------------------------------------- identity suite

Real IdentityReport::max_residual() const {
  Real m(0);
  for (const auto& c : checks) m = std::max(m, c.max_residual);
  return m;
}

const IdentityCheck* IdentityReport::find(const std::string& label) const {
  for (const auto& c : checks)
    if (c.label == label) return &c;
  return nullptr;
}

std::vector<Complex> identity_sample_points(int count, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> ang(-3.0, 3.0);
  const char* radii[] = {"0.3", "0.7", "1.4"};
  std::vector<Complex> out;
  for (int i = 0; i < count; ++i) {
    // Angles are rounded to 1/1024 so the points are exact binary fractions.
    double a = std::round(ang(gen) * 1024) / 1024;
    out.push_back(polar(Real(radii[i % 3]), Real(a)));
  }
  return out;
}

namespace {

class Recorder {
 public:
  void add(const std::string& label, const Complex& lhs, const Complex& rhs) {
    Real scale = std::max(Real(1), std::max(abs(lhs), abs(rhs)));
    Real res = abs(lhs - rhs) / scale;
    auto& c = get(label);
    c.count++;
    if (res > c.max_residual) c.max_residual = res;
  }
  void degenerate(const std::string& label) {
    auto& c = get(label);
    c.degenerate = true;
  }
  IdentityReport report() const {
    IdentityReport r;
    for (const auto& l : order_) r.checks.push_back(map_.at(l));
    return r;
  }

 private:
  IdentityCheck& get(const std::string& label) {
    auto it = map_.find(label);
    if (it == map_.end()) {
      IdentityCheck c;
      c.label = label;
      c.max_residual = 0;
      order_.push_back(label);
      it = map_.emplace(label, c).first;
    }
    return it->second;
  }
  std::map<std::string, IdentityCheck> map_;
  std::vector<std::string> order_;
};

const char* kLetters = "abcdefghijk";

std::string lab(const char* base, int i) { return std::string(base) + ":" + kLetters[i]; }

}  // namespace

IdentityReport verify_identity_suite(const WeightParams& p0, int n_max, const std::vector<Complex>& samples,
                                     const PrecisionContext& ctx, const SuiteOptions& opt) {
  ctx.validate();
  if (n_max < 1) throw Error(ErrorCode::InvalidArgument, "identity suite needs n_max >= 1");
  WorkingPrecision wp(ctx.bits + 32);
  WeightParams p = p0.rounded_copy();
  Recorder rec;
  CoefficientTable tab = build_table_kernel(moment_source(p), n_max + 4);
  const auto& r = tab.r;
  const auto& rb = tab.rbar;
  const auto& kap = tab.kappa;
  Complex mu = p.mu, om = p.omega, omb = p.omegabar, t = p.t, w1 = p.omega1();
  Complex one(1), two(2);

  Real small = pow2(-(ctx.bits / 2));
  bool degenerate = false;
  for (int n = 1; n <= n_max + 3; ++n)
    if (abs(r[n]) < small || abs(rb[n]) < small) degenerate = true;

  auto ph0 = [&](int n) { return kap[n] * r[n]; };
  auto phb0 = [&](int n) { return kap[n] * rb[n]; };
  auto W = [&](const Complex& z) { return spectral_W(p, z); };
  auto V = [&](const Complex& z) { return spectral_V(p, z); };
  auto CF = [&](int n, const Complex& z) { return coefficient_functions(p, tab, n, z); };
  auto kk = [&](int a, int b) { return kap[a] / kap[b]; };

  Real h = pow2(opt.derivative_step_log2);

  // Szego-theory identities that need only the table.
  for (int n = 1; n <= n_max; ++n) {
    Complex N(n);
    rec.add("tau-ratio", tab.I0[n + 1] * tab.I0[n - 1] / (tab.I0[n] * tab.I0[n]), one - r[n] * rb[n]);
    rec.add("kappa-relation", kap[n] * kap[n] - kap[n - 1] * kap[n - 1] - kap[n] * kap[n] * r[n] * rb[n],
            Complex());
    rec.add("second-order-rr",
            (N + one + mu + omb) * t * r[n + 1] * rb[n] - (N - one + mu + omb) * t * r[n] * rb[n - 1],
            (N + one + mu + om) * rb[n + 1] * r[n] - (N - one + mu + om) * rb[n] * r[n - 1]);
    rec.add("l-linear", (N + mu + omb) * t * tab.l[n] - (N + mu + om) * tab.lbar[n],
            N * (mu * (t - one) + omb - om * t) * kap[n]);
  }

  if (degenerate) {
    for (const char* b : {"magnus", "l-solution"})
      for (int i = 0; i < 2; ++i) rec.degenerate(lab(b, i));
    for (int i = 0; i < 11; ++i) rec.degenerate(lab("coef-linear", i));
    for (int i = 0; i < 4; ++i) rec.degenerate(lab("spectral-deriv", i));
    for (int i = 0; i < 6; ++i) rec.degenerate(lab("bilinear", i));
    for (int i = 0; i < 6; ++i) rec.degenerate(lab("bilinear-special", i));
    rec.degenerate("t-derivative:r");
    rec.degenerate("t-derivative:rbar");
  } else {
    for (int n = 1; n <= n_max; ++n) {
      Complex N(n);
      Complex v = one - r[n] * rb[n];
      Complex L = tab.lbk(n) + t * tab.lk(n) - N * (t + one);
      rec.add(lab("magnus", 0), L, v / r[n] * ((N + one + mu + omb) * t * r[n + 1] + (N - one + mu + om) * r[n - 1]));
      rec.add(lab("magnus", 1), L, v / rb[n] * ((N + one + mu + om) * rb[n + 1] + (N - one + mu + omb) * t * rb[n - 1]));
      Complex tail = (N + mu - om) * t + N - mu + omb;
      rec.add(lab("l-solution", 0), two * t * tab.lk(n),
              (N + one + mu + omb) * t * (r[n + 1] / r[n] - r[n + 1] * rb[n]) + (N - one + mu + om) * r[n - 1] / r[n] -
                  (N - one + mu + omb) * t * r[n] * rb[n - 1] + tail);
      rec.add(lab("l-solution", 1), two * t * tab.lk(n),
              (N + one + mu + om) * rb[n + 1] / rb[n] + (N - one + mu + omb) * t * (rb[n - 1] / rb[n] - r[n] * rb[n - 1]) -
                  (N + one + mu + omb) * t * r[n + 1] * rb[n] + tail);
    }

    // Bilinear identities at the singular points -1 and -1/t.
    for (int n = 1; n <= n_max; ++n) {
      for (const Complex& zj : {Complex(-1), -one / t}) {
        auto c0 = CF(n, zj), cm = CF(n - 1, zj), cp = CF(n + 1, zj);
        Complex V2 = V(zj) * V(zj);
        rec.add(lab("bilinear", 0), c0.Omega * c0.Omega,
                kap[n] * ph0(n + 2) / (kap[n + 1] * ph0(n + 1)) * zj * c0.Theta * cp.Theta + V2);
        rec.add(lab("bilinear", 1), c0.OmegaStar * c0.OmegaStar,
                kap[n] * phb0(n + 2) / (kap[n + 1] * phb0(n + 1)) * zj * c0.ThetaStar * cp.ThetaStar + V2);
        Complex q = cm.Omega - kk(n - 1, n) * kk(n - 1, n) * ph0(n + 1) / ph0(n) * c0.Theta;
        rec.add(lab("bilinear", 2), q * q,
                kap[n - 1] * ph0(n + 1) * phb0(n) / (kap[n] * kap[n] * kap[n]) * c0.Theta * cm.ThetaStar + V2);
        Complex qs = cm.OmegaStar - kk(n - 1, n) * kk(n - 1, n) * phb0(n + 1) / phb0(n) * zj * c0.ThetaStar;
        rec.add(lab("bilinear", 3), qs * qs,
                kap[n - 1] * phb0(n + 1) * ph0(n) / (kap[n] * kap[n] * kap[n]) * zj * zj * c0.ThetaStar * cm.Theta + V2);
        Complex L = zj * ph0(n + 1) * phb0(n + 1) / (kap[n] * kap[n]) * c0.Theta * c0.ThetaStar + V2;
        Complex e = c0.Omega - kk(n + 1, n) * zj * c0.Theta;
        Complex f = c0.OmegaStar - kk(n + 1, n) * c0.ThetaStar;
        rec.add(lab("bilinear", 4), L, e * e);
        rec.add(lab("bilinear", 5), L, f * f);
      }
    }

    // The same identities written out in reflection coefficients.
    for (int n = 1; n <= n_max; ++n) {
      Complex N(n);
      Complex k2 = kk(n - 1, n) * kk(n - 1, n);
      Complex lk = tab.lk(n);
      Complex it = one / t;
      Complex tm = (t - one) / t;
      Complex A = N + one + mu + omb, B = N + mu + om, C = N + mu + omb, D = N - one + mu + om;
      {
        Complex x = lk - N * it - A * k2 * r[n + 1] / r[n] + w1 * (one - it);
        rec.add(lab("bilinear-special", 0),
                x * x + k2 * (C + D * it * r[n - 1] / r[n]) * (B * it + A * r[n + 1] / r[n]), w1 * w1 * tm * tm);
      }
      {
        Complex x = lk - N - A * k2 * r[n + 1] / r[n] + mu * (it - one);
        rec.add(lab("bilinear-special", 1),
                x * x + k2 * it * (C + D * r[n - 1] / r[n]) * (B + A * r[n + 1] / r[n]), mu * mu * tm * tm);
      }
      Complex E = N - one + mu + omb;
      {
        Complex x = lk - N * it + B * it * k2 + w1 * (one - it);
        rec.add(lab("bilinear-special", 2),
                x * x + k2 * (A * r[n + 1] + B * it * r[n]) * (E * rb[n - 1] + B * it * rb[n]), w1 * w1 * tm * tm);
      }
      {
        Complex x = lk - N + B * k2 + mu * (it - one);
        rec.add(lab("bilinear-special", 3), x * x + k2 * (A * r[n + 1] + B * r[n]) * (E * rb[n - 1] + B * rb[n]),
                mu * mu * tm * tm);
      }
      Complex lbk1 = tab.lbk(n + 1);
      Complex Ab = N + one + mu + om;
      Complex w2i = (om - omb) / two;  // i omega2
      {
        Complex x = lbk1 + B * rb[n + 1] * r[n] + w1 + (mu - w2i) * t;
        rec.add(lab("bilinear-special", 4), x * x,
                (A * t * r[n + 1] + B * r[n]) * (Ab * rb[n + 1] + C * t * rb[n]) + w1 * w1 * (t - one) * (t - one));
      }
      {
        Complex x = lbk1 + B * rb[n + 1] * r[n] + omb + mu * t;
        rec.add(lab("bilinear-special", 5), x * x,
                t * (A * r[n + 1] + B * r[n]) * (Ab * rb[n + 1] + C * rb[n]) + mu * mu * (t - one) * (t - one));
      }
    }
  }

  // Identities at the sample points.
  std::vector<OpucEval> evals;
  for (const Complex& z0 : samples) {
    Complex z = rounded(z0);
    Complex F = caratheodory_quadrature(p, z);
    evals.push_back(opuc_eval_kernel(tab, n_max + 2, z, F));
  }
  for (size_t s = 0; s < samples.size(); ++s) {
    const OpucEval& e = evals[s];
    const Complex& z = e.z;
    for (int n = 0; n <= n_max; ++n) {
      Complex zn = pow(z, long(n));
      rec.add(lab("casoratian", 0), e.phi[n + 1] * e.eps[n] - e.eps[n + 1] * e.phi[n],
              two * kk(n + 1, n) * r[n + 1] * zn);
      rec.add(lab("casoratian", 1), e.phistar[n + 1] * e.epsstar[n] - e.epsstar[n + 1] * e.phistar[n],
              two * kk(n + 1, n) * rb[n + 1] * zn * z);
      rec.add(lab("casoratian", 2), e.phi[n] * e.epsstar[n] + e.eps[n] * e.phistar[n], two * zn);
    }
    // Christoffel-Darboux with conj(phi_j(zeta)) continued off the circle as zeta^{-j} phi*_j(zeta).
    const OpucEval& g = evals[(s + 1) % samples.size()];
    const Complex& zeta = g.z;
    Complex sum;
    for (int n = 0; n <= n_max; ++n) {
      Complex zmn = pow(zeta, long(-n));
      sum += e.phi[n] * zmn * g.phistar[n];
      Complex rhs = (e.phistar[n] * zmn * g.phi[n] - z / zeta * e.phi[n] * zmn * g.phistar[n]) / (one - z / zeta);
      rec.add("christoffel-darboux", sum, rhs);
    }
    if (degenerate) continue;
    Complex Wz = W(z);
    for (int n = 1; n <= n_max; ++n) {
      auto c0 = CF(n, z), cm = CF(n - 1, z), cp = CF(n + 1, z);
      Complex N(n);
      Complex Wzz = Wz / z;
      Complex a1 = ph0(n + 1) / ph0(n) + kk(n + 1, n) * z;
      Complex b1 = kk(n + 1, n) + phb0(n + 1) / phb0(n) * z;
      rec.add(lab("coef-linear", 0), c0.Omega + cm.Omega - a1 * c0.Theta + (N - one) * Wzz, Complex());
      rec.add(lab("coef-linear", 1),
              a1 * (cm.Omega - c0.Omega) + kap[n] * ph0(n + 2) / (kap[n + 1] * ph0(n + 1)) * z * cp.Theta -
                  kap[n - 1] * ph0(n + 1) / (kap[n] * ph0(n)) * z * cm.Theta - ph0(n + 1) / ph0(n) * Wzz,
              Complex());
      rec.add(lab("coef-linear", 2), c0.OmegaStar + cm.OmegaStar - b1 * c0.ThetaStar - N * Wzz, Complex());
      rec.add(lab("coef-linear", 3),
              b1 * (cm.OmegaStar - c0.OmegaStar) + kap[n] * phb0(n + 2) / (kap[n + 1] * phb0(n + 1)) * z * cp.ThetaStar -
                  kap[n - 1] * phb0(n + 1) / (kap[n] * phb0(n)) * z * cm.ThetaStar + kk(n + 1, n) * Wzz,
              Complex());
      rec.add(lab("coef-linear", 4),
              cp.Omega + c0.OmegaStar - (ph0(n + 2) / ph0(n + 1) + kk(n + 2, n + 1) * z) * cp.Theta +
                  kk(n + 1, n) * (z * c0.Theta - c0.ThetaStar),
              Complex());
      rec.add(lab("coef-linear", 5),
              c0.Omega - cp.Omega + kk(n + 2, n + 1) * (z + phb0(n + 1) / kap[n + 1] * ph0(n + 2) / kap[n + 2]) * cp.Theta +
                  ph0(n + 1) * phb0(n + 1) / (kap[n + 1] * kap[n]) * c0.ThetaStar - kk(n + 1, n) * z * c0.Theta - Wzz,
              Complex());
      rec.add(lab("coef-linear", 6),
              cp.OmegaStar + c0.Omega - (kk(n + 2, n + 1) + phb0(n + 2) / phb0(n + 1) * z) * cp.ThetaStar -
                  kk(n + 1, n) * (z * c0.Theta - c0.ThetaStar) - Wzz,
              Complex());
      rec.add(lab("coef-linear", 7),
              c0.OmegaStar - cp.OmegaStar +
                  kk(n + 2, n + 1) * (one + ph0(n + 1) / kap[n + 1] * phb0(n + 2) / kap[n + 2] * z) * cp.ThetaStar +
                  ph0(n + 1) * phb0(n + 1) / (kap[n + 1] * kap[n]) * z * c0.Theta - kk(n + 1, n) * c0.ThetaStar,
              Complex());
      rec.add(lab("coef-linear", 8),
              ph0(n + 1) / ph0(n) * c0.Theta - kk(n, n - 1) * z * cm.Theta,
              phb0(n + 1) / phb0(n) * z * c0.ThetaStar - kk(n, n - 1) * cm.ThetaStar);
      rec.add(lab("coef-linear", 9), c0.OmegaStar - c0.Omega + kk(n + 1, n) * (z * c0.Theta - c0.ThetaStar), N * Wzz);
      rec.add(lab("coef-linear", 10), c0.OmegaStar + c0.Omega,
              (one - ph0(n + 1) * phb0(n + 1) / (kap[n + 1] * kap[n + 1])) *
                      (ph0(n + 2) / ph0(n + 1) * cp.Theta + kk(n + 1, n) * c0.ThetaStar) +
                  Wzz);
    }
    if (opt.include_zd) {
      Complex zp = z + Complex(h), zm = z - Complex(h);
      OpucEval ep = opuc_eval_kernel(tab, n_max + 2, zp, caratheodory_quadrature(p, zp));
      OpucEval em = opuc_eval_kernel(tab, n_max + 2, zm, caratheodory_quadrature(p, zm));
      Complex Vz = V(z);
      Complex inv2h = Complex(1 / (2 * h));
      for (int n = 0; n <= n_max; ++n) {
        auto c0 = CF(n, z);
        Complex dphi = (ep.phi[n] - em.phi[n]) * inv2h;
        Complex dphis = (ep.phistar[n] - em.phistar[n]) * inv2h;
        Complex deps = (ep.eps[n] - em.eps[n]) * inv2h;
        Complex depss = (ep.epsstar[n] - em.epsstar[n]) * inv2h;
        rec.add(lab("spectral-deriv", 0), Wz * dphi, c0.Theta * e.phi[n + 1] - (c0.Omega + Vz) * e.phi[n]);
        rec.add(lab("spectral-deriv", 1), Wz * deps, c0.Theta * e.eps[n + 1] - (c0.Omega - Vz) * e.eps[n]);
        rec.add(lab("spectral-deriv", 2), Wz * dphis,
                -c0.ThetaStar * e.phistar[n + 1] + (c0.OmegaStar - Vz) * e.phistar[n]);
        rec.add(lab("spectral-deriv", 3), Wz * depss,
                -c0.ThetaStar * e.epsstar[n + 1] + (c0.OmegaStar + Vz) * e.epsstar[n]);
      }
    }
  }

  if (!degenerate && opt.include_rdot) {
    WeightParams pp = p, pm = p;
    pp.t = t + Complex(h);
    pm.t = t - Complex(h);
    CoefficientTable tp = build_table_kernel(moment_source(pp), n_max);
    CoefficientTable tm = build_table_kernel(moment_source(pm), n_max);
    Complex z3 = -one / t;
    Complex V3 = V(z3);
    Complex inv2h = Complex(1 / (2 * h));
    for (int n = 1; n <= n_max; ++n) {
      auto c = CF(n - 1, z3);
      Complex fd = (tp.r[n] - tm.r[n]) * inv2h / r[n];
      Complex fdb = (tp.rbar[n] - tm.rbar[n]) * inv2h / rb[n];
      rec.add("t-derivative:r", fd, -(mu / t) * (c.Omega - V3) / V3);
      rec.add("t-derivative:rbar", fdb, -(mu / t) * (c.OmegaStar + V3) / V3);
    }
  }

  IdentityReport rep = rec.report();
  WorkingPrecision back(ctx.bits);
  for (auto& c : rep.checks) c.max_residual = rounded(c.max_residual);
  return rep;
}

}  // namespace pvi
