#include "support.hpp"

#include "pvi/oracle.hpp"

using namespace pvi;
using namespace pvi::test;

namespace {

WeightParams generic() {
  return WeightParams::from_omegas(C("0.3"), C("0.2"), C("0.1"), C("0.4"), expi(pi_real() / 3));
}

// Gap moments written out independently of the library: w_0 = 1 - xi phi / 2 pi and
// w_n = xi (-1)^{n+1} (e^{i n phi} - 1) / (2 pi i n).
Complex gap_moment(const Real& phi, const Complex& xi, int n) {
  if (n == 0) return Complex(1) - xi * Complex(phi / (2 * pi_real()));
  Complex s((n % 2 == 0) ? -1 : 1);
  return xi * s * (expi(phi * n) - Complex(1)) / Complex(Real(0), 2 * pi_real() * n);
}

// Plain Laplace expansion, kept separate from the library version.
Complex laplace_det(const std::vector<std::vector<Complex>>& a) {
  size_t n = a.size();
  if (n == 0) return Complex(1);
  if (n == 1) return a[0][0];
  Complex d;
  for (size_t c = 0; c < n; ++c) {
    std::vector<std::vector<Complex>> minor;
    for (size_t r = 1; r < n; ++r) {
      std::vector<Complex> row;
      for (size_t k = 0; k < n; ++k)
        if (k != c) row.push_back(a[r][k]);
      minor.push_back(row);
    }
    Complex term = a[0][c] * laplace_det(minor);
    d += (c % 2 == 0) ? term : -term;
  }
  return d;
}

}  // namespace

TEST_CASE("gap determinants match an independent cofactor expansion") {
  auto ctx = make_ctx();
  WorkingPrecision wp(ctx.bits);
  Real phi = pi_real() / 2;
  Complex xi(1);
  CoefficientTable tab = build_table_oracle(ModelKind::cue_gap(phi, xi), 6, ctx);
  // mpmath, 50 digits
  const char* frozen[] = {"0.75",
                          "0.5118394081788311142780602683951361805478",
                          "0.3107606231187085946791519768965984942306",
                          "0.1653623914813353812686581928700239374983",
                          "0.07640380533890075037760461778094862918461",
                          "0.03047806952104854247404617918921602770184"};
  for (int n = 1; n <= 6; ++n) {
    std::vector<std::vector<Complex>> a(n, std::vector<Complex>(n));
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) a[j][k] = gap_moment(phi, xi, j - k);
    Complex direct = laplace_det(a);
    CHECK(rel(tab.I0[n], direct) < 1e-70);
    CHECK(rel(tab.I0[n], C(frozen[n - 1])) < 1e-38);
  }
}

TEST_CASE("Ising and char-poly determinants against frozen values") {
  auto ctx = make_ctx();
  WorkingPrecision wp(ctx.bits);
  CoefficientTable ising = build_table_oracle(ModelKind::ising_low(R("1.25")), 4, ctx);
  const char* ising_frozen[] = {"0.8125496102822012108130455173376939070654",
                                "0.7869468995279294836091284568526790808613",
                                "0.7795349649366423777678374692329994263843",
                                "0.7767893605434831043647681259866587656027"};
  for (int n = 1; n <= 4; ++n) CHECK(rel(ising.T[n], C(ising_frozen[n - 1])) < 1e-38);

  // from quadrature of |0.7 + z|^3
  CoefficientTable cp = build_table_oracle(ModelKind::cue_charpoly(C("0.7"), C("1.5")), 4, ctx);
  const char* cp_frozen[] = {"2.136759994027200200612977671677338625482",
                             "3.030957575313623417920839266591576522475",
                             "3.638919605199831238621347019161606427441",
                             "4.021233162111571474932555461424268233274"};
  for (int n = 1; n <= 4; ++n) CHECK(rel(cp.T[n], C(cp_frozen[n - 1])) < 1e-38);
}

TEST_CASE("generic reflection coefficients against frozen quadrature values") {
  auto ctx = make_ctx();
  WorkingPrecision wp(ctx.bits);
  CoefficientTable tab = build_table_oracle(generic(), 3, ctx);
  struct Row {
    const char *r_re, *r_im, *rb_re, *rb_im, *T_re, *T_im;
  };
  Row rows[] = {
      {"-0.433357703596558717532833444484849978117", "0.1112835725896965733398807323047829324035",
       "-0.3742037384084970304098115952574170561655", "-0.2315748881248649162634348167503671805744",
       "1.062892688652643412551605512361653627668", "-0.05073553352442606274411606058111965083851"},
      {"0.3281678317193743521962361642579542845148", "-0.1810329021347178212911728738710262045545",
       "0.08362255001088245068955832123595709911445", "0.3688892869954251609329765123849079421528",
       "0.9090009284586659771307983918518215129224", "-0.1537618296704995463844467286359811601751"},
      {"-0.3036045533136038283107956620874032020305", "0.2157347162621613737684594318020659493214",
       "0.253847849930272408906335609293462287891", "-0.3033245365944401138230510745204099405633",
       "0.6698005159171046237362730480616964564482", "-0.2862306259234377651888719250363307551635"},
  };
  for (int n = 1; n <= 3; ++n) {
    const Row& w = rows[n - 1];
    CHECK(rel(tab.r[n], C(w.r_re, w.r_im)) < 1e-37);
    CHECK(rel(tab.rbar[n], C(w.rb_re, w.rb_im)) < 1e-37);
    CHECK(rel(tab.T[n], C(w.T_re, w.T_im)) < 1e-37);
  }
  auto [r2, rb2] = reflection_from_dets(generic(), 2, ctx);
  CHECK(rel(r2, tab.r[2]) < 1e-60);
  CHECK(rel(rb2, tab.rbar[2]) < 1e-60);
}

TEST_CASE("LU and cofactor determinants agree") {
  auto ctx = make_ctx(128, 1e-25);
  WorkingPrecision wp(ctx.bits);
  for (int eps : {-1, 0, 1})
    CHECK(rel(toeplitz_det(generic(), eps, 5, ctx), toeplitz_det_cofactor(generic(), eps, 5, ctx)) < 1e-30);
  CHECK_THROWS_AS(toeplitz_det_cofactor(generic(), 0, 9, ctx), Error);
}

TEST_CASE("t = 0 and t = 1 reflection coefficients in closed form") {
  WorkingPrecision wp(160);
  Complex mu = C("0.3"), w1 = C("0.2"), w2 = C("0.1");
  WeightParams p0 = WeightParams::from_omegas(mu, w1, w2, C("0"), C("0"));
  Complex om = p0.omega, omb = p0.omegabar, one(1);
  // at t = 0 only the rescaled moments t^mu w_n are finite; the common factor cancels in r and l/kappa
  CoefficientTable tab = build_table_kernel([&](int n) { return scaled_moment_kernel(p0, n); }, 5);
  for (int n = 1; n <= 5; ++n) {
    Complex N(n), sgn(n % 2 ? -1 : 1);
    CHECK(rel(tab.r[n], sgn * pochhammer(mu + om, n) / pochhammer(one - mu + omb, n)) < 1e-40);
    CHECK(rel(tab.rbar[n], sgn * pochhammer(-mu + omb, n) / pochhammer(one + mu + om, n)) < 1e-40);
    CHECK(rel(tab.lk(n), -(mu + om) * N / (N - mu + omb)) < 1e-40);
  }
  auto ctx = make_ctx(128, 1e-25);
  WeightParams p1 = WeightParams::from_omegas(mu, w1, w2, C("0.4"), C("1"));
  CoefficientTable t1 = build_table_oracle(p1, 5, ctx);
  for (int n = 1; n <= 5; ++n) {
    Complex N(n), sgn(n % 2 ? -1 : 1);
    CHECK(rel(t1.r[n], sgn * pochhammer(mu + om, n) / pochhammer(one + mu + omb, n)) < 1e-30);
    CHECK(rel(t1.rbar[n], sgn * pochhammer(mu + omb, n) / pochhammer(one + mu + om, n)) < 1e-30);
    CHECK(rel(t1.lk(n), -(mu + om) * N / (N + mu + omb)) < 1e-30);
  }
}

TEST_CASE("Ising critical point closed forms") {
  auto ctx = make_ctx();
  WorkingPrecision wp(ctx.bits);
  CoefficientTable tab = build_table_oracle(ModelKind::ising_low(R("1")), 6, ctx);
  Real T(1), half(0.5);
  for (int n = 1; n <= 6; ++n) {
    Real g = boost::multiprecision::tgamma(Real(n));
    T *= g * g / (boost::multiprecision::tgamma(n + half) * boost::multiprecision::tgamma(n - half));
    CHECK(rel(tab.T[n], Complex(T)) < 1e-60);
    Real sign(n % 2 ? 1 : -1);
    CHECK(rel(tab.r[n], Complex(sign / ((2 * n + 1) * (2 * n - 1)))) < 1e-60);
    CHECK(rel(tab.rbar[n], Complex(-sign)) < 1e-60);
    CHECK(rel(tab.lk(n), Complex(Real(n) / (2 * n + 1))) < 1e-60);
  }
}

TEST_CASE("flat weight table") {
  auto ctx = make_ctx(128, 1e-25);
  WorkingPrecision wp(ctx.bits);
  WeightParams p = WeightParams::from_omegas(C("0"), C("0"), C("0"), C("0"), expi(R("0.9")));
  CoefficientTable tab = build_table_oracle(p, 4, ctx);
  for (int n = 1; n <= 4; ++n) {
    CHECK(tab.r[n].is_zero());
    CHECK(tab.rbar[n].is_zero());
    CHECK(rel(tab.T[n], Complex(1)) < 1e-35);
    CHECK(rel(tab.kappa[n], Complex(1)) < 1e-35);
  }
}

TEST_CASE("table relations: I0, kappa and the reflection product") {
  auto ctx = make_ctx(128, 1e-25);
  WorkingPrecision wp(ctx.bits);
  CoefficientTable tab = build_table_oracle(generic(), 5, ctx);
  for (int n = 1; n <= 4; ++n) {
    // I_{n+1} I_{n-1} / I_n^2 = 1 - r_n rbar_n
    CHECK(rel(tab.I0[n + 1] * tab.I0[n - 1] / (tab.I0[n] * tab.I0[n]), Complex(1) - tab.r[n] * tab.rbar[n]) <
          1e-30);
    CHECK(rel(tab.kappa[n] * tab.kappa[n], tab.I0[n] / tab.I0[n + 1]) < 1e-30);
  }
}

TEST_CASE("Caratheodory function: series against quadrature") {
  auto ctx = make_ctx(128, 1e-25);
  WorkingPrecision wp(ctx.bits);
  // the series is normalised to w_0 = 1; the integral carries w_0 itself
  Complex w0 = toeplitz_moment(generic(), 0, ctx);
  for (const Complex& z : {C("0.4", "0.2"), C("-0.3"), C("1.6", "-0.5")}) {
    Complex series = caratheodory(generic(), z, ctx);
    Complex quad = caratheodory_quadrature(generic(), z);
    Complex shift = abs(z) < 1 ? w0 - Complex(1) : Complex(1) - w0;
    CHECK(rel(series + shift, quad) < 1e-25);
  }
  CHECK(caratheodory(generic(), C("0"), ctx) == Complex(1));
  CHECK_THROWS_AS(caratheodory(generic(), C("0.9999"), ctx), Error);
}

TEST_CASE("OPUC are biorthogonal to lower powers") {
  auto ctx = make_ctx(128, 1e-25);
  WorkingPrecision wp(ctx.bits);
  WeightParams p = generic();
  CoefficientTable tab = build_table_oracle(p, 5, ctx);
  Complex z0 = C("0.5", "0.3");
  OpucEval e = opuc_eval(p, tab, z0, ctx);
  // phi_3 by its own recurrence at generic points; orthogonal to z^k, k < 3
  auto phi3 = [&](const Complex& z) { return opuc_eval_kernel(tab, 3, z, Complex()).phi[3]; };
  Real qtol = pow2(-100);
  for (int k = 0; k < 3; ++k) {
    Complex ip = weight_circle_integral(p, [&](const Complex& s) { return phi3(s) * pow(s, long(-k)); }, qtol);
    CHECK(to_double(abs(ip)) < 1e-25);
  }
  Complex norm3 = weight_circle_integral(p, [&](const Complex& s) { return phi3(s) * pow(s, long(-3)); }, qtol);
  CHECK(rel(norm3, Complex(1) / tab.kappa[3]) < 1e-25);
  CHECK(rel(e.phi[3], phi3(z0)) < 1e-30);
}

TEST_CASE("spectral data: W w' = 2 V w") {
  auto ctx = make_ctx(128, 1e-25);
  WorkingPrecision wp(ctx.bits);
  WeightParams p = generic();
  Complex h(pow2(-40));
  for (double th : {-2.0, 0.3, 1.5}) {
    Complex z = expi(Real(th));
    // the derivative along the circle is i z d/dz
    Complex dz = I() * z * h;
    Complex dw = (weight_eval(p, expi(Real(th) + pow2(-40))) - weight_eval(p, expi(Real(th) - pow2(-40)))) /
                 (Complex(2) * dz);
    Complex w = weight_eval(p, z);
    CHECK(rel(spectral_W(p, z) * dw, Complex(2) * spectral_V(p, z) * w) < 1e-20);
  }
}

TEST_CASE("coefficient functions require a long enough table") {
  auto ctx = make_ctx(128, 1e-25);
  WorkingPrecision wp(ctx.bits);
  CoefficientTable tab = build_table_oracle(generic(), 3, ctx);
  CHECK_NOTHROW(coefficient_functions(generic(), tab, 1, C("0.4")));
  CHECK_THROWS_AS(coefficient_functions(generic(), tab, 2, C("0.4")), Error);
}

TEST_CASE("identity suite") {
  auto ctx = make_ctx(128, 1e-25);
  WorkingPrecision wp(ctx.bits);
  auto pts = identity_sample_points(4, 7);
  CHECK(pts.size() == 4);
  IdentityReport rep = verify_identity_suite(generic(), 3, pts, ctx);
  CHECK(to_double(rep.max_residual()) < 1e3 * ctx.tol);
  for (const char* label : {"tau-ratio", "kappa-relation", "second-order-rr", "l-linear", "magnus:a",
                            "l-solution:a", "bilinear:f", "bilinear-special:a", "casoratian:c",
                            "christoffel-darboux", "coef-linear:k", "spectral-deriv:d", "t-derivative:r"}) {
    const IdentityCheck* c = rep.find(label);
    REQUIRE_MESSAGE(c != nullptr, label);
    CHECK(c->count > 0);
    CHECK_FALSE(c->degenerate);
  }
  CHECK(to_double(rep.find("second-order-rr")->max_residual) < ctx.tol);
  CHECK(to_double(rep.find("l-linear")->max_residual) < ctx.tol);
  CHECK(rep.find("no-such-identity") == nullptr);
}

TEST_CASE("identity suite on the flat weight") {
  auto ctx = make_ctx(128, 1e-25);
  WorkingPrecision wp(ctx.bits);
  WeightParams p = WeightParams::from_omegas(C("0"), C("0"), C("0"), C("0"), expi(R("0.9")));
  SuiteOptions opt;
  opt.include_zd = false;
  IdentityReport rep = verify_identity_suite(p, 3, identity_sample_points(3, 1), ctx, opt);
  // exact zeros except where a quadrature seed enters
  for (const auto& c : rep.checks) CHECK_MESSAGE(to_double(c.max_residual) < 1e-40, c.label);
}

TEST_CASE("property: positivity regime gives real I0 and conjugate reflections") {
  auto ctx = make_ctx(128, 1e-25);
  WorkingPrecision wp(ctx.bits);
  std::mt19937_64 g(31);
  for (int i = 0; i < 6; ++i) {
    Complex mu(uniform(g, -0.4, 1.2)), w1(uniform(g, -0.4, 1.2)), w2(uniform(g, -0.5, 0.5));
    Complex t = expi(uniform(g, -3.0, 3.0));
    Complex xi = xi_from_physical(Complex(uniform(g, -1, 0.9)), mu, t);
    WeightParams p = WeightParams::from_omegas(mu, w1, w2, xi, t);
    REQUIRE(p.positivity_regime() == false);  // the literal xi is complex
    CoefficientTable tab = build_table_oracle(p, 4, ctx);
    for (int n = 1; n <= 4; ++n) {
      CHECK(to_double(abs(Complex(tab.I0[n].im))) < 1e3 * ctx.tol * to_double(abs(tab.I0[n])));
      CHECK(tab.I0[n].re > 0);
      CHECK(rel(tab.rbar[n], conj(tab.r[n])) < 1e3 * ctx.tol);
    }
  }
}
