#include "support.hpp"

#include "pvi/genhyp.hpp"
#include "pvi/oracle.hpp"

#include <functional>
#include <set>

using namespace pvi;
using namespace pvi::test;

namespace {

// Partitions of n into at most k parts: p(n, k) = p(n, k-1) + p(n-k, k).
long count_partitions(int n, int k) {
  if (n == 0) return 1;
  if (k == 0 || n < 0) return 0;
  return count_partitions(n, k - 1) + count_partitions(n - k, k);
}

// Hook lengths read off the diagram cell by cell.
long diagram_hooks(const std::vector<int>& rows) {
  long prod = 1;
  for (size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < rows[i]; ++j) {
      int arm = rows[i] - j - 1;
      int leg = 0;
      for (size_t r = i + 1; r < rows.size(); ++r)
        if (rows[r] > j) ++leg;
      prod *= arm + leg + 1;
    }
  return prod;
}

// Semistandard tableaux of the given shape with entries in 1..N, filled row by row.
long count_ssyt(const std::vector<int>& shape, int N) {
  std::vector<std::vector<int>> fill;
  for (int len : shape) fill.emplace_back(len, 0);
  long count = 0;
  std::function<void(size_t, int)> place = [&](size_t i, int j) {
    if (i == shape.size()) {
      ++count;
      return;
    }
    if (j == shape[i]) {
      place(i + 1, 0);
      return;
    }
    int lo = 1;
    if (j > 0) lo = std::max(lo, fill[i][j - 1]);
    if (i > 0) lo = std::max(lo, fill[i - 1][j] + 1);
    for (int v = lo; v <= N; ++v) {
      fill[i][j] = v;
      place(i, j + 1);
    }
  };
  place(0, 0);
  return count;
}

Real tgamma(const Real& x) { return boost::multiprecision::tgamma(x); }

}  // namespace

TEST_CASE("partition enumeration") {
  CHECK(partitions_of_weight(0, 3).size() == 1);
  CHECK(partitions_of_weight(0, 3)[0].length() == 0);
  auto p3 = partitions_of_weight(3, 2);
  REQUIRE(p3.size() == 2);
  CHECK(p3[0].parts == std::vector<int>{3});
  CHECK(p3[1].parts == std::vector<int>{2, 1});
  CHECK(partitions_of_weight(6, 3).size() == 7);
  for (int w = 0; w <= 14; ++w)
    for (int k = 1; k <= 6; ++k) {
      auto ps = partitions_of_weight(w, k);
      CHECK(static_cast<long>(ps.size()) == count_partitions(w, k));
      std::set<std::vector<int>> seen;
      for (const auto& p : ps) {
        CHECK(p.weight() == w);
        CHECK(p.length() <= k);
        CHECK(std::is_sorted(p.parts.rbegin(), p.parts.rend()));
        seen.insert(p.parts);
      }
      CHECK(seen.size() == ps.size());
    }
  CHECK_THROWS_AS(Partition({1, 2}), Error);
  CHECK(Partition({3, 1}).conjugate().parts == std::vector<int>{2, 1, 1});
}

TEST_CASE("generalized Pochhammer") {
  auto ctx = make_ctx();
  WorkingPrecision wp(ctx.bits);
  CHECK(gen_pochhammer(C("0.3"), Partition(), 3, ctx) == Complex(1));
  CHECK(gen_pochhammer(C("1"), Partition({2}), 1, ctx) == Complex(2));
  CHECK(rel(gen_pochhammer(C("-0.5"), Partition({2, 1}), 2, ctx), C("0.375")) < 1e-70);
}

TEST_CASE("hook products against the diagram") {
  CHECK(hook_product(Partition()) == 1);
  CHECK(hook_product(Partition({5})) == 120);
  CHECK(hook_product(Partition({2, 1})) == 3);
  for (int w = 1; w <= 9; ++w)
    for (const auto& p : partitions_of_weight(w, w)) CHECK(hook_product(p) == diagram_hooks(p.parts));
}

TEST_CASE("principal specialization against tableau counts") {
  auto ctx = make_ctx();
  WorkingPrecision wp(ctx.bits);
  CHECK(schur_equal_args(Partition(), 3, C("0.7"), ctx) == Complex(1));
  CHECK(rel(schur_equal_args(Partition({1}), 4, C("0.7"), ctx), C("2.8")) < 1e-70);
  CHECK(schur_unit_value(Partition({2, 1}), 3) == 8);
  for (int N = 1; N <= 4; ++N)
    for (int w = 0; w <= 6; ++w)
      for (const auto& p : partitions_of_weight(w, N)) CHECK(schur_unit_value(p, N) == count_ssyt(p.parts, N));
}

TEST_CASE("series at t = 0 and the N = 1 reduction") {
  auto ctx = make_ctx(128, 1e-25);
  WorkingPrecision wp(ctx.bits);
  SeriesControl sc{400, 1e-27};
  SeriesResult z = f21_general(C("0.3"), C("-0.7"), C("2.1"), 3, C("0"), sc, ctx);
  CHECK(z.value == Complex(1));
  std::mt19937_64 g(51);
  for (int i = 0; i < 50; ++i) {
    Complex a(uniform(g, -2, 2), uniform(g, -1, 1)), b(uniform(g, -2, 2), uniform(g, -1, 1));
    Complex c(uniform(g, 0.3, 3), uniform(g, -1, 1));
    Complex t = polar(uniform(g, 0, 0.8), uniform(g, -3, 3));
    SeriesResult s = f21_general(a, b, c, 1, t, sc, ctx);
    CHECK(s.converged);
    CHECK(rel(s.value, gauss_2f1(a, b, c, t, ctx)) < ctx.tol);
  }
}

TEST_CASE("series outside the disk does not converge") {
  auto ctx = make_ctx(128, 1e-25);
  WorkingPrecision wp(ctx.bits);
  try {
    f21_general(C("0.3"), C("0.4"), C("1.2"), 2, C("1.5"), SeriesControl{30, 1e-27}, ctx);
    FAIL("expected TruncationNotConverged");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TruncationNotConverged);
  }
}

TEST_CASE("Euler identity at t = 1 through the determinant form") {
  auto ctx = make_ctx();
  WorkingPrecision wp(ctx.bits);
  Real mu = R("0.2"), w1 = R("0.3");
  WeightParams p = WeightParams::from_omegas(Complex(mu), Complex(w1), C("0"), C("0"), C("1"));
  Real om = p.omegabar.re;
  for (int N = 1; N <= 4; ++N) {
    Real prod(1);
    for (int j = 1; j <= N; ++j)
      prod *= tgamma(j + 2 * mu + 2 * w1) * tgamma(j - mu + om) / (tgamma(j + 2 * w1) * tgamma(j + mu + om));
    Complex det = f21_equal_det(Complex(-2 * mu), -Complex(mu) - p.omega, Complex(N - mu + om), N, C("1"), ctx);
    CHECK(rel(det, Complex(prod)) < 1e-60);
    CHECK(rel(euler_gamma_product(Complex(mu), p.omega, p.omegabar, N, ctx), Complex(prod)) < 1e-60);
  }
}

TEST_CASE("CUE char-poly average: series and determinant against the oracle") {
  auto ctx = make_ctx(128, 1e-25);
  WorkingPrecision wp(ctx.bits);
  Real mu = R("1.5");
  const int N = 3;
  SeriesResult s = f21_general(Complex(-mu), Complex(-mu), Complex(N), N, C("0.49"), SeriesControl{200, 1e-28}, ctx);
  CHECK(s.converged);
  Complex d = f21_equal_det(Complex(-mu), Complex(-mu), Complex(N), N, C("0.49"), ctx);
  CHECK(rel(s.value, d) < ctx.tol);
  // the normalised average is the Toeplitz determinant itself
  CoefficientTable tab = build_table_oracle(ModelKind::cue_charpoly(C("0.7"), Complex(mu)), N, ctx);
  CHECK(rel(s.value, tab.T[N]) < ctx.tol);
}

TEST_CASE("limit shell") {
  auto ctx = make_ctx(128, 1e-25);
  WorkingPrecision wp(ctx.bits);
  SeriesControl sc{300, 1e-28};
  Complex a = C("0.3", "0.1"), b = C("-0.6"), t = C("0.35", "0.2");
  // classical residue: lim eps 2F1(a, b; eps; t) = a b t 2F1(a+1, b+1; 2; t)
  SeriesResult one = f21_limit_shell(a, b, C("0"), 1, t, sc, ctx);
  CHECK(rel(one.value, a * b * t * gauss_2f1(a + Complex(1), b + Complex(1), C("2"), t, ctx)) < ctx.tol);
  CHECK(f21_limit_shell(a, b, C("2"), 3, C("0"), sc, ctx).value.is_zero());
  CHECK_THROWS_AS(f21_limit_shell(a, b, C("1"), 3, t, sc, ctx), Error);

  // Ising low temperature rbar_N from the surviving shell
  Real k = R("1.3");
  CoefficientTable tab = build_table_oracle(ModelKind::ising_low(k), 3, ctx);
  Complex tk(1 / (k * k)), half(Real(0.5));
  for (int N = 1; N <= 3; ++N) {
    Complex F = f21_equal_det(-half, half, Complex(N), N, tk, ctx);
    SeriesResult L = f21_limit_shell(-half, -half, Complex(N - 1), N, tk, sc, ctx);
    CHECK(L.converged);
    Complex rb = Complex(N % 2 ? -1 : 1) * Complex(factorial_real(N - 1)) / pochhammer(half, N) * L.value / F;
    CHECK(rel(rb, tab.rbar[N]) < 1e3 * ctx.tol);
  }
}

TEST_CASE("property: reflections and averages from the generalized function") {
  auto ctx = make_ctx(128, 1e-25);
  WorkingPrecision wp(ctx.bits);
  SeriesControl sc{200, 1e-28};
  std::mt19937_64 g(52);
  for (int i = 0; i < 2; ++i) {
    Complex mu(uniform(g, 0.1, 0.6)), w1(uniform(g, 0.1, 0.5)), w2(uniform(g, -0.2, 0.2), uniform(g, -0.1, 0.1));
    Complex t = polar(uniform(g, 0.2, 0.4), uniform(g, -3, 3));
    WeightParams p = WeightParams::from_omegas(mu, w1, w2, Complex(0), t);
    CoefficientTable tab = build_table_oracle(p, 5, ctx);
    for (int N = 1; N <= 5; ++N) {
      F21Method m = N <= 3 ? F21Method::Series : F21Method::Determinant;
      GenhypReflections gr = genhyp_reflections(p, N, m, sc, ctx);
      CHECK(rel(gr.r, tab.r[N]) < 1e3 * ctx.tol);
      CHECK(rel(gr.rbar, tab.rbar[N]) < 1e3 * ctx.tol);
      if (N <= 4) {
        Complex avg = genhyp_average(p, N, m, sc, ctx);
        CHECK(rel(avg, tab.T[N] * pow(t, mu * Complex(N))) < 1e3 * ctx.tol);
      }
    }
  }
  WeightParams with_xi = WeightParams::from_omegas(C("0.3"), C("0.2"), C("0.1"), C("0.5"), C("0.3"));
  CHECK_THROWS_AS(genhyp_average(with_xi, 2, F21Method::Determinant, sc, ctx), Error);
}
