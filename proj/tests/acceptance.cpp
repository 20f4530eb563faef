// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any hard check fails.
#include "pvi/applications.hpp"
#include "pvi/cli.hpp"
#include "pvi/genhyp.hpp"
#include "pvi/oracle.hpp"
#include "pvi/recurrences.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace pvi;

namespace {

using Clock = std::chrono::steady_clock;

PrecisionContext ctx_at(int bits, double tol) {
  PrecisionContext c;
  c.bits = bits;
  c.tol = tol;
  return c;
}

double rel(const Complex& a, const Complex& b) { return to_double(rel_diff(a, b)); }
Complex C(const char* re, const char* im = "0") { return complex_from_string(re, im); }
Real R(const char* s) { return real_from_string(s); }

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  bool soft_fail = false;  // reported but does not change the exit status
  std::ostringstream detail;

  void need(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int hard_failures = 0;

void report(int id, const char* name, const std::function<void(Outcome&)>& body) {
  Outcome o;
  auto t0 = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  double s = seconds_since(t0);
  if (!o.pass) ++hard_failures;
  std::printf("%s criterion %d (%s) %.1fs%s\n", o.pass ? "PASS" : "FAIL", id, name, s, o.detail.str().c_str());
  std::fflush(stdout);
}

WeightParams generic_point() {
  return WeightParams::from_omegas(C("0.3"), C("0.2"), C("0.1"), C("0.4"), expi(pi_real() / 3));
}

double table_deviation(const RouteResult& rr, const CoefficientTable& ref, int n_max) {
  double worst = 0;
  for (int n = 1; n <= n_max; ++n) {
    if (rr.has_reflections) {
      worst = std::max(worst, rel(rr.table.r[n], ref.r[n]));
      worst = std::max(worst, rel(rr.table.rbar[n], ref.rbar[n]));
    }
    worst = std::max(worst, rel(rr.table.T[n], ref.T[n]));
  }
  return worst;
}

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

void route_agreement(Outcome& o) {
  const int N = 15;
  auto ctx = ctx_at(512, 1e-40);
  auto t0 = Clock::now();
  WorkingPrecision wp(512);
  WeightParams p = generic_point();
  CoefficientTable ref = build_table_oracle(p, N, ctx);
  double worst = 0;
  for (RouteId id : {RouteId::TwoTwoA, RouteId::TwoTwoB, RouteId::TwoOnePair, RouteId::DPainleveGF, RouteId::TauL01}) {
    RouteResult rr = run_route(id, p, N, ctx);
    double d = table_deviation(rr, ref, N);
    o.need(d < 1e-15, std::string(route_name(id)) + " deviation");
    worst = std::max(worst, d);
  }
  double s = seconds_since(t0);
  o.need(s < 60, "runtime");
  o.detail << " max deviation " << worst;
}

void identity_suite(Outcome& o) {
  auto ctx = ctx_at(512, 1e-40);
  auto t0 = Clock::now();
  WorkingPrecision wp(512);
  IdentityReport rep = verify_identity_suite(generic_point(), 10, identity_sample_points(8, 1), ctx);
  double worst = to_double(rep.max_residual());
  for (const auto& c : rep.checks) o.need(to_double(c.max_residual) < 1e-20, c.label);
  o.need(rep.checks.size() >= 40, "suite size");
  double s = seconds_since(t0);
  o.need(s < 120, "runtime");
  o.detail << " " << rep.checks.size() << " identities, max residual " << worst;
}

void cue_gap_check(Outcome& o) {
  const int N = 12;
  auto ctx = ctx_at(512, 1e-40);
  WorkingPrecision wp(512);
  Real phi = pi_real() / 2;
  ApplicationResult res = cue_gap(phi, Complex(1), N, ctx);
  const AppRoute* rec = res.route("recurrence");
  const AppRoute* quad = res.route("quadratic");
  const AppRoute* orc = res.route("oracle");
  o.need(rec && rec->ok && orc && orc->ok && quad && quad->ok, "routes ran");
  if (!o.pass) return;
  double worst = 0;
  for (int n = 1; n <= N; ++n) {
    worst = std::max(worst, rel(rec->value[n], orc->value[n]));
    worst = std::max(worst, rel(quad->value[n], orc->value[n]));
  }
  o.need(worst < 1e-20, "agreement with the oracle");
  o.need(rel(rec->value[1], C("0.75")) < 1e-100, "E_1 = 3/4");
  o.detail << " max deviation " << worst;
}

void cue_charpoly_check(Outcome& o) {
  const int N = 6;
  auto ctx = ctx_at(512, 1e-40);
  WorkingPrecision wp(512);
  o.need(rel(cue_charpoly_unit(Complex(1), 2, ctx), Complex(3)) < 1e-100, "F_2 = 3");
  ApplicationOptions opt;
  opt.series = SeriesControl{400, 1e-27};
  opt.series_budget = 1e8;  // keep every N on the shell sum so its tail is measured
  ApplicationResult res = cue_charpoly(Complex(R("0.7")), Complex(R("1.5")), N, ctx, opt);
  const AppRoute* rec = res.route("recurrence");
  const AppRoute* ser = res.route("genhyp-series");
  const AppRoute* orc = res.route("oracle");
  o.need(rec && rec->ok && ser && ser->ok && orc && orc->ok, "routes ran");
  if (!o.pass) return;
  double worst = 0;
  for (int n = 1; n <= N; ++n) {
    worst = std::max(worst, rel(rec->value[n], orc->value[n]));
    worst = std::max(worst, rel(ser->value[n], orc->value[n]));
  }
  double tail = to_double(ser->tail);
  o.need(worst < 1e-15, "agreement");
  o.need(tail < 1e-25, "series tail");
  o.detail << " max deviation " << worst << ", tail " << tail;
}

void ising_check(Outcome& o) {
  auto ctx = ctx_at(512, 1e-40);
  WorkingPrecision wp(512);
  ApplicationOptions full;
  full.short_circuit = false;

  ApplicationResult crit = ising_diagonal(R("1"), IsingRegime::LowT, 8, ctx, full);
  const AppRoute* rec = crit.route("recurrence");
  o.need(rec && rec->ok, "critical recurrence ran");
  double crit_dev = 0;
  if (rec && rec->ok)
    for (int n = 1; n <= 8; ++n) crit_dev = std::max(crit_dev, rel(rec->value[n], ising_critical_value(n, ctx)));
  o.need(crit_dev < 1e-100, "critical closed form");

  ApplicationResult low = ising_diagonal(R("1.25"), IsingRegime::LowT, 10, ctx);
  const AppRoute* lrec = low.route("recurrence");
  const AppRoute* lorc = low.route("oracle");
  o.need(lrec && lrec->ok && lorc && lorc->ok, "low temperature routes ran");
  double low_dev = 0;
  if (lrec && lrec->ok && lorc && lorc->ok)
    for (int n = 1; n <= 10; ++n) low_dev = std::max(low_dev, rel(lrec->value[n], lorc->value[n]));
  o.need(low_dev < 1e-15, "k = 1.25 agreement");

  for (const auto& v : ising_diagonal(R("inf"), IsingRegime::LowT, 5, ctx).value) o.need(v == Complex(1), "k = inf");
  ApplicationResult hot = ising_diagonal(R("0"), IsingRegime::HighT, 5, ctx);
  for (int n = 1; n <= 5; ++n) o.need(hot.value[n].is_zero(), "infinite temperature");

  // soft: distance to the long-range limit at N = 40
  IsingLimitReport lim = ising_limit_check(R("1.25"), 40, ctx_at(256, 1e-30));
  double d40 = to_double(lim.deviation[40]);
  o.detail << " critical " << crit_dev << ", k=1.25 " << low_dev << ", |sigma_40 - limit| " << d40;
  if (d40 >= 1e-3) {
    o.detail << " (soft check above 1e-3)";
    o.need(d40 < 1e-2, "limit off by more than 10x");
  }
}

void euler_identity(Outcome& o) {
  auto ctx = ctx_at(512, 1e-40);
  WorkingPrecision wp(512);
  Complex mu = C("0.2"), om = C("0.3", "0.1"), omb = C("0.3", "-0.1");
  const int N = 3;
  Complex a = Complex(-2) * mu, b = -mu - om, c = Complex(N) - mu + omb;
  Complex gp = euler_gamma_product(mu, om, omb, N, ctx);
  Complex det = f21_equal_det(a, b, c, N, Complex(1), ctx);
  double d = rel(det, gp);
  o.need(d < 1e-20, "determinant vs Gamma product");
  // the shell sum at t = 1 converges only algebraically; report it
  SeriesResult s = f21_general(a, b, c, N, Complex(1), SeriesControl{60, 1e-27}, ctx);
  o.detail << " det deviation " << d << ", shell sum (60 shells) deviation " << rel(s.value, gp) << " tail "
           << to_double(s.tail);
}

void genhyp_oracles(Outcome& o) {
  auto ctx = ctx_at(256, 1e-30);
  WorkingPrecision wp(256);
  int shapes = 0;
  for (int N = 1; N <= 4; ++N)
    for (int w = 0; w <= 6; ++w)
      for (const auto& kappa : partitions_of_weight(w, N)) {
        ++shapes;
        o.need(schur_unit_value(kappa, N) == Rational(count_ssyt(kappa.parts, N)), "SSYT count");
      }
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> u(0, 1);
  auto draw = [&](double lo, double hi) { return Real(lo + (hi - lo) * u(g)); };
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    Complex a(draw(-2, 2), draw(-1, 1)), b(draw(-2, 2), draw(-1, 1)), c(draw(0.3, 3), draw(-1, 1));
    Complex t = polar(draw(0, 0.8), draw(-3, 3));
    SeriesResult s = f21_general(a, b, c, 1, t, SeriesControl{400, 1e-30}, ctx);
    worst = std::max(worst, rel(s.value, gauss_2f1(a, b, c, t, ctx)));
  }
  o.need(worst < 1e-25, "N = 1 reduction");
  o.detail << " " << shapes << " shapes, N = 1 max deviation " << worst;
}

void degenerate_guards(Outcome& o) {
  auto ctx = ctx_at(512, 1e-40);
  WorkingPrecision wp(512);
  WeightParams sym = WeightParams::from_omegas(C("0.3"), C("0.2"), C("0"), C("0.4"), expi(pi_real() / 3));
  bool raised = false;
  try {
    run_two_one_pair(sym, 4, ctx);
  } catch (const Error& e) {
    raised = e.code() == ErrorCode::DegenerateOmega;
  }
  o.need(raised, "DegenerateOmega");

  // choose xi so that r_2 vanishes; the moments are affine in xi, so this is a quadratic
  Complex xi;
  {
    WorkingPrecision hi(2048);
    auto mom = [](const Complex& x, int n) {
      return moment_kernel(WeightParams::from_omegas(C("0.3"), C("0.2"), C("0.1"), x, expi(pi_real() / 3)), n);
    };
    Complex a[3], b[3];
    for (int j = 0; j < 3; ++j) {
      a[j] = mom(Complex(0), -j);
      b[j] = mom(Complex(1), -j) - a[j];
    }
    Complex A = b[1] * b[1] - b[2] * b[0];
    Complex B = Complex(2) * a[1] * b[1] - a[2] * b[0] - b[2] * a[0];
    Complex Cc = a[1] * a[1] - a[2] * a[0];
    Complex d = sqrt(B * B - Complex(4) * A * Cc);
    Complex x1 = (-B + d) / (Complex(2) * A), x2 = (-B - d) / (Complex(2) * A);
    Complex guess(1.58465, -1.94041);
    xi = abs(x1 - guess) < abs(x2 - guess) ? x1 : x2;
  }
  const int N = 15;
  WeightParams p = WeightParams::from_omegas(C("0.3"), C("0.2"), C("0.1"), rounded(xi), expi(pi_real() / 3));
  CoefficientTable ref = build_table_oracle(p, N, ctx);
  RouteResult rr = run_two_two(p, N, ctx);
  o.need(!rr.spliced.empty(), "splice recorded");
  double worst = 0;
  for (int n = 1; n <= N; ++n) {
    if (n == 2) continue;  // r_2 itself is ~0, compare absolutely below
    worst = std::max(worst, rel(rr.table.r[n], ref.r[n]));
    worst = std::max(worst, rel(rr.table.rbar[n], ref.rbar[n]));
    worst = std::max(worst, rel(rr.table.T[n], ref.T[n]));
  }
  double r2 = to_double(abs(rr.table.r[2] - ref.r[2]));
  o.need(worst < 1e-15 && r2 < 1e-15, "spliced table accuracy");
  o.detail << " |r_2| " << to_double(abs(ref.r[2])) << ", spliced at";
  for (int s : rr.spliced) o.detail << " " << s;
  o.detail << ", max deviation " << worst;
}

void determinism(Outcome& o) {
  RunConfig c;
  c.command = "compute";
  c.mu = "0.3";
  c.omega1 = "0.2";
  c.omega2 = "0.1";
  c.xi = "0.4";
  c.phi = "pi/3";
  c.n_max = 6;
  c.routes = {"oracle", "TwoTwoA", "DPainleveGF", "TauL01"};
  c.bits = 256;
  c.tol = 1e-30;
  int e1 = 0, e2 = 0;
  std::string a = cmd_compute(c, e1), b = cmd_compute(c, e2);
  c.format = "json";
  int e3 = 0, e4 = 0;
  std::string ja = cmd_compute(c, e3), jb = cmd_compute(c, e4);
  o.need(e1 == 0 && e2 == 0 && e3 == 0 && e4 == 0, "exit codes");
  o.need(a == b && ja == jb, "byte-identical output");
  o.detail << " " << a.size() << " + " << ja.size() << " bytes";
}

}  // namespace

int main() {
  report(1, "route agreement", route_agreement);
  report(2, "identity suite", identity_suite);
  report(3, "CUE gap", cue_gap_check);
  report(4, "CUE characteristic polynomial", cue_charpoly_check);
  report(5, "Ising diagonal correlation", ising_check);
  report(6, "Euler identity", euler_identity);
  report(7, "generalized hypergeometric oracles", genhyp_oracles);
  report(8, "degenerate guards", degenerate_guards);
  report(9, "determinism", determinism);
  return hard_failures == 0 ? 0 : 1;
}
