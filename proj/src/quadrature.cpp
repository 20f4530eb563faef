#include "pvi/quadrature.hpp"

namespace pvi {

namespace mp = boost::multiprecision;

namespace {

struct Node {
  Real da_unit;  // (1 + x) / 2 on the reference interval
  Real db_unit;  // (1 - x) / 2
  Real weight;   // dx/dt / 2
};

// Abscissa data for parameter s = j*h.
Node make_node(const Real& s) {
  Real hp = pi_real() / 2;
  Real u = hp * mp::sinh(s);
  Real e2 = mp::exp(2 * u);
  Node n;
  // (1 - tanh u)/2 = 1/(e^{2u} + 1), (1 + tanh u)/2 = e^{2u}/(e^{2u} + 1)
  n.db_unit = 1 / (e2 + 1);
  n.da_unit = e2 / (e2 + 1);
  Real ch = mp::cosh(u);
  n.weight = hp * mp::cosh(s) / (ch * ch) / 2;
  return n;
}

}  // namespace

QuadratureResult tanh_sinh(const ArcIntegrand& f, const Real& a, const Real& b,
                           const Real& rel_tol, int max_level) {
  Real len = b - a;
  if (len == 0) return QuadratureResult{Complex(), Real(0), 0};
  int bits = current_bits();
  // Nodes are kept until the weight falls below 2^-(4 bits) so that integrable
  // endpoint singularities down to exponent -3/4 are resolved.
  Real wmin = pow2(-4 * bits - 16);
  Real tmax = mp::log(Real(8 * bits) / pi_real()) + 1;

  auto eval = [&](const Real& s) {
    Node n = make_node(s);
    Real da = len * n.da_unit;
    Real db = len * n.db_unit;
    Real x = n.da_unit < n.db_unit ? a + da : b - db;
    return std::pair<Complex, Real>(f(x, da, db) * Complex(n.weight * len), n.weight);
  };

  Real h(1);
  Complex sum = eval(Real(0)).first;
  for (int j = 1;; ++j) {
    Real s = h * j;
    if (s > tmax) break;
    auto p = eval(s);
    auto m = eval(-s);
    sum += p.first + m.first;
    if (p.second < wmin) break;
  }
  Complex prev = sum * Complex(h);
  QuadratureResult res;
  for (int level = 1; level <= max_level; ++level) {
    h /= 2;
    Complex add;
    for (int j = 1;; j += 2) {
      Real s = h * j;
      if (s > tmax) break;
      auto p = eval(s);
      auto m = eval(-s);
      add += p.first + m.first;
      if (p.second < wmin) break;
    }
    sum += add;
    Complex cur = sum * Complex(h);
    Real err = abs(cur - prev);
    res.value = cur;
    res.error = err;
    res.levels = level;
    if (level >= 3 && err <= rel_tol * abs(cur)) return res;
    if (level >= 3 && abs(cur) == 0 && err == 0) return res;
    prev = cur;
  }
  throw Error(ErrorCode::NoConvergence, "tanh-sinh quadrature did not converge");
}

}  // namespace pvi
