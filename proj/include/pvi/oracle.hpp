#pragma once

#include <map>
#include <string>
#include <vector>

#include "pvi/linalg.hpp"
#include "pvi/weights.hpp"

namespace pvi {

// Per-index sequences shared by all routes. Index n runs over [0, n_max].
struct CoefficientTable {
  int n_max = -1;
  std::vector<Complex> r, rbar, kappa, l, lbar, m, I0, T;
  std::vector<std::string> source;  // "oracle" or a route id, per index
  std::vector<std::string> notes;   // non-fatal diagnostics (NearSingular and the like)

  void resize(int n);
  // l_n / kappa_n
  Complex lk(int n) const { return l[n] / kappa[n]; }
  Complex lbk(int n) const { return lbar[n] / kappa[n]; }
};

// Memoised moment lookup at the current working precision.
class MomentCache {
 public:
  explicit MomentCache(MomentFn f) : f_(std::move(f)) {}
  const Complex& get(int n);

 private:
  MomentFn f_;
  std::map<int, Complex> cache_;
};

// det[w_{-eps+j-k}]_{0<=j,k<n} at the current precision. NearSingular pivots are appended
// to *notes when given.
Complex toeplitz_det_kernel(MomentCache& w, int eps, int n, std::vector<std::string>* notes = nullptr);
Complex toeplitz_det(const WeightParams& p, int eps, int n, const PrecisionContext& ctx);
// Same determinant by cofactor expansion (n <= 8).
Complex toeplitz_det_cofactor(const WeightParams& p, int eps, int n, const PrecisionContext& ctx);

std::pair<Complex, Complex> reflection_from_dets(const WeightParams& p, int n, const PrecisionContext& ctx);

// Table from determinants at the current precision; fills indices 0..n_max.
CoefficientTable build_table_kernel(const MomentFn& w, int n_max);
// Escalating versions (bits and 2 bits must agree on r, rbar, T to ctx.tol).
CoefficientTable build_table_oracle(const WeightParams& p, int n_max, const PrecisionContext& ctx);
CoefficientTable build_table_oracle(const ModelKind& m, int n_max, const PrecisionContext& ctx);

// Caratheodory function by the moment series 1 + 2 sum w_k z^k (|z| < 1) or
// -1 - 2 sum w_{-k} z^{-k} (|z| > 1).
Complex caratheodory(const WeightParams& p, const Complex& z, const PrecisionContext& ctx);
// Same function by circle quadrature at the current precision.
Complex caratheodory_quadrature(const WeightParams& p, const Complex& z);

struct OpucEval {
  Complex z;
  std::vector<Complex> phi, phistar, eps, epsstar;
};

// phi_n, phi*_n by the Szego recurrence from phi_0 = phi*_0 = kappa_0; eps_n, eps*_n from
// eps_0 = 1/kappa_0 + kappa_0 F(z), eps*_0 = 1/kappa_0 - kappa_0 F(z) by the same recurrence.
// F is supplied by the caller.
OpucEval opuc_eval_kernel(const CoefficientTable& tab, int n, const Complex& z, const Complex& F);
OpucEval opuc_eval(const WeightParams& p, const CoefficientTable& tab, const Complex& z,
                   const PrecisionContext& ctx);

struct CoefficientFunctions {
  Complex Theta, ThetaStar, Omega, OmegaStar;
};

// W(z) = z(1+z)(1+tz)/t and V(z) with W w' = 2 V w.
Complex spectral_W(const WeightParams& p, const Complex& z);
Complex spectral_V(const WeightParams& p, const Complex& z);
// Needs the table through index n+2.
CoefficientFunctions coefficient_functions(const WeightParams& p, const CoefficientTable& tab, int n,
                                           const Complex& z);

struct IdentityCheck {
  std::string label;
  Real max_residual;
  int count = 0;
  bool degenerate = false;  // a coefficient ratio was 0/0 (flat weight); treated as satisfied
};

struct IdentityReport {
  std::vector<IdentityCheck> checks;
  Real max_residual() const;
  const IdentityCheck* find(const std::string& label) const;
};

// Deterministic sample points with |z| cycling through {0.3, 0.7, 1.4}.
std::vector<Complex> identity_sample_points(int count, unsigned seed);

struct SuiteOptions {
  int derivative_step_log2 = -64;  // step for the z- and t-finite differences
  bool include_rdot = true;
  bool include_zd = true;
};

IdentityReport verify_identity_suite(const WeightParams& p, int n_max, const std::vector<Complex>& samples,
                                     const PrecisionContext& ctx, const SuiteOptions& opt = {});

}  // namespace pvi
