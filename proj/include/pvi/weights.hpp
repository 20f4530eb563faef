#pragma once

#include <functional>
#include <string>

#include "pvi/numerics.hpp"

namespace pvi {

// Generalized Jacobi weight
//   w(z) = t^{-mu} z^{-mu-omega} (1+z)^{2 omega1} (1+tz)^{2 mu},  times (1 - xi) on the xi arc,
// principal branches throughout. omega and omegabar are stored directly; omega2 may be complex.
struct WeightParams {
  Complex mu;
  Complex omega;
  Complex omegabar;
  Complex xi;
  Complex t;

  static WeightParams from_omegas(const Complex& mu, const Complex& omega1, const Complex& omega2,
                                  const Complex& xi, const Complex& t);
  Complex omega1() const;
  Complex omega2() const;
  // Residues -mu-omega, 2 omega1, 2 mu all non-integer.
  bool is_regular() const;
  // mu, omega1, omega2, xi real, xi < 1, 2 omega1 > -1, 2 mu > -1, |t| = 1.
  bool positivity_regime() const;
  // Same parameters at the current working precision.
  WeightParams rounded_copy() const;
};

// +1 when Im t > 0 (and on the real axis), -1 when Im t < 0.
int xi_sign(const Complex& t);

// The literal weight differs from the Hermitian-positive grouping by e^{-2 pi i s mu} on the xi
// arc. Maps the physical xi of that grouping to the xi used by WeightParams.
Complex xi_from_physical(const Complex& xi_phys, const Complex& mu, const Complex& t);

enum class ModelTag { GeneralizedJacobi, CueGap, CueCharPoly, IsingLowT, IsingHighT };

struct ModelKind {
  ModelTag tag = ModelTag::GeneralizedJacobi;
  WeightParams general;  // GeneralizedJacobi
  Real phi;              // CueGap, in [0, 2 pi]
  Complex xi;            // CueGap
  Complex u;             // CueCharPoly
  Complex mu;            // CueCharPoly exponent (the weight is |u+z|^{2 mu})
  Real k;                // Ising

  static ModelKind generalized(const WeightParams& p);
  static ModelKind cue_gap(const Real& phi, const Complex& xi);
  static ModelKind cue_charpoly(const Complex& u, const Complex& mu);
  static ModelKind ising_low(const Real& k);
  static ModelKind ising_high(const Real& k);
  void validate() const;
  std::string name() const;
};

const char* model_tag_name(ModelTag t);

// Weight at z = e^{i theta} on the unit circle.
Complex weight_eval(const WeightParams& p, const Complex& z);

// Closed-form moment w_n, first form, at the current precision.
Complex moment_kernel(const WeightParams& p, int n);
// t^{mu} w_n; finite at t = 0 (requires xi = 0 there).
Complex scaled_moment_kernel(const WeightParams& p, int n);
// Second form of the closed-form moment; singular when n + mu - omegabar is an integer.
Complex moment2_kernel(const WeightParams& p, int n);
// d w_n / dt with t treated as a complex variable.
Complex moment_dt_kernel(const WeightParams& p, int n);

// Public moment with precision escalation. When the second form is defined it is
// evaluated too and must agree to ctx.tol, otherwise NoConvergence is thrown.
Complex toeplitz_moment(const WeightParams& p, int n, const PrecisionContext& ctx);
Complex toeplitz_moment2(const WeightParams& p, int n, const PrecisionContext& ctx);

// Closed forms of the specialised models.
Complex model_moment_kernel(const ModelKind& m, int n);
Complex model_moments(const ModelKind& m, int n, const PrecisionContext& ctx);

// Generalized Jacobi parameters of a model (CueGap only for phi <= pi; IsingHighT unsupported).
WeightParams equivalent_params(const ModelKind& m);
// model moment = factor * toeplitz moment of equivalent_params.
Complex equivalence_factor(const ModelKind& m);

// Moment source used by the determinant oracle.
using MomentFn = std::function<Complex(int)>;
MomentFn moment_source(const WeightParams& p);
MomentFn moment_source(const ModelKind& m);

// Test oracle: (1/2 pi) \int w(e^{i theta}) g(e^{i theta}) d theta by tanh-sinh on arcs split at
// the singular angles. Requires |t| = 1, or |t| < 1.
Complex weight_circle_integral(const WeightParams& p, const std::function<Complex(const Complex&)>& g,
                               const Real& rel_tol);
Complex quadrature_moment(const WeightParams& p, int n, const PrecisionContext& ctx);

}  // namespace pvi
