#pragma once

#include <functional>

#include "pvi/numerics.hpp"

namespace pvi {

// Integrand on [a, b]. Besides the node x it receives da = x - a and db = b - x,
// computed without cancellation so endpoint singularities can be resolved.
using ArcIntegrand = std::function<Complex(const Real& x, const Real& da, const Real& db)>;

struct QuadratureResult {
  Complex value;
  Real error;  // difference between the last two refinement levels
  int levels = 0;
};

// Tanh-sinh rule at the current working precision. Refines until successive levels
// agree to rel_tol; throws NoConvergence after max_level halvings.
QuadratureResult tanh_sinh(const ArcIntegrand& f, const Real& a, const Real& b,
                           const Real& rel_tol, int max_level = 14);

}  // namespace pvi
