#pragma once

#include <string>
#include <vector>

#include "pvi/genhyp.hpp"
#include "pvi/weights.hpp"

namespace pvi {

enum class IsingRegime { LowT, HighT };

struct ApplicationOptions {
  // Return closed forms at special parameter values (u = 0, |u| = 1, xi = 0, k in {0, 1, inf})
  // without running the other routes.
  bool short_circuit = true;
  // Truncation of the shell sums; tail_tol <= 0 means ctx.tol.
  SeriesControl series{400, 0};
  // Largest number of partitions the shell sum may visit before the determinant form is used.
  double series_budget = 4e5;
  bool run_oracle = true;
};

struct AppRoute {
  std::string name;  // closed-form, recurrence, quadratic, genhyp-series, genhyp-det, oracle
  bool ok = false;
  std::string error;  // error code name when !ok
  ErrorCode code = ErrorCode::NoConvergence;
  std::string message;
  std::vector<Complex> value;    // indices 0..n_max
  std::vector<Complex> r, rbar;  // may be empty
  Real tail;                     // largest shell-sum tail, genhyp-series only
};

struct ApplicationResult {
  ModelKind model;
  std::string quantity;  // F_N, E_N or sigma_N
  int n_max = 0;
  std::vector<Complex> value;
  std::string primary;
  std::vector<AppRoute> routes;
  Real max_deviation;  // largest relative deviation of a successful route from the primary one
  std::vector<std::string> notes;

  const AppRoute* route(const std::string& name) const;
  int successful_routes() const;
};

// Average of |u + z|^{2 mu} over U(N).
ApplicationResult cue_charpoly(const Complex& u, const Complex& mu, int n_max, const PrecisionContext& ctx,
                               const ApplicationOptions& opt = {});
// prod_{j<N} j! Gamma(j+2mu+1) / Gamma(j+mu+1)^2, the |u| = 1 value.
Complex cue_charpoly_unit(const Complex& mu, int N, const PrecisionContext& ctx);

// Generating function of the gap probabilities for the arc (0, phi).
ApplicationResult cue_gap(const Real& phi, const Complex& xi, int n_max, const PrecisionContext& ctx,
                          const ApplicationOptions& opt = {});
// x_0..x_{n_max} from the third-order recurrence, x_1 from the closed form.
std::vector<Complex> cue_gap_x(const Real& phi, const Complex& xi, int n_max, const PrecisionContext& ctx);
// Probabilities of exactly k = 0..N eigenvalues in the arc.
std::vector<Real> cue_gap_occupancy(const Real& phi, int N, const PrecisionContext& ctx);

// Diagonal spin-spin correlation. k is the modulus of the regime (k > 1 low T, k < 1 high T).
ApplicationResult ising_diagonal(const Real& k, IsingRegime regime, int n_max, const PrecisionContext& ctx,
                                 const ApplicationOptions& opt = {});
// r_1, rbar_1 from complete elliptic integrals. High temperature values are in the rescaled
// convention r k^{-2}, rbar k^{2} used by the high temperature recurrence.
std::pair<Complex, Complex> ising_initial_values(const Real& k, IsingRegime regime, const PrecisionContext& ctx);
// prod_{j=1}^N Gamma(j)^2 / (Gamma(j+1/2) Gamma(j-1/2)).
Complex ising_critical_value(int N, const PrecisionContext& ctx);

struct IsingLimitReport {
  Real limit;                  // (1 - k^{-2})^{1/4}
  std::vector<Real> deviation;  // |sigma_N - limit|, N = 0..n_max
  int burn_in = 0;
  bool monotone = false;  // deviation non-increasing for N >= burn_in
};

IsingLimitReport ising_limit_check(const Real& k, int n_max, const PrecisionContext& ctx, int burn_in = 5);

}  // namespace pvi
