#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "pvi/oracle.hpp"

namespace pvi {

enum class RouteId {
  TwoTwoA,
  TwoTwoB,
  TwoOnePair,
  OneOneBilinear,
  OneOneNext,
  TwoZeroPair,
  DPainleveGF,
  DPainleveGFConj,
  TauL01,
  TauL14,
};

const char* route_name(RouteId r);
std::optional<RouteId> parse_route(const std::string& s);
std::vector<RouteId> all_routes();
// Routes producing r_N and rbar_N (the tau routes only produce T_N).
bool route_has_reflections(RouteId r);

struct InitialValues {
  Complex r1, rbar1, w0;
};

// r1 = -w_{-1}/w_0, rbar1 = -w_1/w_0.
InitialValues initial_conditions(const WeightParams& p, const PrecisionContext& ctx);

struct RouteOptions {
  // Recompute an index from determinants when the recurrence divides by ~0.
  bool allow_splice = true;
  // Test hook: treat the step producing this index as a breakdown.
  int inject_breakdown = -1;
};

struct RouteResult {
  RouteId route = RouteId::TwoTwoA;
  int bits = 0;
  // r, rbar (reflection routes), T, kappa and l filled through n_max.
  CoefficientTable table;
  bool has_reflections = true;
  // Relative change of each entry between runs at bits and 2*bits.
  std::vector<Real> err_r, err_rbar, err_T;
  std::vector<int> spliced;           // indices taken from the determinant oracle
  std::vector<std::string> events;    // root choices, splices
  // dPV: (alpha_0..alpha_4) per step; the tau schemes store (q_N, p_N) in q, p.
  std::vector<std::array<Complex, 5>> dpv_alpha;
  std::vector<Complex> g, f, q, p;
  // Largest discrepancy between l_N/kappa_N from the running sum and from the closed form.
  Real l_health;
};

// Working precision used by the routes for a given N_max.
int route_bits(const PrecisionContext& ctx, int n_max);

RouteResult run_route(RouteId id, const WeightParams& p, int n_max, const PrecisionContext& ctx,
                      const RouteOptions& opt = {});

RouteResult run_two_two(const WeightParams& p, int n_max, const PrecisionContext& ctx, bool variant_b = false,
                        const RouteOptions& opt = {});
RouteResult run_two_one_pair(const WeightParams& p, int n_max, const PrecisionContext& ctx,
                             const RouteOptions& opt = {});
enum class OneOneVariant { Bilinear, Next };
RouteResult run_one_one(const WeightParams& p, int n_max, OneOneVariant v, const PrecisionContext& ctx,
                        const RouteOptions& opt = {});
RouteResult run_two_zero_pair(const WeightParams& p, int n_max, const PrecisionContext& ctx,
                              const RouteOptions& opt = {});
RouteResult run_dpv(const WeightParams& p, int n_max, bool conj, const PrecisionContext& ctx,
                    const RouteOptions& opt = {});
RouteResult run_tau_L01(const WeightParams& p, int n_max, const PrecisionContext& ctx);
RouteResult run_tau_L14(const WeightParams& p, int n_max, const PrecisionContext& ctx);

// T_0 = 1, T_1 = table.T[1]; T_{N+1} = T_N^2 (1 - r_N rbar_N) / T_{N-1}.
std::vector<Complex> tau_from_reflections(const CoefficientTable& table);

struct Subleading {
  Complex lk;      // l_N / kappa_N from the r-form
  Complex lk_alt;  // the same from the rbar-form
  Complex lbk;     // lbar_N / kappa_N from the partner relation
  Real lrecur_residual;
};
Subleading subleading_from_reflections(const WeightParams& p, const CoefficientTable& table, int n);

// Residuals of the relations the routes are built on, evaluated on a table (index n >= 1;
// entries up to n+1 are read). Used by tests and the route health checks.
struct RelationResiduals {
  Complex two_two_a, two_two_b, second_order, two_one, two_one_partner, two_zero, two_zero_partner,
      one_one_a, one_one_a_partner, one_one_b;
};
RelationResiduals relation_residuals(const WeightParams& p, const CoefficientTable& table, int n);

}  // namespace pvi
