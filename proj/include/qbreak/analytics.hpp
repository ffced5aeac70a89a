#pragma once

#include <complex>
#include <optional>
#include <string>

#include "qbreak/params.hpp"

namespace qbreak {

/// Single-mode / per-mode squeezing coefficients; only defined below
/// criticality (lambda < 1 for the species model, lambda < k^2 for momentum
/// mode k of the periodic model). u2 - v2 = 1 analytically.
struct BogoliubovCoeffs {
    double u2 = 1.0;
    double v2 = 0.0;
};

enum class Regime { Undercritical, Critical, OvercriticalFew, OvercriticalMany, Unknown };

std::string to_string(Regime r);

/// Heuristic classification of one parameter point with its estimated
/// break-time. All numbers are order-of-magnitude estimates, not bounds.
struct RegimeReport {
    Regime regime = Regime::Unknown;
    std::optional<double> t_q_estimate; ///< empty where no formula applies
    std::string formula_used;
    double rate = 0.0;          ///< initial depletion rate Gamma
    double q_boundary = 0.0;    ///< 16 N (lambda-1)^2 / lambda^3 (0 if lambda <= 1)
    bool near_boundary = false; ///< Q within a factor 2 of q_boundary
    bool fictitious = false;    ///< depletion capacity cannot reach ~N
};

/// Mode frequency sqrt(k^2 (k^2 - lambda)): real below criticality of mode k,
/// purely imaginary i |k| sqrt(lambda - k^2) above it, 0 at the boundary.
std::complex<double> dispersion_ppm(int k, double lambda);

/// Coefficients for momentum mode k of the periodic model (lambda < k^2).
BogoliubovCoeffs bogoliubov_coeffs_ppm(double lambda, int k);

/// Single-mode form of the species model (lambda < 1).
BogoliubovCoeffs bogoliubov_coeffs(double lambda);

/// Ground-state depletion of the periodic model: partial sum of |v_k|^2 over
/// 1 <= |k| <= kmax. Requires 0 <= lambda < 1.
double depletion_ppm_sum(double lambda, int kmax);

/// Depletion with backreaction: the root N_d in [0, N) of the self-consistent
/// equation (per-species factor Q/2 for the species model, 1 for the
/// three-mode periodic truncation), found by bisection to ~1e-12 residual.
double depletion_backreaction(double lambda, int N, int Q, ModelKind model);

/// Leading critical depletion Q^(2/3) N^(1/3) / 2^(4/3); relative error
/// O(N^(-2/9)).
double depletion_critical(int N, int Q);

RegimeReport rate_and_heuristic_breaktime(const ModelParams& params);

/// Maximal departures from the initial state above criticality: the
/// backreaction turning point N (lambda-1)/lambda and the perturbative
/// estimate sqrt(Q N lambda)/4. Requires lambda > 1.
struct InstabilityExtent {
    double deltaN_inst = 0.0;
    double deltaN_pert = 0.0;
};
InstabilityExtent instability_extent(double lambda, int N, int Q);

/// Complete elliptic integrals of the first and second kind as functions of
/// the parameter m (not the modulus), by arithmetic-geometric mean, to 1e-14.
double elliptic_K(double m);
double elliptic_E(double m);

/// The soliton-branch parameter: the unique m in [0, 1) with
/// K(m) E(m) = (pi/2)^2 lambda. Requires lambda >= 1; residual < 1e-12.
double elliptic_m(double lambda);

/// Order-of-magnitude admissibility bounds on |C_m|. Values are the "<~"
/// right-hand sides of the admissibility conditions taken as equalities;
/// no safety factor.
struct CmBounds {
    double expectation = 0.0;             ///< (1 - lambda)/2, any lambda
    std::optional<double> gapless;        ///< needs deltaN and N, lambda < 1
    std::optional<double> final_bound;    ///< piecewise in lambda, needs lambda < 1
    std::string final_branch;             ///< which piece produced final_bound
    bool order_of_magnitude = true;
};
CmBounds cm_bounds(double lambda, double alpha, std::optional<int> deltaN = {},
                   std::optional<int> N = {});

} // namespace qbreak
