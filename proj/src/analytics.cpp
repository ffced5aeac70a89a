#include "qbreak/analytics.hpp"

#include <cmath>

namespace qbreak {

namespace {
constexpr double pi = 3.141592653589793238462643383279502884;
}

std::string to_string(Regime r) {
    switch (r) {
        case Regime::Undercritical: return "undercritical";
        case Regime::Critical: return "critical";
        case Regime::OvercriticalFew: return "overcritical-few";
        case Regime::OvercriticalMany: return "overcritical-many";
        default: return "unknown";
    }
}

std::complex<double> dispersion_ppm(int k, double lambda) {
    if (k == 0) throw DomainError("dispersion_ppm: k must be nonzero");
    const double k2 = static_cast<double>(k) * k;
    const double w2 = k2 * (k2 - lambda);
    if (w2 >= 0.0) return {std::sqrt(w2), 0.0};
    return {0.0, std::sqrt(-w2)};
}

BogoliubovCoeffs bogoliubov_coeffs_ppm(double lambda, int k) {
    if (k == 0) throw DomainError("bogoliubov_coeffs_ppm: k must be nonzero");
    const double k2 = static_cast<double>(k) * k;
    if (!(lambda < k2))
        throw DomainError("bogoliubov_coeffs: only exists in the undercritical case");
    const double eps = std::sqrt(k2 * (k2 - lambda));
    const double r = (k2 - 0.5 * lambda) / eps;
    return {0.5 * (r + 1.0), 0.5 * (r - 1.0)};
}

BogoliubovCoeffs bogoliubov_coeffs(double lambda) {
    if (!(lambda < 1.0))
        throw DomainError("bogoliubov_coeffs: only exists in the undercritical case");
    const double r = (1.0 - 0.5 * lambda) / std::sqrt(1.0 - lambda);
    return {0.5 * (r + 1.0), 0.5 * (r - 1.0)};
}

double depletion_ppm_sum(double lambda, int kmax) {
    if (!(lambda >= 0.0 && lambda < 1.0))
        throw DomainError("depletion_ppm_sum: requires 0 <= lambda < 1");
    if (kmax < 1) throw DomainError("depletion_ppm_sum: kmax must be >= 1");
    if (lambda == 0.0) return 0.0;
    double s = 0.0;
    for (int k = kmax; k >= 1; --k) { // small terms first
        const double k2 = static_cast<double>(k) * k;
        s += (k2 - 0.5 * lambda) / std::sqrt(k2 * (k2 - lambda)) - 1.0;
    }
    return s; // factor 2 for +-k cancels the 1/2 of |v_k|^2
}

namespace {

// Right-hand side of the self-consistent depletion equation as a function of
// the trial depletion x; prefactor Q/2 (species) or 1 (periodic truncation).
double depletion_rhs(double x, double lambda, double N, double pref) {
    const double c = 1.0 - x / N;
    const double g = 1.0 - lambda * c;
    return pref * ((1.0 - 0.5 * lambda * c) / std::sqrt(g) - 1.0);
}

} // namespace

double depletion_backreaction(double lambda, int N, int Q, ModelKind model) {
    if (!(lambda > 0.0)) {
        if (lambda == 0.0) return 0.0;
        throw DomainError("depletion_backreaction: lambda must be >= 0");
    }
    if (N < 1 || Q < 1) throw DomainError("depletion_backreaction: N, Q must be >= 1");
    const double pref = model == ModelKind::Npm ? 0.5 * Q : 1.0;
    const double n = N;
    const double eps = 1e-12;
    // The square root requires 1 - lambda (1 - x/N) > 0.
    double lo = lambda > 1.0 ? n * (1.0 - 1.0 / lambda) * (1.0 + eps) : 0.0;
    double hi = n * (1.0 - eps);
    auto h = [&](double x) { return x - depletion_rhs(x, lambda, n, pref); };
    if (h(hi) < 0.0)
        throw DomainError("depletion_backreaction: no root below N (depletion saturates)");
    // h < 0 at the lower end: rhs diverges (lambda >= 1) or equals the
    // unbackreacted depletion (lambda < 1). If not, 0 is the root.
    if (h(lo) >= 0.0) return lo;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (h(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double depletion_critical(int N, int Q) {
    if (N < 1 || Q < 1) throw DomainError("depletion_critical: N, Q must be >= 1");
    return std::pow(static_cast<double>(Q), 2.0 / 3.0) * std::cbrt(static_cast<double>(N)) /
           std::pow(2.0, 4.0 / 3.0);
}

RegimeReport rate_and_heuristic_breaktime(const ModelParams& params) {
    params.validate();
    const double lambda = params.lambda();
    const double N = params.N;
    const double Q = params.Q;

    RegimeReport rep;
    if (lambda < 1.0) {
        rep.regime = Regime::Undercritical;
        rep.rate = Q * lambda * lambda;
        rep.t_q_estimate = N / rep.rate;
        rep.formula_used = "N/(Q lambda^2)";
        // The estimate is fictitious when the system cannot deplete O(N)
        // particles: neither the capacity Q*C nor the analytic depletion
        // reaches that scale.
        double nd = 0.0;
        try {
            nd = depletion_backreaction(lambda, params.N, params.Q, ModelKind::Npm);
        } catch (const DomainError&) {
            nd = N; // saturated: depletion does reach ~N
        }
        rep.fictitious =
            static_cast<double>(Q) * params.C < 0.5 * N || nd < 0.5 * N;
        return rep;
    }
    if (lambda == 1.0) {
        rep.regime = Regime::Critical;
        rep.rate = Q;
        rep.t_q_estimate = std::sqrt(N);
        rep.formula_used = "~sqrt(N), unknown prefactor";
        return rep;
    }
    rep.q_boundary = 16.0 * N * (lambda - 1.0) * (lambda - 1.0) / (lambda * lambda * lambda);
    rep.rate = Q * lambda * lambda;
    rep.near_boundary = Q >= 0.5 * rep.q_boundary && Q <= 2.0 * rep.q_boundary;
    if (rep.near_boundary) {
        rep.regime = Regime::Unknown;
        rep.formula_used = "near boundary, no formula asserted";
    } else if (Q < rep.q_boundary) {
        rep.regime = Regime::OvercriticalFew;
        rep.t_q_estimate = std::log(N) / (Q * std::sqrt(lambda - 1.0));
        rep.formula_used = "ln N/(Q sqrt(lambda-1))";
    } else {
        rep.regime = Regime::OvercriticalMany;
        rep.formula_used = "unknown (open regime)";
    }
    return rep;
}

InstabilityExtent instability_extent(double lambda, int N, int Q) {
    if (!(lambda > 1.0)) throw DomainError("instability_extent: requires lambda > 1");
    if (N < 1 || Q < 1) throw DomainError("instability_extent: N, Q must be >= 1");
    InstabilityExtent e;
    e.deltaN_inst = static_cast<double>(N) * (lambda - 1.0) / lambda;
    e.deltaN_pert = std::sqrt(static_cast<double>(Q) * N * lambda) / 4.0;
    return e;
}

namespace {

// Arithmetic-geometric mean evaluation of K(m) and E(m); both to ~1e-15.
struct KE {
    double K, E;
};

KE elliptic_KE(double m) {
    if (!(m >= 0.0 && m < 1.0)) throw DomainError("elliptic: requires 0 <= m < 1");
    double a = 1.0, b = std::sqrt(1.0 - m), c = std::sqrt(m);
    double csum = 0.5 * c * c; // 2^(n-1) c_n^2, n = 0 term
    double p = 1.0;
    for (int i = 0; i < 60 && c > 1e-17 * a; ++i) {
        const double an = 0.5 * (a + b);
        const double bn = std::sqrt(a * b);
        c = 0.5 * (a - b);
        a = an;
        b = bn;
        p *= 2.0;
        csum += 0.5 * p * c * c;
    }
    KE r;
    r.K = 0.5 * pi / a;
    r.E = r.K * (1.0 - csum);
    return r;
}

} // namespace

double elliptic_K(double m) { return elliptic_KE(m).K; }
double elliptic_E(double m) { return elliptic_KE(m).E; }

double elliptic_m(double lambda) {
    if (!(lambda >= 1.0)) throw DomainError("elliptic_m: the soliton only exists for lambda >= 1");
    const double target = 0.25 * pi * pi * lambda;
    auto g = [&](double m) {
        const KE ke = elliptic_KE(m);
        return ke.K * ke.E - target;
    };
    if (lambda == 1.0) return 0.0;
    double lo = 0.0, hi = 1.0 - 1e-16;
    // K E is strictly increasing in m and diverges as m -> 1.
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

CmBounds cm_bounds(double lambda, double alpha, std::optional<int> deltaN,
                   std::optional<int> N) {
    CmBounds b;
    b.expectation = 0.5 * (1.0 - lambda);
    if (deltaN && N) {
        if (!(lambda < 1.0))
            throw DomainError("cm_bounds: gapless bound requires lambda < 1");
        if (*deltaN < 1 || *N < 1) throw DomainError("cm_bounds: deltaN, N must be >= 1");
        const double frac = static_cast<double>(*deltaN) / *N;
        b.gapless = (1.0 - lambda * (1.0 - frac)) / std::sqrt(static_cast<double>(*deltaN));
    }
    if (lambda < 1.0 && alpha > 0.0) {
        if (lambda <= 2.0 / 3.0) {
            b.final_bound = std::sqrt(3.0 * alpha) * (1.0 - 0.5 * lambda);
            b.final_branch = "sqrt(3 alpha) (1 - lambda/2)";
        } else {
            b.final_bound = 2.0 * std::sqrt(alpha * (1.0 - lambda));
            b.final_branch = "2 sqrt(alpha (1 - lambda))";
        }
    }
    return b;
}

} // namespace qbreak
