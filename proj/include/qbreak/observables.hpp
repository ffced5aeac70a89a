#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "qbreak/krylov.hpp"

namespace qbreak {

/// Mode-occupation expectation values on a uniform time grid.
struct OccupationTrace {
    ModelParams params;
    double t_step = 0.0;
    double tol = 0.0; ///< error budget of the propagation that produced it
    std::vector<double> times;
    std::vector<std::vector<double>> n_mean; ///< n_mean[k][i] = <n_k>(times[i]), k = 0..Q

    std::size_t samples() const { return times.size(); }

    /// CSV with header time,n0,...,nQ; 12 significant digits.
    void write_csv(std::ostream& os) const;
    static OccupationTrace read_csv(std::istream& is);
};

struct BreaktimeResult {
    double r_min = 1.0;
    double b_th = 0.0;
    std::optional<double> t_q; ///< empty: the threshold was never crossed
};

/// <n_k> of a state over the basis. Diagonal observable: sum of |psi_s|^2 n_k(s).
double expectation_nk(const QuantumState& state, const Basis& basis, int k);

/// Minimal relative condensate occupation min_t <n_0>(t)/N over the sampled
/// grid; no interpolation.
double r_min(const OccupationTrace& trace);

/// Scan-wide threshold b_th = 1 - (1 - max_X r_min(X)) * 0.8. A trace that
/// never depletes (r_min = 1) leaves the threshold undefined.
double threshold(const std::vector<OccupationTrace>& scan);

/// First sampled time with n_0/N < b_th, or empty if never crossed.
std::optional<double> detect(const OccupationTrace& trace, double b_th);

/// Evolve from the homogeneous initial state and record all <n_k>.
/// Closure is checked: every sample must satisfy |sum_k <n_k> - N| <= 10 tol.
OccupationTrace record_trace(const SparseHamiltonian& h, const Basis& basis,
                             const PropagationConfig& config);

} // namespace qbreak
