#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "qbreak/basis.hpp"

namespace qbreak {

/// Real symmetric sparse matrix in CSR form with both triangles stored,
/// acting on complex amplitude vectors. Immutable once assembled.
struct SparseHamiltonian {
    std::uint64_t dim = 0;
    std::vector<std::uint64_t> row_ptr; // dim + 1
    std::vector<std::uint32_t> col;
    std::vector<double> val;

    std::uint64_t nnz() const { return col.size(); }

    /// y = H x
    void matvec(const std::complex<double>* x, std::complex<double>* y) const;

    /// Row-sum (infinity) norm; cheap upper bound on the spectral norm.
    double inf_norm() const;

    /// Largest |H(i,j) - H(j,i)| over stored entries (0 for a correct assembly).
    double symmetry_defect() const;

    /// Text coordinate dump: "row col value" per line, 1-based indices,
    /// 17 significant digits.
    void dump_coordinate(std::ostream& os) const;
};

/// Deterministic pseudo-random inter-species coupling with |f| in [0.5, 1].
double f_coupling(int k, int l);

/// Hamiltonian of the species model over the given basis: per species k a
/// pair-exchange coupling to the condensate mode, plus the C_m-weighted
/// pair hopping between species. Hops beyond the capacity C are dropped.
SparseHamiltonian build_npm(const ModelParams& params, const Basis& basis);

/// Three-mode truncation of the periodic model. The basis must have Q = 2;
/// species 1 is the momentum -1 mode and species 2 the momentum +1 mode.
/// The quartic momentum-conserving sum is expanded literally term by term.
SparseHamiltonian build_ppm3(const ModelParams& params, const Basis& basis);

/// Upper estimate of stored entries per row, for pre-flight memory checks.
double estimate_nnz_per_row(const ModelParams& params, ModelKind kind);

} // namespace qbreak
