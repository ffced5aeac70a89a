#include "qbreak/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace qbreak {

void SparseHamiltonian::matvec(const std::complex<double>* x, std::complex<double>* y) const {
    const std::int64_t n = static_cast<std::int64_t>(dim);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        std::complex<double> acc(0.0, 0.0);
        for (std::uint64_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) acc += val[p] * x[col[p]];
        y[i] = acc;
    }
}

double SparseHamiltonian::inf_norm() const {
    double best = 0.0;
    for (std::uint64_t i = 0; i < dim; ++i) {
        double row = 0.0;
        for (std::uint64_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) row += std::abs(val[p]);
        best = std::max(best, row);
    }
    return best;
}

double SparseHamiltonian::symmetry_defect() const {
    double worst = 0.0;
    for (std::uint64_t i = 0; i < dim; ++i) {
        for (std::uint64_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
            const std::uint32_t j = col[p];
            // binary search the transposed entry in row j
            const auto b = col.begin() + row_ptr[j];
            const auto e = col.begin() + row_ptr[j + 1];
            auto it = std::lower_bound(b, e, static_cast<std::uint32_t>(i));
            const double vt = (it != e && *it == i) ? val[it - col.begin()] : 0.0;
            worst = std::max(worst, std::abs(val[p] - vt));
        }
    }
    return worst;
}

void SparseHamiltonian::dump_coordinate(std::ostream& os) const {
    os.precision(17);
    for (std::uint64_t i = 0; i < dim; ++i)
        for (std::uint64_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p)
            os << (i + 1) << ' ' << (col[p] + 1) << ' ' << val[p] << '\n';
}

double f_coupling(int k, int l) {
    const double x = std::sqrt(2.0) * std::pow(static_cast<double>(k - 1), 3) +
                     std::sqrt(7.0) * std::pow(static_cast<double>(l - 1), 5);
    const double F = x - std::floor(x);
    return F < 0.5 ? F - 1.0 : F;
}

namespace {

// (column, value) scratch entries of one row, merged before committing.
struct RowBuilder {
    std::vector<std::pair<std::uint32_t, double>> entries;

    void add(std::uint64_t col, double v) {
        if (v != 0.0) entries.emplace_back(static_cast<std::uint32_t>(col), v);
    }

    void commit(SparseHamiltonian& h) {
        std::sort(entries.begin(), entries.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t i = 0; i < entries.size();) {
            double v = entries[i].second;
            std::size_t j = i + 1;
            while (j < entries.size() && entries[j].first == entries[i].first) v += entries[j++].second;
            if (v != 0.0) {
                h.col.push_back(entries[i].first);
                h.val.push_back(v);
            }
            i = j;
        }
        h.row_ptr.push_back(h.col.size());
        entries.clear();
    }
};

double hop_amp(long long a, long long b, long long c, long long d) {
    return std::sqrt(static_cast<double>(a * b * c * d));
}

} // namespace

SparseHamiltonian build_npm(const ModelParams& params, const Basis& basis) {
    params.validate();
    if (basis.params().N != params.N || basis.params().Q != params.Q || basis.params().C != params.C)
        throw DomainError("build_npm: basis was built from different parameters");
    if (basis.size() > std::numeric_limits<std::uint32_t>::max())
        throw ResourceError("build_npm: dimension exceeds 32-bit column index range");

    const int Q = params.Q;
    const int C = params.C;
    const double a4 = params.alpha / 4.0;

    // Pairwise couplings (C_m/2) f(k,l), k < l, in species indices 1..Q.
    std::vector<double> fkl(static_cast<std::size_t>(Q) * Q, 0.0);
    for (int k = 1; k <= Q; ++k)
        for (int l = k + 1; l <= Q; ++l)
            fkl[(k - 1) * Q + (l - 1)] = 0.5 * params.Cm * f_coupling(k, l);

    SparseHamiltonian h;
    h.dim = basis.size();
    h.row_ptr.reserve(h.dim + 1);
    h.row_ptr.push_back(0);

    RowBuilder row;
    std::vector<int> target(Q);
    for (std::uint64_t i = 0; i < h.dim; ++i) {
        const std::uint16_t* sp = basis.species_row(i);
        int stot = 0;
        for (int j = 0; j < Q; ++j) stot += sp[j];
        const int n0 = params.N - stot;

        double diag = 0.0;
        for (int j = 0; j < Q; ++j)
            diag += sp[j] - 0.5 * params.alpha * static_cast<double>(n0) * sp[j];
        row.add(i, diag);

        if (params.alpha != 0.0) {
            for (int j = 0; j < Q; ++j) {
                const int nk = sp[j];
                // a0^+2 ak^2: two particles return to the condensate
                if (nk >= 2) {
                    for (int t = 0; t < Q; ++t) target[t] = sp[t];
                    target[j] = nk - 2;
                    row.add(basis.rank_species(target.data()),
                            -a4 * hop_amp(n0 + 1, n0 + 2, nk, nk - 1));
                }
                // ak^+2 a0^2: two particles leave the condensate
                if (n0 >= 2 && nk + 2 <= C) {
                    for (int t = 0; t < Q; ++t) target[t] = sp[t];
                    target[j] = nk + 2;
                    row.add(basis.rank_species(target.data()),
                            -a4 * hop_amp(n0, n0 - 1, nk + 1, nk + 2));
                }
            }
        }

        if (params.Cm != 0.0) {
            for (int k = 0; k < Q; ++k) {
                for (int l = 0; l < Q; ++l) {
                    if (k == l) continue;
                    // ak^+2 al^2 with coupling of the ordered pair
                    const double g = k < l ? fkl[k * Q + l] : fkl[l * Q + k];
                    const int nk = sp[k], nl = sp[l];
                    if (nl < 2 || nk + 2 > C) continue;
                    for (int t = 0; t < Q; ++t) target[t] = sp[t];
                    target[k] = nk + 2;
                    target[l] = nl - 2;
                    row.add(basis.rank_species(target.data()),
                            g * hop_amp(nk + 1, nk + 2, nl, nl - 1));
                }
            }
        }

        row.commit(h);
    }
    return h;
}

SparseHamiltonian build_ppm3(const ModelParams& params, const Basis& basis) {
    params.validate();
    if (params.Q != 2 || basis.params().Q != 2)
        throw DomainError("build_ppm3: the three-mode model needs a basis with Q = 2");
    if (basis.params().N != params.N || basis.params().C != params.C)
        throw DomainError("build_ppm3: basis was built from different parameters");
    if (basis.size() > std::numeric_limits<std::uint32_t>::max())
        throw ResourceError("build_ppm3: dimension exceeds 32-bit column index range");

    const int C = params.C;
    const double a4 = params.alpha / 4.0;

    // Modes -1, 0, +1 map to occupation slots 1, 0, 2 (species 1, condensate,
    // species 2 of the shared basis layout).
    auto slot = [](int mode) { return mode == 0 ? 0 : (mode == -1 ? 1 : 2); };

    SparseHamiltonian h;
    h.dim = basis.size();
    h.row_ptr.reserve(h.dim + 1);
    h.row_ptr.push_back(0);

    RowBuilder row;
    int occ[3];
    int species[2];
    for (std::uint64_t i = 0; i < h.dim; ++i) {
        const std::uint16_t* sp = basis.species_row(i);
        occ[1] = sp[0];
        occ[2] = sp[1];
        occ[0] = params.N - occ[1] - occ[2];

        row.add(i, static_cast<double>(occ[1] + occ[2])); // kinetic n_-1 + n_+1

        if (params.alpha != 0.0) {
            for (int k = -1; k <= 1; ++k) {
                for (int l = -1; l <= 1; ++l) {
                    const int mlo = std::max(-k - 1, l - 1);
                    const int mhi = std::min(-k + 1, l + 1);
                    for (int m = mlo; m <= mhi; ++m) {
                        // a_k^+ a_l^+ a_{m+k} a_{l-m}
                        const int p = slot(m + k), q = slot(l - m);
                        const int ck = slot(k), cl = slot(l);
                        int t[3] = {occ[0], occ[1], occ[2]};
                        double amp = 1.0;
                        if (t[q] < 1) continue;
                        amp *= t[q]--; // sqrt factors squared below
                        if (t[p] < 1) continue;
                        amp *= t[p]--;
                        amp *= ++t[cl];
                        amp *= ++t[ck];
                        if (t[1] > C || t[2] > C) continue; // capacity truncation
                        species[0] = t[1];
                        species[1] = t[2];
                        row.add(basis.rank_species(species), -a4 * std::sqrt(amp));
                    }
                }
            }
        }

        row.commit(h);
    }
    return h;
}

double estimate_nnz_per_row(const ModelParams& params, ModelKind kind) {
    if (kind == ModelKind::Ppm3) return 1.0 + 13.0; // kinetic diag + quartic targets
    double n = 1.0 + 2.0 * params.Q;
    if (params.Cm != 0.0) n += static_cast<double>(params.Q) * (params.Q - 1);
    return n;
}

} // namespace qbreak
