#include "qbreak/basis.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace qbreak {

namespace {

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    if (__builtin_add_overflow(a, b, &r) || r > (1ull << 63))
        throw ResourceError("basis dimension overflows the 64-bit count type");
    return r;
}

// count[m][r] = number of vectors of length m with entries in [0, C] and sum r.
std::vector<std::vector<std::uint64_t>> build_count_tables(const ModelParams& p) {
    const int cap = std::min(p.C, p.N);
    const int smax = p.N; // species sum never exceeds N
    std::vector<std::vector<std::uint64_t>> count(p.Q + 1);
    count[0].assign(smax + 1, 0);
    count[0][0] = 1;
    for (int m = 1; m <= p.Q; ++m) {
        count[m].assign(smax + 1, 0);
        for (int r = 0; r <= smax; ++r) {
            std::uint64_t acc = 0;
            for (int v = 0; v <= std::min(cap, r); ++v)
                acc = checked_add(acc, count[m - 1][r - v]);
            count[m][r] = acc;
        }
    }
    return count;
}

} // namespace

std::uint64_t Basis::dimension(const ModelParams& params) {
    params.validate();
    auto count = build_count_tables(params);
    std::uint64_t dim = 0;
    for (int s = 0; s <= params.N; ++s) dim = checked_add(dim, count[params.Q][s]);
    return dim;
}

Basis Basis::build(const ModelParams& params, std::uint64_t memory_budget_bytes) {
    params.validate();
    Basis b;
    b.params_ = params;
    b.count_ = build_count_tables(params);
    b.block_offset_.assign(params.N + 2, 0);
    for (int s = 0; s <= params.N; ++s)
        b.block_offset_[s + 1] = checked_add(b.block_offset_[s], b.count_[params.Q][s]);
    b.dim_ = b.block_offset_[params.N + 1];

    const std::uint64_t bytes = b.dim_ * static_cast<std::uint64_t>(params.Q) * sizeof(std::uint16_t);
    if (bytes > memory_budget_bytes)
        throw ResourceError("basis table of " + std::to_string(bytes) +
                            " bytes exceeds the memory budget of " +
                            std::to_string(memory_budget_bytes) + " bytes");

    b.table_.resize(bytes / sizeof(std::uint16_t));

    // Enumerate in canonical order: species sum ascending (n_0 descending),
    // then lexicographically descending on (n_1, ..., n_Q).
    const int cap = std::min(params.C, params.N);
    std::vector<int> occ(params.Q, 0);
    std::uint64_t row = 0;
    auto emit = [&] {
        std::uint16_t* dst = b.table_.data() + row * params.Q;
        for (int j = 0; j < params.Q; ++j) dst[j] = static_cast<std::uint16_t>(occ[j]);
        ++row;
    };
    auto recurse = [&](auto&& self, int j, int rem) -> void {
        if (j == params.Q - 1) {
            if (rem <= cap) {
                occ[j] = rem;
                emit();
            }
            return;
        }
        for (int v = std::min(cap, rem); v >= 0; --v) {
            occ[j] = v;
            self(self, j + 1, rem - v);
        }
    };
    for (int s = 0; s <= params.N; ++s) recurse(recurse, 0, s);
    return b;
}

FockState Basis::unrank(std::uint64_t i) const {
    if (i >= dim_) throw DomainError("unrank: index out of range");
    FockState occ(params_.Q + 1);
    const std::uint16_t* sp = species_row(i);
    int sum = 0;
    for (int j = 0; j < params_.Q; ++j) {
        occ[j + 1] = sp[j];
        sum += sp[j];
    }
    occ[0] = params_.N - sum;
    return occ;
}

int Basis::n0(std::uint64_t i) const {
    const std::uint16_t* sp = species_row(i);
    int sum = 0;
    for (int j = 0; j < params_.Q; ++j) sum += sp[j];
    return params_.N - sum;
}

std::uint64_t Basis::rank_species(const int* species) const {
    const int cap = std::min(params_.C, params_.N);
    int s = 0;
    for (int j = 0; j < params_.Q; ++j) s += species[j];
    std::uint64_t r = block_offset_[s];
    int rem = s;
    for (int j = 0; j < params_.Q - 1; ++j) {
        const auto& tail = count_[params_.Q - 1 - j];
        for (int v = std::min(cap, rem); v > species[j]; --v) r += tail[rem - v];
        rem -= species[j];
    }
    return r;
}

std::uint64_t Basis::rank(std::span<const int> occupations) const {
    if (static_cast<int>(occupations.size()) != params_.Q + 1)
        throw DomainError("rank: occupation vector has wrong length");
    int sum = 0;
    for (int v : occupations) {
        if (v < 0) throw DomainError("rank: negative occupation");
        sum += v;
    }
    if (sum != params_.N) throw DomainError("rank: total particle number mismatch");
    for (int j = 1; j <= params_.Q; ++j)
        if (occupations[j] > params_.C) throw DomainError("rank: species occupation exceeds capacity");
    return rank_species(occupations.data() + 1);
}

FockState initial_fock_state(const ModelParams& params) {
    FockState s(params.Q + 1, 0);
    s[0] = params.N;
    return s;
}

} // namespace qbreak
