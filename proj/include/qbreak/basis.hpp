#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qbreak/params.hpp"

namespace qbreak {

/// One Fock basis element: occupations (n_0, n_1, ..., n_Q).
/// Entry 0 is the condensate mode; it carries no capacity cap.
using FockState = std::vector<int>;

/// Number-conserving Fock basis with a per-mode occupation cap C on the
/// species modes. States are ordered lexicographically descending on
/// (n_0, n_1, ..., n_Q), so the condensate state (N, 0, ..., 0) has rank 0.
///
/// Ranking is table based: the DP counting tables used for dimension() also
/// give an O(Q*C) combinatorial rank, so no per-state hash index is needed.
/// A Basis is immutable after construction and safe to share across threads.
class Basis {
public:
    /// Basis dimension computed by dynamic programming, without enumeration.
    /// Throws ResourceError if the count overflows 64 bits.
    static std::uint64_t dimension(const ModelParams& params);

    /// Enumerate the basis. Throws ResourceError if the state table would
    /// exceed memory_budget_bytes.
    static Basis build(const ModelParams& params,
                       std::uint64_t memory_budget_bytes = default_memory_budget);

    static constexpr std::uint64_t default_memory_budget = 3ull << 30;

    std::uint64_t size() const { return dim_; }
    const ModelParams& params() const { return params_; }
    int modes() const { return params_.Q + 1; }

    /// Full occupation vector (n_0, ..., n_Q) of the state with rank i.
    FockState unrank(std::uint64_t i) const;

    /// Rank of a full occupation vector; throws DomainError if the state is
    /// not a member of this basis.
    std::uint64_t rank(std::span<const int> occupations) const;

    /// Species part (n_1..n_Q) of row i, without bounds checks. For hot loops.
    const std::uint16_t* species_row(std::uint64_t i) const {
        return table_.data() + i * params_.Q;
    }

    /// Rank from a species occupation vector of length Q (entries already
    /// known to be valid). For hot loops.
    std::uint64_t rank_species(const int* species) const;

    /// Condensate occupation of row i.
    int n0(std::uint64_t i) const;

private:
    Basis() = default;

    ModelParams params_;
    std::uint64_t dim_ = 0;
    std::vector<std::uint16_t> table_;               // dim x Q species occupations
    std::vector<std::vector<std::uint64_t>> count_;  // count_[m][r]: vectors of length m, entries <= C, sum r
    std::vector<std::uint64_t> block_offset_;        // first rank of the species-sum-s block
};

/// The homogeneous initial state |N, 0, ..., 0> as an occupation vector.
FockState initial_fock_state(const ModelParams& params);

} // namespace qbreak
