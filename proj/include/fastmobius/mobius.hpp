#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fastmobius/lattice.hpp"

namespace fastmobius {

/// One stored entry of a sparse integer matrix.
struct Triplet {
    std::uint32_t row;
    std::uint32_t col;
    std::int8_t value;

    friend bool operator==(const Triplet&, const Triplet&) = default;
};

/// Closed-form Möbius function of the redundancy lattice.
///
/// Returns 0 unless a <= b. Otherwise let D = I(a*) \ I(b*), the difference
/// of the down-sets generated by the member complements; the result is
/// (-1)^|D| when D is an antichain of the powerset and 0 otherwise.
int mobius_fast(const Antichain& a, const Antichain& b);

/// Same formula on table indices, using the cached complement ideals.
int mobius_fast(const AntichainTable& table, std::size_t i, std::size_t j) noexcept;

namespace detail {
/// The ideal-difference formula without the order guard. Incomparable pairs
/// give meaningless values, e.g. -1 for ((1), (2)) at n = 2.
int mobius_formula_unguarded(std::uint64_t ideal_a, std::uint64_t ideal_b) noexcept;
}  // namespace detail

/// Möbius function by the defining recursion
///   mu(a,a) = 1,  mu(a,b) = -sum_{a <= z < b} mu(a,z),  0 when a is not <= b,
/// evaluated with antichain_leq only. Rows are memoized on first use, so a
/// single instance is not safe to share between threads. Meant as a
/// reference for n <= 4.
class RecursiveMobius {
public:
    explicit RecursiveMobius(const AntichainTable& table);

    int operator()(std::size_t i, std::size_t j);
    int operator()(const Antichain& a, const Antichain& b);

private:
    const std::vector<int>& row(std::size_t i);

    const AntichainTable& table_;
    std::vector<bool> leq_;
    std::vector<std::size_t> linear_extension_;
    std::vector<std::vector<int>> rows_;
    std::vector<bool> done_;
};

/// One-off recursive evaluation (builds the lattice for a.n()); n <= 4.
int mobius_recursive(const Antichain& a, const Antichain& b);

/// Nonzero Möbius values mu(alpha_row, alpha_col) over an antichain table.
/// Triplets are sorted by (row, col).
class SparseMobiusMatrix {
public:
    SparseMobiusMatrix(std::shared_ptr<const AntichainTable> table, std::vector<Triplet> triplets);

    int n() const noexcept { return table_->n(); }
    const AntichainTable& table() const noexcept { return *table_; }
    std::shared_ptr<const AntichainTable> shared_table() const noexcept { return table_; }
    std::span<const Triplet> triplets() const noexcept { return triplets_; }
    std::size_t dimension() const noexcept { return table_->size(); }
    std::size_t nonzeros() const noexcept { return triplets_.size(); }
    double density() const noexcept;

    friend bool operator==(const SparseMobiusMatrix& a, const SparseMobiusMatrix& b) {
        return a.table_->entries() == b.table_->entries() && a.triplets_ == b.triplets_;
    }

private:
    std::shared_ptr<const AntichainTable> table_;
    std::vector<Triplet> triplets_;
};

/// Builds all nonzero entries column by column (fixed b, scan a <= b).
/// `threads` = 0 picks std::thread::hardware_concurrency(). Output does not
/// depend on the thread count.
SparseMobiusMatrix build_mobius_matrix(std::shared_ptr<const AntichainTable> table, unsigned threads = 0);
SparseMobiusMatrix build_mobius_matrix(const AntichainTable& table, unsigned threads = 0);

/// atoms[b] = sum_{a <= b} mu(a, b) * redundancy[a], i.e. M^T v.
std::vector<double> pid_atoms(std::span<const double> redundancy, const SparseMobiusMatrix& m);

/// Forward (zeta) sum: redundancy[a] = sum_{b <= a} atoms[b]. Inverse of pid_atoms.
std::vector<double> cumulative_redundancy(std::span<const double> atoms, const AntichainTable& table);

/// The 2^n antichains S^U = { {1..n} \ x : x in U } used by the top-synergy
/// shortcut, paired with their coefficient (-1)^|U|. U = ∅ maps to the top.
std::vector<std::pair<Antichain, int>> top_synergy_terms(int n);

/// Top synergy atom from the 2^n redundancies of (n-1)-variable synergies:
///   sum_U (-1)^|U| I(S^U).
///
/// The sign is the one obtained by evaluating the closed-form Möbius function
/// at (S^U, top), where |I(S^U*) \ {∅}| = |U|. It differs from the commonly
/// quoted (-1)^(n-|U|) for odd n; the two agree for even n.
/// `redundancy` is keyed by antichain text in any group order, e.g. "(2)(1)".
/// Throws DataError naming any antichain missing from it.
double top_synergy_atom(int n, const std::map<std::string, double>& redundancy);

/// Sparse matrix over the double lattice R_n x R_n. Index (i, j) of a
/// source/target antichain pair is i * |table| + j.
class DoubleLatticeMatrix {
public:
    DoubleLatticeMatrix(std::shared_ptr<const AntichainTable> table, std::vector<Triplet> triplets);

    const AntichainTable& table() const noexcept { return *table_; }
    std::size_t factor_dimension() const noexcept { return table_->size(); }
    std::size_t dimension() const noexcept { return table_->size() * table_->size(); }
    std::span<const Triplet> triplets() const noexcept { return triplets_; }
    std::size_t nonzeros() const noexcept { return triplets_.size(); }

private:
    std::shared_ptr<const AntichainTable> table_;
    std::vector<Triplet> triplets_;
};

/// Kronecker product M (x) M: entry ((i,j),(k,l)) = mu(a_i, a_k) * mu(b_j, b_l).
/// Throws CapacityError for n = 5, where the product would hold roughly
/// 8e10 entries.
DoubleLatticeMatrix phiid_mobius(const SparseMobiusMatrix& m);

/// Double-lattice atoms (M (x) M)^T v. They sum to v[top -> top].
std::vector<double> phiid_atoms(std::span<const double> redundancy, const DoubleLatticeMatrix& mm);

}  // namespace fastmobius
