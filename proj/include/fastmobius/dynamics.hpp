#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fastmobius/lattice.hpp"
#include "fastmobius/mobius.hpp"

namespace fastmobius {

/// k parallel channels of symbols in [0, alphabet), stored time-major.
class SymbolicSequence {
public:
    SymbolicSequence(int channels, int alphabet, std::vector<std::uint16_t> data);
    /// One row per time step. `alphabet` = 0 infers max(2, largest symbol + 1).
    static SymbolicSequence from_rows(const std::vector<std::vector<int>>& rows, int alphabet = 0);

    int channels() const noexcept { return channels_; }
    int alphabet() const noexcept { return alphabet_; }
    std::size_t length() const noexcept { return data_.size() / static_cast<std::size_t>(channels_); }
    std::span<const std::uint16_t> state(std::size_t t) const {
        return {data_.data() + t * static_cast<std::size_t>(channels_), static_cast<std::size_t>(channels_)};
    }
    std::span<const std::uint16_t> data() const noexcept { return data_; }

    friend bool operator==(const SymbolicSequence&, const SymbolicSequence&) = default;

private:
    int channels_;
    int alphabet_;
    std::vector<std::uint16_t> data_;
};

/// Drops every time step whose full state equals the previous one.
SymbolicSequence dedupe_consecutive(const SymbolicSequence& seq);

/// Sparse counts of consecutive (state_t, state_t+1) pairs. Sources are the
/// channels at t, targets the channels at t+1.
class TransitionModel {
public:
    struct Entry {
        std::uint64_t from;  ///< base-alphabet packed state, channel 1 least significant
        std::uint64_t to;
        std::uint64_t count;
    };

    TransitionModel(int channels, int alphabet, std::vector<Entry> entries);

    int channels() const noexcept { return channels_; }
    int alphabet() const noexcept { return alphabet_; }
    /// Sorted by (from, to), counts >= 1.
    std::span<const Entry> entries() const noexcept { return entries_; }
    std::uint64_t total() const noexcept { return total_; }

    double probability(std::span<const int> from, std::span<const int> to) const;

    /// I(X_a; Y_b) with a over channels at t and b over channels at t+1
    /// (bit c-1 selects channel c), by sparse aggregation.
    double mutual_information(std::uint32_t source_mask, std::uint32_t target_mask) const;

    /// Same quantity without any caching or entropy shortcuts; used as a
    /// direct check of the atom-sum identity.
    double direct_mutual_information(std::uint32_t source_mask, std::uint32_t target_mask) const;

private:
    double entropy(std::uint32_t joint_mask) const;

    int channels_;
    int alphabet_;
    std::vector<Entry> entries_;
    std::uint64_t total_ = 0;
};

/// Empirical transition pmf; needs at least two time steps.
TransitionModel transition_distribution(const SymbolicSequence& seq);

enum class AtomCategory : std::uint8_t { BottomUp, TopDown, Storage, Transfer, Copy, Erasure };
inline constexpr std::array<AtomCategory, 6> kAllCategories = {
    AtomCategory::BottomUp, AtomCategory::TopDown, AtomCategory::Storage,
    AtomCategory::Transfer, AtomCategory::Copy,    AtomCategory::Erasure};
std::string_view category_name(AtomCategory c) noexcept;

class CategorySet {
public:
    void insert(AtomCategory c) noexcept { bits_ = static_cast<std::uint8_t>(bits_ | (1U << unsigned(c))); }
    bool contains(AtomCategory c) const noexcept { return (bits_ >> unsigned(c)) & 1U; }
    bool empty() const noexcept { return bits_ == 0; }
    std::vector<std::string_view> names() const;

    friend bool operator==(CategorySet, CategorySet) = default;

private:
    std::uint8_t bits_ = 0;
};

/// Information-dynamics categories of the atom source -> target. "Larger"
/// compares set sizes; copy/erasure count when the single source (target)
/// is a proper subset of any member on the other side.
CategorySet classify_atom(const Antichain& source, const Antichain& target);

/// Double-lattice machinery for k channels: the antichain table, its Möbius
/// matrix and the Kronecker product. Immutable once built.
class PhiidEngine {
public:
    explicit PhiidEngine(int channels);
    PhiidEngine(std::shared_ptr<const SparseMobiusMatrix> mobius);

    int channels() const noexcept { return table_->n(); }
    const AntichainTable& table() const noexcept { return *table_; }
    const SparseMobiusMatrix& mobius() const noexcept { return *mobius_; }
    const DoubleLatticeMatrix& double_mobius() const noexcept { return *double_mobius_; }

    /// Double-MMI redundancy of every (source, target) pair, index i*|table|+j.
    std::vector<double> redundancy(const TransitionModel& model) const;
    std::vector<double> atoms(const TransitionModel& model) const;

private:
    std::shared_ptr<const AntichainTable> table_;
    std::shared_ptr<const SparseMobiusMatrix> mobius_;
    std::shared_ptr<const DoubleLatticeMatrix> double_mobius_;
};

struct NullCorrection {
    std::vector<double> observed;
    std::vector<double> null_mean;
    std::vector<double> null_sd;
    std::vector<double> corrected;
    std::size_t shuffles = 0;
    std::vector<std::string> warnings;
};

/// observed - mean(shuffled) per atom. Each replicate permutes the deduped
/// chord order, dedupes again and recomputes the atoms. Replicate r draws
/// from its own generator seeded from (seed, r), so results do not depend on
/// `threads`. Zero shuffles returns the raw atoms with a warning.
NullCorrection shuffle_null_correction(const SymbolicSequence& seq, std::size_t shuffles, std::uint64_t seed,
                                       const PhiidEngine& engine, unsigned threads = 1);

/// Shuffles the time order with a Fisher-Yates pass driven by mt19937_64.
SymbolicSequence shuffle_sequence(const SymbolicSequence& seq, std::uint64_t seed);

struct CategoryStats {
    AtomCategory category;
    std::vector<std::size_t> members;  ///< double-lattice indices
    double mean_abs = 0.0;
    double sem = 0.0;  ///< sample sd / sqrt(count); 0 for fewer than two members
};

using CategoryMembership = std::array<std::vector<std::size_t>, kAllCategories.size()>;

/// Atom indices per category over the double lattice of `table`.
CategoryMembership category_membership(const AntichainTable& table);

/// Mean |atom| and its standard error for every category.
std::vector<CategoryStats> category_report(std::span<const double> atoms, const CategoryMembership& membership);

}  // namespace fastmobius
