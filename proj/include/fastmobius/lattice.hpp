#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fastmobius {

/// Largest variable count a SourceSet can address.
inline constexpr int kMaxSourceVariables = 16;
/// DownSets are stored as one 64-bit word over the 2^n subsets.
inline constexpr int kMaxDownSetVariables = 6;
/// Default cap on lattice enumeration; n = 6 needs an explicit override.
inline constexpr int kDefaultMaxLatticeVariables = 5;

/// A nonempty subset of the variable indices {1..n}. Index i lives in bit i-1.
class SourceSet {
public:
    using mask_type = std::uint16_t;

    explicit SourceSet(mask_type mask);
    static SourceSet from_indices(std::initializer_list<int> indices);
    static SourceSet full(int n);

    mask_type mask() const noexcept { return mask_; }
    int size() const noexcept;
    bool contains(int index) const noexcept;
    /// Largest index present (1-based).
    int highest_index() const noexcept;

    bool is_subset_of(SourceSet other) const noexcept { return (mask_ & ~other.mask_) == 0; }
    bool is_proper_subset_of(SourceSet other) const noexcept {
        return mask_ != other.mask_ && is_subset_of(other);
    }
    SourceSet union_with(SourceSet other) const noexcept { return SourceSet(mask_type(mask_ | other.mask_)); }

    std::vector<int> indices() const;
    /// Digits only, e.g. "12" for {1,2}.
    std::string digits() const;

    friend bool operator==(SourceSet, SourceSet) = default;
    friend auto operator<=>(SourceSet a, SourceSet b) noexcept { return a.mask_ <=> b.mask_; }

private:
    mask_type mask_;
};

/// True iff no member of the family is a subset of another. The empty family
/// is vacuously an antichain. Duplicates count as comparable.
bool is_antichain(std::span<const SourceSet> family) noexcept;

/// Canonical antichain of nonempty sources over n variables: members sorted
/// ascending by mask, pairwise incomparable, at least one member.
class Antichain {
public:
    /// Canonicalizes `members`; throws DataError on an empty list, duplicates,
    /// comparable members or indices above n.
    Antichain(int n, std::vector<SourceSet> members);

    /// Parses "(12)(3)"-style text. Group order and digit order inside a group
    /// are free; output is always canonical.
    static Antichain parse(std::string_view text, int n);

    /// (1..n), the top of the lattice.
    static Antichain top(int n);
    /// (1)(2)...(n), the bottom of the lattice.
    static Antichain bottom(int n);

    int n() const noexcept { return n_; }
    std::span<const SourceSet> members() const noexcept { return members_; }
    std::size_t size() const noexcept { return members_.size(); }
    std::string to_string() const;

    friend bool operator==(const Antichain&, const Antichain&) = default;

private:
    int n_;
    std::vector<SourceSet> members_;
};

/// Global table order: ascending member count, then lexicographic on masks.
bool canonical_less(const Antichain& a, const Antichain& b) noexcept;

/// Ordering of the redundancy lattice: a <= b iff every member of b contains
/// some member of a. (1)(2) is the bottom and (12) the top for n = 2.
///
/// The inline definition in the literature is sometimes printed with the
/// quantifiers swapped ("every member of a lies inside some member of b"),
/// which would put (1) below (1)(2). That reading contradicts the published
/// Hasse diagrams and the Birkhoff-based proof, so it is not used here.
bool antichain_leq(const Antichain& a, const Antichain& b);

/// Minimal elements of a u b (greatest lower bound).
Antichain meet(const Antichain& a, const Antichain& b);
/// Minimal elements of { x u y : x in a, y in b } (least upper bound).
Antichain join(const Antichain& a, const Antichain& b);

/// Family of subsets of {1..n} that may contain the empty set. Produced by
/// complement(); the complement of the top element is the bottom family {∅},
/// which is not a valid Antichain.
class SetFamily {
public:
    SetFamily(int n, std::vector<std::uint32_t> masks);

    int n() const noexcept { return n_; }
    std::span<const std::uint32_t> masks() const noexcept { return masks_; }
    /// True for {∅}.
    bool is_bottom_family() const noexcept { return masks_.size() == 1 && masks_[0] == 0; }
    /// Converts to an Antichain when every member is nonempty and the family
    /// is an antichain.
    std::optional<Antichain> to_antichain() const;
    /// Same text format as Antichain; the empty set prints as "()".
    std::string to_string() const;

    friend bool operator==(const SetFamily&, const SetFamily&) = default;

private:
    int n_;
    std::vector<std::uint32_t> masks_;
};

/// { {1..n} \ a : a in alpha }.
SetFamily complement(const Antichain& alpha);

/// Downward-closed family of subsets of {1..n}, bit s set iff subset s is
/// present. n <= 6.
class DownSet {
public:
    DownSet(int n, std::uint64_t bits);

    int n() const noexcept { return n_; }
    std::uint64_t bits() const noexcept { return bits_; }
    bool contains(std::uint32_t subset) const noexcept { return (bits_ >> subset) & 1U; }
    int size() const noexcept;
    bool is_subset_of(const DownSet& other) const noexcept { return (bits_ & ~other.bits_) == 0; }

    std::vector<std::uint32_t> subsets() const;

    friend bool operator==(const DownSet&, const DownSet&) = default;

private:
    int n_;
    std::uint64_t bits_;
};

/// Smallest down-set containing every member of the family. Always contains ∅.
DownSet ideal_of(const SetFamily& family);
DownSet ideal_of(const Antichain& alpha);

namespace powerset {

/// Bitmask (over the 64 subsets of a 6-set) of all proper subsets of `subset`.
std::uint64_t strict_down_mask(std::uint32_t subset) noexcept;

/// True iff the subsets whose bits are set in `family` are pairwise
/// incomparable under inclusion. The empty family is an antichain.
bool is_antichain(std::uint64_t family) noexcept;

/// True iff `family` is closed under taking subsets.
bool is_downward_closed(std::uint64_t family) noexcept;

}  // namespace powerset

/// All elements of the redundancy lattice for n variables in canonical order,
/// with the complement ideals used by the closed-form Möbius function.
class AntichainTable {
public:
    explicit AntichainTable(int n, std::vector<Antichain> entries);

    int n() const noexcept { return n_; }
    std::size_t size() const noexcept { return entries_.size(); }
    const std::vector<Antichain>& entries() const noexcept { return entries_; }
    const Antichain& operator[](std::size_t i) const { return entries_[i]; }

    std::optional<std::size_t> find(const Antichain& alpha) const;
    /// Throws DataError naming the antichain when absent.
    std::size_t index_of(const Antichain& alpha) const;

    /// Ideal generated by the complement of entry i.
    std::uint64_t complement_ideal(std::size_t i) const noexcept { return ideals_[i]; }

    /// Lattice order through the complement ideals: i <= j iff I_{j*} is
    /// contained in I_{i*}.
    bool leq(std::size_t i, std::size_t j) const noexcept {
        return (ideals_[j] & ~ideals_[i]) == 0;
    }

    std::size_t top_index() const;
    std::size_t bottom_index() const;

    /// FNV-1a over n and the canonical member masks.
    std::uint64_t hash() const noexcept;

private:
    int n_;
    std::vector<Antichain> entries_;
    std::vector<std::uint64_t> ideals_;
    std::unordered_map<std::uint64_t, std::size_t> by_ideal_;
};

/// Enumerates every antichain of nonempty subsets of {1..n} except the empty
/// antichain, sorted canonically. Yields M(n) - 2 entries: 4, 18, 166, 7579.
/// n above the default cap of 5 throws CapacityError unless
/// `allow_beyond_cap` is set (n = 6 then costs several GB).
AntichainTable enumerate_antichains(int n, bool allow_beyond_cap = false);

}  // namespace fastmobius
