#include "fastmobius/lattice.hpp"

#include <algorithm>
#include <array>
#include <bit>

#include "fastmobius/errors.hpp"

namespace fastmobius {

namespace {

void check_n(int n, int max_n, const char* what) {
    if (n < 1 || n > max_n) {
        throw CapacityError(std::string(what) + ": n = " + std::to_string(n) + " outside 1.." +
                            std::to_string(max_n));
    }
}

std::uint32_t full_mask(int n) { return (std::uint32_t{1} << n) - 1U; }

constexpr std::array<std::uint64_t, 64> make_strict_down_table() {
    std::array<std::uint64_t, 64> table{};
    for (std::uint32_t s = 0; s < 64; ++s) {
        std::uint64_t bits = 0;
        // walk proper subsets of s
        for (std::uint32_t t = (s - 1) & s; t != s; t = (t - 1) & s) {
            bits |= std::uint64_t{1} << t;
            if (t == 0) break;
        }
        table[s] = bits;
    }
    return table;
}

constexpr auto kStrictDown = make_strict_down_table();

}  // namespace

// ---------------------------------------------------------------------------
// SourceSet

SourceSet::SourceSet(mask_type mask) : mask_(mask) {
    if (mask == 0) throw DataError("source set must be nonempty");
}

SourceSet SourceSet::from_indices(std::initializer_list<int> indices) {
    mask_type mask = 0;
    for (int i : indices) {
        if (i < 1 || i > kMaxSourceVariables) {
            throw DataError("source index " + std::to_string(i) + " out of range");
        }
        mask = mask_type(mask | (1U << (i - 1)));
    }
    return SourceSet(mask);
}

SourceSet SourceSet::full(int n) {
    check_n(n, kMaxSourceVariables, "SourceSet::full");
    return SourceSet(mask_type(full_mask(n)));
}

int SourceSet::size() const noexcept { return std::popcount(mask_); }

bool SourceSet::contains(int index) const noexcept {
    return index >= 1 && index <= kMaxSourceVariables && ((mask_ >> (index - 1)) & 1U);
}

int SourceSet::highest_index() const noexcept { return std::bit_width(mask_); }

std::vector<int> SourceSet::indices() const {
    std::vector<int> out;
    for (int i = 1; i <= kMaxSourceVariables; ++i) {
        if (contains(i)) out.push_back(i);
    }
    return out;
}

std::string SourceSet::digits() const {
    std::string out;
    for (int i : indices()) {
        if (i <= 9) {
            out.push_back(char('0' + i));
        } else {
            // indices past 9 are bracketed so the text stays unambiguous
            out += "[" + std::to_string(i) + "]";
        }
    }
    return out;
}

bool is_antichain(std::span<const SourceSet> family) noexcept {
    for (std::size_t i = 0; i < family.size(); ++i) {
        for (std::size_t j = i + 1; j < family.size(); ++j) {
            if (family[i].is_subset_of(family[j]) || family[j].is_subset_of(family[i])) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Antichain

Antichain::Antichain(int n, std::vector<SourceSet> members) : n_(n), members_(std::move(members)) {
    check_n(n, kMaxSourceVariables, "Antichain");
    if (members_.empty()) throw DataError("antichain must have at least one member");
    std::sort(members_.begin(), members_.end());
    const auto limit = full_mask(n);
    for (std::size_t i = 0; i < members_.size(); ++i) {
        if ((members_[i].mask() & ~limit) != 0) {
            throw DataError("source (" + members_[i].digits() + ") uses an index above n = " +
                            std::to_string(n));
        }
        if (i > 0 && members_[i] == members_[i - 1]) {
            throw DataError("duplicate source (" + members_[i].digits() + ") in antichain");
        }
    }
    if (!is_antichain(members_)) {
        throw DataError("family " + to_string() + " is not an antichain");
    }
}

Antichain Antichain::parse(std::string_view text, int n) {
    std::vector<SourceSet> members;
    std::size_t pos = 0;
    auto fail = [&](const std::string& why) {
        throw DataError("cannot parse antichain '" + std::string(text) + "': " + why);
    };
    while (pos < text.size() && text[pos] == ' ') ++pos;
    while (pos < text.size() && text.back() == ' ') text.remove_suffix(1);
    if (pos == text.size()) fail("empty text");
    while (pos < text.size()) {
        if (text[pos] == ' ') {
            ++pos;
            continue;
        }
        if (text[pos] != '(') fail("expected '(' at position " + std::to_string(pos));
        ++pos;
        SourceSet::mask_type mask = 0;
        bool closed = false;
        while (pos < text.size()) {
            const char c = text[pos++];
            if (c == ')') {
                closed = true;
                break;
            }
            if (c < '1' || c > '9') fail(std::string("unexpected character '") + c + "'");
            const int index = c - '0';
            if (index > n) fail("index " + std::to_string(index) + " exceeds n = " + std::to_string(n));
            const auto bit = SourceSet::mask_type(1U << (index - 1));
            if (mask & bit) fail("index " + std::to_string(index) + " repeated inside a group");
            mask = SourceSet::mask_type(mask | bit);
        }
        if (!closed) fail("unterminated group");
        if (mask == 0) fail("empty group");
        for (SourceSet s : members) {
            if (s.mask() == mask) fail("duplicate group");
        }
        members.emplace_back(mask);
    }
    if (!is_antichain(members)) fail("groups are not pairwise incomparable");
    return Antichain(n, std::move(members));
}

Antichain Antichain::top(int n) { return Antichain(n, {SourceSet::full(n)}); }

Antichain Antichain::bottom(int n) {
    check_n(n, kMaxSourceVariables, "Antichain::bottom");
    std::vector<SourceSet> members;
    for (int i = 0; i < n; ++i) members.emplace_back(SourceSet::mask_type(1U << i));
    return Antichain(n, std::move(members));
}

std::string Antichain::to_string() const {
    std::string out;
    for (SourceSet s : members_) out += "(" + s.digits() + ")";
    return out;
}

bool canonical_less(const Antichain& a, const Antichain& b) noexcept {
    if (a.size() != b.size()) return a.size() < b.size();
    return std::lexicographical_compare(a.members().begin(), a.members().end(), b.members().begin(),
                                        b.members().end());
}

namespace {

void check_same_n(const Antichain& a, const Antichain& b) {
    if (a.n() != b.n()) {
        throw DataError("antichains over different variable counts (" + std::to_string(a.n()) + " vs " +
                        std::to_string(b.n()) + ")");
    }
}

std::vector<SourceSet> minimal_elements(std::vector<SourceSet> family) {
    std::sort(family.begin(), family.end());
    family.erase(std::unique(family.begin(), family.end()), family.end());
    std::vector<SourceSet> out;
    for (SourceSet s : family) {
        const bool dominated = std::any_of(family.begin(), family.end(),
                                           [s](SourceSet t) { return t.is_proper_subset_of(s); });
        if (!dominated) out.push_back(s);
    }
    return out;
}

}  // namespace

bool antichain_leq(const Antichain& a, const Antichain& b) {
    check_same_n(a, b);
    return std::all_of(b.members().begin(), b.members().end(), [&](SourceSet y) {
        return std::any_of(a.members().begin(), a.members().end(),
                           [y](SourceSet x) { return x.is_subset_of(y); });
    });
}

Antichain meet(const Antichain& a, const Antichain& b) {
    check_same_n(a, b);
    std::vector<SourceSet> all(a.members().begin(), a.members().end());
    all.insert(all.end(), b.members().begin(), b.members().end());
    return Antichain(a.n(), minimal_elements(std::move(all)));
}

Antichain join(const Antichain& a, const Antichain& b) {
    check_same_n(a, b);
    std::vector<SourceSet> unions;
    for (SourceSet x : a.members()) {
        for (SourceSet y : b.members()) unions.push_back(x.union_with(y));
    }
    return Antichain(a.n(), minimal_elements(std::move(unions)));
}

// ---------------------------------------------------------------------------
// SetFamily / complement

SetFamily::SetFamily(int n, std::vector<std::uint32_t> masks) : n_(n), masks_(std::move(masks)) {
    check_n(n, kMaxSourceVariables, "SetFamily");
    std::sort(masks_.begin(), masks_.end());
    masks_.erase(std::unique(masks_.begin(), masks_.end()), masks_.end());
    const auto limit = full_mask(n);
    for (auto m : masks_) {
        if ((m & ~limit) != 0) throw DataError("set family member uses an index above n");
    }
}

std::optional<Antichain> SetFamily::to_antichain() const {
    if (masks_.empty() || masks_.front() == 0) return std::nullopt;
    std::vector<SourceSet> members;
    for (auto m : masks_) members.emplace_back(SourceSet::mask_type(m));
    if (!is_antichain(members)) return std::nullopt;
    return Antichain(n_, std::move(members));
}

std::string SetFamily::to_string() const {
    std::string out;
    for (auto m : masks_) {
        out += "(";
        if (m != 0) out += SourceSet(SourceSet::mask_type(m)).digits();
        out += ")";
    }
    return out;
}

SetFamily complement(const Antichain& alpha) {
    const auto full = full_mask(alpha.n());
    std::vector<std::uint32_t> masks;
    masks.reserve(alpha.size());
    for (SourceSet s : alpha.members()) masks.push_back(full & ~std::uint32_t{s.mask()});
    return SetFamily(alpha.n(), std::move(masks));
}

// ---------------------------------------------------------------------------
// DownSet

namespace powerset {

std::uint64_t strict_down_mask(std::uint32_t subset) noexcept { return kStrictDown[subset & 63U]; }

bool is_antichain(std::uint64_t family) noexcept {
    for (std::uint64_t rest = family; rest != 0; rest &= rest - 1) {
        const auto s = static_cast<std::uint32_t>(std::countr_zero(rest));
        if (family & kStrictDown[s]) return false;
    }
    return true;
}

bool is_downward_closed(std::uint64_t family) noexcept {
    for (std::uint64_t rest = family; rest != 0; rest &= rest - 1) {
        const auto s = static_cast<std::uint32_t>(std::countr_zero(rest));
        if ((kStrictDown[s] & ~family) != 0) return false;
    }
    return true;
}

}  // namespace powerset

DownSet::DownSet(int n, std::uint64_t bits) : n_(n), bits_(bits) {
    check_n(n, kMaxDownSetVariables, "DownSet");
    const int universe = 1 << n;
    if (universe < 64 && (bits >> universe) != 0) throw DataError("down-set has bits beyond 2^n");
    if (!powerset::is_downward_closed(bits)) throw DataError("family is not downward closed");
}

int DownSet::size() const noexcept { return std::popcount(bits_); }

std::vector<std::uint32_t> DownSet::subsets() const {
    std::vector<std::uint32_t> out;
    for (std::uint64_t rest = bits_; rest != 0; rest &= rest - 1) {
        out.push_back(static_cast<std::uint32_t>(std::countr_zero(rest)));
    }
    return out;
}

DownSet ideal_of(const SetFamily& family) {
    check_n(family.n(), kMaxDownSetVariables, "ideal_of");
    std::uint64_t bits = 1;  // ∅
    for (auto m : family.masks()) bits |= kStrictDown[m] | (std::uint64_t{1} << m);
    return DownSet(family.n(), bits);
}

DownSet ideal_of(const Antichain& alpha) {
    std::vector<std::uint32_t> masks;
    for (SourceSet s : alpha.members()) masks.push_back(s.mask());
    return ideal_of(SetFamily(alpha.n(), std::move(masks)));
}

// ---------------------------------------------------------------------------
// AntichainTable

AntichainTable::AntichainTable(int n, std::vector<Antichain> entries) : n_(n), entries_(std::move(entries)) {
    check_n(n, kMaxDownSetVariables, "AntichainTable");
    ideals_.reserve(entries_.size());
    by_ideal_.reserve(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].n() != n) throw DataError("table entry over a different n");
        const auto ideal = ideal_of(complement(entries_[i])).bits();
        ideals_.push_back(ideal);
        if (!by_ideal_.emplace(ideal, i).second) {
            throw DataError("duplicate antichain " + entries_[i].to_string() + " in table");
        }
    }
}

std::optional<std::size_t> AntichainTable::find(const Antichain& alpha) const {
    if (alpha.n() != n_) return std::nullopt;
    const auto it = by_ideal_.find(ideal_of(complement(alpha)).bits());
    if (it == by_ideal_.end()) return std::nullopt;
    return it->second;
}

std::size_t AntichainTable::index_of(const Antichain& alpha) const {
    if (auto i = find(alpha)) return *i;
    throw DataError("antichain " + alpha.to_string() + " is not in the n = " + std::to_string(n_) + " table");
}

std::size_t AntichainTable::top_index() const { return index_of(Antichain::top(n_)); }
std::size_t AntichainTable::bottom_index() const { return index_of(Antichain::bottom(n_)); }

std::uint64_t AntichainTable::hash() const noexcept {
    std::uint64_t h = 14695981039346656037ULL;
    auto mix = [&h](std::uint64_t byte) {
        h ^= byte & 0xFFU;
        h *= 1099511628211ULL;
    };
    mix(static_cast<std::uint64_t>(n_));
    for (const auto& a : entries_) {
        mix(a.size());
        for (SourceSet s : a.members()) {
            mix(s.mask());
            mix(s.mask() >> 8);
        }
    }
    return h;
}

namespace {

// Depth-first over nonempty subsets in increasing mask order; each subset is
// either skipped or added when incomparable with everything chosen so far.
void extend_antichains(std::uint32_t next, std::uint32_t limit, std::vector<SourceSet>& chosen,
                       std::vector<Antichain>& out, int n) {
    if (next > limit) {
        if (!chosen.empty()) out.emplace_back(n, chosen);
        return;
    }
    extend_antichains(next + 1, limit, chosen, out, n);
    const SourceSet candidate(static_cast<SourceSet::mask_type>(next));
    const bool free = std::none_of(chosen.begin(), chosen.end(), [candidate](SourceSet s) {
        return s.is_subset_of(candidate) || candidate.is_subset_of(s);
    });
    if (free) {
        chosen.push_back(candidate);
        extend_antichains(next + 1, limit, chosen, out, n);
        chosen.pop_back();
    }
}

}  // namespace

AntichainTable enumerate_antichains(int n, bool allow_beyond_cap) {
    const int cap = allow_beyond_cap ? kMaxDownSetVariables : kDefaultMaxLatticeVariables;
    if (n < 2 || n > cap) {
        throw CapacityError("redundancy lattice for n = " + std::to_string(n) +
                            " is not supported (2 <= n <= " + std::to_string(cap) +
                            "); its size is the Dedekind number M(n) - 2, which jumps from 7579 at n = 5 "
                            "to 7828352 at n = 6");
    }
    std::vector<Antichain> out;
    std::vector<SourceSet> chosen;
    extend_antichains(1, full_mask(n), chosen, out, n);
    std::sort(out.begin(), out.end(), canonical_less);
    return AntichainTable(n, std::move(out));
}

}  // namespace fastmobius
