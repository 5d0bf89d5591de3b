#include "fastmobius/mobius.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <mutex>
#include <numeric>
#include <thread>

#include "fastmobius/errors.hpp"

namespace fastmobius {

namespace detail {

int mobius_formula_unguarded(std::uint64_t ideal_a, std::uint64_t ideal_b) noexcept {
    const std::uint64_t diff = ideal_a & ~ideal_b;
    if (!powerset::is_antichain(diff)) return 0;
    return (std::popcount(diff) % 2 == 0) ? 1 : -1;
}

}  // namespace detail

int mobius_fast(const AntichainTable& table, std::size_t i, std::size_t j) noexcept {
    if (!table.leq(i, j)) return 0;
    return detail::mobius_formula_unguarded(table.complement_ideal(i), table.complement_ideal(j));
}

int mobius_fast(const Antichain& a, const Antichain& b) {
    if (!antichain_leq(a, b)) return 0;
    return detail::mobius_formula_unguarded(ideal_of(complement(a)).bits(), ideal_of(complement(b)).bits());
}

// ---------------------------------------------------------------------------

RecursiveMobius::RecursiveMobius(const AntichainTable& table)
    : table_(table), rows_(table.size()), done_(table.size(), false) {
    const std::size_t size = table.size();
    // below[j] counts elements <= j; strictly increasing along the order, so
    // sorting by it gives a linear extension.
    std::vector<std::size_t> below(size, 0);
    leq_.assign(size * size, false);
    for (std::size_t i = 0; i < size; ++i) {
        for (std::size_t j = 0; j < size; ++j) {
            if (antichain_leq(table[i], table[j])) {
                leq_[i * size + j] = true;
                ++below[j];
            }
        }
    }
    linear_extension_.resize(size);
    std::iota(linear_extension_.begin(), linear_extension_.end(), std::size_t{0});
    std::stable_sort(linear_extension_.begin(), linear_extension_.end(),
                     [&](std::size_t a, std::size_t b) { return below[a] < below[b]; });
}

const std::vector<int>& RecursiveMobius::row(std::size_t i) {
    if (done_[i]) return rows_[i];
    const std::size_t size = table_.size();
    std::vector<int> mu(size, 0);
    mu[i] = 1;
    for (std::size_t y : linear_extension_) {
        if (y == i || !leq_[i * size + y]) continue;
        int sum = 0;
        for (std::size_t z = 0; z < size; ++z) {
            if (z != y && mu[z] != 0 && leq_[z * size + y]) sum += mu[z];
        }
        mu[y] = -sum;
    }
    rows_[i] = std::move(mu);
    done_[i] = true;
    return rows_[i];
}

int RecursiveMobius::operator()(std::size_t i, std::size_t j) { return row(i)[j]; }

int RecursiveMobius::operator()(const Antichain& a, const Antichain& b) {
    if (a.n() != b.n()) throw DataError("antichains over different variable counts");
    return (*this)(table_.index_of(a), table_.index_of(b));
}

int mobius_recursive(const Antichain& a, const Antichain& b) {
    if (a.n() != b.n()) throw DataError("antichains over different variable counts");
    if (a.n() > 4) throw CapacityError("recursive Möbius reference is limited to n <= 4");
    static std::array<std::once_flag, 5> flags;
    static std::array<std::unique_ptr<AntichainTable>, 5> tables;
    const int n = a.n();
    if (n < 2) throw CapacityError("recursive Möbius reference needs n >= 2");
    std::call_once(flags[n], [n] { tables[n] = std::make_unique<AntichainTable>(enumerate_antichains(n)); });
    RecursiveMobius oracle(*tables[n]);
    return oracle(a, b);
}

// ---------------------------------------------------------------------------

namespace {

void check_values(std::span<const Triplet> triplets, std::size_t dimension) {
    for (const auto& t : triplets) {
        if (t.row >= dimension || t.col >= dimension) throw DataError("matrix entry outside the table");
        if (t.value != 1 && t.value != -1) {
            throw DataError("Möbius value " + std::to_string(int(t.value)) + " at (" + std::to_string(t.row) +
                            ", " + std::to_string(t.col) + ") is outside {-1, +1}");
        }
    }
}

bool row_major_less(const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
}

}  // namespace

SparseMobiusMatrix::SparseMobiusMatrix(std::shared_ptr<const AntichainTable> table, std::vector<Triplet> triplets)
    : table_(std::move(table)), triplets_(std::move(triplets)) {
    if (!table_) throw DataError("matrix needs an antichain table");
    check_values(triplets_, table_->size());
    if (!std::is_sorted(triplets_.begin(), triplets_.end(), row_major_less)) {
        std::sort(triplets_.begin(), triplets_.end(), row_major_less);
    }
}

double SparseMobiusMatrix::density() const noexcept {
    const double d = static_cast<double>(dimension());
    return d == 0 ? 0.0 : static_cast<double>(nonzeros()) / (d * d);
}

SparseMobiusMatrix build_mobius_matrix(std::shared_ptr<const AntichainTable> table, unsigned threads) {
    if (!table) throw DataError("matrix needs an antichain table");
    if (table->n() > kDefaultMaxLatticeVariables) {
        throw CapacityError("Möbius matrix for n = " + std::to_string(table->n()) + " is not supported (n <= 5)");
    }
    const std::size_t size = table->size();
    if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, size));

    // Columns are dealt round-robin; each worker fills its own buffer.
    std::vector<std::vector<Triplet>> parts(threads);
    auto work = [&](unsigned worker) {
        auto& out = parts[worker];
        for (std::size_t j = worker; j < size; j += threads) {
            for (std::size_t i = 0; i < size; ++i) {
                const int mu = mobius_fast(*table, i, j);
                if (mu != 0) {
                    out.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                                   static_cast<std::int8_t>(mu)});
                }
            }
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    std::vector<Triplet> all;
    std::size_t total = 0;
    for (const auto& p : parts) total += p.size();
    all.reserve(total);
    for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    std::sort(all.begin(), all.end(), row_major_less);
    return SparseMobiusMatrix(std::move(table), std::move(all));
}

SparseMobiusMatrix build_mobius_matrix(const AntichainTable& table, unsigned threads) {
    return build_mobius_matrix(std::make_shared<const AntichainTable>(table), threads);
}

std::vector<double> pid_atoms(std::span<const double> redundancy, const SparseMobiusMatrix& m) {
    if (redundancy.size() != m.dimension()) {
        throw DataError("redundancy vector has " + std::to_string(redundancy.size()) + " entries, matrix expects " +
                        std::to_string(m.dimension()));
    }
    std::vector<double> atoms(m.dimension(), 0.0);
    for (const auto& t : m.triplets()) atoms[t.col] += t.value * redundancy[t.row];
    return atoms;
}

std::vector<double> cumulative_redundancy(std::span<const double> atoms, const AntichainTable& table) {
    if (atoms.size() != table.size()) throw DataError("atom vector does not match the table size");
    std::vector<double> out(table.size(), 0.0);
    for (std::size_t a = 0; a < table.size(); ++a) {
        double sum = 0.0;
        for (std::size_t b = 0; b < table.size(); ++b) {
            if (table.leq(b, a)) sum += atoms[b];
        }
        out[a] = sum;
    }
    return out;
}

std::vector<std::pair<Antichain, int>> top_synergy_terms(int n) {
    if (n < 1 || n > kMaxSourceVariables) throw CapacityError("top synergy needs 1 <= n <= 16");
    const std::uint32_t full = (std::uint32_t{1} << n) - 1U;
    std::vector<std::pair<Antichain, int>> terms;
    terms.reserve(std::size_t{1} << n);
    for (std::uint32_t u = 0; u <= full; ++u) {
        const int sign = (std::popcount(u) % 2 == 0) ? 1 : -1;
        if (u == 0) {
            terms.emplace_back(Antichain::top(n), sign);
            continue;
        }
        std::vector<SourceSet> members;
        for (int x = 0; x < n; ++x) {
            if ((u >> x) & 1U) members.emplace_back(static_cast<SourceSet::mask_type>(full & ~(1U << x)));
        }
        terms.emplace_back(Antichain(n, std::move(members)), sign);
    }
    return terms;
}

double top_synergy_atom(int n, const std::map<std::string, double>& redundancy) {
    // Re-key by canonical text so callers may list groups in any order.
    std::map<std::string, double> canonical;
    for (const auto& [text, value] : redundancy) canonical[Antichain::parse(text, n).to_string()] = value;
    double total = 0.0;
    for (const auto& [alpha, sign] : top_synergy_terms(n)) {
        const auto it = canonical.find(alpha.to_string());
        if (it == canonical.end()) {
            throw DataError("top synergy needs the redundancy of " + alpha.to_string());
        }
        total += sign * it->second;
    }
    return total;
}

// ---------------------------------------------------------------------------

DoubleLatticeMatrix::DoubleLatticeMatrix(std::shared_ptr<const AntichainTable> table, std::vector<Triplet> triplets)
    : table_(std::move(table)), triplets_(std::move(triplets)) {
    if (!table_) throw DataError("matrix needs an antichain table");
    check_values(triplets_, dimension());
}

DoubleLatticeMatrix phiid_mobius(const SparseMobiusMatrix& m) {
    if (m.n() > 4) {
        throw CapacityError("double-lattice Möbius matrix for n = " + std::to_string(m.n()) +
                            " is not supported (n <= 4)");
    }
    const auto size = static_cast<std::uint32_t>(m.dimension());
    const auto entries = m.triplets();
    // Row offsets into the row-major triplet list.
    std::vector<std::size_t> start(size + 1, 0);
    for (const auto& t : entries) ++start[t.row + 1];
    for (std::uint32_t r = 0; r < size; ++r) start[r + 1] += start[r];

    std::vector<Triplet> out;
    out.reserve(entries.size() * entries.size());
    for (std::uint32_t i = 0; i < size; ++i) {
        for (std::uint32_t j = 0; j < size; ++j) {
            const std::uint32_t row = i * size + j;
            for (std::size_t p = start[i]; p < start[i + 1]; ++p) {
                for (std::size_t q = start[j]; q < start[j + 1]; ++q) {
                    out.push_back({row, entries[p].col * size + entries[q].col,
                                   static_cast<std::int8_t>(entries[p].value * entries[q].value)});
                }
            }
        }
    }
    return DoubleLatticeMatrix(m.shared_table(), std::move(out));
}

std::vector<double> phiid_atoms(std::span<const double> redundancy, const DoubleLatticeMatrix& mm) {
    if (redundancy.size() != mm.dimension()) {
        throw DataError("double-lattice redundancy vector has " + std::to_string(redundancy.size()) +
                        " entries, matrix expects " + std::to_string(mm.dimension()));
    }
    std::vector<double> atoms(mm.dimension(), 0.0);
    for (const auto& t : mm.triplets()) atoms[t.col] += t.value * redundancy[t.row];
    return atoms;
}

}  // namespace fastmobius
