#include "fastmobius/dynamics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <thread>

#include "fastmobius/errors.hpp"

namespace fastmobius {

// ---------------------------------------------------------------------------
// SymbolicSequence

SymbolicSequence::SymbolicSequence(int channels, int alphabet, std::vector<std::uint16_t> data)
    : channels_(channels), alphabet_(alphabet), data_(std::move(data)) {
    if (channels < 1 || channels > kMaxSourceVariables) throw DataError("sequence needs 1..16 channels");
    if (alphabet < 2 || alphabet > 65535) throw DataError("alphabet size must be in 2..65535");
    if (data_.size() % static_cast<std::size_t>(channels) != 0) {
        throw DataError("sequence data is not a whole number of time steps");
    }
    for (auto s : data_) {
        if (s >= alphabet) {
            throw DataError("symbol " + std::to_string(s) + " outside alphabet of size " + std::to_string(alphabet));
        }
    }
}

SymbolicSequence SymbolicSequence::from_rows(const std::vector<std::vector<int>>& rows, int alphabet) {
    if (rows.empty()) throw DataError("empty sequence");
    const std::size_t k = rows.front().size();
    if (k == 0) throw DataError("sequence rows have no channels");
    int largest = 0;
    std::vector<std::uint16_t> data;
    data.reserve(rows.size() * k);
    for (const auto& row : rows) {
        if (row.size() != k) throw DataError("sequence rows have different channel counts");
        for (int v : row) {
            if (v < 0 || v > 65534) throw DataError("symbol " + std::to_string(v) + " out of range");
            largest = std::max(largest, v);
            data.push_back(static_cast<std::uint16_t>(v));
        }
    }
    if (alphabet == 0) alphabet = std::max(2, largest + 1);
    return SymbolicSequence(static_cast<int>(k), alphabet, std::move(data));
}

SymbolicSequence dedupe_consecutive(const SymbolicSequence& seq) {
    if (seq.length() == 0) throw DataError("cannot dedupe an empty sequence");
    std::vector<std::uint16_t> out;
    out.reserve(seq.data().size());
    const auto first = seq.state(0);
    out.insert(out.end(), first.begin(), first.end());
    for (std::size_t t = 1; t < seq.length(); ++t) {
        const auto prev = seq.state(t - 1);
        const auto cur = seq.state(t);
        if (!std::equal(prev.begin(), prev.end(), cur.begin())) out.insert(out.end(), cur.begin(), cur.end());
    }
    return SymbolicSequence(seq.channels(), seq.alphabet(), std::move(out));
}

// ---------------------------------------------------------------------------
// TransitionModel

namespace {

std::uint64_t pack_state(std::span<const std::uint16_t> state, int alphabet) {
    std::uint64_t key = 0;
    for (std::size_t c = state.size(); c-- > 0;) key = key * static_cast<std::uint64_t>(alphabet) + state[c];
    return key;
}

void check_packable(int channels, int alphabet) {
    // Pairs of states are projected into one 64-bit key.
    const double bits = 2.0 * channels * std::log2(static_cast<double>(alphabet));
    if (bits >= 63.0) throw CapacityError("alphabet^(2k) does not fit a 64-bit transition key");
}

double entropy_of_counts(const std::vector<std::uint64_t>& counts, double total) {
    double h = 0.0;
    for (auto c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / total;
        h -= p * std::log2(p);
    }
    return h;
}

}  // namespace

TransitionModel::TransitionModel(int channels, int alphabet, std::vector<Entry> entries)
    : channels_(channels), alphabet_(alphabet), entries_(std::move(entries)) {
    check_packable(channels, alphabet);
    if (entries_.empty()) throw DataError("transition model has no transitions");
    std::sort(entries_.begin(), entries_.end(),
              [](const Entry& a, const Entry& b) { return a.from != b.from ? a.from < b.from : a.to < b.to; });
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].count == 0) throw DataError("transition counts must be positive");
        if (i > 0 && entries_[i].from == entries_[i - 1].from && entries_[i].to == entries_[i - 1].to) {
            throw DataError("duplicate transition key");
        }
        total_ += entries_[i].count;
    }
}

double TransitionModel::probability(std::span<const int> from, std::span<const int> to) const {
    if (from.size() != static_cast<std::size_t>(channels_) || to.size() != static_cast<std::size_t>(channels_)) {
        throw DataError("state width does not match the channel count");
    }
    auto pack = [&](std::span<const int> s) {
        std::uint64_t key = 0;
        for (std::size_t c = s.size(); c-- > 0;) {
            if (s[c] < 0 || s[c] >= alphabet_) throw DataError("symbol outside the alphabet");
            key = key * static_cast<std::uint64_t>(alphabet_) + static_cast<std::uint64_t>(s[c]);
        }
        return key;
    };
    const Entry probe{pack(from), pack(to), 0};
    const auto it = std::lower_bound(entries_.begin(), entries_.end(), probe, [](const Entry& a, const Entry& b) {
        return a.from != b.from ? a.from < b.from : a.to < b.to;
    });
    if (it == entries_.end() || it->from != probe.from || it->to != probe.to) return 0.0;
    return static_cast<double>(it->count) / static_cast<double>(total_);
}

double TransitionModel::entropy(std::uint32_t joint_mask) const {
    // Variables 0..k-1 are the channels at t, k..2k-1 those at t+1.
    const int k = channels_;
    const auto sigma = static_cast<std::uint64_t>(alphabet_);
    std::vector<std::uint64_t> scale(static_cast<std::size_t>(2 * k), 0);
    std::uint64_t space = 1;
    for (int v = 0; v < 2 * k; ++v) {
        if ((joint_mask >> v) & 1U) {
            scale[static_cast<std::size_t>(v)] = space;
            space *= sigma;
        }
    }
    auto project = [&](const Entry& e) {
        std::uint64_t key = 0;
        std::uint64_t from = e.from, to = e.to;
        for (int v = 0; v < k; ++v) {
            key += (from % sigma) * scale[static_cast<std::size_t>(v)];
            key += (to % sigma) * scale[static_cast<std::size_t>(v + k)];
            from /= sigma;
            to /= sigma;
        }
        return key;
    };
    const auto total = static_cast<double>(total_);
    if (space <= (std::uint64_t{1} << 20)) {
        std::vector<std::uint64_t> counts(space, 0);
        for (const auto& e : entries_) counts[project(e)] += e.count;
        return entropy_of_counts(counts, total);
    }
    std::vector<std::pair<std::uint64_t, std::uint64_t>> keyed;
    keyed.reserve(entries_.size());
    for (const auto& e : entries_) keyed.emplace_back(project(e), e.count);
    std::sort(keyed.begin(), keyed.end());
    std::vector<std::uint64_t> counts;
    for (std::size_t i = 0; i < keyed.size();) {
        std::uint64_t c = 0;
        const auto key = keyed[i].first;
        for (; i < keyed.size() && keyed[i].first == key; ++i) c += keyed[i].second;
        counts.push_back(c);
    }
    return entropy_of_counts(counts, total);
}

double TransitionModel::mutual_information(std::uint32_t source_mask, std::uint32_t target_mask) const {
    const std::uint32_t limit = (std::uint32_t{1} << channels_) - 1U;
    if (source_mask == 0 || target_mask == 0 || (source_mask & ~limit) || (target_mask & ~limit)) {
        throw DataError("channel mask outside 1..k");
    }
    const std::uint32_t shifted = target_mask << channels_;
    const double mi = entropy(source_mask) + entropy(shifted) - entropy(source_mask | shifted);
    return std::max(mi, 0.0);
}

double TransitionModel::direct_mutual_information(std::uint32_t source_mask, std::uint32_t target_mask) const {
    const auto sigma = static_cast<std::uint64_t>(alphabet_);
    auto project = [&](std::uint64_t state, std::uint32_t mask) {
        std::uint64_t key = 0, scale = 1;
        for (int c = 0; c < channels_; ++c) {
            if ((mask >> c) & 1U) {
                key += (state % sigma) * scale;
                scale *= sigma;
            }
            state /= sigma;
        }
        return key;
    };
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t> joint;
    std::map<std::uint64_t, std::uint64_t> left, right;
    for (const auto& e : entries_) {
        const auto a = project(e.from, source_mask);
        const auto b = project(e.to, target_mask);
        joint[{a, b}] += e.count;
        left[a] += e.count;
        right[b] += e.count;
    }
    const auto total = static_cast<double>(total_);
    double mi = 0.0;
    for (const auto& [key, count] : joint) {
        const double p = static_cast<double>(count) / total;
        const double pa = static_cast<double>(left[key.first]) / total;
        const double pb = static_cast<double>(right[key.second]) / total;
        mi += p * std::log2(p / (pa * pb));
    }
    return mi;
}

TransitionModel transition_distribution(const SymbolicSequence& seq) {
    if (seq.length() < 2) throw DataError("transition model needs at least two time steps");
    check_packable(seq.channels(), seq.alphabet());
    std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
    pairs.reserve(seq.length() - 1);
    for (std::size_t t = 0; t + 1 < seq.length(); ++t) {
        pairs.emplace_back(pack_state(seq.state(t), seq.alphabet()), pack_state(seq.state(t + 1), seq.alphabet()));
    }
    std::sort(pairs.begin(), pairs.end());
    std::vector<TransitionModel::Entry> entries;
    for (std::size_t i = 0; i < pairs.size();) {
        std::size_t j = i;
        while (j < pairs.size() && pairs[j] == pairs[i]) ++j;
        entries.push_back({pairs[i].first, pairs[i].second, static_cast<std::uint64_t>(j - i)});
        i = j;
    }
    return TransitionModel(seq.channels(), seq.alphabet(), std::move(entries));
}

// ---------------------------------------------------------------------------
// Categories

std::string_view category_name(AtomCategory c) noexcept {
    switch (c) {
        case AtomCategory::BottomUp: return "bottom_up";
        case AtomCategory::TopDown: return "top_down";
        case AtomCategory::Storage: return "storage";
        case AtomCategory::Transfer: return "transfer";
        case AtomCategory::Copy: return "copy";
        case AtomCategory::Erasure: return "erasure";
    }
    return "unknown";
}

std::vector<std::string_view> CategorySet::names() const {
    std::vector<std::string_view> out;
    for (auto c : kAllCategories) {
        if (contains(c)) out.push_back(category_name(c));
    }
    return out;
}

CategorySet classify_atom(const Antichain& source, const Antichain& target) {
    if (source.n() != target.n()) throw DataError("source and target antichains over different channel counts");
    CategorySet out;
    const auto sources = source.members();
    const auto targets = target.members();
    auto largest = [](std::span<const SourceSet> sets) {
        int best = 0;
        for (SourceSet s : sets) best = std::max(best, s.size());
        return best;
    };
    if (targets.size() == 1 && targets[0].size() > largest(sources)) out.insert(AtomCategory::BottomUp);
    if (sources.size() == 1 && sources[0].size() > largest(targets)) out.insert(AtomCategory::TopDown);
    if (source == target) out.insert(AtomCategory::Storage);
    if (sources.size() == 1 && targets.size() == 1 && source != target) out.insert(AtomCategory::Transfer);
    if (sources.size() == 1 &&
        std::any_of(targets.begin(), targets.end(), [&](SourceSet t) { return sources[0].is_proper_subset_of(t); })) {
        out.insert(AtomCategory::Copy);
    }
    if (targets.size() == 1 &&
        std::any_of(sources.begin(), sources.end(), [&](SourceSet s) { return targets[0].is_proper_subset_of(s); })) {
        out.insert(AtomCategory::Erasure);
    }
    return out;
}

CategoryMembership category_membership(const AntichainTable& table) {
    CategoryMembership out;
    const std::size_t size = table.size();
    for (std::size_t i = 0; i < size; ++i) {
        for (std::size_t j = 0; j < size; ++j) {
            const auto cats = classify_atom(table[i], table[j]);
            for (std::size_t c = 0; c < kAllCategories.size(); ++c) {
                if (cats.contains(kAllCategories[c])) out[c].push_back(i * size + j);
            }
        }
    }
    return out;
}

std::vector<CategoryStats> category_report(std::span<const double> atoms, const CategoryMembership& membership) {
    std::vector<CategoryStats> out;
    for (std::size_t c = 0; c < kAllCategories.size(); ++c) {
        CategoryStats stats{kAllCategories[c], membership[c], 0.0, 0.0};
        const auto count = static_cast<double>(stats.members.size());
        if (!stats.members.empty()) {
            double sum = 0.0;
            for (auto idx : stats.members) {
                if (idx >= atoms.size()) throw DataError("category member outside the atom vector");
                sum += std::abs(atoms[idx]);
            }
            stats.mean_abs = sum / count;
            if (stats.members.size() > 1) {
                double ss = 0.0;
                for (auto idx : stats.members) {
                    const double d = std::abs(atoms[idx]) - stats.mean_abs;
                    ss += d * d;
                }
                stats.sem = std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
            }
        }
        out.push_back(std::move(stats));
    }
    return out;
}

// ---------------------------------------------------------------------------
// PhiidEngine

namespace {

std::shared_ptr<const SparseMobiusMatrix> mobius_for_channels(int channels) {
    if (channels < 2 || channels > 4) {
        throw CapacityError("integrated decomposition supports 2..4 channels, got " + std::to_string(channels));
    }
    auto table = std::make_shared<const AntichainTable>(enumerate_antichains(channels));
    return std::make_shared<const SparseMobiusMatrix>(build_mobius_matrix(table, 1));
}

}  // namespace

PhiidEngine::PhiidEngine(int channels) : PhiidEngine(mobius_for_channels(channels)) {}

PhiidEngine::PhiidEngine(std::shared_ptr<const SparseMobiusMatrix> mobius)
    : table_(mobius->shared_table()),
      mobius_(std::move(mobius)),
      double_mobius_(std::make_shared<const DoubleLatticeMatrix>(phiid_mobius(*mobius_))) {}

std::vector<double> PhiidEngine::redundancy(const TransitionModel& model) const {
    const int k = channels();
    if (model.channels() != k) {
        throw DataError("transition model has " + std::to_string(model.channels()) + " channels, engine expects " +
                        std::to_string(k));
    }
    const std::size_t subsets = std::size_t{1} << k;
    std::vector<double> mi(subsets * subsets, 0.0);
    for (std::uint32_t a = 1; a < subsets; ++a) {
        for (std::uint32_t b = 1; b < subsets; ++b) mi[a * subsets + b] = model.mutual_information(a, b);
    }
    const std::size_t size = table_->size();
    std::vector<double> out(size * size);
    for (std::size_t i = 0; i < size; ++i) {
        for (std::size_t j = 0; j < size; ++j) {
            double best = std::numeric_limits<double>::infinity();
            for (SourceSet a : (*table_)[i].members()) {
                for (SourceSet b : (*table_)[j].members()) best = std::min(best, mi[a.mask() * subsets + b.mask()]);
            }
            out[i * size + j] = best;
        }
    }
    return out;
}

std::vector<double> PhiidEngine::atoms(const TransitionModel& model) const {
    return phiid_atoms(redundancy(model), *double_mobius_);
}

// ---------------------------------------------------------------------------
// Shuffle null

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Unbiased draw from [0, bound) by rejection; std distributions are not
// reproducible across standard libraries.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % bound);
    std::uint64_t x = 0;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

}  // namespace

SymbolicSequence shuffle_sequence(const SymbolicSequence& seq, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> order(seq.length());
    for (std::size_t t = 0; t < order.size(); ++t) order[t] = t;
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_below(rng, i)]);
    std::vector<std::uint16_t> data;
    data.reserve(seq.data().size());
    for (auto t : order) {
        const auto s = seq.state(t);
        data.insert(data.end(), s.begin(), s.end());
    }
    return SymbolicSequence(seq.channels(), seq.alphabet(), std::move(data));
}

NullCorrection shuffle_null_correction(const SymbolicSequence& seq, std::size_t shuffles, std::uint64_t seed,
                                       const PhiidEngine& engine, unsigned threads) {
    const auto base = dedupe_consecutive(seq);
    NullCorrection out;
    out.observed = engine.atoms(transition_distribution(base));
    out.shuffles = shuffles;
    const std::size_t dim = out.observed.size();
    out.null_mean.assign(dim, 0.0);
    out.null_sd.assign(dim, 0.0);
    if (shuffles == 0) {
        out.corrected = out.observed;
        out.warnings.emplace_back("no shuffles requested; atoms are not bias-corrected");
        return out;
    }

    std::vector<std::vector<double>> replicates(shuffles);
    auto run = [&](std::size_t r) {
        const auto shuffled = dedupe_consecutive(shuffle_sequence(base, splitmix64(seed ^ splitmix64(r))));
        replicates[r] = engine.atoms(transition_distribution(shuffled));
    };
    if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, shuffles));
    if (threads <= 1) {
        for (std::size_t r = 0; r < shuffles; ++r) run(r);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t r = w; r < shuffles; r += threads) run(r);
            });
        }
        for (auto& t : pool) t.join();
    }

    // Reduce in replicate order for bit-stable sums.
    for (const auto& rep : replicates) {
        for (std::size_t i = 0; i < dim; ++i) out.null_mean[i] += rep[i];
    }
    for (auto& m : out.null_mean) m /= static_cast<double>(shuffles);
    if (shuffles > 1) {
        for (const auto& rep : replicates) {
            for (std::size_t i = 0; i < dim; ++i) {
                const double d = rep[i] - out.null_mean[i];
                out.null_sd[i] += d * d;
            }
        }
        for (auto& s : out.null_sd) s = std::sqrt(s / static_cast<double>(shuffles - 1));
    }
    out.corrected.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) out.corrected[i] = out.observed[i] - out.null_mean[i];
    return out;
}

}  // namespace fastmobius
