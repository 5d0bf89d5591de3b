#include <doctest.h>

#include <random>
#include <set>

#include "fastmobius/dynamics.hpp"
#include "fastmobius/errors.hpp"
#include "oracles.hpp"

using namespace fastmobius;

namespace {

Antichain A(const char* text, int n) { return Antichain::parse(text, n); }

SymbolicSequence iid(int k, int alphabet, std::size_t length, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::vector<int>> rows(length, std::vector<int>(static_cast<std::size_t>(k)));
    for (auto& r : rows) {
        for (auto& v : r) v = static_cast<int>(rng() % static_cast<std::uint64_t>(alphabet));
    }
    return SymbolicSequence::from_rows(rows, alphabet);
}

// Copied-and-shifted voices: S, A i.i.d., T and B functions of the previous S.
// With `three_fold` A is a shifted copy too.
SymbolicSequence copied_voices(std::size_t length, bool three_fold, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::vector<int>> rows;
    int s = 0;
    for (std::size_t t = 0; t < length; ++t) {
        const int prev = s;
        s = static_cast<int>(rng() % 13);
        const int a = three_fold ? (prev + 11) % 13 : static_cast<int>(rng() % 13);
        rows.push_back({s, a, (prev + 9) % 13, (prev + 7) % 13});
    }
    return SymbolicSequence::from_rows(rows, 13);
}

std::set<std::string> oracle_categories(const oracle::Family& src, const oracle::Family& tgt) {
    auto largest = [](const oracle::Family& f) {
        std::size_t m = 0;
        for (const auto& s : f) m = std::max(m, s.size());
        return m;
    };
    auto proper = [](const oracle::Set& a, const oracle::Set& b) { return a != b && oracle::subset(a, b); };
    std::set<std::string> out;
    if (tgt.size() == 1 && tgt[0].size() > largest(src)) out.insert("bottom_up");
    if (src.size() == 1 && src[0].size() > largest(tgt)) out.insert("top_down");
    if (src == tgt) out.insert("storage");
    if (src.size() == 1 && tgt.size() == 1 && src != tgt) out.insert("transfer");
    if (src.size() == 1) {
        for (const auto& t : tgt) {
            if (proper(src[0], t)) out.insert("copy");
        }
    }
    if (tgt.size() == 1) {
        for (const auto& s : src) {
            if (proper(tgt[0], s)) out.insert("erasure");
        }
    }
    return out;
}

std::set<std::string> names(CategorySet c) {
    std::set<std::string> out;
    for (auto n : c.names()) out.insert(std::string(n));
    return out;
}

}  // namespace

TEST_CASE("dedupe") {
    const auto s = SymbolicSequence::from_rows({{0}, {0}, {1}, {1}, {0}});
    CHECK(dedupe_consecutive(s) == SymbolicSequence::from_rows({{0}, {1}, {0}}));
    const auto distinct = SymbolicSequence::from_rows({{0, 1}, {1, 1}, {1, 0}});
    CHECK(dedupe_consecutive(distinct) == distinct);
    const auto same = SymbolicSequence::from_rows({{2}, {2}, {2}});
    CHECK(dedupe_consecutive(same).length() == 1);
    const auto noisy = iid(2, 2, 500, 3);
    CHECK(dedupe_consecutive(dedupe_consecutive(noisy)) == dedupe_consecutive(noisy));
}

TEST_CASE("sequence validation") {
    CHECK_THROWS_AS(SymbolicSequence::from_rows({{0, 1}, {1}}), DataError);
    CHECK_THROWS_AS(SymbolicSequence::from_rows({}), DataError);
    CHECK_THROWS_AS(SymbolicSequence::from_rows({{5}}, 3), DataError);
    CHECK(SymbolicSequence::from_rows({{0}, {4}}).alphabet() == 5);
}

TEST_CASE("transition counting") {
    const auto s = SymbolicSequence::from_rows({{0}, {1}, {0}, {1}});
    const auto m = transition_distribution(s);
    CHECK(m.total() == 3);
    CHECK(m.probability(std::vector<int>{0}, std::vector<int>{1}) == doctest::Approx(2.0 / 3));
    CHECK(m.probability(std::vector<int>{1}, std::vector<int>{0}) == doctest::Approx(1.0 / 3));
    CHECK(m.probability(std::vector<int>{0}, std::vector<int>{0}) == 0.0);
    CHECK_THROWS_AS(transition_distribution(SymbolicSequence::from_rows({{0}})), DataError);
}

TEST_CASE("entropy-based MI matches the direct formula") {
    const auto m = transition_distribution(iid(3, 4, 3000, 1));
    for (std::uint32_t a = 1; a < 8; ++a) {
        for (std::uint32_t b = 1; b < 8; ++b) {
            CHECK(m.mutual_information(a, b) == doctest::Approx(m.direct_mutual_information(a, b)).epsilon(1e-10));
        }
    }
    CHECK_THROWS_AS(m.mutual_information(0, 1), DataError);
    CHECK_THROWS_AS(m.mutual_information(8, 1), DataError);
}

TEST_CASE("classification examples") {
    CHECK(names(classify_atom(A("(123)", 4), A("(4)", 4))) == std::set<std::string>{"top_down", "transfer"});
    CHECK(names(classify_atom(A("(12)", 2), A("(12)", 2))) == std::set<std::string>{"storage"});
    CHECK(names(classify_atom(A("(1)", 2), A("(12)", 2))) ==
          std::set<std::string>{"copy", "bottom_up", "transfer"});
    CHECK(classify_atom(A("(1)(2)", 2), A("(1)(2)", 2)).contains(AtomCategory::Storage));
    CHECK_THROWS_AS(classify_atom(A("(1)", 2), A("(1)", 3)), DataError);
}

TEST_CASE("category membership matches the predicate oracle") {
    for (int n : {2, 3, 4}) {
        const auto table = enumerate_antichains(n);
        std::vector<oracle::Family> fams;
        for (const auto& a : table.entries()) {
            oracle::Family f;
            for (SourceSet s : a.members()) f.push_back(s.indices());
            fams.push_back(f);
        }
        const auto membership = category_membership(table);
        std::map<std::string, std::size_t> sizes;
        std::size_t mismatches = 0;
        for (std::size_t i = 0; i < table.size(); ++i) {
            for (std::size_t j = 0; j < table.size(); ++j) {
                const auto want = oracle_categories(fams[i], fams[j]);
                for (const auto& w : want) ++sizes[w];
                mismatches += (names(classify_atom(table[i], table[j])) != want) ? 1 : 0;
            }
        }
        CHECK(mismatches == 0);
        for (std::size_t c = 0; c < kAllCategories.size(); ++c) {
            CHECK(membership[c].size() == sizes[std::string(category_name(kAllCategories[c]))]);
        }
        if (n == 2) CHECK(membership[2].size() == 4);  // storage
    }
}

TEST_CASE("category report") {
    const auto table = enumerate_antichains(2);
    const auto membership = category_membership(table);
    const std::vector<double> zeros(16, 0.0);
    for (const auto& c : category_report(zeros, membership)) {
        CHECK(c.mean_abs == 0.0);
        CHECK(c.sem == 0.0);
    }
    std::vector<double> atoms(16, 0.0);
    const auto& storage = membership[2];
    atoms[storage[0]] = 1.0;
    atoms[storage[1]] = -3.0;
    const auto report = category_report(atoms, membership);
    CHECK(report[2].mean_abs == doctest::Approx(1.0));
    // |values| = 1, 3, 0, 0: sample sd sqrt(2), sem sqrt(2)/2
    CHECK(report[2].sem == doctest::Approx(std::sqrt(2.0) / 2.0));
}

TEST_CASE("engine capacity") {
    CHECK_THROWS_AS(PhiidEngine(5), CapacityError);
    CHECK_THROWS_AS(PhiidEngine(1), CapacityError);
    const PhiidEngine engine(2);
    CHECK_THROWS_AS(engine.atoms(transition_distribution(iid(3, 2, 50, 1))), DataError);
}

TEST_CASE("double-lattice atoms sum to the transition mutual information") {
    for (int k : {2, 3, 4}) {
        const PhiidEngine engine(k);
        const auto model = transition_distribution(dedupe_consecutive(iid(k, 3, 4000, 7 + k)));
        const auto atoms = engine.atoms(model);
        double sum = 0;
        for (double a : atoms) sum += a;
        const std::uint32_t all = (1U << k) - 1U;
        CHECK(std::abs(sum - model.direct_mutual_information(all, all)) <= 1e-9);
    }
}

TEST_CASE("redundant cycle puts everything in bottom-to-bottom storage") {
    std::vector<std::vector<int>> rows;
    for (int t = 0; t < 401; ++t) rows.push_back({t % 5, t % 5});
    const auto seq = SymbolicSequence::from_rows(rows, 5);
    const PhiidEngine engine(2);
    const auto result = shuffle_null_correction(seq, 10, 3, engine);
    const auto& table = engine.table();
    const std::size_t N = table.size(), b = table.bottom_index();
    const std::size_t storage = b * N + b;
    CHECK(result.observed[storage] == doctest::Approx(std::log2(5.0)).epsilon(1e-9));
    for (std::size_t k = 0; k < result.corrected.size(); ++k) {
        if (k != storage) CHECK(result.corrected[k] < result.corrected[storage]);
    }
}

TEST_CASE("shuffle null is reproducible and thread independent") {
    const auto seq = iid(3, 3, 2000, 5);
    const PhiidEngine engine(3);
    const auto a = shuffle_null_correction(seq, 6, 42, engine, 1);
    const auto b = shuffle_null_correction(seq, 6, 42, engine, 1);
    const auto c = shuffle_null_correction(seq, 6, 42, engine, 3);
    CHECK(a.corrected == b.corrected);
    CHECK(a.corrected == c.corrected);
    CHECK(a.null_sd == c.null_sd);
    const auto d = shuffle_null_correction(seq, 6, 43, engine, 1);
    CHECK(a.corrected != d.corrected);
    CHECK(shuffle_sequence(seq, 1) == shuffle_sequence(seq, 1));
}

TEST_CASE("zero shuffles returns raw atoms with a warning") {
    const auto seq = iid(2, 3, 300, 9);
    const PhiidEngine engine(2);
    const auto r = shuffle_null_correction(seq, 0, 1, engine);
    CHECK(r.corrected == r.observed);
    CHECK(r.warnings.size() == 1);
}

TEST_CASE("independent noise corrects to about zero") {
    const auto seq = iid(2, 3, 20000, 17);
    const PhiidEngine engine(2);
    const auto r = shuffle_null_correction(seq, 20, 1, engine);
    std::size_t within = 0;
    for (std::size_t k = 0; k < r.corrected.size(); ++k) {
        CHECK(std::abs(r.corrected[k]) < 0.01);
        within += std::abs(r.corrected[k]) <= 3 * r.null_sd[k] + 1e-12 ? 1 : 0;
    }
    CHECK(within >= 14);
    for (const auto& c : category_report(r.corrected, category_membership(engine.table()))) CHECK(c.mean_abs < 0.01);
}

TEST_CASE("copied voices: designated atom is the largest in its comparison set") {
    const PhiidEngine engine(4);
    const auto& table = engine.table();
    const std::size_t N = table.size(), s = table.index_of(A("(1)", 4));
    SUBCASE("two-fold: S -> T|B tops every single-source atom from S") {
        const auto r = shuffle_null_correction(copied_voices(8000, false, 1), 4, 2, engine);
        const std::size_t want = s * N + table.index_of(A("(3)(4)", 4));
        for (std::size_t j = 0; j < N; ++j) {
            if (s * N + j != want) CHECK(r.corrected[s * N + j] < r.corrected[want]);
        }
    }
    SUBCASE("three-fold: S -> A|T|B tops every S atom with a three-part target") {
        const auto r = shuffle_null_correction(copied_voices(8000, true, 1), 4, 2, engine);
        const std::size_t want = s * N + table.index_of(A("(2)(3)(4)", 4));
        for (std::size_t j = 0; j < N; ++j) {
            if (table[j].size() == 3 && s * N + j != want) CHECK(r.corrected[s * N + j] < r.corrected[want]);
        }
    }
}
