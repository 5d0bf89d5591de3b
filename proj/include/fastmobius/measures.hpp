#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fastmobius/lattice.hpp"

namespace fastmobius {

/// Largest dense pmf accepted (product of all arities).
inline constexpr std::size_t kMaxDistributionCells = std::size_t{1} << 26;
/// Probabilities below this are treated as exact zeros in entropy sums.
inline constexpr double kProbabilityFloor = 1e-15;

/// Discrete pmf over (X_1..X_n, Y_1..Y_m), stored densely in row-major order
/// with X_1 varying fastest and Y_m slowest.
class JointDistribution {
public:
    /// Throws DataError on arities < 2, negative probabilities, a total more
    /// than 1e-9 away from 1, or a size mismatch; CapacityError past
    /// kMaxDistributionCells.
    JointDistribution(std::vector<int> source_arities, std::vector<int> target_arities, std::vector<double> pmf);

    int n_sources() const noexcept { return static_cast<int>(source_arities_.size()); }
    int n_targets() const noexcept { return static_cast<int>(target_arities_.size()); }
    std::span<const int> source_arities() const noexcept { return source_arities_; }
    std::span<const int> target_arities() const noexcept { return target_arities_; }
    std::span<const double> pmf() const noexcept { return pmf_; }
    std::size_t cells() const noexcept { return pmf_.size(); }

    /// Flat index of a full state (sources then targets).
    std::size_t cell_of(std::span<const int> state) const;
    std::vector<int> state_of(std::size_t cell) const;
    double probability(std::span<const int> state) const { return pmf_[cell_of(state)]; }

    /// Joint pmf of (X_sources, Y_targets) as a row-major |X_A| x |Y_B| table;
    /// masks select variables by bit (bit i-1 for variable i). An empty mask
    /// yields a single row or column.
    std::vector<double> marginal(std::uint32_t source_mask, std::uint32_t target_mask, std::size_t& rows,
                                 std::size_t& cols) const;

private:
    std::vector<int> source_arities_;
    std::vector<int> target_arities_;
    std::vector<double> pmf_;
};

/// I(X_A; Y_B) in bits.
double mutual_information(const JointDistribution& d, SourceSet sources, SourceSet targets);
/// I(X; Y) over all sources and all targets.
double mutual_information(const JointDistribution& d);

/// The four canonical test distributions on n binary sources and a binary
/// target: "uniform", "xor" (Y is the parity of the sources), "unq" (X_1 = Y,
/// other sources independent) and "red" (all variables equal).
JointDistribution canonical_distribution(std::string_view name, int n = 5);

enum class Measure { Min, Mmi };
Measure parse_measure(std::string_view name);
std::string_view measure_name(Measure m) noexcept;

/// Minimum mutual information: min over members a of I(X_a; Y).
double i_mmi(const JointDistribution& d, const Antichain& alpha);

/// Williams-Beer redundancy: sum_y p(y) min_a I_spec(Y=y; X_a) with
/// I_spec(y; A) = sum_x p(x|y) [log p(y|x) - log p(y)].
double i_min(const JointDistribution& d, const Antichain& alpha);

/// Double-MMI redundancy for the double lattice: min over a in alpha,
/// b in beta of I(X_a; Y_b).
double phiid_mmi(const JointDistribution& d, const Antichain& alpha, const Antichain& beta);

/// Evaluates a PID redundancy measure on many antichains, caching the
/// per-source quantities (mutual information for MMI, specific information
/// per target value for I_min). Requires a single target variable.
class RedundancyEvaluator {
public:
    RedundancyEvaluator(const JointDistribution& d, Measure measure);

    double operator()(const Antichain& alpha);
    Measure measure() const noexcept { return measure_; }

private:
    const std::vector<double>& specific_information(SourceSet s);
    double source_information(SourceSet s);

    const JointDistribution& dist_;
    Measure measure_;
    std::vector<double> target_pmf_;
    std::vector<std::optional<double>> mi_cache_;
    std::vector<std::vector<double>> spec_cache_;
};

/// Redundancy of every antichain in the table, in table order.
std::vector<double> redundancy_vector(const JointDistribution& d, const AntichainTable& table, Measure measure);

/// Double-MMI redundancy for every (source, target) antichain pair, indexed
/// i * |table| + j. Needs n_sources == n_targets == table.n().
std::vector<double> phiid_redundancy_vector(const JointDistribution& d, const AntichainTable& table);

enum class ColumnRole { Source, Target, Ignore };

/// Frequency estimate of the pmf from integer-coded observations. `rows`
/// holds one observation per entry with one value per column; `arities`
/// gives each column's alphabet size (missing or 0 entries are inferred as
/// max(2, largest value + 1)). Throws DataError on empty input, negative or
/// out-of-range symbols, and when no column is a source or target.
JointDistribution empirical_distribution(const std::vector<std::vector<int>>& rows, std::span<const ColumnRole> roles,
                                         std::span<const int> arities = {});

/// 1 where the value exceeds the median, else 0. Even lengths use the
/// midpoint of the two central values.
std::vector<int> median_binarize(std::span<const double> series);

/// {"source_arities":[...], "target_arities":[...], "pmf":[{"state":[...],"p":...}]};
/// omitted states have probability zero.
JointDistribution distribution_from_json(const nlohmann::json& j);
nlohmann::json distribution_to_json(const JointDistribution& d);

}  // namespace fastmobius
