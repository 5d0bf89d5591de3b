#include "fastmobius/measures.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "fastmobius/errors.hpp"

namespace fastmobius {

namespace {

constexpr int kMaxVariablesPerSide = 16;

double plogp_ratio(double pxy, double px, double py) {
    if (pxy < kProbabilityFloor || px < kProbabilityFloor || py < kProbabilityFloor) return 0.0;
    return pxy * std::log2(pxy / (px * py));
}

std::uint32_t mask_of(SourceSet s) { return s.mask(); }

void require_single_target(const JointDistribution& d) {
    if (d.n_targets() != 1) {
        throw DataError("PID redundancy measures need exactly one target variable, got " +
                        std::to_string(d.n_targets()));
    }
}

void require_sources_fit(const JointDistribution& d, const Antichain& alpha, const char* what) {
    if (alpha.n() > d.n_sources()) {
        throw DataError(std::string(what) + ": antichain over " + std::to_string(alpha.n()) +
                        " variables but the distribution has " + std::to_string(d.n_sources()) + " sources");
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// JointDistribution

JointDistribution::JointDistribution(std::vector<int> source_arities, std::vector<int> target_arities,
                                     std::vector<double> pmf)
    : source_arities_(std::move(source_arities)), target_arities_(std::move(target_arities)), pmf_(std::move(pmf)) {
    if (source_arities_.empty()) throw DataError("distribution needs at least one source variable");
    if (source_arities_.size() > kMaxVariablesPerSide || target_arities_.size() > kMaxVariablesPerSide) {
        throw CapacityError("at most 16 source and 16 target variables are supported");
    }
    std::size_t cells = 1;
    auto account = [&](int arity) {
        if (arity < 2) throw DataError("every variable needs arity >= 2, got " + std::to_string(arity));
        if (cells > kMaxDistributionCells / static_cast<std::size_t>(arity)) {
            throw CapacityError("joint alphabet exceeds the dense pmf cap of 2^26 cells");
        }
        cells *= static_cast<std::size_t>(arity);
    };
    for (int a : source_arities_) account(a);
    for (int a : target_arities_) account(a);
    if (pmf_.size() != cells) {
        throw DataError("pmf has " + std::to_string(pmf_.size()) + " cells, arities imply " + std::to_string(cells));
    }
    double total = 0.0;
    for (double p : pmf_) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw DataError("probabilities must be finite and non-negative");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw DataError("probabilities sum to " + std::to_string(total) + ", not 1");
    }
}

std::size_t JointDistribution::cell_of(std::span<const int> state) const {
    const std::size_t vars = source_arities_.size() + target_arities_.size();
    if (state.size() != vars) {
        throw DataError("state has " + std::to_string(state.size()) + " values, expected " + std::to_string(vars));
    }
    std::size_t cell = 0;
    std::size_t stride = 1;
    for (std::size_t v = 0; v < vars; ++v) {
        const int arity = v < source_arities_.size() ? source_arities_[v] : target_arities_[v - source_arities_.size()];
        if (state[v] < 0 || state[v] >= arity) {
            throw DataError("state value " + std::to_string(state[v]) + " outside alphabet of size " +
                            std::to_string(arity));
        }
        cell += static_cast<std::size_t>(state[v]) * stride;
        stride *= static_cast<std::size_t>(arity);
    }
    return cell;
}

std::vector<int> JointDistribution::state_of(std::size_t cell) const {
    std::vector<int> state;
    for (int a : source_arities_) {
        state.push_back(static_cast<int>(cell % a));
        cell /= a;
    }
    for (int a : target_arities_) {
        state.push_back(static_cast<int>(cell % a));
        cell /= a;
    }
    return state;
}

std::vector<double> JointDistribution::marginal(std::uint32_t source_mask, std::uint32_t target_mask,
                                                std::size_t& rows, std::size_t& cols) const {
    const std::size_t n = source_arities_.size();
    const std::size_t vars = n + target_arities_.size();
    if ((source_mask >> n) != 0 || (target_mask >> target_arities_.size()) != 0) {
        throw DataError("marginal selects variables the distribution does not have");
    }
    std::vector<int> arity(vars);
    std::vector<std::size_t> row_stride(vars, 0), col_stride(vars, 0);
    rows = 1;
    cols = 1;
    for (std::size_t v = 0; v < vars; ++v) {
        arity[v] = v < n ? source_arities_[v] : target_arities_[v - n];
        const bool in_rows = v < n && ((source_mask >> v) & 1U);
        const bool in_cols = v >= n && ((target_mask >> (v - n)) & 1U);
        if (in_rows) {
            row_stride[v] = rows;
            rows *= static_cast<std::size_t>(arity[v]);
        } else if (in_cols) {
            col_stride[v] = cols;
            cols *= static_cast<std::size_t>(arity[v]);
        }
    }
    std::vector<double> out(rows * cols, 0.0);
    // Odometer walk over all cells, updating the projected indices in place.
    std::vector<int> digit(vars, 0);
    std::size_t r = 0, c = 0;
    for (std::size_t cell = 0; cell < pmf_.size(); ++cell) {
        out[r * cols + c] += pmf_[cell];
        for (std::size_t v = 0; v < vars; ++v) {
            if (++digit[v] < arity[v]) {
                r += row_stride[v];
                c += col_stride[v];
                break;
            }
            digit[v] = 0;
            r -= row_stride[v] * static_cast<std::size_t>(arity[v] - 1);
            c -= col_stride[v] * static_cast<std::size_t>(arity[v] - 1);
        }
    }
    return out;
}

namespace {

double mutual_information_masks(const JointDistribution& d, std::uint32_t source_mask, std::uint32_t target_mask) {
    std::size_t rows = 0, cols = 0;
    const auto joint = d.marginal(source_mask, target_mask, rows, cols);
    std::vector<double> px(rows, 0.0), py(cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            px[r] += joint[r * cols + c];
            py[c] += joint[r * cols + c];
        }
    }
    double mi = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) mi += plogp_ratio(joint[r * cols + c], px[r], py[c]);
    }
    return std::max(mi, 0.0);
}

}  // namespace

double mutual_information(const JointDistribution& d, SourceSet sources, SourceSet targets) {
    return mutual_information_masks(d, mask_of(sources), mask_of(targets));
}

double mutual_information(const JointDistribution& d) {
    const auto all_sources = (std::uint32_t{1} << d.n_sources()) - 1U;
    const auto all_targets = (std::uint32_t{1} << d.n_targets()) - 1U;
    return mutual_information_masks(d, all_sources, all_targets);
}

// ---------------------------------------------------------------------------

JointDistribution canonical_distribution(std::string_view name, int n) {
    if (n < 1 || n > 20) throw CapacityError("canonical distributions support 1 <= n <= 20 sources");
    const std::size_t cells = std::size_t{1} << (n + 1);
    std::vector<double> pmf(cells, 0.0);
    const std::size_t y_bit = std::size_t{1} << n;
    for (std::size_t cell = 0; cell < cells; ++cell) {
        const auto x = static_cast<std::uint32_t>(cell & (y_bit - 1));
        const int y = (cell & y_bit) ? 1 : 0;
        if (name == "uniform") {
            pmf[cell] = 1.0 / static_cast<double>(cells);
        } else if (name == "xor") {
            if (std::popcount(x) % 2 == y) pmf[cell] = 1.0 / static_cast<double>(y_bit);
        } else if (name == "unq") {
            if (static_cast<int>(x & 1U) == y) pmf[cell] = 1.0 / static_cast<double>(y_bit);
        } else if (name == "red") {
            const std::uint32_t all = static_cast<std::uint32_t>(y_bit - 1);
            if ((y == 0 && x == 0) || (y == 1 && x == all)) pmf[cell] = 0.5;
        } else {
            throw DataError("unknown canonical distribution '" + std::string(name) +
                            "' (expected uniform, xor, unq or red)");
        }
    }
    return JointDistribution(std::vector<int>(static_cast<std::size_t>(n), 2), {2}, std::move(pmf));
}

Measure parse_measure(std::string_view name) {
    if (name == "min" || name == "imin") return Measure::Min;
    if (name == "mmi") return Measure::Mmi;
    throw UsageError("unknown measure '" + std::string(name) + "' (expected min or mmi)");
}

std::string_view measure_name(Measure m) noexcept { return m == Measure::Min ? "min" : "mmi"; }

// ---------------------------------------------------------------------------

RedundancyEvaluator::RedundancyEvaluator(const JointDistribution& d, Measure measure)
    : dist_(d), measure_(measure) {
    require_single_target(d);
    const std::size_t subsets = std::size_t{1} << d.n_sources();
    mi_cache_.resize(subsets);
    if (measure == Measure::Min) {
        spec_cache_.resize(subsets);
        std::size_t rows = 0, cols = 0;
        target_pmf_ = d.marginal(0, 1U, rows, cols);
    }
}

double RedundancyEvaluator::source_information(SourceSet s) {
    auto& slot = mi_cache_[s.mask()];
    if (!slot) slot = mutual_information_masks(dist_, s.mask(), 1U);
    return *slot;
}

const std::vector<double>& RedundancyEvaluator::specific_information(SourceSet s) {
    auto& spec = spec_cache_[s.mask()];
    if (!spec.empty()) return spec;
    std::size_t rows = 0, cols = 0;
    const auto joint = dist_.marginal(s.mask(), 1U, rows, cols);
    std::vector<double> px(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) px[r] += joint[r * cols + c];
    }
    spec.assign(cols, 0.0);
    for (std::size_t c = 0; c < cols; ++c) {
        const double py = target_pmf_[c];
        if (py < kProbabilityFloor) continue;
        double total = 0.0;
        for (std::size_t r = 0; r < rows; ++r) {
            // p(x|y) [log p(y|x) - log p(y)] = p(x,y)/p(y) * log(p(x,y) / (p(x) p(y)))
            total += plogp_ratio(joint[r * cols + c], px[r], py) / py;
        }
        spec[c] = total;
    }
    return spec;
}

double RedundancyEvaluator::operator()(const Antichain& alpha) {
    require_sources_fit(dist_, alpha, "redundancy");
    if (measure_ == Measure::Mmi) {
        double best = std::numeric_limits<double>::infinity();
        for (SourceSet s : alpha.members()) best = std::min(best, source_information(s));
        return best;
    }
    std::vector<double> best(target_pmf_.size(), std::numeric_limits<double>::infinity());
    for (SourceSet s : alpha.members()) {
        const auto& spec = specific_information(s);
        for (std::size_t y = 0; y < best.size(); ++y) best[y] = std::min(best[y], spec[y]);
    }
    double total = 0.0;
    for (std::size_t y = 0; y < best.size(); ++y) {
        if (target_pmf_[y] >= kProbabilityFloor) total += target_pmf_[y] * best[y];
    }
    return total;
}

double i_mmi(const JointDistribution& d, const Antichain& alpha) {
    RedundancyEvaluator eval(d, Measure::Mmi);
    return eval(alpha);
}

double i_min(const JointDistribution& d, const Antichain& alpha) {
    RedundancyEvaluator eval(d, Measure::Min);
    return eval(alpha);
}

double phiid_mmi(const JointDistribution& d, const Antichain& alpha, const Antichain& beta) {
    require_sources_fit(d, alpha, "phiid_mmi");
    if (beta.n() > d.n_targets()) throw DataError("phiid_mmi: target antichain exceeds the target count");
    double best = std::numeric_limits<double>::infinity();
    for (SourceSet a : alpha.members()) {
        for (SourceSet b : beta.members()) best = std::min(best, mutual_information(d, a, b));
    }
    return best;
}

std::vector<double> redundancy_vector(const JointDistribution& d, const AntichainTable& table, Measure measure) {
    if (table.n() != d.n_sources()) {
        throw DataError("table is for n = " + std::to_string(table.n()) + " but the distribution has " +
                        std::to_string(d.n_sources()) + " sources");
    }
    RedundancyEvaluator eval(d, measure);
    std::vector<double> out;
    out.reserve(table.size());
    for (const auto& alpha : table.entries()) out.push_back(eval(alpha));
    return out;
}

std::vector<double> phiid_redundancy_vector(const JointDistribution& d, const AntichainTable& table) {
    const int n = table.n();
    if (d.n_sources() != n || d.n_targets() != n) {
        throw DataError("double-lattice redundancy needs " + std::to_string(n) + " sources and " +
                        std::to_string(n) + " targets");
    }
    const std::size_t subsets = std::size_t{1} << n;
    std::vector<double> mi(subsets * subsets, 0.0);
    for (std::uint32_t a = 1; a < subsets; ++a) {
        for (std::uint32_t b = 1; b < subsets; ++b) mi[a * subsets + b] = mutual_information_masks(d, a, b);
    }
    const std::size_t size = table.size();
    std::vector<double> out(size * size);
    for (std::size_t i = 0; i < size; ++i) {
        for (std::size_t j = 0; j < size; ++j) {
            double best = std::numeric_limits<double>::infinity();
            for (SourceSet a : table[i].members()) {
                for (SourceSet b : table[j].members()) best = std::min(best, mi[a.mask() * subsets + b.mask()]);
            }
            out[i * size + j] = best;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

JointDistribution empirical_distribution(const std::vector<std::vector<int>>& rows, std::span<const ColumnRole> roles,
                                         std::span<const int> arities) {
    if (rows.empty()) throw DataError("no samples");
    const std::size_t columns = roles.size();
    std::vector<int> arity(columns, 0);
    for (std::size_t c = 0; c < columns && c < arities.size(); ++c) arity[c] = arities[c];
    std::vector<int> observed_max(columns, 0);
    for (const auto& row : rows) {
        if (row.size() != columns) {
            throw DataError("sample has " + std::to_string(row.size()) + " values, expected " +
                            std::to_string(columns));
        }
        for (std::size_t c = 0; c < columns; ++c) {
            if (roles[c] == ColumnRole::Ignore) continue;
            if (row[c] < 0) throw DataError("negative symbol " + std::to_string(row[c]) + " in column " +
                                            std::to_string(c));
            if (arity[c] > 0 && row[c] >= arity[c]) {
                throw DataError("symbol " + std::to_string(row[c]) + " in column " + std::to_string(c) +
                                " outside declared arity " + std::to_string(arity[c]));
            }
            observed_max[c] = std::max(observed_max[c], row[c]);
        }
    }
    std::vector<std::size_t> source_cols, target_cols;
    std::vector<int> source_arities, target_arities;
    for (std::size_t c = 0; c < columns; ++c) {
        const int a = arity[c] > 0 ? arity[c] : std::max(2, observed_max[c] + 1);
        if (roles[c] == ColumnRole::Source) {
            source_cols.push_back(c);
            source_arities.push_back(a);
        } else if (roles[c] == ColumnRole::Target) {
            target_cols.push_back(c);
            target_arities.push_back(a);
        }
    }
    if (source_cols.empty()) throw DataError("no source columns selected");

    std::size_t cells = 1;
    std::vector<int> all_arities = source_arities;
    all_arities.insert(all_arities.end(), target_arities.begin(), target_arities.end());
    for (int a : all_arities) {
        if (cells > kMaxDistributionCells / static_cast<std::size_t>(a)) {
            throw CapacityError("joint alphabet exceeds the dense pmf cap of 2^26 cells");
        }
        cells *= static_cast<std::size_t>(a);
    }
    if (cells > kMaxDistributionCells) throw CapacityError("joint alphabet exceeds the dense pmf cap of 2^26 cells");

    std::vector<std::uint64_t> counts(cells, 0);
    for (const auto& row : rows) {
        std::size_t cell = 0, stride = 1;
        for (std::size_t k = 0; k < source_cols.size(); ++k) {
            cell += static_cast<std::size_t>(row[source_cols[k]]) * stride;
            stride *= static_cast<std::size_t>(source_arities[k]);
        }
        for (std::size_t k = 0; k < target_cols.size(); ++k) {
            cell += static_cast<std::size_t>(row[target_cols[k]]) * stride;
            stride *= static_cast<std::size_t>(target_arities[k]);
        }
        ++counts[cell];
    }
    std::vector<double> pmf(cells);
    const auto total = static_cast<double>(rows.size());
    for (std::size_t i = 0; i < cells; ++i) pmf[i] = static_cast<double>(counts[i]) / total;
    return JointDistribution(std::move(source_arities), std::move(target_arities), std::move(pmf));
}

std::vector<int> median_binarize(std::span<const double> series) {
    if (series.empty()) throw DataError("cannot binarize an empty series");
    std::vector<double> sorted(series.begin(), series.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    const double median = sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
    std::vector<int> out;
    out.reserve(series.size());
    for (double v : series) out.push_back(v > median ? 1 : 0);
    return out;
}

// ---------------------------------------------------------------------------

JointDistribution distribution_from_json(const nlohmann::json& j) {
    try {
        auto sources = j.at("source_arities").get<std::vector<int>>();
        auto targets = j.at("target_arities").get<std::vector<int>>();
        std::size_t cells = 1;
        for (int a : sources) {
            if (a < 2) throw DataError("every variable needs arity >= 2");
            cells *= static_cast<std::size_t>(a);
            if (cells > kMaxDistributionCells) throw CapacityError("joint alphabet exceeds 2^26 cells");
        }
        for (int a : targets) {
            if (a < 2) throw DataError("every variable needs arity >= 2");
            cells *= static_cast<std::size_t>(a);
            if (cells > kMaxDistributionCells) throw CapacityError("joint alphabet exceeds 2^26 cells");
        }
        // Build with a placeholder pmf only to reuse the state indexing.
        std::vector<double> placeholder(cells, 0.0);
        placeholder[0] = 1.0;
        const JointDistribution shape(sources, targets, placeholder);
        std::vector<double> pmf(cells, 0.0);
        std::vector<bool> seen(cells, false);
        for (const auto& entry : j.at("pmf")) {
            const auto state = entry.at("state").get<std::vector<int>>();
            const std::size_t cell = shape.cell_of(state);
            if (seen[cell]) throw DataError("state listed twice in pmf");
            seen[cell] = true;
            pmf[cell] = entry.at("p").get<double>();
        }
        return JointDistribution(std::move(sources), std::move(targets), std::move(pmf));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed distribution JSON: ") + e.what());
    }
}

nlohmann::json distribution_to_json(const JointDistribution& d) {
    nlohmann::json j;
    j["source_arities"] = std::vector<int>(d.source_arities().begin(), d.source_arities().end());
    j["target_arities"] = std::vector<int>(d.target_arities().begin(), d.target_arities().end());
    auto pmf = nlohmann::json::array();
    for (std::size_t cell = 0; cell < d.cells(); ++cell) {
        if (d.pmf()[cell] == 0.0) continue;
        pmf.push_back({{"state", d.state_of(cell)}, {"p", d.pmf()[cell]}});
    }
    j["pmf"] = std::move(pmf);
    return j;
}

}  // namespace fastmobius
