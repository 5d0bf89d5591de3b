#include "fastmobius/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "fastmobius/dynamics.hpp"
#include "fastmobius/errors.hpp"
#include "fastmobius/lattice.hpp"
#include "fastmobius/matrix_io.hpp"
#include "fastmobius/measures.hpp"
#include "fastmobius/mobius.hpp"

namespace fastmobius::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", v);
    std::string s(buf);
    if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
    return s;
}

namespace {

enum class Format { Text, Csv, Json };

struct Config {
    std::string command;
    int n = 0;
    std::string measure = "mmi";
    std::string matrix;
    std::string out;
    std::string format = "text";
    std::uint64_t seed = 0;
    std::size_t shuffles = 20;
    unsigned threads = 1;

    std::string dist;
    std::string samples;
    std::string sources;
    std::string targets;
    std::string roles;
    bool binarize = false;
    bool build_in_memory = false;

    std::string sequence;
    int alphabet = 0;
    std::size_t top = 20;

    std::string encoding = "deflate";
    std::string export_text;

    std::string source;
    std::string target;
};

Format parse_format(const std::string& s) {
    if (s == "text") return Format::Text;
    if (s == "csv") return Format::Csv;
    if (s == "json") return Format::Json;
    throw UsageError("unknown format '" + s + "' (expected csv, json or text)");
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// CSV

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        rows.push_back(split(line, ','));
    }
    if (rows.empty()) throw DataError(path + " is empty");
    return rows;
}

std::optional<long long> parse_int(const std::string& s) {
    if (s.empty()) return std::nullopt;
    std::size_t used = 0;
    try {
        const long long v = std::stoll(s, &used);
        if (used != s.size()) return std::nullopt;
        return v;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

double parse_double(const std::string& s, const std::string& where) {
    std::size_t used = 0;
    try {
        const double v = std::stod(s, &used);
        if (used == s.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw DataError("not a number at " + where + ": '" + s + "'");
}

// ---------------------------------------------------------------------------
// Inputs

std::vector<std::size_t> resolve_columns(const std::string& list, const std::vector<std::string>& header) {
    std::vector<std::size_t> out;
    if (list.empty()) return out;
    for (const auto& item : split(list, ',')) {
        const auto named = std::find(header.begin(), header.end(), item);
        if (named != header.end()) {
            out.push_back(static_cast<std::size_t>(named - header.begin()));
        } else if (auto idx = parse_int(item); idx && *idx >= 1 && static_cast<std::size_t>(*idx) <= header.size()) {
            out.push_back(static_cast<std::size_t>(*idx - 1));
        } else {
            throw UsageError("unknown column '" + item + "'");
        }
    }
    return out;
}

JointDistribution load_samples(const Config& cfg) {
    const auto rows = read_csv(cfg.samples);
    const auto& header = rows.front();
    std::vector<ColumnRole> roles(header.size(), ColumnRole::Ignore);
    if (!cfg.roles.empty()) {
        if (!cfg.sources.empty() || !cfg.targets.empty()) throw UsageError("--roles excludes --sources/--targets");
        std::ifstream in(cfg.roles);
        if (!in) throw DataError("cannot open " + cfg.roles);
        const json j = json::parse(in);
        if (!j.is_object()) throw DataError("roles file must map column names to source/target/ignore");
        for (const auto& [name, role] : j.items()) {
            const auto it = std::find(header.begin(), header.end(), name);
            if (it == header.end()) throw DataError("roles file names unknown column '" + name + "'");
            const auto r = role.get<std::string>();
            const auto c = static_cast<std::size_t>(it - header.begin());
            if (r == "source") {
                roles[c] = ColumnRole::Source;
            } else if (r == "target") {
                roles[c] = ColumnRole::Target;
            } else if (r != "ignore") {
                throw DataError("unknown role '" + r + "' for column '" + name + "'");
            }
        }
    } else {
        if (cfg.sources.empty() || cfg.targets.empty()) {
            throw UsageError("--samples needs --sources and --targets, or --roles");
        }
        for (auto c : resolve_columns(cfg.sources, header)) roles[c] = ColumnRole::Source;
        for (auto c : resolve_columns(cfg.targets, header)) {
            if (roles[c] == ColumnRole::Source) throw UsageError("column '" + header[c] + "' is both source and target");
            roles[c] = ColumnRole::Target;
        }
    }

    const std::size_t width = header.size();
    const std::size_t count = rows.size() - 1;
    if (count == 0) throw DataError(cfg.samples + " has a header but no samples");
    std::vector<std::vector<int>> data(count, std::vector<int>(width, 0));
    for (std::size_t c = 0; c < width; ++c) {
        if (roles[c] == ColumnRole::Ignore) continue;
        std::vector<double> column(count);
        for (std::size_t r = 0; r < count; ++r) {
            const auto& row = rows[r + 1];
            if (row.size() != width) {
                throw DataError("row " + std::to_string(r + 2) + " has " + std::to_string(row.size()) +
                                " fields, expected " + std::to_string(width));
            }
            const std::string where = "row " + std::to_string(r + 2) + ", column '" + header[c] + "'";
            if (cfg.binarize) {
                column[r] = parse_double(row[c], where);
            } else {
                const auto v = parse_int(row[c]);
                if (!v) throw DataError("expected an integer symbol at " + where + ": '" + row[c] + "'");
                if (*v < 0 || *v > 1'000'000) throw DataError("symbol out of range at " + where);
                data[r][c] = static_cast<int>(*v);
            }
        }
        if (cfg.binarize) {
            const auto bits = median_binarize(column);
            for (std::size_t r = 0; r < count; ++r) data[r][c] = bits[r];
        }
    }
    return empirical_distribution(data, roles);
}

JointDistribution load_distribution(const Config& cfg) {
    if (cfg.dist.empty() == cfg.samples.empty()) throw UsageError("give exactly one of --dist or --samples");
    if (!cfg.samples.empty()) {
        auto d = load_samples(cfg);
        if (cfg.n != 0 && cfg.n != d.n_sources()) throw UsageError("--n disagrees with the number of source columns");
        return d;
    }
    constexpr std::string_view prefix = "canonical:";
    if (cfg.dist.rfind(prefix, 0) == 0) {
        const auto name = cfg.dist.substr(prefix.size());
        if (name != "uniform" && name != "xor" && name != "unq" && name != "red") {
            throw UsageError("unknown canonical distribution '" + name + "' (expected uniform, xor, unq or red)");
        }
        return canonical_distribution(name, cfg.n == 0 ? 5 : cfg.n);
    }
    std::ifstream in(cfg.dist);
    if (!in) throw DataError("cannot open " + cfg.dist);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(cfg.dist + ": " + e.what());
    }
    auto d = distribution_from_json(j);
    if (cfg.n != 0 && cfg.n != d.n_sources()) throw UsageError("--n disagrees with the distribution's source count");
    return d;
}

fs::path default_matrix_path(int n) {
    const char* dir = std::getenv("FASTMOBIUS_MATRIX_DIR");
    const fs::path base = dir && *dir ? fs::path(dir) : fs::current_path();
    return base / ("mobius_n" + std::to_string(n) + ".fmob");
}

void check_lattice_n(int n) {
    if (n < 2 || n > kDefaultMaxLatticeVariables) {
        throw CapacityError("n = " + std::to_string(n) + " is outside the supported range 2..5");
    }
}

SparseMobiusMatrix acquire_matrix(const Config& cfg, int n) {
    check_lattice_n(n);
    auto load = [&](const fs::path& path) {
        auto m = load_matrix_file(path);
        if (m.n() != n) {
            throw DataError("matrix file " + path.string() + " is for n = " + std::to_string(m.n()) + ", need n = " +
                            std::to_string(n));
        }
        return m;
    };
    if (!cfg.matrix.empty()) return load(cfg.matrix);
    if (n <= 4 || cfg.build_in_memory) return build_mobius_matrix(enumerate_antichains(n), cfg.threads);
    const auto path = default_matrix_path(n);
    if (fs::exists(path)) return load(path);
    throw UsageError("n = 5 needs a precomputed matrix: run 'fastmobius mobius --n 5', pass --matrix FILE, or use "
                     "--build-in-memory (looked for " +
                     path.string() + ")");
}

SymbolicSequence load_sequence(const Config& cfg) {
    const auto rows = read_csv(cfg.sequence);
    std::size_t first = 0;
    if (!std::all_of(rows.front().begin(), rows.front().end(), [](const auto& s) { return parse_int(s).has_value(); })) {
        first = 1;  // header
    }
    std::vector<std::vector<int>> data;
    for (std::size_t r = first; r < rows.size(); ++r) {
        std::vector<int> row;
        for (const auto& field : rows[r]) {
            const auto v = parse_int(field);
            if (!v || *v < 0 || *v > 65534) {
                throw DataError("bad symbol '" + field + "' on line " + std::to_string(r + 1));
            }
            row.push_back(static_cast<int>(*v));
        }
        data.push_back(std::move(row));
    }
    if (data.empty()) throw DataError(cfg.sequence + " has no time steps");
    return SymbolicSequence::from_rows(data, cfg.alphabet);
}

// ---------------------------------------------------------------------------
// Commands

void cmd_lattice(const Config& cfg, std::ostream& out) {
    check_lattice_n(cfg.n);
    const auto table = enumerate_antichains(cfg.n);
    const std::size_t size = table.size();
    std::vector<std::size_t> down(size, 0);
    for (std::size_t i = 0; i < size; ++i) {
        for (std::size_t j = 0; j < size; ++j) down[i] += table.leq(j, i) ? 1 : 0;
    }
    switch (parse_format(cfg.format)) {
        case Format::Text:
            for (std::size_t i = 0; i < size; ++i) out << i << ' ' << table[i].to_string() << ' ' << down[i] << '\n';
            break;
        case Format::Csv:
            out << "index,antichain,down_set_size\n";
            for (std::size_t i = 0; i < size; ++i) out << i << ',' << table[i].to_string() << ',' << down[i] << '\n';
            break;
        case Format::Json: {
            json items = json::array();
            for (std::size_t i = 0; i < size; ++i) {
                items.push_back({{"index", i}, {"antichain", table[i].to_string()}, {"down_set_size", down[i]}});
            }
            out << dump_json({{"n", cfg.n}, {"count", size}, {"antichains", items}});
            break;
        }
    }
}

void cmd_mobius(const Config& cfg, std::ostream& out, std::ostream& err) {
    check_lattice_n(cfg.n);
    MatrixEncoding encoding;
    if (cfg.encoding == "deflate") {
        encoding = MatrixEncoding::Deflate;
    } else if (cfg.encoding == "raw") {
        encoding = MatrixEncoding::Raw;
    } else {
        throw UsageError("unknown encoding '" + cfg.encoding + "' (expected deflate or raw)");
    }
    const fs::path path = cfg.out.empty() ? default_matrix_path(cfg.n) : fs::path(cfg.out);

    const auto start = std::chrono::steady_clock::now();
    auto table = std::make_shared<const AntichainTable>(enumerate_antichains(cfg.n));
    const auto m = build_mobius_matrix(table, cfg.threads);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const auto bytes = save_matrix(m, encoding);
    {
        std::ofstream file(path, std::ios::binary);
        if (!file) throw DataError("cannot open " + path.string() + " for writing");
        file.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!file) throw DataError("failed writing " + path.string());
    }
    if (!cfg.export_text.empty()) {
        std::ofstream file(cfg.export_text);
        if (!file) throw DataError("cannot open " + cfg.export_text + " for writing");
        file << export_matrix_text(m);
    }

    char density[32];
    std::snprintf(density, sizeof density, "%.4f%%", 100.0 * m.density());
    switch (parse_format(cfg.format)) {
        case Format::Text:
            out << "n=" << cfg.n << " antichains=" << m.dimension() << " nonzeros=" << m.nonzeros()
                << " density=" << density << " bytes=" << bytes.size() << " file=" << path.string() << '\n';
            break;
        case Format::Csv:
            out << "n,antichains,nonzeros,density,bytes,file\n"
                << cfg.n << ',' << m.dimension() << ',' << m.nonzeros() << ',' << m.density() << ',' << bytes.size()
                << ',' << path.string() << '\n';
            break;
        case Format::Json:
            out << dump_json({{"n", cfg.n},
                              {"antichains", m.dimension()},
                              {"nonzeros", m.nonzeros()},
                              {"density", m.density()},
                              {"bytes", bytes.size()},
                              {"file", path.string()}});
            break;
    }
    char wall[64];
    std::snprintf(wall, sizeof wall, "wall time %.3f s\n", seconds);
    err << wall;
}

int cmd_pid(const Config& cfg, std::ostream& out, std::ostream& err) {
    const auto measure = parse_measure(cfg.measure);
    const auto format = parse_format(cfg.format);
    const auto d = load_distribution(cfg);
    const auto m = acquire_matrix(cfg, d.n_sources());
    const auto& table = m.table();
    const auto v = redundancy_vector(d, table, measure);
    const auto atoms = pid_atoms(v, m);

    double sum = 0.0;
    for (double a : atoms) sum += a;
    const double mi = mutual_information(d);
    const bool consistent = std::abs(sum - mi) <= 1e-9;

    switch (format) {
        case Format::Text:
            out << "# n=" << table.n() << " measure=" << measure_name(measure) << "\n";
            out << "antichain redundancy atom\n";
            for (std::size_t i = 0; i < table.size(); ++i) {
                out << table[i].to_string() << ' ' << format_value(v[i]) << ' ' << format_value(atoms[i]) << '\n';
            }
            out << "total " << format_value(mi) << ' ' << format_value(sum) << '\n';
            break;
        case Format::Csv:
            out << "antichain,redundancy,atom\n";
            for (std::size_t i = 0; i < table.size(); ++i) {
                out << table[i].to_string() << ',' << format_value(v[i]) << ',' << format_value(atoms[i]) << '\n';
            }
            out << "total," << format_value(mi) << ',' << format_value(sum) << '\n';
            break;
        case Format::Json: {
            json items = json::array();
            for (std::size_t i = 0; i < table.size(); ++i) {
                items.push_back({{"antichain", table[i].to_string()}, {"redundancy", v[i]}, {"atom", atoms[i]}});
            }
            out << dump_json({{"n", table.n()},
                              {"measure", measure_name(measure)},
                              {"atoms", items},
                              {"total", {{"mutual_information", mi}, {"atom_sum", sum}, {"consistent", consistent}}}});
            break;
        }
    }
    if (!consistent) {
        err << "error: atoms sum to " << format_value(sum) << " but I(X;Y) = " << format_value(mi) << '\n';
        return kData;
    }
    return kOk;
}

void cmd_synergy(const Config& cfg, std::ostream& out) {
    const auto measure = parse_measure(cfg.measure);
    const auto format = parse_format(cfg.format);
    const auto d = load_distribution(cfg);
    const int n = d.n_sources();
    if (n < 1 || n > kMaxSourceVariables) throw CapacityError("synergy supports up to 16 sources");
    RedundancyEvaluator eval(d, measure);
    std::map<std::string, double> redundancy;
    const auto terms = top_synergy_terms(n);
    for (const auto& [alpha, sign] : terms) redundancy[alpha.to_string()] = eval(alpha);
    const double value = top_synergy_atom(n, redundancy);

    switch (format) {
        case Format::Text:
            for (const auto& [alpha, sign] : terms) {
                out << (sign > 0 ? '+' : '-') << ' ' << alpha.to_string() << ' '
                    << format_value(redundancy[alpha.to_string()]) << '\n';
            }
            out << "synergy " << Antichain::top(n).to_string() << ' ' << format_value(value) << '\n';
            break;
        case Format::Csv:
            out << "sign,antichain,redundancy\n";
            for (const auto& [alpha, sign] : terms) {
                out << sign << ',' << alpha.to_string() << ',' << format_value(redundancy[alpha.to_string()]) << '\n';
            }
            out << "synergy," << Antichain::top(n).to_string() << ',' << format_value(value) << '\n';
            break;
        case Format::Json: {
            json items = json::array();
            for (const auto& [alpha, sign] : terms) {
                items.push_back(
                    {{"antichain", alpha.to_string()}, {"sign", sign}, {"redundancy", redundancy[alpha.to_string()]}});
            }
            out << dump_json({{"n", n},
                              {"measure", measure_name(measure)},
                              {"terms", items},
                              {"atom", Antichain::top(n).to_string()},
                              {"synergy", value}});
            break;
        }
    }
}

void cmd_phiid(const Config& cfg, std::ostream& out, std::ostream& err) {
    const auto format = parse_format(cfg.format);
    if (cfg.sequence.empty()) throw UsageError("phiid needs --sequence FILE");
    const auto seq = load_sequence(cfg);
    const int k = seq.channels();
    if (k < 2 || k > 4) throw CapacityError("phiid supports 2..4 channels, got " + std::to_string(k));
    if (cfg.n != 0 && cfg.n != k) throw UsageError("--n disagrees with the sequence's channel count");

    std::shared_ptr<const SparseMobiusMatrix> m;
    if (!cfg.matrix.empty()) {
        auto loaded = load_matrix_file(cfg.matrix);
        if (loaded.n() != k) throw DataError("matrix file is for n = " + std::to_string(loaded.n()));
        m = std::make_shared<const SparseMobiusMatrix>(std::move(loaded));
    } else {
        m = std::make_shared<const SparseMobiusMatrix>(build_mobius_matrix(enumerate_antichains(k), 1));
    }
    const PhiidEngine engine(m);
    const auto result = shuffle_null_correction(seq, cfg.shuffles, cfg.seed, engine, cfg.threads);
    for (const auto& w : result.warnings) err << "warning: " << w << '\n';

    const auto deduped = dedupe_consecutive(seq);
    const auto model = transition_distribution(deduped);
    const std::uint32_t all = (std::uint32_t{1} << k) - 1U;
    const double mi = model.direct_mutual_information(all, all);
    double sum = 0.0;
    for (double a : result.observed) sum += a;

    const auto& table = engine.table();
    const std::size_t size = table.size();
    const auto membership = category_membership(table);
    const auto report = category_report(result.corrected, membership);
    auto atom_name = [&](std::size_t idx) {
        return std::pair{table[idx / size].to_string(), table[idx % size].to_string()};
    };

    switch (format) {
        case Format::Json: {
            json atoms = json::array();
            for (std::size_t idx = 0; idx < result.observed.size(); ++idx) {
                const auto [s, t] = atom_name(idx);
                atoms.push_back({{"source", s},
                                 {"target", t},
                                 {"raw", result.observed[idx]},
                                 {"corrected", result.corrected[idx]},
                                 {"null_sd", result.null_sd[idx]}});
            }
            json cats = json::object();
            for (const auto& c : report) {
                cats[std::string(category_name(c.category))] = {
                    {"members", c.members.size()}, {"mean_abs", c.mean_abs}, {"sem", c.sem}};
            }
            out << dump_json({{"channels", k},
                              {"alphabet", seq.alphabet()},
                              {"length", seq.length()},
                              {"deduped_length", deduped.length()},
                              {"distinct_transitions", model.entries().size()},
                              {"shuffles", cfg.shuffles},
                              {"seed", cfg.seed},
                              {"mutual_information", mi},
                              {"atom_sum", sum},
                              {"atoms", atoms},
                              {"categories", cats},
                              {"warnings", result.warnings}});
            break;
        }
        case Format::Csv:
            out << "source,target,raw,corrected,null_sd\n";
            for (std::size_t idx = 0; idx < result.observed.size(); ++idx) {
                const auto [s, t] = atom_name(idx);
                out << s << ',' << t << ',' << format_value(result.observed[idx]) << ','
                    << format_value(result.corrected[idx]) << ',' << format_value(result.null_sd[idx]) << '\n';
            }
            break;
        case Format::Text: {
            out << "channels " << k << " alphabet " << seq.alphabet() << " steps " << seq.length() << " deduped "
                << deduped.length() << " shuffles " << cfg.shuffles << '\n';
            out << "I(X_t;X_t+1) " << format_value(mi) << " atom_sum " << format_value(sum) << '\n';
            out << "category members mean_abs sem\n";
            for (const auto& c : report) {
                out << category_name(c.category) << ' ' << c.members.size() << ' ' << format_value(c.mean_abs) << ' '
                    << format_value(c.sem) << '\n';
            }
            std::vector<std::size_t> order(result.corrected.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            const std::size_t shown = std::min(cfg.top, order.size());
            std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(shown), order.end(),
                              [&](std::size_t a, std::size_t b) {
                                  const double x = std::abs(result.corrected[a]), y = std::abs(result.corrected[b]);
                                  return x != y ? x > y : a < b;
                              });
            out << "atom raw corrected\n";
            for (std::size_t i = 0; i < shown; ++i) {
                const auto [s, t] = atom_name(order[i]);
                out << s << "->" << t << ' ' << format_value(result.observed[order[i]]) << ' '
                    << format_value(result.corrected[order[i]]) << '\n';
            }
            break;
        }
    }
}

int infer_channels(const std::string& text) {
    int n = 2;
    for (char c : text) {
        if (c >= '1' && c <= '9') n = std::max(n, c - '0');
    }
    return n;
}

void cmd_classify(const Config& cfg, std::ostream& out) {
    const auto format = parse_format(cfg.format);
    if (cfg.source.empty() != cfg.target.empty()) throw UsageError("give both --source and --target, or neither");
    if (cfg.source.empty()) {
        if (cfg.n == 0) throw UsageError("classify without --source/--target needs --n");
        if (cfg.n < 2 || cfg.n > 4) throw CapacityError("category tables support 2..4 channels");
        const auto table = enumerate_antichains(cfg.n);
        const auto membership = category_membership(table);
        switch (format) {
            case Format::Text:
                for (std::size_t c = 0; c < kAllCategories.size(); ++c) {
                    out << category_name(kAllCategories[c]) << ' ' << membership[c].size() << '\n';
                }
                break;
            case Format::Csv:
                out << "category,members\n";
                for (std::size_t c = 0; c < kAllCategories.size(); ++c) {
                    out << category_name(kAllCategories[c]) << ',' << membership[c].size() << '\n';
                }
                break;
            case Format::Json: {
                json j = json::object();
                for (std::size_t c = 0; c < kAllCategories.size(); ++c) {
                    j[std::string(category_name(kAllCategories[c]))] = membership[c].size();
                }
                out << dump_json({{"n", cfg.n}, {"category_sizes", j}});
                break;
            }
        }
        return;
    }
    const int n = cfg.n != 0 ? cfg.n : std::max(infer_channels(cfg.source), infer_channels(cfg.target));
    const auto alpha = Antichain::parse(cfg.source, n);
    const auto beta = Antichain::parse(cfg.target, n);
    const auto cats = classify_atom(alpha, beta);
    std::vector<std::string> names;
    for (auto name : cats.names()) names.emplace_back(name);
    switch (format) {
        case Format::Text:
        case Format::Csv: {
            out << alpha.to_string() << "->" << beta.to_string() << (format == Format::Csv ? "," : " ");
            for (std::size_t i = 0; i < names.size(); ++i) out << (i ? ";" : "") << names[i];
            if (names.empty() && format == Format::Text) out << "none";
            out << '\n';
            break;
        }
        case Format::Json:
            out << dump_json({{"source", alpha.to_string()}, {"target", beta.to_string()}, {"categories", names}});
            break;
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Config cfg;
    CLI::App app{"Partial and integrated information decomposition via the closed-form Möbius function",
                 "fastmobius"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--n", cfg.n, "number of source variables / channels");
    app.add_option("--measure", cfg.measure, "redundancy measure: min or mmi");
    app.add_option("--matrix", cfg.matrix, "precomputed Möbius matrix file");
    app.add_option("--out", cfg.out, "output file (matrix path for 'mobius')");
    app.add_option("--format", cfg.format, "csv, json or text");
    app.add_option("--seed", cfg.seed, "shuffle seed");
    app.add_option("--shuffles", cfg.shuffles, "shuffle-null replicates");
    app.add_option("--threads", cfg.threads, "worker threads (0 = all cores)");

    auto* lattice = app.add_subcommand("lattice", "list the redundancy lattice in canonical order");
    auto* mobius = app.add_subcommand("mobius", "build and save the sparse Möbius matrix");
    mobius->add_option("--encoding", cfg.encoding, "deflate (default) or raw");
    mobius->add_option("--export-text", cfg.export_text, "also write the plain-text 'i j v' dump");

    auto* pid = app.add_subcommand("pid", "all PID atoms of a distribution");
    auto* synergy = app.add_subcommand("synergy", "top synergy atom from 2^n redundancies");
    for (auto* sub : {pid, synergy}) {
        sub->add_option("--dist", cfg.dist, "canonical:NAME or a distribution JSON file");
        sub->add_option("--samples", cfg.samples, "CSV of integer-coded samples with a header row");
        sub->add_option("--sources", cfg.sources, "comma-separated source columns (names or 1-based)");
        sub->add_option("--targets", cfg.targets, "comma-separated target columns");
        sub->add_option("--roles", cfg.roles, "JSON sidecar mapping column names to source/target/ignore");
        sub->add_flag("--binarize", cfg.binarize, "median-binarize real-valued sample columns");
    }
    pid->add_flag("--build-in-memory", cfg.build_in_memory, "build the n = 5 matrix instead of loading it");

    auto* phiid = app.add_subcommand("phiid", "integrated decomposition of a symbolic time series");
    phiid->add_option("--sequence", cfg.sequence, "CSV, one row per time step, one column per channel");
    phiid->add_option("--alphabet", cfg.alphabet, "alphabet size (default: largest symbol + 1)");
    phiid->add_option("--top", cfg.top, "atoms listed in text output");

    auto* classify = app.add_subcommand("classify", "information-dynamics categories of an atom");
    classify->add_option("--source", cfg.source, "source antichain, e.g. (123)");
    classify->add_option("--target", cfg.target, "target antichain, e.g. (4)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    std::ostringstream buffer;
    const bool redirect = !cfg.out.empty() && !mobius->parsed();
    std::ostream& sink = redirect ? static_cast<std::ostream&>(buffer) : out;
    int code = kOk;
    try {
        if (lattice->parsed()) {
            cmd_lattice(cfg, sink);
        } else if (mobius->parsed()) {
            cmd_mobius(cfg, sink, err);
        } else if (pid->parsed()) {
            code = cmd_pid(cfg, sink, err);
        } else if (synergy->parsed()) {
            cmd_synergy(cfg, sink);
        } else if (phiid->parsed()) {
            cmd_phiid(cfg, sink, err);
        } else if (classify->parsed()) {
            cmd_classify(cfg, sink);
        }
        if (redirect) {
            std::ofstream file(cfg.out);
            if (!file) throw DataError("cannot open " + cfg.out + " for writing");
            file << buffer.str();
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const CapacityError& e) {
        err << "error: " << e.what() << '\n';
        return kCapacity;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kData;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kData;
    }
    return code;
}

}  // namespace fastmobius::cli
