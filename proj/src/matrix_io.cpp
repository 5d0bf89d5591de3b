#include "fastmobius/matrix_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "fastmobius/errors.hpp"

namespace fastmobius {

namespace {

constexpr std::array<char, 5> kMagic = {'F', 'M', 'O', 'B', '1'};

std::uint64_t fnv1a(const std::uint8_t* data, std::size_t size) {
    std::uint64_t h = 14695981039346656037ULL;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= data[i];
        h *= 1099511628211ULL;
    }
    return h;
}

class Writer {
public:
    explicit Writer(std::vector<std::uint8_t>& out) : out_(out) {}

    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v) { put(v, 2); }
    void u32(std::uint32_t v) { put(v, 4); }
    void u64(std::uint64_t v) { put(v, 8); }
    void varint(std::uint64_t v) {
        while (v >= 0x80) {
            out_.push_back(static_cast<std::uint8_t>(v | 0x80));
            v >>= 7;
        }
        out_.push_back(static_cast<std::uint8_t>(v));
    }
    void bytes(const std::uint8_t* data, std::size_t size) { out_.insert(out_.end(), data, data + size); }

private:
    void put(std::uint64_t v, int width) {
        for (int b = 0; b < width; ++b) out_.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
    }

    std::vector<std::uint8_t>& out_;
};

class Reader {
public:
    Reader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
    std::uint64_t u64() { return get(8); }
    std::uint64_t varint() {
        std::uint64_t v = 0;
        for (int shift = 0; shift < 64; shift += 7) {
            const std::uint8_t byte = u8();
            v |= std::uint64_t{byte & 0x7FU} << shift;
            if ((byte & 0x80U) == 0) return v;
        }
        throw DataError("matrix file: malformed varint");
    }
    const std::uint8_t* take(std::size_t n) {
        need(n);
        const auto* p = data_ + pos_;
        pos_ += n;
        return p;
    }
    std::size_t position() const noexcept { return pos_; }
    bool at_end() const noexcept { return pos_ == size_; }

private:
    void need(std::size_t n) const {
        if (n > size_ - pos_) throw DataError("matrix file is truncated");
    }
    std::uint64_t get(int width) {
        need(static_cast<std::size_t>(width));
        std::uint64_t v = 0;
        for (int b = 0; b < width; ++b) v |= std::uint64_t{data_[pos_ + b]} << (8 * b);
        pos_ += static_cast<std::size_t>(width);
        return v;
    }

    const std::uint8_t* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

void write_table(Writer& w, const AntichainTable& table) {
    w.u32(static_cast<std::uint32_t>(table.size()));
    for (const auto& a : table.entries()) {
        w.u8(static_cast<std::uint8_t>(a.size()));
        for (SourceSet s : a.members()) w.u16(s.mask());
    }
}

std::shared_ptr<const AntichainTable> read_table(Reader& r, int n) {
    const std::uint32_t count = r.u32();
    std::vector<Antichain> entries;
    entries.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint8_t members = r.u8();
        std::vector<SourceSet> sets;
        sets.reserve(members);
        for (std::uint8_t k = 0; k < members; ++k) {
            const std::uint16_t mask = r.u16();
            if (mask == 0) throw DataError("matrix file: empty source in antichain table");
            sets.emplace_back(mask);
        }
        entries.emplace_back(n, std::move(sets));
    }
    return std::make_shared<const AntichainTable>(n, std::move(entries));
}

std::vector<std::uint8_t> encode_raw(const SparseMobiusMatrix& m) {
    std::vector<std::uint8_t> body;
    body.reserve(m.nonzeros() * 9);
    Writer w(body);
    for (const auto& t : m.triplets()) {
        w.u32(t.row);
        w.u32(t.col);
        w.u8(static_cast<std::uint8_t>(t.value));
    }
    write_table(w, m.table());
    return body;
}

std::vector<std::uint8_t> encode_deflate(const SparseMobiusMatrix& m) {
    std::vector<std::uint8_t> plain;
    Writer w(plain);
    std::vector<std::uint32_t> per_row(m.dimension(), 0);
    for (const auto& t : m.triplets()) ++per_row[t.row];
    w.varint(per_row.size());
    for (auto c : per_row) w.varint(c);
    std::uint32_t last_row = UINT32_MAX, last_col = 0;
    for (const auto& t : m.triplets()) {
        if (t.row != last_row) {
            last_row = t.row;
            last_col = 0;
        }
        w.varint(t.col - last_col);
        last_col = t.col;
    }
    std::vector<std::uint8_t> signs((m.nonzeros() + 7) / 8, 0);
    for (std::size_t k = 0; k < m.nonzeros(); ++k) {
        if (m.triplets()[k].value > 0) signs[k / 8] = static_cast<std::uint8_t>(signs[k / 8] | (1U << (k % 8)));
    }
    w.bytes(signs.data(), signs.size());
    write_table(w, m.table());

    uLongf packed_size = compressBound(static_cast<uLong>(plain.size()));
    std::vector<std::uint8_t> packed(packed_size + 8);
    // the first 8 bytes record the inflated length
    for (int b = 0; b < 8; ++b) packed[b] = static_cast<std::uint8_t>(std::uint64_t{plain.size()} >> (8 * b));
    if (compress2(packed.data() + 8, &packed_size, plain.data(), static_cast<uLong>(plain.size()),
                  Z_BEST_COMPRESSION) != Z_OK) {
        throw Error("deflate failed while writing matrix");
    }
    packed.resize(packed_size + 8);
    return packed;
}

}  // namespace

std::vector<std::uint8_t> save_matrix(const SparseMobiusMatrix& m, MatrixEncoding encoding) {
    std::vector<std::uint8_t> out;
    Writer w(out);
    w.bytes(reinterpret_cast<const std::uint8_t*>(kMagic.data()), kMagic.size());
    w.u8(static_cast<std::uint8_t>(m.n()));
    w.u64(m.nonzeros());
    w.u64(m.table().hash());
    w.u8(static_cast<std::uint8_t>(encoding));
    const auto body = encoding == MatrixEncoding::Raw ? encode_raw(m) : encode_deflate(m);
    w.u64(body.size());
    w.bytes(body.data(), body.size());
    w.u64(fnv1a(out.data(), out.size()));
    return out;
}

SparseMobiusMatrix load_matrix(const std::vector<std::uint8_t>& bytes) {
    constexpr std::size_t kHeader = 5 + 1 + 8 + 8 + 1 + 8;
    if (bytes.size() < kHeader + 8) throw DataError("matrix file is truncated");
    if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) throw DataError("not a matrix file (bad magic)");
    Reader tail(bytes.data() + bytes.size() - 8, 8);
    if (tail.u64() != fnv1a(bytes.data(), bytes.size() - 8)) throw DataError("matrix file checksum mismatch");

    Reader r(bytes.data() + kMagic.size(), bytes.size() - kMagic.size() - 8);
    const int n = r.u8();
    const std::uint64_t count = r.u64();
    const std::uint64_t table_hash = r.u64();
    const std::uint8_t encoding = r.u8();
    const std::uint64_t body_size = r.u64();
    if (n < 1 || n > kMaxDownSetVariables) throw DataError("matrix file: invalid n = " + std::to_string(n));
    const std::uint8_t* body = r.take(body_size);
    if (!r.at_end()) throw DataError("matrix file: trailing bytes after body");

    std::vector<Triplet> triplets;
    std::shared_ptr<const AntichainTable> table;
    if (encoding == static_cast<std::uint8_t>(MatrixEncoding::Raw)) {
        if (count > body_size / 9) throw DataError("matrix file is truncated");
        Reader b(body, body_size);
        triplets.reserve(count);
        for (std::uint64_t k = 0; k < count; ++k) {
            Triplet t{};
            t.row = b.u32();
            t.col = b.u32();
            t.value = static_cast<std::int8_t>(b.u8());
            triplets.push_back(t);
        }
        table = read_table(b, n);
        if (!b.at_end()) throw DataError("matrix file: trailing bytes in body");
    } else if (encoding == static_cast<std::uint8_t>(MatrixEncoding::Deflate)) {
        Reader head(body, body_size);
        const std::uint64_t plain_size = head.u64();
        if (plain_size > (std::uint64_t{1} << 32)) throw DataError("matrix file: implausible body size");
        std::vector<std::uint8_t> plain(plain_size);
        uLongf got = static_cast<uLongf>(plain_size);
        if (uncompress(plain.data(), &got, body + 8, static_cast<uLong>(body_size - 8)) != Z_OK || got != plain_size) {
            throw DataError("matrix file: corrupt compressed body");
        }
        Reader b(plain.data(), plain.size());
        const std::uint64_t rows = b.varint();
        if (rows > (std::uint64_t{1} << 24)) throw DataError("matrix file: implausible row count");
        std::vector<std::uint64_t> per_row(rows);
        std::uint64_t total = 0;
        for (auto& c : per_row) {
            c = b.varint();
            total += c;
        }
        if (total != count || count > plain.size()) {
            throw DataError("matrix file: row counts disagree with the header");
        }
        triplets.reserve(count);
        for (std::size_t row = 0; row < per_row.size(); ++row) {
            std::uint64_t col = 0;
            for (std::uint64_t k = 0; k < per_row[row]; ++k) {
                col += b.varint();
                triplets.push_back({static_cast<std::uint32_t>(row), static_cast<std::uint32_t>(col), 1});
            }
        }
        const std::uint8_t* signs = b.take((count + 7) / 8);
        for (std::uint64_t k = 0; k < count; ++k) {
            if (((signs[k / 8] >> (k % 8)) & 1U) == 0) triplets[k].value = -1;
        }
        table = read_table(b, n);
        if (!b.at_end()) throw DataError("matrix file: trailing bytes in body");
        if (table->size() != rows) throw DataError("matrix file: row count disagrees with the antichain table");
    } else {
        throw DataError("matrix file: unknown encoding " + std::to_string(encoding));
    }

    if (table->hash() != table_hash) throw DataError("matrix file: antichain table does not match its hash");
    return SparseMobiusMatrix(std::move(table), std::move(triplets));
}

void save_matrix_file(const SparseMobiusMatrix& m, const std::filesystem::path& path, MatrixEncoding encoding) {
    const auto bytes = save_matrix(m, encoding);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("failed writing " + path.string());
}

SparseMobiusMatrix load_matrix_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open matrix file " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return load_matrix(bytes);
}

std::string export_matrix_text(const SparseMobiusMatrix& m) {
    std::ostringstream out;
    out << "# antichains n=" << m.n() << " count=" << m.dimension() << "\n";
    for (std::size_t i = 0; i < m.dimension(); ++i) out << "# " << i << " " << m.table()[i].to_string() << "\n";
    for (const auto& t : m.triplets()) out << t.row << " " << t.col << " " << int(t.value) << "\n";
    return out.str();
}

}  // namespace fastmobius
