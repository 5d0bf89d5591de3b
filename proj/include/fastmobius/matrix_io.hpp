#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fastmobius/mobius.hpp"

namespace fastmobius {

/// Body layout of a matrix file.
enum class MatrixEncoding : std::uint8_t {
    /// Triplets as (u32 row, u32 col, i8 value), then the antichain table.
    Raw = 0,
    /// Deflate-compressed stream: row count and per-row entry counts and column gaps as
    /// LEB128 varints, value signs packed one bit per entry, then the table.
    /// The n = 5 matrix fits in about 260 kB this way.
    Deflate = 1,
};

/// Matrix file layout (little-endian):
///
///   "FMOB1"            5 bytes magic
///   u8  n
///   u64 triplet count
///   u64 table hash     (AntichainTable::hash)
///   u8  encoding       (MatrixEncoding)
///   u64 body length
///   body               triplets then the table as u32 entry count followed by
///                      u8 member count + u16 masks per antichain
///   u64 checksum       FNV-1a of every preceding byte
std::vector<std::uint8_t> save_matrix(const SparseMobiusMatrix& m, MatrixEncoding encoding = MatrixEncoding::Deflate);

/// Throws DataError on a bad magic, truncation, checksum mismatch, a table
/// that does not hash to the header value or an n that disagrees with it.
SparseMobiusMatrix load_matrix(const std::vector<std::uint8_t>& bytes);

void save_matrix_file(const SparseMobiusMatrix& m, const std::filesystem::path& path,
                      MatrixEncoding encoding = MatrixEncoding::Deflate);
SparseMobiusMatrix load_matrix_file(const std::filesystem::path& path);

/// Plain-text dump for diffing: "# antichains" header block with one
/// "# <index> <antichain>" line per entry, then "i j v" lines.
std::string export_matrix_text(const SparseMobiusMatrix& m);

}  // namespace fastmobius
