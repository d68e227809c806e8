#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <variant>

#include "rpca/linop.hpp"

namespace rpca::io {

/// Dense binary layout: "RPCA", u32 version (1), u64 rows, u64 cols, rows*cols f64, all
/// little-endian, row-major.
inline constexpr char kMagic[4] = {'R', 'P', 'C', 'A'};
inline constexpr std::uint32_t kVersion = 1;

void write_rpca(std::ostream& out, const Eigen::Ref<const Matrix>& M);
void write_rpca(const std::filesystem::path& path, const Eigen::Ref<const Matrix>& M);

/// Throws ParseError on a bad header, truncated payload or non-finite entries.
RowMajorMatrix read_rpca(std::istream& in);
RowMajorMatrix read_rpca(const std::filesystem::path& path);

using MarketMatrix = std::variant<RowMajorMatrix, SparseCsr>;

/// Matrix Market reader for `array` (dense) and `coordinate` (sparse) real/integer/pattern
/// matrices with general, symmetric or skew-symmetric storage. Duplicate coordinate
/// entries are summed. ParseError carries the offending line number.
MarketMatrix read_matrix_market(std::istream& in);
MarketMatrix read_matrix_market(const std::filesystem::path& path);

enum class Format { matrix_market, rpca_binary };

std::unique_ptr<LinearOperator> load_operator(const std::filesystem::path& path, Format format);

}  // namespace rpca::io
