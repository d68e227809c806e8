#include "rpca/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <tuple>

namespace rpca::io {
namespace {

static_assert(std::endian::native == std::endian::little, "binary I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in, const char* what) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw ParseError(std::string("rpca: truncated header (") + what + ")");
  }
  return value;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ifstream in(path, mode);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return in;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool blank_or_comment(const std::string& line) {
  const auto p = line.find_first_not_of(" \t\r");
  return p == std::string::npos || line[p] == '%';
}

}  // namespace

void write_rpca(std::ostream& out, const Eigen::Ref<const Matrix>& M) {
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kVersion);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(M.rows()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(M.cols()));
  const RowMajorMatrix rm = M;
  out.write(reinterpret_cast<const char*>(rm.data()), static_cast<std::streamsize>(rm.size() * sizeof(double)));
  if (!out) throw IoError("rpca: write failed");
}

void write_rpca(const std::filesystem::path& path, const Eigen::Ref<const Matrix>& M) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_rpca(out, M);
}

RowMajorMatrix read_rpca(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw ParseError("rpca: bad magic bytes");
  const auto version = get<std::uint32_t>(in, "version");
  if (version != kVersion) throw ParseError("rpca: unsupported version " + std::to_string(version));
  const auto rows = get<std::uint64_t>(in, "rows");
  const auto cols = get<std::uint64_t>(in, "cols");
  if (rows == 0 || cols == 0) throw ParseError("rpca: empty matrix");
  if (rows > (std::uint64_t{1} << 40) / cols) throw ParseError("rpca: dimensions too large");
  RowMajorMatrix M(static_cast<Index>(rows), static_cast<Index>(cols));
  const auto bytes = static_cast<std::streamsize>(M.size() * sizeof(double));
  if (!in.read(reinterpret_cast<char*>(M.data()), bytes)) throw ParseError("rpca: truncated payload");
  if (!M.allFinite()) throw ParseError("rpca: non-finite entry in payload");
  return M;
}

RowMajorMatrix read_rpca(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::binary);
  return read_rpca(in);
}

MarketMatrix read_matrix_market(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError("matrix market: empty input", 1);
  ++lineno;

  std::istringstream header(line);
  std::string banner, object, layout, field, symmetry;
  header >> banner >> object >> layout >> field >> symmetry;
  if (banner != "%%MatrixMarket") throw ParseError("matrix market: missing %%MatrixMarket banner", lineno);
  object = lower(object);
  layout = lower(layout);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") throw ParseError("matrix market: object must be 'matrix'", lineno);
  if (layout != "array" && layout != "coordinate") {
    throw ParseError("matrix market: format must be 'array' or 'coordinate'", lineno);
  }
  if (field != "real" && field != "integer" && field != "double" && !(field == "pattern" && layout == "coordinate")) {
    throw ParseError("matrix market: unsupported field '" + field + "'", lineno);
  }
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric") {
    throw ParseError("matrix market: unsupported symmetry '" + symmetry + "'", lineno);
  }
  const bool pattern = field == "pattern";
  const double mirror = symmetry == "skew-symmetric" ? -1.0 : 1.0;
  const bool symmetric = symmetry != "general";

  do {
    if (!std::getline(in, line)) throw ParseError("matrix market: missing size line", lineno + 1);
    ++lineno;
  } while (blank_or_comment(line));

  std::istringstream size_line(line);
  long long rows = 0, cols = 0, entries = 0;
  size_line >> rows >> cols;
  if (layout == "coordinate") size_line >> entries;
  if (!size_line || rows < 1 || cols < 1 || entries < 0) {
    throw ParseError("matrix market: malformed size line", lineno);
  }
  if (symmetric && rows != cols) throw ParseError("matrix market: symmetric matrix must be square", lineno);

  auto next_data_line = [&](const char* what) {
    do {
      if (!std::getline(in, line)) throw ParseError(std::string("matrix market: unexpected end of file, ") + what, lineno + 1);
      ++lineno;
    } while (blank_or_comment(line));
    return std::istringstream(line);
  };
  auto check_finite = [&](double v) {
    if (!std::isfinite(v)) throw ParseError("matrix market: non-finite value", lineno);
  };

  if (layout == "array") {
    RowMajorMatrix M = RowMajorMatrix::Zero(rows, cols);
    // Column-major entry order; symmetric variants store the lower triangle only.
    for (long long c = 0; c < cols; ++c) {
      for (long long r = symmetric ? c + (symmetry == "skew-symmetric" ? 1 : 0) : 0; r < rows; ++r) {
        auto ls = next_data_line("expected more array entries");
        double v;
        if (!(ls >> v)) throw ParseError("matrix market: expected a numeric value", lineno);
        check_finite(v);
        M(r, c) = v;
        if (symmetric && r != c) M(c, r) = mirror * v;
      }
    }
    return M;
  }

  std::vector<std::tuple<std::int64_t, std::int64_t, double>> triplets;
  triplets.reserve(static_cast<std::size_t>(symmetric ? 2 * entries : entries));
  for (long long e = 0; e < entries; ++e) {
    auto ls = next_data_line("expected more coordinate entries");
    long long r, c;
    double v = 1.0;
    if (!(ls >> r >> c) || (!pattern && !(ls >> v))) {
      throw ParseError("matrix market: malformed coordinate entry", lineno);
    }
    if (r < 1 || r > rows || c < 1 || c > cols) throw ParseError("matrix market: index out of range", lineno);
    check_finite(v);
    triplets.emplace_back(r - 1, c - 1, v);
    if (symmetric && r != c) triplets.emplace_back(c - 1, r - 1, mirror * v);
  }
  std::sort(triplets.begin(), triplets.end(),
            [](const auto& a, const auto& b) { return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b)); });

  // Sorted by (row, col); duplicates are adjacent and get summed.
  SparseCsr csr;
  csr.shape = Shape(rows, cols);
  csr.offsets.assign(static_cast<std::size_t>(rows) + 1, 0);
  std::int64_t last_r = -1, last_c = -1;
  for (const auto& [r, c, v] : triplets) {
    if (r == last_r && c == last_c) {
      csr.values.back() += v;
      continue;
    }
    csr.indices.push_back(c);
    csr.values.push_back(v);
    ++csr.offsets[r + 1];
    last_r = r;
    last_c = c;
  }
  for (std::size_t r = 0; r < static_cast<std::size_t>(rows); ++r) csr.offsets[r + 1] += csr.offsets[r];
  csr.validate();
  return csr;
}

MarketMatrix read_matrix_market(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::in);
  return read_matrix_market(in);
}

std::unique_ptr<LinearOperator> load_operator(const std::filesystem::path& path, Format format) {
  if (format == Format::rpca_binary) return std::make_unique<DenseOperator>(read_rpca(path));
  return std::visit(
      [](auto&& m) -> std::unique_ptr<LinearOperator> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SparseCsr>) {
          return std::make_unique<SparseOperator>(std::move(m));
        } else {
          return std::make_unique<DenseOperator>(std::move(m));
        }
      },
      read_matrix_market(path));
}

}  // namespace rpca::io
