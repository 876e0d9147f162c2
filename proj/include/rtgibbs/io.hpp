#ifndef RTGIBBS_IO_HPP
#define RTGIBBS_IO_HPP

#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "rtgibbs/errors.hpp"
#include "rtgibbs/matrix.hpp"

namespace rtgibbs {

/// Serialize a double with 17 significant digits, enough for an exact
/// round-trip through decimal text.
inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

template <typename Scalar>
void write_csv_matrix(const std::filesystem::path& path, const MatrixX<Scalar>& m) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot open for writing: " + path.string());
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(static_cast<double>(m(i, j)));
    }
    out << '\n';
  }
  if (!out) throw data_error("write failed: " + path.string());
}

inline MatrixX<double> read_csv_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open for reading: " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (start <= line.size()) {
      std::size_t end = line.find(',', start);
      if (end == std::string::npos) end = line.size();
      std::string cell = line.substr(start, end - start);
      // trim whitespace and a possible trailing \r
      const auto a = cell.find_first_not_of(" \t\r");
      const auto b = cell.find_last_not_of(" \t\r");
      cell = (a == std::string::npos) ? std::string() : cell.substr(a, b - a + 1);
      double v;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
        throw data_error(path.string() + ":" + std::to_string(line_no) +
                         ": non-numeric cell '" + cell + "'");
      row.push_back(v);
      start = end + 1;
      if (end == line.size()) break;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw data_error(path.string() + ":" + std::to_string(line_no) + ": ragged row (got " +
                       std::to_string(row.size()) + " cells, expected " +
                       std::to_string(rows.front().size()) + ")");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw data_error(path.string() + ": empty CSV");
  MatrixX<double> m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

inline std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Stored-draw layout: for each draw, the upper triangle (diagonal included)
// in row-major order as little-endian IEEE doubles. Symmetry makes the lower
// triangle redundant, halving storage.

inline Index packed_upper_size(Index p) { return p * (p + 1) / 2; }

template <typename Scalar>
void pack_upper(const MatrixX<Scalar>& m, std::vector<double>& out) {
  out.clear();
  out.reserve(static_cast<std::size_t>(packed_upper_size(m.rows())));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = i; j < m.cols(); ++j) out.push_back(static_cast<double>(m(i, j)));
}

inline MatrixX<double> unpack_upper(const std::vector<double>& buf, Index p) {
  if (static_cast<Index>(buf.size()) != packed_upper_size(p))
    throw data_error("unpack_upper: buffer size does not match dimension");
  MatrixX<double> m(p, p);
  std::size_t k = 0;
  for (Index i = 0; i < p; ++i)
    for (Index j = i; j < p; ++j) {
      m(i, j) = buf[k];
      m(j, i) = buf[k];
      ++k;
    }
  return m;
}

class DrawsWriter {
 public:
  DrawsWriter(const std::filesystem::path& path, Index p)
      : out_(path, std::ios::binary), p_(p), path_(path) {
    if (!out_) throw data_error("cannot open for writing: " + path.string());
  }
  template <typename Scalar>
  void append(const MatrixX<Scalar>& draw) {
    pack_upper(draw, buf_);
    const auto bytes = buf_.size() * sizeof(double);
    out_.write(reinterpret_cast<const char*>(buf_.data()), static_cast<std::streamsize>(bytes));
    if (!out_) throw data_error("write failed: " + path_.string());
    checksum_ = fnv1a64(buf_.data(), bytes, checksum_);
    ++count_;
  }
  void close() { out_.close(); }
  Index count() const { return count_; }
  std::uint64_t checksum() const { return checksum_; }

 private:
  std::ofstream out_;
  Index p_;
  std::filesystem::path path_;
  std::vector<double> buf_;
  Index count_ = 0;
  std::uint64_t checksum_ = 0xcbf29ce484222325ULL;
};

/// Read back a draws file, verifying the recorded checksum.
inline std::vector<MatrixX<double>> read_draws(const std::filesystem::path& path, Index p,
                                               Index count, std::uint64_t expected_checksum) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open for reading: " + path.string());
  const Index per = packed_upper_size(p);
  std::vector<double> buf(static_cast<std::size_t>(per));
  std::vector<MatrixX<double>> draws;
  draws.reserve(static_cast<std::size_t>(count));
  std::uint64_t checksum = 0xcbf29ce484222325ULL;
  for (Index d = 0; d < count; ++d) {
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(double)));
    if (!in) throw data_error(path.string() + ": truncated draws file at draw " + std::to_string(d));
    checksum = fnv1a64(buf.data(), buf.size() * sizeof(double), checksum);
    draws.push_back(unpack_upper(buf, p));
  }
  if (checksum != expected_checksum)
    throw data_error(path.string() + ": checksum mismatch (file corrupt or manifest stale)");
  return draws;
}

}  // namespace rtgibbs

#endif
