#pragma once

#include <cctype>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "msp/dense_matrix.hpp"
#include "msp/errors.hpp"

namespace msp {

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

// MatrixMarket coordinate format, real entries. Symmetric output stores the
// lower triangle only. Exact zeros are skipped.
inline void write_matrix_market(std::ostream& os, const DenseMatrix& m,
                                bool symmetric) {
  if (symmetric && !m.is_symmetric(1e-12))
    throw Error("write_matrix_market: matrix is not symmetric");
  std::size_t nnz = 0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const std::size_t jmax = symmetric ? i + 1 : m.cols();
    for (std::size_t j = 0; j < jmax; ++j)
      if (m(i, j) != 0.0) ++nnz;
  }
  os << "%%MatrixMarket matrix coordinate real "
     << (symmetric ? "symmetric" : "general") << "\n";
  os << m.rows() << " " << m.cols() << " " << nnz << "\n";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const std::size_t jmax = symmetric ? i + 1 : m.cols();
    for (std::size_t j = 0; j < jmax; ++j) {
      const double v = m(i, j);
      if (v == 0.0) continue;
      os << (i + 1) << " " << (j + 1) << " " << detail::format_double(v) << "\n";
    }
  }
}

inline DenseMatrix read_matrix_market(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError("matrix market: empty stream");
  std::istringstream banner(line);
  std::string tag, object, fmt, field, symmetry;
  banner >> tag >> object >> fmt >> field >> symmetry;
  if (tag != "%%MatrixMarket" || object != "matrix" || fmt != "coordinate" ||
      field != "real")
    throw ParseError("matrix market: unsupported banner: " + line);
  bool symmetric;
  if (symmetry == "symmetric")
    symmetric = true;
  else if (symmetry == "general")
    symmetric = false;
  else
    throw ParseError("matrix market: unsupported symmetry: " + symmetry);

  while (std::getline(is, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream sizes(line);
  std::size_t rows = 0, cols = 0, nnz = 0;
  if (!(sizes >> rows >> cols >> nnz))
    throw ParseError("matrix market: bad size line: " + line);
  DenseMatrix m(rows, cols);
  for (std::size_t k = 0; k < nnz; ++k) {
    std::size_t i = 0, j = 0;
    double v = 0.0;
    if (!(is >> i >> j >> v)) throw ParseError("matrix market: truncated entries");
    if (i < 1 || i > rows || j < 1 || j > cols)
      throw ParseError("matrix market: entry out of range");
    m(i - 1, j - 1) = v;
    if (symmetric && i != j) m(j - 1, i - 1) = v;
  }
  return m;
}

inline void write_matrix_market_file(const std::filesystem::path& path,
                                     const DenseMatrix& m, bool symmetric) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open for write: " + path.string());
  write_matrix_market(os, m, symmetric);
}

inline DenseMatrix read_matrix_market_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open for read: " + path.string());
  return read_matrix_market(is);
}

}  // namespace msp
