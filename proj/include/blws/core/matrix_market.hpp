#ifndef BLWS_CORE_MATRIX_MARKET_HPP
#define BLWS_CORE_MATRIX_MARKET_HPP

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "blws/core/types.hpp"

namespace blws {
namespace mm_detail {

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

inline std::string next_data_line(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '%') continue;
        return line;
    }
    throw std::runtime_error("matrix market: unexpected end of file");
}

struct Header {
    bool coordinate = false;
};

inline Header read_header(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("matrix market: empty stream");
    std::istringstream hs(line);
    std::string banner, object, format, field, symmetry;
    hs >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || lower(object) != "matrix")
        throw std::runtime_error("matrix market: bad banner");
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);
    if (field != "real" && field != "double" && field != "integer")
        throw std::runtime_error("matrix market: only real matrices are supported");
    if (symmetry != "general")
        throw std::runtime_error("matrix market: only general symmetry is supported");
    Header h;
    if (format == "coordinate")
        h.coordinate = true;
    else if (format != "array")
        throw std::runtime_error("matrix market: unknown format '" + format + "'");
    return h;
}

}  // namespace mm_detail

/// Writes a dense matrix in "array" format, column-major, full precision.
template <typename Scalar>
void write_matrix_market(std::ostream& out, const DenseMatrix<Scalar>& m) {
    out << "%%MatrixMarket matrix array real general\n";
    out << m.rows() << " " << m.cols() << "\n";
    out.precision(17);
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i) out << m(i, j) << "\n";
}

/// Writes a sparse matrix in "coordinate" format with 1-based indices.
template <typename Scalar>
void write_matrix_market(std::ostream& out, const SparseMatrix<Scalar>& m) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.rows() << " " << m.cols() << " " << m.nonZeros() << "\n";
    out.precision(17);
    for (Index k = 0; k < m.outerSize(); ++k)
        for (typename SparseMatrix<Scalar>::InnerIterator it(m, k); it; ++it)
            out << it.row() + 1 << " " << it.col() + 1 << " " << it.value() << "\n";
}

template <typename Scalar>
void save_matrix_market(const std::string& path, const DenseMatrix<Scalar>& m) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("matrix market: cannot open " + path);
    write_matrix_market(f, m);
}

template <typename Scalar>
void save_matrix_market(const std::string& path, const SparseMatrix<Scalar>& m) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("matrix market: cannot open " + path);
    write_matrix_market(f, m);
}

/// Reads an "array" file into a dense matrix.
template <typename Scalar>
DenseMatrix<Scalar> read_matrix_market_dense(std::istream& in) {
    auto h = mm_detail::read_header(in);
    if (h.coordinate)
        throw std::runtime_error("matrix market: expected array format, got coordinate");
    std::istringstream sizes(mm_detail::next_data_line(in));
    Index rows = 0, cols = 0;
    if (!(sizes >> rows >> cols) || rows <= 0 || cols <= 0)
        throw std::runtime_error("matrix market: bad size line");
    DenseMatrix<Scalar> m(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) {
            std::istringstream vs(mm_detail::next_data_line(in));
            double v;
            if (!(vs >> v)) throw std::runtime_error("matrix market: bad value");
            if (!std::isfinite(v)) throw std::runtime_error("matrix market: non-finite value");
            m(i, j) = static_cast<Scalar>(v);
        }
    }
    return m;
}

/// Reads a "coordinate" file into a compressed sparse matrix.
/// Duplicate (row, col) pairs are rejected.
template <typename Scalar>
SparseMatrix<Scalar> read_matrix_market_sparse(std::istream& in) {
    auto h = mm_detail::read_header(in);
    if (!h.coordinate)
        throw std::runtime_error("matrix market: expected coordinate format, got array");
    std::istringstream sizes(mm_detail::next_data_line(in));
    Index rows = 0, cols = 0, nnz = 0;
    if (!(sizes >> rows >> cols >> nnz) || rows <= 0 || cols <= 0 || nnz < 0)
        throw std::runtime_error("matrix market: bad size line");
    std::vector<Triplet<Scalar>> trips;
    trips.reserve(static_cast<std::size_t>(nnz));
    std::vector<std::pair<Index, Index>> seen;
    seen.reserve(static_cast<std::size_t>(nnz));
    for (Index k = 0; k < nnz; ++k) {
        std::istringstream es(mm_detail::next_data_line(in));
        Index i, j;
        double v;
        if (!(es >> i >> j >> v)) throw std::runtime_error("matrix market: bad entry");
        if (i < 1 || i > rows || j < 1 || j > cols)
            throw std::runtime_error("matrix market: index out of range");
        if (!std::isfinite(v)) throw std::runtime_error("matrix market: non-finite value");
        trips.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1),
                           static_cast<Scalar>(v));
        seen.emplace_back(i, j);
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
        throw std::runtime_error("matrix market: duplicate entry");
    SparseMatrix<Scalar> m(rows, cols);
    m.setFromTriplets(trips.begin(), trips.end());
    m.makeCompressed();
    return m;
}

template <typename Scalar>
DenseMatrix<Scalar> load_matrix_market_dense(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("matrix market: cannot open " + path);
    return read_matrix_market_dense<Scalar>(f);
}

template <typename Scalar>
SparseMatrix<Scalar> load_matrix_market_sparse(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("matrix market: cannot open " + path);
    return read_matrix_market_sparse<Scalar>(f);
}

}  // namespace blws

#endif
