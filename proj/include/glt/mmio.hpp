#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "glt/matrix.hpp"

namespace glt {

/// Matrix Market coordinate writer; emits "complex general" unless every
/// imaginary part vanishes, in which case "real general".
inline void write_matrix_market(std::ostream& os, const DenseMatrix& A) {
    bool complex_entries = false;
    std::int64_t nnz = 0;
    for (const auto& v : A.data()) {
        if (v != cplx{}) ++nnz;
        if (v.imag() != 0.0) complex_entries = true;
    }
    os << "%%MatrixMarket matrix coordinate " << (complex_entries ? "complex" : "real")
       << " general\n";
    os << A.rows() << " " << A.cols() << " " << nnz << "\n";
    char buf[128];
    for (std::int64_t i = 0; i < A.rows(); ++i)
        for (std::int64_t j = 0; j < A.cols(); ++j) {
            const cplx v = A(i, j);
            if (v == cplx{}) continue;
            if (complex_entries)
                std::snprintf(buf, sizeof buf, "%lld %lld %.17g %.17g\n",
                              static_cast<long long>(i + 1), static_cast<long long>(j + 1),
                              v.real(), v.imag());
            else
                std::snprintf(buf, sizeof buf, "%lld %lld %.17g\n",
                              static_cast<long long>(i + 1), static_cast<long long>(j + 1),
                              v.real());
            os << buf;
        }
}

inline void write_matrix_market_file(const std::string& path, const DenseMatrix& A) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    write_matrix_market(f, A);
}

inline DenseMatrix read_matrix_market(std::istream& is) {
    std::string line;
    if (!std::getline(is, line))
        throw std::runtime_error("matrix market: empty input");
    if (line.rfind("%%MatrixMarket", 0) != 0)
        throw std::runtime_error("matrix market: bad banner");
    const bool complex_entries = line.find("complex") != std::string::npos;
    if (line.find("coordinate") == std::string::npos)
        throw std::runtime_error("matrix market: only coordinate format supported");
    do {
        if (!std::getline(is, line))
            throw std::runtime_error("matrix market: missing size line");
    } while (!line.empty() && line[0] == '%');
    std::istringstream hdr(line);
    std::int64_t rows, cols, nnz;
    if (!(hdr >> rows >> cols >> nnz))
        throw std::runtime_error("matrix market: bad size line");
    DenseMatrix A(rows, cols);
    for (std::int64_t k = 0; k < nnz; ++k) {
        if (!std::getline(is, line))
            throw std::runtime_error("matrix market: truncated entries");
        std::istringstream es(line);
        std::int64_t i, j;
        double re, im = 0.0;
        if (!(es >> i >> j >> re))
            throw std::runtime_error("matrix market: bad entry line");
        if (complex_entries && !(es >> im))
            throw std::runtime_error("matrix market: missing imaginary part");
        if (i < 1 || i > rows || j < 1 || j > cols)
            throw std::runtime_error("matrix market: index out of range");
        A(i - 1, j - 1) = cplx(re, im);
    }
    return A;
}

inline DenseMatrix read_matrix_market_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    return read_matrix_market(f);
}

} // namespace glt
