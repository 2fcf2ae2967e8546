#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "glt/multi_index.hpp"

namespace glt {

using cplx = std::complex<double>;

/// Block-structure tag for a d-level (r,s)-block matrix of level orders n:
/// the matrix has size N(n)*r x N(n)*s.
struct BlockMeta {
    MultiIndex n;
    std::int64_t r = 1;
    std::int64_t s = 1;
};

/// Dense complex matrix, row-major.
class DenseMatrix {
public:
    DenseMatrix() = default;

    DenseMatrix(std::int64_t rows, std::int64_t cols)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols)) {
        if (rows < 0 || cols < 0)
            throw std::invalid_argument("DenseMatrix: negative size");
    }

    static DenseMatrix identity(std::int64_t n) {
        DenseMatrix I(n, n);
        for (std::int64_t i = 0; i < n; ++i) I(i, i) = 1.0;
        return I;
    }

    static DenseMatrix zero(std::int64_t rows, std::int64_t cols) {
        return DenseMatrix(rows, cols);
    }

    std::int64_t rows() const { return rows_; }
    std::int64_t cols() const { return cols_; }

    cplx& operator()(std::int64_t i, std::int64_t j) {
        return data_[static_cast<std::size_t>(i * cols_ + j)];
    }
    const cplx& operator()(std::int64_t i, std::int64_t j) const {
        return data_[static_cast<std::size_t>(i * cols_ + j)];
    }

    const std::vector<cplx>& data() const { return data_; }
    std::vector<cplx>& data() { return data_; }

    const std::optional<BlockMeta>& block_meta() const { return meta_; }

    void set_block_meta(BlockMeta meta) {
        const std::int64_t N = n_total(meta.n);
        if (rows_ != N * meta.r || cols_ != N * meta.s)
            throw std::invalid_argument("DenseMatrix: block_meta inconsistent with size");
        meta_ = std::move(meta);
    }

    void clear_block_meta() { meta_.reset(); }

    bool operator==(const DenseMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

private:
    std::int64_t rows_ = 0;
    std::int64_t cols_ = 0;
    std::vector<cplx> data_;
    std::optional<BlockMeta> meta_;
};

inline void check_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument(std::string(op) + ": shape mismatch");
}

inline DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
    check_same_shape(a, b, "operator+");
    DenseMatrix c(a.rows(), a.cols());
    for (std::size_t k = 0; k < a.data().size(); ++k) c.data()[k] = a.data()[k] + b.data()[k];
    return c;
}

inline DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
    check_same_shape(a, b, "operator-");
    DenseMatrix c(a.rows(), a.cols());
    for (std::size_t k = 0; k < a.data().size(); ++k) c.data()[k] = a.data()[k] - b.data()[k];
    return c;
}

inline DenseMatrix operator*(cplx alpha, const DenseMatrix& a) {
    DenseMatrix c(a.rows(), a.cols());
    for (std::size_t k = 0; k < a.data().size(); ++k) c.data()[k] = alpha * a.data()[k];
    return c;
}

inline DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("operator*: inner dimension mismatch");
    DenseMatrix c(a.rows(), b.cols());
    for (std::int64_t i = 0; i < a.rows(); ++i)
        for (std::int64_t k = 0; k < a.cols(); ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx{}) continue;
            for (std::int64_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix c(a.cols(), a.rows());
    for (std::int64_t i = 0; i < a.rows(); ++i)
        for (std::int64_t j = 0; j < a.cols(); ++j) c(j, i) = a(i, j);
    return c;
}

inline DenseMatrix adjoint(const DenseMatrix& a) {
    DenseMatrix c(a.cols(), a.rows());
    for (std::int64_t i = 0; i < a.rows(); ++i)
        for (std::int64_t j = 0; j < a.cols(); ++j) c(j, i) = std::conj(a(i, j));
    return c;
}

/// Largest entry magnitude.
inline double max_abs(const DenseMatrix& a) {
    double m = 0.0;
    for (const auto& v : a.data()) m = std::max(m, std::abs(v));
    return m;
}

/// Frobenius norm.
inline double frobenius_norm(const DenseMatrix& a) {
    double s = 0.0;
    for (const auto& v : a.data()) s += std::norm(v);
    return std::sqrt(s);
}

/// Kronecker (tensor) product: block (i,j) of the result is x_ij * Y.
inline DenseMatrix kron(const DenseMatrix& x, const DenseMatrix& y) {
    DenseMatrix c(x.rows() * y.rows(), x.cols() * y.cols());
    for (std::int64_t i = 0; i < x.rows(); ++i)
        for (std::int64_t j = 0; j < x.cols(); ++j) {
            const cplx xij = x(i, j);
            if (xij == cplx{}) continue;
            for (std::int64_t p = 0; p < y.rows(); ++p)
                for (std::int64_t q = 0; q < y.cols(); ++q)
                    c(i * y.rows() + p, j * y.cols() + q) = xij * y(p, q);
        }
    return c;
}

/// zeta(i) = ((i-1) mod k1)*k2 + floor((i-1)/k1) + 1, 1-based.
inline std::vector<std::int64_t> perm_P_zeta(std::int64_t k1, std::int64_t k2) {
    std::vector<std::int64_t> zeta(static_cast<std::size_t>(k1 * k2));
    for (std::int64_t i = 1; i <= k1 * k2; ++i)
        zeta[static_cast<std::size_t>(i - 1)] = ((i - 1) % k1) * k2 + (i - 1) / k1 + 1;
    return zeta;
}

/// The k1k2 x k1k2 permutation matrix whose row i is the canonical basis row
/// indexed zeta(i). Satisfies Y (x) X = P_{m1,m2} (X (x) Y) P_{n1,n2}^T.
inline DenseMatrix perm_P(std::int64_t k1, std::int64_t k2) {
    if (k1 < 1 || k2 < 1)
        throw std::invalid_argument("perm_P: arguments must be >= 1");
    const auto zeta = perm_P_zeta(k1, k2);
    DenseMatrix P(k1 * k2, k1 * k2);
    for (std::int64_t i = 0; i < k1 * k2; ++i)
        P(i, zeta[static_cast<std::size_t>(i)] - 1) = 1.0;
    return P;
}

/// Block-diagonal concatenation.
inline DenseMatrix blockdiag(const std::vector<DenseMatrix>& blocks) {
    std::int64_t rows = 0, cols = 0;
    for (const auto& b : blocks) { rows += b.rows(); cols += b.cols(); }
    DenseMatrix c(rows, cols);
    std::int64_t ro = 0, co = 0;
    for (const auto& b : blocks) {
        for (std::int64_t i = 0; i < b.rows(); ++i)
            for (std::int64_t j = 0; j < b.cols(); ++j) c(ro + i, co + j) = b(i, j);
        ro += b.rows();
        co += b.cols();
    }
    return c;
}

/// Q_{a,t,N} = P_{t,N} * blockdiag(P_{a,N}^T, I_{N(t-a)}), an Nt x Nt permutation.
inline DenseMatrix perm_Q(std::int64_t a, std::int64_t t, std::int64_t N) {
    if (a < 1 || a > t)
        throw std::invalid_argument("perm_Q: require 1 <= a <= t");
    if (N < 1)
        throw std::invalid_argument("perm_Q: require N >= 1");
    std::vector<DenseMatrix> blocks{transpose(perm_P(a, N))};
    if (t > a) blocks.push_back(DenseMatrix::identity(N * (t - a)));
    return perm_P(t, N) * blockdiag(blocks);
}

/// Selected submatrix; index lists are 0-based and strictly increasing.
inline DenseMatrix principal_submatrix(const DenseMatrix& x,
                                       const std::vector<std::int64_t>& rows,
                                       const std::vector<std::int64_t>& cols) {
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (rows[k] < 0 || rows[k] >= x.rows())
            throw std::out_of_range("principal_submatrix: row index out of range");
        if (k > 0 && rows[k] <= rows[k - 1])
            throw std::invalid_argument("principal_submatrix: rows not strictly increasing");
    }
    for (std::size_t k = 0; k < cols.size(); ++k) {
        if (cols[k] < 0 || cols[k] >= x.cols())
            throw std::out_of_range("principal_submatrix: col index out of range");
        if (k > 0 && cols[k] <= cols[k - 1])
            throw std::invalid_argument("principal_submatrix: cols not strictly increasing");
    }
    DenseMatrix c(static_cast<std::int64_t>(rows.size()), static_cast<std::int64_t>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) c((std::int64_t)i, (std::int64_t)j) = x(rows[i], cols[j]);
    return c;
}

} // namespace glt
