#pragma once

#include <stdexcept>

#include "glt/matrix.hpp"
#include "glt/multi_index.hpp"

namespace glt {

/// Blockwise extension: every r x s block of X is zero-padded to t x t.
/// Requires block_meta on X; the result carries block_meta (d, n, t, t).
inline DenseMatrix extend_matrix(const DenseMatrix& X, std::int64_t t) {
    const auto& meta = X.block_meta();
    if (!meta)
        throw std::invalid_argument("extend_matrix: input needs block_meta");
    const std::int64_t r = meta->r, s = meta->s;
    if (t < std::max(r, s))
        throw std::invalid_argument("extend_matrix: t < max(r,s)");
    const std::int64_t N = n_total(meta->n);
    DenseMatrix E(N * t, N * t);
    for (std::int64_t bi = 0; bi < N; ++bi)
        for (std::int64_t bj = 0; bj < N; ++bj)
            for (std::int64_t a = 0; a < r; ++a)
                for (std::int64_t b = 0; b < s; ++b)
                    E(bi * t + a, bj * t + b) = X(bi * r + a, bj * s + b);
    E.set_block_meta(BlockMeta{meta->n, t, t});
    return E;
}

/// Permutation route: Q_{r,t,N} blockdiag(X, O) Q_{s,t,N}^T. Agrees with
/// extend_matrix bit-for-bit; kept as an independent witness (it also
/// exercises perm_P and perm_Q).
inline DenseMatrix extend_via_permutation(const DenseMatrix& X, std::int64_t t) {
    const auto& meta = X.block_meta();
    if (!meta)
        throw std::invalid_argument("extend_via_permutation: input needs block_meta");
    const std::int64_t r = meta->r, s = meta->s;
    if (t < std::max(r, s))
        throw std::invalid_argument("extend_via_permutation: t < max(r,s)");
    const std::int64_t N = n_total(meta->n);

    DenseMatrix padded(N * t, N * t);
    for (std::int64_t i = 0; i < X.rows(); ++i)
        for (std::int64_t j = 0; j < X.cols(); ++j) padded(i, j) = X(i, j);

    DenseMatrix E = perm_Q(r, t, N) * padded * transpose(perm_Q(s, t, N));
    E.set_block_meta(BlockMeta{meta->n, t, t});
    return E;
}

} // namespace glt
