#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "glt/decomp.hpp"
#include "glt/matrix.hpp"
#include "glt/multi_index.hpp"
#include "glt/symbol.hpp"

namespace glt {

/// n-th multilevel block Toeplitz matrix generated by a finite trig
/// polynomial: block (i,j) = f_{i-j}; absent coefficients are zero.
inline DenseMatrix toeplitz(const MultiIndex& n, const TrigPolySymbol& f) {
    if (n.dim() != f.d())
        throw std::invalid_argument("toeplitz: dimension mismatch");
    const std::int64_t N = n_total(n);
    const std::int64_t r = f.r(), s = f.s();
    DenseMatrix T(N * r, N * s);
    const auto idx = lex_range(n);
    for (std::int64_t bi = 0; bi < N; ++bi)
        for (std::int64_t bj = 0; bj < N; ++bj) {
            TrigPolySymbol::Key diff(n.dim());
            for (std::size_t k = 0; k < n.dim(); ++k)
                diff[k] = idx[(std::size_t)bi][k] - idx[(std::size_t)bj][k];
            auto it = f.coeffs().find(diff);
            if (it == f.coeffs().end()) continue;
            const DenseMatrix& blk = it->second;
            for (std::int64_t a = 0; a < r; ++a)
                for (std::int64_t b = 0; b < s; ++b) T(bi * r + a, bj * s + b) = blk(a, b);
        }
    T.set_block_meta(BlockMeta{n, r, s});
    return T;
}

/// n-th diagonal sampling matrix: block i = a(i/n), i = 1..n lexicographic.
inline DenseMatrix diag_sampling(const MultiIndex& n, const CoefficientFunction& a) {
    if (n.dim() != a.d())
        throw std::invalid_argument("diag_sampling: dimension mismatch");
    const std::int64_t N = n_total(n);
    const std::int64_t r = a.rows(), s = a.cols();
    DenseMatrix D(N * r, N * s);
    const auto idx = lex_range(n);
    std::vector<double> x(n.dim());
    for (std::int64_t bi = 0; bi < N; ++bi) {
        for (std::size_t k = 0; k < n.dim(); ++k)
            x[k] = static_cast<double>(idx[(std::size_t)bi][k]) / static_cast<double>(n[k]);
        DenseMatrix blk;
        try {
            blk = a.eval(x);
        } catch (const DomainError& e) {
            throw DomainError(std::string(e.what()) + " at sample index " +
                              std::to_string(bi + 1));
        }
        for (std::int64_t p = 0; p < r; ++p)
            for (std::int64_t q = 0; q < s; ++q) D(bi * r + p, bi * s + q) = blk(p, q);
    }
    D.set_block_meta(BlockMeta{n, r, s});
    return D;
}

/// GLT9 approximant of a separable symbol: sum_i D_n(a_i I_r) T_n(f_i).
inline DenseMatrix glt9_approximant(const MultiIndex& n, const SeparableSymbol& kappa) {
    const std::int64_t N = n_total(n);
    const std::int64_t r = kappa.r(), s = kappa.s();
    DenseMatrix A(N * r, N * s);
    const auto idx = lex_range(n);
    std::vector<double> x(n.dim());
    for (const auto& term : kappa.terms()) {
        DenseMatrix T = toeplitz(n, term.f);
        // multiply on the left by D_n(a I_r): row-block i scaled by a(i/n)
        for (std::int64_t bi = 0; bi < N; ++bi) {
            for (std::size_t k = 0; k < n.dim(); ++k)
                x[k] = static_cast<double>(idx[(std::size_t)bi][k]) / static_cast<double>(n[k]);
            const double av = term.a.eval(x);
            if (av == 0.0) continue;
            for (std::int64_t a2 = 0; a2 < r; ++a2)
                for (std::int64_t j = 0; j < N * s; ++j)
                    A(bi * r + a2, j) += av * T(bi * r + a2, j);
        }
    }
    A.set_block_meta(BlockMeta{n, r, s});
    return A;
}

/// Seeded splitmix64 stream; the constants define the reproducibility
/// contract across reimplementations.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// uniform in [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// uniform in [-1, 1)
    double symmetric() { return 2.0 * uniform() - 1.0; }

private:
    std::uint64_t state_;
};

/// R + N with rank(R) <= floor(c * N(n) * min(r,s)) (sparse random spikes)
/// and ||N|| <= omega (scaled random dense); reproducible from the seed.
inline DenseMatrix random_zero_distributed(const MultiIndex& n, std::int64_t r, std::int64_t s,
                                           std::uint64_t seed, double rank_fraction,
                                           double norm_eps) {
    if (rank_fraction < 0.0 || rank_fraction > 1.0)
        throw std::invalid_argument("random_zero_distributed: rank_fraction in [0,1]");
    if (norm_eps < 0.0)
        throw std::invalid_argument("random_zero_distributed: norm_eps >= 0");
    const std::int64_t N = n_total(n);
    const std::int64_t rows = N * r, cols = N * s;
    DenseMatrix Z(rows, cols);
    SplitMix64 rng(seed);

    const std::int64_t max_rank =
        static_cast<std::int64_t>(rank_fraction * static_cast<double>(N * std::min(r, s)));
    for (std::int64_t k = 0; k < max_rank; ++k) {
        const std::int64_t i = static_cast<std::int64_t>(rng.next() % static_cast<std::uint64_t>(rows));
        const std::int64_t j = static_cast<std::int64_t>(rng.next() % static_cast<std::uint64_t>(cols));
        Z(i, j) += cplx(1.0 + rng.uniform(), 0.0); // spike magnitude in [1, 2)
    }

    if (norm_eps > 0.0) {
        DenseMatrix Nmat(rows, cols);
        for (auto& v : Nmat.data()) v = cplx(rng.symmetric(), 0.0);
        const double nn = spectral_norm(Nmat);
        if (nn > 0.0) {
            const double scale = norm_eps / nn;
            for (std::size_t t = 0; t < Z.data().size(); ++t)
                Z.data()[t] += scale * Nmat.data()[t];
        }
    }
    Z.set_block_meta(BlockMeta{n, r, s});
    return Z;
}

struct BlockAssembleResult {
    DenseMatrix naive;       // B_n: plain block concatenation
    DenseMatrix interleaved; // A_n: the d-level (sum r_i, sum s_j)-block matrix
};

/// Assemble a rho x sigma grid of d-level (r_i, s_j)-block matrices sharing
/// the same level orders n, and unscramble the naive concatenation B_n into
/// the interleaved matrix A_n = (P_{r,N} diag_i P_{r_i,N}^T) B_n
/// (P_{s,N} diag_j P_{s_j,N}^T)^T.
inline BlockAssembleResult block_assemble(const std::vector<std::vector<DenseMatrix>>& parts) {
    if (parts.empty() || parts[0].empty())
        throw std::invalid_argument("block_assemble: empty grid");
    const std::size_t rho = parts.size(), sigma = parts[0].size();
    for (const auto& row : parts)
        if (row.size() != sigma)
            throw std::invalid_argument("block_assemble: ragged grid");

    const auto& meta0 = parts[0][0].block_meta();
    if (!meta0)
        throw std::invalid_argument("block_assemble: parts need block_meta");
    const MultiIndex n = meta0->n;
    const std::int64_t N = n_total(n);

    std::vector<std::int64_t> ri(rho), sj(sigma);
    for (std::size_t i = 0; i < rho; ++i) {
        for (std::size_t j = 0; j < sigma; ++j) {
            const auto& meta = parts[i][j].block_meta();
            if (!meta || !(meta->n == n))
                throw std::invalid_argument("block_assemble: inconsistent level orders");
            if (j == 0) ri[i] = meta->r;
            else if (meta->r != ri[i])
                throw std::invalid_argument("block_assemble: inconsistent row block sizes");
            if (i == 0) sj[j] = meta->s;
            else if (meta->s != sj[j])
                throw std::invalid_argument("block_assemble: inconsistent col block sizes");
        }
    }
    std::int64_t r = 0, s = 0;
    for (auto v : ri) r += v;
    for (auto v : sj) s += v;

    // naive concatenation
    DenseMatrix B(N * r, N * s);
    std::int64_t ro = 0;
    for (std::size_t i = 0; i < rho; ++i) {
        std::int64_t co = 0;
        for (std::size_t j = 0; j < sigma; ++j) {
            const DenseMatrix& P = parts[i][j];
            for (std::int64_t a = 0; a < P.rows(); ++a)
                for (std::int64_t b = 0; b < P.cols(); ++b) B(ro + a, co + b) = P(a, b);
            co += N * sj[j];
        }
        ro += N * ri[i];
    }

    std::vector<DenseMatrix> pre_blocks, post_blocks;
    for (std::size_t i = 0; i < rho; ++i) pre_blocks.push_back(transpose(perm_P(ri[i], N)));
    for (std::size_t j = 0; j < sigma; ++j) post_blocks.push_back(transpose(perm_P(sj[j], N)));
    const DenseMatrix pre = perm_P(r, N) * blockdiag(pre_blocks);
    const DenseMatrix post = perm_P(s, N) * blockdiag(post_blocks);

    DenseMatrix A = pre * B * transpose(post);
    A.set_block_meta(BlockMeta{n, r, s});
    return BlockAssembleResult{std::move(B), std::move(A)};
}

} // namespace glt
