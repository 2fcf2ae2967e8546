#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "glt/matrix.hpp"

namespace glt {

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SVDResult {
    DenseMatrix U;                       // rows x rows, unitary
    std::vector<double> singular_values; // nonincreasing, length min(rows, cols)
    DenseMatrix V;                       // cols x cols, unitary
};

namespace detail {

// Orthonormal completion of the first `have` columns of Q (m x m) to a full
// unitary basis, by Gram-Schmidt over canonical vectors.
inline void complete_unitary(DenseMatrix& Q, std::int64_t have) {
    const std::int64_t m = Q.rows();
    std::int64_t next = have;
    for (std::int64_t e = 0; e < m && next < m; ++e) {
        std::vector<cplx> v(static_cast<std::size_t>(m));
        v[static_cast<std::size_t>(e)] = 1.0;
        for (int pass = 0; pass < 2; ++pass)
            for (std::int64_t j = 0; j < next; ++j) {
                cplx dot = 0.0;
                for (std::int64_t i = 0; i < m; ++i)
                    dot += std::conj(Q(i, j)) * v[static_cast<std::size_t>(i)];
                for (std::int64_t i = 0; i < m; ++i)
                    v[static_cast<std::size_t>(i)] -= dot * Q(i, j);
            }
        double nrm = 0.0;
        for (auto& x : v) nrm += std::norm(x);
        nrm = std::sqrt(nrm);
        if (nrm < 1e-8) continue;
        for (std::int64_t i = 0; i < m; ++i) Q(i, next) = v[static_cast<std::size_t>(i)] / nrm;
        ++next;
    }
    if (next < m) throw NumericalError("complete_unitary: failed to complete basis");
}

} // namespace detail

/// Full SVD by one-sided Jacobi on columns; deterministic for fixed input.
inline SVDResult svd(const DenseMatrix& X) {
    const std::int64_t m = X.rows(), n = X.cols();
    if (m == 0 || n == 0)
        throw std::invalid_argument("svd: empty matrix");
    if (m < n) {
        // Work on the adjoint and swap factors.
        SVDResult r = svd(adjoint(X));
        return SVDResult{std::move(r.V), std::move(r.singular_values), std::move(r.U)};
    }

    DenseMatrix G = X;                      // m x n, columns get orthogonalized
    DenseMatrix V = DenseMatrix::identity(n);
    const int max_sweeps = 60;
    // relative orthogonality threshold; a few units above the rounding-noise
    // floor of the column inner products so degenerate columns still settle
    const double tol = 1e-14 * std::sqrt(static_cast<double>(m));
    // Columns whose norm falls below this carry numerically-zero singular
    // values; rotating them against live columns never reduces the relative
    // correlation, so they are excluded from the convergence criterion.
    const double col_zero2 = [&] {
        double f2 = 0.0;
        for (const auto& v : G.data()) f2 += std::norm(v);
        const double z = 1e-15 * std::sqrt(f2);
        return z * z;
    }();

    bool converged = false;
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        converged = true;
        for (std::int64_t p = 0; p < n - 1; ++p)
            for (std::int64_t q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0;
                cplx gamma = 0.0;
                for (std::int64_t i = 0; i < m; ++i) {
                    alpha += std::norm(G(i, p));
                    beta += std::norm(G(i, q));
                    gamma += std::conj(G(i, p)) * G(i, q);
                }
                const double ag = std::abs(gamma);
                if (alpha <= col_zero2 || beta <= col_zero2) continue;
                if (ag <= tol * std::sqrt(alpha * beta) || ag == 0.0) continue;
                converged = false;
                // Absorb the phase of gamma into column q, then apply the
                // real Jacobi rotation that diagonalizes the 2x2 Gram matrix
                // [[alpha, |gamma|], [|gamma|, beta]].
                const cplx w = std::conj(gamma) / ag; // e^{-i arg(gamma)}
                const double zeta = (beta - alpha) / (2.0 * ag);
                const double t = (zeta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::int64_t i = 0; i < m; ++i) {
                    const cplx gp = G(i, p), gq = w * G(i, q);
                    G(i, p) = c * gp - s * gq;
                    G(i, q) = s * gp + c * gq;
                }
                for (std::int64_t i = 0; i < n; ++i) {
                    const cplx vp = V(i, p), vq = w * V(i, q);
                    V(i, p) = c * vp - s * vq;
                    V(i, q) = s * vp + c * vq;
                }
            }
    }
    if (!converged)
        throw NumericalError("svd: Jacobi sweeps did not converge within cap (60)");

    std::vector<double> sv(static_cast<std::size_t>(n));
    for (std::int64_t j = 0; j < n; ++j) {
        double s2 = 0.0;
        for (std::int64_t i = 0; i < m; ++i) s2 += std::norm(G(i, j));
        sv[static_cast<std::size_t>(j)] = std::sqrt(s2);
    }

    // Sort singular values nonincreasing, permuting columns along.
    std::vector<std::int64_t> ord(static_cast<std::size_t>(n));
    std::iota(ord.begin(), ord.end(), 0);
    std::stable_sort(ord.begin(), ord.end(), [&](std::int64_t a, std::int64_t b) {
        return sv[static_cast<std::size_t>(a)] > sv[static_cast<std::size_t>(b)];
    });

    DenseMatrix U(m, m), Vs(n, n);
    std::vector<double> svs(static_cast<std::size_t>(n));
    const double eps_col = 1e-14 * (sv.empty() ? 1.0 : (1.0 + sv[static_cast<std::size_t>(ord[0])]));
    std::int64_t nonzero = 0;
    for (std::int64_t jj = 0; jj < n; ++jj) {
        const std::int64_t j = ord[static_cast<std::size_t>(jj)];
        const double s = sv[static_cast<std::size_t>(j)];
        svs[static_cast<std::size_t>(jj)] = s;
        for (std::int64_t i = 0; i < n; ++i) Vs(i, jj) = V(i, j);
        if (s > eps_col) {
            for (std::int64_t i = 0; i < m; ++i) U(i, jj) = G(i, j) / s;
            nonzero = jj + 1;
        }
    }
    detail::complete_unitary(U, nonzero);
    return SVDResult{std::move(U), std::move(svs), std::move(Vs)};
}

struct EigResult {
    std::vector<double> eigenvalues; // nondecreasing
    DenseMatrix eigenvectors;        // unitary, columns
};

namespace detail {

// Householder tridiagonalization of a Hermitian matrix, followed by a phase
// scaling that makes the subdiagonal real nonnegative. A is overwritten; on
// return d holds the diagonal, e the (real) subdiagonal, and Q the
// accumulated unitary (only when want_q).
inline void tridiagonalize(DenseMatrix A, std::vector<double>& d, std::vector<double>& e,
                           DenseMatrix& Q, bool want_q) {
    const std::int64_t n = A.rows();
    if (want_q) Q = DenseMatrix::identity(n);
    d.assign(static_cast<std::size_t>(n), 0.0);
    e.assign(static_cast<std::size_t>(n), 0.0);

    for (std::int64_t k = 0; k + 2 < n; ++k) {
        // Householder vector for column k, rows k+1..n-1.
        double xnorm2 = 0.0;
        for (std::int64_t i = k + 1; i < n; ++i) xnorm2 += std::norm(A(i, k));
        const double xnorm = std::sqrt(xnorm2);
        if (xnorm == 0.0) continue;
        const cplx x0 = A(k + 1, k);
        const cplx phase = (std::abs(x0) > 0.0) ? x0 / std::abs(x0) : cplx(1.0, 0.0);
        const cplx alpha = -phase * xnorm;
        std::vector<cplx> v(static_cast<std::size_t>(n), 0.0);
        for (std::int64_t i = k + 1; i < n; ++i) v[static_cast<std::size_t>(i)] = A(i, k);
        v[static_cast<std::size_t>(k + 1)] -= alpha;
        double vnorm2 = 0.0;
        for (std::int64_t i = k + 1; i < n; ++i) vnorm2 += std::norm(v[static_cast<std::size_t>(i)]);
        if (vnorm2 == 0.0) continue;

        // A <- H A H with H = I - 2 v v^* / (v^* v).
        const double coef = 2.0 / vnorm2;
        // w = coef * A v  (only rows/cols >= k matter; keep full for clarity)
        std::vector<cplx> w(static_cast<std::size_t>(n), 0.0);
        for (std::int64_t i = k; i < n; ++i) {
            cplx acc = 0.0;
            for (std::int64_t j = k + 1; j < n; ++j) acc += A(i, j) * v[static_cast<std::size_t>(j)];
            w[static_cast<std::size_t>(i)] = coef * acc;
        }
        // K = (coef/2) * v^* w
        cplx K = 0.0;
        for (std::int64_t i = k + 1; i < n; ++i)
            K += std::conj(v[static_cast<std::size_t>(i)]) * w[static_cast<std::size_t>(i)];
        K *= 0.5 * coef;
        // w <- w - K v
        for (std::int64_t i = k + 1; i < n; ++i)
            w[static_cast<std::size_t>(i)] -= K * v[static_cast<std::size_t>(i)];
        // A <- A - v w^* - w v^*
        for (std::int64_t i = k; i < n; ++i)
            for (std::int64_t j = k; j < n; ++j)
                A(i, j) -= v[static_cast<std::size_t>(i)] * std::conj(w[static_cast<std::size_t>(j)]) +
                           w[static_cast<std::size_t>(i)] * std::conj(v[static_cast<std::size_t>(j)]);

        if (want_q) {
            // Q <- Q H
            for (std::int64_t i = 0; i < n; ++i) {
                cplx acc = 0.0;
                for (std::int64_t j = k + 1; j < n; ++j)
                    acc += Q(i, j) * v[static_cast<std::size_t>(j)];
                acc *= coef;
                for (std::int64_t j = k + 1; j < n; ++j)
                    Q(i, j) -= acc * std::conj(v[static_cast<std::size_t>(j)]);
            }
        }
    }

    // Phase-scale so the subdiagonal becomes real nonnegative.
    cplx scale = 1.0;
    for (std::int64_t i = 0; i < n; ++i) {
        if (i > 0) {
            // scale_i = scale_{i-1} * phase(T_{i,i-1}) makes
            // conj(scale_i) * T_{i,i-1} * scale_{i-1} = |T_{i,i-1}|.
            const cplx sub = A(i, i - 1);
            const double a = std::abs(sub);
            e[static_cast<std::size_t>(i - 1)] = a;
            scale *= (a > 0.0) ? sub / a : cplx(1.0, 0.0);
        }
        d[static_cast<std::size_t>(i)] = A(i, i).real();
        if (want_q)
            for (std::int64_t r = 0; r < n; ++r) Q(r, i) *= scale;
    }
}

// Implicit-shift QL on a real symmetric tridiagonal (d, e); rotations are
// accumulated into the complex columns of Q when want_q.
inline void tql_implicit(std::vector<double>& d, std::vector<double>& e, DenseMatrix& Q,
                         bool want_q) {
    const std::int64_t n = static_cast<std::int64_t>(d.size());
    if (n == 0) return;
    e.resize(static_cast<std::size_t>(n), 0.0);
    // shift e so that e[i] couples d[i] and d[i+1]; e[n-1] unused
    const int max_iter = 50;
    for (std::int64_t l = 0; l < n; ++l) {
        int iter = 0;
        for (;;) {
            std::int64_t m = l;
            for (; m < n - 1; ++m) {
                const double dd = std::abs(d[(std::size_t)m]) + std::abs(d[(std::size_t)m + 1]);
                if (std::abs(e[(std::size_t)m]) <= 1e-16 * dd) break;
            }
            if (m == l) break;
            if (++iter > max_iter)
                throw NumericalError("eig_hermitian: QL iteration cap (50) exceeded");
            double g = (d[(std::size_t)l + 1] - d[(std::size_t)l]) / (2.0 * e[(std::size_t)l]);
            double r = std::hypot(g, 1.0);
            g = d[(std::size_t)m] - d[(std::size_t)l] +
                e[(std::size_t)l] / (g + (g >= 0 ? std::abs(r) : -std::abs(r)));
            double s = 1.0, c = 1.0, p = 0.0;
            std::int64_t i = m - 1;
            for (; i >= l; --i) {
                double f = s * e[(std::size_t)i];
                const double b = c * e[(std::size_t)i];
                r = std::hypot(f, g);
                e[(std::size_t)i + 1] = r;
                if (r == 0.0) {
                    d[(std::size_t)i + 1] -= p;
                    e[(std::size_t)m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[(std::size_t)i + 1] - p;
                r = (d[(std::size_t)i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[(std::size_t)i + 1] = g + p;
                g = c * r - b;
                if (want_q)
                    for (std::int64_t k = 0; k < Q.rows(); ++k) {
                        const cplx qi1 = Q(k, i + 1), qi = Q(k, i);
                        Q(k, i + 1) = s * qi + c * qi1;
                        Q(k, i) = c * qi - s * qi1;
                    }
            }
            if (r == 0.0 && i >= l) continue;
            d[(std::size_t)l] -= p;
            e[(std::size_t)l] = g;
            e[(std::size_t)m] = 0.0;
        }
    }
}

} // namespace detail

inline double hermitian_deviation(const DenseMatrix& X) {
    double dev = 0.0;
    for (std::int64_t i = 0; i < X.rows(); ++i)
        for (std::int64_t j = i; j < X.cols(); ++j)
            dev = std::max(dev, std::abs(X(i, j) - std::conj(X(j, i))));
    return dev;
}

/// Eigendecomposition of a Hermitian matrix (symmetrized internally);
/// eigenvalues ascending. Pass want_vectors=false for a spectra-only path.
inline EigResult eig_hermitian(const DenseMatrix& X, bool want_vectors = true) {
    if (X.rows() != X.cols())
        throw std::invalid_argument("eig_hermitian: matrix not square");
    const double scale = max_abs(X);
    if (hermitian_deviation(X) > 1e-12 * (1.0 + scale))
        throw std::invalid_argument("eig_hermitian: matrix not Hermitian within tolerance");

    const std::int64_t n = X.rows();
    DenseMatrix A(n, n);
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = 0; j < n; ++j)
            A(i, j) = 0.5 * (X(i, j) + std::conj(X(j, i)));

    std::vector<double> d, e;
    DenseMatrix Q;
    detail::tridiagonalize(std::move(A), d, e, Q, want_vectors);
    detail::tql_implicit(d, e, Q, want_vectors);

    std::vector<std::int64_t> ord(d.size());
    std::iota(ord.begin(), ord.end(), 0);
    std::stable_sort(ord.begin(), ord.end(),
                     [&](std::int64_t a, std::int64_t b) { return d[(std::size_t)a] < d[(std::size_t)b]; });
    EigResult res;
    res.eigenvalues.resize(d.size());
    if (want_vectors) res.eigenvectors = DenseMatrix(n, n);
    for (std::size_t k = 0; k < d.size(); ++k) {
        res.eigenvalues[k] = d[(std::size_t)ord[k]];
        if (want_vectors)
            for (std::int64_t i = 0; i < n; ++i)
                res.eigenvectors(i, (std::int64_t)k) = Q(i, ord[k]);
    }
    return res;
}

/// Moore-Penrose pseudoinverse via SVD; sigma_i <= rel_tol * sigma_1 treated as zero.
inline DenseMatrix pinv(const DenseMatrix& X, double rel_tol = 1e-12) {
    if (rel_tol < 0) throw std::invalid_argument("pinv: rel_tol must be >= 0");
    SVDResult s = svd(X);
    const double cutoff = rel_tol * (s.singular_values.empty() ? 0.0 : s.singular_values[0]);
    const std::int64_t m = X.rows(), n = X.cols();
    const std::int64_t k = std::min(m, n);
    // X^+ = V Sigma^+ U^*
    DenseMatrix P(n, m);
    for (std::int64_t j = 0; j < k; ++j) {
        const double sv = s.singular_values[(std::size_t)j];
        if (sv <= cutoff || sv == 0.0) continue;
        const double inv = 1.0 / sv;
        for (std::int64_t i = 0; i < n; ++i) {
            const cplx vij = s.V(i, j) * inv;
            if (vij == cplx{}) continue;
            for (std::int64_t c = 0; c < m; ++c) P(i, c) += vij * std::conj(s.U(c, j));
        }
    }
    return P;
}

/// Solve A X = B for Hermitian positive definite A via Cholesky.
inline DenseMatrix solve_spd(const DenseMatrix& A, const DenseMatrix& B) {
    if (A.rows() != A.cols()) throw std::invalid_argument("solve_spd: A not square");
    if (A.rows() != B.rows()) throw std::invalid_argument("solve_spd: size mismatch");
    const std::int64_t n = A.rows();
    DenseMatrix L(n, n);
    for (std::int64_t j = 0; j < n; ++j) {
        double diag = A(j, j).real();
        for (std::int64_t k = 0; k < j; ++k) diag -= std::norm(L(j, k));
        if (diag <= 0.0)
            throw NumericalError("solve_spd: non-positive pivot (matrix not positive definite)");
        const double ljj = std::sqrt(diag);
        L(j, j) = ljj;
        for (std::int64_t i = j + 1; i < n; ++i) {
            cplx v = A(i, j);
            for (std::int64_t k = 0; k < j; ++k) v -= L(i, k) * std::conj(L(j, k));
            L(i, j) = v / ljj;
        }
    }
    DenseMatrix X = B;
    // forward: L Y = B
    for (std::int64_t c = 0; c < X.cols(); ++c) {
        for (std::int64_t i = 0; i < n; ++i) {
            cplx v = X(i, c);
            for (std::int64_t k = 0; k < i; ++k) v -= L(i, k) * X(k, c);
            X(i, c) = v / L(i, i);
        }
        // backward: L^* X = Y
        for (std::int64_t i = n - 1; i >= 0; --i) {
            cplx v = X(i, c);
            for (std::int64_t k = i + 1; k < n; ++k) v -= std::conj(L(k, i)) * X(k, c);
            X(i, c) = v / L(i, i);
        }
    }
    return X;
}

/// Solve A X = B for general square A via LU with partial pivoting.
inline DenseMatrix solve_lu(const DenseMatrix& A, const DenseMatrix& B) {
    if (A.rows() != A.cols()) throw std::invalid_argument("solve_lu: A not square");
    if (A.rows() != B.rows()) throw std::invalid_argument("solve_lu: size mismatch");
    const std::int64_t n = A.rows();
    DenseMatrix LU = A;
    std::vector<std::int64_t> piv(static_cast<std::size_t>(n));
    std::iota(piv.begin(), piv.end(), 0);
    for (std::int64_t k = 0; k < n; ++k) {
        std::int64_t p = k;
        double best = std::abs(LU(k, k));
        for (std::int64_t i = k + 1; i < n; ++i)
            if (std::abs(LU(i, k)) > best) { best = std::abs(LU(i, k)); p = i; }
        if (best == 0.0) throw NumericalError("solve_lu: singular matrix");
        if (p != k) {
            for (std::int64_t j = 0; j < n; ++j) std::swap(LU(k, j), LU(p, j));
            std::swap(piv[(std::size_t)k], piv[(std::size_t)p]);
        }
        for (std::int64_t i = k + 1; i < n; ++i) {
            LU(i, k) /= LU(k, k);
            const cplx lik = LU(i, k);
            for (std::int64_t j = k + 1; j < n; ++j) LU(i, j) -= lik * LU(k, j);
        }
    }
    DenseMatrix X(n, B.cols());
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t c = 0; c < B.cols(); ++c) X(i, c) = B(piv[(std::size_t)i], c);
    for (std::int64_t c = 0; c < X.cols(); ++c) {
        for (std::int64_t i = 0; i < n; ++i)
            for (std::int64_t k = 0; k < i; ++k) X(i, c) -= LU(i, k) * X(k, c);
        for (std::int64_t i = n - 1; i >= 0; --i) {
            for (std::int64_t k = i + 1; k < n; ++k) X(i, c) -= LU(i, k) * X(k, c);
            X(i, c) /= LU(i, i);
        }
    }
    return X;
}

/// g applied to a Hermitian matrix through its eigendecomposition.
template <typename Fn>
inline DenseMatrix hermitian_matrix_function(const DenseMatrix& X, Fn&& g) {
    EigResult eig = eig_hermitian(X);
    const std::int64_t n = X.rows();
    DenseMatrix R(n, n);
    for (std::int64_t k = 0; k < n; ++k) {
        const cplx gl = g(eig.eigenvalues[(std::size_t)k]);
        for (std::int64_t i = 0; i < n; ++i) {
            const cplx qik = eig.eigenvectors(i, k) * gl;
            for (std::int64_t j = 0; j < n; ++j)
                R(i, j) += qik * std::conj(eig.eigenvectors(j, k));
        }
    }
    return R;
}

/// Spectral norm (largest singular value).
inline double spectral_norm(const DenseMatrix& X) {
    if (X.rows() == 0 || X.cols() == 0) return 0.0;
    return svd(X).singular_values.front();
}

/// Numerical rank at a relative threshold on the largest singular value.
inline std::int64_t numerical_rank(const DenseMatrix& X, double rel_tol = 1e-12) {
    SVDResult s = svd(X);
    if (s.singular_values.empty()) return 0;
    const double cutoff = rel_tol * s.singular_values[0];
    std::int64_t r = 0;
    for (double v : s.singular_values)
        if (v > cutoff && v > 0.0) ++r;
    return r;
}

} // namespace glt
