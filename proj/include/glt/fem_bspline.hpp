#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "glt/coeff_expr.hpp"
#include "glt/decomp.hpp"
#include "glt/generators.hpp"
#include "glt/matrix.hpp"
#include "glt/quadrature.hpp"
#include "glt/symbol.hpp"

namespace glt {

/// Cox-de Boor evaluation of the 0-based i-th B-spline of degree p on an
/// arbitrary nondecreasing knot sequence; 0/0 conventions resolve to 0.
/// The right endpoint of the overall knot span is treated as closed.
inline double bspline_value(const std::vector<double>& knots, int p, std::int64_t i, double x) {
    const std::int64_t nk = static_cast<std::int64_t>(knots.size());
    if (i < 0 || i + p + 1 >= nk)
        throw std::invalid_argument("bspline_value: index out of range");
    if (p == 0) {
        const double right = knots.back();
        if (knots[(std::size_t)i] <= x && x < knots[(std::size_t)i + 1]) return 1.0;
        // closed right endpoint of the last nonempty interval
        if (x == right && knots[(std::size_t)i] < knots[(std::size_t)i + 1] &&
            knots[(std::size_t)i + 1] == right)
            return 1.0;
        return 0.0;
    }
    double acc = 0.0;
    const double d1 = knots[(std::size_t)(i + p)] - knots[(std::size_t)i];
    if (d1 > 0.0)
        acc += (x - knots[(std::size_t)i]) / d1 * bspline_value(knots, p - 1, i, x);
    const double d2 = knots[(std::size_t)(i + p + 1)] - knots[(std::size_t)(i + 1)];
    if (d2 > 0.0)
        acc += (knots[(std::size_t)(i + p + 1)] - x) / d2 * bspline_value(knots, p - 1, i + 1, x);
    return acc;
}

/// First derivative via the standard B-spline derivative formula.
inline double bspline_derivative(const std::vector<double>& knots, int p, std::int64_t i,
                                 double x) {
    if (p == 0) return 0.0;
    double acc = 0.0;
    const double d1 = knots[(std::size_t)(i + p)] - knots[(std::size_t)i];
    if (d1 > 0.0) acc += p / d1 * bspline_value(knots, p - 1, i, x);
    const double d2 = knots[(std::size_t)(i + p + 1)] - knots[(std::size_t)(i + 1)];
    if (d2 > 0.0) acc -= p / d2 * bspline_value(knots, p - 1, i + 1, x);
    return acc;
}

inline double bspline_eval(const std::vector<double>& knots, int p, std::int64_t i, double x,
                           int deriv) {
    if (deriv == 0) return bspline_value(knots, p, i, x);
    if (deriv == 1) return bspline_derivative(knots, p, i, x);
    throw std::invalid_argument("bspline_eval: deriv must be 0 or 1");
}

/// B-spline space of degree p and smoothness C^k on n uniform elements of
/// [0,1]: boundary knots of multiplicity p+1, interior knots i/n of
/// multiplicity p-k.
struct SplineSpace {
    int p = 1;
    int k = 0;
    std::int64_t n = 1;
    std::vector<double> knots;

    SplineSpace(int p_, int k_, std::int64_t n_) : p(p_), k(k_), n(n_) {
        if (p < 1 || k < 0 || k > p - 1 || n < 1)
            throw std::invalid_argument("SplineSpace: need p >= 1, 0 <= k <= p-1, n >= 1");
        for (int j = 0; j <= p; ++j) knots.push_back(0.0);
        for (std::int64_t e = 1; e < n; ++e)
            for (int j = 0; j < p - k; ++j)
                knots.push_back(static_cast<double>(e) / static_cast<double>(n));
        for (int j = 0; j <= p; ++j) knots.push_back(1.0);
    }

    std::int64_t dim_full() const { return n * (p - k) + k + 1; }
    /// dimension of the subspace vanishing at 0 and 1 (first/last spline dropped)
    std::int64_t dim_0() const { return n * (p - k) + k - 1; }

    double eval(std::int64_t i, double x, int deriv = 0) const {
        if (i < 0 || i >= dim_full())
            throw std::invalid_argument("SplineSpace::eval: index out of range");
        if (x < 0.0 || x > 1.0)
            throw std::invalid_argument("SplineSpace::eval: x outside [0,1]");
        return bspline_eval(knots, p, i, x, deriv);
    }

    /// support of the 0-based i-th B-spline: [tau_i, tau_{i+p+1}]
    std::pair<double, double> support(std::int64_t i) const {
        return {knots[(std::size_t)i], knots[(std::size_t)(i + p + 1)]};
    }
};

/// The p-k reference functions beta_{t,[p,k]} on the reference knot sequence
/// (each of 0..eta repeated p-k times), whose integer shifts generate the
/// interior B-splines.
struct ReferenceSplines {
    int p = 1;
    int k = 0;
    std::int64_t eta = 2; // ceil((p+1)/(p-k))
    std::int64_t nu = 1;  // ceil((k+1)/(p-k))
    std::vector<double> knots;

    ReferenceSplines(int p_, int k_) : p(p_), k(k_) {
        if (p < 1 || k < 0 || k > p - 1)
            throw std::invalid_argument("ReferenceSplines: need p >= 1, 0 <= k <= p-1");
        const std::int64_t mult = p - k;
        eta = (p + 1 + mult - 1) / mult;
        nu = (k + 1 + mult - 1) / mult;
        for (std::int64_t v = 0; v <= eta; ++v)
            for (std::int64_t j = 0; j < mult; ++j) knots.push_back(static_cast<double>(v));
    }

    std::int64_t count() const { return p - k; }

    /// beta_t for 1-based t in 1..p-k; zero outside [0, eta].
    double eval(std::int64_t t, double y, int deriv = 0) const {
        if (t < 1 || t > count())
            throw std::invalid_argument("ReferenceSplines::eval: t out of range");
        if (y < 0.0 || y > static_cast<double>(eta)) return 0.0;
        return bspline_eval(knots, p, t - 1, y, deriv);
    }
};

/// Blocks K^{[s]}, H^{[s]}, M^{[s]} of Gram-type reference integrals.
struct ReferenceBlocks {
    DenseMatrix K; // (p-k) x (p-k): int beta'_j(y) beta'_i(y-s) dy
    DenseMatrix H; // (p-k) x (q-l): int beta'_{j,[q,l]}(y) beta_{i,[p,k]}(y-s) dy
    DenseMatrix M; // (q-l) x (q-l): int beta_{j,[q,l]}(y) beta_{i,[q,l]}(y-s) dy
};

inline ReferenceBlocks reference_blocks(int p, int k, int q, int l, std::int64_t shift,
                                        int gauss_order = 0) {
    const ReferenceSplines bp(p, k), bq(q, l);
    if (gauss_order <= 0) gauss_order = std::max(p, q) + 1;
    const QuadratureRule rule = gauss_legendre(gauss_order);
    const std::int64_t lo = std::min<std::int64_t>(0, shift);
    const std::int64_t hi = std::max(bp.eta + shift, bq.eta);

    ReferenceBlocks blocks{DenseMatrix(p - k, p - k), DenseMatrix(p - k, q - l),
                           DenseMatrix(q - l, q - l)};
    const double s = static_cast<double>(shift);
    for (std::int64_t cell = lo; cell < hi; ++cell) {
        const double a = static_cast<double>(cell), b = a + 1.0;
        for (std::int64_t i = 1; i <= p - k; ++i)
            for (std::int64_t j = 1; j <= p - k; ++j)
                blocks.K(i - 1, j - 1) += integrate(
                    [&](double y) { return bp.eval(j, y, 1) * bp.eval(i, y - s, 1); }, a, b, rule);
        for (std::int64_t i = 1; i <= p - k; ++i)
            for (std::int64_t j = 1; j <= q - l; ++j)
                blocks.H(i - 1, j - 1) += integrate(
                    [&](double y) { return bq.eval(j, y, 1) * bp.eval(i, y - s, 0); }, a, b, rule);
        for (std::int64_t i = 1; i <= q - l; ++i)
            for (std::int64_t j = 1; j <= q - l; ++j)
                blocks.M(i - 1, j - 1) += integrate(
                    [&](double y) { return bq.eval(j, y, 0) * bq.eval(i, y - s, 0); }, a, b, rule);
    }
    return blocks;
}

struct FemSymbols {
    TrigPolySymbol kappa; // (p-k) x (p-k)
    TrigPolySymbol xi;    // (p-k) x (q-l)
    TrigPolySymbol mu;    // (q-l) x (q-l)
};

/// kappa(theta) = sum_s K^{[s]} e^{is theta}, and likewise xi from H and mu
/// from M; the sums are finite because blocks vanish for |s| >= eta.
inline FemSymbols fem_symbols(int p, int k, int q, int l) {
    const ReferenceSplines bp(p, k), bq(q, l);
    const std::int64_t smax = std::max(bp.eta, bq.eta);
    FemSymbols out{TrigPolySymbol(1, p - k, p - k), TrigPolySymbol(1, p - k, q - l),
                   TrigPolySymbol(1, q - l, q - l)};
    for (std::int64_t s = -smax; s <= smax; ++s) {
        ReferenceBlocks blocks = reference_blocks(p, k, q, l, s);
        out.kappa.set_coeff({s}, std::move(blocks.K));
        out.xi.set_coeff({s}, std::move(blocks.H));
        out.mu.set_coeff({s}, std::move(blocks.M));
    }
    return out;
}

/// FE saddle-point problem data: trial space S^0_{n,[p,k]}, test space
/// S^0_{n,[q,l]}, diffusion coefficient a(x), reaction constant rho, and
/// expansion parameter m with m(p-k) >= k, m(q-l) >= l.
struct FEProblem {
    int p = 1;
    int k = 0;
    int q = 1;
    int l = 0;
    CoeffExpr a = CoeffExpr::number(1.0);
    double rho = 0.0;
    std::int64_t n = 1;
    std::int64_t m = 0;

    FEProblem(int p_, int k_, int q_, int l_, CoeffExpr a_, double rho_, std::int64_t n_,
              std::int64_t m_ = -1)
        : p(p_), k(k_), q(q_), l(l_), a(std::move(a_)), rho(rho_), n(n_), m(m_) {
        if (m < 0) m = default_m();
        if (m * (p - k) < k || m * (q - l) < l)
            throw std::invalid_argument("FEProblem: m violates m(p-k) >= k, m(q-l) >= l");
    }

    std::int64_t default_m() const {
        // smallest admissible m >= max needed; k v l always works
        return std::max(k, l);
    }

    std::int64_t N() const { return n * (p - k) + k - 1; }
    std::int64_t M() const { return n * (q - l) + l - 1; }
};

namespace detail {

// Indices of basis splines (0-based, skipping the first spline) active on
// element [e/n, (e+1)/n], together with elementwise quadrature.
template <typename Fn>
inline void assemble_elementwise(const SplineSpace& rows, const SplineSpace& cols,
                                 int gauss_order, Fn&& accumulate) {
    const QuadratureRule rule = gauss_legendre(gauss_order);
    const std::int64_t n = rows.n;
    for (std::int64_t e = 0; e < n; ++e) {
        const double a = static_cast<double>(e) / static_cast<double>(n);
        const double b = static_cast<double>(e + 1) / static_cast<double>(n);
        // basis splines of the zero-boundary subspace active on [a, b]
        std::vector<std::int64_t> ri, ci;
        for (std::int64_t i = 1; i <= rows.dim_full() - 2; ++i) {
            auto [lo, hi] = rows.support(i);
            if (lo < b && hi > a) ri.push_back(i);
        }
        for (std::int64_t j = 1; j <= cols.dim_full() - 2; ++j) {
            auto [lo, hi] = cols.support(j);
            if (lo < b && hi > a) ci.push_back(j);
        }
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
            const double x = mid + half * rule.nodes[g];
            const double w = half * rule.weights[g];
            accumulate(ri, ci, x, w);
        }
    }
}

} // namespace detail

/// Stiffness block A(1,1): entries int a(x) phi'_j phi'_i dx with Gauss
/// rules exact for the spline parts (10 points to cover general a).
inline DenseMatrix assemble_A11(const FEProblem& prob) {
    const SplineSpace U(prob.p, prob.k, prob.n);
    const std::int64_t N = prob.N();
    DenseMatrix A(N, N);
    detail::assemble_elementwise(
        U, U, 10,
        [&](const std::vector<std::int64_t>& ri, const std::vector<std::int64_t>& ci, double x,
            double w) {
            double av;
            try {
                av = prob.a.eval1(x);
            } catch (const DomainError& e) {
                throw DomainError(std::string(e.what()) + " at quadrature node x=" +
                                  std::to_string(x));
            }
            if (av == 0.0) return;
            const double scale = w * av;
            std::vector<double> dphi(ri.size());
            for (std::size_t t = 0; t < ri.size(); ++t) dphi[t] = U.eval(ri[t], x, 1);
            // scale * (dphi_i * dphi_j) keeps the accumulation exactly symmetric
            for (std::size_t ii = 0; ii < ri.size(); ++ii)
                for (std::size_t jj = 0; jj < ci.size(); ++jj)
                    A(ri[ii] - 1, ci[jj] - 1) += scale * (dphi[ii] * dphi[jj]);
        });
    return A;
}

/// Coupling block A(1,2): entries int psi'_j phi_i dx.
inline DenseMatrix assemble_A12(const FEProblem& prob) {
    const SplineSpace U(prob.p, prob.k, prob.n);
    const SplineSpace V(prob.q, prob.l, prob.n);
    DenseMatrix A(prob.N(), prob.M());
    detail::assemble_elementwise(
        U, V, std::max(prob.p, prob.q) + 1,
        [&](const std::vector<std::int64_t>& ri, const std::vector<std::int64_t>& ci, double x,
            double w) {
            for (std::size_t ii = 0; ii < ri.size(); ++ii) {
                const double phi = U.eval(ri[ii], x, 0);
                if (phi == 0.0) continue;
                for (std::size_t jj = 0; jj < ci.size(); ++jj)
                    A(ri[ii] - 1, ci[jj] - 1) += w * phi * V.eval(ci[jj], x, 1);
            }
        });
    return A;
}

/// Mass block A(2,2): -rho times the Gram matrix of the psi basis.
inline DenseMatrix assemble_A22(const FEProblem& prob) {
    const SplineSpace V(prob.q, prob.l, prob.n);
    const std::int64_t M = prob.M();
    DenseMatrix A(M, M);
    if (prob.rho == 0.0) return A;
    detail::assemble_elementwise(
        V, V, prob.q + 1,
        [&](const std::vector<std::int64_t>& ri, const std::vector<std::int64_t>& ci, double x,
            double w) {
            const double scale = w * prob.rho;
            std::vector<double> psi(ri.size());
            for (std::size_t t = 0; t < ri.size(); ++t) psi[t] = V.eval(ri[t], x, 0);
            for (std::size_t ii = 0; ii < ri.size(); ++ii)
                for (std::size_t jj = 0; jj < ci.size(); ++jj)
                    A(ri[ii] - 1, ci[jj] - 1) -= scale * (psi[ii] * psi[jj]);
        });
    return A;
}

struct HatExpansion {
    DenseMatrix A11; // (n+m)(p-k) square
    DenseMatrix A12; // (n+m)(p-k) x (n+m)(q-l)
    DenseMatrix A22; // (n+m)(q-l) square
};

/// Pads the FE blocks with identity/zero blocks up to size (n+m)(p-k) and
/// (n+m)(q-l), aligning them with exact block-Toeplitz structure.
inline HatExpansion expand_hats(const FEProblem& prob, const DenseMatrix& A11,
                                const DenseMatrix& A12, const DenseMatrix& A22) {
    const std::int64_t top = prob.m * (prob.p - prob.k) - prob.k;
    const std::int64_t top2 = prob.m * (prob.q - prob.l) - prob.l;
    if (top < 0 || top2 < 0)
        throw std::invalid_argument("expand_hats: m violates admissibility constraints");
    DenseMatrix one(1, 1);
    one(0, 0) = 1.0;
    HatExpansion out{
        blockdiag({DenseMatrix::identity(top), A11, one}),
        DenseMatrix(0, 0),
        blockdiag({DenseMatrix::identity(top2), A22, one}),
    };
    // the pressure block is padded with identity entries like the velocity block
    DenseMatrix pad12(top, top2);
    DenseMatrix zero1(1, 1);
    out.A12 = blockdiag({pad12, A12, zero1});
    return out;
}

/// Schur complement A22 - A12^T A11^{-1} A12, symmetrized after asserting
/// near-symmetry. Cholesky when A11 is positive definite, pivoted LU
/// otherwise.
inline DenseMatrix schur_complement(const DenseMatrix& A11, const DenseMatrix& A12,
                                    const DenseMatrix& A22) {
    DenseMatrix X;
    try {
        X = solve_spd(A11, A12);
    } catch (const NumericalError&) {
        X = solve_lu(A11, A12);
    }
    DenseMatrix S = A22 - transpose(A12) * X;
    const double dev = hermitian_deviation(S);
    if (dev > 1e-11 * (1.0 + max_abs(S)))
        throw NumericalError("schur_complement: result not symmetric within 1e-11");
    DenseMatrix sym(S.rows(), S.cols());
    for (std::int64_t i = 0; i < S.rows(); ++i)
        for (std::int64_t j = 0; j < S.cols(); ++j)
            sym(i, j) = 0.5 * (S(i, j) + std::conj(S(j, i)));
    return sym;
}

struct ToeplitzEqualityReport {
    double max_interior_deviation = 0.0;
    std::int64_t residual_rank = 0;
    std::int64_t rank_bound = 0;
    std::int64_t worst_row = -1; // 0-based, within hat A12
    std::int64_t worst_col = -1;
};

/// Verifies hat A12 = T_{n+m}(xi) + R_n: the interior submatrix matches the
/// Toeplitz matrix entrywise and the residual rank obeys the bound
/// (m+nu(p,k))(p-k) + (m+nu(q,l))(q-l).
inline ToeplitzEqualityReport toeplitz_equality_check(const FEProblem& prob, double tol = 1e-12) {
    const ReferenceSplines bp(prob.p, prob.k), bq(prob.q, prob.l);
    if (prob.n <= bp.nu + bq.nu + 2 * prob.m)
        throw std::invalid_argument("toeplitz_equality_check: n too small for interior window");

    const DenseMatrix A12 = assemble_A12(prob);
    const HatExpansion hat = expand_hats(prob, assemble_A11(prob), A12, assemble_A22(prob));
    const FemSymbols sym = fem_symbols(prob.p, prob.k, prob.q, prob.l);
    const DenseMatrix T = toeplitz(MultiIndex{prob.n + prob.m}, sym.xi);

    const std::int64_t pk = prob.p - prob.k, ql = prob.q - prob.l;
    const std::int64_t row_lo = prob.m * pk;                       // 0-based inclusive
    const std::int64_t row_hi = (prob.n + prob.m - bp.nu) * pk;    // exclusive
    const std::int64_t col_lo = prob.m * ql;
    const std::int64_t col_hi = (prob.n + prob.m - bq.nu) * ql;

    ToeplitzEqualityReport rep;
    rep.rank_bound = (prob.m + bp.nu) * pk + (prob.m + bq.nu) * ql;
    for (std::int64_t i = row_lo; i < row_hi; ++i)
        for (std::int64_t j = col_lo; j < col_hi; ++j) {
            const double dev = std::abs(hat.A12(i, j) - T(i, j));
            if (dev > rep.max_interior_deviation) {
                rep.max_interior_deviation = dev;
                rep.worst_row = i;
                rep.worst_col = j;
            }
        }
    if (rep.max_interior_deviation > tol)
        throw NumericalError("toeplitz_equality_check: interior mismatch " +
                             std::to_string(rep.max_interior_deviation) + " at (" +
                             std::to_string(rep.worst_row + 1) + "," +
                             std::to_string(rep.worst_col + 1) + ")");
    rep.residual_rank = numerical_rank(hat.A12 - T, 1e-10);
    return rep;
}

/// The normalized saddle-point matrix [[n^{-1} A11, A12], [A12^T, n A22]].
inline DenseMatrix normalized_block_matrix(const FEProblem& prob, const DenseMatrix& A11,
                                           const DenseMatrix& A12, const DenseMatrix& A22) {
    const double n = static_cast<double>(prob.n);
    const std::int64_t N = A11.rows(), M = A22.rows();
    DenseMatrix B(N + M, N + M);
    for (std::int64_t i = 0; i < N; ++i)
        for (std::int64_t j = 0; j < N; ++j) B(i, j) = A11(i, j) / n;
    for (std::int64_t i = 0; i < N; ++i)
        for (std::int64_t j = 0; j < M; ++j) {
            B(i, N + j) = A12(i, j);
            B(N + j, i) = A12(i, j);
        }
    for (std::int64_t i = 0; i < M; ++i)
        for (std::int64_t j = 0; j < M; ++j) B(N + i, N + j) = n * A22(i, j);
    return B;
}

/// Samples of the 2x2 block symbol [[a(x) kappa, xi], [xi^*, -rho mu]] on
/// the midpoint grid.
inline GridSampledSymbol block_symbol_grid(int p, int k, int q, int l, const CoeffExpr& a,
                                           double rho, std::int64_t x_count,
                                           std::int64_t theta_count) {
    const FemSymbols sym = fem_symbols(p, k, q, l);
    const std::int64_t pk = p - k, ql = q - l;
    GridSampledSymbol g;
    g.x_counts = {x_count};
    g.theta_counts = {theta_count};
    g.r = g.s = pk + ql;
    for (std::int64_t ix = 0; ix < x_count; ++ix) {
        const double ax = a.eval1(midpoint_x_node(ix, x_count));
        for (std::int64_t it = 0; it < theta_count; ++it) {
            const double theta = midpoint_theta_node(it, theta_count);
            const DenseMatrix kv = sym.kappa.eval1(theta);
            const DenseMatrix xv = sym.xi.eval1(theta);
            const DenseMatrix mv = sym.mu.eval1(theta);
            DenseMatrix blk(pk + ql, pk + ql);
            for (std::int64_t i = 0; i < pk; ++i)
                for (std::int64_t j = 0; j < pk; ++j) blk(i, j) = ax * kv(i, j);
            for (std::int64_t i = 0; i < pk; ++i)
                for (std::int64_t j = 0; j < ql; ++j) {
                    blk(i, pk + j) = xv(i, j);
                    blk(pk + j, i) = std::conj(xv(i, j));
                }
            for (std::int64_t i = 0; i < ql; ++i)
                for (std::int64_t j = 0; j < ql; ++j) blk(pk + i, pk + j) = -rho * mv(i, j);
            g.samples.push_back(std::move(blk));
        }
    }
    return g;
}

/// Samples of the Schur symbol
/// -rho mu(theta) - xi^*(theta) kappa(theta)^{-1} xi(theta) / a(x).
inline GridSampledSymbol schur_symbol(int p, int k, int q, int l, const CoeffExpr& a, double rho,
                                      std::int64_t x_count, std::int64_t theta_count) {
    const FemSymbols sym = fem_symbols(p, k, q, l);
    return schur_symbol_from(sym.kappa, sym.xi, sym.mu, a, rho, x_count, theta_count);
}

} // namespace glt
