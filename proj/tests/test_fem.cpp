#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <array>
#include <cmath>

#include "glt/distribution.hpp"
#include "glt/fem_bspline.hpp"

#include "test_util.hpp"

using glt::CoeffExpr;
using glt::cplx;
using glt::DenseMatrix;
using glt::FEProblem;
using glt::MultiIndex;
using glt::ReferenceSplines;
using glt::SplineSpace;
using testutil::max_diff;

namespace {

FEProblem hat_problem(std::int64_t n, double rho = 0.0) {
    return FEProblem(1, 0, 1, 0, CoeffExpr::number(1.0), rho, n, 0);
}

double real_at(const DenseMatrix& A, std::int64_t i, std::int64_t j) { return A(i, j).real(); }

} // namespace

TEST_CASE("spline space knots and dimensions") {
    const SplineSpace S(2, 0, 3);
    const std::vector<double> expect{0, 0, 0, 1.0 / 3, 1.0 / 3, 2.0 / 3, 2.0 / 3, 1, 1, 1};
    REQUIRE(S.knots.size() == expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i)
        CHECK(S.knots[i] == Catch::Approx(expect[i]));
    CHECK(S.dim_full() == 7);
    CHECK(S.dim_0() == 5);

    const SplineSpace C(3, 1, 4); // interior multiplicity 2
    CHECK(C.dim_full() == 4 * 2 + 1 + 1);
    CHECK(C.dim_0() == 4 * 2 + 1 - 1);
    CHECK(C.knots.front() == 0.0);
    CHECK(C.knots.back() == 1.0);

    CHECK_THROWS_AS(SplineSpace(1, 1, 4), std::invalid_argument);
}

TEST_CASE("bspline evaluation basics") {
    const SplineSpace S(1, 0, 2);
    // interior hat peaks at 0.5
    CHECK(S.eval(1, 0.5) == 1.0);
    CHECK(S.eval(1, 0.25, 1) == Catch::Approx(2.0));
    CHECK(S.eval(1, 0.75, 1) == Catch::Approx(-2.0));
    CHECK(S.eval(1, 0.0) == 0.0);
    CHECK(S.eval(1, 1.0) == 0.0);

    // partition of unity at 50 random points
    const SplineSpace P(3, 1, 10);
    glt::SplitMix64 rng(6001);
    for (int t = 0; t < 50; ++t) {
        const double x = rng.uniform();
        double acc = 0.0;
        for (std::int64_t i = 0; i < P.dim_full(); ++i) acc += P.eval(i, x);
        CHECK(acc == Catch::Approx(1.0).margin(1e-12));
    }
    // closed right endpoint: the last spline carries the value 1 at x = 1
    CHECK(P.eval(P.dim_full() - 1, 1.0) == 1.0);

    CHECK_THROWS_AS(S.eval(5, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(S.eval(1, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(glt::bspline_eval(S.knots, 1, 1, 0.5, 2), std::invalid_argument);
}

TEST_CASE("reference splines shape parameters") {
    const ReferenceSplines hat(1, 0);
    CHECK(hat.count() == 1);
    CHECK(hat.eta == 2);
    CHECK(hat.nu == 1);
    CHECK(hat.eval(1, 1.0) == 1.0);
    CHECK(hat.eval(1, -0.5) == 0.0);
    CHECK(hat.eval(1, 2.5) == 0.0);

    const ReferenceSplines cubic(3, 1);
    CHECK(cubic.count() == 2);
    CHECK(cubic.eta == 2);
    CHECK(cubic.nu == 1);

    const ReferenceSplines quad(2, 0);
    CHECK(quad.eta == 2);
    CHECK(quad.nu == 1);
}

TEST_CASE("interior splines are shifted-scaled reference functions") {
    const int p = 2, k = 0;
    const std::int64_t n = 8;
    const SplineSpace S(p, k, n);
    const ReferenceSplines ref(p, k);
    glt::SplitMix64 rng(6002);
    for (int trial = 0; trial < 20; ++trial) {
        const double x = rng.uniform();
        for (std::int64_t r = 1; r <= n - 1; ++r)
            for (std::int64_t t = 1; t <= p - k; ++t) {
                const std::int64_t b = k + 1 + (p - k) * (r - 1) + t; // 1-based
                const double lhs = S.eval(b - 1, x);
                const double rhs = ref.eval(t, (double)n * x - (double)r + 1.0);
                CHECK(std::abs(lhs - rhs) <= 1e-12);
            }
    }
}

TEST_CASE("reference blocks of the hat pair") {
    using glt::reference_blocks;
    const auto b0 = reference_blocks(1, 0, 1, 0, 0);
    CHECK(real_at(b0.K, 0, 0) == Catch::Approx(2.0).margin(1e-13));
    CHECK(real_at(b0.H, 0, 0) == Catch::Approx(0.0).margin(1e-13));
    CHECK(real_at(b0.M, 0, 0) == Catch::Approx(2.0 / 3.0).margin(1e-13));

    const auto b1 = reference_blocks(1, 0, 1, 0, 1);
    CHECK(real_at(b1.K, 0, 0) == Catch::Approx(-1.0).margin(1e-13));
    CHECK(real_at(b1.H, 0, 0) == Catch::Approx(-0.5).margin(1e-13));
    CHECK(real_at(b1.M, 0, 0) == Catch::Approx(1.0 / 6.0).margin(1e-13));

    const auto bm1 = reference_blocks(1, 0, 1, 0, -1);
    CHECK(real_at(bm1.K, 0, 0) == Catch::Approx(-1.0).margin(1e-13));
    CHECK(real_at(bm1.H, 0, 0) == Catch::Approx(0.5).margin(1e-13));
    CHECK(real_at(bm1.M, 0, 0) == Catch::Approx(1.0 / 6.0).margin(1e-13));

    const auto b2 = reference_blocks(1, 0, 1, 0, 2);
    CHECK(glt::max_abs(b2.K) <= 1e-14);
    CHECK(glt::max_abs(b2.H) <= 1e-14);
    CHECK(glt::max_abs(b2.M) <= 1e-14);
}

TEST_CASE("reference blocks: quadrature order and transpose symmetries") {
    for (std::int64_t s = -2; s <= 2; ++s) {
        const auto lo = glt::reference_blocks(3, 1, 2, 1, s, 4);
        const auto hi = glt::reference_blocks(3, 1, 2, 1, s, 7);
        CHECK(max_diff(lo.K, hi.K) <= 1e-13);
        CHECK(max_diff(lo.H, hi.H) <= 1e-13);
        CHECK(max_diff(lo.M, hi.M) <= 1e-13);
    }
    for (int pk : {0, 1}) {
        const int p = pk == 0 ? 2 : 3, k = pk == 0 ? 0 : 1;
        for (std::int64_t s = 0; s <= 2; ++s) {
            const auto fwd = glt::reference_blocks(p, k, p, k, s);
            const auto bwd = glt::reference_blocks(p, k, p, k, -s);
            CHECK(max_diff(bwd.K, glt::transpose(fwd.K)) <= 1e-13);
            CHECK(max_diff(bwd.M, glt::transpose(fwd.M)) <= 1e-13);
        }
    }
}

TEST_CASE("fem symbols of the hat pair match closed forms") {
    const auto sym = glt::fem_symbols(1, 0, 1, 0);
    for (double theta : {-2.5, -1.0, 0.0, 0.4, 3.0}) {
        const cplx kv = sym.kappa.eval1(theta)(0, 0);
        const cplx xv = sym.xi.eval1(theta)(0, 0);
        const cplx mv = sym.mu.eval1(theta)(0, 0);
        CHECK(std::abs(kv - cplx(2.0 - 2.0 * std::cos(theta))) < 1e-12);
        CHECK(std::abs(xv - cplx(0.0, -std::sin(theta))) < 1e-12);
        CHECK(std::abs(mv - cplx((2.0 + std::cos(theta)) / 3.0)) < 1e-12);
    }
}

TEST_CASE("A11 assembly") {
    const DenseMatrix A = glt::assemble_A11(hat_problem(4));
    REQUIRE(A.rows() == 3);
    for (std::int64_t i = 0; i < 3; ++i)
        for (std::int64_t j = 0; j < 3; ++j) {
            const double expect = i == j ? 8.0 : (std::abs(i - j) == 1 ? -4.0 : 0.0);
            CHECK(real_at(A, i, j) == Catch::Approx(expect).margin(1e-12));
        }

    const DenseMatrix Z =
        glt::assemble_A11(FEProblem(1, 0, 1, 0, CoeffExpr::number(0.0), 0.0, 4, 0));
    CHECK(glt::max_abs(Z) == 0.0);

    // identical quadrature on a symmetric integrand: exact symmetry
    const FEProblem vc(3, 1, 1, 0, glt::parse_coeff("1+x"), 0.0, 8, 1);
    const DenseMatrix V = glt::assemble_A11(vc);
    CHECK(max_diff(V, glt::transpose(V)) == 0.0);

    // SPD for positive a
    const auto eig = glt::eig_hermitian(V, false);
    CHECK(eig.eigenvalues.front() > 0.0);
    const DenseMatrix W = glt::assemble_A11(FEProblem(2, 0, 2, 0, CoeffExpr::number(1.0), 0.0, 6, 0));
    CHECK(glt::eig_hermitian(W, false).eigenvalues.front() > 0.0);
}

TEST_CASE("A12 assembly") {
    const DenseMatrix A = glt::assemble_A12(hat_problem(4));
    REQUIRE(A.rows() == 3);
    REQUIRE(A.cols() == 3);
    for (std::int64_t i = 0; i < 3; ++i)
        for (std::int64_t j = 0; j < 3; ++j) {
            const double expect = j == i + 1 ? 0.5 : (j == i - 1 ? -0.5 : 0.0);
            CHECK(real_at(A, i, j) == Catch::Approx(expect).margin(1e-13));
        }

    const DenseMatrix A2 = glt::assemble_A12(hat_problem(2));
    REQUIRE(A2.rows() == 1);
    CHECK(std::abs(A2(0, 0)) <= 1e-14);

    // interior row sums vanish (derivative of a partition of unity)
    const DenseMatrix A8 = glt::assemble_A12(hat_problem(8));
    for (std::int64_t i = 1; i <= 5; ++i) {
        cplx sum = 0.0;
        for (std::int64_t j = 0; j < A8.cols(); ++j) sum += A8(i, j);
        CHECK(std::abs(sum) <= 1e-12);
    }
}

TEST_CASE("A22 assembly") {
    CHECK(glt::max_abs(glt::assemble_A22(hat_problem(4, 0.0))) == 0.0);

    const DenseMatrix A = glt::assemble_A22(hat_problem(4, 1.0));
    REQUIRE(A.rows() == 3);
    for (std::int64_t i = 0; i < 3; ++i)
        for (std::int64_t j = 0; j < 3; ++j) {
            const double expect =
                -0.25 * (i == j ? 2.0 / 3.0 : (std::abs(i - j) == 1 ? 1.0 / 6.0 : 0.0));
            CHECK(real_at(A, i, j) == Catch::Approx(expect).margin(1e-14));
        }

    const DenseMatrix B =
        glt::assemble_A22(FEProblem(2, 0, 2, 0, CoeffExpr::number(1.0), 1.0, 6, 0));
    CHECK(glt::eig_hermitian(B, false).eigenvalues.back() <= 1e-12);
}

TEST_CASE("hat expansion layout") {
    const FEProblem prob = hat_problem(4);
    const DenseMatrix A11 = glt::assemble_A11(prob);
    const DenseMatrix A12 = glt::assemble_A12(prob);
    const DenseMatrix A22 = glt::assemble_A22(prob);
    const auto hat = glt::expand_hats(prob, A11, A12, A22);
    REQUIRE(hat.A11.rows() == 4);
    CHECK(max_diff(glt::principal_submatrix(hat.A11, {0, 1, 2}, {0, 1, 2}), A11) == 0.0);
    CHECK(hat.A11(3, 3) == cplx(1.0));
    CHECK(hat.A11(3, 0) == cplx(0.0));
    CHECK(hat.A12(3, 3) == cplx(0.0));
    CHECK(glt::numerical_rank(hat.A12, 1e-12) == glt::numerical_rank(A12, 1e-12));

    // m = 1: eigenvalues of the expanded block are those of A11 plus ones
    const FEProblem pm1(1, 0, 1, 0, CoeffExpr::number(1.0), 0.0, 4, 1);
    const auto hat1 = glt::expand_hats(pm1, A11, A12, A22);
    REQUIRE(hat1.A11.rows() == 5);
    auto inner = glt::eig_hermitian(A11, false).eigenvalues;
    inner.push_back(1.0);
    inner.push_back(1.0);
    std::sort(inner.begin(), inner.end());
    const auto outer = glt::eig_hermitian(hat1.A11, false).eigenvalues;
    REQUIRE(outer.size() == inner.size());
    for (std::size_t i = 0; i < outer.size(); ++i)
        CHECK(outer[i] == Catch::Approx(inner[i]).margin(1e-10));
}

TEST_CASE("schur complement") {
    const FEProblem prob = hat_problem(16);
    const DenseMatrix A11 = glt::assemble_A11(prob);
    const DenseMatrix A22 = glt::assemble_A22(prob);

    // zero coupling: the complement is A22 itself
    const DenseMatrix Z(A11.rows(), A22.rows());
    CHECK(max_diff(glt::schur_complement(A11, Z, A22), A22) == 0.0);

    // n = 2 single-interior-hat case collapses to the 1x1 zero matrix
    const FEProblem tiny = hat_problem(2);
    const DenseMatrix S2 = glt::schur_complement(glt::assemble_A11(tiny),
                                                 glt::assemble_A12(tiny),
                                                 glt::assemble_A22(tiny));
    REQUIRE(S2.rows() == 1);
    CHECK(std::abs(S2(0, 0)) <= 1e-14);

    // n S_n is negative semidefinite when rho = 0 and A11 is SPD
    const DenseMatrix S = glt::schur_complement(A11, glt::assemble_A12(prob), A22);
    DenseMatrix nS = cplx(16.0, 0.0) * S;
    CHECK(glt::eig_hermitian(nS, false).eigenvalues.back() <= 1e-10);

    // singular leading block
    DenseMatrix sing(2, 2);
    DenseMatrix c12(2, 1), c22(1, 1);
    c12(0, 0) = 1.0;
    CHECK_THROWS_AS(glt::schur_complement(sing, c12, c22), glt::NumericalError);
}

TEST_CASE("hat coupling block is Toeplitz away from the boundary") {
    for (const auto& params : std::vector<std::array<int, 5>>{
             {1, 0, 1, 0, 0}, {2, 0, 1, 0, 0}, {3, 1, 2, 1, 1}}) {
        const FEProblem prob(params[0], params[1], params[2], params[3],
                             CoeffExpr::number(1.0), 0.0, params[4] == 1 ? 12 : 8, params[4]);
        const auto rep = glt::toeplitz_equality_check(prob);
        CAPTURE(params[0], params[1], params[2], params[3]);
        CHECK(rep.max_interior_deviation <= 1e-12);
        CHECK(rep.residual_rank <= rep.rank_bound);
    }
    const auto hat_rep = glt::toeplitz_equality_check(hat_problem(8));
    CHECK(hat_rep.max_interior_deviation <= 1e-14);
    CHECK(hat_rep.rank_bound == 2);
    const FEProblem quad(2, 0, 1, 0, CoeffExpr::number(1.0), 0.0, 8, 0);
    CHECK(glt::toeplitz_equality_check(quad).rank_bound == 3);

    CHECK_THROWS_AS(glt::toeplitz_equality_check(hat_problem(2)), std::invalid_argument);
}

TEST_CASE("normalized stiffness interior matches the kappa Toeplitz matrix") {
    const FEProblem prob(2, 0, 1, 0, CoeffExpr::number(1.0), 0.0, 8, 0);
    const auto hat = glt::expand_hats(prob, glt::assemble_A11(prob), glt::assemble_A12(prob),
                                      glt::assemble_A22(prob));
    const auto sym = glt::fem_symbols(prob.p, prob.k, prob.q, prob.l);
    const DenseMatrix T = glt::toeplitz(MultiIndex{prob.n + prob.m}, sym.kappa);
    const ReferenceSplines ref(prob.p, prob.k);
    const std::int64_t pk = prob.p - prob.k;
    const std::int64_t lo = prob.m * pk, hi = (prob.n + prob.m - ref.nu) * pk;
    double worst = 0.0;
    for (std::int64_t i = lo; i < hi; ++i)
        for (std::int64_t j = lo; j < hi; ++j)
            worst = std::max(worst,
                             std::abs(hat.A11(i, j) / (double)prob.n - T(i, j)));
    CHECK(worst <= 1e-12);
}

TEST_CASE("normalized block matrix is exactly symmetric") {
    const FEProblem prob(2, 0, 1, 0, glt::parse_coeff("1+x"), 1.0, 6, 0);
    const DenseMatrix B = glt::normalized_block_matrix(prob, glt::assemble_A11(prob),
                                                       glt::assemble_A12(prob),
                                                       glt::assemble_A22(prob));
    CHECK(max_diff(B, glt::transpose(B)) == 0.0);
    REQUIRE(B.rows() == prob.N() + prob.M());
}

TEST_CASE("block and schur symbol grids") {
    // hat pair, a = 1, rho = 0: the schur symbol is -(1+cos theta)/2
    const auto g = glt::schur_symbol(1, 0, 1, 0, CoeffExpr::number(1.0), 0.0, 1, 64);
    for (std::int64_t it = 0; it < 64; ++it) {
        const double theta = glt::midpoint_theta_node(it, 64);
        CHECK(std::abs(g.samples[(std::size_t)it](0, 0) -
                       cplx(-(1.0 + std::cos(theta)) / 2.0)) < 1e-10);
    }

    // block symbol sample equals the independently assembled 2x2 matrix
    const auto bg = glt::block_symbol_grid(1, 0, 1, 0, glt::parse_coeff("1+x"), 1.0, 4, 8);
    const auto sym = glt::fem_symbols(1, 0, 1, 0);
    std::size_t node = 0;
    for (std::int64_t ix = 0; ix < 4; ++ix) {
        const double ax = 1.0 + glt::midpoint_x_node(ix, 4);
        for (std::int64_t it = 0; it < 8; ++it, ++node) {
            const double theta = glt::midpoint_theta_node(it, 8);
            const DenseMatrix& s = bg.samples[node];
            REQUIRE(s.rows() == 2);
            CHECK(std::abs(s(0, 0) - ax * sym.kappa.eval1(theta)(0, 0)) < 1e-12);
            CHECK(std::abs(s(0, 1) - sym.xi.eval1(theta)(0, 0)) < 1e-12);
            CHECK(std::abs(s(1, 0) - std::conj(sym.xi.eval1(theta)(0, 0))) < 1e-12);
            CHECK(std::abs(s(1, 1) - (-1.0) * sym.mu.eval1(theta)(0, 0)) < 1e-12);
        }
    }
}

TEST_CASE("FEProblem admissibility") {
    // default m is the smallest standard choice max(k, l)
    const FEProblem d(3, 1, 2, 1, CoeffExpr::number(1.0), 0.0, 8);
    CHECK(d.m == 1);
    CHECK(d.N() == 8 * 2 + 1 - 1);
    CHECK(d.M() == 8 * 1 + 1 - 1);
    CHECK_THROWS_AS(FEProblem(3, 1, 1, 0, CoeffExpr::number(1.0), 0.0, 8, 0),
                    std::invalid_argument);
}
