#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "glt/coeff_expr.hpp"
#include "glt/symbol.hpp"
#include "glt/symbol_json.hpp"

#include "test_util.hpp"

using glt::cplx;
using glt::CoeffExpr;
using glt::DenseMatrix;
using glt::SeparableSymbol;
using glt::TrigPolySymbol;
using testutil::max_diff;

namespace {

TrigPolySymbol laplacian_symbol() {
    // 2 - 2 cos(theta)
    TrigPolySymbol f(1, 1, 1);
    DenseMatrix c(1, 1);
    c(0, 0) = 2.0;
    f.set_coeff({0}, c);
    c(0, 0) = -1.0;
    f.set_coeff({1}, c);
    f.set_coeff({-1}, c);
    return f;
}

TrigPolySymbol scalar_exp(int j) {
    // e^{i j theta}
    TrigPolySymbol f(1, 1, 1);
    DenseMatrix c(1, 1);
    c(0, 0) = 1.0;
    f.set_coeff({j}, c);
    return f;
}

} // namespace

TEST_CASE("trig polynomial evaluation") {
    const TrigPolySymbol f = laplacian_symbol();
    CHECK(std::abs(f.eval1(0.0)(0, 0)) < 1e-15);
    CHECK(f.eval1(std::numbers::pi)(0, 0).real() == Catch::Approx(4.0));
    // direct-summation oracle at random angles
    glt::SplitMix64 rng(2001);
    for (int i = 0; i < 20; ++i) {
        const double th = std::numbers::pi * rng.symmetric();
        CHECK(f.eval1(th)(0, 0).real() == Catch::Approx(2.0 - 2.0 * std::cos(th)).margin(1e-13));
        CHECK(std::abs(f.eval1(th)(0, 0).imag()) < 1e-13);
    }
}

TEST_CASE("separable symbol evaluation x*(2-2cos theta)") {
    SeparableSymbol k(1, 1, 1);
    k.add_term(CoeffExpr::var(1), laplacian_symbol());
    CHECK(k.eval1(0.5, std::numbers::pi / 2.0)(0, 0).real() == Catch::Approx(1.0));
}

TEST_CASE("symbol algebra: add, scale, cancellation") {
    SeparableSymbol k = SeparableSymbol::from_trig(laplacian_symbol());
    SeparableSymbol zero(1, 1, 1);
    const SeparableSymbol sum = glt::sym_add(k, zero);
    glt::SplitMix64 rng(2002);
    for (int i = 0; i < 10; ++i) {
        const double x = rng.uniform(), th = std::numbers::pi * rng.symmetric();
        CHECK(max_diff(sum.eval1(x, th), k.eval1(x, th)) < 1e-15);
    }

    const SeparableSymbol twice = glt::sym_scale(2.0, k);
    CHECK(twice.eval1(0.3, std::numbers::pi)(0, 0).real() == Catch::Approx(8.0));

    // (2-2cos) + (2+2cos) = 4
    TrigPolySymbol g(1, 1, 1);
    DenseMatrix c(1, 1);
    c(0, 0) = 2.0;
    g.set_coeff({0}, c);
    c(0, 0) = 1.0;
    g.set_coeff({1}, c);
    g.set_coeff({-1}, c);
    const SeparableSymbol four = glt::sym_add(k, SeparableSymbol::from_trig(g));
    for (int i = 0; i < 100; ++i) {
        const double th = std::numbers::pi * rng.symmetric();
        CHECK(four.eval1(0.0, th)(0, 0).real() == Catch::Approx(4.0).margin(1e-13));
    }
}

TEST_CASE("symbol multiplication via Fourier convolution") {
    const SeparableSymbol e_plus = SeparableSymbol::from_trig(scalar_exp(1));
    const SeparableSymbol e_minus = SeparableSymbol::from_trig(scalar_exp(-1));
    const SeparableSymbol one = glt::sym_mul(e_plus, e_minus);
    glt::SplitMix64 rng(2003);
    for (int i = 0; i < 10; ++i)
        CHECK(one.eval1(0.0, std::numbers::pi * rng.symmetric())(0, 0).real() ==
              Catch::Approx(1.0).margin(1e-14));

    // [1, e^{-i theta}] * [1; e^{i theta}] = 2
    TrigPolySymbol row(1, 1, 2), col(1, 2, 1);
    DenseMatrix r0(1, 2), rm1(1, 2), c0(2, 1), cp1(2, 1);
    r0(0, 0) = 1.0;
    rm1(0, 1) = 1.0;
    c0(0, 0) = 1.0;
    cp1(1, 0) = 1.0;
    row.set_coeff({0}, r0);
    row.set_coeff({-1}, rm1);
    col.set_coeff({0}, c0);
    col.set_coeff({1}, cp1);
    const SeparableSymbol prod =
        glt::sym_mul(SeparableSymbol::from_trig(row), SeparableSymbol::from_trig(col));
    for (int i = 0; i < 10; ++i)
        CHECK(prod.eval1(0.0, std::numbers::pi * rng.symmetric())(0, 0).real() ==
              Catch::Approx(2.0).margin(1e-14));

    // identity factor
    const SeparableSymbol k = SeparableSymbol::from_trig(laplacian_symbol());
    const SeparableSymbol kid =
        glt::sym_mul(k, SeparableSymbol::from_trig(TrigPolySymbol::scalar_constant(1, 1.0)));
    for (int i = 0; i < 10; ++i) {
        const double th = std::numbers::pi * rng.symmetric();
        CHECK(max_diff(kid.eval1(0.2, th), k.eval1(0.2, th)) < 1e-14);
    }
}

TEST_CASE("convolution product matches pointwise product at random points") {
    glt::SplitMix64 rng(2004);
    TrigPolySymbol f(1, 2, 3), g(1, 3, 2);
    for (int j = -2; j <= 2; ++j) {
        f.set_coeff({j}, testutil::random_matrix(rng, 2, 3));
        g.set_coeff({j}, testutil::random_matrix(rng, 3, 2));
    }
    const TrigPolySymbol fg = glt::trig_mul(f, g);
    for (int i = 0; i < 100; ++i) {
        const double th = std::numbers::pi * rng.symmetric();
        CHECK(max_diff(fg.eval1(th), f.eval1(th) * g.eval1(th)) < 1e-12);
    }
}

TEST_CASE("symbol adjoint") {
    const TrigPolySymbol ep = scalar_exp(1);
    const TrigPolySymbol em = glt::trig_adjoint(ep);
    CHECK(em.coeff({-1})(0, 0) == cplx(1.0));
    CHECK(em.coeff({1})(0, 0) == cplx(0.0));

    // xi(theta) = -i sin(theta) has coefficients -1/2 at +1 and +1/2 at -1;
    // its adjoint is +i sin(theta)
    TrigPolySymbol xi(1, 1, 1);
    DenseMatrix c(1, 1);
    c(0, 0) = -0.5;
    xi.set_coeff({1}, c);
    c(0, 0) = 0.5;
    xi.set_coeff({-1}, c);
    const TrigPolySymbol xis = glt::trig_adjoint(xi);
    glt::SplitMix64 rng(2005);
    for (int i = 0; i < 20; ++i) {
        const double th = std::numbers::pi * rng.symmetric();
        const cplx v = xi.eval1(th)(0, 0);
        CHECK(v.real() == Catch::Approx(0.0).margin(1e-14));
        CHECK(v.imag() == Catch::Approx(-std::sin(th)).margin(1e-13));
        CHECK(std::abs(xis.eval1(th)(0, 0) - std::conj(v)) < 1e-14);
    }

    // involution on a random matrix symbol
    TrigPolySymbol f(1, 2, 3);
    for (int j = -1; j <= 1; ++j) f.set_coeff({j}, testutil::random_matrix(rng, 2, 3));
    const TrigPolySymbol ff = glt::trig_adjoint(glt::trig_adjoint(f));
    for (int i = 0; i < 10; ++i) {
        const double th = std::numbers::pi * rng.symmetric();
        CHECK(max_diff(ff.eval1(th), f.eval1(th)) < 1e-14);
        CHECK(max_diff(glt::trig_adjoint(f).eval1(th), glt::adjoint(f.eval1(th))) < 1e-13);
    }
}

TEST_CASE("symbol extension: padding, singular values, chain, product") {
    const SeparableSymbol k = SeparableSymbol::from_trig(laplacian_symbol());
    const SeparableSymbol k2 = glt::sym_extend(k, 2);
    glt::SplitMix64 rng(2006);
    for (int i = 0; i < 10; ++i) {
        const double th = std::numbers::pi * rng.symmetric();
        const DenseMatrix v = k2.eval1(0.0, th);
        CHECK(v(0, 0) == k.eval1(0.0, th)(0, 0));
        CHECK(v(0, 1) == cplx(0.0));
        CHECK(v(1, 0) == cplx(0.0));
        CHECK(v(1, 1) == cplx(0.0));
    }

    // singular values of the extension = originals plus zeros
    TrigPolySymbol f(1, 2, 3);
    for (int j = -1; j <= 1; ++j) f.set_coeff({j}, testutil::random_matrix(rng, 2, 3));
    const SeparableSymbol kf = SeparableSymbol::from_trig(f);
    const SeparableSymbol kf4 = glt::sym_extend(kf, 4);
    for (int i = 0; i < 5; ++i) {
        const double th = std::numbers::pi * rng.symmetric();
        const auto s0 = glt::svd(kf.eval1(0.0, th)).singular_values;
        const auto s1 = glt::svd(kf4.eval1(0.0, th)).singular_values;
        for (std::size_t t = 0; t < s0.size(); ++t)
            CHECK(s1[t] == Catch::Approx(s0[t]).margin(1e-10));
        for (std::size_t t = s0.size(); t < s1.size(); ++t)
            CHECK(s1[t] == Catch::Approx(0.0).margin(1e-10));
    }

    // chain: extend to 4 then 5 equals extend to 5
    const SeparableSymbol a = glt::sym_extend(kf4, 5);
    const SeparableSymbol b = glt::sym_extend(kf, 5);
    for (int i = 0; i < 10; ++i) {
        const double th = std::numbers::pi * rng.symmetric();
        CHECK(max_diff(a.eval1(0.0, th), b.eval1(0.0, th)) < 1e-15);
    }

    // product compatibility: extend(fg) = extend(f) extend(g)
    TrigPolySymbol g(1, 3, 2);
    for (int j = -1; j <= 1; ++j) g.set_coeff({j}, testutil::random_matrix(rng, 3, 2));
    const SeparableSymbol kg = SeparableSymbol::from_trig(g);
    const SeparableSymbol lhs = glt::sym_extend(glt::sym_mul(kf, kg), 4);
    const SeparableSymbol rhs = glt::sym_mul(glt::sym_extend(kf, 4), glt::sym_extend(kg, 4));
    for (int i = 0; i < 10; ++i) {
        const double th = std::numbers::pi * rng.symmetric();
        CHECK(max_diff(lhs.eval1(0.0, th), rhs.eval1(0.0, th)) < 1e-12);
    }

    CHECK_THROWS_AS(glt::sym_extend(kf, 2), std::invalid_argument);
}

TEST_CASE("midpoint grid sampling") {
    const SeparableSymbol c3 =
        SeparableSymbol::from_trig(TrigPolySymbol::scalar_constant(1, 3.0));
    auto g = glt::sample_symbol(c3, {2}, {3});
    REQUIRE(g.samples.size() == 6);
    for (const auto& s : g.samples) CHECK(s(0, 0) == cplx(3.0));

    const SeparableSymbol lap = SeparableSymbol::from_trig(laplacian_symbol());
    g = glt::sample_symbol(lap, {1}, {4});
    const double pi = std::numbers::pi;
    const double expect_theta[4] = {-3 * pi / 4, -pi / 4, pi / 4, 3 * pi / 4};
    for (int i = 0; i < 4; ++i) {
        CHECK(glt::midpoint_theta_node(i, 4) == Catch::Approx(expect_theta[i]));
        CHECK(g.samples[(std::size_t)i](0, 0).real() ==
              Catch::Approx(2.0 - 2.0 * std::cos(expect_theta[i])));
    }

    SeparableSymbol xsym(1, 1, 1);
    xsym.add_term(CoeffExpr::var(1), TrigPolySymbol::scalar_constant(1, 1.0));
    g = glt::sample_symbol(xsym, {4}, {1});
    const double expect_x[4] = {0.125, 0.375, 0.625, 0.875};
    for (int i = 0; i < 4; ++i)
        CHECK(g.samples[(std::size_t)i](0, 0).real() == Catch::Approx(expect_x[i]));
}

TEST_CASE("pointwise pseudoinverse on grids") {
    TrigPolySymbol row(1, 1, 2);
    DenseMatrix r(1, 2);
    r(0, 0) = 1.0;
    r(0, 1) = 1.0;
    row.set_coeff({0}, r);
    auto g = glt::sample_symbol(SeparableSymbol::from_trig(row), {1}, {8});
    auto gp = glt::sym_pinv_grid(g);
    for (const auto& s : gp.samples) {
        CHECK(s(0, 0).real() == Catch::Approx(0.5));
        CHECK(s(1, 0).real() == Catch::Approx(0.5));
    }

    // reciprocal of 2-2cos(theta) on the midpoint grid (never hits theta=0)
    const SeparableSymbol lap = SeparableSymbol::from_trig(laplacian_symbol());
    g = glt::sample_symbol(lap, {1}, {16});
    gp = glt::sym_pinv_grid(g);
    for (std::size_t i = 0; i < g.samples.size(); ++i)
        CHECK(gp.samples[i](0, 0).real() ==
              Catch::Approx(1.0 / g.samples[i](0, 0).real()).margin(1e-12));

    // pinv is an involution on full-rank samples
    auto gpp = glt::sym_pinv_grid(gp);
    for (std::size_t i = 0; i < g.samples.size(); ++i)
        CHECK(max_diff(gpp.samples[i], g.samples[i]) < 1e-9);
}

TEST_CASE("fourier_coeffs_from_samples recovers trig polynomials exactly") {
    auto f = glt::fourier_coeffs_from_samples(
        [](std::span<const double> th) {
            DenseMatrix v(1, 1);
            v(0, 0) = 2.0 - 2.0 * std::cos(th[0]);
            return v;
        },
        1, {2}, {16});
    CHECK(f.coeff({0})(0, 0).real() == Catch::Approx(2.0).margin(1e-12));
    CHECK(f.coeff({1})(0, 0).real() == Catch::Approx(-1.0).margin(1e-12));
    CHECK(f.coeff({-1})(0, 0).real() == Catch::Approx(-1.0).margin(1e-12));
    CHECK(std::abs(f.coeff({2})(0, 0)) < 1e-12);
    CHECK(std::abs(f.coeff({-2})(0, 0)) < 1e-12);

    // matrix-valued monomial e^{i theta} E_{12}
    auto g = glt::fourier_coeffs_from_samples(
        [](std::span<const double> th) {
            DenseMatrix v(1, 2);
            v(0, 1) = std::polar(1.0, th[0]);
            return v;
        },
        1, {1}, {8});
    CHECK(std::abs(g.coeff({1})(0, 1) - cplx(1.0)) < 1e-12);
    CHECK(std::abs(g.coeff({0})(0, 1)) < 1e-12);
    CHECK(std::abs(g.coeff({-1})(0, 1)) < 1e-12);

    // |theta|: f_0 = pi/2, f_{+-1} = -2/pi (analytic Fourier integral)
    auto h = glt::fourier_coeffs_from_samples(
        [](std::span<const double> th) {
            DenseMatrix v(1, 1);
            v(0, 0) = std::abs(th[0]);
            return v;
        },
        1, {1}, {4096});
    CHECK(h.coeff({0})(0, 0).real() == Catch::Approx(std::numbers::pi / 2.0).margin(1e-3));
    CHECK(h.coeff({1})(0, 0).real() == Catch::Approx(-2.0 / std::numbers::pi).margin(1e-3));
    CHECK(h.coeff({-1})(0, 0).real() == Catch::Approx(-2.0 / std::numbers::pi).margin(1e-3));

    CHECK_THROWS_AS(glt::fourier_coeffs_from_samples(
                        [](std::span<const double>) { return DenseMatrix(1, 1); }, 1, {2}, {4}),
                    std::invalid_argument);
}

TEST_CASE("coefficient expression parsing and evaluation") {
    const CoeffExpr e1 = glt::parse_coeff("1+x1");
    CHECK(e1.eval1(0.25) == Catch::Approx(1.25));

    const CoeffExpr e2 = glt::parse_coeff("sin(3.14*x1)^2");
    CHECK(e2.eval1(0.5) == Catch::Approx(std::pow(std::sin(3.14 * 0.5), 2)));

    CHECK_THROWS_MATCHES(glt::parse_coeff("1+*2"), glt::SyntaxError,
                         Catch::Matchers::Predicate<glt::SyntaxError>(
                             [](const glt::SyntaxError& err) { return err.offset == 2; }));

    // "x" is an alias for "x1" at d=1
    CHECK(glt::parse_coeff("2*x").eval1(0.5) == Catch::Approx(1.0));

    // division by zero surfaces as a domain error
    CHECK_THROWS_AS(glt::parse_coeff("1/(x-x)").eval1(0.3), glt::DomainError);
}

TEST_CASE("coefficient expression serialize round-trip") {
    glt::SplitMix64 rng(2007);
    for (const char* text : {"1+x1", "sin(3.14*x1)^2", "(1+x1)*(2-x1)/3", "exp(x1)-cos(x1^3)",
                             "1e-3+2.5*x1"}) {
        const CoeffExpr e = glt::parse_coeff(text);
        const CoeffExpr r = glt::parse_coeff(e.serialize());
        for (int i = 0; i < 100; ++i) {
            const double x = rng.uniform();
            CHECK(r.eval1(x) == Catch::Approx(e.eval1(x)).margin(1e-15));
        }
    }
}

TEST_CASE("symbol JSON round-trips") {
    glt::SplitMix64 rng(2008);
    TrigPolySymbol f(1, 2, 2);
    for (int j = -2; j <= 2; ++j) f.set_coeff({j}, testutil::random_matrix(rng, 2, 2));
    const TrigPolySymbol f2 = glt::trig_from_json(glt::trig_to_json(f));
    for (int i = 0; i < 10; ++i) {
        const double th = std::numbers::pi * rng.symmetric();
        CHECK(max_diff(f2.eval1(th), f.eval1(th)) == 0.0);
    }

    SeparableSymbol k(1, 2, 2);
    k.add_term(glt::parse_coeff("1+x1"), f);
    k.add_term(glt::parse_coeff("sin(x1)"), f);
    const SeparableSymbol k2 = glt::separable_from_json(glt::separable_to_json(k));
    for (int i = 0; i < 10; ++i) {
        const double x = rng.uniform(), th = std::numbers::pi * rng.symmetric();
        CHECK(max_diff(k2.eval1(x, th), k.eval1(x, th)) < 1e-15);
    }

    // documented example shape
    const auto j = nlohmann::json::parse(
        R"({"d":1,"r":1,"s":1,"coeffs":[{"j":[0],"re":[[2.0]],"im":[[0.0]]},)"
        R"({"j":[1],"re":[[-1.0]],"im":[[0.0]]},{"j":[-1],"re":[[-1.0]],"im":[[0.0]]}]})");
    const TrigPolySymbol lap = glt::trig_from_json(j);
    CHECK(lap.eval1(std::numbers::pi)(0, 0).real() == Catch::Approx(4.0));
}
