#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "glt/decomp.hpp"
#include "glt/matrix.hpp"
#include "glt/symbol.hpp"

namespace glt {

/// Triangular bump max(0, 1 - |y - c|/h): continuous, compactly supported on
/// [c-h, c+h], peak value 1.
struct TestFunction {
    double center = 0.0;
    double half_width = 1.0;
    std::string label;

    double operator()(double y) const {
        return std::max(0.0, 1.0 - std::abs(y - center) / half_width);
    }
};

/// Triangular bumps at equispaced centers spanning [lo, hi], half-width equal
/// to the spacing (a single bump sits at the midpoint).
inline std::vector<TestFunction> make_test_family(double lo, double hi, std::int64_t count) {
    if (!(lo < hi)) throw std::invalid_argument("make_test_family: need lo < hi");
    if (count < 1) throw std::invalid_argument("make_test_family: need count >= 1");
    std::vector<TestFunction> fam;
    if (count == 1) {
        fam.push_back(TestFunction{0.5 * (lo + hi), hi - lo, "F0"});
        return fam;
    }
    const double spacing = (hi - lo) / static_cast<double>(count - 1);
    for (std::int64_t k = 0; k < count; ++k) {
        char label[32];
        std::snprintf(label, sizeof label, "F%lld", static_cast<long long>(k));
        fam.push_back(TestFunction{lo + spacing * static_cast<double>(k), spacing, label});
    }
    return fam;
}

enum class SpectrumMode { Singular, Eigen };

/// Sorted singular values or eigenvalues with the normalization count
/// d_n ^ e_n (singular) or d_n (eigen).
struct EmpiricalSpectrum {
    std::vector<double> values;
    std::int64_t count_basis = 0;
};

inline EmpiricalSpectrum singular_spectrum(const DenseMatrix& A) {
    SVDResult s = svd(A);
    EmpiricalSpectrum spec;
    spec.values = s.singular_values;
    std::sort(spec.values.begin(), spec.values.end());
    spec.count_basis = std::min(A.rows(), A.cols());
    return spec;
}

inline EmpiricalSpectrum eigen_spectrum(const DenseMatrix& A) {
    EigResult e = eig_hermitian(A, /*want_vectors=*/false);
    return EmpiricalSpectrum{std::move(e.eigenvalues), A.rows()};
}

/// (1/count_basis) sum_i F(value_i).
inline double empirical_functional(const EmpiricalSpectrum& spec, const TestFunction& F) {
    double acc = 0.0;
    for (double v : spec.values) acc += F(v);
    return acc / static_cast<double>(spec.count_basis);
}

/// Midpoint quadrature of the normalized symbol-side functional of
/// Def.-2.6 type: average over grid nodes of (1/(r^s)) sum_i F(sigma_i) (or
/// eigenvalues in eigen mode, which requires Hermitian samples).
inline double symbol_functional(const GridSampledSymbol& g, const TestFunction& F,
                                SpectrumMode mode) {
    double acc = 0.0;
    for (const auto& m : g.samples) {
        double node = 0.0;
        const std::int64_t rs = std::min(m.rows(), m.cols());
        if (m.rows() == 1 && m.cols() == 1) {
            if (mode == SpectrumMode::Eigen) {
                if (std::abs(m(0, 0).imag()) > 1e-10 * (1.0 + std::abs(m(0, 0))))
                    throw std::invalid_argument("symbol_functional: non-Hermitian sample");
                node = F(m(0, 0).real());
            } else {
                node = F(std::abs(m(0, 0)));
            }
        } else if (mode == SpectrumMode::Eigen) {
            if (hermitian_deviation(m) > 1e-10 * (1.0 + max_abs(m)))
                throw std::invalid_argument("symbol_functional: non-Hermitian sample");
            EigResult e = eig_hermitian(m, /*want_vectors=*/false);
            for (double lam : e.eigenvalues) node += F(lam);
            node /= static_cast<double>(m.rows());
        } else {
            SVDResult s = svd(m);
            for (std::int64_t i = 0; i < rs; ++i) node += F(s.singular_values[(std::size_t)i]);
            node /= static_cast<double>(rs);
        }
        acc += node;
    }
    return acc / static_cast<double>(g.samples.size());
}

struct SweepRow {
    std::int64_t n = 0;
    std::string test_fn;
    double empirical = 0.0;
    double symbol = 0.0;
    double abs_err = 0.0;
};

/// Per n and per test function: empirical vs symbol functional and the
/// absolute discrepancy. delta(n) = max over the family of abs_err.
inline std::vector<SweepRow> discrepancy_sweep(
    const std::vector<std::pair<std::int64_t, EmpiricalSpectrum>>& spectra,
    const GridSampledSymbol& g, const std::vector<TestFunction>& family, SpectrumMode mode) {
    std::vector<SweepRow> rows;
    std::vector<double> symbol_side;
    symbol_side.reserve(family.size());
    for (const auto& F : family) symbol_side.push_back(symbol_functional(g, F, mode));
    for (const auto& [n, spec] : spectra)
        for (std::size_t k = 0; k < family.size(); ++k) {
            const double emp = empirical_functional(spec, family[k]);
            rows.push_back(SweepRow{n, family[k].label, emp, symbol_side[k],
                                    std::abs(emp - symbol_side[k])});
        }
    return rows;
}

inline double sweep_delta(const std::vector<SweepRow>& rows, std::int64_t n) {
    double d = 0.0;
    for (const auto& r : rows)
        if (r.n == n) d = std::max(d, r.abs_err);
    return d;
}

/// CSV emission, header `n,test_fn,empirical,symbol,abs_err`, %.12g, LF.
inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "n,test_fn,empirical,symbol,abs_err\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%lld,%s,%.12g,%.12g,%.12g\n",
                      static_cast<long long>(r.n), r.test_fn.c_str(), r.empirical, r.symbol,
                      r.abs_err);
        os << buf;
    }
}

/// Fraction of spectrum values <= eps.
inline double zero_fraction(const EmpiricalSpectrum& spec, double eps) {
    if (eps < 0.0) throw std::invalid_argument("zero_fraction: eps >= 0");
    std::int64_t cnt = 0;
    for (double v : spec.values)
        if (v <= eps) ++cnt;
    return static_cast<double>(cnt) / static_cast<double>(spec.count_basis);
}

/// One a.c.s. splitting report: A - B = R + N with R the SVD truncation to
/// singular values above the threshold (the rank-vs-norm optimal splitting)
/// and N the remainder.
struct ACSEntry {
    double rank_fraction = 0.0; // c = rank(R) / (d_n ^ e_n)
    double achieved_norm = 0.0; // ||N||, <= threshold by construction
    double threshold = 0.0;
};

inline ACSEntry acs_split(const DenseMatrix& A, const DenseMatrix& B, double norm_threshold) {
    check_same_shape(A, B, "acs_split");
    const DenseMatrix D = A - B;
    SVDResult s = svd(D);
    std::int64_t rank_R = 0;
    double norm_N = 0.0;
    for (double v : s.singular_values) {
        if (v > norm_threshold) ++rank_R;
        else { norm_N = v; break; } // singular values are nonincreasing
    }
    const double basis = static_cast<double>(std::min(A.rows(), A.cols()));
    return ACSEntry{static_cast<double>(rank_R) / basis, norm_N, norm_threshold};
}

} // namespace glt
