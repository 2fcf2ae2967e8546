#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "glt/coeff_expr.hpp"
#include "glt/decomp.hpp"
#include "glt/matrix.hpp"

namespace glt {

/// Finite trigonometric polynomial theta -> C^{r x s}:
/// f(theta) = sum_j f_j e^{i j.theta}, finitely many nonzero f_j.
class TrigPolySymbol {
public:
    using Key = std::vector<std::int64_t>;

    TrigPolySymbol(std::size_t d, std::int64_t r, std::int64_t s) : d_(d), r_(r), s_(s) {
        if (d < 1 || r < 1 || s < 1)
            throw std::invalid_argument("TrigPolySymbol: bad dimensions");
    }

    static TrigPolySymbol constant(std::size_t d, DenseMatrix value) {
        TrigPolySymbol f(d, value.rows(), value.cols());
        f.set_coeff(Key(d, 0), std::move(value));
        return f;
    }

    static TrigPolySymbol scalar_constant(std::size_t d, cplx value) {
        DenseMatrix m(1, 1);
        m(0, 0) = value;
        return constant(d, std::move(m));
    }

    std::size_t d() const { return d_; }
    std::int64_t r() const { return r_; }
    std::int64_t s() const { return s_; }
    const std::map<Key, DenseMatrix>& coeffs() const { return coeffs_; }

    void set_coeff(Key j, DenseMatrix value) {
        if (j.size() != d_)
            throw std::invalid_argument("TrigPolySymbol: coefficient index dimension mismatch");
        if (value.rows() != r_ || value.cols() != s_)
            throw std::invalid_argument("TrigPolySymbol: coefficient matrix size mismatch");
        bool nonzero = false;
        for (const auto& v : value.data())
            if (v != cplx{}) { nonzero = true; break; }
        if (nonzero)
            coeffs_[std::move(j)] = std::move(value);
        else
            coeffs_.erase(j);
    }

    /// f_j, the zero matrix for absent j.
    DenseMatrix coeff(const Key& j) const {
        auto it = coeffs_.find(j);
        return it != coeffs_.end() ? it->second : DenseMatrix(r_, s_);
    }

    DenseMatrix eval(std::span<const double> theta) const {
        if (theta.size() != d_)
            throw std::invalid_argument("TrigPolySymbol::eval: dimension mismatch");
        DenseMatrix out(r_, s_);
        for (const auto& [j, fj] : coeffs_) {
            double phase = 0.0;
            for (std::size_t k = 0; k < d_; ++k) phase += static_cast<double>(j[k]) * theta[k];
            const cplx w = std::polar(1.0, phase);
            for (std::int64_t a = 0; a < r_; ++a)
                for (std::int64_t b = 0; b < s_; ++b) out(a, b) += w * fj(a, b);
        }
        return out;
    }

    DenseMatrix eval1(double theta) const {
        const double t[1] = {theta};
        return eval(t);
    }

private:
    std::size_t d_;
    std::int64_t r_, s_;
    std::map<Key, DenseMatrix> coeffs_;
};

inline TrigPolySymbol trig_add(const TrigPolySymbol& f, const TrigPolySymbol& g) {
    if (f.d() != g.d() || f.r() != g.r() || f.s() != g.s())
        throw std::invalid_argument("trig_add: size mismatch");
    TrigPolySymbol h = f;
    for (const auto& [j, gj] : g.coeffs()) h.set_coeff(j, h.coeff(j) + gj);
    return h;
}

inline TrigPolySymbol trig_scale(cplx alpha, const TrigPolySymbol& f) {
    TrigPolySymbol h(f.d(), f.r(), f.s());
    for (const auto& [j, fj] : f.coeffs()) h.set_coeff(j, alpha * fj);
    return h;
}

/// Fourier-coefficient convolution: (fg)_j = sum_k f_k g_{j-k}.
inline TrigPolySymbol trig_mul(const TrigPolySymbol& f, const TrigPolySymbol& g) {
    if (f.d() != g.d())
        throw std::invalid_argument("trig_mul: dimension mismatch");
    if (f.s() != g.r())
        throw std::invalid_argument("trig_mul: inner block size mismatch");
    TrigPolySymbol h(f.d(), f.r(), g.s());
    for (const auto& [jf, fj] : f.coeffs())
        for (const auto& [jg, gj] : g.coeffs()) {
            TrigPolySymbol::Key j(f.d());
            for (std::size_t k = 0; k < f.d(); ++k) j[k] = jf[k] + jg[k];
            h.set_coeff(j, h.coeff(j) + fj * gj);
        }
    return h;
}

/// (f*)_j = (f_{-j})^*.
inline TrigPolySymbol trig_adjoint(const TrigPolySymbol& f) {
    TrigPolySymbol h(f.d(), f.s(), f.r());
    for (const auto& [j, fj] : f.coeffs()) {
        TrigPolySymbol::Key mj(j.size());
        for (std::size_t k = 0; k < j.size(); ++k) mj[k] = -j[k];
        h.set_coeff(mj, adjoint(fj));
    }
    return h;
}

/// Zero-pad every coefficient matrix to t x t.
inline TrigPolySymbol trig_extend(const TrigPolySymbol& f, std::int64_t t) {
    if (t < std::max(f.r(), f.s()))
        throw std::invalid_argument("trig_extend: t < max(r,s)");
    TrigPolySymbol h(f.d(), t, t);
    for (const auto& [j, fj] : f.coeffs()) {
        DenseMatrix pad(t, t);
        for (std::int64_t a = 0; a < f.r(); ++a)
            for (std::int64_t b = 0; b < f.s(); ++b) pad(a, b) = fj(a, b);
        h.set_coeff(j, std::move(pad));
    }
    return h;
}

/// Matrix of real-valued coefficient expressions over x in [0,1]^d.
class CoefficientFunction {
public:
    CoefficientFunction(std::size_t d, std::vector<std::vector<CoeffExpr>> entries)
        : d_(d), entries_(std::move(entries)) {
        if (entries_.empty() || entries_[0].empty())
            throw std::invalid_argument("CoefficientFunction: empty entries");
        for (const auto& row : entries_)
            if (row.size() != entries_[0].size())
                throw std::invalid_argument("CoefficientFunction: ragged entries");
    }

    static CoefficientFunction scalar(std::size_t d, CoeffExpr e) {
        return CoefficientFunction(d, {{std::move(e)}});
    }

    static CoefficientFunction scalar_text(std::size_t d, std::string_view text) {
        return scalar(d, parse_coeff(text));
    }

    std::size_t d() const { return d_; }
    std::int64_t rows() const { return static_cast<std::int64_t>(entries_.size()); }
    std::int64_t cols() const { return static_cast<std::int64_t>(entries_[0].size()); }
    const CoeffExpr& entry(std::int64_t i, std::int64_t j) const {
        return entries_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }

    DenseMatrix eval(std::span<const double> x) const {
        DenseMatrix out(rows(), cols());
        for (std::int64_t i = 0; i < rows(); ++i)
            for (std::int64_t j = 0; j < cols(); ++j) out(i, j) = entry(i, j).eval(x);
        return out;
    }

    double eval_scalar(std::span<const double> x) const {
        if (rows() != 1 || cols() != 1)
            throw std::invalid_argument("CoefficientFunction: not scalar");
        return entry(0, 0).eval(x);
    }

private:
    std::size_t d_;
    std::vector<std::vector<CoeffExpr>> entries_;
};

/// Finite sum sum_i a_i(x) f_i(theta) with scalar a_i and common-size f_i.
class SeparableSymbol {
public:
    struct Term {
        CoeffExpr a;
        TrigPolySymbol f;
    };

    SeparableSymbol(std::size_t d, std::int64_t r, std::int64_t s) : d_(d), r_(r), s_(s) {}

    static SeparableSymbol from_trig(TrigPolySymbol f) {
        SeparableSymbol k(f.d(), f.r(), f.s());
        k.add_term(CoeffExpr::number(1.0), std::move(f));
        return k;
    }

    void add_term(CoeffExpr a, TrigPolySymbol f) {
        if (f.d() != d_ || f.r() != r_ || f.s() != s_)
            throw std::invalid_argument("SeparableSymbol: term size mismatch");
        terms_.push_back(Term{std::move(a), std::move(f)});
    }

    std::size_t d() const { return d_; }
    std::int64_t r() const { return r_; }
    std::int64_t s() const { return s_; }
    const std::vector<Term>& terms() const { return terms_; }

    DenseMatrix eval(std::span<const double> x, std::span<const double> theta) const {
        DenseMatrix out(r_, s_);
        for (const auto& t : terms_) {
            const double a = t.a.eval(x);
            if (a == 0.0) continue;
            DenseMatrix fv = t.f.eval(theta);
            for (std::size_t k = 0; k < fv.data().size(); ++k) out.data()[k] += a * fv.data()[k];
        }
        return out;
    }

    DenseMatrix eval1(double x, double theta) const {
        const double xs[1] = {x}, ts[1] = {theta};
        return eval(xs, ts);
    }

private:
    std::size_t d_;
    std::int64_t r_, s_;
    std::vector<Term> terms_;
};

inline SeparableSymbol sym_add(const SeparableSymbol& k, const SeparableSymbol& x) {
    if (k.d() != x.d() || k.r() != x.r() || k.s() != x.s())
        throw std::invalid_argument("sym_add: size mismatch");
    SeparableSymbol out = k;
    for (const auto& t : x.terms()) out.add_term(t.a, t.f);
    return out;
}

inline SeparableSymbol sym_scale(cplx alpha, const SeparableSymbol& k) {
    SeparableSymbol out(k.d(), k.r(), k.s());
    for (const auto& t : k.terms()) out.add_term(t.a, trig_scale(alpha, t.f));
    return out;
}

inline SeparableSymbol sym_mul(const SeparableSymbol& k, const SeparableSymbol& x) {
    if (k.d() != x.d())
        throw std::invalid_argument("sym_mul: dimension mismatch");
    if (k.s() != x.r())
        throw std::invalid_argument("sym_mul: inner block size mismatch");
    SeparableSymbol out(k.d(), k.r(), x.s());
    for (const auto& t1 : k.terms())
        for (const auto& t2 : x.terms())
            out.add_term(CoeffExpr::binary(CoeffExpr::Kind::Mul, t1.a, t2.a),
                         trig_mul(t1.f, t2.f));
    return out;
}

inline SeparableSymbol sym_adjoint(const SeparableSymbol& k) {
    // coefficient functions are real-valued expressions, so only the trig
    // factors conjugate
    SeparableSymbol out(k.d(), k.s(), k.r());
    for (const auto& t : k.terms()) out.add_term(t.a, trig_adjoint(t.f));
    return out;
}

inline SeparableSymbol sym_extend(const SeparableSymbol& k, std::int64_t t) {
    if (t < std::max(k.r(), k.s()))
        throw std::invalid_argument("sym_extend: t < max(r,s)");
    SeparableSymbol out(k.d(), t, t);
    for (const auto& term : k.terms()) out.add_term(term.a, trig_extend(term.f, t));
    return out;
}

/// Samples of a symbol on the uniform midpoint grid of [0,1]^d x [-pi,pi]^d.
struct GridSampledSymbol {
    std::vector<std::int64_t> x_counts;     // per x-axis
    std::vector<std::int64_t> theta_counts; // per theta-axis
    std::int64_t r = 1, s = 1;
    std::vector<DenseMatrix> samples;       // lexicographic, x outer then theta

    std::int64_t node_count() const {
        std::int64_t c = 1;
        for (auto v : x_counts) c *= v;
        for (auto v : theta_counts) c *= v;
        return c;
    }
};

inline double midpoint_x_node(std::int64_t i, std::int64_t count) {
    return (static_cast<double>(i) + 0.5) / static_cast<double>(count);
}

inline double midpoint_theta_node(std::int64_t i, std::int64_t count) {
    return -std::numbers::pi +
           (static_cast<double>(i) + 0.5) * 2.0 * std::numbers::pi / static_cast<double>(count);
}

/// kappa evaluated at every midpoint node; a coefficient singularity is
/// reported with the offending node.
inline GridSampledSymbol sample_symbol(const SeparableSymbol& kappa,
                                       std::vector<std::int64_t> x_counts,
                                       std::vector<std::int64_t> theta_counts) {
    if (x_counts.size() != kappa.d() || theta_counts.size() != kappa.d())
        throw std::invalid_argument("sample_symbol: axis count dimension mismatch");
    for (auto c : x_counts)
        if (c < 1) throw std::invalid_argument("sample_symbol: axis counts must be >= 1");
    for (auto c : theta_counts)
        if (c < 1) throw std::invalid_argument("sample_symbol: axis counts must be >= 1");

    GridSampledSymbol g;
    g.x_counts = std::move(x_counts);
    g.theta_counts = std::move(theta_counts);
    g.r = kappa.r();
    g.s = kappa.s();
    const std::size_t d = kappa.d();

    std::vector<std::int64_t> xi(d, 0), ti(d, 0);
    std::vector<double> x(d), theta(d);
    const std::int64_t total = g.node_count();
    g.samples.reserve(static_cast<std::size_t>(total));
    for (std::int64_t node = 0; node < total; ++node) {
        // decode lexicographic node index: x axes outer, theta axes inner
        std::int64_t rem = node;
        for (std::size_t k = d; k-- > 0;) {
            ti[k] = rem % g.theta_counts[k];
            rem /= g.theta_counts[k];
        }
        for (std::size_t k = d; k-- > 0;) {
            xi[k] = rem % g.x_counts[k];
            rem /= g.x_counts[k];
        }
        for (std::size_t k = 0; k < d; ++k) {
            x[k] = midpoint_x_node(xi[k], g.x_counts[k]);
            theta[k] = midpoint_theta_node(ti[k], g.theta_counts[k]);
        }
        try {
            g.samples.push_back(kappa.eval(x, theta));
        } catch (const DomainError& e) {
            throw DomainError(std::string(e.what()) + " at node x=" + std::to_string(x[0]) +
                              ", theta=" + std::to_string(theta[0]));
        }
    }
    return g;
}

/// Pointwise Moore-Penrose pseudoinverse at every node.
inline GridSampledSymbol sym_pinv_grid(const GridSampledSymbol& g, double rel_tol = 1e-12) {
    GridSampledSymbol out;
    out.x_counts = g.x_counts;
    out.theta_counts = g.theta_counts;
    out.r = g.s;
    out.s = g.r;
    out.samples.reserve(g.samples.size());
    for (const auto& m : g.samples) out.samples.push_back(pinv(m, rel_tol));
    return out;
}

/// Samples of -rho*mu(theta) - xi*(theta) kappa(theta)^{-1} xi(theta) / a(x)
/// on the midpoint grid (d = 1). kappa^{-1} is a pointwise pseudoinverse at
/// rel_tol 1e-12; a singular kappa node or a zero of a is a domain error.
inline GridSampledSymbol schur_symbol_from(const TrigPolySymbol& kappa, const TrigPolySymbol& xi,
                                           const TrigPolySymbol& mu, const CoeffExpr& a,
                                           double rho, std::int64_t x_count,
                                           std::int64_t theta_count) {
    if (kappa.d() != 1)
        throw std::invalid_argument("schur_symbol_from: only d = 1 supported");
    GridSampledSymbol g;
    g.x_counts = {x_count};
    g.theta_counts = {theta_count};
    g.r = mu.r();
    g.s = mu.s();
    const double kappa_tol = 1e-12;
    for (std::int64_t ix = 0; ix < x_count; ++ix) {
        const double x = midpoint_x_node(ix, x_count);
        const double ax = a.eval1(x);
        if (ax == 0.0)
            throw DomainError("schur symbol: a(x) = 0 at node x=" + std::to_string(x));
        for (std::int64_t it = 0; it < theta_count; ++it) {
            const double theta = midpoint_theta_node(it, theta_count);
            const DenseMatrix kv = kappa.eval1(theta);
            const SVDResult ks = svd(kv);
            if (ks.singular_values.back() <= kappa_tol * (1.0 + ks.singular_values.front()))
                throw DomainError("schur symbol: singular kappa at node theta=" +
                                  std::to_string(theta));
            const DenseMatrix kinv = pinv(kv, kappa_tol);
            const DenseMatrix xv = xi.eval1(theta);
            DenseMatrix second = adjoint(xv) * kinv * xv;
            DenseMatrix val = (-rho) * mu.eval1(theta) - (1.0 / ax) * second;
            g.samples.push_back(std::move(val));
        }
    }
    return g;
}

/// Trapezoid/DFT approximation of the Fourier coefficients
/// f_j ~ (2 pi)^{-d} int f(theta) e^{-i j.theta} dtheta for |j_k| <= cutoff_k.
/// Exact on trigonometric polynomials when samples_per_axis > 2*cutoff.
template <typename Fn>
inline TrigPolySymbol fourier_coeffs_from_samples(Fn&& f, std::size_t d,
                                                  const std::vector<std::int64_t>& cutoff,
                                                  const std::vector<std::int64_t>& samples_per_axis) {
    if (cutoff.size() != d || samples_per_axis.size() != d)
        throw std::invalid_argument("fourier_coeffs_from_samples: dimension mismatch");
    for (std::size_t k = 0; k < d; ++k)
        if (samples_per_axis[k] <= 2 * cutoff[k])
            throw std::invalid_argument(
                "fourier_coeffs_from_samples: need samples_per_axis > 2*cutoff");

    // sample f on the uniform grid theta_i = -pi + 2 pi i / n (periodic)
    std::vector<std::int64_t> idx(d, 0);
    std::int64_t total = 1;
    for (auto n : samples_per_axis) total *= n;
    std::vector<DenseMatrix> values;
    values.reserve(static_cast<std::size_t>(total));
    std::vector<double> theta(d);
    std::int64_t rr = -1, ss = -1;
    for (std::int64_t node = 0; node < total; ++node) {
        std::int64_t rem = node;
        for (std::size_t k = d; k-- > 0;) {
            idx[k] = rem % samples_per_axis[k];
            rem /= samples_per_axis[k];
        }
        for (std::size_t k = 0; k < d; ++k)
            theta[k] = -std::numbers::pi +
                       2.0 * std::numbers::pi * static_cast<double>(idx[k]) /
                           static_cast<double>(samples_per_axis[k]);
        DenseMatrix v = f(std::span<const double>(theta));
        if (rr < 0) { rr = v.rows(); ss = v.cols(); }
        values.push_back(std::move(v));
    }

    TrigPolySymbol out(d, rr, ss);
    // enumerate all j with |j_k| <= cutoff_k
    std::vector<std::int64_t> j(d, 0);
    for (std::size_t k = 0; k < d; ++k) j[k] = -cutoff[k];
    for (;;) {
        DenseMatrix acc(rr, ss);
        for (std::int64_t node = 0; node < total; ++node) {
            std::int64_t rem = node;
            double phase = 0.0;
            for (std::size_t k = d; k-- > 0;) {
                const std::int64_t ik = rem % samples_per_axis[k];
                rem /= samples_per_axis[k];
                const double th = -std::numbers::pi +
                                  2.0 * std::numbers::pi * static_cast<double>(ik) /
                                      static_cast<double>(samples_per_axis[k]);
                phase -= static_cast<double>(j[k]) * th;
            }
            const cplx w = std::polar(1.0, phase);
            const DenseMatrix& v = values[static_cast<std::size_t>(node)];
            for (std::size_t t = 0; t < acc.data().size(); ++t) acc.data()[t] += w * v.data()[t];
        }
        acc = (1.0 / static_cast<double>(total)) * acc;
        out.set_coeff(j, std::move(acc));

        std::size_t k = d;
        bool done = true;
        while (k-- > 0) {
            if (j[k] < cutoff[k]) {
                ++j[k];
                for (std::size_t t = k + 1; t < d; ++t) j[t] = -cutoff[t];
                done = false;
                break;
            }
        }
        if (done) break;
    }
    return out;
}

} // namespace glt
