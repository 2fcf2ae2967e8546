// Command-line front end: reads a JSON experiment config, runs the requested
// computation, and writes CSV / Matrix Market / summary files into
// <out>/<name>/. Exit codes: 0 ok, 2 config error, 3 numerical error,
// 4 invariant violation.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "glt/distribution.hpp"
#include "glt/extension.hpp"
#include "glt/fem_bspline.hpp"
#include "glt/generators.hpp"
#include "glt/mmio.hpp"
#include "glt/symbol.hpp"
#include "glt/symbol_json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace glt;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvariantViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::string threads = "auto";
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON experiment config")->required();
    cmd->add_option("--out", opts.out_dir, "output root directory");
    cmd->add_option("--set", opts.overrides, "config override key=value (repeatable)");
    cmd->add_option("--seed", opts.seed, "RNG seed override");
    cmd->add_option("--threads", opts.threads, "worker threads (positive integer or 'auto')");
}

json parse_override_value(const std::string& text) {
    // JSON literal if it parses, bare string otherwise
    json v = json::parse(text, nullptr, false);
    if (v.is_discarded()) return json(text);
    return v;
}

void apply_override(json& cfg, const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("--set expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    json* node = &cfg;
    std::size_t pos = 0;
    while (true) {
        const auto dot = key.find('.', pos);
        const std::string part = key.substr(pos, dot == std::string::npos ? dot : dot - pos);
        if (part.empty()) throw ConfigError("--set key has an empty path segment: " + key);
        if (dot == std::string::npos) {
            (*node)[part] = parse_override_value(kv.substr(eq + 1));
            return;
        }
        node = &(*node)[part];
        pos = dot + 1;
    }
}

struct Experiment {
    json cfg;
    fs::path dir;       // <out>/<name>
    std::uint64_t seed = 0;
    std::ofstream summary;

    void note(const std::string& key, const std::string& value) {
        summary << key << "=" << value << "\n";
    }
    void note(const std::string& key, double value) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12g", value);
        note(key, std::string(buf));
    }
};

Experiment open_experiment(const CommonOpts& opts, const std::string& default_name) {
    if (opts.config_path.empty() || opts.out_dir.empty())
        throw ConfigError("config and output paths must be nonempty");
    std::ifstream in(opts.config_path);
    if (!in) throw ConfigError("cannot read config file: " + opts.config_path);
    json cfg;
    try {
        cfg = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    for (const auto& kv : opts.overrides) apply_override(cfg, kv);
    if (opts.seed) cfg["seed"] = *opts.seed;

    if (opts.threads != "auto") {
        try {
            if (std::stoll(opts.threads) < 1) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw ConfigError("--threads expects a positive integer or 'auto'");
        }
    }

    Experiment exp;
    exp.cfg = std::move(cfg);
    exp.seed = exp.cfg.value("seed", std::uint64_t{0});
    const std::string name = exp.cfg.value("name", default_name);
    if (name.empty()) throw ConfigError("experiment name must be nonempty");
    exp.dir = fs::path(opts.out_dir) / name;
    fs::create_directories(exp.dir);

    // the effective config (after overrides) travels with the results
    std::ofstream cfg_out(exp.dir / "config.json");
    cfg_out << exp.cfg.dump(2) << "\n";

    exp.summary.open(exp.dir / "summary.txt");
    if (!exp.summary) throw ConfigError("cannot write into " + exp.dir.string());
    return exp;
}

std::vector<std::int64_t> n_list_from(const json& cfg) {
    if (!cfg.contains("n")) throw ConfigError("config needs an \"n\" list");
    std::vector<std::int64_t> ns;
    if (cfg.at("n").is_number_integer()) ns.push_back(cfg.at("n").get<std::int64_t>());
    else ns = cfg.at("n").get<std::vector<std::int64_t>>();
    if (ns.empty()) throw ConfigError("\"n\" list is empty");
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (ns[i] < 1) throw ConfigError("matrix orders must be >= 1");
        if (i > 0 && ns[i] <= ns[i - 1])
            throw ConfigError("\"n\" list must be strictly increasing");
    }
    return ns;
}

std::pair<std::int64_t, std::int64_t> grid_from(const json& cfg) {
    std::int64_t x = 8, theta = 512;
    if (cfg.contains("grid")) {
        x = cfg.at("grid").value("x", x);
        theta = cfg.at("grid").value("theta", theta);
    }
    if (x < 8 || theta < 8) throw ConfigError("grid counts must be >= 8");
    return {x, theta};
}

std::vector<TestFunction> family_from(const json& cfg,
                                      const std::vector<double>& fallback_values) {
    if (cfg.contains("family")) {
        const auto& f = cfg.at("family");
        return make_test_family(f.at("lo").get<double>(), f.at("hi").get<double>(),
                                f.value("count", std::int64_t{9}));
    }
    // default family spans the observed values with a margin of 1
    double lo = 0.0, hi = 1.0;
    if (!fallback_values.empty()) {
        lo = *std::min_element(fallback_values.begin(), fallback_values.end());
        hi = *std::max_element(fallback_values.begin(), fallback_values.end());
    }
    return make_test_family(lo - 1.0, hi + 1.0, 9);
}

SpectrumMode mode_from(const json& cfg) {
    const std::string mode = cfg.value("mode", "singular");
    if (mode == "singular") return SpectrumMode::Singular;
    if (mode == "eigen") return SpectrumMode::Eigen;
    throw ConfigError("mode must be \"singular\" or \"eigen\"");
}

// a coefficient is treated as x-free when it evaluates identically on probes
std::optional<double> constant_value(const CoeffExpr& a) {
    try {
        const double probe0[] = {0.5};
        const double v = a.eval(probe0);
        for (double x : {0.0, 0.25, 1.0 / 3.0, 0.717, 1.0}) {
            const double probe[] = {x};
            if (a.eval(probe) != v) return std::nullopt;
        }
        return v;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

TrigPolySymbol x_free_trig(const SeparableSymbol& sym, const std::string& who) {
    if (sym.d() != 1) throw ConfigError("only 1-level symbols are supported here");
    TrigPolySymbol f(1, sym.r(), sym.s());
    for (const auto& t : sym.terms()) {
        const auto c = constant_value(t.a);
        if (!c) throw ConfigError(who + " expects an x-free symbol");
        f = trig_add(f, trig_scale(cplx(*c, 0.0), t.f));
    }
    return f;
}

SeparableSymbol symbol_from(const json& cfg) {
    if (!cfg.contains("symbol")) throw ConfigError("config needs a \"symbol\"");
    const auto& s = cfg.at("symbol");
    try {
        if (s.contains("terms")) return separable_from_json(s);
        return SeparableSymbol::from_trig(trig_from_json(s));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad symbol JSON: ") + e.what());
    }
}

EmpiricalSpectrum spectrum_of(const DenseMatrix& A, SpectrumMode mode) {
    return mode == SpectrumMode::Eigen ? eigen_spectrum(A) : singular_spectrum(A);
}

void write_csv_file(const fs::path& path, const std::vector<SweepRow>& rows) {
    std::ofstream os(path, std::ios::binary);
    write_sweep_csv(os, rows);
}

void run_sweep_experiment(Experiment& exp,
                          const std::function<DenseMatrix(std::int64_t)>& matrix_at,
                          const SeparableSymbol& sym) {
    const auto ns = n_list_from(exp.cfg);
    const auto [gx, gt] = grid_from(exp.cfg);
    const SpectrumMode mode = mode_from(exp.cfg);
    const GridSampledSymbol grid = sample_symbol(sym, {gx}, {gt});

    std::vector<std::pair<std::int64_t, EmpiricalSpectrum>> spectra;
    std::vector<double> observed;
    for (std::int64_t n : ns) {
        EmpiricalSpectrum spec = spectrum_of(matrix_at(n), mode);
        observed.insert(observed.end(), spec.values.begin(), spec.values.end());
        spectra.emplace_back(n, std::move(spec));
    }
    const auto fam = family_from(exp.cfg, observed);
    const auto rows = discrepancy_sweep(spectra, grid, fam, mode);
    write_csv_file(exp.dir / "sweep.csv", rows);
    for (std::int64_t n : ns)
        exp.note("delta_" + std::to_string(n), sweep_delta(rows, n));
}

int cmd_toeplitz(const CommonOpts& opts) {
    Experiment exp = open_experiment(opts, "toeplitz");
    const SeparableSymbol sym = symbol_from(exp.cfg);
    const TrigPolySymbol f = x_free_trig(sym, "toeplitz");
    run_sweep_experiment(
        exp, [&](std::int64_t n) { return toeplitz(MultiIndex{n}, f); }, sym);
    return 0;
}

int cmd_diag(const CommonOpts& opts) {
    Experiment exp = open_experiment(opts, "diag");
    if (!exp.cfg.contains("a")) throw ConfigError("config needs a coefficient expression \"a\"");
    CoeffExpr a = parse_coeff(exp.cfg.at("a").get<std::string>());
    const CoefficientFunction af = CoefficientFunction::scalar(1, a);
    SeparableSymbol sym(1, 1, 1);
    sym.add_term(a, TrigPolySymbol::scalar_constant(1, 1.0));
    run_sweep_experiment(
        exp, [&](std::int64_t n) { return diag_sampling(MultiIndex{n}, af); }, sym);
    return 0;
}

int cmd_fem(const CommonOpts& opts) {
    Experiment exp = open_experiment(opts, "fem");
    const json& cfg = exp.cfg;
    FEProblem prob(cfg.value("p", 1), cfg.value("k", 0), cfg.value("q", 1), cfg.value("l", 0),
                   parse_coeff(cfg.value("a", "1")), cfg.value("rho", 0.0),
                   cfg.value("n", std::int64_t{64}), cfg.value("m", std::int64_t{-1}));
    const auto [gx, gt] = grid_from(cfg);

    const DenseMatrix A11 = assemble_A11(prob);
    const DenseMatrix A12 = assemble_A12(prob);
    const DenseMatrix A22 = assemble_A22(prob);
    write_matrix_market_file((exp.dir / "A11.mtx").string(), A11);
    write_matrix_market_file((exp.dir / "A12.mtx").string(), A12);
    write_matrix_market_file((exp.dir / "A22.mtx").string(), A22);

    // block structure check against the coupling symbol
    try {
        const auto rep = toeplitz_equality_check(prob);
        exp.note("toeplitz_interior_deviation", rep.max_interior_deviation);
        exp.note("toeplitz_residual_rank", (double)rep.residual_rank);
        exp.note("toeplitz_rank_bound", (double)rep.rank_bound);
        if (rep.residual_rank > rep.rank_bound)
            throw InvariantViolation("coupling residual rank exceeds its bound");
    } catch (const NumericalError& e) {
        throw InvariantViolation(e.what());
    }

    // normalized saddle-point matrix vs the 2x2 block symbol
    const DenseMatrix B = normalized_block_matrix(prob, A11, A12, A22);
    const GridSampledSymbol block_grid =
        block_symbol_grid(prob.p, prob.k, prob.q, prob.l, prob.a, prob.rho, gx, gt);
    std::vector<std::pair<std::int64_t, EmpiricalSpectrum>> bspec;
    bspec.emplace_back(prob.n, eigen_spectrum(B));
    const auto bfam = family_from(cfg, bspec[0].second.values);
    const auto brows = discrepancy_sweep(bspec, block_grid, bfam, SpectrumMode::Eigen);
    write_csv_file(exp.dir / "block.csv", brows);
    exp.note("block_delta", sweep_delta(brows, prob.n));

    // Schur complement vs its symbol
    const DenseMatrix S = schur_complement(A11, A12, A22);
    write_matrix_market_file((exp.dir / "schur.mtx").string(), S);
    const DenseMatrix nS = cplx((double)prob.n, 0.0) * S;
    const GridSampledSymbol schur_grid =
        schur_symbol(prob.p, prob.k, prob.q, prob.l, prob.a, prob.rho, gx, gt);
    std::vector<std::pair<std::int64_t, EmpiricalSpectrum>> sspec;
    sspec.emplace_back(prob.n, eigen_spectrum(nS));
    const auto sfam = family_from(cfg, sspec[0].second.values);
    const auto srows = discrepancy_sweep(sspec, schur_grid, sfam, SpectrumMode::Eigen);
    write_csv_file(exp.dir / "schur.csv", srows);
    exp.note("schur_delta", sweep_delta(srows, prob.n));
    return 0;
}

int cmd_acs(const CommonOpts& opts) {
    Experiment exp = open_experiment(opts, "acs");
    const SeparableSymbol sym = symbol_from(exp.cfg);
    const TrigPolySymbol target = x_free_trig(sym, "acs");
    const auto ns = n_list_from(exp.cfg);
    std::vector<std::int64_t> cutoffs =
        exp.cfg.value("cutoffs", std::vector<std::int64_t>{1, 2, 3, 4, 5});
    const std::optional<double> fixed_omega =
        exp.cfg.contains("omega") ? std::optional<double>(exp.cfg.at("omega").get<double>())
                                  : std::nullopt;

    std::ofstream csv(exp.dir / "acs.csv", std::ios::binary);
    csv << "n,m,rank_fraction,achieved_norm,threshold\n";
    char buf[160];
    for (std::int64_t n : ns) {
        const DenseMatrix A = toeplitz(MultiIndex{n}, target);
        for (std::int64_t m : cutoffs) {
            TrigPolySymbol trunc(1, target.r(), target.s());
            for (std::int64_t j = -m; j <= m; ++j) trunc.set_coeff({j}, target.coeff({j}));
            double omega;
            if (fixed_omega) {
                omega = *fixed_omega;
            } else {
                // sup-norm of the truncation error on a dense grid
                omega = 0.0;
                for (std::int64_t i = 0; i < 4096; ++i) {
                    const double theta = midpoint_theta_node(i, 4096);
                    omega = std::max(
                        omega, max_abs(target.eval1(theta) - trunc.eval1(theta)));
                }
            }
            const ACSEntry e = acs_split(A, toeplitz(MultiIndex{n}, trunc), omega);
            std::snprintf(buf, sizeof buf, "%lld,%lld,%.12g,%.12g,%.12g\n",
                          (long long)n, (long long)m, e.rank_fraction, e.achieved_norm,
                          e.threshold);
            csv << buf;
        }
    }
    return 0;
}

int cmd_ext_check(const CommonOpts& opts) {
    Experiment exp = open_experiment(opts, "ext-check");
    const std::int64_t instances = exp.cfg.value("instances", std::int64_t{100});
    if (instances < 1) throw ConfigError("instances must be >= 1");
    SplitMix64 rng(exp.seed == 0 ? 101 : exp.seed);
    double worst = 0.0;
    bool routes_identical = true;
    for (std::int64_t trial = 0; trial < instances; ++trial) {
        const std::int64_t n = 1 + (std::int64_t)(rng.next() % 4);
        const std::int64_t r = 1 + (std::int64_t)(rng.next() % 3);
        const std::int64_t q = 1 + (std::int64_t)(rng.next() % 3);
        const std::int64_t s = 1 + (std::int64_t)(rng.next() % 3);
        const std::int64_t mx = std::max({r, q, s});
        const std::int64_t t = mx + (std::int64_t)(rng.next() % (std::uint64_t)(6 - mx));
        const std::int64_t u = t + (std::int64_t)(rng.next() % (std::uint64_t)(6 - t));

        auto rnd = [&](std::int64_t rr, std::int64_t ss) {
            DenseMatrix x(n * rr, n * ss);
            for (auto& v : x.data()) v = cplx(rng.symmetric(), rng.symmetric());
            x.set_block_meta(BlockMeta{MultiIndex{n}, rr, ss});
            return x;
        };
        const DenseMatrix X = rnd(r, q), Y = rnd(q, s);
        const DenseMatrix E = extend_matrix(X, t);
        if (!(E == extend_via_permutation(X, t))) routes_identical = false;
        DenseMatrix Xa = adjoint(X);
        Xa.set_block_meta(BlockMeta{MultiIndex{n}, q, r});
        worst = std::max(worst, max_abs(adjoint(E) - extend_matrix(Xa, t)));
        worst = std::max(worst, max_abs(extend_matrix(E, u) - extend_matrix(X, u)));
        DenseMatrix XY = X * Y;
        XY.set_block_meta(BlockMeta{MultiIndex{n}, r, s});
        worst = std::max(worst,
                         max_abs(extend_matrix(XY, t) - extend_matrix(X, t) * extend_matrix(Y, t)));
    }
    exp.note("instances", (double)instances);
    exp.note("routes_identical", routes_identical ? "yes" : "no");
    exp.note("worst_identity_deviation", worst);
    if (!routes_identical)
        throw InvariantViolation("blockwise and permutation extensions differ");
    if (worst > 1e-12)
        throw InvariantViolation("extension identity deviation " + std::to_string(worst) +
                                 " exceeds 1e-12");
    return 0;
}

int cmd_spectrum(const CommonOpts& opts) {
    Experiment exp = open_experiment(opts, "spectrum");
    const SpectrumMode mode = mode_from(exp.cfg);
    DenseMatrix A;
    if (exp.cfg.contains("matrix")) {
        A = read_matrix_market_file(exp.cfg.at("matrix").get<std::string>());
    } else if (exp.cfg.contains("symbol")) {
        const SeparableSymbol sym = symbol_from(exp.cfg);
        const TrigPolySymbol f = x_free_trig(sym, "spectrum");
        const auto ns = n_list_from(exp.cfg);
        A = toeplitz(MultiIndex{ns.back()}, f);
    } else {
        throw ConfigError("config needs \"matrix\" (Matrix Market path) or \"symbol\" + \"n\"");
    }
    const EmpiricalSpectrum spec = spectrum_of(A, mode);
    std::ofstream csv(exp.dir / "spectrum.csv", std::ios::binary);
    csv << "index,value\n";
    char buf[96];
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.12g\n", i + 1, spec.values[i]);
        csv << buf;
    }
    exp.note("count", (double)spec.values.size());
    exp.note("count_basis", (double)spec.count_basis);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rectangular multilevel block GLT matrix-sequence toolkit"};
    app.require_subcommand(1);

    CommonOpts opts;
    int (*runner)(const CommonOpts&) = nullptr;
    for (auto [name, desc, fn] : {
             std::tuple{"toeplitz", "distribution sweep of Toeplitz matrices", &cmd_toeplitz},
             std::tuple{"diag", "distribution sweep of diagonal sampling matrices", &cmd_diag},
             std::tuple{"fem", "B-spline saddle-point assembly and spectra", &cmd_fem},
             std::tuple{"acs", "approximating-class splitting report", &cmd_acs},
             std::tuple{"ext-check", "extension operator identity suite", &cmd_ext_check},
             std::tuple{"spectrum", "spectrum of a matrix or generated Toeplitz", &cmd_spectrum},
         }) {
        CLI::App* cmd = app.add_subcommand(name, desc);
        add_common(cmd, opts);
        cmd->callback([&runner, fn] { runner = fn; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        return runner(opts);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const SyntaxError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InvariantViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
