#pragma once

#include <string>

#include <json.hpp>

#include "glt/symbol.hpp"

namespace glt {

inline nlohmann::json trig_to_json(const TrigPolySymbol& f) {
    nlohmann::json j;
    j["d"] = f.d();
    j["r"] = f.r();
    j["s"] = f.s();
    nlohmann::json coeffs = nlohmann::json::array();
    for (const auto& [key, mat] : f.coeffs()) {
        nlohmann::json c;
        c["j"] = key;
        nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
        for (std::int64_t a = 0; a < mat.rows(); ++a) {
            nlohmann::json rrow = nlohmann::json::array(), irow = nlohmann::json::array();
            for (std::int64_t b = 0; b < mat.cols(); ++b) {
                rrow.push_back(mat(a, b).real());
                irow.push_back(mat(a, b).imag());
            }
            re.push_back(rrow);
            im.push_back(irow);
        }
        c["re"] = re;
        c["im"] = im;
        coeffs.push_back(c);
    }
    j["coeffs"] = coeffs;
    return j;
}

inline TrigPolySymbol trig_from_json(const nlohmann::json& j) {
    const std::size_t d = j.at("d").get<std::size_t>();
    const std::int64_t r = j.at("r").get<std::int64_t>();
    const std::int64_t s = j.at("s").get<std::int64_t>();
    TrigPolySymbol f(d, r, s);
    for (const auto& c : j.at("coeffs")) {
        TrigPolySymbol::Key key = c.at("j").get<TrigPolySymbol::Key>();
        DenseMatrix mat(r, s);
        const auto& re = c.at("re");
        for (std::int64_t a = 0; a < r; ++a)
            for (std::int64_t b = 0; b < s; ++b) {
                double rv = re.at((std::size_t)a).at((std::size_t)b).get<double>();
                double iv = 0.0;
                if (c.contains("im"))
                    iv = c.at("im").at((std::size_t)a).at((std::size_t)b).get<double>();
                mat(a, b) = cplx(rv, iv);
            }
        f.set_coeff(std::move(key), std::move(mat));
    }
    return f;
}

inline nlohmann::json separable_to_json(const SeparableSymbol& k) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : k.terms()) {
        nlohmann::json term;
        term["a"] = t.a.serialize();
        term["f"] = trig_to_json(t.f);
        terms.push_back(term);
    }
    return nlohmann::json{{"terms", terms}};
}

inline SeparableSymbol separable_from_json(const nlohmann::json& j) {
    const auto& terms = j.at("terms");
    if (terms.empty())
        throw std::invalid_argument("separable_from_json: no terms");
    TrigPolySymbol first = trig_from_json(terms.at(0).at("f"));
    SeparableSymbol k(first.d(), first.r(), first.s());
    for (const auto& t : terms)
        k.add_term(parse_coeff(t.at("a").get<std::string>()), trig_from_json(t.at("f")));
    return k;
}

} // namespace glt
