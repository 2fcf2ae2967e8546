#pragma once

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace glt {

/// A d-tuple of positive integers, used both for level orders n and for
/// indices i ranging over {1,...,n} in lexicographic order.
class MultiIndex {
public:
    MultiIndex() = default;

    explicit MultiIndex(std::vector<std::int64_t> entries) : entries_(std::move(entries)) {
        if (entries_.empty())
            throw std::invalid_argument("MultiIndex: dimension must be >= 1");
        for (auto e : entries_)
            if (e < 1)
                throw std::invalid_argument("MultiIndex: entries must be >= 1");
    }

    MultiIndex(std::initializer_list<std::int64_t> entries)
        : MultiIndex(std::vector<std::int64_t>(entries)) {}

    std::size_t dim() const { return entries_.size(); }
    std::int64_t operator[](std::size_t k) const { return entries_[k]; }
    const std::vector<std::int64_t>& entries() const { return entries_; }

    bool operator==(const MultiIndex& o) const { return entries_ == o.entries_; }

private:
    std::vector<std::int64_t> entries_;
};

/// N(n) = n_1 * ... * n_d.
inline std::int64_t n_total(const MultiIndex& n) {
    std::int64_t p = 1;
    for (std::size_t k = 0; k < n.dim(); ++k) p *= n[k];
    return p;
}

/// 1-based rank of i in the lexicographic enumeration of {1,...,n}
/// (last component varies fastest).
inline std::int64_t lex_position(const MultiIndex& i, const MultiIndex& n) {
    if (i.dim() != n.dim())
        throw std::invalid_argument("lex_position: dimension mismatch");
    std::int64_t pos = 0;
    for (std::size_t k = 0; k < n.dim(); ++k) {
        if (i[k] < 1 || i[k] > n[k])
            throw std::out_of_range("lex_position: component " + std::to_string(k + 1) +
                                    " out of range");
        pos = pos * n[k] + (i[k] - 1);
    }
    return pos + 1;
}

/// All d-indices 1 <= i <= n in lexicographic order.
inline std::vector<MultiIndex> lex_range(const MultiIndex& n) {
    std::vector<MultiIndex> out;
    out.reserve(static_cast<std::size_t>(n_total(n)));
    std::vector<std::int64_t> cur(n.dim(), 1);
    for (;;) {
        out.emplace_back(cur);
        std::size_t k = n.dim();
        while (k > 0) {
            --k;
            if (cur[k] < n[k]) {
                ++cur[k];
                for (std::size_t j = k + 1; j < n.dim(); ++j) cur[j] = 1;
                break;
            }
            if (k == 0) return out;
        }
    }
}

} // namespace glt
