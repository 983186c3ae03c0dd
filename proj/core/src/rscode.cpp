#include "nct/rscode.hpp"

#include <algorithm>

#include "nct/errors.hpp"

namespace nct {

RsParitySpec::RsParitySpec(std::vector<FieldElement> locators, std::size_t depth)
    : locators_(std::move(locators)), depth_(depth) {
    if (locators_.empty()) throw UsageError("RsParitySpec: empty locator list");
    if (locators_.size() <= depth_) throw UsageError("RsParitySpec: need l2 > l1");
    const Field f = locators_[0].field();
    std::vector<std::uint32_t> seen;
    for (const FieldElement& h : locators_) {
        if (h.modulus() != f.modulus()) throw UsageError("RsParitySpec: mixed fields");
        if (h.is_zero()) throw UsageError("RsParitySpec: zero locator");
        seen.push_back(h.value());
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
        throw UsageError("RsParitySpec: repeated locator");
    }
}

FieldMatrix RsParitySpec::matrix() const {
    return vandermonde(locators_, depth_);
}

FieldVector rs_syndrome(const RsParitySpec& spec, const SparseVector& b) {
    const Field f = spec.field();
    FieldVector e(spec.depth(), f);
    for (const auto& [idx, val] : b.entries) {
        if (idx >= spec.length()) throw UsageError("rs_syndrome: support index out of range");
        FieldElement h = spec.locators()[idx];
        FieldElement p = h;
        for (std::size_t k = 0; k < spec.depth(); ++k) {
            e.set(k, e[k] + p * val);
            p = p * h;
        }
    }
    return e;
}

std::optional<SparseVector> rs_decode(const RsParitySpec& spec, const FieldVector& e,
                                      std::size_t z_max) {
    const Field f = spec.field();
    std::size_t l1 = spec.depth();
    if (z_max > l1 / 2) {
        throw UsageError("rs_decode: z_max exceeds floor(l1/2)");
    }
    if (e.size() != l1) throw UsageError("rs_decode: syndrome length != l1");
    if (e.modulus() != f.modulus()) throw UsageError("rs_decode: field mismatch");

    if (e.is_zero()) return SparseVector{};

    // Berlekamp-Massey: shortest LFSR generating S_1..S_{l1} (= e).
    const FieldElement one(1, f);
    std::vector<FieldElement> lambda{one}, prev{one};
    std::size_t lfsr_len = 0;
    std::size_t gap = 1;
    FieldElement prev_discrepancy = one;
    for (std::size_t n = 0; n < l1; ++n) {
        FieldElement d = e[n];
        for (std::size_t i = 1; i <= lfsr_len && i < lambda.size(); ++i) {
            if (n >= i) d += lambda[i] * e[n - i];
        }
        if (d.is_zero()) {
            ++gap;
            continue;
        }
        std::vector<FieldElement> adjusted = lambda;
        FieldElement scale = d * prev_discrepancy.inv();
        if (adjusted.size() < prev.size() + gap) {
            adjusted.resize(prev.size() + gap, FieldElement(0, f));
        }
        for (std::size_t i = 0; i < prev.size(); ++i) {
            adjusted[i + gap] -= scale * prev[i];
        }
        if (2 * lfsr_len <= n) {
            prev = lambda;
            prev_discrepancy = d;
            lfsr_len = n + 1 - lfsr_len;
            gap = 1;
        } else {
            ++gap;
        }
        lambda = std::move(adjusted);
    }
    if (lfsr_len > z_max) return std::nullopt;

    // Chien-style scan restricted to the locator list: index j is in the
    // support iff lambda(h_j^{-1}) == 0.
    std::vector<std::size_t> support;
    for (std::size_t j = 0; j < spec.length(); ++j) {
        FieldElement x = spec.locators()[j].inv();
        FieldElement acc(0, f);
        FieldElement p = one;
        for (const FieldElement& coef : lambda) {
            acc += coef * p;
            p = p * x;
        }
        if (acc.is_zero()) support.push_back(j);
        if (support.size() > lfsr_len) break;
    }
    if (support.size() != lfsr_len) return std::nullopt;

    // Magnitudes from the square power system on the support columns.
    std::vector<FieldElement> sup_locators;
    for (std::size_t j : support) sup_locators.push_back(spec.locators()[j]);
    FieldMatrix v = vandermonde(sup_locators, support.size());
    FieldVector rhs(support.size(), f);
    for (std::size_t k = 0; k < support.size(); ++k) rhs.set(k, e[k]);
    auto mags = solve(v, rhs);
    if (!mags) return std::nullopt;

    SparseVector b;
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (!(*mags)[i].is_zero()) b.entries.emplace_back(support[i], (*mags)[i]);
    }
    if (b.weight() > z_max) return std::nullopt;
    if (rs_syndrome(spec, b) != e) return std::nullopt;
    return b;
}

} // namespace nct
