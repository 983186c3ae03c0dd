#include "nct/field.hpp"

#include <atomic>

namespace nct {

namespace {

bool is_prime(std::uint32_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::uint64_t d = 3; d * d <= n; d += 2) {
        if (n % d == 0) return false;
    }
    return true;
}

// Memo of validated moduli; a run touches one or two fields, and the trial
// division must not rerun on every element access.
bool known_prime(std::uint32_t q) {
    static std::atomic<std::uint32_t> cache[8] = {};
    for (auto& slot : cache) {
        if (slot.load(std::memory_order_relaxed) == q) return true;
    }
    if (!is_prime(q)) return false;
    static std::atomic<unsigned> next{0};
    cache[next.fetch_add(1, std::memory_order_relaxed) % 8].store(q,
                                                                  std::memory_order_relaxed);
    return true;
}

} // namespace

Field::Field(std::uint32_t q) : q_(q) {
    if (q == kDefaultModulus) return;
    if (!known_prime(q)) {
        throw UsageError("field modulus " + std::to_string(q) + " is not prime");
    }
}

void FieldElement::check_same_field(const FieldElement& rhs) const {
    if (q_ != rhs.q_) {
        throw UsageError("field elements have mismatched moduli: " + std::to_string(q_) +
                         " vs " + std::to_string(rhs.q_));
    }
}

FieldElement FieldElement::operator+(FieldElement rhs) const {
    check_same_field(rhs);
    std::uint64_t s = static_cast<std::uint64_t>(v_) + rhs.v_;
    if (s >= q_) s -= q_;
    return FieldElement(static_cast<std::uint32_t>(s), q_, 0);
}

FieldElement FieldElement::operator-(FieldElement rhs) const {
    check_same_field(rhs);
    std::uint64_t s = static_cast<std::uint64_t>(v_) + q_ - rhs.v_;
    if (s >= q_) s -= q_;
    return FieldElement(static_cast<std::uint32_t>(s), q_, 0);
}

FieldElement FieldElement::operator*(FieldElement rhs) const {
    check_same_field(rhs);
    std::uint64_t p = static_cast<std::uint64_t>(v_) * rhs.v_ % q_;
    return FieldElement(static_cast<std::uint32_t>(p), q_, 0);
}

FieldElement FieldElement::operator-() const {
    return FieldElement(v_ == 0 ? 0 : q_ - v_, q_, 0);
}

FieldElement FieldElement::pow(std::uint64_t k) const {
    std::uint64_t base = v_;
    std::uint64_t acc = 1;
    while (k > 0) {
        if (k & 1) acc = acc * base % q_;
        base = base * base % q_;
        k >>= 1;
    }
    return FieldElement(static_cast<std::uint32_t>(acc), q_, 0);
}

FieldElement FieldElement::inv() const {
    if (v_ == 0) {
        throw UsageError("division by zero in GF(" + std::to_string(q_) + ")");
    }
    return pow(q_ - 2); // Fermat
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw UsageError("Rng::below(0)");
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = gen_();
    } while (x >= limit);
    return x % n;
}

FieldElement Rng::sample(const Field& f) {
    return FieldElement(below(f.modulus()), f);
}

FieldElement Rng::sample_nonzero(const Field& f) {
    return FieldElement(1 + below(f.modulus() - 1), f);
}

Rng Rng::derive(std::uint64_t salt) const {
    Rng copy = *this;
    std::uint64_t base = copy.gen_();
    return Rng(mix64(hash_combine(base, salt)));
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t hash_combine(std::uint64_t h, std::uint64_t x) {
    return mix64(h ^ (x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

std::uint64_t hash_label(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace nct
