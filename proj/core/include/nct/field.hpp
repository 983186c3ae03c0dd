#ifndef NCT_FIELD_HPP
#define NCT_FIELD_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nct/errors.hpp"

namespace nct {

/// Prime field GF(q). The default modulus is the Mersenne prime 2^31 - 1;
/// anything down to q = 7 is accepted for hand-checkable cases.
class Field {
  public:
    static constexpr std::uint32_t kDefaultModulus = 2147483647u; // 2^31 - 1

    Field() : q_(kDefaultModulus) {}
    explicit Field(std::uint32_t q);

    std::uint32_t modulus() const { return q_; }
    bool operator==(const Field& other) const { return q_ == other.q_; }
    bool operator!=(const Field& other) const { return q_ != other.q_; }

  private:
    std::uint32_t q_;
};

/// A residue in [0, q). Carries its modulus so cross-field misuse is caught.
class FieldElement {
  public:
    FieldElement() : v_(0), q_(Field::kDefaultModulus) {}
    FieldElement(std::uint64_t value, const Field& field)
        : v_(static_cast<std::uint32_t>(value % field.modulus())), q_(field.modulus()) {}

    std::uint32_t value() const { return v_; }
    std::uint32_t modulus() const { return q_; }
    Field field() const { return Field(q_); }
    bool is_zero() const { return v_ == 0; }

    FieldElement operator+(FieldElement rhs) const;
    FieldElement operator-(FieldElement rhs) const;
    FieldElement operator*(FieldElement rhs) const;
    FieldElement operator-() const;
    FieldElement inv() const;
    FieldElement pow(std::uint64_t k) const;

    FieldElement& operator+=(FieldElement rhs) { return *this = *this + rhs; }
    FieldElement& operator-=(FieldElement rhs) { return *this = *this - rhs; }
    FieldElement& operator*=(FieldElement rhs) { return *this = *this * rhs; }

    bool operator==(const FieldElement& rhs) const { return v_ == rhs.v_ && q_ == rhs.q_; }
    bool operator!=(const FieldElement& rhs) const { return !(*this == rhs); }

  private:
    friend class FieldMatrix;
    friend class FieldVector;
    FieldElement(std::uint32_t v, std::uint32_t q, int) : v_(v), q_(q) {} // trusted, no reduction

    void check_same_field(const FieldElement& rhs) const;

    std::uint32_t v_;
    std::uint32_t q_;
};

/// Deterministic RNG; every random choice in the project flows through one
/// of these so a (seed, config) pair replays exactly.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }

    /// Unbiased draw from [0, n). Rejection sampling, independent of any
    /// standard-library distribution so streams are stable everywhere.
    std::uint64_t below(std::uint64_t n);

    FieldElement sample(const Field& f);
    FieldElement sample_nonzero(const Field& f);

    /// Child generator for an independent stream (trial index, stage tag...).
    Rng derive(std::uint64_t salt) const;

  private:
    std::mt19937_64 gen_;
};

/// splitmix64 finalizer; used for key -> seed derivation.
std::uint64_t mix64(std::uint64_t x);
/// Chain a value into a running hash.
std::uint64_t hash_combine(std::uint64_t h, std::uint64_t x);
/// FNV-1a over the bytes of a label.
std::uint64_t hash_label(const std::string& s);

} // namespace nct

#endif
