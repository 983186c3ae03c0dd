#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "nct/field.hpp"

using namespace nct;

TEST_CASE("construction checks primality") {
    CHECK_NOTHROW(Field(7));
    CHECK_NOTHROW(Field(13));
    CHECK_NOTHROW(Field(2147483647u));
    CHECK_THROWS_AS(Field(6), UsageError);
    CHECK_THROWS_AS(Field(1), UsageError);
    CHECK_THROWS_AS(Field(46349u * 2), UsageError);
}

TEST_CASE("arithmetic in GF(7)") {
    Field f(7);
    auto e = [&](std::uint64_t v) { return FieldElement(v, f); };
    CHECK(e(3) * e(5) == e(1));
    CHECK(e(6) + e(1) == e(0));
    CHECK(e(0) - e(1) == e(6));
    CHECK(-e(3) == e(4));
}

TEST_CASE("inverse in GF(7)") {
    Field f(7);
    CHECK(FieldElement(1, f).inv() == FieldElement(1, f));
    CHECK(FieldElement(3, f).inv() == FieldElement(5, f));
    CHECK_THROWS_AS(FieldElement(0, f).inv(), UsageError);
}

TEST_CASE("powers") {
    Field f(7);
    CHECK(FieldElement(3, f).pow(2) == FieldElement(2, f));
    CHECK(FieldElement(5, f).pow(0) == FieldElement(1, f));
    CHECK(FieldElement(2, f).pow(6) == FieldElement(1, f));
    CHECK(FieldElement(0, f).pow(0) == FieldElement(1, f));
    CHECK(FieldElement(0, f).pow(5) == FieldElement(0, f));
}

TEST_CASE("mismatched moduli rejected") {
    FieldElement a(3, Field(7));
    FieldElement b(3, Field(13));
    CHECK_THROWS_AS(a + b, UsageError);
    CHECK_THROWS_AS(a * b, UsageError);
}

TEST_CASE("field axioms hold on random triples") {
    for (std::uint32_t q : {7u, 13u, 2147483647u}) {
        Field f(q);
        Rng rng(42 + q);
        for (int i = 0; i < 200; ++i) {
            FieldElement a = rng.sample(f), b = rng.sample(f), c = rng.sample(f);
            CHECK((a + b) + c == a + (b + c));
            CHECK((a * b) * c == a * (b * c));
            CHECK(a * (b + c) == a * b + a * c);
            CHECK(a + (-a) == FieldElement(0, f));
            if (!a.is_zero()) {
                CHECK(a * a.inv() == FieldElement(1, f));
                CHECK(a.pow(q - 1) == FieldElement(1, f));
            }
        }
    }
}

TEST_CASE("sampling is deterministic and in range") {
    Field f(2147483647u);
    Rng a(99), b(99);
    for (int i = 0; i < 100; ++i) {
        FieldElement x = a.sample(f);
        CHECK(x == b.sample(f));
        CHECK(x.value() < f.modulus());
    }
    Rng c(100);
    bool differs = false;
    Rng a2(99);
    for (int i = 0; i < 100; ++i) differs = differs || a2.sample(f) != c.sample(f);
    CHECK(differs);
}

TEST_CASE("uniformity: residue counts in GF(7) within 5 sigma") {
    Field f(7);
    Rng rng(2024);
    const int draws = 100000;
    int counts[7] = {};
    for (int i = 0; i < draws; ++i) counts[rng.sample(f).value()]++;
    double expect = draws / 7.0;
    double sigma = std::sqrt(draws * (1.0 / 7.0) * (6.0 / 7.0));
    for (int r = 0; r < 7; ++r) {
        CHECK(std::abs(counts[r] - expect) <= 5.0 * sigma);
    }
}

TEST_CASE("derived streams differ from parents") {
    Rng root(7);
    Rng child = root.derive(1);
    Rng other = root.derive(2);
    int same = 0;
    for (int i = 0; i < 50; ++i) {
        if (child.next() == other.next()) ++same;
    }
    CHECK(same == 0);
}
