#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "nct/matrix.hpp"

using namespace nct;

namespace {

FieldMatrix from_rows(const std::vector<std::vector<std::uint32_t>>& rows, const Field& f) {
    std::vector<FieldVector> rv;
    for (const auto& r : rows) rv.emplace_back(r, f);
    return FieldMatrix::from_rows(rv, f);
}

} // namespace

TEST_CASE("rank") {
    Field f(7);
    CHECK(rank(FieldMatrix::identity(2, f)) == 2);
    CHECK(rank(FieldMatrix(3, 3, f)) == 0);
    CHECK(rank(from_rows({{1, 2}, {2, 4}}, f)) == 1);
    CHECK(rank(FieldMatrix(0, 0, f)) == 0);
    CHECK(rank(FieldMatrix(3, 0, f)) == 0);
}

TEST_CASE("invert") {
    Field f(7);
    CHECK(invert(FieldMatrix::identity(3, f)) == FieldMatrix::identity(3, f));
    CHECK(invert(from_rows({{2, 0}, {0, 1}}, f)) == from_rows({{4, 0}, {0, 1}}, f));
    CHECK_THROWS_AS(invert(from_rows({{1, 1}, {2, 2}}, f)), SingularMatrixError);
    CHECK_THROWS_AS(invert(FieldMatrix(2, 3, f)), UsageError);
}

TEST_CASE("invert is two-sided on random nonsingular matrices") {
    Field f(2147483647u);
    Rng rng(5);
    for (int i = 0; i < 30; ++i) {
        FieldMatrix m = FieldMatrix::random(4, 4, f, rng);
        if (rank(m) < 4) continue;
        FieldMatrix mi = invert(m);
        CHECK(m * mi == FieldMatrix::identity(4, f));
        CHECK(mi * m == FieldMatrix::identity(4, f));
    }
}

TEST_CASE("column space membership") {
    Field f(7);
    CHECK(col_space_contains(FieldMatrix::identity(2, f), FieldVector({3, 4}, f)));
    CHECK_FALSE(col_space_contains(from_rows({{1}, {0}}, f), FieldVector({0, 1}, f)));
    // IRVs of a bottleneck pair span the same line as the shared downstream
    // edge, so that edge's IRV is inside their span.
    FieldMatrix theta = from_rows({{0, 0}, {2, 1}}, f);
    CHECK(col_space_contains(theta, FieldVector({0, 1}, f)));
    // zero vector is in every span, including the empty one
    CHECK(col_space_contains(FieldMatrix(2, 0, f), FieldVector(2, f)));
    CHECK_FALSE(col_space_contains(FieldMatrix(2, 0, f), FieldVector({1, 0}, f)));
}

TEST_CASE("column space intersection") {
    Field f(7);
    SUBCASE("identical spaces") {
        FieldMatrix i2 = FieldMatrix::identity(2, f);
        CHECK(rank(col_space_intersect(i2, i2)) == 2);
    }
    SUBCASE("orthogonal lines meet trivially") {
        FieldMatrix a = from_rows({{1}, {0}}, f);
        FieldMatrix b = from_rows({{0}, {1}}, f);
        FieldMatrix meet = col_space_intersect(a, b);
        CHECK(meet.cols() == 0);
        CHECK(meet.rows() == 2);
    }
    SUBCASE("planted one-dimensional overlap") {
        // col(a) = span(u1, u2), col(b) = span(u1 + 2 u2 + u3, u3): the
        // overlap is exactly the line through u1 + 2 u2.
        FieldMatrix a = from_rows({{1, 0}, {0, 1}, {0, 0}}, f);
        FieldMatrix b = from_rows({{1, 0}, {2, 0}, {1, 1}}, f);
        FieldMatrix meet = col_space_intersect(a, b);
        REQUIRE(rank(meet) == 1);
        LineRep line = canonical_line(meet.col(0));
        CHECK(line.rep() == FieldVector({1, 2, 0}, f));
    }
}

TEST_CASE("dimension formula on random spaces") {
    Field f(13);
    Rng rng(11);
    for (int i = 0; i < 100; ++i) {
        FieldMatrix a = FieldMatrix::random(4, 1 + rng.below(4), f, rng);
        FieldMatrix b = FieldMatrix::random(4, 1 + rng.below(4), f, rng);
        std::size_t meet = rank(col_space_intersect(a, b));
        CHECK(rank(a) + rank(b) == rank(a.hstack(b)) + meet);
    }
}

TEST_CASE("vandermonde") {
    Field f(7);
    auto ids = [&](std::initializer_list<std::uint32_t> vs) {
        std::vector<FieldElement> out;
        for (auto v : vs) out.emplace_back(v, f);
        return out;
    };
    FieldMatrix m = vandermonde(ids({2, 3}), 2);
    CHECK(m == from_rows({{2, 3}, {4, 2}}, f));
    CHECK_NOTHROW(invert(m));
    CHECK_THROWS_AS(vandermonde(ids({2, 2}), 2), UsageError);
    CHECK_THROWS_AS(vandermonde(ids({0, 2}), 2), UsageError);
}

TEST_CASE("square vandermonde on distinct nonzero ids is invertible") {
    Field f(2147483647u);
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t k = 1 + rng.below(6);
        std::vector<FieldElement> ids;
        while (ids.size() < k) {
            FieldElement x = rng.sample_nonzero(f);
            bool dup = false;
            for (const auto& y : ids) dup = dup || y == x;
            if (!dup) ids.push_back(x);
        }
        CHECK_NOTHROW(invert(vandermonde(ids, k)));
    }
}

TEST_CASE("canonical line representative") {
    Field f(7);
    CHECK(canonical_line(FieldVector({0, 2}, f)).rep() == FieldVector({0, 1}, f));
    CHECK(canonical_line(FieldVector({3, 2}, f)).rep() == FieldVector({1, 3}, f));
    CHECK_THROWS_AS(canonical_line(FieldVector(2, f)), UsageError);
}

TEST_CASE("canonical line is scale invariant") {
    Field f(13);
    Rng rng(17);
    for (int i = 0; i < 100; ++i) {
        FieldVector v(4, f);
        while (v.is_zero()) {
            for (std::size_t j = 0; j < 4; ++j) v.set(j, rng.sample(f));
        }
        FieldElement alpha = rng.sample_nonzero(f);
        CHECK(canonical_line(v) == canonical_line(v.scaled(alpha)));
    }
}

TEST_CASE("solve") {
    Field f(7);
    FieldMatrix a = from_rows({{1, 2}, {3, 4}}, f);
    FieldVector b({5, 6}, f);
    auto x = solve(a, b);
    REQUIRE(x.has_value());
    CHECK(a * *x == b);
    // inconsistent system
    FieldMatrix s = from_rows({{1, 1}, {2, 2}}, f);
    CHECK_FALSE(solve(s, FieldVector({1, 1}, f)).has_value());
    CHECK(solve(s, FieldVector({1, 2}, f)).has_value());
}

TEST_CASE("independent columns returns original pivot columns") {
    Field f(7);
    FieldMatrix m = from_rows({{1, 2, 0}, {2, 4, 1}}, f);
    auto piv = independent_columns(m);
    REQUIRE(piv.size() == 2);
    CHECK(piv[0] == 0);
    CHECK(piv[1] == 2);
    FieldMatrix basis = col_space_basis(m);
    CHECK(basis.cols() == 2);
    CHECK(basis.col(0) == m.col(0));
}
