#ifndef NCT_MATRIX_HPP
#define NCT_MATRIX_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "nct/field.hpp"

namespace nct {

/// Dense vector over GF(q).
class FieldVector {
  public:
    FieldVector() : q_(Field::kDefaultModulus) {}
    FieldVector(std::size_t n, const Field& f) : v_(n, 0), q_(f.modulus()) {}
    FieldVector(std::vector<std::uint32_t> values, const Field& f);
    FieldVector(std::initializer_list<std::uint32_t> values, const Field& f)
        : FieldVector(std::vector<std::uint32_t>(values), f) {}

    std::size_t size() const { return v_.size(); }
    Field field() const { return Field(q_); }
    std::uint32_t modulus() const { return q_; }

    FieldElement operator[](std::size_t i) const;
    void set(std::size_t i, FieldElement x);

    bool is_zero() const;
    FieldVector operator+(const FieldVector& rhs) const;
    FieldVector operator-(const FieldVector& rhs) const;
    FieldVector scaled(FieldElement a) const;
    /// this += a * rhs
    void axpy(FieldElement a, const FieldVector& rhs);

    bool operator==(const FieldVector& rhs) const { return q_ == rhs.q_ && v_ == rhs.v_; }
    bool operator!=(const FieldVector& rhs) const { return !(*this == rhs); }

    const std::vector<std::uint32_t>& raw() const { return v_; }

  private:
    std::vector<std::uint32_t> v_;
    std::uint32_t q_;
};

/// Row-major dense matrix over GF(q). Value-semantic; all algebra is exact.
class FieldMatrix {
  public:
    FieldMatrix() : rows_(0), cols_(0), q_(Field::kDefaultModulus) {}
    FieldMatrix(std::size_t rows, std::size_t cols, const Field& f)
        : rows_(rows), cols_(cols), v_(rows * cols, 0), q_(f.modulus()) {}

    static FieldMatrix identity(std::size_t n, const Field& f);
    static FieldMatrix from_columns(const std::vector<FieldVector>& cols, const Field& f);
    static FieldMatrix from_rows(const std::vector<FieldVector>& rows, const Field& f);
    /// Matrix with entries drawn uniformly from rng.
    static FieldMatrix random(std::size_t rows, std::size_t cols, const Field& f, Rng& rng);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Field field() const { return Field(q_); }
    std::uint32_t modulus() const { return q_; }

    FieldElement at(std::size_t r, std::size_t c) const;
    void set(std::size_t r, std::size_t c, FieldElement x);

    FieldVector row(std::size_t r) const;
    FieldVector col(std::size_t c) const;
    void set_row(std::size_t r, const FieldVector& v);
    void set_col(std::size_t c, const FieldVector& v);

    FieldMatrix operator+(const FieldMatrix& rhs) const;
    FieldMatrix operator-(const FieldMatrix& rhs) const;
    FieldMatrix operator*(const FieldMatrix& rhs) const;
    FieldVector operator*(const FieldVector& x) const;
    FieldMatrix transposed() const;

    /// Columns [c0, c1) as a new matrix.
    FieldMatrix col_slice(std::size_t c0, std::size_t c1) const;
    FieldMatrix row_slice(std::size_t r0, std::size_t r1) const;
    /// [this | rhs]
    FieldMatrix hstack(const FieldMatrix& rhs) const;

    bool is_zero() const;
    bool operator==(const FieldMatrix& rhs) const;
    bool operator!=(const FieldMatrix& rhs) const { return !(*this == rhs); }

  private:
    std::size_t idx(std::size_t r, std::size_t c) const { return r * cols_ + c; }

    std::size_t rows_, cols_;
    std::vector<std::uint32_t> v_;
    std::uint32_t q_;
};

/// Canonical representative of a one-dimensional subspace: the spanning
/// vector scaled so its first nonzero coordinate is 1. Ordered, so it can
/// key sets and maps.
class LineRep {
  public:
    explicit LineRep(const FieldVector& v);

    const FieldVector& rep() const { return v_; }
    bool operator<(const LineRep& rhs) const;
    bool operator==(const LineRep& rhs) const { return v_ == rhs.v_; }

  private:
    FieldVector v_;
};

std::size_t rank(const FieldMatrix& m);

/// Inverse of a square matrix; throws SingularMatrixError.
FieldMatrix invert(const FieldMatrix& m);

/// One solution x of A x = b, or nullopt when inconsistent.
std::optional<FieldVector> solve(const FieldMatrix& a, const FieldVector& b);

/// True iff v lies in the column span of a.
bool col_space_contains(const FieldMatrix& a, const FieldVector& v);

/// Indices of a maximal set of linearly independent columns (pivot columns).
std::vector<std::size_t> independent_columns(const FieldMatrix& m);

/// Basis of the column space, as a matrix of (original) independent columns.
FieldMatrix col_space_basis(const FieldMatrix& m);

/// Basis of col(a) ∩ col(b), Zassenhaus-style elimination on stacked bases.
/// A zero-column matrix means the intersection is trivial.
FieldMatrix col_space_intersect(const FieldMatrix& a, const FieldMatrix& b);

/// Column j = [id_j, id_j^2, ..., id_j^depth]^T. Ids must be nonzero and
/// pairwise distinct.
FieldMatrix vandermonde(const std::vector<FieldElement>& ids, std::size_t depth);

LineRep canonical_line(const FieldVector& v);

} // namespace nct

#endif
