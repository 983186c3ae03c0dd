#include "nct/matrix.hpp"

#include <algorithm>
#include <string>

namespace nct {

namespace {

void check_fields(std::uint32_t a, std::uint32_t b, const char* what) {
    if (a != b) {
        throw UsageError(std::string(what) + ": mismatched moduli " + std::to_string(a) +
                         " vs " + std::to_string(b));
    }
}

// Row echelon elimination in place over raw residues. Returns pivot column
// per eliminated row. `reduce` additionally clears above pivots and
// normalizes them to 1.
std::vector<std::size_t> eliminate(std::vector<std::uint32_t>& m, std::size_t rows,
                                   std::size_t cols, std::uint64_t q, bool reduce) {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t pr = r;
        while (pr < rows && m[pr * cols + c] == 0) ++pr;
        if (pr == rows) continue;
        if (pr != r) {
            for (std::size_t j = c; j < cols; ++j) std::swap(m[pr * cols + j], m[r * cols + j]);
        }
        std::uint64_t pv = m[r * cols + c];
        FieldElement inv_p = FieldElement(pv, Field(static_cast<std::uint32_t>(q))).inv();
        std::uint64_t ip = inv_p.value();
        if (reduce) {
            for (std::size_t j = c; j < cols; ++j) {
                m[r * cols + j] = static_cast<std::uint32_t>(m[r * cols + j] * ip % q);
            }
        }
        std::size_t lo = reduce ? 0 : r + 1;
        for (std::size_t i = lo; i < rows; ++i) {
            if (i == r) continue;
            std::uint64_t f = m[i * cols + c];
            if (f == 0) continue;
            // row_i -= f * row_r / pivot   (pivot already 1 when reduced)
            std::uint64_t scale = reduce ? f : f * ip % q;
            for (std::size_t j = c; j < cols; ++j) {
                std::uint64_t sub = scale * m[r * cols + j] % q;
                m[i * cols + j] = static_cast<std::uint32_t>((m[i * cols + j] + q - sub) % q);
            }
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

} // namespace

FieldVector::FieldVector(std::vector<std::uint32_t> values, const Field& f)
    : v_(std::move(values)), q_(f.modulus()) {
    for (auto& x : v_) x %= q_;
}

FieldElement FieldVector::operator[](std::size_t i) const {
    return FieldElement(v_[i], q_, 0);
}

void FieldVector::set(std::size_t i, FieldElement x) {
    check_fields(q_, x.modulus(), "FieldVector::set");
    v_[i] = x.value();
}

bool FieldVector::is_zero() const {
    return std::all_of(v_.begin(), v_.end(), [](std::uint32_t x) { return x == 0; });
}

FieldVector FieldVector::operator+(const FieldVector& rhs) const {
    check_fields(q_, rhs.q_, "FieldVector::operator+");
    if (size() != rhs.size()) throw UsageError("vector size mismatch");
    FieldVector out(size(), Field(q_));
    for (std::size_t i = 0; i < size(); ++i) {
        std::uint64_t s = static_cast<std::uint64_t>(v_[i]) + rhs.v_[i];
        out.v_[i] = static_cast<std::uint32_t>(s >= q_ ? s - q_ : s);
    }
    return out;
}

FieldVector FieldVector::operator-(const FieldVector& rhs) const {
    check_fields(q_, rhs.q_, "FieldVector::operator-");
    if (size() != rhs.size()) throw UsageError("vector size mismatch");
    FieldVector out(size(), Field(q_));
    for (std::size_t i = 0; i < size(); ++i) {
        std::uint64_t s = static_cast<std::uint64_t>(v_[i]) + q_ - rhs.v_[i];
        out.v_[i] = static_cast<std::uint32_t>(s >= q_ ? s - q_ : s);
    }
    return out;
}

FieldVector FieldVector::scaled(FieldElement a) const {
    check_fields(q_, a.modulus(), "FieldVector::scaled");
    FieldVector out(size(), Field(q_));
    std::uint64_t f = a.value();
    for (std::size_t i = 0; i < size(); ++i) {
        out.v_[i] = static_cast<std::uint32_t>(f * v_[i] % q_);
    }
    return out;
}

void FieldVector::axpy(FieldElement a, const FieldVector& rhs) {
    check_fields(q_, a.modulus(), "FieldVector::axpy");
    check_fields(q_, rhs.q_, "FieldVector::axpy");
    if (size() != rhs.size()) throw UsageError("vector size mismatch");
    std::uint64_t f = a.value();
    if (f == 0) return;
    for (std::size_t i = 0; i < size(); ++i) {
        v_[i] = static_cast<std::uint32_t>((v_[i] + f * rhs.v_[i]) % q_);
    }
}

FieldMatrix FieldMatrix::identity(std::size_t n, const Field& f) {
    FieldMatrix m(n, n, f);
    for (std::size_t i = 0; i < n; ++i) m.v_[m.idx(i, i)] = 1;
    return m;
}

FieldMatrix FieldMatrix::from_columns(const std::vector<FieldVector>& cols, const Field& f) {
    std::size_t r = cols.empty() ? 0 : cols[0].size();
    FieldMatrix m(r, cols.size(), f);
    for (std::size_t c = 0; c < cols.size(); ++c) {
        check_fields(f.modulus(), cols[c].modulus(), "from_columns");
        if (cols[c].size() != r) throw UsageError("from_columns: ragged columns");
        for (std::size_t i = 0; i < r; ++i) m.v_[m.idx(i, c)] = cols[c].raw()[i];
    }
    return m;
}

FieldMatrix FieldMatrix::from_rows(const std::vector<FieldVector>& rows, const Field& f) {
    std::size_t c = rows.empty() ? 0 : rows[0].size();
    FieldMatrix m(rows.size(), c, f);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        check_fields(f.modulus(), rows[r].modulus(), "from_rows");
        if (rows[r].size() != c) throw UsageError("from_rows: ragged rows");
        for (std::size_t j = 0; j < c; ++j) m.v_[m.idx(r, j)] = rows[r].raw()[j];
    }
    return m;
}

FieldMatrix FieldMatrix::random(std::size_t rows, std::size_t cols, const Field& f, Rng& rng) {
    FieldMatrix m(rows, cols, f);
    for (auto& x : m.v_) x = static_cast<std::uint32_t>(rng.below(f.modulus()));
    return m;
}

FieldElement FieldMatrix::at(std::size_t r, std::size_t c) const {
    return FieldElement(v_[idx(r, c)], q_, 0);
}

void FieldMatrix::set(std::size_t r, std::size_t c, FieldElement x) {
    check_fields(q_, x.modulus(), "FieldMatrix::set");
    v_[idx(r, c)] = x.value();
}

FieldVector FieldMatrix::row(std::size_t r) const {
    FieldVector out(cols_, Field(q_));
    for (std::size_t j = 0; j < cols_; ++j) out.set(j, at(r, j));
    return out;
}

FieldVector FieldMatrix::col(std::size_t c) const {
    FieldVector out(rows_, Field(q_));
    for (std::size_t i = 0; i < rows_; ++i) out.set(i, at(i, c));
    return out;
}

void FieldMatrix::set_row(std::size_t r, const FieldVector& v) {
    check_fields(q_, v.modulus(), "set_row");
    if (v.size() != cols_) throw UsageError("set_row: size mismatch");
    for (std::size_t j = 0; j < cols_; ++j) v_[idx(r, j)] = v.raw()[j];
}

void FieldMatrix::set_col(std::size_t c, const FieldVector& v) {
    check_fields(q_, v.modulus(), "set_col");
    if (v.size() != rows_) throw UsageError("set_col: size mismatch");
    for (std::size_t i = 0; i < rows_; ++i) v_[idx(i, c)] = v.raw()[i];
}

FieldMatrix FieldMatrix::operator+(const FieldMatrix& rhs) const {
    check_fields(q_, rhs.q_, "FieldMatrix::operator+");
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw UsageError("matrix size mismatch");
    FieldMatrix out(rows_, cols_, Field(q_));
    for (std::size_t i = 0; i < v_.size(); ++i) {
        std::uint64_t s = static_cast<std::uint64_t>(v_[i]) + rhs.v_[i];
        out.v_[i] = static_cast<std::uint32_t>(s >= q_ ? s - q_ : s);
    }
    return out;
}

FieldMatrix FieldMatrix::operator-(const FieldMatrix& rhs) const {
    check_fields(q_, rhs.q_, "FieldMatrix::operator-");
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw UsageError("matrix size mismatch");
    FieldMatrix out(rows_, cols_, Field(q_));
    for (std::size_t i = 0; i < v_.size(); ++i) {
        std::uint64_t s = static_cast<std::uint64_t>(v_[i]) + q_ - rhs.v_[i];
        out.v_[i] = static_cast<std::uint32_t>(s >= q_ ? s - q_ : s);
    }
    return out;
}

FieldMatrix FieldMatrix::operator*(const FieldMatrix& rhs) const {
    check_fields(q_, rhs.q_, "FieldMatrix::operator*");
    if (cols_ != rhs.rows_) throw UsageError("matrix product: inner dimension mismatch");
    FieldMatrix out(rows_, rhs.cols_, Field(q_));
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t k = 0; k < cols_; ++k) {
            std::uint64_t a = v_[idx(i, k)];
            if (a == 0) continue;
            for (std::size_t j = 0; j < rhs.cols_; ++j) {
                std::uint64_t acc = out.v_[out.idx(i, j)] + a * rhs.v_[rhs.idx(k, j)] % q_;
                out.v_[out.idx(i, j)] = static_cast<std::uint32_t>(acc >= q_ ? acc - q_ : acc);
            }
        }
    }
    return out;
}

FieldVector FieldMatrix::operator*(const FieldVector& x) const {
    check_fields(q_, x.modulus(), "FieldMatrix::operator*(vec)");
    if (cols_ != x.size()) throw UsageError("matrix-vector product: dimension mismatch");
    FieldVector out(rows_, Field(q_));
    for (std::size_t i = 0; i < rows_; ++i) {
        std::uint64_t acc = 0;
        for (std::size_t j = 0; j < cols_; ++j) {
            acc = (acc + static_cast<std::uint64_t>(v_[idx(i, j)]) * x.raw()[j]) % q_;
        }
        out.set(i, FieldElement(acc, Field(q_)));
    }
    return out;
}

FieldMatrix FieldMatrix::transposed() const {
    FieldMatrix out(cols_, rows_, Field(q_));
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out.v_[out.idx(j, i)] = v_[idx(i, j)];
    return out;
}

FieldMatrix FieldMatrix::col_slice(std::size_t c0, std::size_t c1) const {
    if (c0 > c1 || c1 > cols_) throw UsageError("col_slice: bad range");
    FieldMatrix out(rows_, c1 - c0, Field(q_));
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = c0; j < c1; ++j) out.v_[out.idx(i, j - c0)] = v_[idx(i, j)];
    return out;
}

FieldMatrix FieldMatrix::row_slice(std::size_t r0, std::size_t r1) const {
    if (r0 > r1 || r1 > rows_) throw UsageError("row_slice: bad range");
    FieldMatrix out(r1 - r0, cols_, Field(q_));
    for (std::size_t i = r0; i < r1; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out.v_[out.idx(i - r0, j)] = v_[idx(i, j)];
    return out;
}

FieldMatrix FieldMatrix::hstack(const FieldMatrix& rhs) const {
    check_fields(q_, rhs.q_, "hstack");
    if (rows_ != rhs.rows_) throw UsageError("hstack: row count mismatch");
    FieldMatrix out(rows_, cols_ + rhs.cols_, Field(q_));
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) out.v_[out.idx(i, j)] = v_[idx(i, j)];
        for (std::size_t j = 0; j < rhs.cols_; ++j)
            out.v_[out.idx(i, cols_ + j)] = rhs.v_[rhs.idx(i, j)];
    }
    return out;
}

bool FieldMatrix::is_zero() const {
    return std::all_of(v_.begin(), v_.end(), [](std::uint32_t x) { return x == 0; });
}

bool FieldMatrix::operator==(const FieldMatrix& rhs) const {
    return rows_ == rhs.rows_ && cols_ == rhs.cols_ && q_ == rhs.q_ && v_ == rhs.v_;
}

LineRep::LineRep(const FieldVector& v) : v_(v) {}

bool LineRep::operator<(const LineRep& rhs) const {
    if (v_.size() != rhs.v_.size()) return v_.size() < rhs.v_.size();
    return v_.raw() < rhs.v_.raw();
}

std::size_t rank(const FieldMatrix& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    std::vector<std::uint32_t> work;
    work.reserve(m.rows() * m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) work.push_back(m.at(i, j).value());
    return eliminate(work, m.rows(), m.cols(), m.modulus(), false).size();
}

FieldMatrix invert(const FieldMatrix& m) {
    if (m.rows() != m.cols()) throw UsageError("invert: matrix not square");
    std::size_t n = m.rows();
    FieldMatrix aug = m.hstack(FieldMatrix::identity(n, m.field()));
    std::vector<std::uint32_t> work;
    work.reserve(n * 2 * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < 2 * n; ++j) work.push_back(aug.at(i, j).value());
    auto pivots = eliminate(work, n, 2 * n, m.modulus(), true);
    if (pivots.size() < n || pivots[n - 1] >= n) {
        throw SingularMatrixError("invert: singular matrix");
    }
    FieldMatrix out(n, n, m.field());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out.set(i, j, FieldElement(work[i * 2 * n + n + j], m.field()));
    return out;
}

std::optional<FieldVector> solve(const FieldMatrix& a, const FieldVector& b) {
    check_fields(a.modulus(), b.modulus(), "solve");
    if (a.rows() != b.size()) throw UsageError("solve: dimension mismatch");
    std::size_t rows = a.rows(), cols = a.cols();
    std::vector<std::uint32_t> work((cols + 1) * rows);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) work[i * (cols + 1) + j] = a.at(i, j).value();
        work[i * (cols + 1) + cols] = b.raw()[i];
    }
    auto pivots = eliminate(work, rows, cols + 1, a.modulus(), true);
    // Inconsistent iff some pivot lands in the augmented column.
    if (!pivots.empty() && pivots.back() == cols) return std::nullopt;
    FieldVector x(cols, a.field());
    for (std::size_t r = 0; r < pivots.size(); ++r) {
        x.set(pivots[r], FieldElement(work[r * (cols + 1) + cols], a.field()));
    }
    return x;
}

bool col_space_contains(const FieldMatrix& a, const FieldVector& v) {
    check_fields(a.modulus(), v.modulus(), "col_space_contains");
    if (a.rows() != v.size()) throw UsageError("col_space_contains: dimension mismatch");
    if (v.is_zero()) return true;
    if (a.cols() == 0) return false;
    FieldMatrix ext = a.hstack(FieldMatrix::from_columns({v}, a.field()));
    return rank(ext) == rank(a);
}

std::vector<std::size_t> independent_columns(const FieldMatrix& m) {
    if (m.rows() == 0 || m.cols() == 0) return {};
    std::vector<std::uint32_t> work;
    work.reserve(m.rows() * m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) work.push_back(m.at(i, j).value());
    return eliminate(work, m.rows(), m.cols(), m.modulus(), false);
}

FieldMatrix col_space_basis(const FieldMatrix& m) {
    auto piv = independent_columns(m);
    std::vector<FieldVector> cols;
    cols.reserve(piv.size());
    for (auto c : piv) cols.push_back(m.col(c));
    FieldMatrix out = FieldMatrix::from_columns(cols, m.field());
    if (piv.empty()) out = FieldMatrix(m.rows(), 0, m.field());
    return out;
}

FieldMatrix col_space_intersect(const FieldMatrix& a, const FieldMatrix& b) {
    check_fields(a.modulus(), b.modulus(), "col_space_intersect");
    if (a.rows() != b.rows()) throw UsageError("col_space_intersect: row count mismatch");
    std::size_t n = a.rows();
    const Field f = a.field();
    FieldMatrix ab = col_space_basis(a);
    FieldMatrix bb = col_space_basis(b);
    std::size_t ra = ab.cols(), rb = bb.cols();
    if (ra == 0 || rb == 0) return FieldMatrix(n, 0, f);
    // Zassenhaus on row spaces of the transposed bases: rows [u | u] for
    // col(a) generators, [w | 0] for col(b) generators. After elimination,
    // rows with zero left half carry intersection generators on the right.
    std::size_t rows = ra + rb, cols = 2 * n;
    std::vector<std::uint32_t> work(rows * cols, 0);
    for (std::size_t i = 0; i < ra; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            std::uint32_t x = ab.at(j, i).value();
            work[i * cols + j] = x;
            work[i * cols + n + j] = x;
        }
    }
    for (std::size_t i = 0; i < rb; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            work[(ra + i) * cols + j] = bb.at(j, i).value();
        }
    }
    eliminate(work, rows, cols, f.modulus(), false);
    std::vector<FieldVector> basis;
    for (std::size_t i = 0; i < rows; ++i) {
        bool left_zero = true;
        for (std::size_t j = 0; j < n && left_zero; ++j) left_zero = work[i * cols + j] == 0;
        if (!left_zero) continue;
        FieldVector v(n, f);
        bool nonzero = false;
        for (std::size_t j = 0; j < n; ++j) {
            v.set(j, FieldElement(work[i * cols + n + j], f));
            nonzero = nonzero || work[i * cols + n + j] != 0;
        }
        if (nonzero) basis.push_back(v);
    }
    if (basis.empty()) return FieldMatrix(n, 0, f);
    return FieldMatrix::from_columns(basis, f);
}

FieldMatrix vandermonde(const std::vector<FieldElement>& ids, std::size_t depth) {
    if (ids.empty()) throw UsageError("vandermonde: no ids");
    const Field f = ids[0].field();
    for (std::size_t i = 0; i < ids.size(); ++i) {
        check_fields(f.modulus(), ids[i].modulus(), "vandermonde");
        if (ids[i].is_zero()) throw UsageError("vandermonde: zero id");
        for (std::size_t j = i + 1; j < ids.size(); ++j) {
            if (ids[i] == ids[j]) throw UsageError("vandermonde: repeated id");
        }
    }
    FieldMatrix m(depth, ids.size(), f);
    for (std::size_t j = 0; j < ids.size(); ++j) {
        FieldElement p = ids[j];
        for (std::size_t i = 0; i < depth; ++i) {
            m.set(i, j, p);
            p = p * ids[j];
        }
    }
    return m;
}

LineRep canonical_line(const FieldVector& v) {
    if (v.is_zero()) throw UsageError("canonical_line: zero vector");
    std::size_t lead = 0;
    while (v[lead].is_zero()) ++lead;
    return LineRep(v.scaled(v[lead].inv()));
}

} // namespace nct
