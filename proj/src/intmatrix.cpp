#include "weightlab/intmatrix.hpp"

#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wl {

IntMatrix IntMatrix::from(std::initializer_list<std::initializer_list<long>> rows,
                          Ring ring) {
    long r = long(rows.size());
    long c = r == 0 ? 0 : long(rows.begin()->size());
    IntMatrix m(r, c, ring);
    long i = 0;
    for (const auto& row : rows) {
        WL_REQUIRE(long(row.size()) == c, "IntMatrix::from: ragged rows");
        long j = 0;
        for (long v : row) m.set(i, j++, Int(v));
        ++i;
    }
    return m;
}

IntMatrix IntMatrix::identity(long n, Ring ring) {
    IntMatrix m(n, n, ring);
    for (long i = 0; i < n; ++i) m.set(i, i, 1);
    return m;
}

bool IntMatrix::is_zero() const {
    for (const Int& v : data_)
        if (v != 0) return false;
    return true;
}

bool IntMatrix::operator==(const IntMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && ring_ == o.ring_ && data_ == o.data_;
}

IntMatrix IntMatrix::transpose() const {
    IntMatrix t(cols_, rows_, ring_);
    for (long i = 0; i < rows_; ++i)
        for (long j = 0; j < cols_; ++j) t.set(j, i, at(i, j));
    return t;
}

IntMatrix IntMatrix::operator+(const IntMatrix& o) const {
    WL_REQUIRE(rows_ == o.rows_ && cols_ == o.cols_ && ring_ == o.ring_,
               "matrix +: shape/ring mismatch");
    IntMatrix r(rows_, cols_, ring_);
    for (long i = 0; i < rows_ * cols_; ++i)
        r.data_[size_t(i)] = ring_.reduce(data_[size_t(i)] + o.data_[size_t(i)]);
    return r;
}

IntMatrix IntMatrix::operator-(const IntMatrix& o) const { return *this + (-o); }

IntMatrix IntMatrix::operator-() const {
    IntMatrix r(rows_, cols_, ring_);
    for (long i = 0; i < rows_ * cols_; ++i)
        r.data_[size_t(i)] = ring_.reduce(-data_[size_t(i)]);
    return r;
}

IntMatrix IntMatrix::scaled(const Int& c) const {
    IntMatrix r(rows_, cols_, ring_);
    for (long i = 0; i < rows_ * cols_; ++i)
        r.data_[size_t(i)] = ring_.reduce(c * data_[size_t(i)]);
    return r;
}

IntMatrix IntMatrix::mul_serial(const IntMatrix& a, const IntMatrix& b) {
    WL_REQUIRE(a.cols_ == b.rows_ && a.ring_ == b.ring_, "matrix *: shape/ring mismatch");
    IntMatrix r(a.rows_, b.cols_, a.ring_);
    for (long i = 0; i < a.rows_; ++i)
        for (long k = 0; k < a.cols_; ++k) {
            const Int& aik = a.at(i, k);
            if (aik == 0) continue;
            for (long j = 0; j < b.cols_; ++j) {
                if (b.at(k, j) == 0) continue;
                r.data_[size_t(i * r.cols_ + j)] += aik * b.at(k, j);
            }
        }
    if (a.ring_.kind == Ring::Fp)
        for (Int& v : r.data_) v = a.ring_.reduce(std::move(v));
    return r;
}

IntMatrix IntMatrix::mul(const IntMatrix& a, const IntMatrix& b) {
    WL_REQUIRE(a.cols_ == b.rows_ && a.ring_ == b.ring_, "matrix *: shape/ring mismatch");
#ifdef _OPENMP
    /* Output rows are independent; parallelize when the work is worth a team. */
    if (a.rows_ >= 16 && a.cols_ * b.cols_ >= 1024) {
        IntMatrix r(a.rows_, b.cols_, a.ring_);
#pragma omp parallel for schedule(static)
        for (long i = 0; i < a.rows_; ++i) {
            for (long k = 0; k < a.cols_; ++k) {
                const Int& aik = a.at(i, k);
                if (aik == 0) continue;
                for (long j = 0; j < b.cols_; ++j) {
                    if (b.at(k, j) == 0) continue;
                    r.data_[size_t(i * r.cols_ + j)] += aik * b.at(k, j);
                }
            }
            if (a.ring_.kind == Ring::Fp)
                for (long j = 0; j < b.cols_; ++j)
                    r.data_[size_t(i * r.cols_ + j)] =
                        a.ring_.reduce(std::move(r.data_[size_t(i * r.cols_ + j)]));
        }
        return r;
    }
#endif
    return mul_serial(a, b);
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const { return mul(*this, o); }

IntMatrix IntMatrix::col(long j) const { return cols_slice(j, 1); }

IntMatrix IntMatrix::cols_slice(long j0, long n) const {
    WL_REQUIRE(j0 >= 0 && j0 + n <= cols_, "cols_slice: out of range");
    IntMatrix r(rows_, n, ring_);
    for (long i = 0; i < rows_; ++i)
        for (long j = 0; j < n; ++j) r.set(i, j, at(i, j0 + j));
    return r;
}

IntMatrix IntMatrix::hstack(const IntMatrix& a, const IntMatrix& b) {
    WL_REQUIRE(a.rows_ == b.rows_ && a.ring_ == b.ring_, "hstack: shape/ring mismatch");
    IntMatrix r(a.rows_, a.cols_ + b.cols_, a.ring_);
    r.paste(0, 0, a);
    r.paste(0, a.cols_, b);
    return r;
}

IntMatrix IntMatrix::vstack(const IntMatrix& a, const IntMatrix& b) {
    WL_REQUIRE(a.cols_ == b.cols_ && a.ring_ == b.ring_, "vstack: shape/ring mismatch");
    IntMatrix r(a.rows_ + b.rows_, a.cols_, a.ring_);
    r.paste(0, 0, a);
    r.paste(a.rows_, 0, b);
    return r;
}

IntMatrix IntMatrix::diag_sum(const IntMatrix& a, const IntMatrix& b) {
    WL_REQUIRE(a.ring_ == b.ring_, "diag_sum: ring mismatch");
    IntMatrix r(a.rows_ + b.rows_, a.cols_ + b.cols_, a.ring_);
    r.paste(0, 0, a);
    r.paste(a.rows_, a.cols_, b);
    return r;
}

void IntMatrix::paste(long i0, long j0, const IntMatrix& block) {
    WL_REQUIRE(i0 + block.rows_ <= rows_ && j0 + block.cols_ <= cols_, "paste: out of range");
    for (long i = 0; i < block.rows_; ++i)
        for (long j = 0; j < block.cols_; ++j) set(i0 + i, j0 + j, block.at(i, j));
}

void IntMatrix::swap_rows(long i, long j) {
    if (i == j) return;
    for (long c = 0; c < cols_; ++c)
        std::swap(data_[size_t(i * cols_ + c)], data_[size_t(j * cols_ + c)]);
}

void IntMatrix::swap_cols(long i, long j) {
    if (i == j) return;
    for (long r = 0; r < rows_; ++r)
        std::swap(data_[size_t(r * cols_ + i)], data_[size_t(r * cols_ + j)]);
}

void IntMatrix::add_row_multiple(long dst, long src, const Int& c) {
    for (long j = 0; j < cols_; ++j)
        data_[size_t(dst * cols_ + j)] =
            ring_.reduce(data_[size_t(dst * cols_ + j)] + c * at(src, j));
}

void IntMatrix::add_col_multiple(long dst, long src, const Int& c) {
    for (long i = 0; i < rows_; ++i)
        data_[size_t(i * cols_ + dst)] =
            ring_.reduce(data_[size_t(i * cols_ + dst)] + c * at(i, src));
}

void IntMatrix::scale_row(long i, const Int& c) {
    for (long j = 0; j < cols_; ++j)
        data_[size_t(i * cols_ + j)] = ring_.reduce(c * at(i, j));
}

void IntMatrix::scale_col(long j, const Int& c) {
    for (long i = 0; i < rows_; ++i)
        data_[size_t(i * cols_ + j)] = ring_.reduce(c * at(i, j));
}

Int IntMatrix::det() const {
    WL_REQUIRE(rows_ == cols_, "det: matrix not square");
    long n = rows_;
    if (n == 0) return 1;
    IntMatrix m = *this;
    if (ring_.kind == Ring::Fp) {
        Int d = 1;
        for (long c = 0; c < n; ++c) {
            long piv = -1;
            for (long r = c; r < n; ++r)
                if (m.at(r, c) != 0) { piv = r; break; }
            if (piv < 0) return 0;
            if (piv != c) { m.swap_rows(piv, c); d = ring_.reduce(-d); }
            Int inv = ring_.unit_inverse(m.at(c, c));
            d = ring_.reduce(d * m.at(c, c));
            for (long r = c + 1; r < n; ++r)
                if (m.at(r, c) != 0) m.add_row_multiple(r, c, ring_.reduce(-m.at(r, c) * inv));
        }
        return d;
    }
    /* Bareiss: division-free pivots stay exact over Z. */
    Int sign = 1, prev = 1;
    for (long k = 0; k < n - 1; ++k) {
        if (m.at(k, k) == 0) {
            long piv = -1;
            for (long r = k + 1; r < n; ++r)
                if (m.at(r, k) != 0) { piv = r; break; }
            if (piv < 0) return 0;
            m.swap_rows(k, piv);
            sign = -sign;
        }
        for (long i = k + 1; i < n; ++i)
            for (long j = k + 1; j < n; ++j) {
                Int v = m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j);
                mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
                m.set(i, j, v);
            }
        prev = m.at(k, k);
    }
    return sign * m.at(n - 1, n - 1);
}

std::string IntMatrix::to_string() const {
    std::ostringstream os;
    os << "[";
    for (long i = 0; i < rows_; ++i) {
        os << (i ? " [" : "[");
        for (long j = 0; j < cols_; ++j) os << (j ? "," : "") << at(i, j).get_str();
        os << "]";
    }
    os << "]";
    return os.str();
}

}  // namespace wl
