#pragma once

#include <initializer_list>
#include <vector>

#include "weightlab/ring.hpp"

namespace wl {

/* Dense exact matrix over Z or F_p. Row-major; immutable by convention once
 * built (the algebra layer treats values as pure data). Degenerate shapes
 * (0 x n, n x 0) are first-class citizens: complexes routinely have empty
 * degrees. */
class IntMatrix {
  public:
    IntMatrix() : rows_(0), cols_(0), ring_(Ring::integers()) {}
    IntMatrix(long rows, long cols, Ring ring)
        : rows_(rows), cols_(cols), ring_(ring), data_(size_t(rows * cols)) {
        WL_REQUIRE(rows >= 0 && cols >= 0, "IntMatrix: negative dimension");
    }
    /* Rows given literally, e.g. IntMatrix::from({{2,4},{6,8}}, ring). */
    static IntMatrix from(std::initializer_list<std::initializer_list<long>> rows,
                          Ring ring);

    long rows() const { return rows_; }
    long cols() const { return cols_; }
    const Ring& ring() const { return ring_; }

    const Int& at(long i, long j) const { return data_[size_t(i * cols_ + j)]; }
    void set(long i, long j, Int v) { data_[size_t(i * cols_ + j)] = ring_.reduce(std::move(v)); }

    static IntMatrix identity(long n, Ring ring);
    static IntMatrix zero(long rows, long cols, Ring ring) { return IntMatrix(rows, cols, ring); }

    bool is_zero() const;
    bool operator==(const IntMatrix& o) const;
    bool operator!=(const IntMatrix& o) const { return !(*this == o); }

    IntMatrix transpose() const;
    IntMatrix operator+(const IntMatrix& o) const;
    IntMatrix operator-(const IntMatrix& o) const;
    IntMatrix operator-() const;
    IntMatrix operator*(const IntMatrix& o) const;
    IntMatrix scaled(const Int& c) const;

    /* Serial product kept as the reference implementation for the OpenMP
     * kernel (mul dispatches to it below the parallel threshold). */
    static IntMatrix mul_serial(const IntMatrix& a, const IntMatrix& b);
    static IntMatrix mul(const IntMatrix& a, const IntMatrix& b);

    IntMatrix col(long j) const;
    IntMatrix cols_slice(long j0, long n) const;
    /* [A | B] and [A ; B] */
    static IntMatrix hstack(const IntMatrix& a, const IntMatrix& b);
    static IntMatrix vstack(const IntMatrix& a, const IntMatrix& b);
    /* Block diagonal [A 0; 0 B]. */
    static IntMatrix diag_sum(const IntMatrix& a, const IntMatrix& b);

    void paste(long i0, long j0, const IntMatrix& block);

    /* Row/column elementary operations (used by the normal-form code). */
    void swap_rows(long i, long j);
    void swap_cols(long i, long j);
    void add_row_multiple(long dst, long src, const Int& c);   // row dst += c * row src
    void add_col_multiple(long dst, long src, const Int& c);   // col dst += c * col src
    void scale_row(long i, const Int& c);
    void scale_col(long j, const Int& c);

    /* Exact determinant (fraction-free Bareiss elimination over Z,
     * Gaussian elimination over F_p). */
    Int det() const;

    std::string to_string() const;

  private:
    long rows_, cols_;
    Ring ring_;
    std::vector<Int> data_;
};

}  // namespace wl
