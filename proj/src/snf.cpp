#include "weightlab/snf.hpp"

namespace wl {

namespace {

/* Elementary operations applied simultaneously to D and to the bookkeeping
 * pair (U, Uinv) resp. (V, Vinv), keeping U*M*V = D and the inverses exact. */
struct Work {
    IntMatrix D, U, Uinv, V, Vinv;

    explicit Work(const IntMatrix& m)
        : D(m),
          U(IntMatrix::identity(m.rows(), m.ring())),
          Uinv(IntMatrix::identity(m.rows(), m.ring())),
          V(IntMatrix::identity(m.cols(), m.ring())),
          Vinv(IntMatrix::identity(m.cols(), m.ring())) {}

    void row_swap(long i, long j) {
        D.swap_rows(i, j);
        U.swap_rows(i, j);
        Uinv.swap_cols(i, j);
    }
    void col_swap(long i, long j) {
        D.swap_cols(i, j);
        V.swap_cols(i, j);
        Vinv.swap_rows(i, j);
    }
    void row_add(long dst, long src, const Int& c) {  // row dst += c * row src
        D.add_row_multiple(dst, src, c);
        U.add_row_multiple(dst, src, c);
        Uinv.add_col_multiple(src, dst, D.ring().reduce(-c));
    }
    void col_add(long dst, long src, const Int& c) {  // col dst += c * col src
        D.add_col_multiple(dst, src, c);
        V.add_col_multiple(dst, src, c);
        Vinv.add_row_multiple(src, dst, D.ring().reduce(-c));
    }
    void row_scale_unit(long i, const Int& u) {  // u a unit
        D.scale_row(i, u);
        U.scale_row(i, u);
        Uinv.scale_col(i, D.ring().unit_inverse(u));
    }
};

/* (row, col) of a nonzero entry of smallest absolute value in D[s:, s:].
 * Minimal pivots keep coefficient growth tame over Z. */
bool locate_min_pivot(const IntMatrix& d, long s, long& pi, long& pj) {
    bool found = false;
    Int best;
    for (long i = s; i < d.rows(); ++i)
        for (long j = s; j < d.cols(); ++j) {
            const Int& v = d.at(i, j);
            if (v == 0) continue;
            Int a = abs(v);
            if (!found || a < best) {
                found = true;
                best = a;
                pi = i;
                pj = j;
            }
        }
    return found;
}

void smith_over_field(Work& w) {
    const Ring& ring = w.D.ring();
    long n = std::min(w.D.rows(), w.D.cols());
    for (long s = 0; s < n; ++s) {
        long pi, pj;
        if (!locate_min_pivot(w.D, s, pi, pj)) break;
        w.row_swap(s, pi);
        w.col_swap(s, pj);
        w.row_scale_unit(s, ring.unit_inverse(w.D.at(s, s)));
        for (long i = s + 1; i < w.D.rows(); ++i)
            if (w.D.at(i, s) != 0) w.row_add(i, s, ring.reduce(-w.D.at(i, s)));
        for (long j = s + 1; j < w.D.cols(); ++j)
            if (w.D.at(s, j) != 0) w.col_add(j, s, ring.reduce(-w.D.at(s, j)));
    }
}

void smith_over_z(Work& w) {
    long n = std::min(w.D.rows(), w.D.cols());
    for (long s = 0; s < n; ++s) {
        long pi, pj;
        if (!locate_min_pivot(w.D, s, pi, pj)) break;
        for (;;) {
            w.row_swap(s, pi);
            w.col_swap(s, pj);
            /* Kill the pivot's row and column by division with remainder;
             * leftovers are strictly smaller, so re-selecting terminates. */
            bool clean = true;
            for (long i = s + 1; i < w.D.rows(); ++i) {
                if (w.D.at(i, s) == 0) continue;
                Int q;
                mpz_fdiv_q(q.get_mpz_t(), w.D.at(i, s).get_mpz_t(), w.D.at(s, s).get_mpz_t());
                w.row_add(i, s, -q);
                if (w.D.at(i, s) != 0) clean = false;
            }
            for (long j = s + 1; j < w.D.cols(); ++j) {
                if (w.D.at(s, j) == 0) continue;
                Int q;
                mpz_fdiv_q(q.get_mpz_t(), w.D.at(s, j).get_mpz_t(), w.D.at(s, s).get_mpz_t());
                w.col_add(j, s, -q);
                if (w.D.at(s, j) != 0) clean = false;
            }
            if (!clean) {
                locate_min_pivot(w.D, s, pi, pj);
                continue;
            }
            /* Pivot must divide the remaining block for d_1 | d_2 | ... */
            bool divides = true;
            long bi = -1, bj = -1;
            for (long i = s + 1; i < w.D.rows() && divides; ++i)
                for (long j = s + 1; j < w.D.cols(); ++j)
                    if (w.D.at(i, j) % w.D.at(s, s) != 0) {
                        divides = false;
                        bi = i;
                        bj = j;
                        break;
                    }
            if (divides) break;
            w.row_add(s, bi, 1);  /* drags the offending entry into row s */
            locate_min_pivot(w.D, s, pi, pj);
        }
        if (w.D.at(s, s) < 0) w.row_scale_unit(s, Int(-1));
    }
}

}  // namespace

std::vector<Int> SmithForm::invariant_factors() const {
    std::vector<Int> f;
    long n = std::min(D.rows(), D.cols());
    for (long i = 0; i < n; ++i)
        if (D.at(i, i) != 0) f.push_back(D.at(i, i));
    return f;
}

SmithForm smith_normal_form(const IntMatrix& m) {
    Work w(m);
    if (m.ring().is_field())
        smith_over_field(w);
    else
        smith_over_z(w);
    SmithForm f{std::move(w.U), std::move(w.Uinv), std::move(w.D),
                std::move(w.V), std::move(w.Vinv), 0};
    long n = std::min(f.D.rows(), f.D.cols());
    for (long i = 0; i < n; ++i)
        if (f.D.at(i, i) != 0) ++f.rank;
    return f;
}

long rank(const IntMatrix& m) { return smith_normal_form(m).rank; }

IntMatrix kernel_basis(const IntMatrix& m) {
    SmithForm f = smith_normal_form(m);
    return f.V.cols_slice(f.rank, m.cols() - f.rank);
}

IntMatrix left_kernel_basis(const IntMatrix& m) {
    return kernel_basis(m.transpose()).transpose();
}

std::optional<IntMatrix> solve_linear(const IntMatrix& m, const IntMatrix& b) {
    WL_REQUIRE(m.rows() == b.rows() && m.ring() == b.ring(),
               "solve_linear: dimension or ring mismatch");
    SmithForm f = smith_normal_form(m);
    IntMatrix ub = IntMatrix::mul(f.U, b);
    IntMatrix y(m.cols(), b.cols(), m.ring());
    for (long c = 0; c < b.cols(); ++c) {
        for (long i = 0; i < m.rows(); ++i) {
            const Int& rhs = ub.at(i, c);
            if (i < f.rank) {
                if (m.ring().is_field()) {
                    y.set(i, c, m.ring().reduce(rhs * m.ring().unit_inverse(f.D.at(i, i))));
                } else {
                    if (rhs % f.D.at(i, i) != 0) return std::nullopt;
                    y.set(i, c, rhs / f.D.at(i, i));
                }
            } else if (rhs != 0) {
                return std::nullopt;
            }
        }
    }
    return IntMatrix::mul(f.V, y);
}

}  // namespace wl
