#include "weightlab/complex.hpp"

#include <sstream>

namespace wl {

Complex::Complex(Ring ring, long lo, std::vector<long> ranks, std::vector<IntMatrix> diffs)
    : ring_(ring), lo_(lo), ranks_(std::move(ranks)), diffs_(std::move(diffs)) {
    if (!ranks_.empty() && diffs_.size() + 1 == ranks_.size())
        ;  // differentials between consecutive stored degrees
    else
        WL_REQUIRE(ranks_.empty() && diffs_.empty(),
                   "Complex: need one differential between consecutive degrees");
    validate();
    normalize();
}

Complex Complex::free_module(Ring ring, long degree, long rank) {
    if (rank == 0) return zero(ring);
    return Complex(ring, degree, {rank}, {});
}

Complex Complex::two_term(Ring ring, long degree, IntMatrix m) {
    if (m.rows() == 0) return free_module(ring, degree, m.cols());
    if (m.cols() == 0) return free_module(ring, degree + 1, m.rows());
    std::vector<long> ranks{m.cols(), m.rows()};
    return Complex(ring, degree, std::move(ranks), {std::move(m)});
}

void Complex::validate() const {
    for (size_t i = 0; i < diffs_.size(); ++i) {
        WL_REQUIRE(diffs_[i].ring() == ring_, "Complex: differential ring mismatch");
        WL_REQUIRE(diffs_[i].rows() == ranks_[i + 1] && diffs_[i].cols() == ranks_[i],
                   "Complex: differential shape mismatch at degree " +
                       std::to_string(lo_ + long(i)));
    }
    for (size_t i = 0; i + 1 < diffs_.size(); ++i)
        WL_REQUIRE(IntMatrix::mul(diffs_[i + 1], diffs_[i]).is_zero(),
                   "Complex: d o d != 0 at degree " + std::to_string(lo_ + long(i)));
}

void Complex::normalize() {
    while (!ranks_.empty() && ranks_.front() == 0) {
        ranks_.erase(ranks_.begin());
        if (!diffs_.empty()) diffs_.erase(diffs_.begin());
        ++lo_;
    }
    while (!ranks_.empty() && ranks_.back() == 0) {
        ranks_.pop_back();
        if (!diffs_.empty()) diffs_.pop_back();
    }
    if (ranks_.empty()) {
        lo_ = 0;
        diffs_.clear();
    }
}

long Complex::rank(long degree) const {
    if (degree < lo_ || degree > hi()) return 0;
    return ranks_[size_t(degree - lo_)];
}

long Complex::total_rank() const {
    long t = 0;
    for (long r : ranks_) t += r;
    return t;
}

IntMatrix Complex::diff(long degree) const {
    if (degree >= lo_ && degree < hi()) return diffs_[size_t(degree - lo_)];
    return IntMatrix(rank(degree + 1), rank(degree), ring_);
}

Subquotient Complex::homology_data(long degree) const {
    Presentation ambient = Presentation::free(rank(degree), ring_);
    IntMatrix cycles = kernel_basis(diff(degree));
    return make_subquotient(std::move(ambient), std::move(cycles), diff(degree - 1));
}

AbGroup Complex::homology(long degree) const { return homology_data(degree).canonical(); }

bool Complex::is_exact_everywhere() const {
    for (long d = lo(); d <= hi(); ++d)
        if (!homology(d).is_trivial()) return false;
    return true;
}

bool Complex::operator==(const Complex& o) const {
    return ring_ == o.ring_ && lo_ == o.lo_ && ranks_ == o.ranks_ && diffs_ == o.diffs_;
}

std::string Complex::to_string() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    os << ring_.name() << " complex [" << lo() << "," << hi() << "] ranks(";
    for (size_t i = 0; i < ranks_.size(); ++i) os << (i ? "," : "") << ranks_[i];
    os << ")";
    return os.str();
}

std::string Complex::fingerprint() const {
    std::ostringstream os;
    os << ring_.name() << "|" << lo_ << "|";
    for (long r : ranks_) os << r << ",";
    os << "|";
    for (const IntMatrix& d : diffs_) os << d.to_string() << ";";
    return os.str();
}

ChainMap::ChainMap(Complex src, Complex tgt, long clo, std::vector<IntMatrix> comps,
                   bool check)
    : src_(std::move(src)), tgt_(std::move(tgt)), clo_(clo), comps_(std::move(comps)) {
    WL_REQUIRE(src_.ring() == tgt_.ring(), "ChainMap: ring mismatch");
    for (size_t i = 0; i < comps_.size(); ++i) {
        long d = clo_ + long(i);
        WL_REQUIRE(comps_[i].rows() == tgt_.rank(d) && comps_[i].cols() == src_.rank(d),
                   "ChainMap: component shape mismatch at degree " + std::to_string(d));
    }
    if (check) {
        long lo = std::min(src_.lo(), tgt_.lo()) - 1;
        long hi = std::max(src_.hi(), tgt_.hi());
        for (long d = lo; d <= hi; ++d)
            WL_REQUIRE(IntMatrix::mul(tgt_.diff(d), comp(d)) ==
                           IntMatrix::mul(comp(d + 1), src_.diff(d)),
                       "ChainMap: does not commute with differentials at degree " +
                           std::to_string(d));
    }
}

ChainMap ChainMap::zero(Complex src, Complex tgt) {
    return ChainMap(std::move(src), std::move(tgt), 0, {}, false);
}

ChainMap ChainMap::identity(const Complex& x) {
    std::vector<IntMatrix> comps;
    for (long d = x.lo(); d <= x.hi(); ++d)
        comps.push_back(IntMatrix::identity(x.rank(d), x.ring()));
    return ChainMap(x, x, x.lo(), std::move(comps), false);
}

IntMatrix ChainMap::comp(long degree) const {
    long i = degree - clo_;
    if (i >= 0 && i < long(comps_.size())) return comps_[size_t(i)];
    return IntMatrix(tgt_.rank(degree), src_.rank(degree), src_.ring());
}

ChainMap ChainMap::compose_after(const ChainMap& first) const {
    return ChainMap::build(
        first.src(), tgt(),
        [&](long d) { return IntMatrix::mul(comp(d), first.comp(d)); }, false);
}

ChainMap ChainMap::operator+(const ChainMap& o) const {
    return ChainMap::build(
        src_, tgt_, [&](long d) { return comp(d) + o.comp(d); }, false);
}

ChainMap ChainMap::operator-() const {
    return ChainMap::build(src_, tgt_, [&](long d) { return -comp(d); }, false);
}

ChainMap ChainMap::scaled(const Int& c) const {
    return ChainMap::build(src_, tgt_, [&](long d) { return comp(d).scaled(c); }, false);
}

bool ChainMap::is_zero_map() const {
    for (long d = std::min(src_.lo(), tgt_.lo()); d <= std::max(src_.hi(), tgt_.hi()); ++d)
        if (!comp(d).is_zero()) return false;
    return true;
}

Complex shift(const Complex& x, long n) {
    if (x.is_zero()) return x;
    std::vector<long> ranks;
    std::vector<IntMatrix> diffs;
    for (long d = x.lo(); d <= x.hi(); ++d) ranks.push_back(x.rank(d));
    Int sign = (n % 2 == 0) ? 1 : -1;
    for (long d = x.lo(); d < x.hi(); ++d) diffs.push_back(x.diff(d).scaled(sign));
    return Complex(x.ring(), x.lo() - n, std::move(ranks), std::move(diffs));
}

ChainMap shift(const ChainMap& f, long n) {
    Complex s = shift(f.src(), n);
    Complex t = shift(f.tgt(), n);
    return ChainMap::build(
        s, t, [&](long d) { return f.comp(d + n); }, false);
}

Triangle rotate(const Triangle& t) {
    /* (A,B,C,f,g,h) -> (B, C, A[1], g, h, -f[1]). */
    return Triangle{t.b, t.c, shift(t.a, 1), t.g, t.h, -shift(t.f, 1)};
}

ConeData cone(const ChainMap& f) {
    const Complex& x = f.src();
    const Complex& y = f.tgt();
    Ring ring = x.ring();
    long lo = std::min(x.lo() - 1, y.lo());
    long hi = std::max(x.hi() - 1, y.hi());
    if (x.is_zero() && y.is_zero()) {
        Complex c = Complex::zero(ring);
        Triangle t{x, y, c, f, ChainMap::zero(y, c), ChainMap::zero(c, shift(x, 1))};
        return ConeData{c, t};
    }
    std::vector<long> ranks;
    std::vector<IntMatrix> diffs;
    for (long d = lo; d <= hi; ++d) ranks.push_back(x.rank(d + 1) + y.rank(d));
    for (long d = lo; d < hi; ++d) {
        IntMatrix m(x.rank(d + 2) + y.rank(d + 1), x.rank(d + 1) + y.rank(d), ring);
        m.paste(0, 0, -x.diff(d + 1));
        m.paste(x.rank(d + 2), 0, f.comp(d + 1));
        m.paste(x.rank(d + 2), x.rank(d + 1), y.diff(d));
        diffs.push_back(std::move(m));
    }
    Complex c(ring, lo, std::move(ranks), std::move(diffs));
    ChainMap incl = ChainMap::build(
        y, c,
        [&](long d) {
            IntMatrix m(c.rank(d), y.rank(d), ring);
            if (c.rank(d) == x.rank(d + 1) + y.rank(d))  // degree inside cone support
                m.paste(x.rank(d + 1), 0, IntMatrix::identity(y.rank(d), ring));
            return m;
        },
        false);
    Complex x1 = shift(x, 1);
    ChainMap proj = ChainMap::build(
        c, x1,
        [&](long d) {
            IntMatrix m(x.rank(d + 1), c.rank(d), ring);
            if (c.rank(d) == x.rank(d + 1) + y.rank(d))
                m.paste(0, 0, IntMatrix::identity(x.rank(d + 1), ring));
            return m;
        },
        false);
    Triangle t{x, y, c, f, incl, proj};
    return ConeData{c, t};
}

SumData direct_sum(const Complex& x, const Complex& y) {
    WL_REQUIRE(x.ring() == y.ring(), "direct_sum: ring mismatch");
    Ring ring = x.ring();
    long lo = std::min(x.lo(), y.lo());
    long hi = std::max(x.hi(), y.hi());
    if (x.is_zero()) { lo = y.lo(); hi = y.hi(); }
    if (y.is_zero()) { lo = x.lo(); hi = x.hi(); }
    std::vector<long> ranks;
    std::vector<IntMatrix> diffs;
    for (long d = lo; d <= hi; ++d) ranks.push_back(x.rank(d) + y.rank(d));
    for (long d = lo; d < hi; ++d) diffs.push_back(IntMatrix::diag_sum(x.diff(d), y.diff(d)));
    Complex s = (x.is_zero() && y.is_zero())
                    ? Complex::zero(ring)
                    : Complex(ring, lo, std::move(ranks), std::move(diffs));
    auto inj = [&](const Complex& part, bool left) {
        return ChainMap::build(
            part, s,
            [&](long d) {
                IntMatrix m(s.rank(d), part.rank(d), ring);
                m.paste(left ? 0 : x.rank(d), 0, IntMatrix::identity(part.rank(d), ring));
                return m;
            },
            false);
    };
    auto proj = [&](const Complex& part, bool left) {
        return ChainMap::build(
            s, part,
            [&](long d) {
                IntMatrix m(part.rank(d), s.rank(d), ring);
                m.paste(0, left ? 0 : x.rank(d), IntMatrix::identity(part.rank(d), ring));
                return m;
            },
            false);
    };
    return SumData{s, inj(x, true), inj(y, false), proj(x, true), proj(y, false)};
}

namespace {

/* One Gaussian cancellation of the unit entry (r, c) of d(deg); returns the
 * smaller complex with the two retract maps. */
struct ReductionStep {
    Complex smaller;
    ChainMap to, from;
};

ReductionStep cancel_unit(const Complex& x, long deg, long r, long c) {
    Ring ring = x.ring();
    Int u = x.diff(deg).at(r, c);
    Int uinv = ring.unit_inverse(u);
    IntMatrix d = x.diff(deg);

    std::vector<long> ranks;
    std::vector<IntMatrix> diffs;
    for (long dd = x.lo(); dd <= x.hi(); ++dd) {
        long rr = x.rank(dd);
        if (dd == deg || dd == deg + 1) --rr;
        ranks.push_back(rr);
    }
    auto drop_row = [&](const IntMatrix& m, long row) {
        IntMatrix out(m.rows() - 1, m.cols(), ring);
        for (long i = 0, oi = 0; i < m.rows(); ++i) {
            if (i == row) continue;
            for (long j = 0; j < m.cols(); ++j) out.set(oi, j, m.at(i, j));
            ++oi;
        }
        return out;
    };
    auto drop_col = [&](const IntMatrix& m, long col) {
        IntMatrix out(m.rows(), m.cols() - 1, ring);
        for (long j = 0, oj = 0; j < m.cols(); ++j) {
            if (j == col) continue;
            for (long i = 0; i < m.rows(); ++i) out.set(i, oj, m.at(i, j));
            ++oj;
        }
        return out;
    };
    for (long dd = x.lo(); dd < x.hi(); ++dd) {
        if (dd == deg - 1) {
            diffs.push_back(drop_row(x.diff(dd), c));
        } else if (dd == deg) {
            /* d'_{r'c'} = d_{r'c'} - d_{r'c} u^{-1} d_{rc'} */
            IntMatrix nd(x.rank(deg + 1) - 1, x.rank(deg) - 1, ring);
            for (long i = 0, oi = 0; i < d.rows(); ++i) {
                if (i == r) continue;
                for (long j = 0, oj = 0; j < d.cols(); ++j) {
                    if (j == c) continue;
                    nd.set(oi, oj, ring.reduce(d.at(i, j) - d.at(i, c) * uinv * d.at(r, j)));
                    ++oj;
                }
                ++oi;
            }
            diffs.push_back(std::move(nd));
        } else if (dd == deg + 1) {
            diffs.push_back(drop_col(x.diff(dd), r));
        } else {
            diffs.push_back(x.diff(dd));
        }
    }
    Complex smaller(ring, x.lo(), std::move(ranks), std::move(diffs));

    ChainMap to = ChainMap::build(
        x, smaller,
        [&](long dd) {
            IntMatrix m(smaller.rank(dd), x.rank(dd), ring);
            if (dd == deg) {
                for (long j = 0, oj = 0; j < x.rank(dd); ++j) {
                    if (j == c) continue;
                    m.set(oj++, j, 1);
                }
            } else if (dd == deg + 1) {
                /* e_b -> e_b for b != r, e_r -> -u^{-1} * (column of d at c) off r */
                for (long i = 0, oi = 0; i < x.rank(dd); ++i) {
                    if (i == r) continue;
                    m.set(oi, i, 1);
                    m.set(oi, r, ring.reduce(-uinv * d.at(i, c)));
                    ++oi;
                }
            } else {
                m = IntMatrix::identity(x.rank(dd), ring);
            }
            return m;
        },
        false);
    ChainMap from = ChainMap::build(
        smaller, x,
        [&](long dd) {
            IntMatrix m(x.rank(dd), smaller.rank(dd), ring);
            if (dd == deg) {
                for (long j = 0, oj = 0; j < x.rank(dd); ++j) {
                    if (j == c) continue;
                    m.set(j, oj, 1);
                    m.set(c, oj, ring.reduce(-uinv * d.at(r, j)));
                    ++oj;
                }
            } else if (dd == deg + 1) {
                for (long i = 0, oi = 0; i < x.rank(dd); ++i) {
                    if (i == r) continue;
                    m.set(i, oi++, 1);
                }
            } else {
                m = IntMatrix::identity(x.rank(dd), ring);
            }
            return m;
        },
        false);
    return ReductionStep{smaller, to, from};
}

/* Change bases at (deg, deg+1) so the differential becomes its Smith form;
 * exposes a literal unit entry when the form has unit invariant factors. */
Complex apply_smith_basis(const Complex& x, long deg, const SmithForm& f,
                          ChainMap& to_acc, ChainMap& from_acc) {
    Ring ring = x.ring();
    std::vector<long> ranks;
    std::vector<IntMatrix> diffs;
    for (long dd = x.lo(); dd <= x.hi(); ++dd) ranks.push_back(x.rank(dd));
    for (long dd = x.lo(); dd < x.hi(); ++dd) {
        if (dd == deg - 1)
            diffs.push_back(IntMatrix::mul(f.Vinv, x.diff(dd)));
        else if (dd == deg)
            diffs.push_back(f.D);
        else if (dd == deg + 1)
            diffs.push_back(IntMatrix::mul(x.diff(dd), f.Uinv));
        else
            diffs.push_back(x.diff(dd));
    }
    Complex y(ring, x.lo(), std::move(ranks), std::move(diffs));
    ChainMap to = ChainMap::build(
        x, y,
        [&](long dd) {
            if (dd == deg) return f.Vinv;
            if (dd == deg + 1) return f.U;
            return IntMatrix::identity(x.rank(dd), ring);
        },
        false);
    ChainMap from = ChainMap::build(
        y, x,
        [&](long dd) {
            if (dd == deg) return f.V;
            if (dd == deg + 1) return f.Uinv;
            return IntMatrix::identity(x.rank(dd), ring);
        },
        false);
    to_acc = to.compose_after(to_acc);
    from_acc = from_acc.compose_after(from);
    return y;
}

}  // namespace

MinimalModel minimal_model(const Complex& x) {
    Complex cur = x;
    ChainMap to = ChainMap::identity(x);
    ChainMap from = ChainMap::identity(x);
    for (;;) {
        bool reduced = false;
        for (long d = cur.lo(); d < cur.hi() && !reduced; ++d) {
            IntMatrix m = cur.diff(d);
            for (long i = 0; i < m.rows() && !reduced; ++i)
                for (long j = 0; j < m.cols(); ++j)
                    if (cur.ring().is_unit(m.at(i, j))) {
                        ReductionStep step = cancel_unit(cur, d, i, j);
                        to = step.to.compose_after(to);
                        from = from.compose_after(step.from);
                        cur = step.smaller;
                        reduced = true;
                        break;
                    }
        }
        if (reduced) continue;
        /* No literal unit entry; a unit invariant factor can still hide in a
         * differential over Z (e.g. [2 3]). Expose it by a basis change. */
        for (long d = cur.lo(); d < cur.hi() && !reduced; ++d) {
            if (cur.diff(d).is_zero()) continue;
            SmithForm f = smith_normal_form(cur.diff(d));
            if (f.rank > 0 && cur.ring().is_unit(f.D.at(0, 0))) {
                cur = apply_smith_basis(cur, d, f, to, from);
                reduced = true;
            }
        }
        if (!reduced) break;
    }
    return MinimalModel{cur, to, from};
}

bool homotopy_equivalent(const Complex& x, const Complex& y) {
    long lo = std::min(x.lo(), y.lo());
    long hi = std::max(x.hi(), y.hi());
    for (long d = lo; d <= hi; ++d)
        if (x.homology(d) != y.homology(d)) return false;
    return true;
}

}  // namespace wl
