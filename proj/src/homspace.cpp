#include "weightlab/homspace.hpp"

namespace wl {

HomSpace::HomSpace(Complex x, Complex y) : x_(std::move(x)), y_(std::move(y)) {
    if (x_.is_zero() || y_.is_zero()) {
        nlo_ = 0;
        nhi_ = -1;
    } else {
        nlo_ = y_.lo() - x_.hi();
        nhi_ = y_.hi() - x_.lo();
    }
}

long HomSpace::dim(long n) const {
    long d = 0;
    for (long j = x_.lo(); j <= x_.hi(); ++j) d += x_.rank(j) * y_.rank(n + j);
    return d;
}

long HomSpace::block_offset(long n, long j) const {
    long off = 0;
    for (long jj = x_.lo(); jj < j; ++jj) off += x_.rank(jj) * y_.rank(n + jj);
    return off;
}

IntMatrix HomSpace::flatten(long n, const std::function<IntMatrix(long)>& comp_at) const {
    IntMatrix v(dim(n), 1, x_.ring());
    for (long j = x_.lo(); j <= x_.hi(); ++j) {
        long rx = x_.rank(j), ry = y_.rank(n + j);
        if (rx == 0 || ry == 0) continue;
        IntMatrix m = comp_at(j);
        WL_REQUIRE(m.rows() == ry && m.cols() == rx, "HomSpace::flatten: bad block shape");
        long off = block_offset(n, j);
        for (long b = 0; b < rx; ++b)
            for (long a = 0; a < ry; ++a) v.set(off + b * ry + a, 0, m.at(a, b));
    }
    return v;
}

IntMatrix HomSpace::flatten_map(const ChainMap& f, long q) const {
    return flatten(q, [&](long j) { return f.comp(j); });
}

ChainMap HomSpace::unflatten(long q, const IntMatrix& v) const {
    WL_REQUIRE(v.rows() == dim(q) && v.cols() == 1, "HomSpace::unflatten: bad vector");
    Complex yq = shift(y_, q);
    return ChainMap::build(
        x_, yq,
        [&](long j) {
            long rx = x_.rank(j), ry = y_.rank(q + j);
            IntMatrix m(ry, rx, x_.ring());
            if (rx && ry) {
                long off = block_offset(q, j);
                for (long b = 0; b < rx; ++b)
                    for (long a = 0; a < ry; ++a) m.set(a, b, v.at(off + b * ry + a, 0));
            }
            return m;
        },
        false);
}

IntMatrix HomSpace::delta(long n) const {
    /* delta(f)_j = d_Y o f_j - (-1)^n f_{j+1} o d_X */
    IntMatrix m(dim(n + 1), dim(n), x_.ring());
    bool odd = ((n % 2) + 2) % 2 == 1;
    Int s = odd ? 1 : -1;  // the -(-1)^n factor
    for (long j = x_.lo(); j <= x_.hi(); ++j) {
        long rx = x_.rank(j), ry = y_.rank(n + j);
        if (rx == 0 || ry == 0) continue;
        long off_in = block_offset(n, j);
        IntMatrix dy = y_.diff(n + j);
        long off_dy = block_offset(n + 1, j);
        for (long b = 0; b < rx; ++b)
            for (long a = 0; a < ry; ++a) {
                long col = off_in + b * ry + a;
                /* d_Y o E_ab lands in block j of degree n+1 */
                for (long r = 0; r < dy.rows(); ++r)
                    if (dy.at(r, a) != 0)
                        m.set(off_dy + b * dy.rows() + r, col,
                              m.at(off_dy + b * dy.rows() + r, col) + dy.at(r, a));
                /* -(-1)^n E_ab o d_X^{j-1} lands in block j-1 of degree n+1 */
                IntMatrix dx = x_.diff(j - 1);
                long off_prev = block_offset(n + 1, j - 1);
                for (long c = 0; c < dx.cols(); ++c)
                    if (dx.at(b, c) != 0)
                        m.set(off_prev + c * ry + a, col,
                              m.at(off_prev + c * ry + a, col) +
                                  x_.ring().reduce(s * dx.at(b, c)));
            }
    }
    return m;
}

ChainMap HomGroup::rep(const IntMatrix& coords) const {
    return space.unflatten(q, sq.lift(coords));
}

IntMatrix HomGroup::class_of(const ChainMap& f) const {
    return sq.classify(space.flatten_map(f, q));
}

bool HomGroup::same_class(const ChainMap& f, const ChainMap& g) const {
    IntMatrix d = class_of(f) - class_of(g);
    return sq.group.contains(sq.group.rels, d);
}

HomGroup homotopy_classes_data(const Complex& x, const Complex& y, long q) {
    HomSpace sp(x, y);
    Presentation ambient = Presentation::free(sp.dim(q), x.ring());
    IntMatrix cycles = kernel_basis(sp.delta(q));
    Subquotient sq = make_subquotient(std::move(ambient), std::move(cycles), sp.delta(q - 1));
    AbGroup canon = sq.canonical();
    return HomGroup{std::move(sp), q, std::move(sq), std::move(canon)};
}

AbGroup homotopy_classes(const Complex& x, const Complex& y, long q) {
    return homotopy_classes_data(x, y, q).canon;
}

std::optional<std::vector<IntMatrix>> null_homotopy_witness(const ChainMap& f) {
    HomSpace sp(f.src(), f.tgt());
    auto sol = solve_linear(sp.delta(-1), sp.flatten_map(f, 0));
    if (!sol) return std::nullopt;
    std::vector<IntMatrix> h;
    for (long j = f.src().lo(); j <= f.src().hi(); ++j) {
        long rx = f.src().rank(j), ry = f.tgt().rank(j - 1);
        IntMatrix m(ry, rx, f.src().ring());
        long off = sp.block_offset(-1, j);
        for (long b = 0; b < rx; ++b)
            for (long a = 0; a < ry; ++a) m.set(a, b, sol->at(off + b * ry + a, 0));
        h.push_back(std::move(m));
    }
    return h;
}

bool is_null_homotopic(const ChainMap& f) { return null_homotopy_witness(f).has_value(); }

bool homotopic(const ChainMap& f, const ChainMap& g) { return is_null_homotopic(f - g); }

namespace {

GroupMap induced_from_linear(const HomGroup& src, const HomGroup& tgt,
                             const std::function<ChainMap(const ChainMap&)>& apply) {
    IntMatrix m(tgt.sq.group.gens, src.sq.group.gens, src.sq.sub.ring());
    for (long g = 0; g < src.sq.group.gens; ++g) {
        IntMatrix e(src.sq.group.gens, 1, src.sq.sub.ring());
        e.set(g, 0, 1);
        ChainMap image = apply(src.rep(e));
        IntMatrix coords = tgt.class_of(image);
        for (long i = 0; i < m.rows(); ++i) m.set(i, g, coords.at(i, 0));
    }
    return GroupMap::make(src.sq.group, tgt.sq.group, std::move(m));
}

}  // namespace

GroupMap precompose_induced(const HomGroup& src, const HomGroup& tgt, const ChainMap& phi) {
    return induced_from_linear(src, tgt,
                               [&](const ChainMap& f) { return f.compose_after(phi); });
}

GroupMap postcompose_induced(const HomGroup& src, const HomGroup& tgt, const ChainMap& psi) {
    return induced_from_linear(src, tgt, [&](const ChainMap& f) {
        return shift(psi, src.q).compose_after(f);
    });
}

GroupMap postcompose_shifted_induced(const HomGroup& src, const HomGroup& tgt,
                                     const ChainMap& psi) {
    return induced_from_linear(src, tgt,
                               [&](const ChainMap& f) { return psi.compose_after(f); });
}

GroupMap hom_induced(const HomGroup& src, const HomGroup& tgt,
                     const std::function<ChainMap(const ChainMap&)>& apply) {
    return induced_from_linear(src, tgt, apply);
}

IntMatrix linear_on_flat(const HomSpace& src, long nsrc, const HomSpace& tgt, long ntgt,
                         const std::function<ChainMap(const ChainMap&)>& apply) {
    IntMatrix m(tgt.dim(ntgt), src.dim(nsrc), src.x().ring());
    for (long c = 0; c < src.dim(nsrc); ++c) {
        IntMatrix e(src.dim(nsrc), 1, src.x().ring());
        e.set(c, 0, 1);
        IntMatrix v = tgt.flatten_map(apply(src.unflatten(nsrc, e)), ntgt);
        for (long r = 0; r < v.rows(); ++r) m.set(r, c, v.at(r, 0));
    }
    return m;
}

ChainMap homotopy_inverse(const ChainMap& f) {
    const Complex& x = f.src();
    const Complex& y = f.tgt();
    HomSpace yx(y, x), yy(y, y);
    long n_g = yx.dim(0), n_h = yy.dim(-1);
    IntMatrix delta_g = yx.delta(0);
    IntMatrix delta_h = yy.delta(-1);
    /* Columns: (g, h). Rows: chain-map condition on g, then f o g - id = d h + h d. */
    IntMatrix post(yy.dim(0), n_g, x.ring());
    for (long c = 0; c < n_g; ++c) {
        IntMatrix e(n_g, 1, x.ring());
        e.set(c, 0, 1);
        ChainMap g = yx.unflatten(0, e);
        IntMatrix v = yy.flatten_map(f.compose_after(g), 0);
        for (long r = 0; r < v.rows(); ++r) post.set(r, c, v.at(r, 0));
    }
    IntMatrix top = IntMatrix::hstack(delta_g, IntMatrix(delta_g.rows(), n_h, x.ring()));
    IntMatrix bottom = IntMatrix::hstack(post, -delta_h);
    IntMatrix lhs = IntMatrix::vstack(top, bottom);
    IntMatrix rhs = IntMatrix::vstack(IntMatrix(delta_g.rows(), 1, x.ring()),
                                      yy.flatten_map(ChainMap::identity(y), 0));
    auto sol = solve_linear(lhs, rhs);
    WL_REQUIRE(sol.has_value(), "homotopy_inverse: no right inverse (not an equivalence?)");
    IntMatrix gv(n_g, 1, x.ring());
    for (long i = 0; i < n_g; ++i) gv.set(i, 0, sol->at(i, 0));
    ChainMap g = yx.unflatten(0, gv);
    WL_REQUIRE(is_null_homotopic(g.compose_after(f) - ChainMap::identity(x)),
               "homotopy_inverse: right inverse is not two-sided");
    return g;
}

namespace {

/* Split model assembled from homology: a free summand in degree d for every
 * free generator of H^d, a two-term piece in degrees (d-1, d) for every
 * torsion generator. Over F_p homology is free, so the model has zero
 * differentials. Returns the model and a quasi-isomorphism model -> X. */
struct StandardModel {
    Complex model;
    ChainMap to_x;
};

StandardModel standard_model(const Complex& x) {
    Ring ring = x.ring();
    if (x.is_zero()) {
        Complex z = Complex::zero(ring);
        return StandardModel{z, ChainMap::zero(z, x)};
    }
    long lo = x.lo(), hi = x.hi();
    struct DegData {
        Subquotient hd;
        CanonicalGens gens;
        std::vector<long> torsion_idx;  // finite order over Z
    };
    std::vector<DegData> data;
    for (long d = lo; d <= hi; ++d) {
        Subquotient hd = x.homology_data(d);
        CanonicalGens cg = canonical_generators(hd.group);
        std::vector<long> tor;
        if (!ring.is_field())
            for (size_t i = 0; i < cg.orders.size(); ++i)
                if (cg.orders[i] != 0) tor.push_back(long(i));
        data.push_back(DegData{std::move(hd), std::move(cg), std::move(tor)});
    }
    auto gens_count = [&](long d) -> long {
        if (d < lo || d > hi) return 0;
        return data[size_t(d - lo)].gens.gens.cols();
    };
    auto tor_count = [&](long d) -> long {
        if (d < lo || d > hi) return 0;
        return long(data[size_t(d - lo)].torsion_idx.size());
    };
    /* model rank at d: generators of H^d plus resolution gens of H^{d+1} torsion */
    std::vector<long> ranks;
    std::vector<IntMatrix> diffs;
    long mlo = lo - 1;
    for (long d = mlo; d <= hi; ++d) ranks.push_back(gens_count(d) + tor_count(d + 1));
    for (long d = mlo; d < hi; ++d) {
        IntMatrix dm(gens_count(d + 1) + tor_count(d + 2), gens_count(d) + tor_count(d + 1),
                     ring);
        const auto& up = data[size_t(d + 1 - lo)];
        for (long t = 0; t < tor_count(d + 1); ++t) {
            long gen_slot = up.torsion_idx[size_t(t)];
            dm.set(gen_slot, gens_count(d) + t, up.gens.orders[size_t(gen_slot)]);
        }
        diffs.push_back(std::move(dm));
    }
    Complex model(ring, mlo, std::move(ranks), std::move(diffs));

    ChainMap to_x = ChainMap::build(
        model, x,
        [&](long d) {
            IntMatrix m(x.rank(d), gens_count(d) + tor_count(d + 1), ring);
            if (d >= lo && d <= hi) {
                const auto& dd = data[size_t(d - lo)];
                IntMatrix reps = IntMatrix::mul(dd.hd.sub, dd.gens.gens);
                m.paste(0, 0, reps);
            }
            if (d + 1 >= lo && d + 1 <= hi) {
                const auto& up = data[size_t(d + 1 - lo)];
                for (long t = 0; t < tor_count(d + 1); ++t) {
                    long gen_slot = up.torsion_idx[size_t(t)];
                    IntMatrix z = IntMatrix::mul(
                        up.hd.sub, up.gens.gens.col(gen_slot)
                                       .scaled(up.gens.orders[size_t(gen_slot)]));
                    auto w = solve_linear(x.diff(d), z);
                    WL_REQUIRE(w.has_value(), "standard_model: boundary lift failed");
                    for (long r = 0; r < x.rank(d); ++r) m.set(r, gens_count(d) + t, w->at(r, 0));
                }
            }
            return m;
        },
        false);
    return StandardModel{model, to_x};
}

}  // namespace

std::optional<std::pair<ChainMap, ChainMap>> find_equivalence(const Complex& x,
                                                              const Complex& y) {
    if (!homotopy_equivalent(x, y)) return std::nullopt;
    if (x.is_zero() && y.is_zero())
        return std::make_pair(ChainMap::zero(x, y), ChainMap::zero(y, x));
    StandardModel mx = standard_model(x);
    StandardModel my = standard_model(y);
    /* Same homology => same standard model (it is built from canonical forms).
     * Degenerate supports can differ; align by zero-padding in the maps. */
    ChainMap sx_inv = homotopy_inverse(mx.to_x);
    ChainMap glue = ChainMap::build(
        mx.model, my.model,
        [&](long d) {
            IntMatrix m(my.model.rank(d), mx.model.rank(d), x.ring());
            long n = std::min(m.rows(), m.cols());
            for (long i = 0; i < n; ++i) m.set(i, i, 1);
            return m;
        },
        true);
    ChainMap fwd = my.to_x.compose_after(glue.compose_after(sx_inv));
    ChainMap bwd = homotopy_inverse(fwd);
    return std::make_pair(fwd, bwd);
}

}  // namespace wl
