#include "weightlab/weight.hpp"

#include <sstream>

namespace wl {

namespace {

/* Stupid truncations of a literal complex (no minimal-model step). */
Complex stupid_le(const Complex& x, long k) {
    if (x.is_zero() || k >= x.hi()) return x;
    if (k < x.lo()) return Complex::zero(x.ring());
    std::vector<long> ranks;
    std::vector<IntMatrix> diffs;
    for (long d = x.lo(); d <= k; ++d) ranks.push_back(x.rank(d));
    for (long d = x.lo(); d < k; ++d) diffs.push_back(x.diff(d));
    return Complex(x.ring(), x.lo(), std::move(ranks), std::move(diffs));
}

Complex stupid_ge(const Complex& x, long k) {
    if (x.is_zero() || k <= x.lo()) return x;
    if (k > x.hi()) return Complex::zero(x.ring());
    std::vector<long> ranks;
    std::vector<IntMatrix> diffs;
    for (long d = k; d <= x.hi(); ++d) ranks.push_back(x.rank(d));
    for (long d = k; d < x.hi(); ++d) diffs.push_back(x.diff(d));
    return Complex(x.ring(), k, std::move(ranks), std::move(diffs));
}

Complex stupid_slice(const Complex& x, long a, long b) { return stupid_ge(stupid_le(x, b), a); }

/* Identity-on-overlap chain maps between a complex and its stupid pieces. */
ChainMap slice_incl(const Complex& piece, const Complex& whole) {
    return ChainMap::build(
        piece, whole,
        [&](long d) {
            IntMatrix m(whole.rank(d), piece.rank(d), whole.ring());
            if (piece.rank(d) != 0) m.paste(0, 0, IntMatrix::identity(piece.rank(d), whole.ring()));
            return m;
        },
        false);
}

ChainMap slice_proj(const Complex& whole, const Complex& piece) {
    return ChainMap::build(
        whole, piece,
        [&](long d) {
            IntMatrix m(piece.rank(d), whole.rank(d), whole.ring());
            if (piece.rank(d) != 0) m.paste(0, 0, IntMatrix::identity(piece.rank(d), whole.ring()));
            return m;
        },
        false);
}

/* Boundary of the stupid-truncation triangle: the differential of x viewed
 * as a map (degrees <= k part) -> (degrees >= k+1 part)[1]. */
ChainMap slice_bnd(const Complex& x, const Complex& le, const Complex& ge_part, long k) {
    Complex ge1 = shift(ge_part, 1);
    return ChainMap::build(
        le, ge1,
        [&](long d) {
            IntMatrix m(ge1.rank(d), le.rank(d), x.ring());
            if (d == k && le.rank(k) != 0 && ge1.rank(k) != 0) m.paste(0, 0, x.diff(k));
            return m;
        },
        false);
}

/* Random contractible complex inside the given degree window (empty when
 * the window is too small). */
Complex random_contractible(Ring ring, long dlo, long dhi, Rng& rng) {
    if (dhi <= dlo) return Complex::zero(ring);
    long a = rng.uniform(dlo, dhi - 1);
    long r = rng.uniform(1, 2);
    /* Unimodular = product of a few elementary matrices. */
    IntMatrix u = IntMatrix::identity(r, ring);
    for (int t = 0; t < 3; ++t) {
        if (r < 2) break;
        long i = rng.uniform(0, r - 1), j = rng.uniform(0, r - 1);
        if (i != j) u.add_row_multiple(i, j, Int(rng.uniform(-2, 2)));
    }
    return Complex::two_term(ring, a, std::move(u));
}

/* A random null-homotopic chain map f = d h + h d for small random h. */
ChainMap random_null_homotopic(const Complex& x, const Complex& y, Rng& rng) {
    HomSpace sp(x, y);
    IntMatrix h(sp.dim(-1), 1, x.ring());
    for (long i = 0; i < h.rows(); ++i) h.set(i, 0, Int(rng.uniform(-2, 2)));
    IntMatrix f = IntMatrix::mul(sp.delta(-1), h);
    return sp.unflatten(0, f);
}

}  // namespace

bool membership_test(const Complex& x, long bound, Side side, const WeightStructure& w) {
    long k = bound + w.offset;
    long lo = std::min(x.lo(), k - 1), hi = std::max(x.hi(), k + 1);
    if (!w.reversed) {
        if (side == Side::le) {
            for (long d = k + 1; d <= hi; ++d)
                if (!x.homology(d).is_trivial()) return false;
            return true;
        }
        for (long d = lo; d < k; ++d)
            if (!x.homology(d).is_trivial()) return false;
        if (!x.ring().is_field() && !x.homology(k).torsion.empty()) return false;
        return true;
    }
    /* Deliberately broken convention for negative tests: the inequalities
     * are flipped, which destroys orthogonality. */
    if (side == Side::le) {
        for (long d = lo; d < k; ++d)
            if (!x.homology(d).is_trivial()) return false;
        return true;
    }
    for (long d = k + 1; d <= hi; ++d)
        if (!x.homology(d).is_trivial()) return false;
    return true;
}

bool in_heart(const Complex& x, const WeightStructure& w) {
    return membership_test(x, 0, Side::le, w) && membership_test(x, 0, Side::ge, w);
}

WeightDecomposition weight_decomposition(const Complex& x, long k, const WeightStructure& w) {
    WL_REQUIRE(!w.reversed, "weight_decomposition: reversed convention has no truncations");
    long kk = k + w.offset;
    MinimalModel mm = minimal_model(x);
    Complex le = stupid_le(mm.model, kk);
    Complex ge = stupid_ge(mm.model, kk + 1);
    ChainMap incl = mm.from_model.compose_after(slice_incl(ge, mm.model));
    ChainMap proj = slice_proj(mm.model, le).compose_after(mm.to_model);
    ChainMap bnd = slice_bnd(mm.model, le, ge, kk);
    return WeightDecomposition{k, x, ge, le, incl, proj, bnd};
}

WeightDecomposition randomized_weight_decomposition(const Complex& x, long k, Rng& rng,
                                                    const WeightStructure& w) {
    WeightDecomposition can = weight_decomposition(x, k, w);
    long kk = k + w.offset;
    /* Pad both pieces with contractibles inside their degree ranges and
     * perturb all three maps by null-homotopic noise. */
    Complex kle = random_contractible(x.ring(), kk - 3, kk, rng);
    Complex kge = random_contractible(x.ring(), kk + 1, kk + 4, rng);
    SumData le_s = direct_sum(can.le, kle);
    SumData ge_s = direct_sum(can.ge, kge);
    ChainMap alpha = ge_s.proj_left;                        // ge' -> ge
    ChainMap alpha_inv = ge_s.inj_left;                     // ge -> ge'
    ChainMap beta = le_s.inj_left + random_null_homotopic(can.le, le_s.sum, rng);
    ChainMap beta_inv = le_s.proj_left;                     // le' -> le
    ChainMap incl = can.incl.compose_after(alpha);
    if (!ge_s.sum.is_zero()) incl = incl + random_null_homotopic(ge_s.sum, x, rng);
    ChainMap proj = beta.compose_after(can.proj);
    ChainMap bnd = shift(alpha_inv, 1).compose_after(can.bnd).compose_after(beta_inv);
    return WeightDecomposition{k, x, ge_s.sum, le_s.sum, incl, proj, bnd};
}

TruncationPiece weight_truncate(const Complex& x, long k, Side side,
                                const WeightStructure& w) {
    WeightDecomposition d = weight_decomposition(x, side == Side::le ? k : k - 1, w);
    if (side == Side::le) return TruncationPiece{d.le, d.proj};
    return TruncationPiece{d.ge, d.incl};
}

Octahedron weight_range(const Complex& x, long l, long m, const WeightStructure& w) {
    WL_REQUIRE(l <= m, "weight_range: window requires l <= m");
    long ll = l + w.offset, mm = m + w.offset;
    MinimalModel mmod = minimal_model(x);
    const Complex& mx = mmod.model;
    Octahedron oct;
    oct.l = l;
    oct.m = m;
    oct.at_l = weight_decomposition(x, l, w);
    oct.at_m = weight_decomposition(x, m, w);
    oct.mid = stupid_slice(mx, ll + 1, mm);
    Complex ge_l = stupid_ge(mx, ll + 1), ge_m = stupid_ge(mx, mm + 1);
    Complex le_l = stupid_le(mx, ll), le_m = stupid_le(mx, mm);
    oct.ge_connect = slice_incl(ge_m, ge_l);
    oct.ge_to_mid = slice_proj(ge_l, oct.mid);
    oct.mid_bnd = slice_bnd(stupid_ge(mx, ll + 1), oct.mid, ge_m, mm);
    oct.mid_to_le = slice_incl(oct.mid, le_m);
    oct.le_connect = slice_proj(le_m, le_l);
    oct.le_bnd = slice_bnd(stupid_le(mx, mm), le_l, oct.mid, ll);
    return oct;
}

const Complex& Tower::y_at(long i) const {
    if (y.empty()) {
        static const Complex z = Complex::zero(Ring::integers());
        WL_REQUIRE(false, "Tower::y_at on empty tower");
        return z;
    }
    if (i <= imin) return y.front();
    if (i >= imax) return y.back();
    return y[size_t(i - imin)];
}

Complex Tower::factor_at(long i) const {
    if (i < imin || i >= imax) return Complex::zero(x.ring());
    return factors[size_t(i - imin)];
}

Triangle Tower::step_triangle(long i) const {
    return Triangle{y[size_t(i - imin)], y[size_t(i - imin + 1)], factors[size_t(i - imin)],
                    connect[size_t(i - imin)], to_factor[size_t(i - imin)],
                    bnd[size_t(i - imin)]};
}

namespace {

Tower empty_tower(const Complex& x) {
    Tower t;
    t.x = x;
    t.imin = 0;
    t.imax = 0;
    t.y = {Complex::zero(x.ring())};
    t.augment = {ChainMap::zero(t.y[0], x)};
    t.weight_cx = Complex::zero(x.ring());
    return t;
}

}  // namespace

Tower weight_postnikov_tower(const Complex& x, const WeightStructure& w) {
    MinimalModel mm = minimal_model(x);
    const Complex& m = mm.model;
    if (m.is_zero()) return empty_tower(x);
    long c = w.offset;
    Tower t;
    t.x = x;
    t.heart_degree = c;
    /* Y_i = w(c)_{>=1-i}X = stupid part of the model in degrees >= 1-i+c. */
    t.imin = c - m.hi();
    t.imax = 1 + c - m.lo();
    for (long i = t.imin; i <= t.imax; ++i) {
        Complex yi = stupid_ge(m, 1 - i + c);
        t.augment.push_back(mm.from_model.compose_after(slice_incl(yi, m)));
        t.y.push_back(yi);
    }
    for (long i = t.imin; i < t.imax; ++i) {
        const Complex& yi = t.y[size_t(i - t.imin)];
        const Complex& yi1 = t.y[size_t(i - t.imin + 1)];
        t.connect.push_back(slice_incl(yi, yi1));
        long deg = -i + c;  // the factor X_i sits in this single degree
        Complex xi = Complex::free_module(m.ring(), deg, m.rank(deg));
        t.factors.push_back(xi);
        t.to_factor.push_back(slice_proj(yi1, xi));
        /* X_i -> Y_i[1]: the differential of the model out of degree deg. */
        Complex yi_1 = shift(yi, 1);
        t.bnd.push_back(ChainMap::build(
            xi, yi_1,
            [&](long d) {
                IntMatrix mb(yi_1.rank(d), xi.rank(d), m.ring());
                if (d == deg && xi.rank(d) != 0 && yi_1.rank(d) != 0)
                    mb.paste(0, 0, m.diff(deg));
                return mb;
            },
            false));
    }
    /* Weight complex: term p is the factor X^p = X_{-p}[p]; for the canonical
     * tower this reproduces the minimal model re-indexed by the offset. */
    std::vector<long> wranks;
    std::vector<IntMatrix> wdiffs;
    for (long p = m.lo() - c; p <= m.hi() - c; ++p) wranks.push_back(m.rank(p + c));
    for (long p = m.lo() - c; p < m.hi() - c; ++p) wdiffs.push_back(m.diff(p + c));
    t.weight_cx = Complex(m.ring(), m.lo() - c, std::move(wranks), std::move(wdiffs));
    return t;
}

Tower tower_from_layers(const Complex& x, long imin, std::vector<Complex> ys,
                        std::vector<ChainMap> augments, long heart_degree) {
    std::vector<ChainMap> conns;
    for (size_t t = 0; t + 1 < ys.size(); ++t) {
        const Complex& yi = ys[t];
        const Complex& yi1 = ys[t + 1];
        /* Connecting map: solve for conn with aug_{i+1} o conn ~ aug_i. */
        HomSpace s_conn(yi, yi1), s_x(yi, x);
        IntMatrix lhs = IntMatrix::vstack(
            IntMatrix::hstack(s_conn.delta(0),
                              IntMatrix(s_conn.dim(1), s_x.dim(-1), x.ring())),
            IntMatrix::hstack(linear_on_flat(s_conn, 0, s_x, 0,
                                             [&](const ChainMap& f) {
                                                 return augments[t + 1].compose_after(f);
                                             }),
                              -s_x.delta(-1)));
        IntMatrix rhs = IntMatrix::vstack(IntMatrix(s_conn.dim(1), 1, x.ring()),
                                          s_x.flatten_map(augments[t], 0));
        auto sol = solve_linear(lhs, rhs);
        WL_REQUIRE(sol.has_value(), "tower_from_layers: no connecting map at layer " +
                                        std::to_string(imin + long(t)));
        IntMatrix cv(s_conn.dim(0), 1, x.ring());
        for (long r = 0; r < cv.rows(); ++r) cv.set(r, 0, sol->at(r, 0));
        conns.push_back(s_conn.unflatten(0, cv));
    }
    return tower_from_layers_with_connectors(x, imin, std::move(ys), std::move(augments),
                                             std::move(conns), heart_degree);
}

Tower tower_from_layers_with_connectors(const Complex& x, long imin,
                                        std::vector<Complex> ys,
                                        std::vector<ChainMap> augments,
                                        std::vector<ChainMap> connectors,
                                        long heart_degree) {
    WL_REQUIRE(!ys.empty() && ys.front().is_zero(), "tower_from_layers: bottom must be zero");
    WL_REQUIRE(connectors.size() + 1 == ys.size(), "tower_from_layers: connector count");
    Tower t;
    t.x = x;
    t.imin = imin;
    t.imax = imin + long(ys.size()) - 1;
    t.y = std::move(ys);
    t.augment = std::move(augments);
    t.connect = std::move(connectors);
    t.heart_degree = heart_degree;
    for (long i = t.imin; i < t.imax; ++i) {
        const ChainMap& conn = t.connect[size_t(i - t.imin)];
        ConeData cd = cone(conn);
        MinimalModel fm = minimal_model(cd.cone);
        long deg = -i + heart_degree;
        WL_REQUIRE(fm.model.is_zero() ||
                       (fm.model.lo() == fm.model.hi() && fm.model.lo() == deg),
                   "tower_from_layers: factor at layer " + std::to_string(i) +
                       " is not a heart object in degree " + std::to_string(deg));
        t.factors.push_back(fm.model);
        t.to_factor.push_back(fm.to_model.compose_after(cd.triangle.g));
        t.bnd.push_back(cd.triangle.h.compose_after(fm.from_model));
    }
    /* Weight complex from the factor composites (strict between one-degree
     * factors). */
    long pmin = 1 - t.imax, pmax = -t.imin;
    std::vector<long> ranks;
    for (long p = pmin; p <= pmax; ++p)
        ranks.push_back(t.factor_at(-p).rank(p + heart_degree));
    std::vector<IntMatrix> diffs;
    for (long p = pmin; p < pmax; ++p) {
        long i = -p;
        ChainMap comp = shift(t.to_factor[size_t(i - 1 - t.imin)], 1)
                            .compose_after(t.bnd[size_t(i - t.imin)]);
        diffs.push_back(comp.comp(p + heart_degree));
    }
    if (!ranks.empty())
        t.weight_cx = Complex(x.ring(), pmin, std::move(ranks), std::move(diffs));
    else
        t.weight_cx = Complex::zero(x.ring());
    return t;
}

Tower randomized_weight_postnikov_tower(const Complex& x, Rng& rng,
                                        const WeightStructure& w) {
    MinimalModel mm = minimal_model(x);
    const Complex& m = mm.model;
    if (m.is_zero()) return empty_tower(x);
    long c = w.offset;
    long imin = c - m.hi(), imax = 1 + c - m.lo();
    std::vector<Complex> ys;
    std::vector<ChainMap> augs;
    for (long i = imin; i <= imax; ++i) {
        long level = 1 - i + c;
        Complex base = stupid_ge(m, level);
        ChainMap aug_base = mm.from_model.compose_after(slice_incl(base, m));
        if (i == imin || base.is_zero()) {
            ys.push_back(base);
            augs.push_back(aug_base);
            continue;
        }
        Complex junk = random_contractible(x.ring(), level, level + 3, rng);
        SumData sd = direct_sum(base, junk);
        ChainMap aug = aug_base.compose_after(sd.proj_left) +
                       random_null_homotopic(sd.sum, x, rng);
        ys.push_back(sd.sum);
        augs.push_back(aug);
    }
    return tower_from_layers(x, imin, std::move(ys), std::move(augs), c);
}

Complex weight_complex(const Complex& x, const WeightStructure& w) {
    return weight_postnikov_tower(x, w).weight_cx;
}

TruncationLift lift_morphism_to_truncations(const ChainMap& g,
                                            const WeightDecomposition& src,
                                            const WeightDecomposition& tgt,
                                            Rng* randomize) {
    Ring ring = g.src().ring();
    HomSpace s_a(src.ge, tgt.ge), s_b(src.le, tgt.le);
    HomSpace s1(src.ge, g.tgt()), s2(g.src(), tgt.le);
    Complex tgt_ge1 = shift(tgt.ge, 1);
    HomSpace s3(src.le, tgt_ge1);
    long na = s_a.dim(0), nb = s_b.dim(0);
    long nh1 = s1.dim(-1), nh2 = s2.dim(-1), nh3 = s3.dim(-1);

    IntMatrix P1 = linear_on_flat(s_a, 0, s1, 0,
                                  [&](const ChainMap& f) { return tgt.incl.compose_after(f); });
    IntMatrix Qb = linear_on_flat(s_b, 0, s2, 0,
                                  [&](const ChainMap& f) { return f.compose_after(src.proj); });
    IntMatrix R1 = linear_on_flat(s_b, 0, s3, 0,
                                  [&](const ChainMap& f) { return tgt.bnd.compose_after(f); });
    IntMatrix R2 = linear_on_flat(s_a, 0, s3, 0, [&](const ChainMap& f) {
        return shift(f, 1).compose_after(src.bnd);
    });

    auto zize = [&](long r, long c) { return IntMatrix(r, c, ring); };
    /* Rows: chain(a), chain(b), square(incl), square(proj), square(bnd). */
    std::vector<IntMatrix> rows;
    rows.push_back(IntMatrix::hstack(
        IntMatrix::hstack(s_a.delta(0), zize(s_a.dim(1), nb)),
        zize(s_a.dim(1), nh1 + nh2 + nh3)));
    rows.push_back(IntMatrix::hstack(
        IntMatrix::hstack(zize(s_b.dim(1), na), s_b.delta(0)),
        zize(s_b.dim(1), nh1 + nh2 + nh3)));
    rows.push_back(IntMatrix::hstack(
        IntMatrix::hstack(P1, zize(s1.dim(0), nb)),
        IntMatrix::hstack(-s1.delta(-1), zize(s1.dim(0), nh2 + nh3))));
    rows.push_back(IntMatrix::hstack(
        IntMatrix::hstack(zize(s2.dim(0), na), Qb),
        IntMatrix::hstack(zize(s2.dim(0), nh1),
                          IntMatrix::hstack(-s2.delta(-1), zize(s2.dim(0), nh3)))));
    rows.push_back(IntMatrix::hstack(
        IntMatrix::hstack(-R2, R1),
        IntMatrix::hstack(zize(s3.dim(0), nh1 + nh2), -s3.delta(-1))));
    IntMatrix lhs = rows[0];
    for (size_t i = 1; i < rows.size(); ++i) lhs = IntMatrix::vstack(lhs, rows[i]);
    IntMatrix rhs(lhs.rows(), 1, ring);
    IntMatrix r3 = s1.flatten_map(g.compose_after(src.incl), 0);
    IntMatrix r4 = s2.flatten_map(tgt.proj.compose_after(g), 0);
    long off = s_a.dim(1) + s_b.dim(1);
    for (long i = 0; i < r3.rows(); ++i) rhs.set(off + i, 0, r3.at(i, 0));
    off += r3.rows();
    for (long i = 0; i < r4.rows(); ++i) rhs.set(off + i, 0, r4.at(i, 0));

    auto sol = solve_linear(lhs, rhs);
    WL_REQUIRE(sol.has_value(),
               "lift_morphism_to_truncations: no completion found (internal invariant)");
    IntMatrix v = *sol;
    if (randomize) {
        IntMatrix kb = kernel_basis(lhs);
        for (long c = 0; c < kb.cols(); ++c) {
            Int coeff = Int(randomize->uniform(-1, 1));
            if (coeff == 0) continue;
            for (long r = 0; r < v.rows(); ++r)
                v.set(r, 0, ring.reduce(v.at(r, 0) + coeff * kb.at(r, c)));
        }
    }
    IntMatrix av(na, 1, ring), bv(nb, 1, ring);
    for (long i = 0; i < na; ++i) av.set(i, 0, v.at(i, 0));
    for (long i = 0; i < nb; ++i) bv.set(i, 0, v.at(na + i, 0));
    TruncationLift lift{s_a.unflatten(0, av), s_b.unflatten(0, bv), false};
    if (tgt.k < src.k) {
        AbGroup obstruction = homotopy_classes(src.ge, shift(tgt.le, -1), 0);
        WL_REQUIRE(obstruction.is_trivial(),
                   "lift_morphism_to_truncations: obstruction group nonzero with l < m");
        lift.unique = true;
    }
    return lift;
}

TowerMorphism lift_morphism_to_towers(const ChainMap& g, const Tower& src, const Tower& tgt,
                                      Rng* randomize, long src_offset) {
    Ring ring = g.src().ring();
    long imin = std::min(src.imin - src_offset, tgt.imin);
    long imax = std::max(src.imax - src_offset, tgt.imax);
    TowerMorphism tm;
    tm.imin = imin;
    tm.src_offset = src_offset;
    std::vector<ChainMap> on_y(size_t(imax - imin + 1));

    auto src_conn = [&](long i) -> ChainMap {
        if (i >= src.imax || i < src.imin) return ChainMap::identity(src.y_at(i));
        return src.connect[size_t(i - src.imin)];
    };
    auto tgt_conn = [&](long i) -> ChainMap {
        if (i >= tgt.imax || i < tgt.imin) return ChainMap::identity(tgt.y_at(i));
        return tgt.connect[size_t(i - tgt.imin)];
    };
    auto src_aug = [&](long i) -> const ChainMap& {
        return i <= src.imin ? src.augment.front()
               : i >= src.imax ? src.augment.back()
                               : src.augment[size_t(i - src.imin)];
    };
    auto tgt_aug = [&](long i) -> const ChainMap& {
        return i <= tgt.imin ? tgt.augment.front()
               : i >= tgt.imax ? tgt.augment.back()
                               : tgt.augment[size_t(i - tgt.imin)];
    };

    auto solve_layer = [&](long i, const ChainMap* above) -> ChainMap {
        const Complex& yi = src.y_at(i + src_offset);
        const Complex& yi_t = tgt.y_at(i);
        HomSpace s_a(yi, yi_t);
        /* Constraints: chain map; augmentation square; connecting square
         * with the layer above when present. */
        const ChainMap& aug_s = src_aug(i + src_offset);
        const ChainMap& aug_t = tgt_aug(i);
        HomSpace s_x(yi, g.tgt());
        long nh_aug = s_x.dim(-1);
        IntMatrix aug_op = linear_on_flat(
            s_a, 0, s_x, 0, [&](const ChainMap& f) { return aug_t.compose_after(f); });
        long ncols_h = nh_aug;
        IntMatrix conn_op(0, 0, ring);
        HomSpace sq_space(yi, yi_t);  // replaced below when a layer above exists
        ChainMap conn_s = ChainMap::zero(yi, yi);
        ChainMap conn_t = ChainMap::zero(yi_t, yi_t);
        if (above) {
            const Complex& yi1_t = tgt.y_at(i + 1);
            conn_s = src_conn(i + src_offset);
            conn_t = tgt_conn(i);
            sq_space = HomSpace(yi, yi1_t);
            conn_op = linear_on_flat(s_a, 0, sq_space, 0, [&](const ChainMap& f) {
                return conn_t.compose_after(f);
            });
            ncols_h += sq_space.dim(-1);
        }
        long na = s_a.dim(0);
        IntMatrix lhs =
            IntMatrix::hstack(s_a.delta(0), IntMatrix(s_a.dim(1), ncols_h, ring));
        IntMatrix rhs(s_a.dim(1), 1, ring);
        {
            IntMatrix row = IntMatrix::hstack(aug_op, -s_x.delta(-1));
            if (above) row = IntMatrix::hstack(row, IntMatrix(row.rows(), sq_space.dim(-1), ring));
            lhs = IntMatrix::vstack(lhs, row);
            rhs = IntMatrix::vstack(rhs, s_x.flatten_map(g.compose_after(aug_s), 0));
        }
        if (above) {
            IntMatrix row = IntMatrix::hstack(
                conn_op, IntMatrix::hstack(IntMatrix(sq_space.dim(0), nh_aug, ring),
                                           -sq_space.delta(-1)));
            lhs = IntMatrix::vstack(lhs, row);
            rhs = IntMatrix::vstack(rhs, sq_space.flatten_map(above->compose_after(conn_s), 0));
        }
        auto sol = solve_linear(lhs, rhs);
        WL_REQUIRE(sol.has_value(), "lift_morphism_to_towers: layer solve failed at " +
                                        std::to_string(i));
        IntMatrix v = *sol;
        if (randomize) {
            IntMatrix kb = kernel_basis(lhs);
            for (long c = 0; c < kb.cols(); ++c) {
                Int coeff = Int(randomize->uniform(-1, 1));
                if (coeff == 0) continue;
                for (long r = 0; r < v.rows(); ++r)
                    v.set(r, 0, ring.reduce(v.at(r, 0) + coeff * kb.at(r, c)));
            }
        }
        IntMatrix av(na, 1, ring);
        for (long r = 0; r < na; ++r) av.set(r, 0, v.at(r, 0));
        return s_a.unflatten(0, av);
    };

    for (long i = imax; i >= imin; --i) {
        const ChainMap* above = (i == imax) ? nullptr : &on_y[size_t(i + 1 - imin)];
        on_y[size_t(i - imin)] = solve_layer(i, above);
    }
    tm.on_y = std::move(on_y);

    /* Factor maps: solve both factor squares jointly per layer. */
    std::vector<ChainMap> on_f;
    for (long i = imin; i < imax; ++i) {
        long si = i + src_offset;
        Complex xf = src.factor_at(si);
        Complex xf_t = tgt.factor_at(i);
        if (xf.is_zero() || xf_t.is_zero()) {
            on_f.push_back(ChainMap::zero(xf, xf_t));
            continue;
        }
        const ChainMap& tf_s = src.to_factor[size_t(si - src.imin)];
        const ChainMap& tf_t = tgt.to_factor[size_t(i - tgt.imin)];
        const ChainMap& bnd_s = src.bnd[size_t(si - src.imin)];
        const ChainMap& bnd_t = tgt.bnd[size_t(i - tgt.imin)];
        const ChainMap& ay1 = tm.on_y[size_t(i + 1 - imin)];
        const ChainMap& ay = tm.on_y[size_t(i - imin)];
        HomSpace s_b(xf, xf_t);
        HomSpace sq1(src.y_at(si + 1), xf_t);
        Complex ytgt1 = shift(tgt.y_at(i), 1);
        HomSpace sq2(xf, ytgt1);
        IntMatrix op1 = linear_on_flat(s_b, 0, sq1, 0, [&](const ChainMap& f) {
            return f.compose_after(tf_s);
        });
        IntMatrix op2 = linear_on_flat(s_b, 0, sq2, 0, [&](const ChainMap& f) {
            return bnd_t.compose_after(f);
        });
        long nb = s_b.dim(0), n1 = sq1.dim(-1), n2 = sq2.dim(-1);
        IntMatrix lhs = IntMatrix::hstack(s_b.delta(0), IntMatrix(s_b.dim(1), n1 + n2, ring));
        lhs = IntMatrix::vstack(
            lhs, IntMatrix::hstack(op1, IntMatrix::hstack(-sq1.delta(-1),
                                                          IntMatrix(sq1.dim(0), n2, ring))));
        lhs = IntMatrix::vstack(
            lhs, IntMatrix::hstack(op2, IntMatrix::hstack(IntMatrix(sq2.dim(0), n1, ring),
                                                          -sq2.delta(-1))));
        IntMatrix rhs(s_b.dim(1), 1, ring);
        rhs = IntMatrix::vstack(rhs, sq1.flatten_map(tf_t.compose_after(ay1), 0));
        rhs = IntMatrix::vstack(rhs, sq2.flatten_map(shift(ay, 1).compose_after(bnd_s), 0));
        auto sol = solve_linear(lhs, rhs);
        WL_REQUIRE(sol.has_value(), "lift_morphism_to_towers: factor solve failed at " +
                                        std::to_string(i));
        IntMatrix bv(nb, 1, ring);
        for (long r = 0; r < nb; ++r) bv.set(r, 0, sol->at(r, 0));
        on_f.push_back(s_b.unflatten(0, bv));
    }
    tm.on_factors = std::move(on_f);

    /* Induced map of weight complexes: strict between one-degree factors
     * (only meaningful without reindexing). */
    if (src_offset == 0) {
        long c = src.heart_degree;
        tm.weight_cx_map = ChainMap::build(
            src.weight_cx, tgt.weight_cx,
            [&](long p) {
                long i = -p;
                if (i >= imin && i < imax &&
                    !tm.on_factors[size_t(i - imin)].src().is_zero() &&
                    !tm.on_factors[size_t(i - imin)].tgt().is_zero())
                    return tm.on_factors[size_t(i - imin)].comp(p + c);
                return IntMatrix(tgt.weight_cx.rank(p), src.weight_cx.rank(p), ring);
            },
            true);
    }
    return tm;
}

HeartSplitting split_heart_extension(const Triangle& t, const WeightStructure& w) {
    WL_REQUIRE(in_heart(t.a, w) && in_heart(t.c, w),
               "split_heart_extension: ends are not heart objects");
    AbGroup obstruction = homotopy_classes(t.c, shift(t.a, 1), 0);
    WL_REQUIRE(obstruction.is_trivial(),
               "split_heart_extension: Hom(C, A[1]) must vanish for heart ends");
    /* Section s: C -> B of g up to homotopy. */
    HomSpace s_cb(t.c, t.b), s_cc(t.c, t.c);
    IntMatrix post = linear_on_flat(s_cb, 0, s_cc, 0,
                                    [&](const ChainMap& f) { return t.g.compose_after(f); });
    IntMatrix lhs = IntMatrix::vstack(
        IntMatrix::hstack(s_cb.delta(0), IntMatrix(s_cb.dim(1), s_cc.dim(-1), t.a.ring())),
        IntMatrix::hstack(post, -s_cc.delta(-1)));
    IntMatrix rhs = IntMatrix::vstack(IntMatrix(s_cb.dim(1), 1, t.a.ring()),
                                      s_cc.flatten_map(ChainMap::identity(t.c), 0));
    auto sol = solve_linear(lhs, rhs);
    WL_REQUIRE(sol.has_value(), "split_heart_extension: no section found");
    IntMatrix sv(s_cb.dim(0), 1, t.a.ring());
    for (long i = 0; i < sv.rows(); ++i) sv.set(i, 0, sol->at(i, 0));
    ChainMap s = s_cb.unflatten(0, sv);

    SumData sum = direct_sum(t.a, t.c);
    ChainMap from_sum = t.f.compose_after(sum.proj_left) + s.compose_after(sum.proj_right);
    ChainMap to_sum = homotopy_inverse(from_sum);
    return HeartSplitting{to_sum, from_sum};
}

CheckReport check_weight_axioms(const WeightStructure& w, const std::vector<Complex>& samples) {
    CheckReport rep;
    for (size_t idx = 0; idx < samples.size(); ++idx) {
        const Complex& x = samples[idx];
        std::string tag = "sample#" + std::to_string(idx);
        /* (ii) semi-invariance through the homology characterization. */
        for (long k = -1; k <= 1; ++k) {
            ++rep.checks;
            if (membership_test(x, k, Side::le, w) &&
                !membership_test(x, k + 1, Side::le, w))
                rep.fail(tag + ": w<=" + std::to_string(k) + " not inside w<=" +
                         std::to_string(k + 1));
            ++rep.checks;
            if (membership_test(x, k, Side::ge, w) &&
                !membership_test(x, k - 1, Side::ge, w))
                rep.fail(tag + ": w>=" + std::to_string(k) + " not inside w>=" +
                         std::to_string(k - 1));
        }
        /* (iv) decompositions exist and land in the right classes. */
        if (!w.reversed) {
            for (long k = x.lo() - 1; k <= x.hi(); ++k) {
                ++rep.checks;
                WeightDecomposition d = weight_decomposition(x, k - w.offset, w);
                bool ok_ge = membership_test(d.ge, k + 1 - w.offset, Side::ge, w);
                bool ok_le = membership_test(d.le, k - w.offset, Side::le, w);
                bool ok_cone = homotopy_equivalent(cone(d.incl).cone, d.le);
                bool ok_null = is_null_homotopic(d.proj.compose_after(d.incl)) &&
                               is_null_homotopic(d.bnd.compose_after(d.proj)) &&
                               is_null_homotopic(shift(d.incl, 1).compose_after(d.bnd));
                if (!(ok_ge && ok_le && ok_cone && ok_null))
                    rep.fail(tag + ": weight decomposition at k=" + std::to_string(k) +
                             " invalid");
            }
        }
    }
    /* (iii) orthogonality across all pairs that the membership tests accept. */
    for (size_t i = 0; i < samples.size(); ++i)
        for (size_t j = 0; j < samples.size(); ++j) {
            const Complex& u = samples[i];
            const Complex& v = samples[j];
            if (!membership_test(u, 0, Side::ge, w) || !membership_test(v, 0, Side::le, w))
                continue;
            ++rep.checks;
            AbGroup h = homotopy_classes(u, v, 1);
            if (!h.is_trivial())
                rep.fail("orthogonality: Hom(sample#" + std::to_string(i) + ", sample#" +
                         std::to_string(j) + "[1]) = " + h.to_string());
        }
    return rep;
}

}  // namespace wl
