#include "weightlab/tstruct.hpp"

namespace wl {

bool t_membership(const Complex& x, long bound, Side side, const TStructure& t) {
    long k = bound + t.offset;
    long lo = std::min(x.lo(), k - 1), hi = std::max(x.hi(), k + 1);
    if (side == Side::le) {
        for (long d = k + 1; d <= hi; ++d)
            if (!x.homology(d).is_trivial()) return false;
        return true;
    }
    for (long d = lo; d < k; ++d)
        if (!x.homology(d).is_trivial()) return false;
    return true;
}

TruncationPiece t_truncate(const Complex& y, long k, Side side, const TStructure& t) {
    long kk = k + t.offset;
    Ring ring = y.ring();
    if (y.is_zero()) return TruncationPiece{y, ChainMap::zero(y, y)};
    if (side == Side::le) {
        if (kk >= y.hi()) return TruncationPiece{y, ChainMap::identity(y)};
        if (kk < y.lo()) {
            Complex z = Complex::zero(ring);
            return TruncationPiece{z, ChainMap::zero(z, y)};
        }
        /* degrees < kk verbatim, degree kk replaced by the cycle lattice */
        IntMatrix cyc = kernel_basis(y.diff(kk));
        std::vector<long> ranks;
        std::vector<IntMatrix> diffs;
        for (long d = y.lo(); d < kk; ++d) ranks.push_back(y.rank(d));
        ranks.push_back(cyc.cols());
        for (long d = y.lo(); d + 1 < kk; ++d) diffs.push_back(y.diff(d));
        if (kk > y.lo()) {
            auto into_cyc = solve_linear(cyc, y.diff(kk - 1));
            WL_REQUIRE(into_cyc.has_value(), "t_truncate: boundary not inside cycles");
            diffs.push_back(*into_cyc);
        }
        Complex tr(ring, y.lo(), std::move(ranks), std::move(diffs));
        ChainMap incl = ChainMap::build(
            tr, y,
            [&](long d) {
                if (d < kk) {
                    IntMatrix m(y.rank(d), tr.rank(d), ring);
                    if (tr.rank(d)) m.paste(0, 0, IntMatrix::identity(tr.rank(d), ring));
                    return m;
                }
                if (d == kk) return cyc;
                return IntMatrix(y.rank(d), tr.rank(d), ring);
            },
            false);
        MinimalModel mm = minimal_model(tr);
        return TruncationPiece{mm.model, incl.compose_after(mm.from_model)};
    }
    /* side ge at kk: degrees > kk-1 verbatim, plus the image lattice of
     * d^{kk-1} in a fresh free module one degree below. */
    if (kk <= y.lo()) return TruncationPiece{y, ChainMap::identity(y)};
    if (kk > y.hi()) {
        Complex z = Complex::zero(ring);
        return TruncationPiece{z, ChainMap::zero(y, z)};
    }
    SmithForm f = smith_normal_form(y.diff(kk - 1));
    IntMatrix img(y.rank(kk), f.rank, ring);
    for (long t2 = 0; t2 < f.rank; ++t2)
        for (long r = 0; r < y.rank(kk); ++r)
            img.set(r, t2, ring.reduce(f.Uinv.at(r, t2) * f.D.at(t2, t2)));
    std::vector<long> ranks{f.rank};
    std::vector<IntMatrix> diffs{img};
    for (long d = kk; d <= y.hi(); ++d) ranks.push_back(y.rank(d));
    for (long d = kk; d < y.hi(); ++d) diffs.push_back(y.diff(d));
    Complex tr(ring, kk - 1, std::move(ranks), std::move(diffs));
    auto coords = solve_linear(img, y.diff(kk - 1));
    WL_REQUIRE(coords.has_value(), "t_truncate: image coordinates failed");
    ChainMap proj = ChainMap::build(
        y, tr,
        [&](long d) {
            if (d == kk - 1) return *coords;
            if (d >= kk) return IntMatrix::identity(y.rank(d), ring);
            return IntMatrix(tr.rank(d), y.rank(d), ring);
        },
        false);
    MinimalModel mm = minimal_model(tr);
    return TruncationPiece{mm.model, mm.to_model.compose_after(proj)};
}

Complex heart_model(const AbGroup& g, long degree, Ring ring) {
    if (g.is_trivial()) return Complex::zero(ring);
    if (ring.is_field()) {
        /* F_p-modules are free: the model is one free term. */
        return Complex::free_module(ring, degree, long(g.torsion.size()) + g.free_rank);
    }
    long t = long(g.torsion.size());
    long n = t + g.free_rank;
    if (t == 0) return Complex::free_module(ring, degree, n);
    IntMatrix d(n, t, ring);
    for (long i = 0; i < t; ++i) d.set(i, i, g.torsion[size_t(i)]);
    return Complex::two_term(ring, degree - 1, std::move(d));
}

TTower t_postnikov_tower(const Complex& y) {
    TTower tw;
    MinimalModel base = minimal_model(y);
    Ring ring = y.ring();
    if (base.model.is_zero()) {
        tw.t.push_back(base.model);
        return tw;
    }
    long qlo = base.model.lo(), qhi = base.model.hi();
    tw.qlo = qlo;
    Complex cur = base.model;
    tw.t.push_back(cur);
    for (long q = qlo; q <= qhi; ++q) {
        Subquotient hd = cur.homology_data(q);
        CanonicalGens cg = canonical_generators(hd.group);
        Complex pq = heart_model(hd.canonical(), 0, ring);
        /* mu: P_q[-q] -> T_q hitting the canonical homology generators. */
        Complex pq_shift = shift(pq, -q);
        ChainMap mu = ChainMap::build(
            pq_shift, cur,
            [&](long d) {
                IntMatrix m(cur.rank(d), pq_shift.rank(d), ring);
                if (d == q && pq_shift.rank(d) != 0) {
                    m.paste(0, 0, IntMatrix::mul(hd.sub, cg.gens));
                } else if (d == q - 1 && pq_shift.rank(d) != 0 && !ring.is_field()) {
                    /* torsion generators: lift order * cycle through d */
                    long col = 0;
                    for (size_t t2 = 0; t2 < cg.orders.size(); ++t2) {
                        if (cg.orders[t2] == 0) continue;
                        IntMatrix z = IntMatrix::mul(
                            hd.sub, cg.gens.col(long(t2)).scaled(cg.orders[t2]));
                        auto w = solve_linear(cur.diff(q - 1), z);
                        WL_REQUIRE(w.has_value(), "t_postnikov_tower: torsion lift failed");
                        for (long r = 0; r < cur.rank(q - 1); ++r) m.set(r, col, w->at(r, 0));
                        ++col;
                    }
                }
                return m;
            },
            true);
        ConeData cd = cone(mu);
        MinimalModel next = minimal_model(cd.cone);
        tw.hearts.push_back(pq);
        tw.mu.push_back(mu);
        tw.alpha.push_back(next.to_model.compose_after(cd.triangle.g));
        tw.beta.push_back(cd.triangle.h.compose_after(next.from_model));
        cur = next.model;
        tw.t.push_back(cur);
    }
    WL_REQUIRE(tw.t.back().is_zero(), "t_postnikov_tower: residue not exact");
    return tw;
}

AbGroup duality_pairing(const Complex& x, const Complex& y, long shift_by) {
    return homotopy_classes(x, y, shift_by);
}

CheckReport check_orthogonality(const WeightStructure& w, const TStructure& t,
                                const std::vector<Complex>& heart_generators,
                                const std::vector<Complex>& probes) {
    CheckReport rep;
    for (size_t gi = 0; gi < heart_generators.size(); ++gi) {
        const Complex& g = heart_generators[gi];
        if (!in_heart(g, w)) {
            rep.fail("generator#" + std::to_string(gi) + " is not in the weight heart");
            continue;
        }
        for (size_t pi = 0; pi < probes.size(); ++pi) {
            TruncationPiece up = t_truncate(probes[pi], 1, Side::ge, t);
            TruncationPiece dn = t_truncate(probes[pi], -1, Side::le, t);
            for (long extra = 0; extra <= 1; ++extra) {
                ++rep.checks;
                AbGroup a = homotopy_classes(g, shift(up.piece, -extra), 0);
                if (!a.is_trivial())
                    rep.fail("Phi(gen#" + std::to_string(gi) + ", t>=1 probe#" +
                             std::to_string(pi) + "[" + std::to_string(extra) +
                             "]) = " + a.to_string());
                ++rep.checks;
                AbGroup b = homotopy_classes(g, shift(dn.piece, extra), 0);
                if (!b.is_trivial())
                    rep.fail("Phi(gen#" + std::to_string(gi) + ", t<=-1 probe#" +
                             std::to_string(pi) + "[-" + std::to_string(extra) +
                             "]) = " + b.to_string());
            }
        }
    }
    return rep;
}

ExactCouple t_spectral_sequence(const Complex& x, const Complex& y, long extra_r) {
    TTower tw = t_postnikov_tower(y);
    Ring ring = x.ring();
    ExactCouple c;
    c.ring = ring;
    c.page = 2;
    c.jp = 1;
    c.jq = -1;
    if (x.is_zero() || tw.hearts.empty()) {
        c.pmax = -1;
        return c;
    }
    long qlo = tw.qlo, qhi = tw.qhi();
    c.qmin = qlo - extra_r - 1;
    c.qmax = qhi + extra_r + 1;
    c.pmin = -x.hi() - 2 - extra_r;
    c.pmax = -x.lo() + 2 + extra_r;

    std::map<std::pair<long, long>, std::shared_ptr<HomGroup>> homs;  // (q-index, shift)
    auto hom_t = [&](long qidx, long s) {  // Hom(x, T_{qidx}[s])
        auto key = std::make_pair(qidx, s);
        auto it = homs.find(key);
        if (it == homs.end()) {
            const Complex& tq = qidx <= qlo ? tw.t.front()
                                : qidx > qhi ? tw.t.back()
                                             : tw.t[size_t(qidx - qlo)];
            it = homs.emplace(key, std::make_shared<HomGroup>(
                                       homotopy_classes_data(x, tq, s)))
                     .first;
        }
        return it->second;
    };
    std::map<std::pair<long, long>, std::shared_ptr<HomGroup>> heart_homs;
    auto hom_p = [&](long qidx, long s) {  // Hom(x, P_{qidx}[s])
        auto key = std::make_pair(qidx, s);
        auto it = heart_homs.find(key);
        if (it == heart_homs.end()) {
            Complex pq = (qidx < qlo || qidx > qhi) ? Complex::zero(ring)
                                                    : tw.hearts[size_t(qidx - qlo)];
            it = heart_homs
                     .emplace(key, std::make_shared<HomGroup>(
                                       homotopy_classes_data(x, pq, s)))
                     .first;
        }
        return it->second;
    };

    for (long p = c.pmin; p <= c.pmax; ++p)
        for (long q = c.qmin; q <= c.qmax; ++q) {
            auto dd = hom_t(q, p + q - 1);
            if (!dd->canon.is_trivial() || dd->sq.group.gens > 0)
                c.D.emplace(PQ{p, q}, dd->sq);
            if (q >= qlo && q <= qhi) c.E.emplace(PQ{p, q}, hom_p(q, p)->sq);
        }
    for (long p = c.pmin; p <= c.pmax; ++p)
        for (long q = c.qmin; q <= c.qmax; ++q) {
            long s = p + q - 1;
            /* i: Hom(x, T_q[s]) -> Hom(x, T_{q+1}[s]) via alpha_q. */
            if (q >= qlo && q <= qhi) {
                c.map_i.emplace(
                    PQ{p, q},
                    hom_induced(*hom_t(q, s), *hom_t(q + 1, s), [&](const ChainMap& f) {
                        return shift(tw.alpha[size_t(q - qlo)], s).compose_after(f);
                    }));
            } else if (q > qhi || q < qlo) {
                /* identity levels: T_q = T_{q'} constant below qlo */
                if (q < qlo)
                    c.map_i.emplace(PQ{p, q},
                                    GroupMap::identity(hom_t(q, s)->sq.group));
            }
            /* j: Hom(x, T_q[s]) -> Hom(x, P_{q-1}[p+1]) via beta_{q-1}. */
            if (q - 1 >= qlo && q - 1 <= qhi) {
                c.map_j.emplace(
                    PQ{p, q},
                    hom_induced(*hom_t(q, s), *hom_p(q - 1, p + 1), [&](const ChainMap& f) {
                        return shift(tw.beta[size_t(q - 1 - qlo)], s).compose_after(f);
                    }));
            }
            /* k: Hom(x, P_q[p]) -> Hom(x, T_q[p+q]) via mu_q. */
            if (q >= qlo && q <= qhi) {
                c.map_k.emplace(
                    PQ{p, q},
                    hom_induced(*hom_p(q, p), *hom_t(q, p + q), [&](const ChainMap& f) {
                        return shift(tw.mu[size_t(q - qlo)], p + q).compose_after(f);
                    }));
            }
        }
    return c;
}

TSComparison compare_T_S(const FunctorHandle& h, const Complex& x, long r_max) {
    TSComparison out;
    const Complex& y = h.rep();
    ExactCouple t1 = build_weight_couple(h, x);
    ExactCouple s2 = t_spectral_sequence(x, y);
    if (r_max <= 0) {
        long span = (t1.pmax - t1.pmin) + 3;
        r_max = std::max<long>(3, std::min<long>(span, 8));
    }
    out.r_to = r_max;
    std::vector<SSPage> tp = ss_pages(t1, r_max, false);
    std::vector<SSPage> sp = ss_pages(s2, r_max, false);
    auto t_at = [&](long r) -> const SSPage& { return tp[size_t(r - 1)]; };
    auto s_at = [&](long r) -> const SSPage& { return sp[size_t(r - 2)]; };
    for (long r = 2; r <= r_max; ++r) {
        std::map<PQ, bool> keys;
        for (const auto& [pq, g] : t_at(r).entries) keys[pq] = true;
        for (const auto& [pq, g] : s_at(r).entries) keys[pq] = true;
        for (const auto& [pq, u] : keys) {
            (void)u;
            AbGroup a = t_at(r).at(pq.first, pq.second);
            AbGroup b = s_at(r).at(pq.first, pq.second);
            if (a != b) {
                out.pages_equal = false;
                out.failures.push_back("E_" + std::to_string(r) + "(" +
                                       std::to_string(pq.first) + "," +
                                       std::to_string(pq.second) + "): T=" + a.to_string() +
                                       " S=" + b.to_string());
            }
        }
    }
    /* Filtration clause: F^{-k}H^m(X) = im(Phi(X, t_{<=k}Y[m]) -> H^m(X)). */
    Tower tower = weight_postnikov_tower(x);
    long mlo = (x.is_zero() || y.is_zero()) ? 0 : y.lo() - x.hi();
    long mhi = (x.is_zero() || y.is_zero()) ? -1 : y.hi() - x.lo();
    for (long m = mlo; m <= mhi; ++m) {
        auto hx = h.eval_data(x, m);
        if (hx->canon.is_trivial()) continue;
        for (long k = y.lo() - 1; k <= y.hi() + 1; ++k) {
            /* weight side: F^{-k} = ker(H^m(X) -> H^m(Y_{-k})) */
            long p = -k;
            const Complex& yp = tower.y_at(p);
            IntMatrix fgens(hx->sq.group.gens, 0, x.ring());
            if (yp.is_zero()) {
                fgens = IntMatrix::identity(hx->sq.group.gens, x.ring());
            } else {
                const ChainMap& aug = (p >= tower.imax)
                                          ? tower.augment.back()
                                          : tower.augment[size_t(p - tower.imin)];
                fgens = kernel_subgroup(
                    precompose_induced(*hx, *h.eval_data(yp, m), aug));
            }
            TruncationPiece tk = t_truncate(y, k, Side::le);
            HomGroup src = homotopy_classes_data(x, tk.piece, m);
            GroupMap to_hx = hom_induced(src, *hx, [&](const ChainMap& f) {
                return shift(tk.structure, m).compose_after(f);
            });
            if (!subgroups_equal(hx->sq.group, fgens, to_hx.matrix)) {
                out.filtration_equal = false;
                out.failures.push_back("filtration at m=" + std::to_string(m) +
                                       " k=" + std::to_string(k));
            }
        }
    }
    /* Connecting-map compatibility at page 2: the derived D of T matches the
     * D of S and the two i-maps have matching kernel/image/cokernel data. */
    ExactCouple t2 = derive_couple(t1);
    for (long p = t2.pmin + 1; p <= t2.pmax - 1; ++p)
        for (long q = t2.qmin + 1; q <= t2.qmax - 1; ++q) {
            const Subquotient* dt = t2.entryD(p, q);
            const Subquotient* ds = s2.entryD(p, q);
            AbGroup a = dt ? dt->canonical() : AbGroup::trivial();
            AbGroup b = ds ? ds->canonical() : AbGroup::trivial();
            if (a != b) {
                /* only compare inside S's honest window */
                if (p >= s2.pmin + 1 && p <= s2.pmax - 1 && q >= s2.qmin + 1 &&
                    q <= s2.qmax - 1) {
                    out.connecting_compatible = false;
                    out.failures.push_back("D_2(" + std::to_string(p) + "," +
                                           std::to_string(q) + "): T=" + a.to_string() +
                                           " S=" + b.to_string());
                }
                continue;
            }
            auto it_t = t2.map_i.find({p, q});
            auto it_s = s2.map_i.find({p, q});
            if (it_t != t2.map_i.end() && it_s != s2.map_i.end()) {
                bool ok = kernel_group(it_t->second) == kernel_group(it_s->second) &&
                          image_group(it_t->second) == image_group(it_s->second) &&
                          cokernel_group(it_t->second) == cokernel_group(it_s->second);
                if (!ok && p >= s2.pmin + 1 && p <= s2.pmax - 1 && q >= s2.qmin + 1 &&
                    q <= s2.qmax - 1) {
                    out.connecting_compatible = false;
                    out.failures.push_back("i-map invariants differ at (" +
                                           std::to_string(p) + "," + std::to_string(q) + ")");
                }
            }
        }
    return out;
}

TwoRouteVerdict hom_into_t_slice(const Complex& x, const Complex& y, long i, long j) {
    TwoRouteVerdict v;
    Ring ring = x.ring();
    Complex slice = heart_model(y.homology(i), 0, ring);
    v.via_t_slice = homotopy_classes(x, slice, j);

    Complex wc = weight_complex(x);
    /* A^s = Phi(X^{-s}-term, Y[i]) with maps induced by the weight-complex
     * differential; the answer is ker/im at s = j. */
    auto term = [&](long p) { return Complex::free_module(ring, 0, wc.rank(p)); };
    auto term_map = [&](long p) {  // X^{p} -> X^{p+1} as heart objects
        return ChainMap::build(
            term(p), term(p + 1),
            [&](long d) {
                if (d == 0) return wc.diff(p);
                return IntMatrix(term(p + 1).rank(d), term(p).rank(d), ring);
            },
            false);
    };
    HomGroup a_mid = homotopy_classes_data(term(-j), y, i);
    HomGroup a_next = homotopy_classes_data(term(-j - 1), y, i);
    HomGroup a_prev = homotopy_classes_data(term(-j + 1), y, i);
    GroupMap out_map = precompose_induced(a_mid, a_next, term_map(-j - 1));
    GroupMap in_map = precompose_induced(a_prev, a_mid, term_map(-j));
    v.via_weight_complex =
        make_subquotient(a_mid.sq.group, kernel_subgroup(out_map), in_map.matrix)
            .canonical();
    v.equal = v.via_t_slice == v.via_weight_complex;
    return v;
}

WeightExactness weight_exactness(const EndoDescriptor& f, const WeightStructure& w_src,
                                 const WeightStructure& w_tgt) {
    /* Heart generator criterion: every heart object is a retract of sums of
     * the rank-one free module in the heart degree. */
    Complex gen = Complex::free_module(Ring::integers(), w_src.offset, 1);
    Complex image = shift(gen, f.shift_by);
    bool right = membership_test(image, 0, Side::ge, w_tgt);
    bool left = membership_test(image, 0, Side::le, w_tgt);
    if (left && right) return WeightExactness::both;
    if (left) return WeightExactness::left_exact;
    if (right) return WeightExactness::right_exact;
    return WeightExactness::neither;
}

PageMorphism compare_weight_ss(const FunctorHandle& h, const Complex& x,
                               const Tower& src_tower, const Tower& tgt_tower,
                               Rng* randomize) {
    long off = tgt_tower.heart_degree - src_tower.heart_degree;
    WL_REQUIRE(off >= 0,
               "compare_weight_ss: orient so the target offset is the larger one");
    WeightExactness cls = weight_exactness(
        EndoDescriptor{0}, WeightStructure{src_tower.heart_degree, false},
        WeightStructure{tgt_tower.heart_degree, false});
    WL_REQUIRE(cls == WeightExactness::both || cls == WeightExactness::left_exact ||
                   cls == WeightExactness::right_exact,
               "compare_weight_ss: functor is not weight-exact on either side");
    PageMorphism pm;
    pm.offset = off;
    /* Tower morphism tgt.Y_{i+off} -> src.Y_i over the identity. */
    TowerMorphism tm = lift_morphism_to_towers(ChainMap::identity(x), tgt_tower, src_tower,
                                               randomize, off);
    ExactCouple c_src1 = build_weight_couple(h, src_tower);
    ExactCouple c_tgt1 = build_weight_couple(h, tgt_tower);
    ExactCouple c_src2 = derive_couple(c_src1);
    ExactCouple c_tgt2 = derive_couple(c_tgt1);
    for (const auto& [pq, e2src] : c_src2.E) {
        auto [p, q] = pq;
        const Subquotient* e2tgt = c_tgt2.entryE(p + off, q - off);
        if (!e2tgt) continue;
        long i = p;
        if (i < tm.imin || i >= tm.imin + long(tm.on_factors.size())) continue;
        const ChainMap& fmap = tm.on_factors[size_t(i - tm.imin)];
        if (fmap.src().is_zero() || fmap.tgt().is_zero()) continue;
        /* E1-level map by precomposition with the factor morphism. */
        const Subquotient* e1src = c_src1.entryE(p, q);
        const Subquotient* e1tgt = c_tgt1.entryE(p + off, q - off);
        if (!e1src || !e1tgt) continue;
        GroupMap f_e1 = precompose_induced(*h.eval_data(src_tower.factor_at(p), p + q),
                                           *h.eval_data(tgt_tower.factor_at(p + off), p + q),
                                           fmap);
        pm.e2.emplace(pq, induced_map(f_e1, e2src, *e2tgt));
        pm.src_pres[pq] = e2src.group;
        pm.tgt_pres[pq] = e2tgt->group;
    }
    return pm;
}

}  // namespace wl
