#include "weightlab/abgroup.hpp"

#include <sstream>

namespace wl {

std::vector<Int> AbGroup::factor_list() const {
    std::vector<Int> f(size_t(free_rank), Int(0));
    f.insert(f.end(), torsion.begin(), torsion.end());
    return f;
}

std::string AbGroup::to_string() const {
    if (is_trivial()) return "0";
    std::ostringstream os;
    bool first = true;
    for (long i = 0; i < free_rank; ++i) {
        os << (first ? "" : " + ") << "Z";
        first = false;
    }
    for (const Int& d : torsion) {
        os << (first ? "" : " + ") << "Z/" << d.get_str();
        first = false;
    }
    return os.str();
}

AbGroup ab_direct_sum(const AbGroup& a, const AbGroup& b) {
    /* Re-canonicalize the combined factor multiset via a diagonal presentation. */
    std::vector<Int> t;
    t.insert(t.end(), a.torsion.begin(), a.torsion.end());
    t.insert(t.end(), b.torsion.begin(), b.torsion.end());
    IntMatrix d(long(t.size()), long(t.size()), Ring::integers());
    for (long i = 0; i < long(t.size()); ++i) d.set(i, i, t[size_t(i)]);
    AbGroup r = Presentation::of(std::move(d)).canonical();
    r.free_rank += a.free_rank + b.free_rank;
    return r;
}

AbGroup Presentation::canonical() const {
    WL_REQUIRE(rels.rows() == gens, "Presentation: relation rows != generators");
    SmithForm f = smith_normal_form(rels);
    AbGroup g;
    g.free_rank = gens - f.rank;
    if (ring.is_field()) {
        g.torsion.assign(size_t(g.free_rank), Int(ring.p));
        g.free_rank = 0;
        return g;
    }
    for (const Int& d : f.invariant_factors())
        if (d != 1) g.torsion.push_back(d);
    return g;
}

bool Presentation::contains(const IntMatrix& gens_mat, const IntMatrix& v) const {
    return solve_linear(IntMatrix::hstack(gens_mat, rels), v).has_value();
}

AbGroup cokernel_presentation(const IntMatrix& m) {
    return Presentation::of(m).canonical();
}

GroupMap GroupMap::make(Presentation src, Presentation tgt, IntMatrix matrix) {
    WL_REQUIRE(matrix.rows() == tgt.gens && matrix.cols() == src.gens,
               "GroupMap: matrix shape mismatch");
    WL_REQUIRE(src.ring == tgt.ring, "GroupMap: ring mismatch");
    IntMatrix moved = IntMatrix::mul(matrix, src.rels);
    WL_REQUIRE(solve_linear(tgt.rels, moved).has_value(),
               "GroupMap: not well defined (relations not preserved)");
    return GroupMap{std::move(src), std::move(tgt), std::move(matrix)};
}

GroupMap GroupMap::identity(const Presentation& p) {
    return GroupMap{p, p, IntMatrix::identity(p.gens, p.ring)};
}

GroupMap GroupMap::zero(Presentation src, Presentation tgt) {
    IntMatrix z(tgt.gens, src.gens, src.ring);
    return GroupMap{std::move(src), std::move(tgt), std::move(z)};
}

GroupMap GroupMap::compose_after(const GroupMap& first) const {
    WL_REQUIRE(first.tgt.gens == src.gens, "GroupMap composition: middle mismatch");
    return GroupMap{first.src, tgt, IntMatrix::mul(matrix, first.matrix)};
}

bool GroupMap::is_zero_map() const {
    return solve_linear(tgt.rels, matrix).has_value();
}

bool GroupMap::equals(const GroupMap& o) const {
    if (matrix.rows() != o.matrix.rows() || matrix.cols() != o.matrix.cols()) return false;
    return solve_linear(tgt.rels, matrix - o.matrix).has_value();
}

GroupMap group_map_direct_sum(const GroupMap& a, const GroupMap& b) {
    Presentation src{a.src.gens + b.src.gens, IntMatrix::diag_sum(a.src.rels, b.src.rels),
                     a.src.ring};
    Presentation tgt{a.tgt.gens + b.tgt.gens, IntMatrix::diag_sum(a.tgt.rels, b.tgt.rels),
                     a.tgt.ring};
    return GroupMap{std::move(src), std::move(tgt),
                    IntMatrix::diag_sum(a.matrix, b.matrix)};
}

IntMatrix kernel_subgroup(const GroupMap& f) {
    /* x with f(x) in span(tgt.rels); the x-part of ker [matrix | rels]. */
    IntMatrix big = kernel_basis(IntMatrix::hstack(f.matrix, f.tgt.rels));
    IntMatrix x(f.src.gens, big.cols(), f.matrix.ring());
    for (long i = 0; i < f.src.gens; ++i)
        for (long j = 0; j < big.cols(); ++j) x.set(i, j, big.at(i, j));
    return x;
}

AbGroup kernel_group(const GroupMap& f) {
    return make_subquotient(f.src, kernel_subgroup(f), f.src.rels).canonical();
}

AbGroup image_group(const GroupMap& f) {
    return make_subquotient(f.tgt, f.matrix, f.tgt.rels).canonical();
}

AbGroup cokernel_group(const GroupMap& f) {
    return Presentation::of(IntMatrix::hstack(f.matrix, f.tgt.rels)).canonical();
}

IntMatrix Subquotient::classify(const IntMatrix& ambient_elt) const {
    auto sol = solve_linear(IntMatrix::hstack(sub, IntMatrix::hstack(killed, ambient.rels)),
                            ambient_elt);
    WL_REQUIRE(sol.has_value(), "Subquotient::classify: element not in the subgroup");
    IntMatrix coords(sub.cols(), ambient_elt.cols(), sub.ring());
    for (long i = 0; i < sub.cols(); ++i)
        for (long j = 0; j < ambient_elt.cols(); ++j) coords.set(i, j, sol->at(i, j));
    return coords;
}

bool Subquotient::contains_element(const IntMatrix& ambient_elt) const {
    return solve_linear(IntMatrix::hstack(sub, IntMatrix::hstack(killed, ambient.rels)),
                        ambient_elt)
        .has_value();
}

Subquotient make_subquotient(Presentation ambient, IntMatrix sub, IntMatrix killed) {
    WL_REQUIRE(sub.rows() == ambient.gens && killed.rows() == ambient.gens,
               "make_subquotient: generator shape mismatch");
    WL_REQUIRE(solve_linear(IntMatrix::hstack(sub, ambient.rels), killed).has_value(),
               "make_subquotient: killed subgroup not contained in sub");
    /* Relations of the quotient: x with sub*x in span(killed) + span(rels). */
    IntMatrix big =
        kernel_basis(IntMatrix::hstack(sub, IntMatrix::hstack(killed, ambient.rels)));
    IntMatrix rels(sub.cols(), big.cols(), sub.ring());
    for (long i = 0; i < sub.cols(); ++i)
        for (long j = 0; j < big.cols(); ++j) rels.set(i, j, big.at(i, j));
    Presentation group{sub.cols(), std::move(rels), ambient.ring};
    return Subquotient{std::move(ambient), std::move(sub), std::move(killed),
                       std::move(group)};
}

Subquotient full_subquotient(const Presentation& ambient) {
    return make_subquotient(ambient, IntMatrix::identity(ambient.gens, ambient.ring),
                            ambient.rels);
}

GroupMap induced_map(const GroupMap& ambient_map, const Subquotient& src,
                     const Subquotient& tgt) {
    WL_REQUIRE(ambient_map.src.gens == src.ambient.gens &&
                   ambient_map.tgt.gens == tgt.ambient.gens,
               "induced_map: ambient mismatch");
    IntMatrix tgt_span = IntMatrix::hstack(tgt.sub, IntMatrix::hstack(tgt.killed,
                                                                      tgt.ambient.rels));
    auto on_sub = solve_linear(tgt_span, IntMatrix::mul(ambient_map.matrix, src.sub));
    WL_REQUIRE(on_sub.has_value(),
               "induced_map: ambient map does not carry sub into sub");
    auto on_killed =
        solve_linear(IntMatrix::hstack(tgt.killed, tgt.ambient.rels),
                     IntMatrix::mul(ambient_map.matrix, src.killed));
    WL_REQUIRE(on_killed.has_value(),
               "induced_map: ambient map does not carry killed into killed");
    IntMatrix m(tgt.sub.cols(), src.sub.cols(), src.sub.ring());
    for (long i = 0; i < tgt.sub.cols(); ++i)
        for (long j = 0; j < src.sub.cols(); ++j) m.set(i, j, on_sub->at(i, j));
    return GroupMap::make(src.group, tgt.group, std::move(m));
}

bool subgroup_contained(const Presentation& ambient, const IntMatrix& a, const IntMatrix& b) {
    return solve_linear(IntMatrix::hstack(b, ambient.rels), a).has_value();
}

bool exact_at(const GroupMap& f, const GroupMap& g) {
    WL_REQUIRE(f.tgt.gens == g.src.gens, "exact_at: maps not composable");
    if (!g.compose_after(f).is_zero_map()) return false;
    return subgroups_equal(f.tgt, f.matrix, kernel_subgroup(g));
}

GroupMap compose_into_subquotient(const GroupMap& into_ambient, const Subquotient& sq) {
    IntMatrix m(sq.group.gens, into_ambient.src.gens, into_ambient.matrix.ring());
    for (long c = 0; c < into_ambient.src.gens; ++c) {
        IntMatrix coords = sq.classify(into_ambient.matrix.col(c));
        for (long r = 0; r < m.rows(); ++r) m.set(r, c, coords.at(r, 0));
    }
    return GroupMap::make(into_ambient.src, sq.group, std::move(m));
}

GroupMap compose_from_subgroup(const Subquotient& sq, const GroupMap& ambient_map) {
    IntMatrix m = IntMatrix::mul(ambient_map.matrix, sq.sub);
    return GroupMap::make(sq.group, ambient_map.tgt, std::move(m));
}

CanonicalGens canonical_generators(const Presentation& pres) {
    SmithForm f = smith_normal_form(pres.rels);
    CanonicalGens out{IntMatrix(pres.gens, 0, pres.ring), {}};
    std::vector<long> keep_torsion, keep_free;
    long n = std::min(f.D.rows(), f.D.cols());
    for (long i = 0; i < n; ++i) {
        const Int& d = f.D.at(i, i);
        if (d == 0) continue;
        if (!pres.ring.is_unit(d)) keep_torsion.push_back(i);
    }
    for (long i = f.rank; i < pres.gens; ++i) keep_free.push_back(i);
    IntMatrix gens(pres.gens, long(keep_torsion.size() + keep_free.size()), pres.ring);
    long col = 0;
    /* In coordinates y = U x the relation lattice is diagonal, so the classes
     * of Uinv e_i generate with order D_ii. */
    for (long i : keep_torsion) {
        for (long r = 0; r < pres.gens; ++r) gens.set(r, col, f.Uinv.at(r, i));
        out.orders.push_back(f.D.at(i, i));
        ++col;
    }
    for (long i : keep_free) {
        for (long r = 0; r < pres.gens; ++r) gens.set(r, col, f.Uinv.at(r, i));
        out.orders.push_back(pres.ring.is_field() ? Int(pres.ring.p) : Int(0));
        ++col;
    }
    out.gens = std::move(gens);
    return out;
}

bool subgroups_equal(const Presentation& ambient, const IntMatrix& a, const IntMatrix& b) {
    return subgroup_contained(ambient, a, b) && subgroup_contained(ambient, b, a);
}

}  // namespace wl
