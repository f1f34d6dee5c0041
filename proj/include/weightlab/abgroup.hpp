#pragma once

#include <string>
#include <vector>

#include "weightlab/snf.hpp"

namespace wl {

/* Canonical form of a finitely generated abelian group (or F_p-vector
 * space viewed as one): invariant factors d_1 | d_2 | ... with d_i >= 2,
 * plus free_rank copies of Z (encoded as trailing 0s). Two groups are
 * isomorphic iff their canonical forms compare equal. */
struct AbGroup {
    std::vector<Int> torsion;  // ascending by divisibility, each >= 2
    long free_rank = 0;

    static AbGroup trivial() { return {}; }

    bool is_trivial() const { return torsion.empty() && free_rank == 0; }
    bool operator==(const AbGroup& o) const {
        return torsion == o.torsion && free_rank == o.free_rank;
    }
    bool operator!=(const AbGroup& o) const { return !(*this == o); }

    /* [0, ..., 0, d_1, ..., d_k]: 0 encodes a free summand. */
    std::vector<Int> factor_list() const;
    std::string to_string() const;  // "Z + Z/2 + Z/4", "0"
};

AbGroup ab_direct_sum(const AbGroup& a, const AbGroup& b);

/* R^gens / (column span of rels), R = Z or F_p. */
struct Presentation {
    long gens = 0;
    IntMatrix rels;  // gens x nrels
    Ring ring = Ring::integers();

    static Presentation free(long n, Ring ring) {
        return Presentation{n, IntMatrix(n, 0, ring), ring};
    }
    static Presentation of(IntMatrix rels) {
        long g = rels.rows();
        Ring r = rels.ring();
        return Presentation{g, std::move(rels), r};
    }

    AbGroup canonical() const;
    /* Does v lie in the subgroup generated by the columns of gens_mat? */
    bool contains(const IntMatrix& gens_mat, const IntMatrix& v) const;
};

AbGroup cokernel_presentation(const IntMatrix& m);

/* A homomorphism between presented groups, given on chosen generators.
 * Well-definedness (relations map into relations) is checked on creation. */
struct GroupMap {
    Presentation src, tgt;
    IntMatrix matrix;  // tgt.gens x src.gens

    static GroupMap make(Presentation src, Presentation tgt, IntMatrix matrix);
    static GroupMap identity(const Presentation& p);
    static GroupMap zero(Presentation src, Presentation tgt);

    GroupMap compose_after(const GroupMap& first) const;  // this o first
    bool is_zero_map() const;
    bool equals(const GroupMap& o) const;  // same arrow, equality mod relations
};

GroupMap group_map_direct_sum(const GroupMap& a, const GroupMap& b);

/* Generators (as ambient columns) of ker(f) as a subgroup of f.src. */
IntMatrix kernel_subgroup(const GroupMap& f);
AbGroup kernel_group(const GroupMap& f);
AbGroup image_group(const GroupMap& f);
AbGroup cokernel_group(const GroupMap& f);

/* A subquotient (span sub)/(span killed) of a presented ambient group,
 * with enough data retained to induce maps. 'group' is presented on the
 * columns of 'sub'. */
struct Subquotient {
    Presentation ambient;
    IntMatrix sub;     // ambient.gens x s
    IntMatrix killed;  // ambient.gens x k
    Presentation group;

    AbGroup canonical() const { return group.canonical(); }
    /* Ambient representative of a class given in 'group' coordinates. */
    IntMatrix lift(const IntMatrix& coords) const { return IntMatrix::mul(sub, coords); }
    /* Coordinates of an ambient element that lies in span(sub)+relations;
     * throws if it does not. */
    IntMatrix classify(const IntMatrix& ambient_elt) const;
    bool contains_element(const IntMatrix& ambient_elt) const;
};

/* Requires span(killed) <= span(sub) modulo relations. */
Subquotient make_subquotient(Presentation ambient, IntMatrix sub, IntMatrix killed);

/* Whole group as a subquotient of itself (sub = identity, killed = 0). */
Subquotient full_subquotient(const Presentation& ambient);

/* The map on subquotients induced by an ambient homomorphism. Checks that
 * the ambient map carries sub into sub and killed into killed; reports the
 * broken containment otherwise. */
GroupMap induced_map(const GroupMap& ambient_map, const Subquotient& src,
                     const Subquotient& tgt);

/* Equality of subgroups span(a) + rels = span(b) + rels of a common ambient. */
bool subgroups_equal(const Presentation& ambient, const IntMatrix& a, const IntMatrix& b);
bool subgroup_contained(const Presentation& ambient, const IntMatrix& a, const IntMatrix& b);

/* Generators realizing the canonical decomposition: columns (in the
 * presentation's own coordinates) whose classes generate the group, with
 * orders matching the invariant factors (0 = infinite order; over F_p every
 * listed generator has order p). */
struct CanonicalGens {
    IntMatrix gens;           // pres.gens x k
    std::vector<Int> orders;  // torsion ascending, then 0s for free summands
};
CanonicalGens canonical_generators(const Presentation& pres);

/* im(f) = ker(g) inside the middle group (f: A -> B, g: B -> C). */
bool exact_at(const GroupMap& f, const GroupMap& g);

/* Map into a subquotient of the target: classify generator images. */
GroupMap compose_into_subquotient(const GroupMap& into_ambient, const Subquotient& sq);
/* Map out of a subquotient through its chosen generators. */
GroupMap compose_from_subgroup(const Subquotient& sq, const GroupMap& ambient_map);

}  // namespace wl
