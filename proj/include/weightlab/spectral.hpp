#pragma once

#include <map>

#include "weightlab/vtrunc.hpp"

namespace wl {

using PQ = std::pair<long, long>;

/* Bigraded exact couple over a finite window. Maps and their bidegrees:
 * i: D(p,q) -> D(p-1,q+1), j: D(p,q) -> E(p+jp,q+jq), k: E(p,q) -> D(p+1,q),
 * with (jp,jq) = (r-1, 1-r) on page r; the differential j o k has bidegree
 * (r, 1-r). Entries absent from the maps are zero groups. */
struct ExactCouple {
    Ring ring = Ring::integers();
    long page = 1;
    long jp = 0, jq = 0;
    std::map<PQ, Subquotient> D, E;
    std::map<PQ, GroupMap> map_i, map_j, map_k;
    /* window actually populated */
    long pmin = 0, pmax = -1, qmin = 0, qmax = -1;

    const Subquotient* entryD(long p, long q) const;
    const Subquotient* entryE(long p, long q) const;
    AbGroup groupE(long p, long q) const;
    GroupMap differential(long p, long q) const;  // j o k out of E(p,q)

    /* Exactness at D, E, D on interior lattice points. */
    CheckReport verify(long margin = 1) const;
};

ExactCouple derive_couple(const ExactCouple& c);

struct SSPage {
    long r = 1;
    std::map<PQ, AbGroup> entries;
    std::map<PQ, Presentation> pres;
    std::map<PQ, GroupMap> d;
    bool stable_from_prev = false;

    AbGroup at(long p, long q) const;
    bool only_entry(long p, long q) const;  // nonzero exactly at (p,q) or empty
};

/* Pages r0..r_max of the couple (r0 = its starting page), each re-derived
 * couple verified exact along the way. */
std::vector<SSPage> ss_pages(const ExactCouple& c, long r_max, bool verify = true);

/* The weight spectral sequence of H = Hom(-, Y) at X, built from the given
 * Postnikov tower: E_1^{pq} = H^{p+q}(factor X_p), D_1^{pq} = H^{p+q-1}(Y_p). */
ExactCouple build_weight_couple(const FunctorHandle& h, const Tower& tower, long extra_r = 4);
ExactCouple build_weight_couple(const FunctorHandle& h, const Complex& x, long extra_r = 4);

/* Abutment filtration F^p H^m(X) = ker(H^m(X) -> H^m(Y_{p})) together with
 * the cross-checks against the weight filtration, the tau_{<=k} image
 * description, and the E_infinity graded pieces. */
struct AbutmentReport {
    std::map<long, AbGroup> steps;        // p -> F^p H^m(X)
    bool matches_weight_filtration = true;
    bool matches_tau_image = true;
    bool matches_einf_graded = true;
    std::vector<std::string> failures;
};
AbutmentReport abutment_filtration(const FunctorHandle& h, const Complex& x, long m);

/* E_2^{pq} computed through the virtual-truncation description, with the
 * derived-couple cross-checks. */
struct E2Verdict {
    AbGroup via_couple, via_virtual;
    bool groups_equal = false;
    bool d2_compatible = false;  // D_2 matches its truncation description
};
E2Verdict e2_via_virtual(const FunctorHandle& h, const Complex& x, long p, long q);

/* E_r^{pq} against the windowed-truncation subquotient formula. */
struct ErVerdict {
    AbGroup via_pages, via_virtual;
    bool equal = false;
};
ErVerdict er_subquotient(const FunctorHandle& h, const Complex& x, long r, long p, long q);

/* Decreasing filtration of a bounded complex by saturated subcomplexes,
 * given by the step inclusions F^{s+1} -> F^s; piece(0) is the total
 * complex and the last piece is zero. */
struct FilteredComplex {
    Complex total;
    long smin = 0;                 // filtration degree of the total piece
    std::vector<Complex> pieces;   // pieces[t] = F^{smin+t}; pieces[0] = total
    std::vector<ChainMap> steps;   // F^{smin+t+1} -> F^{smin+t}

    long smax() const { return smin + long(pieces.size()) - 1; }
    const Complex& piece(long s) const;          // clamped
    ChainMap include_into_total(long s) const;   // composite of steps
    /* quotient complex F^s/F^{s+1} with the projection from F^s */
    std::pair<Complex, ChainMap> graded(long s) const;
};

FilteredComplex make_filtered(Complex total, long smin, std::vector<ChainMap> steps);
/* The stupid filtration by degree: F^s = (degrees >= s). */
FilteredComplex stupid_filtration(const Complex& x);

/* Classical spectral sequence of the filtered hom-complex Hom(total, Y),
 * computed by the cycle/boundary lattice formulas; fully independent of the
 * exact-couple machinery. Pages indexed r >= 1; E_1^{pq} = H^{p+q} of the
 * graded piece Hom(gr^{-p}, Y). */
std::vector<SSPage> classical_filtered_ss(const FilteredComplex& f, const FunctorHandle& h,
                                          long r_max);

struct TowerComparison {
    Tower tower;
    bool pages_agree = true;  // r >= 2 through r_max
    std::vector<std::string> failures;
};
/* Tower whose factors are the graded pieces (each must reduce to a heart
 * object in its filtration degree; error names the failing s), plus the
 * pagewise comparison of its weight SS against the classical one. */
TowerComparison tower_from_filtration(const FilteredComplex& f, const FunctorHandle& h,
                                      long r_max = 6);

}  // namespace wl
