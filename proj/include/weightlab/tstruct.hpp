#pragma once

#include "weightlab/spectral.hpp"

namespace wl {

/* Canonical t-structure on the derived-category model: membership is pure
 * homology vanishing (no freeness condition on the boundary degree, unlike
 * the weight side). The offset gives the shifted structure, used by the
 * deliberately-mismatched negative tests. */
struct TStructure {
    long offset = 0;
};

bool t_membership(const Complex& x, long bound, Side side, const TStructure& t = {});

/* Smart truncation with a free model: le keeps homology in degrees <= k,
 * ge in degrees >= k. Structure map: le: piece -> Y; ge: Y -> piece. */
TruncationPiece t_truncate(const Complex& y, long k, Side side, const TStructure& t = {});

/* Free two-term complex with prescribed homology concentrated in `degree`. */
Complex heart_model(const AbGroup& g, long degree, Ring ring);

/* Postnikov tower of canonical t-truncations from below: T_{qlo} ~ Y,
 * T_{q+1} = minimal cone model killing H^q, with the triangle maps
 * P_q[-q] -> T_q -> T_{q+1} -> P_q[1-q]. */
struct TTower {
    long qlo = 0;                 // lowest homology degree
    std::vector<Complex> t;       // T_q for q = qlo .. qhi+1 (last ~ 0)
    std::vector<Complex> hearts;  // P_q, homology H^q(Y) in degree 0
    std::vector<ChainMap> mu;     // P_q[-q] -> T_q
    std::vector<ChainMap> alpha;  // T_q -> T_{q+1}
    std::vector<ChainMap> beta;   // T_{q+1} -> P_q[1-q]
    long qhi() const { return qlo + long(hearts.size()) - 1; }
};
TTower t_postnikov_tower(const Complex& y);

/* Phi(X, Y[shift]): the duality is literally Hom_K on this model. */
AbGroup duality_pairing(const Complex& x, const Complex& y, long shift_by);

/* Orthogonality of the weight structure and the t-structure across the
 * pairing: Phi(X, Z) = 0 for X in the w-heart generators and Z a t>=1 or
 * t<=-1 truncation (or shift thereof) of a probe. */
CheckReport check_orthogonality(const WeightStructure& w, const TStructure& t,
                                const std::vector<Complex>& heart_generators,
                                const std::vector<Complex>& probes);

/* The t-truncation spectral sequence S of Phi(X, -) at Y, starting at page
 * 2: E_2^{pq} = Phi(X, (heart model of H^q Y)[p]). */
ExactCouple t_spectral_sequence(const Complex& x, const Complex& y, long extra_r = 4);

struct TSComparison {
    bool pages_equal = true;
    bool filtration_equal = true;
    bool connecting_compatible = true;  // D_2 groups + the i-map invariants
    long r_from = 2, r_to = 2;
    std::vector<std::string> failures;
};
TSComparison compare_T_S(const FunctorHandle& h, const Complex& x, long r_max = 0);

struct TwoRouteVerdict {
    AbGroup via_t_slice, via_weight_complex;
    bool equal = false;
};
/* Phi(X, Y^{t=i}[j]) against the kernel/image subquotient of the weight
 * complex of X paired with Y[i]. */
TwoRouteVerdict hom_into_t_slice(const Complex& x, const Complex& y, long i, long j);

enum class WeightExactness { left_exact, right_exact, both, neither };
/* The supported endofunctors: X -> X[shift_by] viewed from (C, w_src) to
 * (C, w_tgt); classified through the heart generator. */
struct EndoDescriptor {
    long shift_by = 0;
};
WeightExactness weight_exactness(const EndoDescriptor& f, const WeightStructure& w_src,
                                 const WeightStructure& w_tgt);

/* Comparison morphism of weight spectral sequences along the identity
 * between w(a) and w(b), b >= a: page maps E_2(T_a)(p,q) -> E_2(T_b)
 * (p+o, q-o) with o = b - a, induced by a (possibly randomized) morphism
 * of Postnikov towers. */
struct PageMorphism {
    long offset = 0;
    std::map<PQ, GroupMap> e2;
    std::map<PQ, Presentation> src_pres, tgt_pres;
};
PageMorphism compare_weight_ss(const FunctorHandle& h, const Complex& x,
                               const Tower& src_tower, const Tower& tgt_tower,
                               Rng* randomize = nullptr);

}  // namespace wl
