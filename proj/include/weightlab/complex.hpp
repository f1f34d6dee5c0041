#pragma once

#include <vector>

#include "weightlab/abgroup.hpp"

namespace wl {

/* Bounded cochain complex of finitely generated free modules over Z or F_p.
 * Differentials raise degree by one; d(i) maps degree i to i+1 and is stored
 * as a rank(i+1) x rank(i) matrix. The zero complex has empty support. */
class Complex {
  public:
    Complex() : ring_(Ring::integers()), lo_(0) {}
    Complex(Ring ring, long lo, std::vector<long> ranks, std::vector<IntMatrix> diffs);

    static Complex zero(Ring ring) { return Complex(ring, 0, {}, {}); }
    /* Free module of the given rank concentrated in one degree. */
    static Complex free_module(Ring ring, long degree, long rank);
    /* Two terms [R^r --m--> R^r'] in degrees (degree, degree+1). */
    static Complex two_term(Ring ring, long degree, IntMatrix m);

    const Ring& ring() const { return ring_; }
    bool is_zero() const { return ranks_.empty(); }
    long lo() const { return lo_; }
    long hi() const { return lo_ + long(ranks_.size()) - 1; }  // < lo() when zero
    long rank(long degree) const;
    long total_rank() const;
    /* rank(degree+1) x rank(degree); zero-shaped outside the support. */
    IntMatrix diff(long degree) const;

    AbGroup homology(long degree) const;
    /* Cycles/boundaries of degree i as a subquotient of the free ambient. */
    Subquotient homology_data(long degree) const;
    bool is_exact_everywhere() const;

    bool operator==(const Complex& o) const;
    std::string to_string() const;
    std::string fingerprint() const;  // injective serialization, used as cache key

  private:
    Ring ring_;
    long lo_;
    std::vector<long> ranks_;
    std::vector<IntMatrix> diffs_;  // diffs_[i]: degree lo_+i -> lo_+i+1
    void validate() const;
    void normalize();
};

/* Degreewise map of complexes commuting with the differentials (checked). */
class ChainMap {
  public:
    ChainMap() = default;
    ChainMap(Complex src, Complex tgt, long clo, std::vector<IntMatrix> comps,
             bool check = true);

    static ChainMap zero(Complex src, Complex tgt);
    static ChainMap identity(const Complex& x);
    /* Build from a per-degree component callback over the combined support. */
    template <typename F>
    static ChainMap build(const Complex& src, const Complex& tgt, F&& comp_at,
                          bool check = true) {
        long lo = std::min(src.lo(), tgt.lo());
        long hi = std::max(src.hi(), tgt.hi());
        std::vector<IntMatrix> comps;
        for (long d = lo; d <= hi; ++d) comps.push_back(comp_at(d));
        return ChainMap(src, tgt, lo, std::move(comps), check);
    }

    const Complex& src() const { return src_; }
    const Complex& tgt() const { return tgt_; }
    IntMatrix comp(long degree) const;

    ChainMap compose_after(const ChainMap& first) const;  // this o first
    ChainMap operator+(const ChainMap& o) const;
    ChainMap operator-() const;
    ChainMap operator-(const ChainMap& o) const { return *this + (-o); }
    ChainMap scaled(const Int& c) const;
    bool is_zero_map() const;

  private:
    Complex src_, tgt_;
    long clo_ = 0;
    std::vector<IntMatrix> comps_;
};

/* shift(X, n)^i = X^{i+n}; the differential picks up the sign (-1)^n. */
Complex shift(const Complex& x, long n);
ChainMap shift(const ChainMap& f, long n);

struct Triangle {
    Complex a, b, c;
    ChainMap f;  // a -> b
    ChainMap g;  // b -> c
    ChainMap h;  // c -> a[1]
};

Triangle rotate(const Triangle& t);  // b -> c -> a[1] -> b[1]

/* cone(f)^i = src^{i+1} (+) tgt^i with the usual upper-triangular
 * differential; returns the full triangle src -> tgt -> cone -> src[1]. */
struct ConeData {
    Complex cone;
    Triangle triangle;
};
ConeData cone(const ChainMap& f);

struct SumData {
    Complex sum;
    ChainMap inj_left, inj_right;   // X -> X(+)Y, Y -> X(+)Y
    ChainMap proj_left, proj_right;
};
SumData direct_sum(const Complex& x, const Complex& y);

/* Deformation retract onto a model with no invertible differential entries:
 * over F_p all differentials vanish, over Z no unit invariant factors remain.
 * to_model o from_model = id strictly; from_model o to_model ~ id. */
struct MinimalModel {
    Complex model;
    ChainMap to_model;    // X -> model
    ChainMap from_model;  // model -> X
};
MinimalModel minimal_model(const Complex& x);

/* Homology of X and Y agree in every degree; over the hereditary base rings
 * this decides homotopy equivalence of bounded complexes of frees. */
bool homotopy_equivalent(const Complex& x, const Complex& y);

}  // namespace wl
