#pragma once

#include <functional>
#include <optional>

#include "weightlab/complex.hpp"

namespace wl {

/* The total hom-complex of two bounded complexes: degree n part is
 * (+)_j Hom(X^j, Y^{n+j}), flattened block by block (within a block,
 * column-major over the X-basis). Cycles in degree q are exactly the chain
 * maps X -> Y[q]; boundaries are the null-homotopic ones. */
class HomSpace {
  public:
    HomSpace(Complex x, Complex y);

    const Complex& x() const { return x_; }
    const Complex& y() const { return y_; }
    long nlo() const { return nlo_; }  // degrees with possibly nonzero part
    long nhi() const { return nhi_; }
    long dim(long n) const;
    long block_offset(long n, long j) const;

    IntMatrix flatten(long n, const std::function<IntMatrix(long)>& comp_at) const;
    IntMatrix flatten_map(const ChainMap& f, long q) const;  // f: X -> Y[q]
    /* Column vector of degree q -> chain map X -> Y[q]. */
    ChainMap unflatten(long q, const IntMatrix& v) const;
    IntMatrix delta(long n) const;  // dim(n+1) x dim(n)

  private:
    Complex x_, y_;
    long nlo_, nhi_;
};

/* Hom_K(X, Y[q]) with representative tracking: the group of chain maps
 * X -> Y[q] modulo homotopy, presented on a basis of cycles. */
struct HomGroup {
    HomSpace space;
    long q;
    Subquotient sq;  // ambient: free module of chain maps; sub: cycles; killed: boundaries
    AbGroup canon;

    ChainMap rep(const IntMatrix& coords) const;      // class -> chain map X -> Y[q]
    IntMatrix class_of(const ChainMap& f) const;      // chain map -> class coordinates
    bool same_class(const ChainMap& f, const ChainMap& g) const;
};

HomGroup homotopy_classes_data(const Complex& x, const Complex& y, long q);
AbGroup homotopy_classes(const Complex& x, const Complex& y, long q);

/* Witness h with d h + h d = f, when one exists. */
std::optional<std::vector<IntMatrix>> null_homotopy_witness(const ChainMap& f);
bool is_null_homotopic(const ChainMap& f);
bool homotopic(const ChainMap& f, const ChainMap& g);

/* Map on hom groups induced by precomposition with phi: X' -> X
 * (both groups against the same Y and q). */
GroupMap precompose_induced(const HomGroup& src, const HomGroup& tgt, const ChainMap& phi);
/* Induced by postcomposition with psi: Y -> Y'. */
GroupMap postcompose_induced(const HomGroup& src, const HomGroup& tgt, const ChainMap& psi);
/* Hom_K(X, Y[q]) -> Hom_K(X, Y'[q']) induced by psi: Y[q] -> Y'[q'] given
 * as a chain map between the shifted complexes. */
GroupMap postcompose_shifted_induced(const HomGroup& src, const HomGroup& tgt,
                                     const ChainMap& psi);
/* General induced map: apply must carry chain maps X->Y[q] of src to chain
 * maps of tgt's shape, compatibly with homotopy. */
GroupMap hom_induced(const HomGroup& src, const HomGroup& tgt,
                     const std::function<ChainMap(const ChainMap&)>& apply);

/* Matrix of a linear operator between flattened hom-space degrees, given by
 * its action on raw graded maps (no chain condition assumed). */
IntMatrix linear_on_flat(const HomSpace& src, long nsrc, const HomSpace& tgt, long ntgt,
                         const std::function<ChainMap(const ChainMap&)>& apply);

/* Homotopy inverse of a homotopy equivalence (solves for the inverse and
 * its homotopies); throws if f is not an equivalence. */
ChainMap homotopy_inverse(const ChainMap& f);

/* Independent decision: compare homology in all degrees, then certify with
 * explicit mutually homotopy-inverse maps when asked. */
std::optional<std::pair<ChainMap, ChainMap>> find_equivalence(const Complex& x,
                                                              const Complex& y);

}  // namespace wl
