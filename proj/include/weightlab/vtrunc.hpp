#pragma once

#include <map>
#include <memory>
#include <mutex>

#include "weightlab/weight.hpp"

namespace wl {

/* The representable cohomological functor H = Hom_K(-, Y) with a
 * synchronized evaluation cache. H^q(X) is the group of homotopy classes
 * X -> Y[q]; evaluation at a shifted argument folds into q. */
class FunctorHandle {
  public:
    explicit FunctorHandle(Complex rep) : rep_(std::move(rep)) {}

    const Complex& rep() const { return rep_; }
    AbGroup evaluate(const Complex& x, long q) const;
    /* Full data (shared, cached): presentation + representative tracking. */
    std::shared_ptr<const HomGroup> eval_data(const Complex& x, long q) const;
    /* Cached minimal model of an argument complex. */
    const MinimalModel& model_of(const Complex& x) const;

  private:
    Complex rep_;
    mutable std::mutex mu_;
    mutable std::map<std::pair<std::string, long>, std::shared_ptr<const HomGroup>> homs_;
    mutable std::map<std::string, std::shared_ptr<const MinimalModel>> models_;
};

enum class VKind { H1, H2 };

/* A (possibly nested) virtual truncation of H^q: image of the connecting
 * map between weight truncations. Nodes form a small expression tree so the
 * composition identities can be evaluated literally. */
class VFunctor {
  public:
    /* Base functor X |-> H^q(X). */
    static std::shared_ptr<VFunctor> base(const FunctorHandle& h, long q);
    /* im(G(w_{<=k} -) -> G(w_{<=k+j} -)) resp. the >= version. */
    static std::shared_ptr<VFunctor> truncate(std::shared_ptr<VFunctor> inner, VKind kind,
                                              long k, long j);

    struct Value {
        AbGroup canon;
        Presentation pres;
        Subquotient sq;  // over the inner evaluation at the outer truncation
    };

    const Value& eval(const Complex& x) const;
    /* Contravariant induced map: phi: A -> B gives eval(B) -> eval(A). */
    GroupMap induced(const ChainMap& phi, const Complex& a, const Complex& b) const;

  private:
    VFunctor() = default;
    const FunctorHandle* h_ = nullptr;
    long q_ = 0;
    std::shared_ptr<VFunctor> inner_;
    VKind kind_ = VKind::H1;
    long k_ = 0, j_ = 1;
    mutable std::mutex mu_;
    mutable std::map<std::string, std::shared_ptr<const Value>> cache_;

    Complex outer_trunc(const Complex& x) const;   // w_{<=k+j} or w_{>=k+j}
    Complex inner_trunc(const Complex& x) const;   // w_{<=k} or w_{>=k}
    ChainMap connecting(const Complex& x) const;   // outer -> inner (le) or incl (ge)
    ChainMap truncate_map(const ChainMap& phi, const Complex& a, const Complex& b) const;
};

/* Convenience evaluators for the named truncations. */
AbGroup virtual_truncation(const FunctorHandle& h, VKind kind, long k, long j,
                           const Complex& x, long q = 0);
AbGroup tau_le(const FunctorHandle& h, long k, const Complex& x, long q = 0);
AbGroup tau_ge(const FunctorHandle& h, long k, const Complex& x, long q = 0);
/* tau_{[m+1,k]}H = (H_2^{m,1})_1^{k,1} */
AbGroup tau_window(const FunctorHandle& h, long m, long k, const Complex& x, long q = 0);
/* H^{tau=k}(X) = (H_1^{01})_2^{-1,1}(X[k]) */
AbGroup tau_eq(const FunctorHandle& h, long k, const Complex& x, long q = 0);

/* H1 evaluated through explicitly given (e.g. randomized) decompositions at
 * levels k and k+j, with the connecting morphism lifted from the identity. */
AbGroup h1_with_decompositions(const FunctorHandle& h, const Complex& x,
                               const WeightDecomposition& at_k,
                               const WeightDecomposition& at_kj, long q = 0);
AbGroup h2_with_decompositions(const FunctorHandle& h, const Complex& x,
                               const WeightDecomposition& at_k,
                               const WeightDecomposition& at_kj, long q = 0);

/* One node of the long exact sequence of virtual truncations, evaluated at
 * X with the boundary maps assembled from the decomposition triangles. */
struct VirtualLes {
    /* groups in order: ... H2(X[n+1]), H1(X[n]), H(X[n]), H2(X[n]), H1(X[n-1]) ... */
    std::vector<AbGroup> groups;
    std::vector<std::string> labels;
    bool exact = false;
    std::vector<std::string> failures;
};
VirtualLes virtual_les(const FunctorHandle& h, long k, const Complex& x);

/* Weight filtration W^i(H)(X) = im(H(w_{<=i}X) -> H(X)) as a subgroup. */
Subquotient weight_filtration(const FunctorHandle& h, long i, const Complex& x, long q = 0);

/* The kernel-surjectivity condition on the Hom-complex of a distinguished
 * triangle, checked against probe triangles. */
CheckReport check_niceness(const Triangle& target, const std::vector<Triangle>& probes);

}  // namespace wl
