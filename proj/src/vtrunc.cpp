#include "weightlab/vtrunc.hpp"

namespace wl {

namespace {

Complex stupid_le_cx(const Complex& m, long k) {
    if (m.is_zero() || k >= m.hi()) return m;
    if (k < m.lo()) return Complex::zero(m.ring());
    std::vector<long> ranks;
    std::vector<IntMatrix> diffs;
    for (long d = m.lo(); d <= k; ++d) ranks.push_back(m.rank(d));
    for (long d = m.lo(); d < k; ++d) diffs.push_back(m.diff(d));
    return Complex(m.ring(), m.lo(), std::move(ranks), std::move(diffs));
}

Complex stupid_ge_cx(const Complex& m, long k) {
    if (m.is_zero() || k <= m.lo()) return m;
    if (k > m.hi()) return Complex::zero(m.ring());
    std::vector<long> ranks;
    std::vector<IntMatrix> diffs;
    for (long d = k; d <= m.hi(); ++d) ranks.push_back(m.rank(d));
    for (long d = k; d < m.hi(); ++d) diffs.push_back(m.diff(d));
    return Complex(m.ring(), k, std::move(ranks), std::move(diffs));
}

ChainMap overlay(const Complex& src, const Complex& tgt) {
    /* Identity on the common degreewise part (slices of one model). */
    return ChainMap::build(
        src, tgt,
        [&](long d) {
            IntMatrix m(tgt.rank(d), src.rank(d), src.ring());
            long n = std::min(m.rows(), m.cols());
            for (long i = 0; i < n; ++i) m.set(i, i, 1);
            return m;
        },
        false);
}

}  // namespace

AbGroup FunctorHandle::evaluate(const Complex& x, long q) const {
    return eval_data(x, q)->canon;
}

std::shared_ptr<const HomGroup> FunctorHandle::eval_data(const Complex& x, long q) const {
    std::pair<std::string, long> key{x.fingerprint(), q};
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = homs_.find(key);
        if (it != homs_.end()) return it->second;
    }
    auto data = std::make_shared<const HomGroup>(homotopy_classes_data(x, rep_, q));
    std::lock_guard<std::mutex> lk(mu_);
    auto [it, inserted] = homs_.emplace(key, data);
    return it->second;
}

const MinimalModel& FunctorHandle::model_of(const Complex& x) const {
    std::string key = x.fingerprint();
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = models_.find(key);
        if (it != models_.end()) return *it->second;
    }
    auto mm = std::make_shared<const MinimalModel>(minimal_model(x));
    std::lock_guard<std::mutex> lk(mu_);
    auto [it, inserted] = models_.emplace(key, mm);
    return *it->second;
}

std::shared_ptr<VFunctor> VFunctor::base(const FunctorHandle& h, long q) {
    auto f = std::shared_ptr<VFunctor>(new VFunctor());
    f->h_ = &h;
    f->q_ = q;
    return f;
}

std::shared_ptr<VFunctor> VFunctor::truncate(std::shared_ptr<VFunctor> inner, VKind kind,
                                             long k, long j) {
    WL_REQUIRE(j > 0, "VFunctor::truncate: needs j > 0");
    auto f = std::shared_ptr<VFunctor>(new VFunctor());
    f->h_ = inner->h_;
    f->q_ = inner->q_;
    f->inner_ = std::move(inner);
    f->kind_ = kind;
    f->k_ = k;
    f->j_ = j;
    return f;
}

Complex VFunctor::inner_trunc(const Complex& x) const {
    const Complex& m = h_->model_of(x).model;
    return kind_ == VKind::H1 ? stupid_le_cx(m, k_) : stupid_ge_cx(m, k_);
}

Complex VFunctor::outer_trunc(const Complex& x) const {
    const Complex& m = h_->model_of(x).model;
    return kind_ == VKind::H1 ? stupid_le_cx(m, k_ + j_) : stupid_ge_cx(m, k_ + j_);
}

ChainMap VFunctor::connecting(const Complex& x) const {
    return overlay(outer_trunc(x), inner_trunc(x));
}

ChainMap VFunctor::truncate_map(const ChainMap& phi, const Complex& a,
                                const Complex& b) const {
    /* Conjugate through the minimal models, then slice degreewise; stupid
     * truncation is strictly functorial on degreewise maps. */
    const MinimalModel& ma = h_->model_of(a);
    const MinimalModel& mb = h_->model_of(b);
    ChainMap conj = mb.to_model.compose_after(phi).compose_after(ma.from_model);
    Complex sa = outer_trunc(a), sb = outer_trunc(b);
    return ChainMap::build(
        sa, sb,
        [&](long d) {
            IntMatrix c = conj.comp(d);
            IntMatrix out(sb.rank(d), sa.rank(d), sa.ring());
            if (sb.rank(d) != 0 && sa.rank(d) != 0) out.paste(0, 0, c);
            return out;
        },
        false);
}

const VFunctor::Value& VFunctor::eval(const Complex& x) const {
    std::string key = x.fingerprint();
    {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return *it->second;
    }
    std::shared_ptr<const Value> val;
    if (!inner_) {
        auto hg = h_->eval_data(x, q_);
        val = std::make_shared<const Value>(Value{hg->canon, hg->sq.group, hg->sq});
    } else {
        Complex in_cx = inner_trunc(x);
        Complex out_cx = outer_trunc(x);
        const Value& b = inner_->eval(out_cx);
        GroupMap conn = inner_->induced(connecting(x), out_cx, in_cx);
        Subquotient sq = make_subquotient(b.pres, conn.matrix, b.pres.rels);
        val = std::make_shared<const Value>(Value{sq.canonical(), sq.group, sq});
    }
    std::lock_guard<std::mutex> lk(mu_);
    auto [it, inserted] = cache_.emplace(key, val);
    return *it->second;
}

GroupMap VFunctor::induced(const ChainMap& phi, const Complex& a, const Complex& b) const {
    if (!inner_) {
        auto src = h_->eval_data(b, q_);
        auto tgt = h_->eval_data(a, q_);
        return precompose_induced(*src, *tgt, phi);
    }
    ChainMap outer_phi = truncate_map(phi, a, b);
    GroupMap amb = inner_->induced(outer_phi, outer_trunc(a), outer_trunc(b));
    return induced_map(amb, eval(b).sq, eval(a).sq);
}

AbGroup virtual_truncation(const FunctorHandle& h, VKind kind, long k, long j,
                           const Complex& x, long q) {
    auto node = VFunctor::truncate(VFunctor::base(h, q), kind, k, j);
    return node->eval(x).canon;
}

AbGroup tau_le(const FunctorHandle& h, long k, const Complex& x, long q) {
    return virtual_truncation(h, VKind::H1, k, 1, x, q);
}

AbGroup tau_ge(const FunctorHandle& h, long k, const Complex& x, long q) {
    return virtual_truncation(h, VKind::H2, k - 1, 1, x, q);
}

AbGroup tau_window(const FunctorHandle& h, long m, long k, const Complex& x, long q) {
    auto node = VFunctor::truncate(
        VFunctor::truncate(VFunctor::base(h, q), VKind::H2, m, 1), VKind::H1, k, 1);
    return node->eval(x).canon;
}

AbGroup tau_eq(const FunctorHandle& h, long k, const Complex& x, long q) {
    auto node = VFunctor::truncate(
        VFunctor::truncate(VFunctor::base(h, q), VKind::H1, 0, 1), VKind::H2, -1, 1);
    return node->eval(shift(x, k)).canon;
}

AbGroup h1_with_decompositions(const FunctorHandle& h, const Complex& x,
                               const WeightDecomposition& at_k,
                               const WeightDecomposition& at_kj, long q) {
    WL_REQUIRE(at_k.k <= at_kj.k, "h1_with_decompositions: levels out of order");
    TruncationLift lift =
        lift_morphism_to_truncations(ChainMap::identity(x), at_kj, at_k);
    /* b: w_{<=k+j}X -> w_{<=k}X compatible with the identity. */
    auto src = h.eval_data(at_k.le, q);
    auto tgt = h.eval_data(at_kj.le, q);
    GroupMap conn = precompose_induced(*src, *tgt, lift.b);
    return make_subquotient(tgt->sq.group, conn.matrix, tgt->sq.group.rels).canonical();
}

AbGroup h2_with_decompositions(const FunctorHandle& h, const Complex& x,
                               const WeightDecomposition& at_k,
                               const WeightDecomposition& at_kj, long q) {
    WL_REQUIRE(at_k.k <= at_kj.k, "h2_with_decompositions: levels out of order");
    TruncationLift lift =
        lift_morphism_to_truncations(ChainMap::identity(x), at_kj, at_k);
    /* The >= piece of a decomposition at level k-1 is w_{>=k}X, so H2^{k,j}
     * is evaluated from decompositions at levels k-1 and k+j-1. The lift
     * provides a: at_kj.ge -> at_k.ge compatible with the identity. */
    auto src = h.eval_data(at_k.ge, q);
    auto tgt = h.eval_data(at_kj.ge, q);
    GroupMap conn = precompose_induced(*src, *tgt, lift.a);
    return make_subquotient(tgt->sq.group, conn.matrix, tgt->sq.group.rels).canonical();
}

VirtualLes virtual_les(const FunctorHandle& h, long k, const Complex& x) {
    VirtualLes out;
    const Complex& m = h.model_of(x).model;
    const Complex& y = h.rep();
    Ring ring = x.ring();
    if (m.is_zero() || y.is_zero()) {
        out.exact = true;
        return out;
    }
    long nlo = y.lo() - m.hi() - 2, nhi = y.hi() - m.lo() + 2;

    /* All hom groups live over slices of one minimal model, so the boundary
     * target H1(X[n-1]) is presented on literally the same complex
     * (w_{<=k}(X[n]))[-1]; no identification step is needed. */
    struct Tri {
        std::shared_ptr<const HomGroup> le_kj, full, ge_kj;
        Subquotient h1, h2;
        Complex le_k_cx, le_kj_cx, ge_k_cx, ge_kj_cx, full_cx;
    };
    auto build_tri = [&](long n) {
        Tri t;
        t.le_k_cx = shift(stupid_le_cx(m, k + n), n);
        t.le_kj_cx = shift(stupid_le_cx(m, k + n + 1), n);
        t.ge_k_cx = shift(stupid_ge_cx(m, k + n), n);
        t.ge_kj_cx = shift(stupid_ge_cx(m, k + n + 1), n);
        t.full_cx = shift(m, n);
        auto le_k = h.eval_data(t.le_k_cx, 0);
        t.le_kj = h.eval_data(t.le_kj_cx, 0);
        t.full = h.eval_data(t.full_cx, 0);
        auto ge_k = h.eval_data(t.ge_k_cx, 0);
        t.ge_kj = h.eval_data(t.ge_kj_cx, 0);
        GroupMap c1 = precompose_induced(*le_k, *t.le_kj, overlay(t.le_kj_cx, t.le_k_cx));
        t.h1 = make_subquotient(t.le_kj->sq.group, c1.matrix, t.le_kj->sq.group.rels);
        GroupMap c2 = precompose_induced(*ge_k, *t.ge_kj, overlay(t.ge_kj_cx, t.ge_k_cx));
        t.h2 = make_subquotient(t.ge_kj->sq.group, c2.matrix, t.ge_kj->sq.group.rels);
        return t;
    };

    std::vector<GroupMap> maps;  // consecutive maps of the sequence
    try {
        Tri cur = build_tri(nhi);
        out.groups.push_back(cur.h1.canonical());
        out.labels.push_back("H1[" + std::to_string(nhi) + "]");
        for (long n = nhi; n >= nlo; --n) {
            std::string sn = "[" + std::to_string(n) + "]";
            Tri next = build_tri(n - 1);
            /* H1 -> H, induced by X[n] -> w_{<=k+1}(X[n]). */
            GroupMap proj_ind = precompose_induced(*cur.le_kj, *cur.full,
                                                   overlay(cur.full_cx, cur.le_kj_cx));
            maps.push_back(compose_from_subgroup(cur.h1, proj_ind));
            out.groups.push_back(cur.full->canon);
            out.labels.push_back("H" + sn);
            /* H -> H2, through H(w_{>=k+1}(X[n])). */
            GroupMap to_ge = precompose_induced(*cur.full, *cur.ge_kj,
                                                overlay(cur.ge_kj_cx, cur.full_cx));
            maps.push_back(compose_into_subquotient(to_ge, cur.h2));
            out.groups.push_back(cur.h2.canonical());
            out.labels.push_back("H2" + sn);
            /* H2 -> H1 o [-1], via the decomposition boundary shifted down:
             * (w_{<=k}(X[n]))[-1] -> w_{>=k+1}(X[n]). */
            Complex le_raw = stupid_le_cx(m, k + n);
            Complex ge_raw = stupid_ge_cx(m, k + n + 1);
            Complex ge_raw1 = shift(ge_raw, 1);
            ChainMap bnd_raw = ChainMap::build(
                le_raw, ge_raw1,
                [&](long d) {
                    IntMatrix mb(ge_raw1.rank(d), le_raw.rank(d), ring);
                    if (d == k + n && le_raw.rank(d) != 0 && ge_raw.rank(d + 1) != 0)
                        mb.paste(0, 0, m.diff(k + n));
                    return mb;
                },
                false);
            ChainMap bnd_shifted = shift(bnd_raw, n - 1);  // le[n-1] -> ge[n]
            GroupMap bnd_ind = precompose_induced(*cur.ge_kj, *next.le_kj, bnd_shifted);
            maps.push_back(compose_into_subquotient(compose_from_subgroup(cur.h2, bnd_ind), next.h1));
            out.groups.push_back(next.h1.canonical());
            out.labels.push_back("H1[" + std::to_string(n - 1) + "]");
            cur = next;
        }
        out.exact = true;
        if (!out.groups.front().is_trivial() || !out.groups.back().is_trivial()) {
            out.exact = false;
            out.failures.push_back("window too narrow: boundary groups nonzero");
        }
        for (size_t i = 0; i + 1 < maps.size(); ++i) {
            if (!exact_at(maps[i], maps[i + 1])) {
                out.exact = false;
                out.failures.push_back("not exact at " + out.labels[i + 1]);
            }
        }
    } catch (const Error& e) {
        out.exact = false;
        out.failures.push_back(std::string("assembly failed: ") + e.what());
    }
    return out;
}

Subquotient weight_filtration(const FunctorHandle& h, long i, const Complex& x, long q) {
    WeightDecomposition d = weight_decomposition(x, i);
    auto src = h.eval_data(d.le, q);
    auto tgt = h.eval_data(x, q);
    GroupMap ind = precompose_induced(*src, *tgt, d.proj);
    return make_subquotient(tgt->sq.group, ind.matrix, tgt->sq.group.rels);
}

CheckReport check_niceness(const Triangle& target, const std::vector<Triangle>& probes) {
    CheckReport rep;
    for (size_t pi = 0; pi < probes.size(); ++pi) {
        const Triangle& pr = probes[pi];
        ++rep.checks;
        try {
            auto hpA = homotopy_classes_data(pr.a, target.a, 0);   // H'(A)
            auto hB = homotopy_classes_data(pr.b, target.b, 0);    // H(B)
            auto hppC = homotopy_classes_data(pr.c, target.c, 0);  // H''(C)
            auto hA = homotopy_classes_data(pr.a, target.b, 0);    // H(A)
            auto hppB = homotopy_classes_data(pr.b, target.c, 0);  // H''(B)
            Complex c_back = shift(pr.c, -1);
            auto hpC1 = homotopy_classes_data(c_back, target.a, 0);  // H'(C[-1])

            GroupMap fA = postcompose_induced(hpA, hA, target.f);
            GroupMap Hl = precompose_induced(hB, hA, pr.f);
            GroupMap gB = postcompose_induced(hB, hppB, target.g);
            GroupMap Hm = precompose_induced(hppC, hppB, pr.g);
            GroupMap hC = hom_induced(hppC, hpC1, [&](const ChainMap& f) {
                return shift(target.h.compose_after(f), -1);
            });
            GroupMap Hn = precompose_induced(hpA, hpC1, shift(pr.h, -1));

            /* Big map P: H'(A)+H(B)+H''(C) -> H(A)+H''(B)+H'(C[-1]) */
            Presentation dom{hpA.sq.group.gens + hB.sq.group.gens + hppC.sq.group.gens,
                             IntMatrix::diag_sum(
                                 IntMatrix::diag_sum(hpA.sq.group.rels, hB.sq.group.rels),
                                 hppC.sq.group.rels),
                             pr.a.ring()};
            Presentation cod{hA.sq.group.gens + hppB.sq.group.gens + hpC1.sq.group.gens,
                             IntMatrix::diag_sum(
                                 IntMatrix::diag_sum(hA.sq.group.rels, hppB.sq.group.rels),
                                 hpC1.sq.group.rels),
                             pr.a.ring()};
            IntMatrix P(cod.gens, dom.gens, pr.a.ring());
            long r1 = hA.sq.group.gens, r2 = hppB.sq.group.gens;
            long c1 = hpA.sq.group.gens, c2 = hB.sq.group.gens;
            P.paste(0, 0, fA.matrix);
            P.paste(0, c1, -Hl.matrix);
            P.paste(r1, c1, gB.matrix);
            P.paste(r1, c1 + c2, -Hm.matrix);
            P.paste(r1 + r2, 0, -Hn.matrix);
            P.paste(r1 + r2, c1 + c2, hC.matrix);
            GroupMap big = GroupMap::make(dom, cod, std::move(P));
            IntMatrix kbig = kernel_subgroup(big);

            /* Small kernel: ker(H'(A)+H(B) -> H(A)). */
            Presentation dom2{c1 + c2, IntMatrix::diag_sum(hpA.sq.group.rels, hB.sq.group.rels),
                              pr.a.ring()};
            IntMatrix P2(r1, c1 + c2, pr.a.ring());
            P2.paste(0, 0, fA.matrix);
            P2.paste(0, c1, -Hl.matrix);
            GroupMap small = GroupMap::make(dom2, hA.sq.group, std::move(P2));
            IntMatrix ksmall = kernel_subgroup(small);

            /* p drops the third block; surjectivity = containment of kernels. */
            IntMatrix proj12(c1 + c2, dom.gens, pr.a.ring());
            proj12.paste(0, 0, IntMatrix::identity(c1 + c2, pr.a.ring()));
            IntMatrix image_p = IntMatrix::mul(proj12, kbig);
            if (!subgroup_contained(dom2, ksmall, image_p))
                rep.fail("probe#" + std::to_string(pi) +
                         ": kernel compatibility map not surjective");
        } catch (const Error& e) {
            rep.fail("probe#" + std::to_string(pi) + ": " + e.what());
        }
    }
    return rep;
}

}  // namespace wl
