#pragma once

#include <string>
#include <vector>

#include "weightlab/homspace.hpp"
#include "weightlab/rng.hpp"

namespace wl {

/* The stupid-truncation weight structure on K^b(free): an object lies in
 * w<=k iff its homology vanishes above k; it lies in w>=k iff homology
 * vanishes below k and H^k is torsion-free (over Z a complex with torsion
 * in its bottom homology admits no model concentrated in degrees >= k, so
 * the torsion-freeness is part of the membership characterization; over a
 * field it is vacuous). The offset c gives the shifted structure with
 * w(c)<=0 := w<=c, sharing all code paths. */
struct WeightStructure {
    long offset = 0;
    bool reversed = false;  // deliberately broken convention, for negative tests

    WeightStructure shifted(long c) const { return WeightStructure{offset + c, reversed}; }
};

enum class Side { le, ge };

bool membership_test(const Complex& x, long bound, Side side,
                     const WeightStructure& w = {});
bool in_heart(const Complex& x, const WeightStructure& w = {});

/* Canonical weight decomposition at level k: the triangle
 * w_{>=k+1}X -> X -> w_{<=k}X -> w_{>=k+1}X[1] realized by stupid
 * truncation of the minimal model. */
struct WeightDecomposition {
    long k = 0;
    Complex x;
    Complex ge;      // w_{>=k+1}X
    Complex le;      // w_{<=k}X
    ChainMap incl;   // ge -> X
    ChainMap proj;   // X -> le
    ChainMap bnd;    // le -> ge[1]
    Triangle triangle() const { return Triangle{ge, x, le, incl, proj, bnd}; }
};

WeightDecomposition weight_decomposition(const Complex& x, long k,
                                         const WeightStructure& w = {});
/* Same triangle conjugated by random contractible summands and random
 * null-homotopic perturbations: a genuinely different choice of weight
 * decomposition for choice-independence tests. */
WeightDecomposition randomized_weight_decomposition(const Complex& x, long k, Rng& rng,
                                                    const WeightStructure& w = {});

struct TruncationPiece {
    Complex piece;
    ChainMap structure;  // ge: piece -> X, le: X -> piece
};
TruncationPiece weight_truncate(const Complex& x, long k, Side side,
                                const WeightStructure& w = {});

/* Double truncation w_{[l+1,m]}X with the full octahedron: its two cap
 * triangles and the decompositions at l and m they interpolate. */
struct Octahedron {
    long l = 0, m = 0;
    Complex mid;  // w_{[l+1,m]}X
    WeightDecomposition at_l, at_m;
    ChainMap ge_connect;  // w_{>=m+1}X -> w_{>=l+1}X
    ChainMap ge_to_mid;   // w_{>=l+1}X -> mid
    ChainMap mid_bnd;     // mid -> w_{>=m+1}X[1]
    ChainMap mid_to_le;   // mid -> w_{<=m}X
    ChainMap le_connect;  // w_{<=m}X -> w_{<=l}X
    ChainMap le_bnd;      // w_{<=l}X -> mid[1]
};
Octahedron weight_range(const Complex& x, long l, long m, const WeightStructure& w = {});

/* Weight Postnikov tower: Y_i = (a choice of) w_{>=1-i}X with connecting
 * maps, augmentations to X, heart factors X_i realizing the triangles
 * Y_i -> Y_{i+1} -> X_i -> Y_i[1], and the induced weight complex whose
 * degree-p term is the factor X^p = X_{-p}[p]. */
struct Tower {
    Complex x;
    long imin = 0, imax = -1;        // Y_{imin} = 0, Y_{imax} ~ X
    std::vector<Complex> y;          // Y_i, i = imin..imax
    std::vector<ChainMap> connect;   // Y_i -> Y_{i+1}
    std::vector<ChainMap> augment;   // Y_i -> X
    std::vector<Complex> factors;    // X_i (free, concentrated in degree -i)
    std::vector<ChainMap> to_factor; // Y_{i+1} -> X_i
    std::vector<ChainMap> bnd;       // X_i -> Y_i[1]
    Complex weight_cx;

    long heart_degree = 0;  // factors X_i are concentrated in -i + heart_degree

    const Complex& y_at(long i) const;
    long factor_rank(long p) const { return weight_cx.rank(p); }  // rank of X^p
    Complex factor_at(long i) const;                              // X_i
    Triangle step_triangle(long i) const;
};

Tower weight_postnikov_tower(const Complex& x, const WeightStructure& w = {});
Tower randomized_weight_postnikov_tower(const Complex& x, Rng& rng,
                                        const WeightStructure& w = {});
/* Tower assembled from an explicit chain of layers: y[i] with augmentations;
 * connecting maps are solved, factors built as minimal cone models. The
 * factor of layer i must come out concentrated in degree -i + heart_degree
 * (error names the failing layer otherwise). */
Tower tower_from_layers(const Complex& x, long imin, std::vector<Complex> ys,
                        std::vector<ChainMap> augments, long heart_degree = 0);
/* Same, with the connecting maps supplied instead of solved. */
Tower tower_from_layers_with_connectors(const Complex& x, long imin,
                                        std::vector<Complex> ys,
                                        std::vector<ChainMap> augments,
                                        std::vector<ChainMap> connectors,
                                        long heart_degree = 0);

Complex weight_complex(const Complex& x, const WeightStructure& w = {});

/* Completion of g to a morphism of the two given decomposition triangles
 * (the spec's truncation-lifting): a on the >= parts, b on the <= parts,
 * commuting with g up to recorded homotopies. Uniqueness of the homotopy
 * classes holds iff the windows are nested (decomp_src.k > decomp_tgt.k)
 * and is certified by the vanishing of the obstruction hom-group. */
struct TruncationLift {
    ChainMap a;  // src.ge -> tgt.ge
    ChainMap b;  // src.le -> tgt.le
    bool unique = false;
};
TruncationLift lift_morphism_to_truncations(const ChainMap& g,
                                            const WeightDecomposition& src_decomp,
                                            const WeightDecomposition& tgt_decomp,
                                            Rng* randomize = nullptr);

struct TowerMorphism {
    std::vector<ChainMap> on_y;        // src Y_{i+off} -> tgt Y_i
    std::vector<ChainMap> on_factors;  // src X_{i+off} -> tgt X_i
    long imin = 0;
    long src_offset = 0;
    ChainMap weight_cx_map;            // induced map of weight complexes (off = 0 only)
};
/* Morphism of towers over g, solved layerwise top-down. src_offset > 0
 * matches the reindexing between towers of shifted weight structures:
 * the map at layer i goes src.Y_{i+off} -> tgt.Y_i. */
TowerMorphism lift_morphism_to_towers(const ChainMap& g, const Tower& src,
                                      const Tower& tgt, Rng* randomize = nullptr,
                                      long src_offset = 0);

/* Explicit mutually inverse equivalences B ~ A (+) C for a triangle with
 * heart ends; certified through the vanishing of Hom(C, A[1]). */
struct HeartSplitting {
    ChainMap to_sum;    // B -> A (+) C
    ChainMap from_sum;  // A (+) C -> B
};
HeartSplitting split_heart_extension(const Triangle& t, const WeightStructure& w = {});

struct CheckReport {
    bool ok = true;
    long checks = 0;
    std::vector<std::string> failures;
    void fail(const std::string& msg) {
        ok = false;
        failures.push_back(msg);
    }
};

/* Orthogonality, semi-invariance and decomposition existence over a sample
 * set; violations are reported with witnesses. */
CheckReport check_weight_axioms(const WeightStructure& w, const std::vector<Complex>& samples);

}  // namespace wl
