#pragma once

#include <optional>
#include <vector>

#include "weightlab/intmatrix.hpp"

namespace wl {

/* Smith decomposition U*M*V = D with U, V unimodular and D diagonal with
 * d_1 | d_2 | ..., all nonzero d_i positive. Over F_p the form is
 * rank-revealing instead: D has 1's then 0's on the diagonal.
 * Inverses are tracked during elimination, so they are exact and cheap. */
struct SmithForm {
    IntMatrix U, Uinv;
    IntMatrix D;
    IntMatrix V, Vinv;
    long rank = 0;

    std::vector<Int> invariant_factors() const;  // nonzero diagonal entries
};

SmithForm smith_normal_form(const IntMatrix& m);

long rank(const IntMatrix& m);

/* Basis of ker(M) as columns. Over Z the span is a direct summand of the
 * ambient lattice (columns extend to a basis), i.e. the kernel is saturated. */
IntMatrix kernel_basis(const IntMatrix& m);

/* Row-space version: L with L*M = 0, rows forming a basis of the left kernel. */
IntMatrix left_kernel_basis(const IntMatrix& m);

/* Some x with M*x = b over the base ring, or nullopt. Matrix right-hand
 * sides are solved columnwise (all-or-nothing). */
std::optional<IntMatrix> solve_linear(const IntMatrix& m, const IntMatrix& b);

}  // namespace wl
