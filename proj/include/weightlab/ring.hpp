#pragma once

#include <gmpxx.h>
#include <stdexcept>
#include <string>

namespace wl {

using Int = mpz_class;

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define WL_REQUIRE(cond, msg)                                                 \
    do {                                                                      \
        if (!(cond)) throw ::wl::Error(msg);                                  \
    } while (0)

/* Base ring of all computations: the integers or a prime field F_p.
 * Entries of matrices over F_p are kept reduced to [0, p). */
struct Ring {
    enum Kind { Z, Fp } kind = Z;
    long p = 0;

    static Ring integers() { return Ring{Z, 0}; }
    static Ring prime_field(long p) {
        WL_REQUIRE(p >= 2, "prime_field: modulus must be >= 2");
        return Ring{Fp, p};
    }

    bool is_field() const { return kind == Fp; }

    Int reduce(Int x) const {
        if (kind == Z) return x;
        Int r = x % p;
        if (r < 0) r += p;
        return r;
    }

    /* Multiplicative inverse of a unit. Over Z only +-1 are units. */
    Int unit_inverse(const Int& u) const {
        if (kind == Z) {
            WL_REQUIRE(u == 1 || u == -1, "unit_inverse: not a unit over Z");
            return u;
        }
        Int inv;
        Int uu = reduce(u);
        WL_REQUIRE(uu != 0, "unit_inverse: zero has no inverse");
        Int mod(p);
        WL_REQUIRE(mpz_invert(inv.get_mpz_t(), uu.get_mpz_t(), mod.get_mpz_t()) != 0,
                   "unit_inverse: not invertible mod p");
        return inv;
    }

    bool is_unit(const Int& u) const {
        if (kind == Z) return u == 1 || u == -1;
        return reduce(u) != 0;
    }

    bool operator==(const Ring& o) const { return kind == o.kind && p == o.p; }
    bool operator!=(const Ring& o) const { return !(*this == o); }

    std::string name() const {
        if (kind == Z) return "Z";
        return "Fp:" + std::to_string(p);
    }
};

}  // namespace wl
