#pragma once

#include <cstdint>
#include <random>

namespace wl {

/* Deterministic per-seed stream used by the random-instance generators and
 * the randomized re-decomposition tests. */
class Rng {
  public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    long uniform(long lo, long hi) {  // inclusive
        std::uniform_int_distribution<long> d(lo, hi);
        return d(eng_);
    }
    bool coin() { return uniform(0, 1) == 1; }
    uint64_t raw() { return eng_(); }
    Rng fork() { return Rng(eng_() ^ 0x9e3779b97f4a7c15ull); }

  private:
    std::mt19937_64 eng_;
};

}  // namespace wl
