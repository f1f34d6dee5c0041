#pragma once

#include <iosfwd>

#include "weightlab/spectral.hpp"

namespace wl {

/* weightlab/1 complex documents. Canonical format is JSON; d o d = 0 is
 * checked on load and the failing degree reported. */
Complex parse_complex_json(const std::string& text);
Complex parse_complex_file(const std::string& path);
std::string emit_complex_json(const Complex& x, const std::string& name = "");

std::string ring_to_string(const Ring& r);
Ring ring_from_string(const std::string& s);

/* Fixtures shared across tests and docs. */
Complex fixture_Z0(Ring ring = Ring::integers());   // rank 1 in degree 0
Complex fixture_X2(Ring ring = Ring::integers());   // Z --2--> Z in degrees 0,1
Complex fixture_X4(Ring ring = Ring::integers());   // Z --4--> Z
Complex fixture_XI(Ring ring = Ring::integers());   // Z --1--> Z (contractible)

struct RandomOpts {
    long max_rank = 4;
    long max_width = 4;
    long entry_bound = 5;
    long lo_min = -2, lo_max = 1;
};
Complex random_complex(Rng& rng, Ring ring, const RandomOpts& opts = {});
/* Random chain map X -> Y[q]: a small combination of a cycle basis of the
 * hom-complex. */
ChainMap random_chain_map(Rng& rng, const Complex& x, const Complex& y, long q = 0);
Triangle random_triangle(Rng& rng, Ring ring, const RandomOpts& opts = {});
/* Stupid filtration of a random complex with contractible noise spread
 * across the filtration levels. */
FilteredComplex random_filtered_complex(Rng& rng, Ring ring, const RandomOpts& opts = {});

/* Report of one CLI run: verdicts plus emitted tables, deterministic for a
 * fixed seed (wall-clock time is text-only, never serialized to JSON). */
struct RunReport {
    std::string command;
    std::vector<std::pair<std::string, bool>> verdicts;
    std::vector<std::string> notes;
    /* page tables: (r, p, q, factors) */
    std::vector<std::tuple<long, long, long, AbGroup>> pages;
    std::vector<std::pair<std::string, AbGroup>> groups;
    double seconds = 0.0;

    bool all_pass() const;
    std::string to_json() const;
    std::string to_text() const;
    std::string pages_csv() const;
};

void report_pages(RunReport& rep, const std::vector<SSPage>& pages);

}  // namespace wl
