#include "weightlab/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace wl {

using nlohmann::json;

std::string ring_to_string(const Ring& r) { return r.name(); }

Ring ring_from_string(const std::string& s) {
    if (s == "Z") return Ring::integers();
    if (s.rfind("Fp:", 0) == 0) {
        long p = std::stol(s.substr(3));
        return Ring::prime_field(p);
    }
    throw Error("unknown ring '" + s + "' (expected Z or Fp:<p>)");
}

Complex parse_complex_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(std::string("complex document: ") + e.what());
    }
    WL_REQUIRE(doc.is_object(), "complex document: top level must be an object");
    WL_REQUIRE(doc.value("format", "") == "weightlab/1",
               "complex document: missing or unknown format (want weightlab/1)");
    Ring ring = ring_from_string(doc.value("ring", "Z"));
    std::map<long, long> ranks;
    for (const auto& t : doc.value("terms", json::array())) {
        long d = t.at("degree").get<long>();
        long r = t.at("rank").get<long>();
        WL_REQUIRE(r >= 0, "complex document: negative rank");
        ranks[d] = r;
    }
    if (ranks.empty()) return Complex::zero(ring);
    long lo = ranks.begin()->first, hi = ranks.rbegin()->first;
    std::vector<long> rk;
    for (long d = lo; d <= hi; ++d) rk.push_back(ranks.count(d) ? ranks[d] : 0);
    std::vector<IntMatrix> diffs(size_t(std::max<long>(hi - lo, 0)));
    for (long d = lo; d < hi; ++d)
        diffs[size_t(d - lo)] =
            IntMatrix(rk[size_t(d - lo + 1)], rk[size_t(d - lo)], ring);
    for (const auto& m : doc.value("differentials", json::array())) {
        long d = m.at("degree").get<long>();
        WL_REQUIRE(d >= lo && d < hi, "complex document: differential at degree " +
                                          std::to_string(d) + " outside support");
        const auto& rows = m.at("matrix");
        IntMatrix mat(rk[size_t(d - lo + 1)], rk[size_t(d - lo)], ring);
        WL_REQUIRE(long(rows.size()) == mat.rows(),
                   "complex document: matrix rows mismatch at degree " + std::to_string(d));
        for (long i = 0; i < mat.rows(); ++i) {
            const auto& row = rows[size_t(i)];
            WL_REQUIRE(long(row.size()) == mat.cols(),
                       "complex document: matrix cols mismatch at degree " +
                           std::to_string(d));
            for (long j = 0; j < mat.cols(); ++j)
                mat.set(i, j, Int(row[size_t(j)].get<long long>()));
        }
        diffs[size_t(d - lo)] = std::move(mat);
    }
    return Complex(ring, lo, std::move(rk), std::move(diffs));
}

Complex parse_complex_file(const std::string& path) {
    std::ifstream in(path);
    WL_REQUIRE(in.good(), "cannot open complex document: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_complex_json(ss.str());
}

std::string emit_complex_json(const Complex& x, const std::string& name) {
    json doc;
    doc["format"] = "weightlab/1";
    doc["ring"] = ring_to_string(x.ring());
    if (!name.empty()) doc["name"] = name;
    doc["terms"] = json::array();
    doc["differentials"] = json::array();
    for (long d = x.lo(); d <= x.hi(); ++d) {
        doc["terms"].push_back({{"degree", d}, {"rank", x.rank(d)}});
        if (d < x.hi()) {
            IntMatrix m = x.diff(d);
            json rows = json::array();
            for (long i = 0; i < m.rows(); ++i) {
                json row = json::array();
                for (long j = 0; j < m.cols(); ++j) row.push_back(m.at(i, j).get_si());
                rows.push_back(row);
            }
            doc["differentials"].push_back({{"degree", d}, {"matrix", rows}});
        }
    }
    return doc.dump(2);
}

Complex fixture_Z0(Ring ring) { return Complex::free_module(ring, 0, 1); }
Complex fixture_X2(Ring ring) { return Complex::two_term(ring, 0, IntMatrix::from({{2}}, ring)); }
Complex fixture_X4(Ring ring) { return Complex::two_term(ring, 0, IntMatrix::from({{4}}, ring)); }
Complex fixture_XI(Ring ring) { return Complex::two_term(ring, 0, IntMatrix::from({{1}}, ring)); }

Complex random_complex(Rng& rng, Ring ring, const RandomOpts& opts) {
    long width = rng.uniform(1, opts.max_width);
    long lo = rng.uniform(opts.lo_min, opts.lo_max);
    std::vector<long> ranks;
    for (long t = 0; t < width; ++t) ranks.push_back(rng.uniform(0, opts.max_rank));
    std::vector<IntMatrix> diffs;
    IntMatrix prev(0, 0, ring);
    for (long t = 0; t + 1 < width; ++t) {
        long rows = ranks[size_t(t + 1)], cols = ranks[size_t(t)];
        IntMatrix d(rows, cols, ring);
        if (t == 0 || prev.is_zero() || prev.rows() == 0) {
            for (long i = 0; i < rows; ++i)
                for (long j = 0; j < cols; ++j)
                    d.set(i, j, Int(rng.uniform(-opts.entry_bound, opts.entry_bound)));
        } else {
            /* kill im(prev): compose a random matrix with the left kernel */
            IntMatrix lk = left_kernel_basis(prev);  // k x cols
            IntMatrix r(rows, lk.rows(), ring);
            for (long i = 0; i < r.rows(); ++i)
                for (long j = 0; j < r.cols(); ++j)
                    r.set(i, j, Int(rng.uniform(-2, 2)));
            d = IntMatrix::mul(r, lk);
        }
        diffs.push_back(d);
        prev = diffs.back();
    }
    return Complex(ring, lo, std::move(ranks), std::move(diffs));
}

ChainMap random_chain_map(Rng& rng, const Complex& x, const Complex& y, long q) {
    HomSpace sp(x, y);
    IntMatrix cycles = kernel_basis(sp.delta(q));
    IntMatrix v(sp.dim(q), 1, x.ring());
    for (long c = 0; c < cycles.cols(); ++c) {
        long coeff = rng.uniform(-1, 1);
        if (coeff == 0) continue;
        for (long r = 0; r < v.rows(); ++r)
            v.set(r, 0, x.ring().reduce(v.at(r, 0) + Int(coeff) * cycles.at(r, c)));
    }
    return sp.unflatten(q, v);
}

Triangle random_triangle(Rng& rng, Ring ring, const RandomOpts& opts) {
    Complex a = random_complex(rng, ring, opts);
    Complex b = random_complex(rng, ring, opts);
    ChainMap f = random_chain_map(rng, a, b, 0);
    return cone(f).triangle;
}

FilteredComplex random_filtered_complex(Rng& rng, Ring ring, const RandomOpts& opts) {
    RandomOpts small = opts;
    small.max_rank = std::min<long>(opts.max_rank, 3);
    small.max_width = std::min<long>(opts.max_width, 3);
    Complex base = random_complex(rng, ring, small);
    if (base.is_zero()) base = fixture_Z0(ring);
    /* contractible noise assigned to filtration levels */
    long n_noise = rng.uniform(0, 2);
    struct Noise {
        Complex k;
        long level;
    };
    std::vector<Noise> noise;
    Complex total = base;
    for (long t = 0; t < n_noise; ++t) {
        long a = rng.uniform(base.lo() - 1, base.hi());
        IntMatrix u = IntMatrix::identity(1, ring);
        Complex k = Complex::two_term(ring, a, u);
        long level = rng.uniform(std::min(base.lo(), a), a);  // level <= its degrees
        noise.push_back({k, level});
        total = direct_sum(total, k).sum;
    }
    /* F^s = (degrees >= s of base) (+) noise with level >= s */
    long smin = total.lo(), smax_excl = total.hi() + 1;
    auto piece_at = [&](long s) {
        Complex p = Complex::zero(ring);
        /* base part: degrees >= s */
        std::vector<long> ranks;
        std::vector<IntMatrix> diffs;
        if (s <= base.lo()) {
            p = base;
        } else if (s <= base.hi()) {
            for (long d = s; d <= base.hi(); ++d) ranks.push_back(base.rank(d));
            for (long d = s; d < base.hi(); ++d) diffs.push_back(base.diff(d));
            p = Complex(ring, s, std::move(ranks), std::move(diffs));
        }
        for (const Noise& nz : noise)
            if (nz.level >= s) p = direct_sum(p, nz.k).sum;
        return p;
    };
    /* the inclusion F^{s+1} -> F^s in the coordinates used by piece_at:
     * base block then noise blocks in declaration order */
    std::vector<ChainMap> steps;
    Complex prev = piece_at(smin);
    for (long s = smin + 1; s <= smax_excl; ++s) {
        Complex cur = piece_at(s);
        ChainMap step = ChainMap::build(
            cur, prev,
            [&](long d) {
                IntMatrix m(prev.rank(d), cur.rank(d), ring);
                /* base part */
                long brow = (s - 1 <= base.lo()) ? 0 : 0;  // base block starts at row 0
                (void)brow;
                long base_rows = (s - 1 <= base.lo()) ? base.rank(d)
                                                      : (d >= s - 1 ? base.rank(d) : 0);
                long base_cols = (s <= base.lo()) ? base.rank(d) : (d >= s ? base.rank(d) : 0);
                for (long c2 = 0; c2 < base_cols; ++c2) m.set(c2, c2, 1);
                (void)base_rows;
                /* noise blocks */
                long roff = base_rows, coff = base_cols;
                for (const Noise& nz : noise) {
                    long nr = (nz.level >= s - 1) ? nz.k.rank(d) : 0;
                    long nc = (nz.level >= s) ? nz.k.rank(d) : 0;
                    for (long t2 = 0; t2 < nc; ++t2) m.set(roff + t2, coff + t2, 1);
                    roff += nr;
                    coff += nc;
                }
                return m;
            },
            false);
        steps.push_back(step);
        prev = cur;
    }
    return make_filtered(piece_at(smin), smin, std::move(steps));
}

bool RunReport::all_pass() const {
    for (const auto& [name, ok] : verdicts)
        if (!ok) return false;
    return true;
}

std::string RunReport::to_json() const {
    json doc;
    doc["command"] = command;
    doc["verdicts"] = json::array();
    for (const auto& [name, ok] : verdicts)
        doc["verdicts"].push_back({{"check", name}, {"pass", ok}});
    doc["notes"] = notes;
    doc["pages"] = json::array();
    for (const auto& [r, p, q, g] : pages) {
        json factors = json::array();
        for (const Int& f : g.factor_list()) factors.push_back(f.get_si());
        doc["pages"].push_back({{"r", r}, {"p", p}, {"q", q}, {"factors", factors}});
    }
    doc["groups"] = json::array();
    for (const auto& [name, g] : groups) {
        json factors = json::array();
        for (const Int& f : g.factor_list()) factors.push_back(f.get_si());
        doc["groups"].push_back({{"name", name}, {"factors", factors}});
    }
    doc["pass"] = all_pass();
    return doc.dump(2);
}

std::string RunReport::to_text() const {
    std::ostringstream os;
    os << "$ " << command << "\n";
    for (const auto& [name, g] : groups) os << name << " = " << g.to_string() << "\n";
    for (const auto& [r, p, q, g] : pages)
        os << "E_" << r << "^{" << p << "," << q << "} = " << g.to_string() << "\n";
    for (const auto& [name, ok] : verdicts)
        os << (ok ? "PASS " : "FAIL ") << name << "\n";
    for (const std::string& n : notes) os << "note: " << n << "\n";
    os << (all_pass() ? "OK" : "FAILED") << " (" << seconds << "s)\n";
    return os.str();
}

std::string RunReport::pages_csv() const {
    std::ostringstream os;
    os << "r,p,q,factors\n";
    for (const auto& [r, p, q, g] : pages) {
        os << r << "," << p << "," << q << ",";
        auto fl = g.factor_list();
        for (size_t i = 0; i < fl.size(); ++i) os << (i ? " " : "") << fl[i].get_str();
        os << "\n";
    }
    return os.str();
}

void report_pages(RunReport& rep, const std::vector<SSPage>& pages) {
    for (const SSPage& page : pages)
        for (const auto& [pq, g] : page.entries)
            if (!g.is_trivial()) rep.pages.emplace_back(page.r, pq.first, pq.second, g);
}

}  // namespace wl
