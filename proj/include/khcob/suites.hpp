#pragma once
// Acceptance suites shared by the acceptance binary and `khcob verify`.

#include <chrono>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lasagna.hpp"
#include "projectors.hpp"

namespace khcob {

struct SuiteResult {
    int id = 0;
    std::string key;
    bool pass = false;
    double seconds = 0;
    double limit = 0;  // seconds; 0 means none
    std::string detail;

    std::string line() const {
        std::ostringstream os;
        os.setf(std::ios::fixed);
        os.precision(2);
        os << "criterion " << id << " [" << key << "] " << (pass ? "PASS" : "FAIL") << " (" << seconds << " s";
        if (limit > 0) os << ", limit " << limit << " s";
        os << ")";
        if (!detail.empty()) os << ": " << detail;
        return os.str();
    }
};

namespace suites {

// Collects named checks; the first few failures go into the detail line.
struct Tally {
    int checks = 0, failed = 0;
    std::vector<std::string> why;
    void check(bool ok, const std::string& what) {
        ++checks;
        if (ok) return;
        ++failed;
        if (why.size() < 6) why.push_back(what);
    }
    std::string detail() const {
        std::string s = std::to_string(checks - failed) + "/" + std::to_string(checks) + " checks";
        for (auto& w : why) s += "; " + w;
        return s;
    }
};

inline SuiteResult timed(int id, const std::string& key, double limit, const std::function<void(Tally&)>& body) {
    SuiteResult R;
    R.id = id;
    R.key = key;
    R.limit = limit;
    Tally t;
    auto t0 = std::chrono::steady_clock::now();
    try {
        body(t);
    } catch (const Error& e) {
        t.check(false, std::string("error: ") + e.what());
    }
    R.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    R.pass = t.failed == 0 && t.checks > 0;
    R.detail = t.detail();
    if (limit > 0 && R.seconds > limit) {
        R.pass = false;
        R.detail += "; over time limit";
    }
    return R;
}

inline std::string dims_str(const GradedDims& g) {
    std::string s;
    for (auto& [b, v] : g.d)
        s += "(" + std::to_string(b.first) + "," + std::to_string(b.second) + "):" + std::to_string(v) + " ";
    return s.empty() ? "0" : s;
}

inline FlatId loops_flat(int L) {
    FlatData f;
    for (int l = 0; l < L; ++l) f.lkey.push_back(500 + l);
    return intern(std::move(f));
}

inline const std::vector<std::string>& corpus() {
    static const std::vector<std::string> c = {"strands=1; braid: ; close",
                                               "braid: s1 s1; close",
                                               "braid: s1^-1 s1^-1; close",
                                               "braid: s1 s1 s1; close",
                                               "braid: s1^-1 s1^-1 s1^-1; close",
                                               "braid: s1 s2^-1 s1 s2^-1; close",
                                               "braid: s1 s1 s1 s1; close",
                                               "braid: s1 s1 s1 s1 s1 s1; close",
                                               "braid: s1 s2 s1 s2 s1 s2 s1 s2 s1 s2; close",
                                               "belt(n=1, k=2); close"};
    return c;
}

}  // namespace suites

inline SuiteResult suite_local_relations() {
    return suites::timed(1, "local-relations", 1, [](suites::Tally& t) {
        FlatId E = empty_flat(), O = suites::loops_flat(1), OO = suites::loops_flat(2);
        Cob birth = basis_cob(E, O, 0), dbirth = basis_cob(E, O, 1);
        Cob death = basis_cob(O, E, 0), ddeath = basis_cob(O, E, 1);
        t.check(compose(death, birth).zero(), "sphere");
        t.check(compose(ddeath, birth) == identity(E), "dotted sphere");
        t.check(compose(ddeath, dbirth).zero(), "sphere with two dots");
        t.check(apply_dot(apply_dot(identity(id_flat(1)), 0), 0).zero(), "two dots on a sheet");
        t.check(identity(O) == compose(dbirth, death) + compose(birth, ddeath), "neck cutting");
        Cob split = normal_form(O, OO, {{{0, 1, 2}, 0, 0}});
        Cob merge = normal_form(OO, O, {{{0, 1, 2}, 0, 0}});
        t.check(compose(death, compose(merge, compose(split, birth))) == scaled(identity(E), Q(2)), "torus");
        Cob acap = normal_form(OO, E, {{{0, 1}, 0, 0}});
        Cob acup = normal_form(E, OO, {{{0, 1}, 0, 0}});
        Cob cc = compose(acup, acap);
        t.check(compose(cc, cc) == scaled(cc, Q(2)), "(cap cup)^2 = 2 cap cup");
        Cob s = identity(OO) - cc;
        t.check(compose(s, s) == identity(OO), "s^2 = id");
        // the same relations through the belt tower
        for (int n : {0, 1}) {
            BeltTower T(n, identity_complex(n));
            Map tor = map_compose(T.acap(2, 1), T.acup(2, 1));
            Map two = map_identity(T.C(0));
            two.m = mat_scale(two.m, Q(2));
            t.check(mat_eq(tor.m, two.m), "belt torus = 2, n = " + std::to_string(n));
            auto s1 = T.swap(2, 1);
            t.check(map_eq(compose(s1, s1), identity_map(T.H(2).dims)), "belt swap squared, n = " + std::to_string(n));
        }
    });
}

inline SuiteResult suite_oracle_corpus() {
    return suites::timed(2, "oracle-corpus", 60, [](suites::Tally& t) {
        for (auto& d : suites::corpus()) {
            auto T = parse_diagram(d);
            t.check(T.sd.crossings() <= 10, "corpus diagram too large: " + d);
            auto a = kh(T), b = cube_oracle(T);
            t.check(a == b, d + ": scan " + suites::dims_str(a) + "vs cube " + suites::dims_str(b));
        }
    });
}

inline SuiteResult suite_invariance(unsigned seed = 2024) {
    return suites::timed(3, "invariance", 60, [seed](suites::Tally& t) {
        std::mt19937 rng(seed);
        auto word = [&](int n, int len) {
            std::vector<int> w;
            for (int i = 0; i < len; ++i) {
                int g = 1 + (int)(rng() % (n - 1));
                w.push_back(rng() % 2 ? g : -g);
            }
            return w;
        };
        auto closed = [](int n, const std::vector<int>& w) { return kh_slices(close_diagram(braid_diagram(n, w))); };
        int pairs = 0;
        for (int it = 0; it < 8; ++it) {
            const int n = 3;
            auto w = word(n, 2 + rng() % 3);
            auto base = closed(n, w);
            size_t at = rng() % (w.size() + 1);
            int g = 1 + rng() % (n - 1);
            auto w2 = w;
            w2.insert(w2.begin() + at, {g, -g});
            t.check(closed(n, w2) == base, "R2");
            auto a = w, b = w;
            a.insert(a.begin() + at, {1, 2, 1});
            b.insert(b.begin() + at, {2, 1, 2});
            t.check(closed(n, a) == closed(n, b), "R3");
            auto w3 = w, w4 = w;
            w3.push_back(n);
            w4.push_back(-n);
            // a kink shifts q by minus its sign
            t.check(closed(n + 1, w3) == shifted(base, 0, -1), "R1 positive");
            t.check(closed(n + 1, w4) == shifted(base, 0, 1), "R1 negative");
            pairs += 4;
        }
        t.check(pairs >= 20, "fewer than 20 move pairs");
        for (auto& d : suites::corpus()) {
            auto a = kh(parse_diagram(d)), m = kh(parse_diagram(d + "; mirror"));
            t.check(m == negated(a), "mirror: " + d);
        }
    });
}

inline SuiteResult suite_symmetrizer() {
    return suites::timed(4, "symmetrizer", 120, [](suites::Tally& t) {
        for (int n = 0; n <= 2; ++n) {
            BeltTower T(n, identity_complex(n));
            for (int k = 1; k <= 4; ++k) {
                auto S = symmetrizer(T.swaps(k), T.H(k).dims);
                bool idem = true;
                for (auto& [b, e] : S.e) idem = idem && e * e == e;
                t.check(idem, "e_k^2 = e_k at n = " + std::to_string(n) + ", k = " + std::to_string(k));
            }
            for (int k = 0; k + 2 <= 4; ++k) {
                auto S = symmetrizer(T.swaps(k + 2), T.H(k + 2).dims);
                auto up = T.hacup(k + 2, 1);
                bool z = true;
                for (auto& [b, m] : up.block) {
                    Bideg tb{b.first + up.dh, b.second + up.dq};
                    if (S.e.count(tb)) z = z && (S.e.at(tb) * m).is_zero();
                }
                t.check(z, "e_{k+2} after undotted annulus at n = " + std::to_string(n) + ", k = " + std::to_string(k));
            }
            auto s1 = T.swap(3, 1), s2 = T.swap(3, 2);
            t.check(map_eq(compose(s1, compose(s2, s1)), compose(s2, compose(s1, s2))),
                    "braid relation at n = " + std::to_string(n));
        }
    });
}

inline SuiteResult suite_polynomial_ring(const std::vector<int>& levels = {0, 1, 2}) {
    return suites::timed(5, "polynomial-ring", 600, [levels](suites::Tally& t) {
        for (int a : levels) {
            auto R3 = lasagna_s2xb2(0, a, 3), R4 = lasagna_s2xb2(0, a, 4);
            std::string why;
            t.check(matches_polynomial_ring(R3, 0, 8, &why), "alpha " + std::to_string(a) + ": " + why);
            for (auto& [b, e] : R3.table) {
                auto it = R4.table.find(b);
                long d4 = it == R4.table.end() ? 0 : it->second.dim;
                bool s4 = it == R4.table.end() || it->second.stable;
                if (e.stable && s4)
                    t.check(e.dim == d4, "alpha " + std::to_string(a) + ": horizons 3 and 4 disagree at (" +
                                             std::to_string(b.first) + "," + std::to_string(b.second) + ")");
            }
        }
    });
}

inline SuiteResult suite_odd_vanishing() {
    return suites::timed(6, "odd-vanishing", 600, [](suites::Tally& t) {
        for (int a : {0, 1}) {
            auto R = lasagna_s2xb2(1, a, 3);
            t.check(R.all_stable(), "alpha " + std::to_string(a) + ": horizon-limited entries");
            t.check(R.stable_dims().total() == 0, "alpha " + std::to_string(a) + ": nonzero stable entries");
        }
    });
}

inline SuiteResult suite_s2xs2(const std::vector<std::vector<int>>& levels = {{1, 0}, {1, 1}}, bool cp2 = true) {
    return suites::timed(7, "s2xs2", 1800, [levels, cp2](suites::Tally& t) {
        auto run = [&](const std::string& preset, const std::vector<int>& a) {
            auto R = lasagna_2handle(two_handle_preset(preset), a, 1);
            std::string tag = preset + " (" + std::to_string(a[0]) + "," + std::to_string(a[1]) + ")";
            t.check(R.all_stable(), tag + ": horizon-limited entries");
            t.check(R.stable_dims().total() == 0, tag + ": nonzero stable entries");
        };
        for (auto& a : levels) run("hopf00", a);
        if (cp2)
            for (auto& a : std::vector<std::vector<int>>{{1, 0}, {1, 1}}) run("hopf10", a);
    });
}

inline SuiteResult suite_belt_splitting() {
    return suites::timed(8, "belt-splitting", 600, [](suites::Tally& t) {
        struct Case {
            int n, k, m;
            bool sym;
        };
        for (auto c : std::vector<Case>{{1, 1, 1, false},
                                        {1, 1, 1, true},
                                        {1, 2, 1, false},
                                        {1, 2, 1, true},
                                        {2, 1, 2, false},
                                        {2, 1, 2, true},
                                        {2, 1, 4, false}}) {
            auto R = belt_split_check(c.n, c.k, c.m, c.sym);
            t.check(R.ok, "(" + std::to_string(c.n) + "," + std::to_string(c.k) + "," + std::to_string(c.m) + ")" +
                              (c.sym ? " symmetrized " : " ") + R.summary());
        }
    });
}

inline SuiteResult suite_projector() {
    return suites::timed(9, "projector", 600, [](suites::Tally& t) {
        for (int m = 1; m <= 3; ++m) {
            const auto& P = truncated_projector(2, m);
            int ids = 0;
            bool at0 = true;
            for (auto& o : P.complex.obj)
                if (through_degree(o.f) == 2) {
                    ++ids;
                    at0 = at0 && o.h == 0 && o.q == 0;
                }
            t.check(ids == 1 && at0, "identity object at m = " + std::to_string(m));
        }
        for (int m = 2; m <= 3; ++m) {
            std::string ms = " at m = " + std::to_string(m) + ": ";
            auto tb = crossing_absorption_check(2, m, Absorb::Tau);
            t.check(tb.ok, "turnback" + ms + tb.summary());
            auto s = crossing_absorption_check(2, m, Absorb::Sigma);
            t.check(s.ok, "positive crossing" + ms + s.summary());
            auto si = crossing_absorption_check(2, m, Absorb::SigmaInv);
            t.check(si.ok, "negative crossing" + ms + si.summary());
            auto id = idempotence_check(2, m);
            t.check(id.ok, "idempotence" + ms + id.summary());
        }
    });
}

// Lasagna table at n = 2, alpha = 0 against close(R) tensored with the
// polynomial ring (one class per even q <= 0). Certified region: rows inside
// the window of R, |q| <= 8, and per row the q-degrees above every entry on
// which horizons 3 and 4 disagree or that is horizon-limited.
inline SuiteResult suite_even_case() {
    return suites::timed(10, "even-case", 0, [](suites::Tally& t) {
        auto R = rozansky_projector_trunc(3);
        auto rtab = close_homology(R.complex).dims;
        auto L3 = lasagna_s2xb2(2, 0, 3), L4 = lasagna_s2xb2(2, 0, 4);
        std::map<int, int> cut;  // row -> highest uncertified q
        auto bad = [&](int h, int q) {
            auto it = cut.find(h);
            if (it == cut.end() || it->second < q) cut[h] = q;
        };
        std::set<Bideg> keys;
        for (auto& [b, e] : L3.table) keys.insert(b);
        for (auto& [b, e] : L4.table) keys.insert(b);
        for (auto& b : keys) {
            auto a = L3.table.find(b), c = L4.table.find(b);
            long d3 = a == L3.table.end() ? 0 : a->second.dim, d4 = c == L4.table.end() ? 0 : c->second.dim;
            bool s3 = a == L3.table.end() || a->second.stable, s4 = c == L4.table.end() || c->second.stable;
            if (d3 != d4 || !s3 || !s4) bad(b.first, b.second);
        }
        auto predicted = [&](int h, int q) {
            long v = 0;
            for (auto& [b, d] : rtab.d)
                if (b.first == h && b.second >= q && (b.second - q) % 2 == 0) v += d;
            return v;
        };
        std::set<int> rows;
        for (auto& b : keys) rows.insert(b.first);
        for (auto& [b, d] : rtab.d) rows.insert(b.first);
        int compared = 0;
        for (int h : rows) {
            if (!R.window.contains(h)) continue;
            int lo = -8;
            if (cut.count(h)) lo = std::max(lo, cut[h] + 2);
            for (int q = lo; q <= 8; ++q) {
                auto c = L4.table.find({h, q});
                long got = c == L4.table.end() ? 0 : c->second.dim;
                long want = predicted(h, q);
                if (got || want) ++compared;
                t.check(got == want, "(" + std::to_string(h) + "," + std::to_string(q) + ") got " +
                                         std::to_string(got) + " want " + std::to_string(want));
            }
        }
        t.check(compared > 0, "no certified nonzero bidegrees");
    });
}

inline std::vector<std::string> suite_keys() {
    return {"local-relations", "oracle-corpus",  "invariance", "symmetrizer", "polynomial-ring",
            "odd-vanishing",   "s2xs2",          "belt-splitting", "projector", "even-case"};
}

inline SuiteResult run_suite(const std::string& key) {
    if (key == "local-relations") return suite_local_relations();
    if (key == "oracle-corpus") return suite_oracle_corpus();
    if (key == "invariance") return suite_invariance();
    if (key == "symmetrizer") return suite_symmetrizer();
    if (key == "polynomial-ring") return suite_polynomial_ring();
    if (key == "odd-vanishing") return suite_odd_vanishing();
    if (key == "s2xs2") return suite_s2xs2();
    if (key == "belt-splitting") return suite_belt_splitting();
    if (key == "projector") return suite_projector();
    if (key == "even-case") return suite_even_case();
    fail("ParseError", "unknown suite '" + key + "'", ErrClass::Parse);
}

}  // namespace khcob
