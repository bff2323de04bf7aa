#include <catch_amalgamated.hpp>

#include <random>

#include "khcob/khr2.hpp"

using namespace khcob;

namespace {

GradedDims table(std::initializer_list<std::tuple<int, int, long>> xs) {
    GradedDims g;
    for (auto [h, q, v] : xs) g.add(h, q, v);
    return g;
}

std::vector<int> random_word(std::mt19937& rng, int n, int len) {
    std::vector<int> w;
    for (int i = 0; i < len; ++i) {
        int g = 1 + (int)(rng() % (n - 1));
        w.push_back(rng() % 2 ? g : -g);
    }
    return w;
}

GradedDims closed_braid(int n, const std::vector<int>& w) { return kh_slices(close_diagram(braid_diagram(n, w))); }

}  // namespace

TEST_CASE("parse_diagram examples and errors") {
    auto t = parse_diagram("braid: s1 s1 s1; close");
    CHECK(t.closed);
    CHECK(t.sd.crossings() == 3);
    auto h = parse_diagram("pd: X(1,3,2,4) X(3,1,4,2); close");
    CHECK(h.is_pd);
    CHECK(h.pd.X.size() == 2);
    auto b = parse_diagram("belt(n=2, k=1)");
    CHECK(b.sd.crossings() == 4);
    CHECK(b.sd.nb == 2);
    CHECK(b.sd.nt() == 2);
    CHECK_THROWS_AS(parse_diagram("braid: t1"), Error);
    CHECK_THROWS_AS(parse_diagram("pd: X(1,2,3)"), Error);
    CHECK_THROWS_AS(parse_diagram("pd: X(1,2,3,4)"), Error);
    CHECK_THROWS_AS(parse_diagram("wibble"), Error);
    try {
        parse_diagram("braid: s0");
    } catch (const Error& e) {
        CHECK(e.kind == "ParseError");
        CHECK(e.cls == ErrClass::Parse);
    }
}

TEST_CASE("homology examples") {
    CHECK(kh(parse_diagram("strands=1; braid: ; close")) == table({{0, -1, 1}, {0, 1, 1}}));
    CHECK(homology(from_flat(empty_flat())) == table({{0, 0, 1}}));
    CHECK(kh(parse_diagram("braid: s1 s1 s1; close")) == table({{0, -2, 1}, {0, 0, 1}, {-2, 2, 1}, {-3, 6, 1}}));
    CHECK_THROWS(homology(from_flat(id_flat(1))));
}

TEST_CASE("oracle corpus: scanning homology equals the cube oracle") {
    const char* corpus[] = {"strands=1; braid: ; close",
                            "braid: s1 s1; close",
                            "braid: s1^-1 s1^-1; close",
                            "braid: s1 s1 s1; close",
                            "braid: s1^-1 s1^-1 s1^-1; close",
                            "braid: s1 s2^-1 s1 s2^-1; close",
                            "braid: s1 s1 s1 s1; close",
                            "braid: s1 s1 s1 s1 s1 s1; close",
                            "strands=2; braid: ; close",
                            "belt(n=1, k=2); close"};
    for (auto d : corpus) {
        INFO(d);
        auto T = parse_diagram(d);
        auto a = kh(T);
        CHECK(a == cube_oracle(T));
        PD P;
        trace(T.sd, &P);
        CHECK(kh_pd(P) == a);
        CHECK(kh(parse_diagram(std::string(d) + "; mirror")) == negated(a));
    }
    auto fig8 = kh(parse_diagram("braid: s1 s2^-1 s1 s2^-1; close"));
    CHECK(fig8.total() == 6);
    CHECK(fig8 == negated(fig8));
    // T_1 with one belt closes to the Hopf link
    auto t1 = parse_diagram("belt(n=1, k=1); close");
    CHECK(kh(t1).total() == 4);
    CHECK(kh(t1) == cube_oracle(t1));
}

TEST_CASE("planar code input agrees with the oracle") {
    auto h = parse_diagram("pd: X(1,3,2,4) X(3,1,4,2); close");
    CHECK(kh(h) == cube_oracle(h));
    CHECK(kh(h).total() == 4);
    auto tref = parse_diagram("pd: X(1,5,2,4) X(3,1,4,6) X(5,3,6,2)");
    CHECK(kh(tref) == cube_oracle(tref));
    CHECK(kh(tref).total() == 4);
    CHECK(kh(parse_diagram("pd: X(1,5,2,4) X(3,1,4,6) X(5,3,6,2); mirror")) == negated(kh(tref)));
}

TEST_CASE("Reidemeister invariance on randomized braid closures") {
    std::mt19937 rng(2024);
    int pairs = 0;
    for (int it = 0; it < 8; ++it) {
        int n = 3;
        auto w = random_word(rng, n, 2 + rng() % 3);
        auto base = closed_braid(n, w);
        // R2
        auto w2 = w;
        size_t at = rng() % (w.size() + 1);
        int g = 1 + rng() % (n - 1);
        w2.insert(w2.begin() + at, {g, -g});
        CHECK(closed_braid(n, w2) == base);
        ++pairs;
        // R3
        auto a = w, b = w;
        a.insert(a.begin() + at, {1, 2, 1});
        b.insert(b.begin() + at, {2, 1, 2});
        CHECK(closed_braid(n, a) == closed_braid(n, b));
        ++pairs;
        // R1 by Markov stabilization: a positive kink shifts q by -1
        auto w3 = w;
        w3.push_back(n);
        CHECK(closed_braid(n + 1, w3) == shifted(base, 0, -1));
        auto w4 = w;
        w4.push_back(-n);
        CHECK(closed_braid(n + 1, w4) == shifted(base, 0, 1));
        pairs += 2;
    }
    CHECK(pairs >= 20);
}

TEST_CASE("framing kinks shift the quantum grading") {
    auto u = parse_diagram("strands=1; braid: ; close");
    auto u1 = parse_diagram("strands=1; braid: ; close; frame(1)=1");
    CHECK(u1.sd.crossings() == 1);
    CHECK(kh(u1) == shifted(kh(u), 0, -1));
    auto u2 = parse_diagram("strands=1; braid: ; close; frame(1)=-2");
    CHECK(kh(u2) == shifted(kh(u), 0, 2));
    CHECK(kh(u2) == cube_oracle(u2));
}

TEST_CASE("convention conversion") {
    auto t = parse_diagram("braid: s1 s1 s1; close");
    auto a = kh(t);
    int w = trace(t.sd).writhe();
    CHECK(w == 3);
    auto o = convert_conventions(a, "KhR2", "Kh", w);
    CHECK(o == table({{0, 1, 1}, {0, 3, 1}, {2, 5, 1}, {3, 9, 1}}));
    CHECK(convert_conventions(o, "Kh", "KhR2", w) == a);
    auto u = kh(parse_diagram("strands=1; braid: ; close"));
    CHECK(convert_conventions(u, "KhR2", "Kh", 0) == u);
    CHECK_THROWS(convert_conventions(u, "KhR2", "gl3", 0));
}

TEST_CASE("orientation flips change only the global shift") {
    auto D = close_diagram(braid_diagram(2, {1, 1}));
    auto F = D;
    F.flip = {0, 1};
    auto tD = trace(D), tF = trace(F);
    CHECK(tD.npos == 2);
    CHECK(tF.nneg == 2);
    CHECK(kh_slices(F) == cube_oracle(F));
}
