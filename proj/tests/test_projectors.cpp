#include <catch2/catch_amalgamated.hpp>

#include "khcob/projectors.hpp"

using namespace khcob;

namespace {

std::multiset<std::tuple<int, int, int, int>> picture_multiset(const Complex& C) {
    std::multiset<std::tuple<int, int, int, int>> s;
    for (auto& o : C.obj) s.insert({through_degree(o.f), flat(o.f).loops(), o.h, o.q});
    return s;
}

GradedDims rows_in(const GradedDims& g, const Window& w) {
    GradedDims r;
    for (auto& [b, v] : g.d)
        if (w.contains(b.first)) r.add(b.first, b.second, v);
    return r;
}

}  // namespace

TEST_CASE("truncated projector normalization", "[projectors]") {
    SECTION("one strand is the identity") {
        for (int m = 1; m <= 3; ++m) {
            const auto& P = truncated_projector(1, m);
            REQUIRE(P.complex.size() == 1);
            CHECK(through_degree(P.complex.obj[0].f) == 1);
        }
    }
    SECTION("identity appears once, at (0,0)") {
        for (int m = 1; m <= 3; ++m) {
            const auto& P = truncated_projector(2, m);
            int ids = 0;
            for (auto& o : P.complex.obj)
                if (through_degree(o.f) == 2) {
                    ++ids;
                    CHECK(o.h == 0);
                    CHECK(o.q == 0);
                }
            CHECK(ids == 1);
            for (auto& o : P.complex.obj) CHECK(o.h <= 0);
        }
    }
    SECTION("m = 2 and m = 3 agree in the window") {
        const auto& P2 = truncated_projector(2, 2);
        const auto& P3 = truncated_projector(2, 3);
        Window w = intersect(P2.window, P3.window);
        CHECK(w.lo <= 0);
        CHECK(rows_in(P2.closure, w) == rows_in(P3.closure, w));
        // one class per certified bidegree
        for (auto& [b, v] : rows_in(P3.closure, P3.window).d) CHECK(v == 1);
        // certified windows grow with m
        CHECK(P3.window.lo < P2.window.lo);
    }
    SECTION("resource guard") {
        CHECK_THROWS_AS(truncated_projector(4, 1), Error);
        CHECK_THROWS_AS(truncated_projector(2, 5), Error);
    }
}

TEST_CASE("dualize", "[projectors]") {
    Complex pos = bracket(braid_diagram(2, {1}));
    Complex neg = bracket(braid_diagram(2, {-1}));
    SECTION("positive crossing dualizes to negative crossing") {
        Complex d = dualize(pos);
        CHECK(check_d_squared(d));
        CHECK(picture_multiset(d) == picture_multiset(neg));
        CHECK(close_homology(d).dims == close_homology(neg).dims);
        // and inside a larger diagram
        Complex a = stack(d, bracket(braid_diagram(2, {-1, -1})));
        Complex b = bracket(braid_diagram(2, {-1, -1, -1}));
        CHECK(close_homology(a).dims == close_homology(b).dims);
    }
    SECTION("involution") {
        const auto& P = truncated_projector(2, 3);
        Complex dd = dualize(dualize(P.complex));
        REQUIRE(dd.size() == P.complex.size());
        for (int i = 0; i < dd.size(); ++i) {
            CHECK(dd.obj[i].f == P.complex.obj[i].f);
            CHECK(dd.obj[i].h == P.complex.obj[i].h);
            CHECK(dd.obj[i].q == P.complex.obj[i].q);
        }
        CHECK(mat_eq(dd.d, P.complex.d));
    }
    SECTION("dual projector: negated table, nonnegative degrees") {
        const auto& P = truncated_projector(2, 3);
        Complex D = dualize(P.complex);
        CHECK(check_d_squared(D));
        for (auto& o : D.obj) CHECK(o.h >= 0);
        CHECK(close_homology(D).dims == negated(P.closure));
    }
    SECTION("cobordisms with loops") {
        // a differential between looped flats survives the round trip
        Complex C = bracket(braid_diagram(3, {1, 2, 1, -2}));
        Complex D = dualize(C);
        CHECK(check_d_squared(D));
        CHECK(close_homology(D).dims == negated(close_homology(C).dims));
    }
}

TEST_CASE("belt splitting", "[projectors]") {
    SECTION("one strand, one belt") {
        auto R = belt_split_check(1, 1, 1);
        INFO(R.summary());
        CHECK(R.ok);
        CHECK(R.actual.at(0, -2) == 1);
        CHECK(R.actual.at(-2, 4) == 1);
    }
    SECTION("one strand, two belts, with and without symmetrization") {
        auto R = belt_split_check(1, 2, 1);
        INFO(R.summary());
        CHECK(R.ok);
        auto S = belt_split_check(1, 2, 1, true);
        INFO(S.summary());
        CHECK(S.ok);
        CHECK(S.actual.total() == 6);
    }
    SECTION("two strands, one belt") {
        auto R = belt_split_check(2, 1, 2);
        INFO(R.summary());
        CHECK(R.ok);
        // the second summand only enters the window at m = 4
        auto R4 = belt_split_check(2, 1, 4);
        INFO(R4.summary());
        CHECK(R4.ok);
        CHECK(R4.window.lo <= -4);
        CHECK(R4.actual.at(-4, 5) == 2);
    }
}

TEST_CASE("crossing absorption and turnbacks", "[projectors]") {
    for (int m = 2; m <= 3; ++m) {
        INFO("m = " << m);
        auto s = crossing_absorption_check(2, m, Absorb::Sigma);
        INFO(s.summary());
        CHECK(s.ok);
        auto si = crossing_absorption_check(2, m, Absorb::SigmaInv);
        INFO(si.summary());
        CHECK(si.ok);
        auto t = crossing_absorption_check(2, m, Absorb::Tau);
        INFO(t.summary());
        CHECK(t.ok);
        CHECK(t.window.lo <= 0);
    }
}

TEST_CASE("two-strand through-degree-0 piece", "[projectors]") {
    for (int m = 2; m <= 3; ++m) {
        auto R = rozansky_projector_trunc(m);
        for (auto& o : R.complex.obj) CHECK(through_degree(o.f) == 0);
        CHECK(check_d_squared(R.complex));
    }
    auto R2 = rozansky_projector_trunc(2), R3 = rozansky_projector_trunc(3);
    Window w = intersect(R2.window, R3.window);
    auto h2 = close_homology(R2.complex).dims, h3 = close_homology(R3.complex).dims;
    CHECK(rows_in(h2, w) == rows_in(h3, w));
    CHECK(h3.at(0, 0) == 1);
    CHECK(h3.at(0, -2) == 1);
    CHECK(h3.at(1, -2) == 1);
    SECTION("a turnback absorbs the piece up to delooping") {
        // the dual projector kills turnbacks, so only the identity summand survives
        Complex tau = absorb_piece(2, Absorb::Tau, 1);
        auto circle = close_homology(tau).dims;
        GradedDims two = shifted(circle, 0, 1);
        for (auto& [b, v] : shifted(circle, 0, -1).d) two.add(b.first, b.second, v);
        for (auto* R : {&R2, &R3}) {
            auto above = close_homology(stack(R->complex, tau)).dims;
            auto below = close_homology(stack(tau, R->complex)).dims;
            auto both = close_homology(stack(tau, stack(R->complex, tau))).dims;
            CHECK(rows_in(above, R->window) == rows_in(circle, R->window));
            CHECK(rows_in(below, R->window) == rows_in(circle, R->window));
            CHECK(rows_in(both, R->window) == rows_in(two, R->window));
        }
    }
}

TEST_CASE("idempotence in the window", "[projectors]") {
    for (int m = 2; m <= 3; ++m) {
        auto R = idempotence_check(2, m);
        INFO(R.summary());
        CHECK(R.ok);
        CHECK(R.compared > 0);
    }
}
