#include <catch2/catch_amalgamated.hpp>

#include "khcob/lasagna.hpp"

using namespace khcob;

namespace {

// Scalar of a closed map between single-object empty complexes.
Q scalar_of(const Map& m) {
    REQUIRE(m.m.rows == 1);
    REQUIRE(m.m.cols == 1);
    if (m.m.col[0].empty()) return Q(0);
    Q v;
    REQUIRE(iso_scalar(m.m.col[0][0].second, v));
    return v;
}

Movie closed_start() { return Movie({make_box(0, 0, pad_complex(0))}); }

GradedLinearMap sandwich(const GradedLinearMap& a, const GradedLinearMap& b, const GradedLinearMap& c) {
    return compose(a, compose(b, c));
}

}  // namespace

TEST_CASE("movie maps on closed surfaces", "[movie]") {
    Map X = map_identity(from_flat(empty_flat()));
    SECTION("empty movie is the identity") {
        Movie M = closed_start();
        CHECK(scalar_of(M.run_forward(X)) == 1);
    }
    SECTION("birth then death is a sphere") {
        Movie M = closed_start();
        M.birth(1, {make_piece(SliceKind::Cup, 0, 0), make_piece(SliceKind::Cap, 2, 0)});
        M.death(1, 3);
        CHECK(scalar_of(M.run_forward(X)) == 0);
    }
    SECTION("birth, dot, death is a dotted sphere") {
        Movie M = closed_start();
        M.birth(1, {make_piece(SliceKind::Cup, 0, 0), make_piece(SliceKind::Cap, 2, 0)});
        M.dot(2, 0);
        M.death(1, 3);
        CHECK(scalar_of(M.run_forward(X)) == 1);
    }
    SECTION("two dots vanish") {
        Movie M = closed_start();
        M.birth(1, {make_piece(SliceKind::Cup, 0, 0), make_piece(SliceKind::Cap, 2, 0)});
        M.dot(2, 0);
        M.dot(2, 1);
        M.death(1, 3);
        CHECK(scalar_of(M.run_forward(X)) == 0);
    }
    SECTION("dotted birth read backwards") {
        Movie M = closed_start();
        M.birth(1, {make_piece(SliceKind::Cup, 0, 0), make_piece(SliceKind::Cap, 2, 0)}, true);
        M.death(1, 3);
        CHECK(scalar_of(M.run_forward(X)) == 1);
        CHECK(scalar_of(M.run_backward(X)) == 0);
    }
}

TEST_CASE("annulus pair evaluates to a torus", "[cabling]") {
    for (int n : {0, 1, 2}) {
        BeltTower T(n, identity_complex(n));
        Map tor = map_compose(T.acap(2, 1), T.acup(2, 1));
        CHECK(tor.dh == 0);
        CHECK(tor.dq == 0);
        Map two = map_identity(T.C(0));
        two.m = mat_scale(two.m, Q(2));
        INFO("n = " << n);
        CHECK(mat_eq(tor.m, two.m));
        Map dt = map_compose(T.acap(2, 1), T.acup(2, 1, true));
        // a dotted torus is zero
        CHECK(mat_is_zero(dt.m));
        CHECK(is_chain_map(T.C(2), T.C(0), T.acap(2, 1)));
        CHECK(is_chain_map(T.C(0), T.C(2), T.acup(2, 1, true)));
    }
}

TEST_CASE("swap relations on closure homology", "[cabling]") {
    for (int n : {0, 1}) {
        INFO("n = " << n);
        BeltTower T(n, identity_complex(n));
        auto s1 = T.swap(3, 1), s2 = T.swap(3, 2);
        auto I = identity_map(T.H(3).dims);
        CHECK(map_eq(compose(s1, s1), I));
        CHECK(map_eq(compose(s2, s2), I));
        CHECK(map_eq(sandwich(s1, s2, s1), sandwich(s2, s1, s2)));
        // (cup cap)^2 = 2 cup cap
        auto cc = compose(T.hacup(2, 1), T.hacap(2, 1));
        auto cc2 = compose(cc, cc);
        for (auto& [b, m] : cc.block) CHECK(cc2.at(b) == scaled(m, Q(2)));
    }
}

TEST_CASE("far swaps commute", "[cabling]") {
    BeltTower T(0, identity_complex(0));
    auto s1 = T.swap(4, 1), s3 = T.swap(4, 3);
    CHECK(map_eq(compose(s1, s3), compose(s3, s1)));
}

TEST_CASE("symmetrizer", "[cabling]") {
    BeltTower T(0, identity_complex(0));
    SECTION("one belt gives the identity projector") {
        auto S = symmetrizer({}, T.H(1).dims);
        CHECK(S.dims == T.H(1).dims);
    }
    SECTION("two belts") {
        auto S = symmetrizer(T.swaps(2), T.H(2).dims);
        for (auto& [b, e] : S.e) CHECK(e * e == e);
        // Sym^2 of a two dimensional space
        CHECK(S.dims.total() == 3);
        auto inv = invariant_basis(T.swaps(2), T.H(2).dims);
        CHECK(dims_of(inv) == S.dims);
    }
    SECTION("undotted annulus dies after symmetrizing") {
        auto S = symmetrizer(T.swaps(3), T.H(3).dims);
        auto up = T.hacup(3, 1);
        for (auto& [b, m] : up.block) {
            Bideg t{b.first + up.dh, b.second + up.dq};
            if (!S.e.count(t)) continue;
            CHECK((S.e.at(t) * m).is_zero());
        }
    }
}

TEST_CASE("dotted annulus commutes with swaps", "[cabling]") {
    BeltTower T(1, identity_complex(1));
    auto F = T.hacup(3, 1, true);
    // belt 1 of C_1 is belt 3 of C_3
    CHECK(map_eq(compose(F, identity_map(T.H(1).dims)), F));
    auto F4 = T.hacup(4, 1, true);
    CHECK(map_eq(compose(F4, T.swap(2, 1)), compose(T.swap(4, 3), F4)));
}

TEST_CASE("colimit rule", "[cabling]") {
    GradedDims V;
    V.add(0, 0, 2);
    V.add(1, 2, 1);
    auto idr = colimit(constant_system(V, 4, false));
    CHECK(idr.stable_dims() == V);
    CHECK(idr.all_stable());
    auto zr = colimit(constant_system(V, 4, true));
    CHECK(zr.all_stable());
    CHECK(zr.stable_dims().total() == 0);
    // f with f.f = 0 but f != 0
    DirectedSystemVS S = constant_system(V, 4, false);
    for (int a = 0; a < 3; ++a) {
        QMat m(2, 2);
        m(0, 1) = 1;
        S.maps[a].block[{0, 0}] = m;
        S.maps[a].block[{1, 2}] = QMat(1, 1);
    }
    auto nr = colimit(S);
    CHECK(nr.all_stable());
    CHECK(nr.stable_dims().total() == 0);
}

TEST_CASE("blackboard cables", "[lasagna]") {
    SliceDiagram U = close_diagram(braid_diagram(1, {}));
    SliceDiagram H = close_diagram(braid_diagram(2, {1, 1}));
    SECTION("unknot, one strand each way") {
        auto C = cable(U, CableIndex{{{1, 1}}});
        CHECK(C.crossings() == 0);
        CHECK(trace(C).ncomp == 2);
        CHECK(kh_slices(C) == cube_oracle(C));
    }
    SECTION("trivial cable is the link itself") {
        auto C = cable(H, CableIndex{{{0, 1}, {0, 1}}});
        CHECK(kh_slices(C) == kh_slices(H));
    }
    SECTION("one component doubled with opposite orientations") {
        auto C = cable(H, CableIndex{{{1, 1}, {0, 1}}});
        auto T = trace(C);
        CHECK(C.crossings() == 4);
        CHECK(T.ncomp == 3);
        CHECK(T.nneg == 2);
        CHECK(kh_slices(C) == cube_oracle(C));
    }
    SECTION("framed unknot cable") {
        auto C = cable(set_framing(U, 0, 1), CableIndex{{{0, 2}}});
        CHECK(trace(C).ncomp == 2);
        CHECK(kh_slices(C) == cube_oracle(C));
    }
    CHECK_THROWS_AS(cable(H, CableIndex{{{0, 1}}}), Error);
}

TEST_CASE("two-handle presets", "[lasagna]") {
    CHECK(two_handle_preset("hopf00").framing == std::vector<int>{0, 0});
    CHECK(two_handle_preset("hopf-10").framing == std::vector<int>{-1, 0});
    CHECK(two_handle_preset("unknot0").kind == "unknot");
    CHECK_THROWS_AS(two_handle_preset("trefoil"), Error);
    CHECK_THROWS_AS(two_handle_preset("hopf0"), Error);
}

TEST_CASE("polynomial ring for the empty boundary", "[lasagna]") {
    for (int alpha : {0, 1, 2}) {
        INFO("alpha = " << alpha);
        auto R = lasagna_s2xb2(0, alpha, 3);
        std::string why;
        CHECK(matches_polynomial_ring(R, 0, 8, &why));
        INFO(why);
    }
}

TEST_CASE("one strand vanishes", "[lasagna]") {
    for (int alpha : {0, 1}) {
        auto R = lasagna_s2xb2(1, alpha, 3);
        CHECK(R.all_stable());
        CHECK(R.stable_dims().total() == 0);
    }
}

TEST_CASE("odd levels on the Hopf link vanish", "[lasagna]") {
    for (auto [name, a] : std::vector<std::pair<std::string, std::vector<int>>>{
             {"hopf00", {1, 0}}, {"hopf00", {1, 1}}, {"hopf10", {1, 0}}}) {
        INFO(name);
        auto R = lasagna_2handle(two_handle_preset(name), a, 1);
        CHECK(R.all_stable());
        CHECK(R.stable_dims().total() == 0);
        CHECK_FALSE(R.note.empty());
    }
}

TEST_CASE("symmetrizers are idempotent", "[cabling]") {
    for (int n = 0; n <= 2; ++n)
        for (int k = 1; k <= 4; ++k) {
            INFO("n = " << n << ", k = " << k);
            BeltTower T(n, identity_complex(n));
            auto S = symmetrizer(T.swaps(k), T.H(k).dims);
            for (auto& [b, e] : S.e) CHECK(e * e == e);
        }
}
