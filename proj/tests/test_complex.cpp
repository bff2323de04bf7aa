#include <catch_amalgamated.hpp>

#include "khcob/complex.hpp"

using namespace khcob;

namespace {

FlatId tau() { return make_matching(2, 2, {{0, 1}, {2, 3}}); }

// h^-1 q (0-res) -> (1-res); the positive type has the turnback as 0-res.
Complex crossing(bool positive) {
    FlatId a = positive ? tau() : id_flat(2);
    FlatId b = positive ? id_flat(2) : tau();
    Complex C;
    C.nb = C.nt = 2;
    C.obj = {{a, -1, 1}, {b, 0, 0}};
    C.d = Mat(2, 2);
    C.d.col[0].emplace_back(1, basis_cob(a, b, 0));
    return C;
}

Complex closed_crossing_pair() {
    Complex s = stack(crossing(true), crossing(false));
    return glue_complexes({&s}, closure_spec(2));
}

}  // namespace

TEST_CASE("crossing complexes satisfy d^2 = 0 and glue correctly") {
    CHECK(check_d_squared(crossing(true)));
    Complex s = stack(crossing(true), crossing(false));
    CHECK(s.size() == 4);
    CHECK(check_d_squared(s));
    Complex s3 = stack(s, crossing(true));
    CHECK(check_d_squared(s3));
    Complex j = juxtapose(crossing(true), crossing(false));
    CHECK(j.nb == 4);
    CHECK(check_d_squared(j));
}

TEST_CASE("second Reidemeister move simplifies to a single strand pair") {
    Complex s = stack(crossing(true), crossing(false));
    auto [D, r] = simplify(s, {true, true});
    REQUIRE(D.size() == 1);
    CHECK(same_picture(D.obj[0].f, id_flat(2)));
    CHECK(D.obj[0].h == -1);
    CHECK(D.obj[0].q == 1);
    CHECK(reduction_laws_hold(s, D, r));
}

TEST_CASE("delooping satisfies the reduction laws") {
    Complex c = closed_crossing_pair();
    CHECK(check_d_squared(c));
    auto [D, r] = deloop(c);
    CHECK(check_d_squared(D));
    CHECK(reduction_laws_hold(c, D, r));
    auto [E, r2] = simplify(c, {true, true});
    CHECK(reduction_laws_hold(c, E, r2));
    // closure of sigma sigma^-1 on two strands is the two-component unlink
    CHECK(E.size() == 4);
    CHECK(mat_is_zero(E.d));
}

TEST_CASE("cone of the identity is contractible") {
    Complex s = stack(crossing(true), crossing(true));
    Complex c = cone(s, s, map_identity(s));
    CHECK(check_d_squared(c));
    auto [D, r] = simplify(c, {true, true});
    CHECK(D.size() == 0);
    CHECK(reduction_laws_hold(c, D, r));
}

TEST_CASE("transfer of chain maps through reductions") {
    Complex s = stack(crossing(true), crossing(false));
    auto [D, r] = simplify(s, {true, true});
    Map t = transfer_map(map_identity(s), r, r);
    CHECK(is_chain_map(D, D, t));
    CHECK(mat_eq(t.m, mat_identity(D)));
}

TEST_CASE("telescope of identities is equivalent to the last term") {
    Complex a = crossing(true);
    DirectedSystemOfComplexes S;
    for (int k = 0; k < 3; ++k) S.A.push_back(a);
    for (int k = 0; k < 2; ++k) S.f.push_back(map_identity(a));
    Complex T = telescope_total(S, 2);
    CHECK(check_d_squared(T));
    auto [D, r] = simplify(T, {true, true});
    auto [A2, ra] = simplify(a);
    CHECK(D.size() == A2.size());
    CHECK(reduction_laws_hold(T, D, r));
    CHECK_THROWS(telescope_total(S, 0));
}

TEST_CASE("telescope of zero maps keeps only the last term") {
    Complex a = from_flat(id_flat(1));
    DirectedSystemOfComplexes S;
    for (int k = 0; k < 3; ++k) S.A.push_back(a);
    for (int k = 0; k < 2; ++k) S.f.push_back(Map{Mat(1, 1), 0, 0});
    Complex T = telescope_total(S, 2);
    CHECK(check_d_squared(T));
    auto [D, r] = simplify(T);
    // vertical identities cancel A_0 and A_1 against the bottom row
    CHECK(D.size() == 1);
    CHECK(D.obj[0].h == 0);
}

TEST_CASE("non chain maps are rejected by cone") {
    Complex a = crossing(true);
    Map bad{Mat(2, 2), 0, 0};
    bad.m.col[0].emplace_back(0, identity(tau()));
    bad.m.col[1].emplace_back(1, scaled(identity(id_flat(2)), Q(2)));
    CHECK_THROWS(cone(a, a, bad));
}
