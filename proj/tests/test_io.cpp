#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "khcob/io.hpp"

using namespace khcob;
using io::json;

namespace {

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("khcob-test-" + name + "-" + std::to_string(::getpid()));
    std::filesystem::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("rationals serialize as numerator and denominator strings", "[io]") {
    for (Q x : {Q(0), Q(-3, 4), Q(mpz_class("123456789012345678901234567890"), 7)}) {
        x.canonicalize();
        json j = io::q_json(x);
        CHECK(j["num"].is_string());
        CHECK(io::q_of(j) == x);
    }
    CHECK(io::q_json(Q(6, 4)) == json{{"num", "3"}, {"den", "2"}});
    CHECK_THROWS_AS(io::q_of(json{{"num", "1"}, {"den", "0"}}), Error);
    CHECK_THROWS_AS(io::q_of(json{{"num", "x"}, {"den", "1"}}), Error);
}

TEST_CASE("complexes round trip", "[io]") {
    for (const Complex* C : {&truncated_projector(2, 2).complex}) {
        Complex D = io::complex_of(json::parse(io::complex_json(*C).dump()));
        REQUIRE(D.size() == C->size());
        for (int i = 0; i < D.size(); ++i) {
            CHECK(D.obj[i].f == C->obj[i].f);
            CHECK(D.obj[i].h == C->obj[i].h);
            CHECK(D.obj[i].q == C->obj[i].q);
        }
        CHECK(mat_eq(D.d, C->d));
        CHECK(check_d_squared(D));
    }
    Complex B = bracket(braid_diagram(3, {1, -2, 1}));
    Complex D = io::complex_of(io::complex_json(B));
    CHECK(mat_eq(D.d, B.d));
    CHECK(io::complex_json(D) == io::complex_json(B));
    CHECK_THROWS_AS(io::complex_of(json{{"nb", 0}}), Error);
}

TEST_CASE("dimension tables round trip", "[io]") {
    GradedDims g;
    g.add(0, -2, 1);
    g.add(-3, 6, 2);
    CHECK(io::dims_of_json(io::dims_json(g)) == g);
}

TEST_CASE("canonical diagram keys", "[io]") {
    auto a = io::canonical_form(parse_diagram("pd: X(1,3,2,4) X(3,1,4,2); close"));
    auto b = io::canonical_form(parse_diagram("pd: X(7,5,8,6) X(5,7,6,8); close"));
    auto c = io::canonical_form(parse_diagram("pd: X(3,1,4,2) X(1,3,2,4); close"));
    CHECK(a == b);
    CHECK(a == c);
    auto t1 = io::canonical_form(parse_diagram("braid: s1 s1 s1; close"));
    auto t2 = io::canonical_form(parse_diagram("braid: s1^-1 s1^-1 s1^-1; close"));
    CHECK(t1 != t2);
    CHECK(t1.rfind("pd:", 0) == 0);
    // open tangles keep their slices
    CHECK(io::canonical_form(parse_diagram("braid: s1")).rfind("slices:", 0) == 0);
}

TEST_CASE("windows", "[io]") {
    auto w = io::parse_window("0:4,-8:");
    CHECK(w.contains(0, -8));
    CHECK_FALSE(w.contains(5, 0));
    CHECK_FALSE(w.contains(0, -10));
    CHECK(io::parse_window("").unbounded());
    CHECK_THROWS_AS(io::parse_window("0:4"), Error);
    CHECK_THROWS_AS(io::parse_window("4:0,:"), Error);
    CHECK(io::window_json(w) == json{{"h", {0, 4}}, {"q", {-8, nullptr}}});
}

TEST_CASE("reports are deterministic and carry provenance", "[io]") {
    auto make = [] {
        json p = {{"space", "s2xb2"}, {"strands", 1}, {"level", {0}}};
        return io::colimit_report("lasagna", p, lasagna_s2xb2(1, 0, 2), {}).dump();
    };
    auto a = make(), b = make();
    CHECK(a == b);
    json r = json::parse(a);
    CHECK(r["engine_version"] == io::kEngineVersion);
    CHECK(r["convention"] == "KhR2");
    CHECK(r["horizon"] == 2);
    CHECK(r.contains("window"));
    for (auto& e : r["entries"]) {
        CHECK(e.contains("stable"));
        CHECK(e["dim"] == 0);
    }
    CHECK(r["all_stable"] == true);
    CHECK_FALSE(io::render_table(r).empty());
}

TEST_CASE("cache", "[io]") {
    auto dir = scratch("cache");
    io::Cache c(dir);
    json payload = {{"x", 1}, {"q", io::q_json(Q(1, 3))}};
    auto k = c.key("some canonical form");
    SECTION("put then get") {
        CHECK_FALSE(c.get(k).has_value());
        c.put(k, payload);
        auto got = c.get(k);
        REQUIRE(got.has_value());
        CHECK(*got == payload);
        c.put(k, payload);
        CHECK(*c.get(k) == payload);
    }
    SECTION("keys depend on the engine version") {
        io::Cache other(dir, "0.0.0-old");
        CHECK(other.key("some canonical form") != k);
        other.put(k, payload);
        // an entry written by another version is ignored
        CHECK_FALSE(c.get(k).has_value());
    }
    SECTION("corrupted checksum") {
        c.put(k, payload);
        json e = json::parse(std::ifstream(c.path(k)));
        e["payload"]["x"] = 2;
        std::ofstream(c.path(k)) << e.dump();
        CHECK_THROWS_MATCHES(c.get(k), Error, Catch::Matchers::Predicate<const Error&>(
                                                  [](const Error& x) { return x.kind == "CacheCorrupt"; }));
    }
    SECTION("truncated file") {
        c.put(k, payload);
        std::ofstream(c.path(k)) << "{\"engine";
        CHECK_THROWS_AS(c.get(k), Error);
    }
    SECTION("no temporary files left behind") {
        c.put(k, payload);
        int n = 0;
        for (auto& f : std::filesystem::recursive_directory_iterator(dir)) n += f.is_regular_file();
        CHECK(n == 1);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("default cache directory honours the environment", "[io]") {
    ::setenv("KHCOB_CACHE_DIR", "/tmp/khcob-env-dir", 1);
    CHECK(io::Cache::default_dir() == "/tmp/khcob-env-dir");
    ::unsetenv("KHCOB_CACHE_DIR");
    CHECK(io::Cache::default_dir() != "/tmp/khcob-env-dir");
}
