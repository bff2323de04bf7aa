#pragma once
// JSON reports, canonical diagram keys and the on-disk cache.

#include <openssl/evp.h>
#include <unistd.h>

#include <atomic>
#include <climits>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "lasagna.hpp"
#include "projectors.hpp"

namespace khcob::io {

using json = nlohmann::json;

inline constexpr const char* kEngineVersion = "0.1.0";
inline constexpr const char* kConvention = "KhR2";

inline std::string sha256_hex(const std::string& s) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    if (!EVP_Digest(s.data(), s.size(), md, &len, EVP_sha256(), nullptr))
        fail("Internal", "sha256 failed", ErrClass::Logic);
    std::ostringstream os;
    for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << (int)md[i];
    return os.str();
}

// ---------------------------------------------------------------------------
// Values.

inline json q_json(Q x) {
    x.canonicalize();
    return {{"num", x.get_num().get_str()}, {"den", x.get_den().get_str()}};
}

inline Q q_of(const json& j) {
    try {
        auto den = j.at("den").get<std::string>();
        if (mpz_class(den) == 0) fail("ParseError", "zero denominator", ErrClass::Parse);
        return q_from(j.at("num").get<std::string>(), den);
    } catch (const json::exception& e) {
        fail("ParseError", std::string("bad rational: ") + e.what(), ErrClass::Parse);
    } catch (const std::invalid_argument&) {
        fail("ParseError", "bad rational digits", ErrClass::Parse);
    }
}

inline json dims_json(const GradedDims& g) {
    json a = json::array();
    for (auto& [b, v] : g.d) a.push_back({{"bidegree", {b.first, b.second}}, {"dim", v}});
    return a;
}

inline GradedDims dims_of_json(const json& a) {
    GradedDims g;
    for (auto& e : a) {
        auto b = e.at("bidegree");
        g.add(b.at(0).get<int>(), b.at(1).get<int>(), e.at("dim").get<long>());
    }
    return g;
}

// Bidegree window; missing bounds are unbounded.
struct BidegWindow {
    std::optional<int> hlo, hhi, qlo, qhi;

    bool contains(int h, int q) const {
        return (!hlo || h >= *hlo) && (!hhi || h <= *hhi) && (!qlo || q >= *qlo) && (!qhi || q <= *qhi);
    }
    bool unbounded() const { return !hlo && !hhi && !qlo && !qhi; }
};

// "hlo:hhi,qlo:qhi" with empty sides allowed, e.g. "0:4,-8:".
inline BidegWindow parse_window(const std::string& s) {
    BidegWindow w;
    if (s.empty()) return w;
    auto comma = s.find(',');
    if (comma == std::string::npos) fail("ParseError", "window must look like hlo:hhi,qlo:qhi", ErrClass::Parse);
    auto side = [&](const std::string& part, std::optional<int>& lo, std::optional<int>& hi) {
        auto c = part.find(':');
        if (c == std::string::npos) fail("ParseError", "window range needs ':' in '" + part + "'", ErrClass::Parse);
        auto a = detail::trim(part.substr(0, c)), b = detail::trim(part.substr(c + 1));
        if (!a.empty()) lo = detail::to_int(a);
        if (!b.empty()) hi = detail::to_int(b);
    };
    side(s.substr(0, comma), w.hlo, w.hhi);
    side(s.substr(comma + 1), w.qlo, w.qhi);
    if ((w.hlo && w.hhi && *w.hlo > *w.hhi) || (w.qlo && w.qhi && *w.qlo > *w.qhi))
        fail("ParseError", "empty window '" + s + "'", ErrClass::Parse);
    return w;
}

inline json window_json(const BidegWindow& w) {
    auto v = [](const std::optional<int>& x) { return x ? json(*x) : json(nullptr); };
    return {{"h", {v(w.hlo), v(w.hhi)}}, {"q", {v(w.qlo), v(w.qhi)}}};
}

inline BidegWindow from_rows(const Window& r) {
    BidegWindow w;
    if (r.lo != INT_MIN) w.hlo = r.lo;
    if (r.hi != INT_MAX) w.hhi = r.hi;
    return w;
}

inline BidegWindow meet(const BidegWindow& a, const BidegWindow& b) {
    auto mx = [](std::optional<int> x, std::optional<int> y) { return x && y ? std::max(*x, *y) : x ? x : y; };
    auto mn = [](std::optional<int> x, std::optional<int> y) { return x && y ? std::min(*x, *y) : x ? x : y; };
    return {mx(a.hlo, b.hlo), mn(a.hhi, b.hhi), mx(a.qlo, b.qlo), mn(a.qhi, b.qhi)};
}

// ---------------------------------------------------------------------------
// Complexes.

inline json flat_json(FlatId id) {
    const auto& f = flat(id);
    return {{"nb", f.nb}, {"nt", f.nt}, {"pr", f.pr}, {"key", f.key}, {"lkey", f.lkey}};
}

inline FlatId flat_of(const json& j) {
    FlatData f;
    f.nb = j.at("nb").get<int>();
    f.nt = j.at("nt").get<int>();
    f.pr = j.at("pr").get<std::vector<int>>();
    f.key = j.at("key").get<std::vector<uint32_t>>();
    f.lkey = j.at("lkey").get<std::vector<uint32_t>>();
    if ((int)f.pr.size() != f.npts() || f.key.size() != f.pr.size())
        fail("ParseError", "flat tangle arrays do not match its boundary", ErrClass::Parse);
    return intern(std::move(f));
}

inline json complex_json(const Complex& C) {
    std::map<FlatId, int> idx;
    json flats = json::array(), objs = json::array(), entries = json::array();
    for (auto& o : C.obj) {
        if (!idx.count(o.f)) {
            idx[o.f] = (int)flats.size();
            flats.push_back(flat_json(o.f));
        }
        objs.push_back({{"flat", idx[o.f]}, {"h", o.h}, {"q", o.q}});
    }
    for (int j = 0; j < C.d.cols; ++j)
        for (auto& [i, c] : C.d.col[j]) {
            json terms = json::array();
            for (auto& t : c.terms) terms.push_back({{"dots", t.m}, {"coeff", q_json(t.c)}});
            entries.push_back({{"row", i}, {"col", j}, {"terms", terms}});
        }
    return {{"nb", C.nb}, {"nt", C.nt}, {"flats", flats}, {"objects", objs}, {"d", entries}};
}

inline Complex complex_of(const json& j) {
    try {
        Complex C;
        C.nb = j.at("nb").get<int>();
        C.nt = j.at("nt").get<int>();
        std::vector<FlatId> fl;
        for (auto& f : j.at("flats")) fl.push_back(flat_of(f));
        for (auto& o : j.at("objects")) C.obj.push_back({fl.at(o.at("flat").get<size_t>()), o.at("h"), o.at("q")});
        C.d = Mat(C.size(), C.size());
        for (auto& e : j.at("d")) {
            int i = e.at("row"), c = e.at("col");
            Cob x{C.obj.at(c).f, C.obj.at(i).f, {}};
            for (auto& t : e.at("terms")) x.terms.push_back({t.at("dots").get<uint64_t>(), q_of(t.at("coeff"))});
            normalize_terms(x.terms);
            C.d.col.at(c).emplace_back(i, std::move(x));
        }
        for (auto& col : C.d.col)
            std::sort(col.begin(), col.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
        return C;
    } catch (const json::exception& e) {
        fail("ParseError", std::string("bad complex: ") + e.what(), ErrClass::Parse);
    } catch (const std::out_of_range& e) {
        fail("ParseError", std::string("bad complex index: ") + e.what(), ErrClass::Parse);
    }
}

// ---------------------------------------------------------------------------
// Canonical diagram forms.

// Minimal string over cyclic rotations of the crossing list, edges renamed in
// order of first appearance.
inline std::string canonical_pd(const PD& P) {
    int n = (int)P.X.size();
    std::string best;
    for (int r = 0; r < std::max(n, 1); ++r) {
        std::map<int, int> ren;
        std::string s = "loops=" + std::to_string(P.free_loops) + ";";
        for (int i = 0; i < n; ++i) {
            s += "X(";
            for (int k = 0; k < 4; ++k) {
                int e = P.X[(r + i) % n][k];
                if (!ren.count(e)) ren[e] = (int)ren.size() + 1;
                s += std::to_string(ren[e]) + (k < 3 ? "," : ")");
            }
        }
        if (r == 0 || s < best) best = s;
    }
    return "pd:" + best;
}

inline std::string canonical_slices(const SliceDiagram& D) {
    std::string s = "slices:nb=" + std::to_string(D.nb) + ";";
    for (auto& x : D.s) {
        s += x.kind == SliceKind::Cup ? "U" : x.kind == SliceKind::Cap ? "C" : (x.sign > 0 ? "X+" : "X-");
        s += std::to_string(x.pos) + " ";
    }
    s += ";flip=";
    for (char f : D.flip) s += f ? '1' : '0';
    return s;
}

inline std::string canonical_form(const TangleDiagram& T) {
    if (T.is_pd) return canonical_pd(T.pd);
    if (T.sd.nb == 0 && T.sd.nt() == 0) {
        PD P;
        trace(T.sd, &P);
        return canonical_pd(P);
    }
    return canonical_slices(T.sd);
}

// ---------------------------------------------------------------------------
// Reports.

inline json base_report(const std::string& command, const json& params) {
    return {{"engine_version", kEngineVersion},
            {"convention", kConvention},
            {"command", command},
            {"params", params},
            {"horizon", nullptr},
            {"window", window_json({})},
            {"entries", json::array()},
            {"note", ""}};
}

inline json exact_entries(const GradedDims& g, const BidegWindow& w) {
    json a = json::array();
    for (auto& [b, v] : g.d)
        if (w.contains(b.first, b.second))
            a.push_back({{"bidegree", {b.first, b.second}}, {"dim", v}, {"stable", true}});
    return a;
}

inline json colimit_entries(const ColimitReport& R, const BidegWindow& w) {
    json a = json::array();
    for (auto& [b, e] : R.table)
        if (w.contains(b.first, b.second))
            a.push_back({{"bidegree", {b.first, b.second}}, {"dim", e.dim}, {"stable", e.stable}, {"first", e.first}});
    return a;
}

inline json colimit_report(const std::string& command, const json& params, const ColimitReport& R,
                           const BidegWindow& w) {
    json j = base_report(command, params);
    j["horizon"] = R.horizon;
    j["window"] = window_json(w);
    j["normalization"] = R.normalization;
    j["orientation"] = "node a carries a + max(0, level) belts oriented along the strands and a + max(0, -level) against";
    j["entries"] = colimit_entries(R, w);
    bool all = true;
    for (auto& [b, e] : R.table)
        if (w.contains(b.first, b.second)) all = all && e.stable;
    j["all_stable"] = all;
    j["note"] = R.note;
    return j;
}

// Human-readable table: one line per reported bidegree.
inline std::string render_table(const json& r) {
    std::ostringstream os;
    os << "# " << r.at("command").get<std::string>() << " " << r.at("params").dump() << "\n";
    os << "# engine " << r.at("engine_version").get<std::string>() << ", convention "
       << r.at("convention").get<std::string>();
    if (!r.at("horizon").is_null()) os << ", horizon " << r.at("horizon").get<int>();
    os << ", window " << r.at("window").dump() << "\n";
    if (r.contains("note") && !r.at("note").get<std::string>().empty())
        os << "# " << r.at("note").get<std::string>() << "\n";
    os << "h\tq\tdim\tstatus\n";
    for (auto& e : r.at("entries")) {
        os << e["bidegree"][0].get<int>() << "\t" << e["bidegree"][1].get<int>() << "\t" << e["dim"].get<long>()
           << "\t" << (e["stable"].get<bool>() ? "stable" : "horizon-limited") << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Content-addressed cache. Entries live at <dir>/<key[0:2]>/<key>.json and
// carry the engine version and a checksum of the payload.

class Cache {
   public:
    explicit Cache(std::filesystem::path dir, std::string version = kEngineVersion)
        : dir_(std::move(dir)), version_(std::move(version)) {}

    static std::filesystem::path default_dir() {
        if (const char* e = std::getenv("KHCOB_CACHE_DIR"); e && *e) return e;
        if (const char* x = std::getenv("XDG_CACHE_HOME"); x && *x) return std::filesystem::path(x) / "khcob";
        if (const char* h = std::getenv("HOME"); h && *h) return std::filesystem::path(h) / ".cache" / "khcob";
        return ".khcob-cache";
    }

    const std::filesystem::path& dir() const { return dir_; }

    std::string key(const std::string& canonical) const { return sha256_hex(version_ + "\n" + canonical); }

    std::filesystem::path path(const std::string& key) const { return dir_ / key.substr(0, 2) / (key + ".json"); }

    // Missing or stale entries read as empty; damaged ones throw CacheCorrupt.
    std::optional<json> get(const std::string& key) const {
        auto p = path(key);
        std::ifstream in(p);
        if (!in) return std::nullopt;
        json e;
        try {
            e = json::parse(in);
        } catch (const json::exception&) {
            fail("CacheCorrupt", "unreadable cache entry " + p.string(), ErrClass::Verify);
        }
        if (!e.is_object() || !e.contains("engine_version") || !e.contains("payload") || !e.contains("checksum"))
            fail("CacheCorrupt", "malformed cache entry " + p.string(), ErrClass::Verify);
        if (e["engine_version"] != version_) return std::nullopt;
        if (e["checksum"] != sha256_hex(e["payload"].dump()))
            fail("CacheCorrupt", "checksum mismatch in " + p.string(), ErrClass::Verify);
        return e["payload"];
    }

    // Write to a private temporary file, then rename over the entry.
    void put(const std::string& key, const json& payload) const {
        auto p = path(key);
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
        if (ec) fail("CacheError", "cannot create " + p.parent_path().string(), ErrClass::Resource);
        static std::atomic<unsigned> seq{0};
        auto tmp = p;
        tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(seq++);
        json e = {{"engine_version", version_}, {"key", key}, {"checksum", sha256_hex(payload.dump())},
                  {"payload", payload}};
        {
            std::ofstream out(tmp);
            out << e.dump();
            if (!out) fail("CacheError", "cannot write " + tmp.string(), ErrClass::Resource);
        }
        std::filesystem::rename(tmp, p, ec);
        if (ec) {
            std::filesystem::remove(tmp, ec);
            fail("CacheError", "cannot rename into " + p.string(), ErrClass::Resource);
        }
    }

   private:
    std::filesystem::path dir_;
    std::string version_;
};

}  // namespace khcob::io
