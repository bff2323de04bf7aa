// khcob: Khovanov homology, cabled homology, lasagna modules and projectors.
//
//   khcob kh --braid "s1 s1 s1" --close
//   khcob lasagna s2xb2 --strands 1 --level 0 --horizon 3
//   khcob lasagna two-handle --pd hopf00 --level 1,0 --horizon 1
//   khcob projector --strands 2 --twists 3
//   khcob verify s2xs2 --levels "1,0;1,1"
//
// Exit codes: 0 ok, 2 parse, 3 resource, 4 verification failure.

#include <sys/resource.h>

#include <CLI11.hpp>
#include <iostream>
#include <new>

#include "khcob/io.hpp"
#include "khcob/suites.hpp"

using namespace khcob;
using io::json;

namespace {

struct Global {
    std::string cache_dir;
    bool no_cache = false;
    std::string out;
    bool table = false;
    int threads = 1;
    long mem_mb = 0;
    int max_crossings = 40;
    int max_belts = 12;
    std::string window;
};

struct DiagramOpts {
    std::string braid, pd, text;
    int strands = 0;
    bool close = false, mirror = false;

    void add(CLI::App* c) {
        c->add_option("--braid", braid, "braid word, e.g. \"s1 s2^-1 s1\"");
        c->add_option("--strands", strands, "number of braid strands");
        c->add_option("--pd", pd, "planar code, e.g. \"X(1,3,2,4) X(3,1,4,2)\"");
        c->add_option("--diagram", text, "diagram in the full input grammar");
        c->add_flag("--close", close, "close the braid or tangle");
        c->add_flag("--mirror", mirror, "mirror the diagram");
    }

    std::string source() const {
        int given = !braid.empty() + !pd.empty() + !text.empty();
        if (given != 1) fail("ParseError", "give exactly one of --braid, --pd, --diagram", ErrClass::Parse);
        std::string s = text;
        if (!braid.empty()) s = (strands ? "strands=" + std::to_string(strands) + "; " : "") + "braid: " + braid;
        if (!pd.empty()) s = "pd: " + pd;
        if (close) s += "; close";
        if (mirror) s += "; mirror";
        return s;
    }
};

std::vector<int> parse_ints(const std::string& s, char sep = ',') {
    std::vector<int> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) v.push_back(detail::to_int(item));
    if (v.empty()) fail("ParseError", "expected a list of integers: '" + s + "'", ErrClass::Parse);
    return v;
}

std::vector<std::pair<int, int>> parse_pairs(const std::string& s) {
    std::vector<std::pair<int, int>> r;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ';')) {
        auto v = parse_ints(item);
        if (v.size() != 2) fail("ParseError", "expected pairs like \"1,0;0,1\"", ErrClass::Parse);
        r.push_back({v[0], v[1]});
    }
    return r;
}

void check_crossings(const TangleDiagram& T, const Global& g) {
    int n = T.is_pd ? (int)T.pd.X.size() : T.sd.crossings();
    if (n > g.max_crossings)
        fail("ResourceExceeded", std::to_string(n) + " crossings exceed --max-crossings", ErrClass::Resource);
}

void emit(const json& r, const Global& g) {
    if (!g.out.empty()) {
        std::ofstream(g.out + ".json") << r.dump(2) << "\n";
        std::ofstream(g.out + ".txt") << io::render_table(r);
        std::cout << "wrote " << g.out << ".json and " << g.out << ".txt\n";
    } else if (g.table) {
        std::cout << io::render_table(r);
    } else {
        std::cout << r.dump(2) << "\n";
    }
}

// Looks the report up in the cache, computing and storing it on a miss.
template <class F>
json cached(const Global& g, const std::string& canonical, F compute) {
    if (g.no_cache) return compute();
    io::Cache c(g.cache_dir.empty() ? io::Cache::default_dir() : std::filesystem::path(g.cache_dir));
    auto k = c.key(canonical);
    if (auto hit = c.get(k)) return *hit;
    json r = compute();
    c.put(k, r);
    return r;
}

int run_verify(const std::string& suite, const std::string& levels, const Global& g) {
    std::vector<SuiteResult> res;
    if (suite == "all") {
        for (auto& k : suite_keys()) res.push_back(run_suite(k));
    } else if (suite == "s2xs2" && !levels.empty()) {
        std::vector<std::vector<int>> lv;
        for (auto [a, b] : parse_pairs(levels)) lv.push_back({a, b});
        res.push_back(suite_s2xs2(lv, false));
    } else {
        res.push_back(run_suite(suite));
    }
    bool ok = true;
    json j = {{"engine_version", io::kEngineVersion}, {"suites", json::array()}};
    for (auto& r : res) {
        std::cout << r.line() << "\n";
        ok = ok && r.pass;
        j["suites"].push_back({{"criterion", r.id}, {"key", r.key}, {"pass", r.pass}, {"detail", r.detail}});
    }
    if (!g.out.empty()) std::ofstream(g.out + ".json") << j.dump(2) << "\n";
    return ok ? 0 : (int)ErrClass::Verify;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Khovanov homology, cabling and skein lasagna modules"};
    app.require_subcommand(1);
    app.fallthrough();
    Global g;
    app.add_option("--cache-dir", g.cache_dir, "cache directory (default $KHCOB_CACHE_DIR or ~/.cache/khcob)");
    app.add_flag("--no-cache", g.no_cache, "neither read nor write the cache");
    app.add_option("--out", g.out, "write <prefix>.json and <prefix>.txt");
    app.add_flag("--table", g.table, "print the human-readable table instead of JSON");
    app.add_option("--threads", g.threads, "worker threads (computation is single-threaded)")->check(CLI::PositiveNumber);
    app.add_option("--mem-mb", g.mem_mb, "address space cap in MiB")->check(CLI::PositiveNumber);
    app.add_option("--max-crossings", g.max_crossings, "largest accepted diagram")->check(CLI::PositiveNumber);
    app.add_option("--max-belts", g.max_belts, "most belts at any node")->check(CLI::PositiveNumber);
    app.add_option("--window", g.window, "report window hlo:hhi,qlo:qhi (sides may be empty)");

    auto* kh_cmd = app.add_subcommand("kh", "homology of a link or tangle closure");
    DiagramOpts kd;
    kd.add(kh_cmd);
    std::string convention = "KhR2";
    kh_cmd->add_option("--convention", convention, "KhR2 or Kh")->check(CLI::IsMember({"KhR2", "Kh"}));

    auto* cab_cmd = app.add_subcommand("cabled", "homology of a blackboard cable");
    DiagramOpts cd;
    cd.add(cab_cmd);
    std::string index;
    cab_cmd->add_option("--index", index, "r-,r+ per component, e.g. \"1,1;0,1\"")->required();

    auto* las_cmd = app.add_subcommand("lasagna", "skein lasagna module at a finite horizon");
    std::string kind, preset = "hopf00", level = "0";
    int lstrands = 0, horizon = 3;
    las_cmd->add_option("kind", kind, "s2xb2 or two-handle")->required()->check(CLI::IsMember({"s2xb2", "two-handle"}));
    las_cmd->add_option("--strands", lstrands, "boundary strands (s2xb2)")->check(CLI::NonNegativeNumber);
    las_cmd->add_option("--pd", preset, "2-handle link preset: unknot<f>, hopf<f1><f2>");
    las_cmd->add_option("--level", level, "homological level, one per component");
    las_cmd->add_option("--horizon", horizon, "horizon")->check(CLI::PositiveNumber);

    auto* pr_cmd = app.add_subcommand("projector", "truncated projector closure in its certified window");
    int pn = 2, pm = 2;
    bool roz = false, emit_complex = false;
    pr_cmd->add_option("--strands", pn, "strands")->check(CLI::PositiveNumber);
    pr_cmd->add_option("--twists", pm, "full twists")->check(CLI::PositiveNumber);
    pr_cmd->add_flag("--rozansky", roz, "the two-strand through-degree-0 piece instead");
    pr_cmd->add_flag("--emit-complex", emit_complex, "include the simplified complex");

    auto* ver_cmd = app.add_subcommand("verify", "run acceptance suites");
    std::string suite = "all", levels;
    ver_cmd->add_option("suite", suite, "suite name or all");
    ver_cmd->add_option("--levels", levels, "levels for s2xs2, e.g. \"1,0;1,1\"");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : (int)ErrClass::Parse;
    }

    try {
        if (g.mem_mb > 0) {
            rlimit rl{(rlim_t)g.mem_mb << 20, (rlim_t)g.mem_mb << 20};
            setrlimit(RLIMIT_AS, &rl);
        }
        io::BidegWindow win = io::parse_window(g.window);
        std::string wtag = io::window_json(win).dump();

        if (*kh_cmd) {
            auto T = parse_diagram(kd.source());
            check_crossings(T, g);
            std::string canon = io::canonical_form(T);
            json params = {{"diagram", canon}, {"convention", convention}};
            emit(cached(g, "kh\n" + canon + "\n" + convention + "\n" + wtag,
                        [&] {
                            GradedDims d = kh(T);
                            if (convention != "KhR2") {
                                int w = T.is_pd ? pd_orient(T.pd).writhe() : trace(T.sd).writhe();
                                d = convert_conventions(d, "KhR2", convention, w);
                            }
                            json r = io::base_report("kh", params);
                            r["convention"] = convention;
                            r["window"] = io::window_json(win);
                            r["entries"] = io::exact_entries(d, win);
                            return r;
                        }),
                 g);
        } else if (*cab_cmd) {
            auto T = parse_diagram(cd.source());
            if (T.is_pd) fail("Unsupported", "cabling needs a braid or slice diagram", ErrClass::Parse);
            CableIndex idx{parse_pairs(index)};
            SliceDiagram C = cable(T.sd, idx);
            TangleDiagram TC;
            TC.sd = C;
            TC.closed = T.closed;
            check_crossings(TC, g);
            std::string canon = io::canonical_form(TC);
            json params = {{"diagram", io::canonical_form(T)}, {"index", index}};
            emit(cached(g, "cabled\n" + canon + "\n" + wtag,
                        [&] {
                            json r = io::base_report("cabled", params);
                            r["window"] = io::window_json(win);
                            r["entries"] = io::exact_entries(kh_slices(C), win);
                            return r;
                        }),
                 g);
        } else if (*las_cmd) {
            auto lv = parse_ints(level);
            if (kind == "s2xb2") {
                if (lv.size() != 1) fail("ParseError", "s2xb2 takes a single level", ErrClass::Parse);
                if (2 * (horizon + 1) + std::abs(lv[0]) > g.max_belts)
                    fail("ResourceExceeded", "top node needs more belts than --max-belts", ErrClass::Resource);
                json params = {{"space", "s2xb2"}, {"strands", lstrands}, {"level", lv}};
                emit(cached(g,
                            "lasagna\ns2xb2\n" + std::to_string(lstrands) + "\n" + std::to_string(lv[0]) + "\n" +
                                std::to_string(horizon) + "\n" + wtag,
                            [&] {
                                return io::colimit_report("lasagna", params, lasagna_s2xb2(lstrands, lv[0], horizon),
                                                          win);
                            }),
                     g);
            } else {
                TwoHandleLink L = two_handle_preset(preset);
                json params = {{"space", "two-handle"}, {"link", preset}, {"level", lv}};
                emit(cached(g, "lasagna\ntwo-handle\n" + preset + "\n" + level + "\n" + std::to_string(horizon) + "\n" + wtag,
                            [&] { return io::colimit_report("lasagna", params, lasagna_2handle(L, lv, horizon), win); }),
                     g);
            }
        } else if (*pr_cmd) {
            json params = {{"strands", pn}, {"twists", pm}, {"rozansky", roz}};
            std::string canon = "projector\n" + params.dump() + "\n" + std::to_string(emit_complex) + "\n" + wtag;
            emit(cached(g, canon,
                        [&] {
                            json r = io::base_report("projector", params);
                            Complex C;
                            GradedDims d;
                            Window rows;
                            if (roz) {
                                auto R = rozansky_projector_trunc(pm);
                                C = R.complex;
                                d = close_homology(C).dims;
                                rows = R.window;
                            } else {
                                const auto& P = truncated_projector(pn, pm);
                                C = P.complex;
                                d = P.closure;
                                rows = P.window;
                            }
                            io::BidegWindow w = io::meet(win, io::from_rows(rows));
                            r["window"] = io::window_json(w);
                            r["certified_rows"] = io::window_json(io::from_rows(rows))["h"];
                            json e = json::array();
                            for (auto& [b, v] : d.d)
                                if (win.contains(b.first, b.second))
                                    e.push_back({{"bidegree", {b.first, b.second}},
                                                 {"dim", v},
                                                 {"stable", rows.contains(b.first)}});
                            r["entries"] = e;
                            r["objects"] = C.size();
                            if (emit_complex) r["complex"] = io::complex_json(C);
                            return r;
                        }),
                 g);
        } else if (*ver_cmd) {
            return run_verify(suite, levels, g);
        }
    } catch (const Error& e) {
        std::cerr << json({{"error", e.kind}, {"message", e.what()}}).dump() << "\n";
        return e.cls == ErrClass::Logic ? 1 : (int)e.cls;
    } catch (const std::bad_alloc&) {
        std::cerr << json({{"error", "ResourceExceeded"}, {"message", "out of memory"}}).dump() << "\n";
        return (int)ErrClass::Resource;
    }
    return 0;
}
