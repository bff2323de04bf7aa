#pragma once
// Flat tangles and dotted cobordisms modulo the Bar-Natan relations.
//
// A morphism S -> T is stored in the disk basis: every circle of S u T
// (S at the bottom of the cylinder, T at the top, joined along the
// vertical segments over boundary points) bounds its own disk, dotted or
// not. Circles are numbered: circles through boundary points first, in
// order of their smallest point, then loops of S, then loops of T.

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <numeric>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace khcob {

using FlatId = uint32_t;

// Boundary points: bottom 0..nb-1 (left to right), then top nb..nb+nt-1
// (left to right). Each arc and each loop carries a label; the label of a
// glued arc or loop is the minimum of its pieces, and loops are kept
// sorted by label, which makes loop order independent of how a picture
// was assembled.
struct FlatData {
    int nb = 0, nt = 0;
    std::vector<int> pr;
    std::vector<uint32_t> key;
    std::vector<uint32_t> lkey;

    int npts() const { return nb + nt; }
    int loops() const { return (int)lkey.size(); }
    bool operator==(const FlatData&) const = default;
};

struct FlatDataHash {
    size_t operator()(const FlatData& f) const {
        uint64_t h = 1469598103934665603ull;
        auto mix = [&](uint64_t v) { h = (h ^ v) * 1099511628211ull; };
        mix((uint64_t)f.nb << 20 | (uint64_t)f.nt);
        for (int v : f.pr) mix((uint64_t)v);
        for (auto v : f.key) mix(v + 77);
        for (auto v : f.lkey) mix(v + 991);
        return (size_t)h;
    }
};

class FlatTable {
   public:
    static FlatTable& get() {
        static FlatTable t;
        return t;
    }
    FlatId intern(FlatData&& f) {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = index_.find(f);
        if (it != index_.end()) return it->second;
        FlatId id = size_.load(std::memory_order_relaxed);
        size_t c = id >> kShift;
        if (c >= kChunks) fail("ResourceExceeded", "flat table full", ErrClass::Resource);
        if (!chunks_[c]) chunks_[c] = std::make_unique<FlatData[]>(1u << kShift);
        chunks_[c][id & ((1u << kShift) - 1)] = f;
        index_.emplace(std::move(f), id);
        size_.store(id + 1, std::memory_order_release);
        return id;
    }
    const FlatData& at(FlatId id) const { return chunks_[id >> kShift][id & ((1u << kShift) - 1)]; }
    size_t size() const { return size_.load(); }

   private:
    static constexpr unsigned kShift = 12, kChunks = 1u << 14;
    std::mutex mu_;
    std::unordered_map<FlatData, FlatId, FlatDataHash> index_;
    std::array<std::unique_ptr<FlatData[]>, kChunks> chunks_{};
    std::atomic<uint32_t> size_{0};
};

inline const FlatData& flat(FlatId id) { return FlatTable::get().at(id); }
inline FlatId intern(FlatData f) { return FlatTable::get().intern(std::move(f)); }

// Position of a boundary point on the boundary circle (bottom left to right,
// then top right to left).
inline int cyclic_pos(int nb, int nt, int p) { return p < nb ? p : nb + (nt - 1 - (p - nb)); }

inline bool is_planar(int nb, int nt, const std::vector<int>& pr) {
    int n = nb + nt;
    std::vector<int> at(n);
    for (int p = 0; p < n; ++p) at[cyclic_pos(nb, nt, p)] = p;
    std::vector<int> st;
    for (int c = 0; c < n; ++c) {
        int p = at[c];
        int oc = cyclic_pos(nb, nt, pr[p]);
        if (oc > c) {
            st.push_back(p);
        } else {
            if (st.empty() || st.back() != pr[p]) return false;
            st.pop_back();
        }
    }
    return st.empty();
}

inline void default_keys(FlatData& f) {
    f.key.assign(f.npts(), 0);
    for (int p = 0; p < f.npts(); ++p) f.key[p] = (uint32_t)std::min(p, f.pr[p]);
}

// Index conventions for pairs: bottom i -> i, top j -> nb + j.
inline FlatId make_matching(int nb, int nt, const std::vector<std::pair<int, int>>& pairs,
                            bool check_planar = true) {
    if (nb < 0 || nt < 0) fail("BadPairing", "negative point count");
    int n = nb + nt;
    FlatData f;
    f.nb = nb;
    f.nt = nt;
    f.pr.assign(n, -1);
    for (auto [a, b] : pairs) {
        if (a < 0 || b < 0 || a >= n || b >= n || a == b || f.pr[a] != -1 || f.pr[b] != -1)
            fail("BadPairing", "index repeated or out of range");
        f.pr[a] = b;
        f.pr[b] = a;
    }
    for (int p = 0; p < n; ++p)
        if (f.pr[p] < 0) fail("BadPairing", "index " + std::to_string(p) + " missing");
    if (check_planar && !is_planar(nb, nt, f.pr)) fail("NonPlanar", "pairs interleave");
    default_keys(f);
    return intern(std::move(f));
}

inline FlatId id_flat(int n) {
    std::vector<std::pair<int, int>> pp;
    for (int i = 0; i < n; ++i) pp.push_back({i, n + i});
    return make_matching(n, n, pp);
}

inline FlatId empty_flat() { return make_matching(0, 0, {}); }

// Same picture with new labels: arcs key0 + (min point), loops kept.
inline FlatId relabel(FlatId id, uint32_t key0) {
    FlatData f = flat(id);
    for (int p = 0; p < f.npts(); ++p) f.key[p] = key0 + (uint32_t)std::min(p, f.pr[p]);
    return intern(std::move(f));
}

inline FlatId drop_loops(FlatId id) {
    FlatData f = flat(id);
    f.lkey.clear();
    return intern(std::move(f));
}

inline bool same_picture(FlatId a, FlatId b) {
    const auto &x = flat(a), &y = flat(b);
    return x.nb == y.nb && x.nt == y.nt && x.pr == y.pr && x.loops() == y.loops();
}

// ---------------------------------------------------------------------------
// Circles of S u T.

struct Circles {
    int C = 0;
    int nbnd = 0;
    int la = 0, lb = 0;
    std::vector<int> pt;  // circle of each boundary point
};

namespace detail {
struct PairHash {
    size_t operator()(uint64_t v) const { return std::hash<uint64_t>()(v * 0x9E3779B97F4A7C15ull); }
};
inline std::mutex& circ_mu() {
    static std::mutex m;
    return m;
}
inline std::unordered_map<uint64_t, std::shared_ptr<const Circles>, PairHash>& circ_cache() {
    static std::unordered_map<uint64_t, std::shared_ptr<const Circles>, PairHash> c;
    return c;
}
}  // namespace detail

inline const Circles& circles(FlatId a, FlatId b) {
    uint64_t k = (uint64_t)a << 32 | b;
    {
        std::lock_guard<std::mutex> lk(detail::circ_mu());
        auto it = detail::circ_cache().find(k);
        if (it != detail::circ_cache().end()) return *it->second;
    }
    const FlatData &A = flat(a), &B = flat(b);
    if (A.nb != B.nb || A.nt != B.nt) fail("SignatureMismatch", "circles of unequal boundaries");
    auto c = std::make_shared<Circles>();
    int n = A.npts();
    c->pt.assign(n, -1);
    for (int p = 0; p < n; ++p) {
        if (c->pt[p] >= 0) continue;
        int id = c->nbnd++;
        int q = p;
        do {
            c->pt[q] = id;
            int r = A.pr[q];
            c->pt[r] = id;
            q = B.pr[r];
        } while (q != p);
    }
    c->la = A.loops();
    c->lb = B.loops();
    c->C = c->nbnd + c->la + c->lb;
    if (c->C > 64) fail("ResourceExceeded", "more than 64 circles in a cobordism", ErrClass::Resource);
    std::lock_guard<std::mutex> lk(detail::circ_mu());
    auto [it, ins] = detail::circ_cache().emplace(k, std::move(c));
    return *it->second;
}

// ---------------------------------------------------------------------------
// Morphisms.

struct Term {
    uint64_t m;
    Q c;
};

struct Cob {
    FlatId s = 0, t = 0;
    std::vector<Term> terms;

    bool zero() const { return terms.empty(); }
    bool operator==(const Cob& o) const {
        if (s != o.s || t != o.t || terms.size() != o.terms.size()) return false;
        for (size_t i = 0; i < terms.size(); ++i)
            if (terms[i].m != o.terms[i].m || terms[i].c != o.terms[i].c) return false;
        return true;
    }
};

inline void normalize_terms(std::vector<Term>& v) {
    std::sort(v.begin(), v.end(), [](const Term& a, const Term& b) { return a.m < b.m; });
    size_t w = 0;
    for (size_t i = 0; i < v.size();) {
        uint64_t m = v[i].m;
        Q c = v[i].c;
        size_t j = i + 1;
        for (; j < v.size() && v[j].m == m; ++j) c += v[j].c;
        if (!is_zero(c)) {
            v[w].m = m;
            v[w].c = c;
            ++w;
        }
        i = j;
    }
    v.resize(w);
}

inline Cob cob_zero(FlatId s, FlatId t) { return Cob{s, t, {}}; }

inline Cob basis_cob(FlatId s, FlatId t, uint64_t mask, const Q& c = Q(1)) {
    Cob r{s, t, {}};
    if (!is_zero(c)) r.terms.push_back({mask, c});
    return r;
}

inline int basis_degree(FlatId s, FlatId t, uint64_t mask) {
    const auto& ci = circles(s, t);
    return flat(s).npts() / 2 - ci.C + 2 * std::popcount(mask);
}

inline int quantum_degree(const Cob& f) {
    if (f.zero()) return 0;
    return basis_degree(f.s, f.t, f.terms[0].m);
}

inline bool is_homogeneous(const Cob& f) {
    for (auto& t : f.terms)
        if (basis_degree(f.s, f.t, t.m) != quantum_degree(f)) return false;
    return true;
}

inline Cob& operator+=(Cob& a, const Cob& b) {
    if (b.zero()) return a;
    if (a.zero()) {
        a = b;
        return a;
    }
    if (a.s != b.s || a.t != b.t) fail("CompositionMismatch", "adding morphisms with different ends");
    a.terms.insert(a.terms.end(), b.terms.begin(), b.terms.end());
    normalize_terms(a.terms);
    return a;
}

inline Cob operator+(Cob a, const Cob& b) { return a += b; }

inline Cob scaled(Cob a, const Q& c) {
    if (is_zero(c)) {
        a.terms.clear();
        return a;
    }
    for (auto& t : a.terms) t.c *= c;
    return a;
}

inline Cob operator-(const Cob& a) { return scaled(a, Q(-1)); }
inline Cob operator-(const Cob& a, const Cob& b) { return a + (-b); }

// Annulus between matching loops expands to a dot on either end.
inline Cob isotopy(FlatId s, FlatId t) {
    if (!same_picture(s, t)) fail("CompositionMismatch", "isotopy between different pictures");
    const auto& ci = circles(s, t);
    Cob r{s, t, {}};
    int L = ci.la;
    for (uint64_t sub = 0; sub < (1ull << L); ++sub) {
        uint64_t m = 0;
        for (int i = 0; i < L; ++i) m |= (sub >> i & 1) ? (1ull << (ci.nbnd + i)) : (1ull << (ci.nbnd + L + i));
        r.terms.push_back({m, Q(1)});
    }
    normalize_terms(r.terms);
    return r;
}

inline Cob identity(FlatId f) { return isotopy(f, f); }

// Value of a closed connected surface.
inline Q evaluate_closed_component(int genus, int dots) {
    if (genus + dots != 1) return Q(0);
    return Q(1L << genus);
}

// ---------------------------------------------------------------------------
// Expansion of connected surfaces into the disk basis.

struct SurfPiece {
    std::vector<int> z;  // boundary circles (indices in the target circle numbering)
    int genus = 0;
    int dots = 0;
};

// Adds c * (product of pieces) to out. A connected piece with b boundary
// circles, genus g and d dots equals 2^g x^(g+d) pushed through the b-fold
// comultiplication: zero if g+d >= 2, all circles dotted if g+d == 1, and a
// sum over the single undotted circle if g+d == 0.
inline void expand_surface(const std::vector<SurfPiece>& ps, const Q& c, std::vector<Term>& out) {
    Q coef = c;
    uint64_t base = 0;
    std::vector<const SurfPiece*> free;
    for (auto& p : ps) {
        int e = p.genus + p.dots;
        if (e >= 2) return;
        if (p.z.empty() && e == 0) return;
        if (p.genus) coef *= Q(1L << p.genus);
        if (e == 1) {
            for (int z : p.z) base |= 1ull << z;
        } else if (!p.z.empty()) {
            for (int z : p.z) base |= 1ull << z;
            free.push_back(&p);
        }
    }
    if (free.empty()) {
        out.push_back({base, coef});
        return;
    }
    std::vector<size_t> idx(free.size(), 0);
    for (;;) {
        uint64_t m = base;
        for (size_t i = 0; i < free.size(); ++i) m &= ~(1ull << free[i]->z[idx[i]]);
        out.push_back({m, coef});
        size_t i = 0;
        for (; i < free.size(); ++i) {
            if (++idx[i] < free[i]->z.size()) break;
            idx[i] = 0;
        }
        if (i == free.size()) break;
    }
}

struct RawComponent {
    std::vector<int> circles;  // boundary circles of S u T, canonical numbering
    int genus = 0;
    int dots = 0;
};

// Arbitrary surface between two flats, given componentwise. Components
// without circles are closed and get evaluated.
inline Cob normal_form(FlatId s, FlatId t, const std::vector<RawComponent>& comps, const Q& coeff = Q(1)) {
    const auto& ci = circles(s, t);
    std::vector<int> seen(ci.C, 0);
    std::vector<SurfPiece> ps;
    for (auto& c : comps) {
        for (int z : c.circles) {
            if (z < 0 || z >= ci.C || seen[z]++) fail("BadSurface", "circle used twice or out of range");
        }
        ps.push_back({c.circles, c.genus, c.dots});
    }
    for (int z = 0; z < ci.C; ++z)
        if (!seen[z]) fail("BadSurface", "circle not bounded by any component");
    Cob r{s, t, {}};
    expand_surface(ps, coeff, r.terms);
    normalize_terms(r.terms);
    return r;
}

// ---------------------------------------------------------------------------
// Vertical composition.

namespace detail {
struct UF {
    std::vector<int> p;
    explicit UF(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
    int find(int x) {
        while (p[x] != x) x = p[x] = p[p[x]];
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) p[std::max(a, b)] = std::min(a, b);
    }
};

struct CompPlan {
    struct Comp {
        uint64_t xm = 0, ym = 0;
        std::vector<int> z;
        int genus = 0;
    };
    std::vector<Comp> comps;
};

struct TripleHash {
    size_t operator()(const std::array<FlatId, 3>& k) const {
        uint64_t h = k[0];
        h = h * 0x9E3779B97F4A7C15ull ^ k[1];
        h = h * 0x9E3779B97F4A7C15ull ^ k[2];
        return (size_t)(h ^ (h >> 29));
    }
};

inline std::shared_ptr<const CompPlan> comp_plan(FlatId a, FlatId b, FlatId c) {
    static std::mutex mu;
    static std::unordered_map<std::array<FlatId, 3>, std::shared_ptr<const CompPlan>, TripleHash> cache;
    std::array<FlatId, 3> k{a, b, c};
    {
        std::lock_guard<std::mutex> lk(mu);
        auto it = cache.find(k);
        if (it != cache.end()) return it->second;
    }
    const auto& X = circles(a, b);
    const auto& Y = circles(b, c);
    const auto& Z = circles(a, c);
    const FlatData& B = flat(b);
    int n = B.npts();
    UF uf(X.C + Y.C);
    for (int p = 0; p < n; ++p) uf.unite(X.pt[p], X.C + Y.pt[p]);
    for (int l = 0; l < B.loops(); ++l) uf.unite(X.nbnd + X.la + l, X.C + Y.nbnd + l);
    std::vector<int> cid(X.C + Y.C, -1);
    auto plan = std::make_shared<CompPlan>();
    std::vector<int> nd, nj;
    auto comp_of = [&](int node) {
        int r = uf.find(node);
        if (cid[r] < 0) {
            cid[r] = (int)plan->comps.size();
            plan->comps.emplace_back();
            nd.push_back(0);
            nj.push_back(0);
        }
        return cid[r];
    };
    for (int i = 0; i < X.C; ++i) {
        int k2 = comp_of(i);
        plan->comps[k2].xm |= 1ull << i;
        nd[k2]++;
    }
    for (int i = 0; i < Y.C; ++i) {
        int k2 = comp_of(X.C + i);
        plan->comps[k2].ym |= 1ull << i;
        nd[k2]++;
    }
    for (int p = 0; p < n; ++p)
        if (p < B.pr[p]) nj[comp_of(X.pt[p])]++;
    std::vector<int> zrep(Z.C, -1);
    for (int p = 0; p < n; ++p) zrep[Z.pt[p]] = X.pt[p];
    for (int l = 0; l < Z.la; ++l) zrep[Z.nbnd + l] = X.nbnd + l;
    for (int l = 0; l < Z.lb; ++l) zrep[Z.nbnd + Z.la + l] = X.C + Y.nbnd + Y.la + l;
    for (int z = 0; z < Z.C; ++z) plan->comps[comp_of(zrep[z])].z.push_back(z);
    for (size_t k2 = 0; k2 < plan->comps.size(); ++k2) {
        int chi = nd[k2] - nj[k2];
        int twice = 2 - (int)plan->comps[k2].z.size() - chi;
        if (twice < 0 || twice % 2) fail("BadSurface", "non-orientable or inconsistent gluing");
        plan->comps[k2].genus = twice / 2;
    }
    std::lock_guard<std::mutex> lk(mu);
    cache.emplace(k, plan);
    return plan;
}
}  // namespace detail

// g o f : first f, then g.
inline Cob compose(const Cob& g, const Cob& f) {
    if (f.t != g.s) fail("CompositionMismatch", "target of f is not source of g");
    Cob r{f.s, g.t, {}};
    if (f.zero() || g.zero()) return r;
    auto plan = detail::comp_plan(f.s, f.t, g.t);
    std::vector<SurfPiece> ps(plan->comps.size());
    for (size_t k = 0; k < ps.size(); ++k) {
        ps[k].z = plan->comps[k].z;
        ps[k].genus = plan->comps[k].genus;
    }
    for (auto& tf : f.terms)
        for (auto& tg : g.terms) {
            bool dead = false;
            for (size_t k = 0; k < ps.size(); ++k) {
                const auto& pc = plan->comps[k];
                ps[k].dots = std::popcount(tf.m & pc.xm) + std::popcount(tg.m & pc.ym);
                if (ps[k].dots + ps[k].genus >= 2) {
                    dead = true;
                    break;
                }
            }
            if (!dead) expand_surface(ps, tf.c * tg.c, r.terms);
        }
    normalize_terms(r.terms);
    return r;
}

// Adds one dot to the circle through boundary point p (or, when p < 0, to
// loop -p-1 of the circle numbering's loop section).
inline Cob apply_dot_circle(const Cob& f, int circle) {
    const auto& ci = circles(f.s, f.t);
    if (circle < 0 || circle >= ci.C) fail("NoSuchComponent", "circle index out of range");
    Cob r{f.s, f.t, {}};
    for (auto& t : f.terms)
        if (!(t.m >> circle & 1)) r.terms.push_back({t.m | (1ull << circle), t.c});
    normalize_terms(r.terms);
    return r;
}

inline Cob apply_dot(const Cob& f, int point) {
    const auto& ci = circles(f.s, f.t);
    if (point < 0 || point >= (int)ci.pt.size()) fail("NoSuchComponent", "no boundary point " + std::to_string(point));
    return apply_dot_circle(f, ci.pt[point]);
}

// ---------------------------------------------------------------------------
// Spatial gluing of pictures side by side and along shared boundary points.

struct GluePoint {
    int piece, pt;
};

struct GlueSpec {
    std::vector<std::pair<int, int>> sizes;  // (nb, nt) per piece
    std::vector<std::pair<GluePoint, GluePoint>> joins;
    std::vector<GluePoint> outb, outt;
};

struct GluedFlat {
    FlatId f;
    // For each loop of f: (piece, code); code >= 0 is a point of that piece
    // lying on the loop, code < 0 is the piece's own loop -code-1.
    std::vector<std::pair<int, int>> loopsrc;
};

inline GluedFlat glue_flats_ex(const std::vector<FlatId>& pcs, const GlueSpec& sp) {
    size_t P = pcs.size();
    if (P != sp.sizes.size()) fail("SignatureMismatch", "glue spec size");
    std::vector<int> off(P + 1, 0);
    for (size_t a = 0; a < P; ++a) {
        const auto& F = flat(pcs[a]);
        if (F.nb != sp.sizes[a].first || F.nt != sp.sizes[a].second)
            fail("SignatureMismatch", "glue piece boundary");
        off[a + 1] = off[a] + F.npts();
    }
    int N = off[P];
    std::vector<int> gp(N, -1), outi(N, -1), pieceof(N);
    for (size_t a = 0; a < P; ++a)
        for (int p = off[a]; p < off[a + 1]; ++p) pieceof[p] = (int)a;
    auto gid = [&](GluePoint g) { return off[g.piece] + g.pt; };
    for (auto& [x, y] : sp.joins) {
        int u = gid(x), v = gid(y);
        if (gp[u] >= 0 || gp[v] >= 0 || u == v) fail("BadGlue", "point glued twice");
        gp[u] = v;
        gp[v] = u;
    }
    int nb = (int)sp.outb.size(), nt = (int)sp.outt.size();
    for (int i = 0; i < nb; ++i) outi[gid(sp.outb[i])] = i;
    for (int j = 0; j < nt; ++j) outi[gid(sp.outt[j])] = nb + j;
    for (int p = 0; p < N; ++p)
        if ((gp[p] >= 0) == (outi[p] >= 0)) fail("BadGlue", "point neither glued nor output, or both");
    auto prp = [&](int g) {
        int a = pieceof[g];
        return off[a] + flat(pcs[a]).pr[g - off[a]];
    };
    auto keyp = [&](int g) {
        int a = pieceof[g];
        return flat(pcs[a]).key[g - off[a]];
    };
    FlatData R;
    R.nb = nb;
    R.nt = nt;
    R.pr.assign(nb + nt, -1);
    R.key.assign(nb + nt, 0);
    std::vector<char> vis(N, 0);
    std::vector<std::pair<uint32_t, std::pair<int, int>>> loops;
    for (int o = 0; o < nb + nt; ++o) {
        if (R.pr[o] >= 0) continue;
        int g0 = gid(o < nb ? sp.outb[o] : sp.outt[o - nb]);
        uint32_t k = keyp(g0);
        vis[g0] = 1;
        int cur = prp(g0);
        for (;;) {
            vis[cur] = 1;
            k = std::min(k, keyp(cur));
            if (outi[cur] >= 0) break;
            int j = gp[cur];
            vis[j] = 1;
            k = std::min(k, keyp(j));
            cur = prp(j);
        }
        int o2 = outi[cur];
        R.pr[o] = o2;
        R.pr[o2] = o;
        R.key[o] = R.key[o2] = k;
    }
    for (int g = 0; g < N; ++g) {
        if (vis[g]) continue;
        uint32_t k = keyp(g);
        int c = g;
        int best = g;
        do {
            vis[c] = 1;
            int d = prp(c);
            vis[d] = 1;
            if (keyp(d) < k || (keyp(d) == k && d < best)) best = d;
            k = std::min(k, keyp(d));
            c = gp[d];
        } while (c != g);
        if (keyp(g) == k && g < best) best = g;
        loops.push_back({k, {pieceof[best], best - off[pieceof[best]]}});
    }
    for (size_t a = 0; a < P; ++a) {
        const auto& F = flat(pcs[a]);
        for (int l = 0; l < F.loops(); ++l) loops.push_back({F.lkey[l], {(int)a, -l - 1}});
    }
    std::sort(loops.begin(), loops.end());
    GluedFlat out;
    for (auto& [k, src] : loops) {
        R.lkey.push_back(k);
        out.loopsrc.push_back(src);
    }
    out.f = intern(std::move(R));
    return out;
}

inline FlatId glue_flats(const std::vector<FlatId>& pcs, const GlueSpec& sp) { return glue_flats_ex(pcs, sp).f; }

inline Cob glue_cobs(const std::vector<const Cob*>& pcs, const GlueSpec& sp) {
    size_t P = pcs.size();
    std::vector<FlatId> ss(P), ts(P);
    for (size_t a = 0; a < P; ++a) {
        ss[a] = pcs[a]->s;
        ts[a] = pcs[a]->t;
    }
    GluedFlat S = glue_flats_ex(ss, sp), T = glue_flats_ex(ts, sp);
    Cob r{S.f, T.f, {}};
    for (auto* p : pcs)
        if (p->zero()) return r;
    std::vector<const Circles*> ci(P);
    std::vector<int> coff(P + 1, 0);
    for (size_t a = 0; a < P; ++a) {
        ci[a] = &circles(ss[a], ts[a]);
        coff[a + 1] = coff[a] + ci[a]->C;
    }
    detail::UF uf(coff[P]);
    for (auto& [x, y] : sp.joins)
        uf.unite(coff[x.piece] + ci[x.piece]->pt[x.pt], coff[y.piece] + ci[y.piece]->pt[y.pt]);
    const Circles& co = circles(S.f, T.f);
    std::vector<int> zrep(co.C, -1);
    int nbo = (int)sp.outb.size();
    for (int o = 0; o < (int)co.pt.size(); ++o) {
        GluePoint g = o < nbo ? sp.outb[o] : sp.outt[o - nbo];
        zrep[co.pt[o]] = coff[g.piece] + ci[g.piece]->pt[g.pt];
    }
    for (int l = 0; l < co.la; ++l) {
        auto [a, code] = S.loopsrc[l];
        zrep[co.nbnd + l] = coff[a] + (code >= 0 ? ci[a]->pt[code] : ci[a]->nbnd + (-code - 1));
    }
    for (int l = 0; l < co.lb; ++l) {
        auto [a, code] = T.loopsrc[l];
        zrep[co.nbnd + co.la + l] =
            coff[a] + (code >= 0 ? ci[a]->pt[code] : ci[a]->nbnd + ci[a]->la + (-code - 1));
    }
    std::vector<int> comp(coff[P], -1);
    std::vector<SurfPiece> ps;
    std::vector<int> nd, nj;
    auto comp_of = [&](int node) {
        int rt = uf.find(node);
        if (comp[rt] < 0) {
            comp[rt] = (int)ps.size();
            ps.emplace_back();
            nd.push_back(0);
            nj.push_back(0);
        }
        return comp[rt];
    };
    std::vector<int> cc(coff[P]);
    for (int i = 0; i < coff[P]; ++i) {
        cc[i] = comp_of(i);
        nd[cc[i]]++;
    }
    for (auto& [x, y] : sp.joins) nj[cc[coff[x.piece] + ci[x.piece]->pt[x.pt]]]++;
    for (int z = 0; z < co.C; ++z) ps[cc[zrep[z]]].z.push_back(z);
    for (size_t k = 0; k < ps.size(); ++k) {
        int twice = 2 - (int)ps[k].z.size() - (nd[k] - nj[k]);
        if (twice < 0 || twice % 2) fail("BadSurface", "inconsistent gluing");
        ps[k].genus = twice / 2;
    }
    std::vector<size_t> idx(P, 0);
    for (;;) {
        for (auto& p : ps) p.dots = 0;
        Q c(1);
        for (size_t a = 0; a < P; ++a) {
            const Term& t = pcs[a]->terms[idx[a]];
            c *= t.c;
            uint64_t m = t.m;
            while (m) {
                int b = std::countr_zero(m);
                m &= m - 1;
                ps[cc[coff[a] + b]].dots++;
            }
        }
        expand_surface(ps, c, r.terms);
        size_t a = 0;
        for (; a < P; ++a) {
            if (++idx[a] < pcs[a]->terms.size()) break;
            idx[a] = 0;
        }
        if (a == P) break;
    }
    normalize_terms(r.terms);
    return r;
}

// Standard glue patterns.

// Vertical stacking: lower.top_i is glued to upper.bottom_i.
inline GlueSpec stack_spec(const std::vector<std::pair<int, int>>& sizes) {
    GlueSpec sp;
    sp.sizes = sizes;
    size_t P = sizes.size();
    for (size_t a = 0; a + 1 < P; ++a) {
        if (sizes[a].second != sizes[a + 1].first) fail("SignatureMismatch", "stack widths differ");
        for (int i = 0; i < sizes[a].second; ++i)
            sp.joins.push_back({{(int)a, sizes[a].first + i}, {(int)a + 1, i}});
    }
    if (P) {
        for (int i = 0; i < sizes[0].first; ++i) sp.outb.push_back({0, i});
        for (int i = 0; i < sizes[P - 1].second; ++i) sp.outt.push_back({(int)P - 1, sizes[P - 1].first + i});
    }
    return sp;
}

// Side by side, left to right.
inline GlueSpec juxtapose_spec(const std::vector<std::pair<int, int>>& sizes) {
    GlueSpec sp;
    sp.sizes = sizes;
    for (size_t a = 0; a < sizes.size(); ++a)
        for (int i = 0; i < sizes[a].first; ++i) sp.outb.push_back({(int)a, i});
    for (size_t a = 0; a < sizes.size(); ++a)
        for (int i = 0; i < sizes[a].second; ++i) sp.outt.push_back({(int)a, sizes[a].first + i});
    return sp;
}

// Trace closure: bottom i is glued to top i.
inline GlueSpec closure_spec(int n) {
    GlueSpec sp;
    sp.sizes = {{n, n}};
    for (int i = 0; i < n; ++i) sp.joins.push_back({{0, i}, {0, n + i}});
    return sp;
}

inline std::pair<int, int> sig(FlatId f) { return {flat(f).nb, flat(f).nt}; }

inline std::pair<FlatId, int> compose_flat(FlatId lower, FlatId upper) {
    if (flat(lower).nt != flat(upper).nb) fail("SignatureMismatch", "compose_flat widths");
    int before = flat(lower).loops() + flat(upper).loops();
    FlatId r = glue_flats({lower, upper}, stack_spec({sig(lower), sig(upper)}));
    return {r, flat(r).loops() - before};
}

inline Cob hcompose(const Cob& f, const Cob& g) {
    return glue_cobs({&f, &g}, juxtapose_spec({sig(f.s), sig(g.s)}));
}

// Spatial vertical stacking of morphisms (f below g).
inline Cob vstack(const Cob& f, const Cob& g) { return glue_cobs({&f, &g}, stack_spec({sig(f.s), sig(g.s)})); }

}  // namespace khcob
