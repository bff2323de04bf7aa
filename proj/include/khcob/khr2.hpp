#pragma once
// Diagrams, the KhR2 bracket, closure, homology and the cube oracle.

#include <array>
#include <cctype>
#include <cstring>
#include <functional>
#include <atomic>
#include <memory>
#include <numeric>
#include <sstream>

#include "complex.hpp"
#include "linalg.hpp"

namespace khcob {

// Arc key for pure identity padding. Glued arcs take the minimum key, so
// padding never influences labels unless an arc is padding only.
constexpr uint32_t ID_KEY = 0xFFFFFF00u;

inline uint32_t new_uid() {
    static std::atomic<uint32_t> n{1};
    uint32_t u = n++;
    if (u >= (ID_KEY >> 6) - 1) fail("ResourceExceeded", "slice uid space exhausted", ErrClass::Resource);
    return u;
}

inline FlatId pad_flat(int n) {
    FlatData f = flat(id_flat(n));
    for (auto& k : f.key) k = ID_KEY;
    return intern(std::move(f));
}

// ---------------------------------------------------------------------------
// Slice cores.

inline FlatId tau_flat() { return make_matching(2, 2, {{0, 1}, {2, 3}}); }

inline Complex core_cup(uint32_t uid) { return from_flat(relabel(make_matching(0, 2, {{0, 1}}), uid * 64)); }
inline Complex core_cap(uint32_t uid) { return from_flat(relabel(make_matching(2, 0, {{0, 1}}), uid * 64)); }

// Unoriented crossing: h^-1 q (0-res) -> (1-res). For sign +1 (over strand
// from bottom left to top right) the 0-res is the turnback.
inline Complex core_cross(int sign, uint32_t uid) {
    FlatId v = relabel(id_flat(2), uid * 64), t = relabel(tau_flat(), uid * 64);
    FlatId a = sign > 0 ? t : v, b = sign > 0 ? v : t;
    Complex C;
    C.nb = C.nt = 2;
    C.obj = {{a, -1, 1}, {b, 0, 0}};
    C.d = Mat(2, 2);
    C.d.col[0].emplace_back(1, basis_cob(a, b, 0));
    return C;
}

enum class SliceKind { Cup, Cap, Cross, Box };

struct Piece {
    SliceKind kind = SliceKind::Box;
    int left = 0, wb = 0, sign = 0;
    std::shared_ptr<const Complex> core;
    mutable std::shared_ptr<const Complex> full_;

    int cnb() const { return core->nb; }
    int cnt() const { return core->nt; }
    int wt() const { return wb - core->nb + core->nt; }
    int right() const { return wb - left - core->nb; }

    const Complex& full() const {
        if (!full_) {
            Complex L = from_flat(pad_flat(left)), R = from_flat(pad_flat(right()));
            full_ = std::make_shared<const Complex>(glue_complexes(
                {&L, core.get(), &R}, juxtapose_spec({{left, left}, {core->nb, core->nt}, {right(), right()}})));
        }
        return *full_;
    }
    Piece moved(int newleft, int newwb) const {
        Piece p = *this;
        p.left = newleft;
        p.wb = newwb;
        p.full_.reset();
        return p;
    }
};

inline Piece make_piece(SliceKind k, int wb, int pos, int sign = 0) {
    Piece p;
    p.kind = k;
    p.left = pos;
    p.wb = wb;
    p.sign = sign;
    uint32_t u = new_uid();
    switch (k) {
        case SliceKind::Cup: p.core = std::make_shared<const Complex>(core_cup(u)); break;
        case SliceKind::Cap: p.core = std::make_shared<const Complex>(core_cap(u)); break;
        case SliceKind::Cross: p.core = std::make_shared<const Complex>(core_cross(sign, u)); break;
        default: fail("BadSlice", "use make_box for boxes");
    }
    if (p.right() < 0) fail("BadSlice", "slice does not fit its width");
    return p;
}

inline Piece make_box(int wb, int pos, std::shared_ptr<const Complex> Z) {
    Piece p;
    p.kind = SliceKind::Box;
    p.left = pos;
    p.wb = wb;
    p.core = std::move(Z);
    if (p.right() < 0) fail("BadSlice", "box does not fit its width");
    return p;
}

inline Complex raw_complex(const std::vector<Piece>& ps) {
    if (ps.empty()) fail("BadSlice", "empty piece list");
    std::vector<const Complex*> cs;
    std::vector<std::pair<int, int>> sz;
    for (auto& p : ps) {
        cs.push_back(&p.full());
        sz.push_back({p.wb, p.wt()});
    }
    return glue_complexes(cs, stack_spec(sz));
}

// Stack the pieces one at a time, simplifying after each.
inline Complex scan_complex(const std::vector<Piece>& ps) {
    if (ps.empty()) fail("BadSlice", "empty piece list");
    Complex C = simplify(ps[0].full(), {false, false}).first;
    for (size_t i = 1; i < ps.size(); ++i) C = simplify(stack(C, ps[i].full()), {false, false}).first;
    return C;
}

// ---------------------------------------------------------------------------
// Slice diagrams.

struct SliceSpec {
    SliceKind kind;
    int pos;
    int sign = 0;
};

struct SliceDiagram {
    int nb = 0;
    std::vector<SliceSpec> s;
    std::vector<char> flip;  // per traced component: reverse the default orientation

    std::vector<int> widths() const {
        std::vector<int> w{nb};
        for (auto& x : s) {
            int c = w.back();
            if (x.kind == SliceKind::Cup) {
                if (x.pos < 0 || x.pos > c) fail("BadSlice", "cup position");
                w.push_back(c + 2);
            } else if (x.kind == SliceKind::Cap) {
                if (x.pos < 0 || x.pos + 2 > c) fail("BadSlice", "cap position");
                w.push_back(c - 2);
            } else if (x.kind == SliceKind::Cross) {
                if (x.pos < 0 || x.pos + 2 > c) fail("BadSlice", "crossing position");
                w.push_back(c);
            } else {
                fail("BadSlice", "boxes are not allowed in slice diagrams");
            }
        }
        return w;
    }
    int nt() const { return widths().back(); }
    int crossings() const {
        int n = 0;
        for (auto& x : s) n += x.kind == SliceKind::Cross;
        return n;
    }
};

inline std::vector<Piece> to_pieces(const SliceDiagram& D) {
    auto w = D.widths();
    std::vector<Piece> ps;
    if (D.s.empty()) {
        ps.push_back(make_box(D.nb, 0, std::make_shared<const Complex>(from_flat(pad_flat(D.nb)))));
        return ps;
    }
    for (size_t i = 0; i < D.s.size(); ++i) ps.push_back(make_piece(D.s[i].kind, w[i], D.s[i].pos, D.s[i].sign));
    return ps;
}

// Traced structure: segment directions, components, crossing signs, and the
// planar-diagram code of a closed diagram.
struct Traced {
    int ncomp = 0;
    std::vector<int> xsign;     // oriented sign per crossing slice (in slice order)
    std::vector<int> xcomp;     // pair of components per crossing, encoded c1*1024+c2
    std::vector<int> comp_first_level, comp_first_pos;
    std::vector<int> selfwrithe;
    std::vector<int> off;               // first segment index of each level
    std::vector<int> seg_comp, seg_dir; // per segment: component, +1 upward
    int npos = 0, nneg = 0;
    int writhe() const { return npos - nneg; }
};

struct PD {
    std::vector<std::array<int, 4>> X;
    int free_loops = 0;
};

namespace detail {
struct SegGraph {
    std::vector<int> w, off;
    std::vector<int> link;  // per end node: other end node, -1 boundary, <= -2 crossing slot
    std::vector<std::array<int, 4>> xnode;
    std::vector<int> xslice;
    int nseg = 0;
};

inline SegGraph seg_graph(const SliceDiagram& D) {
    SegGraph G;
    G.w = D.widths();
    int L = (int)D.s.size();
    G.off.assign(L + 2, 0);
    for (int l = 0; l <= L; ++l) G.off[l + 1] = G.off[l] + G.w[l];
    G.nseg = G.off[L + 1];
    G.link.assign(2 * G.nseg, -1);
    auto seg = [&](int l, int i) { return G.off[l] + i; };
    auto join = [&](int u, int v) {
        G.link[u] = v;
        G.link[v] = u;
    };
    for (int l = 0; l < L; ++l) {
        const auto& x = D.s[l];
        int w = G.w[l];
        auto up = [&](int i) { return 2 * seg(l, i) + 1; };
        auto dn = [&](int i) { return 2 * seg(l + 1, i); };
        if (x.kind == SliceKind::Cup) {
            for (int i = 0; i < w; ++i) join(up(i), dn(i < x.pos ? i : i + 2));
            join(dn(x.pos), dn(x.pos + 1));
        } else if (x.kind == SliceKind::Cap) {
            for (int i = 0; i < w; ++i)
                if (i < x.pos) join(up(i), dn(i));
                else if (i >= x.pos + 2) join(up(i), dn(i - 2));
            join(up(x.pos), up(x.pos + 1));
        } else {
            for (int i = 0; i < w; ++i)
                if (i != x.pos && i != x.pos + 1) join(up(i), dn(i));
            int c = (int)G.xnode.size();
            G.xnode.push_back({up(x.pos), up(x.pos + 1), dn(x.pos), dn(x.pos + 1)});
            G.xslice.push_back(l);
            for (int s = 0; s < 4; ++s) G.link[G.xnode[c][s]] = -2 - (c * 4 + s);
        }
    }
    return G;
}
}  // namespace detail

// Orientation: components are traced from boundary points first (bottom
// points upward, then remaining top points downward), then closed
// components from their lowest-leftmost segment upward.
inline Traced trace(const SliceDiagram& D, PD* pd = nullptr) {
    auto G = detail::seg_graph(D);
    int nx = (int)G.xnode.size();
    std::vector<int> comp(G.nseg, -1), dir(G.nseg, 0);
    std::vector<std::array<int, 2>> xdir(nx, {0, 0});  // [0]: BL-TR strand, [1]: BR-TL strand
    std::vector<std::array<int, 2>> xc(nx, {-1, -1});
    Traced T;
    auto run = [&](int s0, int d0, int c) {
        int s = s0, d = d0;
        for (;;) {
            if (comp[s] >= 0) {
                if (comp[s] != c || dir[s] != d) fail("OrientationConflict", "inconsistent tracing");
                return;
            }
            comp[s] = c;
            dir[s] = d;
            int ex = 2 * s + (d > 0 ? 1 : 0);
            int nx2 = G.link[ex];
            if (nx2 == -1) return;
            if (nx2 <= -2) {
                int code = -2 - nx2, cr = code / 4, slot = code % 4;
                int strand = (slot == 0 || slot == 3) ? 0 : 1;
                xdir[cr][strand] = slot < 2 ? 1 : -1;
                xc[cr][strand] = c;
                nx2 = G.xnode[cr][slot ^ 3];
            }
            s = nx2 / 2;
            d = (nx2 % 2 == 0) ? 1 : -1;
        }
    };
    int c = 0;
    int L = (int)D.s.size();
    std::vector<char> flipc;
    auto fl = [&](int k) { return k < (int)D.flip.size() && D.flip[k]; };
    for (int i = 0; i < G.w[0]; ++i)
        if (comp[i] < 0) {
            T.comp_first_level.push_back(0);
            T.comp_first_pos.push_back(i);
            flipc.push_back(fl(c));
            run(i, 1, c++);
        }
    for (int i = 0; i < G.w[L]; ++i) {
        int s = G.off[L] + i;
        if (comp[s] < 0) {
            T.comp_first_level.push_back(L);
            T.comp_first_pos.push_back(i);
            flipc.push_back(fl(c));
            run(s, -1, c++);
        }
    }
    // closed components are flipped while tracing
    for (int l = 0; l <= L; ++l)
        for (int i = 0; i < G.w[l]; ++i) {
            int s = G.off[l] + i;
            if (comp[s] >= 0) continue;
            T.comp_first_level.push_back(l);
            T.comp_first_pos.push_back(i);
            flipc.push_back(0);
            int d0 = fl(c) ? -1 : 1;
            run(s, d0, c);
            ++c;
        }
    T.ncomp = c;
    T.off = G.off;
    T.seg_comp = comp;
    T.seg_dir.resize(G.nseg);
    for (int s = 0; s < G.nseg; ++s) T.seg_dir[s] = dir[s] * (flipc[comp[s]] ? -1 : 1);
    T.selfwrithe.assign(c, 0);
    for (int x = 0; x < nx; ++x) {
        int d0 = xdir[x][0] * (flipc[xc[x][0]] ? -1 : 1), d1 = xdir[x][1] * (flipc[xc[x][1]] ? -1 : 1);
        int type = D.s[G.xslice[x]].sign;
        int sg = type * (d0 == d1 ? 1 : -1);
        T.xsign.push_back(sg);
        T.xcomp.push_back(xc[x][0] * 1024 + xc[x][1]);
        (sg > 0 ? T.npos : T.nneg)++;
        if (xc[x][0] == xc[x][1]) T.selfwrithe[xc[x][0]] += sg;
    }
    if (pd) {
        if (G.w[0] || G.w[L]) fail("NotClosed", "planar code needs a closed diagram");
        // edges: union of segments through non-crossing links
        detail::UF uf(G.nseg);
        for (int s = 0; s < G.nseg; ++s)
            for (int e = 0; e < 2; ++e) {
                int o = G.link[2 * s + e];
                if (o >= 0) uf.unite(s, o / 2);
            }
        std::map<int, int> label;
        std::vector<char> hasx(G.nseg, 0);
        for (int x = 0; x < nx; ++x)
            for (int sl = 0; sl < 4; ++sl) hasx[uf.find(G.xnode[x][sl] / 2)] = 1;
        pd->X.clear();
        pd->free_loops = 0;
        for (int s = 0; s < G.nseg; ++s)
            if (uf.find(s) == s && !hasx[s]) pd->free_loops++;
        auto lab = [&](int node) {
            int r = uf.find(node / 2);
            auto it = label.find(r);
            if (it != label.end()) return it->second;
            int v = (int)label.size() + 1;
            label[r] = v;
            return v;
        };
        for (int x = 0; x < nx; ++x) {
            int BL = lab(G.xnode[x][0]), BR = lab(G.xnode[x][1]), TL = lab(G.xnode[x][2]), TR = lab(G.xnode[x][3]);
            int type = D.s[G.xslice[x]].sign;
            int d0 = xdir[x][0] * (flipc[xc[x][0]] ? -1 : 1), d1 = xdir[x][1] * (flipc[xc[x][1]] ? -1 : 1);
            if (type > 0) {
                if (d1 > 0) pd->X.push_back({BR, TR, TL, BL});
                else pd->X.push_back({TL, BL, BR, TR});
            } else {
                if (d0 > 0) pd->X.push_back({BL, BR, TR, TL});
                else pd->X.push_back({TR, TL, BL, BR});
            }
        }
    }
    return T;
}

inline SliceDiagram mirror(SliceDiagram D) {
    for (auto& x : D.s)
        if (x.kind == SliceKind::Cross) x.sign = -x.sign;
    return D;
}

// Closure by nested arcs on the right.
inline SliceDiagram close_diagram(const SliceDiagram& D) {
    int n = D.nb;
    if (D.nt() != n) fail("SignatureMismatch", "closure needs an (n,n) tangle");
    SliceDiagram R;
    R.nb = 0;
    R.flip = D.flip;
    for (int i = 0; i < n; ++i) R.s.push_back({SliceKind::Cup, i});
    for (auto& x : D.s) R.s.push_back(x);
    for (int i = n - 1; i >= 0; --i) R.s.push_back({SliceKind::Cap, i});
    return R;
}

inline SliceDiagram braid_diagram(int n, const std::vector<int>& word) {
    SliceDiagram D;
    D.nb = n;
    for (int g : word) {
        int i = std::abs(g);
        if (i < 1 || i >= n) fail("ParseError", "braid generator out of range", ErrClass::Parse);
        D.s.push_back({SliceKind::Cross, i - 1, g > 0 ? 1 : -1});
    }
    return D;
}

// One belt around n upward strands; all crossings are of negative type.
inline void append_belt(SliceDiagram& D, int n, int at = 0) {
    D.s.push_back({SliceKind::Cup, at + n});
    for (int j = n - 1; j >= 0; --j) D.s.push_back({SliceKind::Cross, at + j, -1});
    for (int j = 0; j < n; ++j) D.s.push_back({SliceKind::Cross, at + j, -1});
    D.s.push_back({SliceKind::Cap, at + n});
}

inline SliceDiagram belt_diagram(int n, int k) {
    SliceDiagram D;
    D.nb = n;
    for (int i = 0; i < k; ++i) append_belt(D, n);
    return D;
}

// Full twist on n strands.
inline SliceDiagram full_twist(int n, int m = 1) {
    std::vector<int> w;
    for (int r = 0; r < m; ++r)
        for (int a = 0; a < n; ++a)
            for (int i = 1; i < n; ++i) w.push_back(i);
    return braid_diagram(std::max(n, 1), w);
}

// Insert sign-s kinks on component c so its self-writhe changes by count*s.
inline SliceDiagram add_kinks(SliceDiagram D, int c, int count) {
    if (!count) return D;
    Traced T = trace(D);
    if (c < 0 || c >= T.ncomp) fail("ParseError", "framing: no such component", ErrClass::Parse);
    int l = T.comp_first_level[c], p = T.comp_first_pos[c];
    int s = count > 0 ? 1 : -1;
    std::vector<SliceSpec> ins;
    for (int k = 0; k < std::abs(count); ++k) {
        ins.push_back({SliceKind::Cup, p + 1});
        ins.push_back({SliceKind::Cross, p, s});
        ins.push_back({SliceKind::Cap, p + 1});
    }
    D.s.insert(D.s.begin() + l, ins.begin(), ins.end());
    return D;
}

// Sets the blackboard framing (self-writhe) of component c.
inline SliceDiagram set_framing(const SliceDiagram& D, int c, int f) {
    Traced T = trace(D);
    if (c < 0 || c >= T.ncomp) fail("ParseError", "framing: no such component", ErrClass::Parse);
    return add_kinks(D, c, f - T.selfwrithe[c]);
}

// ---------------------------------------------------------------------------
// Homology of closed complexes.

inline GradedDims homology(const Complex& C) {
    if (C.nb || C.nt) fail("NotClosed", "homology needs a closed complex");
    auto [E, r] = simplify(C, {false, false});
    if (!mat_is_zero(E.d)) fail("Internal", "closed complex did not fully reduce", ErrClass::Logic);
    GradedDims g;
    for (auto& o : E.obj) g.add(o.h, o.q, 1);
    return g;
}

// Bracket of a slice diagram with the oriented shift [n-]{-n-}.
inline Complex bracket(const SliceDiagram& D) {
    Traced T = trace(D);
    Complex C = scan_complex(to_pieces(D));
    return shift(C, T.nneg, -T.nneg);
}

inline GradedDims kh_slices(const SliceDiagram& D) {
    if (D.nb || D.nt()) return homology(bracket(close_diagram(D)));
    return homology(bracket(D));
}

// ---------------------------------------------------------------------------
// Planar diagram codes. X(a,b,c,d) lists labels counterclockwise from the
// incoming under-strand.

struct PDOrient {
    std::vector<int> sign;
    int npos = 0, nneg = 0;
    int writhe() const { return npos - nneg; }
};

inline PDOrient pd_orient(const PD& P) {
    std::map<int, std::vector<std::pair<int, int>>> occ;
    for (int x = 0; x < (int)P.X.size(); ++x)
        for (int s = 0; s < 4; ++s) occ[P.X[x][s]].push_back({x, s});
    for (auto& [l, v] : occ)
        if (v.size() != 2) fail("ParseError", "label " + std::to_string(l) + " must occur twice", ErrClass::Parse);
    // head[x][s] = 1 if the edge at slot s enters crossing x
    std::vector<std::array<int, 4>> head(P.X.size(), {0, 0, 0, 0});
    auto other = [&](int x, int s) {
        auto& v = occ[P.X[x][s]];
        return v[0] == std::make_pair(x, s) ? v[1] : v[0];
    };
    auto set = [&](int x, int s, int hv) {
        int cx = x, cs = s, ch = hv;
        for (;;) {
            if (head[cx][cs]) {
                if (head[cx][cs] != ch) fail("OrientationConflict", "inconsistent strand directions", ErrClass::Parse);
                return;
            }
            head[cx][cs] = ch;
            if (ch > 0) {
                // enters here; leaves through the opposite slot
                int os = cs ^ 2;
                if (head[cx][os] && head[cx][os] != -1)
                    fail("OrientationConflict", "inconsistent strand directions", ErrClass::Parse);
                if (!head[cx][os]) {
                    head[cx][os] = -1;
                    auto [nx, ns] = other(cx, os);
                    cx = nx;
                    cs = ns;
                    ch = 1;
                    continue;
                }
                return;
            } else {
                int os = cs ^ 2;
                if (head[cx][os] && head[cx][os] != 1)
                    fail("OrientationConflict", "inconsistent strand directions", ErrClass::Parse);
                if (!head[cx][os]) {
                    head[cx][os] = 1;
                    auto [nx, ns] = other(cx, os);
                    cx = nx;
                    cs = ns;
                    ch = -1;
                    continue;
                }
                return;
            }
        }
    };
    for (int x = 0; x < (int)P.X.size(); ++x) {
        set(x, 0, 1);
        auto [ox, os] = other(x, 0);
        set(ox, os, -1);
    }
    for (int x = 0; x < (int)P.X.size(); ++x)
        if (!head[x][1]) {
            set(x, 3, 1);
            auto [ox, os] = other(x, 3);
            set(ox, os, -1);
        }
    PDOrient O;
    for (int x = 0; x < (int)P.X.size(); ++x) {
        if (head[x][0] != 1 || head[x][2] != -1) fail("OrientationConflict", "under-strand direction", ErrClass::Parse);
        int sg = head[x][3] == 1 ? 1 : -1;
        O.sign.push_back(sg);
        (sg > 0 ? O.npos : O.nneg)++;
    }
    return O;
}

inline PD pd_mirror(const PD& P) {
    PDOrient O = pd_orient(P);
    PD R;
    R.free_loops = P.free_loops;
    for (size_t x = 0; x < P.X.size(); ++x) {
        auto [a, b, c, d] = P.X[x];
        if (O.sign[x] > 0) R.X.push_back({d, a, b, c});
        else R.X.push_back({b, c, d, a});
    }
    return R;
}

// KhR2 complex of a planar code by scanning: each crossing is a disk whose
// 0-res joins (a,d),(b,c) and whose 1-res joins (a,b),(c,d).
inline Complex pd_bracket(const PD& P) {
    PDOrient O = pd_orient(P);
    int N = (int)P.X.size();
    Complex unk = from_flat(empty_flat());
    auto loops_factor = [&](Complex C) {
        for (int i = 0; i < P.free_loops; ++i) {
            FlatData lf;
            lf.lkey.push_back(new_uid() * 64);
            Complex L = from_flat(intern(std::move(lf)));
            C = simplify(juxtapose(C, L), {false, false}).first;
        }
        return C;
    };
    if (N == 0) return loops_factor(unk);
    auto cross_core = [&](uint32_t uid) {
        FlatId r0 = relabel(make_matching(4, 0, {{0, 3}, {1, 2}}), uid * 64);
        FlatId r1 = relabel(make_matching(4, 0, {{0, 1}, {2, 3}}), uid * 64);
        Complex C;
        C.nb = 4;
        C.nt = 0;
        C.obj = {{r0, -1, 1}, {r1, 0, 0}};
        C.d = Mat(2, 2);
        C.d.col[0].emplace_back(1, basis_cob(r0, r1, 0));
        return C;
    };
    std::vector<char> used(N, 0);
    std::vector<int> bl;
    Complex C;
    auto self_close = [&]() {
        bool again = true;
        while (again && bl.size() >= 2) {
            again = false;
            int m = (int)bl.size();
            for (int i = 0; i < m; ++i) {
                int j = (i + 1) % m;
                if (bl[i] != bl[j]) continue;
                GlueSpec sp;
                sp.sizes = {{m, 0}};
                sp.joins.push_back({{0, i}, {0, j}});
                std::vector<int> nb2;
                for (int k = 0; k < m; ++k)
                    if (k != i && k != j) {
                        sp.outb.push_back({0, k});
                        nb2.push_back(bl[k]);
                    }
                C = simplify(glue_complexes({&C}, sp), {false, false}).first;
                bl = nb2;
                again = true;
                break;
            }
        }
    };
    for (int step = 0; step < N; ++step) {
        int best = -1, bestshare = -1;
        std::vector<int> bestnew;
        GlueSpec bestsp;
        for (int x = 0; x < N && step > 0; ++x) {
            if (used[x]) continue;
            auto& L = P.X[x];
            int m = (int)bl.size();
            std::vector<char> inb(m, 0), inx(4, 0);
            int share = 0;
            for (int k = 0; k < m; ++k)
                for (int s = 0; s < 4; ++s)
                    if (bl[k] == L[s] && !inx[s]) {
                        inb[k] = 1;
                        inx[s] = 1;
                        share++;
                        break;
                    }
            if (share == 0 || share <= bestshare) continue;
            // contiguous block in the boundary, starting index st
            int st = -1;
            if (share == m) {
                st = 0;
            } else {
                for (int k = 0; k < m; ++k)
                    if (inb[k] && !inb[(k + m - 1) % m]) {
                        if (st >= 0) {
                            st = -2;
                            break;
                        }
                        st = k;
                    }
            }
            if (st < 0) continue;
            // match reversed in the crossing
            bool ok = false;
            std::vector<int> nbl;
            GlueSpec sp;
            for (int rot = 0; rot < (share == m ? m : 1) && !ok; ++rot) {
                int s0 = (st + rot) % m;
                // boundary block p1..pk = bl[s0], bl[s0+1], ... ; crossing must read pk..p1 ccw
                std::vector<int> blk;
                for (int k = 0; k < share; ++k) blk.push_back((s0 + k) % m);
                for (int xs = 0; xs < 4 && !ok; ++xs) {
                    // crossing slot of p1 is xs; p2 at xs-1, ...
                    bool good = true;
                    for (int k = 0; k < share; ++k)
                        if (L[((xs - k) % 4 + 4) % 4] != bl[blk[k]]) good = false;
                    if (!good) continue;
                    ok = true;
                    sp = GlueSpec{};
                    sp.sizes = {{m, 0}, {4, 0}};
                    nbl.clear();
                    for (int k = 0; k < share; ++k) sp.joins.push_back({{0, blk[k]}, {1, ((xs - k) % 4 + 4) % 4}});
                    for (int k = share; k < m; ++k) {
                        int idx = (s0 + k) % m;
                        sp.outb.push_back({0, idx});
                        nbl.push_back(bl[idx]);
                    }
                    for (int k = 1; k <= 4 - share; ++k) {
                        int xsl = (xs + k) % 4;
                        sp.outb.push_back({1, xsl});
                        nbl.push_back(L[xsl]);
                    }
                }
            }
            if (!ok) continue;
            best = x;
            bestshare = share;
            bestnew = nbl;
            bestsp = sp;
        }
        if (step == 0 || best < 0) {
            int x = 0;
            while (used[x]) ++x;
            Complex X = cross_core(new_uid());
            if (step == 0) {
                C = X;
                bl = {P.X[x][0], P.X[x][1], P.X[x][2], P.X[x][3]};
            } else {
                // disjoint: no shared labels anywhere, or not attachable
                for (int y = 0; y < N; ++y)
                    if (!used[y])
                        for (int s = 0; s < 4; ++s)
                            for (int l : bl)
                                if (l == P.X[y][s]) fail("NonPlanarPD", "no contiguous attachment", ErrClass::Parse);
                int m = (int)bl.size();
                C = simplify(glue_complexes({&C, &X}, juxtapose_spec({{m, 0}, {4, 0}})), {false, false}).first;
                for (int s = 0; s < 4; ++s) bl.push_back(P.X[x][s]);
            }
            used[x] = 1;
        } else {
            Complex X = cross_core(new_uid());
            C = simplify(glue_complexes({&C, &X}, bestsp), {false, false}).first;
            bl = bestnew;
            used[best] = 1;
        }
        self_close();
    }
    if (!bl.empty()) fail("NonPlanarPD", "boundary left open", ErrClass::Parse);
    C = loops_factor(C);
    return shift(C, O.nneg, -O.nneg);
}

// ---------------------------------------------------------------------------
// Brute-force cube oracle: original Khovanov homology over the full cube
// (0-smoothing joins (a,b),(c,d)), converted to KhR2 by the dictionary
// KhR2^{i,J}(D) = Kh^{-i,J+w}(D).

inline GradedDims convert_conventions(const GradedDims& d, const std::string& from, const std::string& to,
                                      int writhe) {
    auto known = [](const std::string& s) { return s == "KhR2" || s == "Kh"; };
    if (!known(from) || !known(to)) fail("UnknownConvention", from + " -> " + to);
    if (from == to) return d;
    GradedDims r;
    r.convention = to;
    for (auto& [k, v] : d.d) {
        if (from == "Kh") r.add(-k.first, k.second - writhe, v);
        else r.add(-k.first, k.second + writhe, v);
    }
    return r;
}

inline GradedDims cube_kh(const PD& P) {
    int N = (int)P.X.size();
    if (N > 12) fail("TooLarge", "cube oracle limited to 12 crossings", ErrClass::Resource);
    PDOrient O = pd_orient(P);
    std::map<int, int> lid;
    for (auto& x : P.X)
        for (int l : x) lid.emplace(l, (int)lid.size());
    int E = (int)lid.size();
    int V = 1 << N;
    // circles per vertex: component id per edge
    std::vector<std::vector<int>> cid(V);
    std::vector<int> ncirc(V);
    for (int v = 0; v < V; ++v) {
        std::vector<int> par(E);
        std::iota(par.begin(), par.end(), 0);
        std::function<int(int)> f = [&](int a) { return par[a] == a ? a : par[a] = f(par[a]); };
        auto un = [&](int a, int b) { par[f(a)] = f(b); };
        for (int x = 0; x < N; ++x) {
            auto& X = P.X[x];
            int a = lid[X[0]], b = lid[X[1]], c = lid[X[2]], d = lid[X[3]];
            if (v >> x & 1) {
                un(a, d);
                un(b, c);
            } else {
                un(a, b);
                un(c, d);
            }
        }
        std::map<int, int> m;
        cid[v].resize(E);
        for (int e = 0; e < E; ++e) cid[v][e] = m.emplace(f(e), (int)m.size()).first->second;
        ncirc[v] = (int)m.size();
    }
    // generator (v, mask): bit set = v_- (x), clear = v_+ (1)
    // Kh grading: h = |v| - n_-, q = (#plus - #minus) + |v| + n_+ - 2 n_-
    auto hq = [&](int v, uint32_t mask) {
        int k = std::popcount((unsigned)v), c = ncirc[v], mi = std::popcount(mask);
        return Bideg{k - O.nneg, (c - 2 * mi) + k + O.npos - 2 * O.nneg};
    };
    std::map<Bideg, std::vector<std::pair<int, uint32_t>>> gens;
    for (int v = 0; v < V; ++v)
        for (uint32_t m = 0; m < (1u << ncirc[v]); ++m) gens[hq(v, m)].push_back({v, m});
    std::map<Bideg, std::map<std::pair<int, uint32_t>, int>> index;
    for (auto& [b, g] : gens)
        for (size_t i = 0; i < g.size(); ++i) index[b][g[i]] = (int)i;
    // differential from (h,q) to (h+1,q)
    auto dmat = [&](Bideg b) {
        Bideg t{b.first + 1, b.second};
        auto it = gens.find(b), jt = gens.find(t);
        int cols = it == gens.end() ? 0 : (int)it->second.size();
        int rows = jt == gens.end() ? 0 : (int)jt->second.size();
        QMat M(rows, cols);
        if (!rows || !cols) return M;
        auto& tidx = index[t];
        for (int j = 0; j < cols; ++j) {
            auto [v, m] = it->second[j];
            for (int x = 0; x < N; ++x) {
                if (v >> x & 1) continue;
                int w = v | (1 << x);
                int sgn = (std::popcount((unsigned)(v & ((1 << x) - 1))) % 2) ? -1 : 1;
                // map labels of circles from v to w
                auto& cv = cid[v];
                auto& cw = cid[w];
                int ca = cv[lid[P.X[x][0]]], cc = cv[lid[P.X[x][2]]];
                std::vector<std::pair<uint32_t, int>> outs;
                if (ca != cc) {
                    // merge: circles ca, cc -> one
                    bool xa = m >> ca & 1, xc = m >> cc & 1;
                    if (xa && xc) continue;
                    uint32_t nm = 0;
                    for (int e = 0; e < E; ++e)
                        if (m >> cv[e] & 1) nm |= 1u << cw[e];
                    outs.push_back({nm, 1});
                } else {
                    // split: circle ca -> two circles cw[a], cw[c]? find the two
                    uint32_t base = 0;
                    for (int e = 0; e < E; ++e)
                        if (cv[e] != ca && (m >> cv[e] & 1)) base |= 1u << cw[e];
                    int p1 = -1, p2 = -1;
                    for (int e = 0; e < E; ++e)
                        if (cv[e] == ca) {
                            if (p1 < 0) p1 = cw[e];
                            else if (cw[e] != p1) p2 = cw[e];
                        }
                    if (p2 < 0) fail("Internal", "split did not split", ErrClass::Logic);
                    if (m >> ca & 1) {
                        outs.push_back({base | 1u << p1 | 1u << p2, 1});
                    } else {
                        outs.push_back({base | 1u << p1, 1});
                        outs.push_back({base | 1u << p2, 1});
                    }
                }
                for (auto [nm, cf] : outs) {
                    auto kt = tidx.find({w, nm});
                    if (kt == tidx.end()) fail("Internal", "cube degree mismatch", ErrClass::Logic);
                    M(kt->second, j) += sgn * cf;
                }
            }
        }
        return M;
    };
    GradedDims g;
    g.convention = "Kh";
    std::map<Bideg, int> rk;
    for (auto& [b, gg] : gens) rk[b] = rank(dmat(b));
    for (auto& [b, gg] : gens) {
        Bideg prev{b.first - 1, b.second};
        int rin = rk.count(prev) ? rk[prev] : 0;
        long dim = (long)gg.size() - rk[b] - rin;
        g.add(b.first, b.second, dim);
    }
    // free loops: tensor with the unknot
    for (int i = 0; i < P.free_loops; ++i) {
        GradedDims h;
        h.convention = "Kh";
        for (auto& [k, v] : g.d) {
            h.add(k.first, k.second + 1, v);
            h.add(k.first, k.second - 1, v);
        }
        g = h;
    }
    return g;
}

inline GradedDims cube_oracle(const PD& P) {
    return convert_conventions(cube_kh(P), "Kh", "KhR2", pd_orient(P).writhe());
}

inline GradedDims cube_oracle(const SliceDiagram& D) {
    SliceDiagram C = (D.nb || D.nt()) ? close_diagram(D) : D;
    PD P;
    trace(C, &P);
    return cube_oracle(P);
}

inline GradedDims kh_pd(const PD& P) { return homology(pd_bracket(P)); }

// ---------------------------------------------------------------------------
// Text input.

struct TangleDiagram {
    bool is_pd = false;
    SliceDiagram sd;
    PD pd;
    bool closed = false;
};

namespace detail {
inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\n\r"), b = s.find_last_not_of(" \t\n\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}
inline int to_int(const std::string& s) {
    try {
        size_t k = 0;
        int v = std::stoi(trim(s), &k);
        if (k != trim(s).size()) throw std::invalid_argument(s);
        return v;
    } catch (...) {
        fail("ParseError", "expected an integer: '" + s + "'", ErrClass::Parse);
    }
    return 0;
}
}  // namespace detail

// Statements separated by ';':
//   braid: s1 s2^-1 ...   strands=<n>   pd: X(a,b,c,d) ...
//   belt(n=<n>, k=<k>)    frame(<component>)=<integer>   mirror   close
inline TangleDiagram parse_diagram(const std::string& text) {
    using detail::to_int;
    using detail::trim;
    TangleDiagram T;
    std::vector<std::string> st;
    {
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ';'))
            if (!trim(item).empty()) st.push_back(trim(item));
    }
    int strands = -1;
    std::vector<int> word;
    bool have_braid = false, have_belt = false, want_close = false, want_mirror = false;
    std::vector<std::pair<int, int>> frames;
    for (auto& s : st) {
        if (s.rfind("braid:", 0) == 0 || s == "braid") {
            have_braid = true;
            std::stringstream ws(s.size() > 6 ? s.substr(6) : "");
            std::string g;
            while (ws >> g) {
                if (g.size() < 2 || g[0] != 's') fail("ParseError", "bad generator '" + g + "'", ErrClass::Parse);
                int sign = 1;
                std::string num = g.substr(1);
                auto caret = num.find('^');
                if (caret != std::string::npos) {
                    if (num.substr(caret) != "^-1") fail("ParseError", "bad exponent in '" + g + "'", ErrClass::Parse);
                    sign = -1;
                    num = num.substr(0, caret);
                }
                int i = to_int(num);
                if (i < 1) fail("ParseError", "generator index must be positive", ErrClass::Parse);
                word.push_back(sign * i);
            }
        } else if (s.rfind("strands=", 0) == 0) {
            strands = to_int(s.substr(8));
        } else if (s.rfind("pd:", 0) == 0) {
            T.is_pd = true;
            std::string body = s.substr(3);
            size_t p = 0;
            while ((p = body.find('X', p)) != std::string::npos) {
                size_t o = body.find('(', p), c = body.find(')', p);
                if (o == std::string::npos || c == std::string::npos) fail("ParseError", "bad X(...)", ErrClass::Parse);
                std::stringstream ls(body.substr(o + 1, c - o - 1));
                std::string tok;
                std::array<int, 4> X{};
                int k = 0;
                while (std::getline(ls, tok, ',')) {
                    if (k >= 4) fail("ParseError", "X needs four labels", ErrClass::Parse);
                    X[k++] = to_int(tok);
                }
                if (k != 4) fail("ParseError", "X needs four labels", ErrClass::Parse);
                T.pd.X.push_back(X);
                p = c;
            }
            std::string rest = body;
            for (char ch : rest)
                if (!std::isspace((unsigned char)ch) && !std::strchr("X(),-0123456789", ch))
                    fail("ParseError", "unexpected character in pd", ErrClass::Parse);
        } else if (s.rfind("belt(", 0) == 0) {
            have_belt = true;
            auto o = s.find('('), c = s.find(')');
            if (c == std::string::npos) fail("ParseError", "bad belt(...)", ErrClass::Parse);
            std::stringstream ls(s.substr(o + 1, c - o - 1));
            std::string tok;
            int n = -1, k = -1;
            while (std::getline(ls, tok, ',')) {
                tok = trim(tok);
                if (tok.rfind("n=", 0) == 0) n = to_int(tok.substr(2));
                else if (tok.rfind("k=", 0) == 0) k = to_int(tok.substr(2));
                else fail("ParseError", "bad belt parameter '" + tok + "'", ErrClass::Parse);
            }
            if (n < 0 || k < 0) fail("ParseError", "belt needs n and k", ErrClass::Parse);
            T.sd = belt_diagram(n, k);
        } else if (s.rfind("frame(", 0) == 0) {
            auto c = s.find(')'), e = s.find('=');
            if (c == std::string::npos || e == std::string::npos) fail("ParseError", "bad frame(...)", ErrClass::Parse);
            frames.push_back({to_int(s.substr(6, c - 6)), to_int(s.substr(e + 1))});
        } else if (s == "close") {
            want_close = true;
        } else if (s == "mirror") {
            want_mirror = true;
        } else {
            fail("ParseError", "unknown statement '" + s + "'", ErrClass::Parse);
        }
    }
    if ((int)have_braid + (int)have_belt + (int)T.is_pd != 1)
        fail("ParseError", "exactly one of braid:, pd:, belt() is required", ErrClass::Parse);
    if (have_braid) {
        int mx = 1;
        for (int g : word) mx = std::max(mx, std::abs(g) + 1);
        if (strands < 0) strands = mx;
        if (strands < mx) fail("ParseError", "too few strands for braid word", ErrClass::Parse);
        T.sd = braid_diagram(strands, word);
    }
    if (T.is_pd) {
        if (!frames.empty()) fail("ParseError", "framing is supported on braid and belt input only", ErrClass::Parse);
        pd_orient(T.pd);
        if (want_mirror) T.pd = pd_mirror(T.pd);
        T.closed = true;
        return T;
    }
    if (want_mirror) T.sd = mirror(T.sd);
    if (want_close) {
        T.sd = close_diagram(T.sd);
        T.closed = true;
    }
    for (auto [c, f] : frames) {
        if (!T.closed) fail("ParseError", "framing needs a closed diagram", ErrClass::Parse);
        T.sd = set_framing(T.sd, c - 1, f);
    }
    return T;
}

inline GradedDims kh(const TangleDiagram& T) {
    if (T.is_pd) return kh_pd(T.pd);
    return kh_slices(T.sd);
}

inline GradedDims cube_oracle(const TangleDiagram& T) {
    if (T.is_pd) return cube_oracle(T.pd);
    return cube_oracle(T.sd);
}

}  // namespace khcob
