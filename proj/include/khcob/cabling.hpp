#pragma once
// Belted identity braids, annulus maps between them, the symmetric group action
// on closure homology, and colimits of the resulting directed systems.

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "movie.hpp"

namespace khcob {

// ---------------------------------------------------------------------------
// Homology of closures, with the reduction data needed to push maps through.

struct ClosedHomology {
    int n = 0;
    Complex closed;
    Complex E;
    Reduction r;
    GradedDims dims;
    std::vector<Bideg> bd;   // bidegree of each object of E
    std::vector<int> slot;   // index of each object inside its bidegree block
};

inline ClosedHomology close_homology(const Complex& C) {
    if (C.nb != C.nt) fail("SignatureMismatch", "closure needs an (n,n) complex");
    ClosedHomology H;
    H.n = C.nb;
    H.closed = glue_complexes({&C}, closure_spec(C.nb));
    auto [E, r] = simplify(H.closed, {false, true});
    if (!mat_is_zero(E.d)) fail("Internal", "closed complex did not fully reduce", ErrClass::Logic);
    H.E = std::move(E);
    H.r = std::move(r);
    std::map<Bideg, int> cnt;
    for (auto& o : H.E.obj) {
        Bideg b{o.h, o.q};
        H.bd.push_back(b);
        H.slot.push_back(cnt[b]++);
        H.dims.add(o.h, o.q, 1);
    }
    return H;
}

// Linear map induced on closure homology by phi : Cs -> Ct.
inline GradedLinearMap homology_map(const ClosedHomology& S, const ClosedHomology& T, const Complex& Cs,
                                    const Complex& Ct, const Map& phi) {
    const Map& I = S.r.i;
    std::vector<char> need(I.m.rows, 0);
    for (auto& c : I.m.col)
        for (auto& e : c) need[e.first] = 1;
    Map cl = glue_maps({&Cs}, {&Ct}, {&phi}, closure_spec(S.n), &need);
    Map M = map_compose(T.r.p, map_compose(cl, I));
    GradedLinearMap g;
    g.src = S.dims;
    g.tgt = T.dims;
    g.dh = M.dh;
    g.dq = M.dq;
    for (auto& [b, v] : S.dims.d) g.block[b] = QMat((int)T.dims.at(b.first + M.dh, b.second + M.dq), (int)v);
    for (int x = 0; x < M.m.cols; ++x)
        for (auto& [y, c] : M.m.col[x]) {
            Q val;
            if (!iso_scalar(c, val)) fail("Internal", "closed map entry is not a scalar", ErrClass::Logic);
            if (is_zero(val)) continue;
            Bideg bx = S.bd[x], by = T.bd[y];
            if (by.first != bx.first + M.dh || by.second != bx.second + M.dq)
                fail("Internal", "homology map breaks the grading", ErrClass::Logic);
            g.block[bx](T.slot[y], S.slot[x]) += val;
        }
    return g;
}

// ---------------------------------------------------------------------------
// n strands wearing k belts.  C_k = simplify(Shell[C_{k-1}]), where the shell
// adds one belt outside everything else.  Belts are counted from the outside.

inline Complex identity_complex(int n) {
    if (n == 0) return from_flat(empty_flat());
    return from_flat(relabel(id_flat(n), new_uid() * 64));
}

inline std::vector<Piece> shell_pieces(int n, std::shared_ptr<const Complex> Z) {
    std::vector<Piece> s;
    s.push_back(make_piece(SliceKind::Cup, n, n));
    for (int j = n - 1; j >= 0; --j) s.push_back(make_piece(SliceKind::Cross, n + 2, j, -1));
    s.push_back(make_box(n + 2, 1, std::move(Z)));
    for (int j = 0; j < n; ++j) s.push_back(make_piece(SliceKind::Cross, n + 2, j, -1));
    s.push_back(make_piece(SliceKind::Cap, n + 2, n));
    return s;
}

class BeltTower {
public:
    BeltTower(int n, Complex base) : n_(n) {
        if (base.nb != n || base.nt != n) fail("SignatureMismatch", "belt base must be an (n,n) complex");
        C_.push_back(std::make_shared<const Complex>(std::move(base)));
        shell_.emplace_back();
        raw_.emplace_back();
        red_.emplace_back();
    }

    int n() const { return n_; }

    const Complex& C(int k) {
        grow(k);
        return *C_[k];
    }
    std::shared_ptr<const Complex> Cptr(int k) {
        grow(k);
        return C_[k];
    }

    const ClosedHomology& H(int k) {
        auto it = H_.find(k);
        if (it != H_.end()) return it->second;
        return H_.emplace(k, close_homology(C(k))).first->second;
    }

    // Annulus capping belts j, j+1 : C_k -> C_{k-2}.
    const Map& acap(int k, int j) {
        check_pair(k, j);
        auto key = std::make_pair(k, j);
        if (auto it = acap_.find(key); it != acap_.end()) return it->second;
        Map m;
        if (j == 1) {
            Movie M = pair_movie(k, false);
            m = M.run_forward(map_identity(C(k)));
            check_final(M, k - 2);
        } else {
            Map inner = acap(k - 1, j - 1);
            m = map_compose(red_[k - 2].p, map_compose(shell_map(k, k - 2, inner), red_[k].i));
        }
        return acap_.emplace(key, std::move(m)).first->second;
    }

    // Annulus creating belts j, j+1 : C_{k-2} -> C_k, dotted on the new surface
    // when requested.
    const Map& acup(int k, int j, bool dotted = false) {
        check_pair(k, j);
        auto key = std::make_tuple(k, j, dotted);
        if (auto it = acup_.find(key); it != acup_.end()) return it->second;
        Map m;
        if (j == 1) {
            Movie M = pair_movie(k, dotted);
            check_final(M, k - 2);
            m = M.run_backward(map_identity(C(k - 2)));
            // The slide maps are fixed only up to sign; pin the sign so that the
            // annulus pair closes up to a torus of value +2.
            if (cup_sign(k) < 0) m.m = mat_scale(m.m, Q(-1));
        } else {
            Map inner = acup(k - 1, j - 1, dotted);
            m = map_compose(red_[k].p, map_compose(shell_map(k - 2, k, inner), red_[k - 2].i));
        }
        return acup_.emplace(key, std::move(m)).first->second;
    }

    GradedLinearMap hacap(int k, int j) { return homology_map(H(k), H(k - 2), C(k), C(k - 2), acap(k, j)); }
    GradedLinearMap hacup(int k, int j, bool dotted = false) {
        return homology_map(H(k - 2), H(k), C(k - 2), C(k), acup(k, j, dotted));
    }

    // s_j = id - (cup . cap) on belts j, j+1, acting on closure homology.
    const GradedLinearMap& swap(int k, int j) {
        auto key = std::make_pair(k, j);
        if (auto it = swap_.find(key); it != swap_.end()) return it->second;
        return swap_.emplace(key, swap_uncached(k, j)).first->second;
    }

    GradedLinearMap swap_uncached(int k, int j) {
        GradedLinearMap cc = compose(hacup(k, j), hacap(k, j));
        if (cc.dh != 0 || cc.dq != 0) fail("Internal", "swap is not of degree zero", ErrClass::Logic);
        return map_sub(identity_map(H(k).dims), cc);
    }

    // Basis of the swap invariants of H(k), one swap in memory at a time.
    std::map<Bideg, QMat> invariants(int k) {
        std::map<Bideg, QMat> B;
        for (auto& [b, d] : H(k).dims.d) B[b] = QMat::identity((int)d);
        for (int j = 1; j < k; ++j) {
            GradedLinearMap g = swap_.count({k, j}) ? swap_.at({k, j}) : swap_uncached(k, j);
            for (auto& [b, M] : B) {
                if (M.c == 0) continue;
                QMat A = (g.at(b) - QMat::identity(M.r)) * M;
                M = M * kernel(A);
            }
        }
        return B;
    }

    std::vector<GradedLinearMap> swaps(int k) {
        std::vector<GradedLinearMap> s;
        for (int j = 1; j < k; ++j) s.push_back(swap(k, j));
        return s;
    }

private:
    int n_;
    std::vector<std::shared_ptr<const Complex>> C_;
    std::vector<std::vector<Piece>> shell_;
    std::vector<std::shared_ptr<const Complex>> raw_;
    std::vector<Reduction> red_;
    std::map<int, ClosedHomology> H_;
    std::map<std::pair<int, int>, Map> acap_;
    std::map<std::tuple<int, int, bool>, Map> acup_;
    std::map<std::pair<int, int>, GradedLinearMap> swap_;

    std::map<int, int> cup_sign_;

    int cup_sign(int k) {
        if (auto it = cup_sign_.find(k); it != cup_sign_.end()) return it->second;
        Movie M = pair_movie(k, false);
        Map u = M.run_backward(map_identity(C(k - 2)));
        // i p is only homotopic to the identity, so compare on closure homology
        GradedLinearMap t = compose(hacap(k, 1), homology_map(H(k - 2), H(k), C(k - 2), C(k), u));
        GradedLinearMap two = identity_map(H(k - 2).dims), mtwo = two;
        for (auto& [b, m] : two.block) m = scaled(m, Q(2));
        for (auto& [b, m] : mtwo.block) m = scaled(m, Q(-2));
        int sg = 0;
        if (map_eq(t, two)) sg = 1;
        if (map_eq(t, mtwo)) sg = -1;
        if (!sg) fail("Internal", "annulus pair is not a multiple of the identity", ErrClass::Logic);
        return cup_sign_[k] = sg;
    }

    void grow(int k) {
        while ((int)C_.size() <= k) {
            int m = (int)C_.size();
            auto sh = shell_pieces(n_, C_[m - 1]);
            auto raw = std::make_shared<const Complex>(raw_complex(sh));
            auto [D, r] = simplify(*raw, {false, true});
            shell_.push_back(std::move(sh));
            raw_.push_back(std::move(raw));
            red_.push_back(std::move(r));
            C_.push_back(std::make_shared<const Complex>(std::move(D)));
        }
    }

    void check_pair(int k, int j) {
        if (k < 2 || j < 1 || j >= k) fail("BadIndexStep", "no belt pair " + std::to_string(j) + " among " +
                                                               std::to_string(k));
        grow(k);
    }

    // raw(shell_ks) -> raw(shell_kt) applying phi : C_{ks-1} -> C_{kt-1} inside the box.
    Map shell_map(int ks, int kt, const Map& phi) {
        auto &S = shell_[ks], &T = shell_[kt];
        std::vector<const Complex*> src, tgt;
        std::vector<const Map*> fs;
        std::vector<std::pair<int, int>> sz;
        Map local;
        for (size_t i = 0; i < S.size(); ++i) {
            src.push_back(&S[i].full());
            tgt.push_back(&T[i].full());
            sz.push_back({S[i].wb, S[i].wt()});
            if (S[i].kind == SliceKind::Box) {
                local = pad_map(phi, *C_[ks - 1], *C_[kt - 1], S[i].left, S[i].right());
                fs.push_back(&local);
            } else {
                fs.push_back(nullptr);
            }
        }
        return glue_maps(src, tgt, fs, stack_spec(sz));
    }

    static int find_core(const std::vector<Piece>& ps, const Complex* core) {
        for (int i = 0; i < (int)ps.size(); ++i)
            if (ps[i].core.get() == core) return i;
        fail("Internal", "piece lost during movie", ErrClass::Logic);
        return -1;
    }

    void check_final(const Movie& M, int k) {
        const auto& ps = M.state();
        if (ps.size() != 1 || ps[0].core != C_[k]) fail("Internal", "annulus movie ended elsewhere", ErrClass::Logic);
        const Complex& F = ps[0].full();
        for (int x = 0; x < F.size(); ++x)
            if (F.obj[x].f != C_[k]->obj[x].f) fail("Internal", "annulus movie final labels differ", ErrClass::Logic);
    }

    // Movie from Shell[Shell[C_{k-2}]] (entered through C_k) to C_{k-2} removing the
    // two outer belts: interleave, saddle the two left arcs, slide the cap and
    // then the cup through the strands, and cap off the remaining loop.
    Movie pair_movie(int k, bool dotted) {
        int n = n_;
        Movie M({make_box(n, 0, C_[k])});
        M.replace_box(0, shell_[k], *raw_[k], red_[k].i, red_[k].p);
        M.replace_box(n + 1, shell_[k - 1], *raw_[k - 1], red_[k - 1].i, red_[k - 1].p);
        const auto& o = shell_[k];
        const auto& in = shell_[k - 1];
        // o: cup, X(n-1..0), box, X(0..n-1), cap
        auto ocup = o[0].core.get(), ocap = o[2 * n + 2].core.get();
        auto icup = in[0].core.get(), icap = in[2 * n + 2].core.get();
        auto Z = in[n + 1].core.get();
        std::vector<const Complex*> olo(n), ohi(n), ilo(n), ihi(n);
        for (int j = 0; j < n; ++j) {
            olo[j] = o[n - j].core.get();
            ohi[j] = o[n + 2 + j].core.get();
            ilo[j] = in[n - j].core.get();  // becomes Cross(j+1)
            ihi[j] = in[n + 2 + j].core.get();
        }
        auto at = [&](const Complex* c) { return find_core(M.state(), c); };
        M.bubble(at(icup), 1);
        for (int j = n; j >= 1; --j) M.bubble(at(ilo[j - 1]), at(olo[j - 1]) + 1);
        M.bubble(at(icap), at(ocap) - 1);
        for (int j = 1; j <= n; ++j) M.bubble(at(ohi[j - 1]), at(ihi[j - 1]) + 1);
        int z = at(Z);
        M.saddle(z, 0);
        auto cap = M.state()[z].core.get();
        auto cup = M.state()[z + 1].core.get();
        for (int j = 1; j <= n; ++j) {
            int c = at(cap);
            M.reduce(c - 2, c + 1, {make_piece(SliceKind::Cap, n + 4, j)});
            cap = M.state()[c - 2].core.get();
        }
        M.reduce(0, 3, {make_piece(SliceKind::Cup, n, n)});
        auto cupx = M.state()[0].core.get();
        M.commute(at(cup));
        for (int j = 1; j <= n; ++j) {
            int c = at(cup);
            M.reduce(c, c + 3, {make_piece(SliceKind::Cup, n + 2, j)});
            cup = M.state()[c].core.get();
        }
        {
            int c = at(cup);
            M.reduce(c, c + 2, {});
        }
        M.commute(at(cupx));
        M.death(at(cupx), at(cupx) + 2, dotted);
        return M;
    }
};

// ---------------------------------------------------------------------------
// Symmetrization on homology.

struct SymmetrizedSpace {
    GradedDims ambient;
    std::map<Bideg, QMat> e;      // projector per bidegree (explicit construction only)
    std::map<Bideg, QMat> basis;  // columns span the image
    GradedDims dims;
};

inline GradedDims dims_of(const std::map<Bideg, QMat>& basis) {
    GradedDims g;
    for (auto& [b, B] : basis) g.add(b.first, b.second, B.c);
    return g;
}

// Exact average over the group generated by adjacent transpositions acting
// through the given generators (generator i swaps i and i+1).
inline SymmetrizedSpace symmetrizer(const std::vector<GradedLinearMap>& gens, const GradedDims& amb) {
    int k = (int)gens.size() + 1;
    if (k > 6) fail("TooManyBelts", "explicit symmetrizer limited to k <= 6", ErrClass::Resource);
    SymmetrizedSpace S;
    S.ambient = amb;
    std::vector<int> id(k);
    std::iota(id.begin(), id.end(), 0);
    for (auto& [b, d] : amb.d) {
        std::map<std::vector<int>, QMat> seen;
        std::vector<std::vector<int>> queue{id};
        seen[id] = QMat::identity((int)d);
        for (size_t h = 0; h < queue.size(); ++h) {
            auto p = queue[h];
            QMat M = seen[p];
            for (int i = 0; i + 1 < k; ++i) {
                auto p2 = p;
                for (auto& x : p2)
                    if (x == i)
                        x = i + 1;
                    else if (x == i + 1)
                        x = i;
                if (seen.count(p2)) continue;
                seen[p2] = gens[i].at(b) * M;
                queue.push_back(p2);
            }
        }
        QMat e((int)d, (int)d);
        for (auto& [p, M] : seen) e = e + M;
        e = scaled(e, Q(1) / Q((long)seen.size()));
        S.basis[b] = column_basis(e);
        S.e[b] = std::move(e);
    }
    S.dims = dims_of(S.basis);
    return S;
}

// Vectors fixed by every generator, one block at a time.
inline std::map<Bideg, QMat> invariant_basis(const std::vector<GradedLinearMap>& gens, const GradedDims& amb) {
    std::map<Bideg, QMat> out;
    for (auto& [b, d] : amb.d) {
        QMat B = QMat::identity((int)d);
        for (auto& g : gens) {
            if (B.c == 0) break;
            QMat A = (g.at(b) - QMat::identity((int)d)) * B;
            QMat K = kernel(A);
            B = B * K;
        }
        out[b] = B;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Directed systems of graded vector spaces and their colimits.

struct DirectedSystemVS {
    std::vector<GradedDims> ambient;            // node spaces in normalized bidegrees
    std::vector<std::map<Bideg, QMat>> sub;     // chosen subspace of each node
    std::vector<GradedLinearMap> maps;          // node a -> node a+1, degree (0,0)
    std::vector<int> qshift;                    // normalization applied at each node
    std::string normalization = "-2|r|-|a|";
};

struct ColimitEntry {
    long dim = 0;
    bool stable = false;
    int first = 0;  // first node whose image already has the reported rank
};

struct ColimitReport {
    std::map<Bideg, ColimitEntry> table;
    int horizon = 0;
    std::string normalization;
    std::vector<std::map<Bideg, long>> node_dims;
    std::string note;
    bool all_stable() const {
        for (auto& [b, e] : table)
            if (!e.stable) return false;
        return true;
    }
    GradedDims stable_dims() const {
        GradedDims g;
        for (auto& [b, e] : table)
            if (e.stable) g.add(b.first, b.second, e.dim);
        return g;
    }
};

inline DirectedSystemVS constant_system(const GradedDims& V, int nodes, bool zero_maps) {
    DirectedSystemVS S;
    for (int a = 0; a < nodes; ++a) {
        S.ambient.push_back(V);
        std::map<Bideg, QMat> b;
        for (auto& [k, d] : V.d) b[k] = QMat::identity((int)d);
        S.sub.push_back(b);
        S.qshift.push_back(0);
    }
    for (int a = 0; a + 1 < nodes; ++a) {
        GradedLinearMap f = identity_map(V);
        if (zero_maps)
            for (auto& [k, m] : f.block) m = QMat(m.r, m.c);
        S.maps.push_back(f);
    }
    return S;
}

// rank of the composite from node i into node j, per bidegree.
inline std::map<Bideg, long> composite_rank(const DirectedSystemVS& S, int i, int j) {
    std::map<Bideg, long> r;
    if (i < 0) return r;
    for (auto& [b, B] : S.sub[i]) {
        QMat M = B;
        for (int a = i; a < j; ++a) {
            QMat F = S.maps[a].at(b);
            M = F * M;
        }
        long v = rank(M);
        if (v) r[b] = v;
    }
    return r;
}

// Colimit read off nodes 0..H+1, node H+1 serving only as look-ahead: the
// table covers bidegrees occupied at some node <= H, and the value is the rank
// from node H-1 into node H+1. It is stable when the ranks into H+1 from nodes
// H-1 and H both equal the rank from H-1 into H, or when the one-step ranks
// over the last three steps agree while the two-step ranks vanish. When every
// two-step composite vanishes the whole table is stable at zero.
inline ColimitReport colimit(const DirectedSystemVS& S) {
    int N = (int)S.ambient.size();
    if (N < 3) fail("BadHorizon", "colimit needs at least three nodes");
    int H = N - 2;
    ColimitReport R;
    R.horizon = H;
    R.normalization = S.normalization;
    for (auto& s : S.sub) {
        std::map<Bideg, long> d;
        for (auto& [b, B] : s)
            if (B.c) d[b] = B.c;
        R.node_dims.push_back(d);
    }
    auto r1 = composite_rank(S, H - 1, H), r2 = composite_rank(S, H - 1, H + 1), r0 = composite_rank(S, H - 2, H);
    auto rm = composite_rank(S, H - 2, H - 1), rh = composite_rank(S, H, H + 1);
    std::set<Bideg> keys;
    for (int a = 0; a <= H; ++a)
        for (auto& [b, B] : S.sub[a])
            if (B.c) keys.insert(b);
    // every two-step composite vanishes: the system is of f.f = 0 type and
    // its colimit is zero
    bool nil = true;
    for (int a = 0; a + 2 <= H + 1 && nil; ++a) nil = composite_rank(S, a, a + 2).empty();
    if (nil) R.note = "two-step composites vanish on all nodes 0.." + std::to_string(H + 1);
    std::vector<std::map<Bideg, long>> into;
    for (int i = 0; i <= H + 1; ++i) into.push_back(composite_rank(S, i, H + 1));
    for (auto& b : keys) {
        auto g = [&](const std::map<Bideg, long>& m) {
            auto it = m.find(b);
            return it == m.end() ? 0L : it->second;
        };
        ColimitEntry e;
        e.dim = g(r2);
        e.stable = nil || (g(r1) == g(r2) && g(rh) == g(r2)) ||
                   (g(r2) == 0 && g(r0) == 0 && g(rm) == g(r1) && g(r1) == g(rh));
        e.first = H - 1;
        for (int i = 0; i <= H - 1; ++i)
            if (g(into[i]) == e.dim) {
                e.first = i;
                break;
            }
        R.table[b] = e;
    }
    return R;
}

// ---------------------------------------------------------------------------
// The belt system of n strands (optionally inside a braid-like base complex) at
// homological level alpha: node a carries 2a + |alpha| belts.

struct BeltSystemOptions {
    bool def44_sign = true;  // normalization {-2|r|-|alpha|}; false uses {-2|r|+|alpha|}
    int down = 0;            // strands of the base oriented downward
};

inline DirectedSystemVS belt_system(BeltTower& T, int alpha, int horizon, BeltSystemOptions opt = {}) {
    if (horizon < 1) fail("BadHorizon", "horizon must be at least 1");
    int n = T.n(), A = std::abs(alpha);
    DirectedSystemVS S;
    S.normalization = opt.def44_sign ? "-2|r|-|a|" : "-2|r|+|a|";
    std::vector<std::pair<int, int>> shift;
    for (int a = 0; a <= horizon + 1; ++a) {
        int k = 2 * a + A;
        // a belt meets each strand of the opposite orientation in 2 negative crossings
        int rm = a + (alpha < 0 ? A : 0), rp = k - rm;
        int nneg = 2 * (rm * (n - opt.down) + rp * opt.down);
        int qn = opt.def44_sign ? -2 * a - A : -2 * a + A;
        shift.push_back({nneg, -nneg + qn});
        S.qshift.push_back(qn);
        const auto& H = T.H(k);
        auto inv = T.invariants(k);
        std::map<Bideg, QMat> sub;
        for (auto& [b, B] : inv) sub[{b.first + shift[a].first, b.second + shift[a].second}] = B;
        S.sub.push_back(std::move(sub));
        S.ambient.push_back(shifted(H.dims, shift[a].first, shift[a].second));
    }
    for (int a = 0; a <= horizon; ++a) {
        int k = 2 * a + A;
        GradedLinearMap f = T.hacup(k + 2, 1, true);
        int dh = f.dh + shift[a + 1].first - shift[a].first, dq = f.dq + shift[a + 1].second - shift[a].second;
        if (dh != 0 || dq != 0)
            fail("Internal", "dotted annulus is not degree preserving after normalization (" + std::to_string(dh) +
                                 "," + std::to_string(dq) + ")",
                 ErrClass::Logic);
        GradedLinearMap g;
        g.src = S.ambient[a];
        g.tgt = S.ambient[a + 1];
        for (auto& [b, m] : f.block) g.block[{b.first + shift[a].first, b.second + shift[a].second}] = m;
        S.maps.push_back(std::move(g));
    }
    return S;
}

inline ColimitReport lasagna_s2xb2(int n, int alpha, int horizon, std::optional<Complex> base = std::nullopt,
                                   BeltSystemOptions opt = {}) {
    BeltTower T(n, base ? *base : identity_complex(n));
    return colimit(belt_system(T, alpha, horizon, opt));
}

// Predicted table for the empty boundary: one class at h = 0 and every even
// q <= offset.
inline bool matches_polynomial_ring(const ColimitReport& R, int offset, int window, std::string* why = nullptr) {
    for (int q = offset - window; q <= offset + window; ++q) {
        for (auto& [b, e] : R.table) {
            if (b.second != q) continue;
            long want = (b.first == 0 && q <= offset && (offset - q) % 2 == 0) ? 1 : 0;
            if (!e.stable || e.dim != want) {
                if (why)
                    *why = "bidegree (" + std::to_string(b.first) + "," + std::to_string(q) + "): dim " +
                           std::to_string(e.dim) + (e.stable ? " stable" : " horizon-limited");
                return false;
            }
        }
        bool want1 = q <= offset && (offset - q) % 2 == 0;
        if (want1) {
            auto it = R.table.find({0, q});
            if (it == R.table.end() || !it->second.stable || it->second.dim != 1) {
                if (why) *why = "missing class at q = " + std::to_string(q);
                return false;
            }
        }
    }
    return true;
}

}  // namespace khcob
