#pragma once
// Chain complexes over the cobordism category.

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "cobordism.hpp"

namespace khcob {

struct Obj {
    FlatId f = 0;
    int h = 0, q = 0;
};

using Entry = std::pair<int, Cob>;

// Column-sparse matrix of morphisms; col[j] is sorted by row.
struct Mat {
    int rows = 0, cols = 0;
    std::vector<std::vector<Entry>> col;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), col(c) {}
    size_t nnz() const {
        size_t n = 0;
        for (auto& c : col) n += c.size();
        return n;
    }
    const Cob* at(int i, int j) const {
        for (auto& e : col[j])
            if (e.first == i) return &e.second;
        return nullptr;
    }
};

struct Complex {
    int nb = 0, nt = 0;
    std::vector<Obj> obj;
    Mat d;

    int size() const { return (int)obj.size(); }
};

// A degree (dh, dq) map between two complexes: entry x -> y satisfies
// h(y) = h(x) + dh and deg + q(y) - q(x) = dq.
struct Map {
    Mat m;
    int dh = 0, dq = 0;
};

struct Reduction {
    Map p;  // original -> reduced
    Map i;  // reduced -> original
    bool has_h = false;
    Mat h;  // original -> original, degree -1
};

// ---------------------------------------------------------------------------
// Matrix arithmetic.

namespace detail {
struct Acc {
    std::map<int, Cob> m;
    void add(int r, Cob&& c) {
        if (c.zero()) return;
        auto it = m.find(r);
        if (it == m.end()) {
            m.emplace(r, std::move(c));
        } else {
            auto& t = it->second.terms;
            t.insert(t.end(), c.terms.begin(), c.terms.end());
        }
    }
    std::vector<Entry> take() {
        std::vector<Entry> out;
        for (auto& [r, c] : m) {
            normalize_terms(c.terms);
            if (!c.zero()) out.emplace_back(r, std::move(c));
        }
        m.clear();
        return out;
    }
};
}  // namespace detail

inline Mat mat_mul(const Mat& B, const Mat& A) {
    if (B.cols != A.rows) fail("CompositionMismatch", "matrix sizes");
    Mat R(B.rows, A.cols);
    detail::Acc acc;
    for (int j = 0; j < A.cols; ++j) {
        for (auto& [k, a] : A.col[j])
            for (auto& [i, b] : B.col[k]) acc.add(i, compose(b, a));
        R.col[j] = acc.take();
    }
    return R;
}

inline Mat mat_add(const Mat& A, const Mat& B, const Q& cb = Q(1)) {
    if (A.rows != B.rows || A.cols != B.cols) fail("CompositionMismatch", "matrix sizes");
    Mat R(A.rows, A.cols);
    detail::Acc acc;
    for (int j = 0; j < A.cols; ++j) {
        for (auto& [i, a] : A.col[j]) acc.add(i, Cob(a));
        for (auto& [i, b] : B.col[j]) acc.add(i, scaled(b, cb));
        R.col[j] = acc.take();
    }
    return R;
}

inline Mat mat_scale(Mat A, const Q& c) {
    for (auto& col : A.col)
        for (auto& e : col) e.second = scaled(e.second, c);
    if (is_zero(c))
        for (auto& col : A.col) col.clear();
    return A;
}

inline bool mat_is_zero(const Mat& A) {
    for (auto& c : A.col)
        for (auto& e : c)
            if (!e.second.zero()) return false;
    return true;
}

inline bool mat_eq(const Mat& A, const Mat& B) {
    if (A.rows != B.rows || A.cols != B.cols) return false;
    return mat_is_zero(mat_add(A, B, Q(-1)));
}

inline Mat mat_identity(const Complex& C) {
    Mat I(C.size(), C.size());
    for (int j = 0; j < C.size(); ++j) I.col[j].emplace_back(j, identity(C.obj[j].f));
    return I;
}

inline Map map_identity(const Complex& C) { return Map{mat_identity(C), 0, 0}; }

inline Map map_compose(const Map& g, const Map& f) { return Map{mat_mul(g.m, f.m), f.dh + g.dh, f.dq + g.dq}; }

// ---------------------------------------------------------------------------
// Validation.

inline bool map_degrees_ok(const Complex& A, const Complex& B, const Map& f) {
    if (f.m.rows != B.size() || f.m.cols != A.size()) return false;
    for (int j = 0; j < A.size(); ++j)
        for (auto& [i, c] : f.m.col[j]) {
            if (c.s != A.obj[j].f || c.t != B.obj[i].f) return false;
            if (B.obj[i].h != A.obj[j].h + f.dh) return false;
            for (auto& t : c.terms)
                if (basis_degree(c.s, c.t, t.m) + B.obj[i].q - A.obj[j].q != f.dq) return false;
        }
    return true;
}

inline bool check_d_squared(const Complex& C) {
    if (!map_degrees_ok(C, C, Map{C.d, 1, 0})) return false;
    return mat_is_zero(mat_mul(C.d, C.d));
}

// d_B f = (-1)^dh f d_A
inline bool is_chain_map(const Complex& A, const Complex& B, const Map& f) {
    if (!map_degrees_ok(A, B, f)) return false;
    Mat l = mat_mul(B.d, f.m), r = mat_mul(f.m, A.d);
    return mat_eq(l, (f.dh % 2) ? mat_scale(r, Q(-1)) : r);
}

// ---------------------------------------------------------------------------
// Constructors.

inline Complex from_flat(FlatId t, int h = 0, int q = 0) {
    Complex C;
    C.nb = flat(t).nb;
    C.nt = flat(t).nt;
    C.obj.push_back({t, h, q});
    C.d = Mat(1, 1);
    return C;
}

inline Complex zero_complex(int nb, int nt) {
    Complex C;
    C.nb = nb;
    C.nt = nt;
    return C;
}

inline Complex shift(Complex C, int dh, int dq) {
    for (auto& o : C.obj) {
        o.h += dh;
        o.q += dq;
    }
    return C;
}

// Objects are tuples ordered with piece 0 most significant. The
// differential of piece a carries the Koszul sign of the homological
// degrees of pieces before it.
inline Complex glue_complexes(const std::vector<const Complex*>& pcs, const GlueSpec& sp) {
    size_t P = pcs.size();
    Complex R;
    R.nb = (int)sp.outb.size();
    R.nt = (int)sp.outt.size();
    std::vector<int> radix(P), stride(P);
    long total = 1;
    for (size_t a = 0; a < P; ++a) {
        radix[a] = pcs[a]->size();
        total *= radix[a];
        if (total > 50'000'000) fail("ResourceExceeded", "glued complex too large", ErrClass::Resource);
    }
    if (total == 0) {
        R.d = Mat(0, 0);
        return R;
    }
    for (int a = (int)P - 1, s = 1; a >= 0; --a) {
        stride[a] = s;
        s *= radix[a];
    }
    std::vector<std::vector<Cob>> ids(P);
    for (size_t a = 0; a < P; ++a)
        for (auto& o : pcs[a]->obj) ids[a].push_back(identity(o.f));
    R.obj.resize(total);
    R.d = Mat((int)total, (int)total);
    std::vector<int> x(P, 0);
    std::vector<FlatId> fl(P);
    std::vector<const Cob*> parts(P);
    for (long idx = 0; idx < total; ++idx) {
        int h = 0, q = 0;
        for (size_t a = 0; a < P; ++a) {
            const Obj& o = pcs[a]->obj[x[a]];
            fl[a] = o.f;
            h += o.h;
            q += o.q;
            parts[a] = &ids[a][x[a]];
        }
        R.obj[idx] = {glue_flats(fl, sp), h, q};
        int hb = 0;
        for (size_t a = 0; a < P; ++a) {
            for (auto& [y, c] : pcs[a]->d.col[x[a]]) {
                parts[a] = &c;
                Cob g = glue_cobs(parts, sp);
                if (hb % 2) g = -g;
                long tgt = idx + (long)(y - x[a]) * stride[a];
                if (!g.zero()) R.d.col[idx].emplace_back((int)tgt, std::move(g));
            }
            parts[a] = &ids[a][x[a]];
            hb += pcs[a]->obj[x[a]].h;
        }
        std::sort(R.d.col[idx].begin(), R.d.col[idx].end(),
                  [](const Entry& u, const Entry& v) { return u.first < v.first; });
        for (int a = (int)P - 1; a >= 0; --a) {
            if (++x[a] < radix[a]) break;
            x[a] = 0;
        }
    }
    return R;
}

// Tensor product of maps, one per piece (nullptr = identity), with the
// Koszul sign (-1)^{dh_a * (h of the source pieces before a)}.
inline Map glue_maps(const std::vector<const Complex*>& src, const std::vector<const Complex*>& tgt,
                     const std::vector<const Map*>& fs, const GlueSpec& sp,
                     const std::vector<char>* need = nullptr) {
    size_t P = src.size();
    Map R;
    std::vector<int> rs(P), rt(P), ss(P), st(P);
    long ts = 1, tt = 1;
    for (size_t a = 0; a < P; ++a) {
        if (!fs[a] && src[a] != tgt[a] && src[a]->size() != tgt[a]->size())
            fail("DomainMismatch", "identity piece with different complexes");
        if (fs[a]) {
            R.dh += fs[a]->dh;
            R.dq += fs[a]->dq;
        }
        rs[a] = src[a]->size();
        rt[a] = tgt[a]->size();
        ts *= rs[a];
        tt *= rt[a];
    }
    for (int a = (int)P - 1, s1 = 1, s2 = 1; a >= 0; --a) {
        ss[a] = s1;
        st[a] = s2;
        s1 *= rs[a];
        s2 *= rt[a];
    }
    R.m = Mat((int)tt, (int)ts);
    if (ts == 0) return R;
    std::vector<std::vector<Cob>> ids(P);
    for (size_t a = 0; a < P; ++a)
        if (!fs[a])
            for (int k = 0; k < rs[a]; ++k) {
                // a re-keyed copy of the same picture counts as an identity factor
                FlatId fs0 = src[a]->obj[k].f, ft0 = tgt[a]->obj[k].f;
                if (fs0 == ft0) {
                    ids[a].push_back(identity(fs0));
                    continue;
                }
                if (src[a]->obj[k].h != tgt[a]->obj[k].h || src[a]->obj[k].q != tgt[a]->obj[k].q ||
                    !same_picture(fs0, ft0))
                    fail("DomainMismatch", "identity piece with different complexes");
                ids[a].push_back(isotopy(fs0, ft0));
            }
    std::vector<int> x(P, 0);
    std::vector<const Cob*> parts(P);
    for (long idx = 0; idx < ts; ++idx) {
        // enumerate products of entries of the non-identity pieces
        std::vector<size_t> which;
        for (size_t a = 0; a < P; ++a)
            if (fs[a]) which.push_back(a);
        std::vector<size_t> e(which.size(), 0);
        bool empty = need && !(*need)[idx];
        for (size_t w = 0; w < which.size(); ++w)
            if (fs[which[w]]->m.col[x[which[w]]].empty()) empty = true;
        int sgnexp = 0;
        {
            int hb = 0;
            for (size_t a = 0; a < P; ++a) {
                if (fs[a]) sgnexp += fs[a]->dh * hb;
                hb += src[a]->obj[x[a]].h;
            }
        }
        if (!empty) {
            for (;;) {
                long tgt_idx = 0;
                for (size_t a = 0; a < P; ++a) {
                    if (!fs[a]) {
                        parts[a] = &ids[a][x[a]];
                        tgt_idx += (long)x[a] * st[a];
                    }
                }
                for (size_t w = 0; w < which.size(); ++w) {
                    auto& ent = fs[which[w]]->m.col[x[which[w]]][e[w]];
                    parts[which[w]] = &ent.second;
                    tgt_idx += (long)ent.first * st[which[w]];
                }
                Cob g = glue_cobs(parts, sp);
                if (sgnexp % 2) g = -g;
                if (!g.zero()) R.m.col[idx].emplace_back((int)tgt_idx, std::move(g));
                size_t w = 0;
                for (; w < which.size(); ++w) {
                    if (++e[w] < fs[which[w]]->m.col[x[which[w]]].size()) break;
                    e[w] = 0;
                }
                if (w == which.size()) break;
            }
        }
        std::sort(R.m.col[idx].begin(), R.m.col[idx].end(),
                  [](const Entry& u, const Entry& v) { return u.first < v.first; });
        for (int a = (int)P - 1; a >= 0; --a) {
            if (++x[a] < rs[a]) break;
            x[a] = 0;
        }
    }
    return R;
}

// C below D.
inline Complex stack(const Complex& C, const Complex& D) {
    if (C.nt != D.nb) fail("SignatureMismatch", "stack widths");
    return glue_complexes({&C, &D}, stack_spec({{C.nb, C.nt}, {D.nb, D.nt}}));
}

inline Complex juxtapose(const Complex& C, const Complex& D) {
    return glue_complexes({&C, &D}, juxtapose_spec({{C.nb, C.nt}, {D.nb, D.nt}}));
}

// Cone(f) = A[1] + B with d = [[-d_A, 0], [f, d_B]].
inline Complex cone(const Complex& A, const Complex& B, const Map& f) {
    if (f.dh != 0 || f.dq != 0) fail("NotAChainMap", "cone needs a degree (0,0) map");
    if (!is_chain_map(A, B, f)) fail("NotAChainMap", "f does not commute with d");
    Complex R;
    R.nb = A.nb;
    R.nt = A.nt;
    int na = A.size(), nbb = B.size();
    for (auto o : A.obj) {
        o.h -= 1;
        R.obj.push_back(o);
    }
    for (auto& o : B.obj) R.obj.push_back(o);
    R.d = Mat(na + nbb, na + nbb);
    for (int j = 0; j < na; ++j) {
        for (auto& [i, c] : A.d.col[j]) R.d.col[j].emplace_back(i, -c);
        for (auto& [i, c] : f.m.col[j]) R.d.col[j].emplace_back(na + i, c);
    }
    for (int j = 0; j < nbb; ++j)
        for (auto& [i, c] : B.d.col[j]) R.d.col[na + j].emplace_back(na + i, c);
    return R;
}

// ---------------------------------------------------------------------------
// Delooping. A loop becomes q^{+1} (undotted cap / dotted cup) plus
// q^{-1} (dotted cap / undotted cup).

inline std::pair<Complex, Reduction> deloop(const Complex& C) {
    int n = C.size();
    Complex R;
    R.nb = C.nb;
    R.nt = C.nt;
    std::vector<int> first(n + 1, 0);
    std::vector<std::vector<Cob>> P(n), I(n);
    for (int x = 0; x < n; ++x) {
        const Obj& o = C.obj[x];
        int L = flat(o.f).loops();
        first[x] = R.size();
        FlatId f0 = drop_loops(o.f);
        const auto& cp = circles(o.f, f0);
        const auto& ci = circles(f0, o.f);
        for (uint64_t E = 0; E < (1ull << L); ++E) {
            int e = std::popcount(E);
            R.obj.push_back({f0, o.h, o.q - e + (L - e)});
            uint64_t mp = 0, mi = 0;
            for (int l = 0; l < L; ++l) {
                if (E >> l & 1) mp |= 1ull << (cp.nbnd + l);
                else mi |= 1ull << (ci.nbnd + l);
            }
            P[x].push_back(basis_cob(o.f, f0, mp));
            I[x].push_back(basis_cob(f0, o.f, mi));
        }
    }
    first[n] = R.size();
    int m = R.size();
    Reduction red;
    red.p = Map{Mat(m, n), 0, 0};
    red.i = Map{Mat(n, m), 0, 0};
    for (int x = 0; x < n; ++x)
        for (int k = 0; first[x] + k < first[x + 1]; ++k) {
            red.p.m.col[x].emplace_back(first[x] + k, P[x][k]);
            red.i.m.col[first[x] + k].emplace_back(x, I[x][k]);
        }
    R.d = Mat(m, m);
    detail::Acc acc;
    for (int x = 0; x < n; ++x)
        for (int k = 0; first[x] + k < first[x + 1]; ++k) {
            for (auto& [y, c] : C.d.col[x]) {
                Cob ci2 = compose(c, I[x][k]);
                if (ci2.zero()) continue;
                for (int l = 0; first[y] + l < first[y + 1]; ++l) acc.add(first[y] + l, compose(P[y][l], ci2));
            }
            R.d.col[first[x] + k] = acc.take();
        }
    red.has_h = true;
    red.h = Mat(n, n);
    return {R, red};
}

// ---------------------------------------------------------------------------
// Gaussian elimination.

// If c is an invertible multiple of an identity-shaped cobordism, returns
// the scalar.
inline bool iso_scalar(const Cob& c, Q& out) {
    if (c.terms.size() != 1 || c.terms[0].m != 0) return false;
    if (!same_picture(c.s, c.t) || flat(c.s).loops()) return false;
    const auto& ci = circles(c.s, c.t);
    if (ci.C != flat(c.s).npts() / 2) return false;
    out = c.terms[0].c;
    return true;
}

// t with its target replaced by a picture-identical flat.
inline Cob retarget(const Cob& c, FlatId t) {
    if (c.t == t) return c;
    return compose(isotopy(c.t, t), c);
}
inline Cob resource(const Cob& c, FlatId s) {
    if (c.s == s) return c;
    return compose(c, isotopy(s, c.s));
}

struct ElimOptions {
    bool want_h = false;
    bool track = true;
};

inline std::pair<Complex, Reduction> gaussian_eliminate(const Complex& C, ElimOptions opt = {}) {
    int n = C.size();
    std::vector<std::map<int, Cob>> out(n);
    std::vector<std::set<int>> in(n);
    for (int x = 0; x < n; ++x)
        for (auto& [y, c] : C.d.col[x]) {
            out[x].emplace(y, c);
            in[y].insert(x);
        }
    std::vector<char> alive(n, 1);
    // i: column c holds (orig <- c); p: row y holds (y <- orig)
    std::vector<std::map<int, Cob>> icol(opt.track ? n : 0), prow(opt.track ? n : 0);
    if (opt.track)
        for (int x = 0; x < n; ++x) {
            icol[x].emplace(x, identity(C.obj[x].f));
            prow[x].emplace(x, identity(C.obj[x].f));
        }
    std::map<std::pair<int, int>, Cob> hacc;

    auto addto = [](std::map<int, Cob>& mp, int k, Cob&& c) {
        if (c.zero()) return;
        auto it = mp.find(k);
        if (it == mp.end()) {
            mp.emplace(k, std::move(c));
        } else {
            it->second += c;
            if (it->second.zero()) mp.erase(it);
        }
    };

    auto eliminate = [&](int b, int bp, const Q& c) {
        Q ic = 1 / c;
        std::vector<std::pair<int, Cob>> deltas, gammas;
        for (int x : in[bp])
            if (x != b) deltas.emplace_back(x, scaled(retarget(out[x].at(bp), C.obj[b].f), ic));
        for (auto& [y, g] : out[b])
            if (y != bp) gammas.emplace_back(y, g);
        for (auto& [x, t] : deltas)
            for (auto& [y, g] : gammas) {
                Cob u = -compose(g, t);
                if (u.zero()) continue;
                auto it = out[x].find(y);
                if (it == out[x].end()) {
                    out[x].emplace(y, std::move(u));
                    in[y].insert(x);
                } else {
                    it->second += u;
                    if (it->second.zero()) {
                        out[x].erase(it);
                        in[y].erase(x);
                    }
                }
            }
        if (opt.track) {
            if (opt.want_h) {
                // h += i(b) o (-phi^-1) o p(b')
                for (auto& [o1, m1] : prow[bp]) {
                    Cob t1 = scaled(retarget(m1, C.obj[b].f), -ic);
                    for (auto& [o2, m2] : icol[b]) {
                        Cob hh = compose(m2, t1);
                        if (hh.zero()) continue;
                        auto key = std::make_pair(o2, o1);
                        auto it = hacc.find(key);
                        if (it == hacc.end()) hacc.emplace(key, std::move(hh));
                        else it->second += hh;
                    }
                }
            }
            for (auto& [x, t] : deltas)
                for (auto& [o, m] : icol[b]) addto(icol[x], o, -compose(m, t));
            for (auto& [y, g] : gammas) {
                Cob gi = scaled(resource(g, C.obj[bp].f), ic);
                for (auto& [o, m] : prow[bp]) addto(prow[y], o, -compose(gi, m));
            }
        }
        for (int k : {b, bp}) {
            for (auto& [y, g] : out[k]) in[y].erase(k);
            for (int x : in[k]) out[x].erase(k);
            out[k].clear();
            in[k].clear();
            alive[k] = 0;
            if (opt.track) {
                icol[k].clear();
                prow[k].clear();
            }
        }
    };

    const long thresholds[] = {0, 1, 2, 4, 8, 16, 64, 256, 1L << 40};
    for (int unit_pass = 1; unit_pass >= 0; --unit_pass)
        for (long T : thresholds) {
            bool changed = true;
            while (changed) {
                changed = false;
                for (int x = 0; x < n; ++x) {
                    while (alive[x]) {
                        int besty = -1;
                        long bestfill = 0;
                        Q bestc;
                        for (auto& [y, c] : out[x]) {
                            Q s;
                            if (!iso_scalar(c, s)) continue;
                            if (unit_pass && !is_unit(s)) continue;
                            long fill = (long)(in[y].size() - 1) * (long)(out[x].size() - 1);
                            if (fill > T) continue;
                            if (besty < 0 || fill < bestfill) {
                                besty = y;
                                bestfill = fill;
                                bestc = s;
                            }
                        }
                        if (besty < 0) break;
                        eliminate(x, besty, bestc);
                        changed = true;
                    }
                }
            }
        }

    std::vector<int> newidx(n, -1);
    Complex R;
    R.nb = C.nb;
    R.nt = C.nt;
    for (int x = 0; x < n; ++x)
        if (alive[x]) {
            newidx[x] = R.size();
            R.obj.push_back(C.obj[x]);
        }
    int m = R.size();
    R.d = Mat(m, m);
    for (int x = 0; x < n; ++x)
        if (alive[x])
            for (auto& [y, c] : out[x]) R.d.col[newidx[x]].emplace_back(newidx[y], c);
    Reduction red;
    if (opt.track) {
        red.p = Map{Mat(m, n), 0, 0};
        red.i = Map{Mat(n, m), 0, 0};
        for (int x = 0; x < n; ++x)
            if (alive[x]) {
                for (auto& [o, c] : icol[x]) red.i.m.col[newidx[x]].emplace_back(o, c);
                for (auto& [o, c] : prow[x]) red.p.m.col[o].emplace_back(newidx[x], c);
            }
        for (auto& col : red.p.m.col)
            std::sort(col.begin(), col.end(), [](const Entry& u, const Entry& v) { return u.first < v.first; });
        if (opt.want_h) {
            red.has_h = true;
            red.h = Mat(n, n);
            for (auto& [k, c] : hacc)
                if (!c.zero()) red.h.col[k.second].emplace_back(k.first, c);
            for (auto& col : red.h.col)
                std::sort(col.begin(), col.end(), [](const Entry& u, const Entry& v) { return u.first < v.first; });
        }
    }
    return {R, red};
}

// (p2, i2, h2) after (p1, i1, h1).
inline Reduction compose_reductions(const Reduction& r1, const Reduction& r2) {
    Reduction r;
    r.p = map_compose(r2.p, r1.p);
    r.i = map_compose(r1.i, r2.i);
    if (r1.has_h && r2.has_h) {
        r.has_h = true;
        r.h = mat_add(r1.h, mat_mul(r1.i.m, mat_mul(r2.h, r1.p.m)));
    }
    return r;
}

inline std::pair<Complex, Reduction> simplify(const Complex& C, ElimOptions opt = {}) {
    auto [D, r1] = deloop(C);
    auto [E, r2] = gaussian_eliminate(D, opt);
    if (!opt.track) return {E, Reduction{}};
    if (!opt.want_h) {
        r1.has_h = false;
        r2.has_h = false;
    }
    return {E, compose_reductions(r1, r2)};
}

inline Map transfer_map(const Map& phi, const Reduction& rsrc, const Reduction& rtgt) {
    if (phi.m.cols != rsrc.i.m.rows || phi.m.rows != rtgt.p.m.cols) fail("DomainMismatch", "transfer sizes");
    return map_compose(rtgt.p, map_compose(phi, rsrc.i));
}

// Checks p i = id and i p - id = d h + h d.
inline bool reduction_laws_hold(const Complex& C, const Complex& D, const Reduction& r) {
    if (!mat_eq(mat_mul(r.p.m, r.i.m), mat_identity(D))) return false;
    if (!is_chain_map(C, D, r.p) || !is_chain_map(D, C, r.i)) return false;
    if (!r.has_h) return true;
    Mat lhs = mat_add(mat_mul(r.i.m, r.p.m), mat_identity(C), Q(-1));
    Mat rhs = mat_add(mat_mul(C.d, r.h), mat_mul(r.h, C.d));
    return mat_eq(lhs, rhs);
}

// ---------------------------------------------------------------------------
// Mapping telescope of A_0 -> A_1 -> ... truncated at the horizon: top row
// A_0..A_H, bottom row A_0[-1]..A_{H-1}[-1] with internal differential
// negated, vertical identities and diagonals -f_k.

struct DirectedSystemOfComplexes {
    std::vector<Complex> A;
    std::vector<Map> f;  // f[k]: A[k] -> A[k+1]
};

inline Complex telescope_total(const DirectedSystemOfComplexes& S, int horizon) {
    if (horizon < 1) fail("BadHorizon", "horizon must be at least 1");
    if ((int)S.A.size() <= horizon || (int)S.f.size() < horizon) fail("BadHorizon", "system too short");
    Complex R;
    R.nb = S.A[0].nb;
    R.nt = S.A[0].nt;
    std::vector<int> top(horizon + 1), bot(horizon);
    for (int k = 0; k <= horizon; ++k) {
        top[k] = R.size();
        for (auto& o : S.A[k].obj) R.obj.push_back(o);
    }
    for (int k = 0; k < horizon; ++k) {
        bot[k] = R.size();
        for (auto o : S.A[k].obj) {
            o.h -= 1;
            R.obj.push_back(o);
        }
    }
    int N = R.size();
    R.d = Mat(N, N);
    for (int k = 0; k <= horizon; ++k)
        for (int j = 0; j < S.A[k].size(); ++j)
            for (auto& [i, c] : S.A[k].d.col[j]) R.d.col[top[k] + j].emplace_back(top[k] + i, c);
    for (int k = 0; k < horizon; ++k) {
        if (S.f[k].dh != 0 || S.f[k].dq != 0) fail("NotAChainMap", "telescope maps must be degree 0");
        for (int j = 0; j < S.A[k].size(); ++j) {
            auto& col = R.d.col[bot[k] + j];
            col.emplace_back(top[k] + j, identity(S.A[k].obj[j].f));
            for (auto& [i, c] : S.f[k].m.col[j]) col.emplace_back(top[k + 1] + i, -c);
            for (auto& [i, c] : S.A[k].d.col[j]) col.emplace_back(bot[k] + i, -c);
            std::sort(col.begin(), col.end(), [](const Entry& u, const Entry& v) { return u.first < v.first; });
        }
    }
    return R;
}

}  // namespace khcob
