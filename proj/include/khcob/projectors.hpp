#pragma once
// Truncated Jones-Wenzl projectors, duals, and window-certified checks of
// their closures.

#include <climits>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "cabling.hpp"

namespace khcob {

// Homological window [lo, hi]; INT_MIN / INT_MAX mean unbounded.
struct Window {
    int lo = INT_MIN, hi = INT_MAX;
    bool contains(int h) const { return h >= lo && h <= hi; }
    bool empty() const { return lo > hi; }
    std::string str() const {
        auto f = [](int v) { return v == INT_MIN ? std::string("-inf") : v == INT_MAX ? std::string("inf") : std::to_string(v); };
        return "[" + f(lo) + "," + f(hi) + "]";
    }
};

inline Window intersect(const Window& a, const Window& b) { return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)}; }

inline int through_degree(FlatId f) {
    const auto& F = flat(f);
    int t = 0;
    for (int p = 0; p < F.nb; ++p)
        if (F.pr[p] >= F.nb) ++t;
    return t;
}

inline int lowest_h(const Complex& C) {
    int lo = 0;
    for (auto& o : C.obj) lo = std::min(lo, o.h);
    return lo;
}

inline std::map<int, std::map<int, long>> rows_of(const GradedDims& g) {
    std::map<int, std::map<int, long>> r;
    for (auto& [b, v] : g.d) r[b.first][b.second] = v;
    return r;
}

// Window of a table truncated below: rows at distance >= 2n above the
// truncation boundary, on which the m and m-1 tables agree, contiguous from
// the top down.
inline Window lower_window(const GradedDims& cur, const GradedDims& prev, int boundary, int n) {
    auto a = rows_of(cur), b = rows_of(prev);
    int top = 0;
    if (!a.empty()) top = std::max(top, a.rbegin()->first);
    if (!b.empty()) top = std::max(top, b.rbegin()->first);
    int floor = boundary + 2 * n;
    int lo = top + 1;
    for (int h = top; h >= floor; --h) {
        auto ia = a.find(h), ib = b.find(h);
        bool ea = ia == a.end(), eb = ib == b.end();
        if (ea != eb || (!ea && ia->second != ib->second)) break;
        lo = h;
    }
    return {lo, INT_MAX};
}

// ---------------------------------------------------------------------------

struct TruncatedProjector {
    int n = 0, m = 0;
    Complex complex;
    GradedDims closure;  // homology of the closure
    Window window;       // homological range where it agrees with P_n
};

inline void projector_guard(int n, int m) {
    if (n < 1 || m < 0) fail("BadIndex", "projector needs n >= 1, m >= 1");
    if (n > 3 || m > 4) fail("ResourceExceeded", "truncated projectors limited to n <= 3, m <= 4", ErrClass::Resource);
}

// Simplified bracket of FT_n^m; m = 0 is the identity.
inline Complex full_twist_complex(int n, int m) {
    if (m == 0 || n == 1) return identity_complex(n);
    return simplify(bracket(full_twist(n, m)), {false, false}).first;
}

inline const TruncatedProjector& truncated_projector(int n, int m) {
    projector_guard(n, m);
    if (m < 1) fail("BadIndex", "projector needs m >= 1");
    static std::mutex mu;
    static std::map<std::pair<int, int>, TruncatedProjector> memo;
    {
        std::lock_guard<std::mutex> lk(mu);
        auto it = memo.find({n, m});
        if (it != memo.end()) return it->second;
    }
    TruncatedProjector P;
    P.n = n;
    P.m = m;
    P.complex = full_twist_complex(n, m);
    int ids = 0;
    for (auto& o : P.complex.obj)
        if (through_degree(o.f) == n) {
            ++ids;
            if (o.h != 0 || o.q != 0) fail("Internal", "identity object away from (0,0)", ErrClass::Logic);
        }
    if (ids != 1) fail("Internal", "identity object appears " + std::to_string(ids) + " times", ErrClass::Logic);
    P.closure = close_homology(P.complex).dims;
    if (n == 1) {
        P.window = {};
    } else {
        GradedDims prev = close_homology(full_twist_complex(n, m - 1)).dims;
        P.window = lower_window(P.closure, prev, -n * (n - 1) * m, n);
    }
    std::lock_guard<std::mutex> lk(mu);
    return memo.emplace(std::make_pair(n, m), std::move(P)).first->second;
}

// ---------------------------------------------------------------------------
// Duals: reflect top to bottom, negate both gradings, transpose.

inline int flip_point(int nb, int nt, int p) { return p < nb ? nt + p : p - nb; }

inline FlatId dual_flat(FlatId id) {
    const auto& F = flat(id);
    FlatData G;
    G.nb = F.nt;
    G.nt = F.nb;
    int N = F.npts();
    G.pr.assign(N, -1);
    G.key.assign(N, 0);
    for (int p = 0; p < N; ++p) {
        int fp = flip_point(F.nb, F.nt, p);
        G.pr[fp] = flip_point(F.nb, F.nt, F.pr[p]);
        G.key[fp] = F.key[p];
    }
    G.lkey = F.lkey;
    return intern(std::move(G));
}

// s -> t becomes dual(t) -> dual(s).
inline Cob dual_cob(const Cob& c) {
    FlatId s2 = dual_flat(c.t), t2 = dual_flat(c.s);
    Cob r{s2, t2, {}};
    if (c.zero()) return r;
    const auto& A = circles(c.s, c.t);
    const auto& B = circles(s2, t2);
    const auto& S = flat(c.s);
    std::vector<int> where(A.C);
    std::vector<int> rep(A.nbnd, -1);
    for (int p = 0; p < S.npts(); ++p)
        if (rep[A.pt[p]] < 0) rep[A.pt[p]] = p;
    for (int i = 0; i < A.nbnd; ++i) where[i] = B.pt[flip_point(S.nb, S.nt, rep[i])];
    for (int j = 0; j < A.la; ++j) where[A.nbnd + j] = B.nbnd + B.la + j;
    for (int j = 0; j < A.lb; ++j) where[A.nbnd + A.la + j] = B.nbnd + j;
    for (auto& t : c.terms) {
        uint64_t m = 0;
        for (int i = 0; i < A.C; ++i)
            if (t.m >> i & 1) m |= 1ull << where[i];
        r.terms.push_back({m, t.c});
    }
    normalize_terms(r.terms);
    return r;
}

inline Complex dualize(const Complex& C) {
    Complex D;
    D.nb = C.nt;
    D.nt = C.nb;
    int N = C.size();
    for (auto& o : C.obj) D.obj.push_back({dual_flat(o.f), -o.h, -o.q});
    D.d = Mat(N, N);
    std::vector<std::vector<Entry>> cols(N);
    for (int j = 0; j < N; ++j)
        for (auto& [i, c] : C.d.col[j]) cols[i].emplace_back(j, dual_cob(c));
    for (int i = 0; i < N; ++i) {
        std::sort(cols[i].begin(), cols[i].end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
        D.d.col[i] = std::move(cols[i]);
    }
    return D;
}

// ---------------------------------------------------------------------------
// Reports.

struct CheckReport {
    bool ok = true;
    Window window;
    int compared = 0;  // certified bidegrees compared (rows x q-degrees)
    GradedDims actual, predicted;
    std::vector<std::string> mismatches;
    std::string note;

    std::string summary() const {
        std::ostringstream os;
        os << (ok ? "ok" : "FAIL") << " window " << window.str() << " compared " << compared;
        if (!note.empty()) os << " (" << note << ")";
        for (auto& s : mismatches) os << "; " << s;
        return os.str();
    }
};

// Compare two tables on the rows accepted by `row_ok`.
template <class F>
inline void compare_rows(CheckReport& R, const GradedDims& actual, const GradedDims& want, F row_ok) {
    std::set<Bideg> keys;
    for (auto& [b, v] : actual.d) keys.insert(b);
    for (auto& [b, v] : want.d) keys.insert(b);
    for (auto& b : keys) {
        if (!row_ok(b.first)) continue;
        ++R.compared;
        if (actual.at(b.first, b.second) != want.at(b.first, b.second)) {
            R.ok = false;
            R.mismatches.push_back("(" + std::to_string(b.first) + "," + std::to_string(b.second) + ") got " +
                                   std::to_string(actual.at(b.first, b.second)) + " want " +
                                   std::to_string(want.at(b.first, b.second)));
        }
    }
}

inline long binom(int k, int i) {
    long r = 1;
    for (int j = 1; j <= i; ++j) r = r * (k - i + j) / j;
    return r;
}

// Homology of close(P ⊗ T^k) against the sum over i of binom(k, i) copies
// (one copy each when symmetrized) of close(P) shifted by h^{-2ni} q^{(2n+2)i-k}.
inline CheckReport belt_split_check(int n, int k, int m, bool symmetrized = false) {
    if (k < 0) fail("BadIndex", "negative belt count");
    if (k > 4 || (n >= 2 && k > 2)) fail("ResourceExceeded", "belt split check limited to small k", ErrClass::Resource);
    CheckReport R;
    Window pw;
    GradedDims ptab;
    Complex base;
    if (n == 1) {
        base = identity_complex(1);
        ptab = close_homology(base).dims;
    } else {
        const auto& P = truncated_projector(n, m);
        base = P.complex;
        ptab = P.closure;
        pw = P.window;
    }
    auto table = [&](const Complex& b) {
        BeltTower T(n, b);
        if (!symmetrized) return T.H(k).dims;
        return symmetrizer(T.swaps(k), T.H(k).dims).dims;
    };
    R.actual = table(base);
    Window aw;
    if (n >= 2) {
        GradedDims prev = table(full_twist_complex(n, m - 1));
        aw = lower_window(R.actual, prev, -n * (n - 1) * m - 2 * n * k, n);
    }
    R.window = aw;
    for (int i = 0; i <= k; ++i) {
        long c = symmetrized ? 1 : binom(k, i);
        GradedDims s = shifted(ptab, -2 * n * i, (2 * n + 2) * i - k);
        for (auto& [b, v] : s.d) R.predicted.add(b.first, b.second, c * v);
    }
    // a row is usable when every contributing copy reads P inside its window
    compare_rows(R, R.actual, R.predicted, [&](int h) {
        if (!aw.contains(h)) return false;
        for (int i = 0; i <= k; ++i)
            if (!pw.contains(h + 2 * n * i)) return false;
        return true;
    });
    if (R.compared == 0) {
        R.ok = false;
        R.note = "no certified bidegrees";
    }
    return R;
}

enum class Absorb { Sigma, SigmaInv, Tau };

inline Complex absorb_piece(int n, Absorb a, int i) {
    if (i < 1 || i >= n) fail("BadIndex", "generator index out of range");
    if (a == Absorb::Tau) {
        std::vector<std::pair<int, int>> pr;
        for (int j = 0; j < n; ++j)
            if (j != i - 1 && j != i) pr.push_back({j, n + j});
        pr.push_back({i - 1, i});
        pr.push_back({n + i - 1, n + i});
        return from_flat(make_matching(n, n, pr));
    }
    return bracket(braid_diagram(n, {a == Absorb::Sigma ? i : -i}));
}

// close(FT^m ⊗ x) against close(FT^m) (or against 0 for a turnback) in the
// shared window.
inline CheckReport crossing_absorption_check(int n, int m, Absorb a, int i = 1) {
    if (n != 2 && n != 3) fail("BadIndex", "crossing absorption needs n = 2 or 3");
    const auto& P = truncated_projector(n, m);
    Complex X = absorb_piece(n, a, i);
    auto table = [&](const Complex& B) { return close_homology(simplify(stack(B, X), {false, false}).first).dims; };
    CheckReport R;
    R.actual = table(P.complex);
    GradedDims prev = table(full_twist_complex(n, m - 1));
    Window qw = lower_window(R.actual, prev, -n * (n - 1) * m + std::min(0, lowest_h(X)), n);
    R.window = a == Absorb::Tau ? qw : intersect(qw, P.window);
    if (a != Absorb::Tau) R.predicted = P.closure;
    compare_rows(R, R.actual, R.predicted, [&](int h) { return R.window.contains(h); });
    if (R.window.empty() || R.window.lo > 0) {
        R.ok = false;
        R.note = "empty window";
    }
    return R;
}

// close(FT^m ⊗ FT^m) against close(FT^m).
inline CheckReport idempotence_check(int n, int m) {
    if (n != 2 && n != 3) fail("BadIndex", "idempotence check needs n = 2 or 3");
    const auto& P = truncated_projector(n, m);
    auto table = [&](const Complex& B) { return close_homology(simplify(stack(B, B), {false, false}).first).dims; };
    CheckReport R;
    R.actual = table(P.complex);
    GradedDims prev = table(full_twist_complex(n, m - 1));
    R.window = intersect(lower_window(R.actual, prev, -2 * n * (n - 1) * m, n), P.window);
    R.predicted = P.closure;
    compare_rows(R, R.actual, R.predicted, [&](int h) { return R.window.contains(h); });
    if (R.window.empty() || R.window.lo > 0) {
        R.ok = false;
        R.note = "empty window";
    }
    return R;
}

// ---------------------------------------------------------------------------
// Two-strand through-degree-0 piece: the cone of the projection from the
// dual projector onto its identity object.

struct RozanskyTrunc {
    int m = 0;
    Complex complex;
    Window window;
};

inline RozanskyTrunc rozansky_projector_trunc(int m) {
    if (m < 1 || m > 3) fail("ResourceExceeded", "rozansky_projector_trunc needs 1 <= m <= 3", ErrClass::Resource);
    const auto& P = truncated_projector(2, m);
    Complex D = dualize(P.complex);
    Complex one = from_flat(id_flat(2));
    Map pi;
    pi.m = Mat(1, D.size());
    int found = 0;
    for (int j = 0; j < D.size(); ++j)
        if (through_degree(D.obj[j].f) == 2) {
            pi.m.col[j].emplace_back(0, isotopy(D.obj[j].f, one.obj[0].f));
            ++found;
        }
    if (found != 1) fail("Internal", "dual projector has no unique identity object", ErrClass::Logic);
    RozanskyTrunc R;
    R.m = m;
    R.complex = simplify(cone(D, one, pi), {false, false}).first;
    // D sits one degree down inside the cone; the identity summand is exact
    R.window = Window{INT_MIN, -P.window.lo - 1};
    return R;
}

}  // namespace khcob
