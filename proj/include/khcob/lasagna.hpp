#pragma once
// Blackboard cables of slice diagrams and lasagna modules of 2-handlebodies
// along the unknot and the Hopf link.

#include <string>
#include <vector>

#include "cabling.hpp"

namespace khcob {

// Per traced component: r- strands against the component orientation and r+
// along it.
struct CableIndex {
    std::vector<std::pair<int, int>> r;
};

// Replaces every component by r- + r+ blackboard parallels. Parallels are
// counted from the left of the direction of travel; the first r- of them are
// reversed. Kinks in the input become twists of the cable.
inline SliceDiagram cable(const SliceDiagram& D, const CableIndex& idx) {
    Traced T = trace(D);
    if ((int)idx.r.size() != T.ncomp) fail("BadIndex", "cable index needs one entry per component");
    for (auto [a, b] : idx.r)
        if (a < 0 || b < 0) fail("BadIndex", "negative cable width");
    auto wid = [&](int c) { return idx.r[c].first + idx.r[c].second; };
    auto w = D.widths();
    int L = (int)D.s.size();
    auto comp_at = [&](int l, int i) { return T.seg_comp[T.off[l] + i]; };
    auto start = [&](int l, int i) {
        int P = 0;
        for (int j = 0; j < i; ++j) P += wid(comp_at(l, j));
        return P;
    };
    SliceDiagram N;
    N.nb = start(0, w[0]);
    std::vector<int> major{0};
    for (int l = 0; l < L; ++l) {
        const auto& x = D.s[l];
        if (x.kind == SliceKind::Cup) {
            int P = start(l, x.pos), r = wid(comp_at(l + 1, x.pos));
            for (int j = 0; j < r; ++j) N.s.push_back({SliceKind::Cup, P + j});
        } else if (x.kind == SliceKind::Cap) {
            int P = start(l, x.pos), r = wid(comp_at(l, x.pos));
            for (int j = r - 1; j >= 0; --j) N.s.push_back({SliceKind::Cap, P + j});
        } else {
            int P = start(l, x.pos), ra = wid(comp_at(l, x.pos)), rb = wid(comp_at(l, x.pos + 1));
            for (int i = ra - 1; i >= 0; --i)
                for (int j = 0; j < rb; ++j) N.s.push_back({SliceKind::Cross, P + i + j, x.sign});
        }
        major.push_back((int)N.s.size());
    }
    // orientations: compare the default tracing with the wanted direction
    Traced U = trace(N);
    N.flip.assign(U.ncomp, 0);
    std::vector<char> done(U.ncomp, 0);
    for (int l = 0; l <= L; ++l) {
        int P = 0;
        for (int i = 0; i < w[l]; ++i) {
            int c = comp_at(l, i), r = wid(c), d = T.seg_dir[T.off[l] + i];
            for (int j = 0; j < r; ++j) {
                int s = U.off[major[l]] + P + j, cn = U.seg_comp[s];
                if (done[cn]) continue;
                done[cn] = 1;
                int t = d > 0 ? j : r - 1 - j;
                int want = t < idx.r[c].first ? -d : d;
                N.flip[cn] = U.seg_dir[s] != want;
            }
            P += r;
        }
    }
    return N;
}

// ---------------------------------------------------------------------------
// 2-handlebodies along framed unknots and Hopf links.

struct TwoHandleLink {
    std::string kind;  // "unknot" or "hopf"
    std::vector<int> framing;

    int components() const { return (int)framing.size(); }
    // Standard diagram: the unknot as a closed strand, the Hopf link as the
    // closure of s1^2, with kinks realizing the framings.
    SliceDiagram diagram() const {
        SliceDiagram D = kind == "unknot" ? close_diagram(braid_diagram(1, {})) : close_diagram(braid_diagram(2, {1, 1}));
        for (int c = 0; c < components(); ++c) D = set_framing(D, c, framing[c]);
        return D;
    }
};

// unknot<f>, hopf<f1><f2> with single-digit framings (a leading '-' per
// digit allowed), e.g. unknot0, hopf00, hopf10, hopf-10.
inline TwoHandleLink two_handle_preset(const std::string& name) {
    TwoHandleLink L;
    std::string rest;
    if (name.rfind("unknot", 0) == 0) {
        L.kind = "unknot";
        rest = name.substr(6);
    } else if (name.rfind("hopf", 0) == 0) {
        L.kind = "hopf";
        rest = name.substr(4);
    } else {
        fail("ParseError", "unknown 2-handle preset '" + name + "'", ErrClass::Parse);
    }
    for (size_t i = 0; i < rest.size(); ++i) {
        int s = 1;
        if (rest[i] == '-') {
            s = -1;
            ++i;
        }
        if (i >= rest.size() || !std::isdigit((unsigned char)rest[i])) fail("ParseError", "bad framing in '" + name + "'", ErrClass::Parse);
        L.framing.push_back(s * (rest[i] - '0'));
    }
    int want = L.kind == "unknot" ? 1 : 2;
    if (L.framing.empty()) L.framing.assign(want, 0);
    if ((int)L.framing.size() != want) fail("ParseError", "wrong number of framings in '" + name + "'", ErrClass::Parse);
    return L;
}

// n1 = r- + r+ parallel strands of a framed arc: the blackboard cable of an
// arc with `framing` kinks, r- of them oriented downward.
inline Complex framed_cable_block(int rminus, int rplus, int framing) {
    int n = rminus + rplus;
    if (n == 0) return identity_complex(0);
    SliceDiagram A = braid_diagram(1, {});
    A = add_kinks(A, 0, framing);
    SliceDiagram C = cable(A, CableIndex{{{rminus, rplus}}});
    return simplify(bracket(C), {false, false}).first;
}

// Iterated colimit: the 0-framed component acts as belts around the cable of
// the other one. An outer node whose inner colimit vanishes makes every
// composite out of it zero, so when outer node horizon-1 vanishes the outer
// colimit is stable at zero and later outer nodes are never built.
inline ColimitReport lasagna_2handle(const TwoHandleLink& L, const std::vector<int>& alpha, int horizon) {
    if ((int)alpha.size() != L.components()) fail("BadIndex", "one level per component");
    if (horizon < 1) fail("BadHorizon", "horizon must be at least 1");
    if (L.kind == "unknot") {
        if (L.framing[0] != 0) fail("Unsupported", "only the 0-framed unknot is materialized", ErrClass::Resource);
        return lasagna_s2xb2(0, alpha[0], horizon);
    }
    int in = L.framing[1] == 0 ? 1 : L.framing[0] == 0 ? 0 : -1;
    if (in < 0) fail("Unsupported", "the Hopf link needs a 0-framed component", ErrClass::Resource);
    int out = 1 - in;
    int ao = horizon - 1, A = alpha[out];
    int rminus = ao - std::min(0, A), rplus = ao + std::max(0, A);
    int n1 = rminus + rplus;
    if (n1 > 3) fail("ResourceExceeded", "outer cable wider than 3 strands", ErrClass::Resource);
    BeltTower T(n1, framed_cable_block(rminus, rplus, L.framing[out]));
    BeltSystemOptions opt;
    opt.down = rminus;
    ColimitReport inner = colimit(belt_system(T, alpha[in], horizon, opt));
    bool zero = inner.all_stable();
    for (auto& [b, e] : inner.table)
        if (e.dim) zero = false;
    if (!zero)
        fail("Unsupported", "outer cabling maps are materialized only when an outer node vanishes",
             ErrClass::Resource);
    ColimitReport R;
    R.horizon = horizon;
    R.normalization = inner.normalization;
    int qn = -2 * ao - std::abs(A);
    for (auto& [b, e] : inner.table) R.table[{b.first, b.second + qn}] = ColimitEntry{0, true, horizon - 1};
    R.node_dims = inner.node_dims;
    R.note = "outer node " + std::to_string(ao) + " (" + std::to_string(n1) +
             " strands) has zero inner colimit; outer nodes beyond it not materialized";
    if (!inner.note.empty()) R.note += "; inner: " + inner.note;
    return R;
}

}  // namespace khcob
