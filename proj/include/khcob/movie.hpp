#pragma once
// Movies of tangle diagrams given as piece lists, and the chain maps they induce.
//
// Each step replaces a window [a, b) of the current piece list by new pieces and
// records a local map between the window complexes, in both time directions.  The
// global map is the local one glued with identities on the untouched pieces.

#include <memory>
#include <vector>

#include "khr2.hpp"

namespace khcob {

struct MovieStep {
    int a = 0, b = 0;  // window of the state before the step
    int nrep = 0;      // number of pieces that replace it
    std::shared_ptr<const Complex> sw, tw;
    Map fwd, bwd;
};

inline std::shared_ptr<const Complex> pad_complex(int w) {
    return std::make_shared<const Complex>(from_flat(pad_flat(w)));
}

// phi : Zs -> Zt with l strands added on the left and r on the right.
inline Map pad_map(const Map& phi, const Complex& Zs, const Complex& Zt, int l, int r) {
    Complex L = from_flat(pad_flat(l)), R = from_flat(pad_flat(r));
    return glue_maps({&L, &Zs, &R}, {&L, &Zt, &R}, {nullptr, &phi, nullptr},
                     juxtapose_spec({{l, l}, {Zs.nb, Zs.nt}, {r, r}}));
}

inline Complex pad_complex_lr(const Complex& Z, int l, int r) {
    Complex L = from_flat(pad_flat(l)), R = from_flat(pad_flat(r));
    return glue_complexes({&L, &Z, &R}, juxtapose_spec({{l, l}, {Z.nb, Z.nt}, {r, r}}));
}

class Movie {
public:
    explicit Movie(std::vector<Piece> start) {
        if (start.empty()) fail("BadSlice", "movie needs a nonempty diagram");
        for (auto& p : start) p.full();
        states_.push_back(std::move(start));
    }

    const std::vector<Piece>& state() const { return states_.back(); }
    const std::vector<Piece>& initial() const { return states_.front(); }
    int size() const { return (int)steps_.size(); }
    const MovieStep& step(int s) const { return steps_[s]; }

    // Width of the level just below piece a.
    int width_at(int a) const {
        auto& ps = state();
        return a < (int)ps.size() ? ps[a].wb : ps.back().wt();
    }

    // Far commutation of pieces i and i+1.
    void commute(int i) {
        auto& ps = state();
        if (i < 0 || i + 1 >= (int)ps.size()) fail("BadMovie", "commute index out of range");
        const Piece &A = ps[i], &B = ps[i + 1];
        Piece A2, B2;
        if (B.left >= A.left + A.cnt()) {
            B2 = B.moved(B.left - A.cnt() + A.cnb(), A.wb);
            A2 = A.moved(A.left, B2.wt());
        } else if (B.left + B.cnb() <= A.left) {
            B2 = B.moved(B.left, A.wb);
            A2 = A.moved(A.left - B.cnb() + B.cnt(), B2.wt());
        } else {
            fail("BadMovie", "pieces are not far apart");
        }
        auto sw = std::make_shared<const Complex>(raw_complex({A, B}));
        auto tw = std::make_shared<const Complex>(raw_complex({B2, A2}));
        int na = A.full().size(), nb = B.full().size();
        Map f{Mat(tw->size(), sw->size()), 0, 0}, g{Mat(sw->size(), tw->size()), 0, 0};
        for (int xa = 0; xa < na; ++xa)
            for (int xb = 0; xb < nb; ++xb) {
                int s = xa * nb + xb, t = xb * na + xa;
                const Obj &os = sw->obj[s], &ot = tw->obj[t];
                if (os.h != ot.h || os.q != ot.q) fail("Internal", "commuted objects differ", ErrClass::Logic);
                Q sg = (A.full().obj[xa].h * B.full().obj[xb].h) % 2 ? Q(-1) : Q(1);
                f.m.col[s].emplace_back(t, scaled(isotopy(os.f, ot.f), sg));
                g.m.col[t].emplace_back(s, scaled(isotopy(ot.f, os.f), sg));
            }
        push(i, i + 2, {B2, A2}, sw, tw, std::move(f), std::move(g));
    }

    // Move piece `from` to index `to` by far commutations.
    void bubble(int from, int to) {
        while (from < to) commute(from++);
        while (from > to) commute(--from);
    }

    // Replace a window whose complex simplifies to a single crossingless picture.
    void reduce(int a, int b, std::vector<Piece> repl) {
        auto& ps = state();
        int w = width_at(a);
        auto sw = window(a, b);
        auto tw = repl.empty() ? pad_complex(w) : std::make_shared<const Complex>(raw_complex(repl));
        auto [D, r] = simplify(*sw, {false, true});
        if (D.size() != 1 || tw->size() != 1 || !same_picture(D.obj[0].f, tw->obj[0].f))
            fail("BadMovie", "window does not reduce to the replacement");
        const Obj &od = D.obj[0], &ot = tw->obj[0];
        Map iso{Mat(1, 1), ot.h - od.h, ot.q - od.q}, inv{Mat(1, 1), od.h - ot.h, od.q - ot.q};
        iso.m.col[0].emplace_back(0, isotopy(od.f, ot.f));
        inv.m.col[0].emplace_back(0, isotopy(ot.f, od.f));
        (void)ps;
        push(a, b, std::move(repl), sw, tw, map_compose(iso, r.p), map_compose(r.i, inv));
    }

    // Saddle creating Cap(pos) Cup(pos) just below piece a.
    void saddle(int a, int pos) {
        int w = width_at(a);
        std::vector<Piece> repl{make_piece(SliceKind::Cap, w, pos), make_piece(SliceKind::Cup, w - 2, pos)};
        auto sw = pad_complex(w);
        auto tw = std::make_shared<const Complex>(raw_complex(repl));
        FlatId s = sw->obj[0].f, t = tw->obj[0].f;
        Map f{Mat(1, 1), 0, basis_degree(s, t, 0)}, g{Mat(1, 1), 0, basis_degree(t, s, 0)};
        f.m.col[0].emplace_back(0, basis_cob(s, t, 0));
        g.m.col[0].emplace_back(0, basis_cob(t, s, 0));
        push(a, a, std::move(repl), sw, tw, std::move(f), std::move(g));
    }

    // Cap off the loops of a crossingless window.  Backwards it is a birth, dotted
    // on every new loop when requested.
    void death(int a, int b, bool dotted_birth = false) {
        int w = width_at(a);
        if (width_at(b) != w) fail("BadMovie", "death window changes width");
        auto sw = window(a, b);
        if (sw->size() != 1) fail("BadMovie", "death window has crossings");
        std::vector<Piece> repl;
        if (a == 0 && b == (int)state().size()) repl.push_back(make_box(w, 0, pad_complex(w)));
        auto tw = repl.empty() ? pad_complex(w) : std::make_shared<const Complex>(raw_complex(repl));
        FlatId s = sw->obj[0].f, t = tw->obj[0].f;
        if (!same_picture(drop_loops(s), t)) fail("BadMovie", "death window is not loops plus identity");
        const auto& ci = circles(t, s);
        uint64_t m = 0;
        if (dotted_birth)
            for (int i = 0; i < ci.lb; ++i) m |= 1ull << (ci.nbnd + ci.la + i);
        int q = tw->obj[0].q - sw->obj[0].q;
        Map f{Mat(1, 1), 0, basis_degree(s, t, 0) + q}, g{Mat(1, 1), 0, basis_degree(t, s, m) - q};
        f.m.col[0].emplace_back(0, basis_cob(s, t, 0));
        g.m.col[0].emplace_back(0, basis_cob(t, s, m));
        push(a, b, std::move(repl), sw, tw, std::move(f), std::move(g));
    }

    // Birth of a crossingless window `repl` containing loops, inserted below piece a.
    void birth(int a, std::vector<Piece> repl, bool dotted = false) {
        int w = width_at(a);
        auto sw = pad_complex(w);
        auto tw = std::make_shared<const Complex>(raw_complex(repl));
        if (tw->size() != 1) fail("BadMovie", "birth window has crossings");
        FlatId s = sw->obj[0].f, t = tw->obj[0].f;
        if (!same_picture(drop_loops(t), s)) fail("BadMovie", "birth window is not loops plus identity");
        const auto& ci = circles(s, t);
        uint64_t m = 0;
        if (dotted)
            for (int i = 0; i < ci.lb; ++i) m |= 1ull << (ci.nbnd + ci.la + i);
        int q = tw->obj[0].q;
        Map f{Mat(1, 1), 0, basis_degree(s, t, m) + q}, g{Mat(1, 1), 0, basis_degree(t, s, 0) - q};
        f.m.col[0].emplace_back(0, basis_cob(s, t, m));
        g.m.col[0].emplace_back(0, basis_cob(t, s, 0));
        push(a, a, std::move(repl), sw, tw, std::move(f), std::move(g));
    }

    // Replace box piece a (core Z) by pieces E drawn at the width of Z, whose
    // stacked complex is raw; f : Z -> raw and g : raw -> Z.
    void replace_box(int a, const std::vector<Piece>& E, const Complex& raw, const Map& f, const Map& g) {
        const Piece& B = state().at(a);
        if (B.kind != SliceKind::Box) fail("BadMovie", "not a box");
        int l = B.left, r = B.right();
        B.full();
        auto sw = B.full_;
        auto tw = std::make_shared<const Complex>(pad_complex_lr(raw, l, r));
        std::vector<Piece> repl;
        for (auto& p : E) repl.push_back(p.moved(p.left + l, p.wb + l + r));
        Map F = f.m.cols ? pad_map(f, *B.core, raw, l, r) : Map{};
        Map G = g.m.cols ? pad_map(g, raw, *B.core, l, r) : Map{};
        push(a, a + 1, std::move(repl), sw, tw, std::move(F), std::move(G));
    }

    // A dot on the strand at position pos of the level below piece a.
    void dot(int a, int pos) {
        int w = width_at(a);
        auto sw = pad_complex(w);
        FlatId s = sw->obj[0].f;
        Map f{Mat(1, 1), 0, 2};
        f.m.col[0].emplace_back(0, apply_dot(identity(s), pos));
        Map g = f;
        push(a, a, {}, sw, sw, std::move(f), std::move(g));
    }

    // X : K -> raw(initial) becomes K -> raw(final).
    Map run_forward(Map X) const {
        for (int s = 0; s < size(); ++s) X = apply(s, true, X);
        return X;
    }
    // X : K -> raw(final) becomes K -> raw(initial), along the reversed movie.
    Map run_backward(Map X) const {
        for (int s = size() - 1; s >= 0; --s) X = apply(s, false, X);
        return X;
    }

private:
    std::vector<std::vector<Piece>> states_;
    std::vector<MovieStep> steps_;

    std::shared_ptr<const Complex> window(int a, int b) const {
        auto& ps = state();
        if (a < 0 || b > (int)ps.size() || a > b) fail("BadMovie", "window out of range");
        if (a == b) return pad_complex(width_at(a));
        return std::make_shared<const Complex>(raw_complex(std::vector<Piece>(ps.begin() + a, ps.begin() + b)));
    }

    void push(int a, int b, std::vector<Piece> repl, std::shared_ptr<const Complex> sw,
              std::shared_ptr<const Complex> tw, Map f, Map g) {
        std::vector<Piece> next(state().begin(), state().begin() + a);
        for (auto& p : repl) {
            p.full();
            next.push_back(p);
        }
        next.insert(next.end(), state().begin() + b, state().end());
        if (next.empty()) fail("BadMovie", "movie emptied the diagram");
        MovieStep st;
        st.a = a;
        st.b = b;
        st.nrep = (int)repl.size();
        st.sw = std::move(sw);
        st.tw = std::move(tw);
        st.fwd = std::move(f);
        st.bwd = std::move(g);
        steps_.push_back(std::move(st));
        states_.push_back(std::move(next));
    }

    // Factors of a state with its window grouped into one complex.
    static void factors(const std::vector<Piece>& ps, int a, int b, const Complex* win, int wa, int wb,
                        std::vector<const Complex*>& cs, std::vector<std::pair<int, int>>& sz) {
        for (int k = 0; k < a; ++k) {
            cs.push_back(&ps[k].full());
            sz.push_back({ps[k].wb, ps[k].wt()});
        }
        cs.push_back(win);
        sz.push_back({wa, wb});
        for (int k = b; k < (int)ps.size(); ++k) {
            cs.push_back(&ps[k].full());
            sz.push_back({ps[k].wb, ps[k].wt()});
        }
    }

    Map apply(int s, bool fw, const Map& X) const {
        const MovieStep& st = steps_[s];
        const auto &P0 = states_[s], &P1 = states_[s + 1];
        int wa = st.sw->nb, wb = st.sw->nt;
        std::vector<const Complex*> c0, c1;
        std::vector<std::pair<int, int>> z0, z1;
        factors(P0, st.a, st.b, st.sw.get(), wa, wb, c0, z0);
        factors(P1, st.a, st.a + st.nrep, st.tw.get(), wa, wb, c1, z1);
        size_t pos = st.a;
        std::vector<const Map*> fs(c0.size(), nullptr);
        fs[pos] = fw ? &st.fwd : &st.bwd;
        if (!fs[pos]->m.cols) fail("BadMovie", "step has no map in this direction");
        auto& src = fw ? c0 : c1;
        auto& tgt = fw ? c1 : c0;
        std::vector<char> need(X.m.rows, 0);
        for (auto& c : X.m.col)
            for (auto& e : c) need[e.first] = 1;
        Map M = glue_maps(src, tgt, fs, stack_spec(fw ? z0 : z1), &need);
        return map_compose(M, X);
    }
};

}  // namespace khcob
