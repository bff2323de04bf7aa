#pragma once
// Dense exact linear algebra over Q, and graded linear maps.

#include <map>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace khcob {

struct QMat {
    int r = 0, c = 0;
    std::vector<Q> a;

    QMat() = default;
    QMat(int rows, int cols) : r(rows), c(cols), a((size_t)rows * cols) {}
    Q& operator()(int i, int j) { return a[(size_t)i * c + j]; }
    const Q& operator()(int i, int j) const { return a[(size_t)i * c + j]; }

    static QMat identity(int n) {
        QMat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }
    bool operator==(const QMat& o) const { return r == o.r && c == o.c && a == o.a; }
    bool is_zero() const {
        for (auto& x : a)
            if (sgn(x) != 0) return false;
        return true;
    }
};

inline QMat operator*(const QMat& A, const QMat& B) {
    if (A.c != B.r) fail("DomainMismatch", "matrix product sizes");
    QMat R(A.r, B.c);
    for (int i = 0; i < A.r; ++i)
        for (int k = 0; k < A.c; ++k) {
            const Q& x = A(i, k);
            if (sgn(x) == 0) continue;
            for (int j = 0; j < B.c; ++j)
                if (sgn(B(k, j)) != 0) R(i, j) += x * B(k, j);
        }
    return R;
}

inline QMat operator+(QMat A, const QMat& B) {
    if (A.r != B.r || A.c != B.c) fail("DomainMismatch", "matrix sum sizes");
    for (size_t i = 0; i < A.a.size(); ++i) A.a[i] += B.a[i];
    return A;
}

inline QMat operator-(QMat A, const QMat& B) {
    if (A.r != B.r || A.c != B.c) fail("DomainMismatch", "matrix difference sizes");
    for (size_t i = 0; i < A.a.size(); ++i) A.a[i] -= B.a[i];
    return A;
}

inline QMat scaled(QMat A, const Q& s) {
    for (auto& x : A.a) x *= s;
    return A;
}

inline QMat transpose(const QMat& A) {
    QMat R(A.c, A.r);
    for (int i = 0; i < A.r; ++i)
        for (int j = 0; j < A.c; ++j) R(j, i) = A(i, j);
    return R;
}

// Reduced row echelon form in place; returns pivot columns.
inline std::vector<int> rref(QMat& M) {
    std::vector<int> piv;
    int row = 0;
    for (int col = 0; col < M.c && row < M.r; ++col) {
        int p = -1;
        for (int i = row; i < M.r; ++i)
            if (sgn(M(i, col)) != 0) {
                p = i;
                break;
            }
        if (p < 0) continue;
        if (p != row)
            for (int j = 0; j < M.c; ++j) std::swap(M(p, j), M(row, j));
        Q inv = 1 / M(row, col);
        for (int j = col; j < M.c; ++j) M(row, j) *= inv;
        for (int i = 0; i < M.r; ++i) {
            if (i == row || sgn(M(i, col)) == 0) continue;
            Q f = M(i, col);
            for (int j = col; j < M.c; ++j)
                if (sgn(M(row, j)) != 0) M(i, j) -= f * M(row, j);
        }
        piv.push_back(col);
        ++row;
    }
    return piv;
}

inline int rank(QMat M) { return (int)rref(M).size(); }

// Columns span the kernel.
inline QMat kernel(QMat M) {
    int n = M.c;
    auto piv = rref(M);
    std::vector<char> isp(n, 0);
    for (int p : piv) isp[p] = 1;
    std::vector<int> fr;
    for (int j = 0; j < n; ++j)
        if (!isp[j]) fr.push_back(j);
    QMat K(n, (int)fr.size());
    for (size_t f = 0; f < fr.size(); ++f) {
        K(fr[f], (int)f) = 1;
        for (size_t i = 0; i < piv.size(); ++i) K(piv[i], (int)f) = -M((int)i, fr[f]);
    }
    return K;
}

// Columns form a basis of the column span.
inline QMat column_basis(const QMat& M) {
    QMat t = M;
    auto piv = rref(t);
    QMat B(M.r, (int)piv.size());
    for (size_t k = 0; k < piv.size(); ++k)
        for (int i = 0; i < M.r; ++i) B(i, (int)k) = M(i, piv[k]);
    return B;
}

inline QMat hcat(const QMat& A, const QMat& B) {
    if (A.r != B.r) fail("DomainMismatch", "hcat rows");
    QMat R(A.r, A.c + B.c);
    for (int i = 0; i < A.r; ++i) {
        for (int j = 0; j < A.c; ++j) R(i, j) = A(i, j);
        for (int j = 0; j < B.c; ++j) R(i, A.c + j) = B(i, j);
    }
    return R;
}

// Bidegree (h, q).
using Bideg = std::pair<int, int>;

struct GradedDims {
    std::map<Bideg, long> d;
    std::string convention = "KhR2";

    long total() const {
        long t = 0;
        for (auto& [k, v] : d) t += v;
        return t;
    }
    long at(int h, int q) const {
        auto it = d.find({h, q});
        return it == d.end() ? 0 : it->second;
    }
    void add(int h, int q, long v) {
        if (!v) return;
        d[{h, q}] += v;
        if (d[{h, q}] == 0) d.erase({h, q});
    }
    bool operator==(const GradedDims& o) const { return d == o.d; }
};

inline GradedDims shifted(const GradedDims& g, int dh, int dq) {
    GradedDims r;
    r.convention = g.convention;
    for (auto& [k, v] : g.d) r.add(k.first + dh, k.second + dq, v);
    return r;
}

inline GradedDims negated(const GradedDims& g) {
    GradedDims r;
    r.convention = g.convention;
    for (auto& [k, v] : g.d) r.add(-k.first, -k.second, v);
    return r;
}

// Linear map between graded spaces, stored per source bidegree.
struct GradedLinearMap {
    GradedDims src, tgt;
    int dh = 0, dq = 0;
    std::map<Bideg, QMat> block;  // block[b] : tgt(b + (dh,dq)) x src(b)

    QMat at(Bideg b) const {
        auto it = block.find(b);
        if (it != block.end()) return it->second;
        return QMat((int)tgt.at(b.first + dh, b.second + dq), (int)src.at(b.first, b.second));
    }
};

inline GradedLinearMap compose(const GradedLinearMap& g, const GradedLinearMap& f) {
    if (!(f.tgt == g.src)) fail("DomainMismatch", "graded map composition");
    GradedLinearMap r;
    r.src = f.src;
    r.tgt = g.tgt;
    r.dh = f.dh + g.dh;
    r.dq = f.dq + g.dq;
    for (auto& [b, v] : f.src.d) r.block[b] = g.at({b.first + f.dh, b.second + f.dq}) * f.at(b);
    return r;
}

inline GradedLinearMap identity_map(const GradedDims& s) {
    GradedLinearMap r;
    r.src = r.tgt = s;
    for (auto& [b, v] : s.d) r.block[b] = QMat::identity((int)v);
    return r;
}

inline bool map_eq(const GradedLinearMap& f, const GradedLinearMap& g) {
    if (!(f.src == g.src) || !(f.tgt == g.tgt)) return false;
    for (auto& [b, v] : f.src.d) {
        if (f.tgt.at(b.first + f.dh, b.second + f.dq) == 0 && g.tgt.at(b.first + g.dh, b.second + g.dq) == 0)
            continue;
        if (f.dh != g.dh || f.dq != g.dq) return false;
        if (!(f.at(b) == g.at(b))) return false;
    }
    return true;
}

inline bool map_is_zero(const GradedLinearMap& f) {
    for (auto& [b, m] : f.block)
        if (!m.is_zero()) return false;
    return true;
}

inline GradedLinearMap map_sub(const GradedLinearMap& f, const GradedLinearMap& g) {
    if (!(f.src == g.src) || !(f.tgt == g.tgt) || f.dh != g.dh || f.dq != g.dq)
        fail("DomainMismatch", "graded map difference");
    GradedLinearMap r = f;
    for (auto& [b, v] : f.src.d) r.block[b] = f.at(b) - g.at(b);
    return r;
}

}  // namespace khcob
