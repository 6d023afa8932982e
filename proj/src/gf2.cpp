#include "secext/gf2.hpp"

#include <algorithm>
#include <bit>
#include <utility>

namespace secext {

void F2Matrix::swap_rows(int a, int b) {
    if (a == b) return;
    uint64_t* ra = row(a);
    uint64_t* rb = row(b);
    for (int k = 0; k < stride; ++k) std::swap(ra[k], rb[k]);
}

F2Vector F2Matrix::row_vec(int r) const {
    F2Vector v(cols);
    const uint64_t* s = row(r);
    for (int k = 0; k < stride; ++k) v.w[k] = s[k];
    return v;
}

void F2Matrix::set_row(int r, const F2Vector& v) {
    uint64_t* d = row(r);
    for (int k = 0; k < stride; ++k) d[k] = v.w[k];
}

RrefResult rref(F2Matrix& m) {
    RrefResult res;
    int r = 0;
    for (int c = 0; c < m.cols && r < m.rows; ++c) {
        int p = -1;
        for (int i = r; i < m.rows; ++i)
            if (m.get(i, c)) {
                p = i;
                break;
            }
        if (p < 0) continue;
        m.swap_rows(p, r);
        for (int i = 0; i < m.rows; ++i)
            if (i != r && m.get(i, c)) m.xor_rows(i, r);
        res.pivots.push_back(c);
        ++r;
    }
    res.rank = r;
    return res;
}

int rank(F2Matrix m) { return rref(m).rank; }

F2Matrix transpose(const F2Matrix& m) {
    F2Matrix t(m.cols, m.rows);
    for (int r = 0; r < m.rows; ++r) {
        const uint64_t* src = m.row(r);
        for (int k = 0; k < m.stride; ++k) {
            uint64_t x = src[k];
            while (x) {
                int b = std::countr_zero(x);
                x &= x - 1;
                t.set(k * 64 + b, r, true);
            }
        }
    }
    return t;
}

F2Vector mat_vec(const F2Matrix& m, const F2Vector& x) {
    F2Vector y(m.rows);
    for (int r = 0; r < m.rows; ++r) {
        uint64_t acc = 0;
        const uint64_t* row = m.row(r);
        for (int k = 0; k < m.stride; ++k) acc ^= row[k] & x.w[k];
        y.set(r, std::popcount(acc) & 1);
    }
    return y;
}

SolveResult solve(const F2Matrix& m, const F2Vector& rhs) {
    /* Augment with rhs as a final column; pivots on that column flag
       inconsistency because columns are processed in ascending order. */
    F2Matrix aug(m.rows, m.cols + 1);
    for (int r = 0; r < m.rows; ++r) {
        const uint64_t* s = m.row(r);
        uint64_t* d = aug.row(r);
        for (int k = 0; k < m.stride; ++k) d[k] = s[k];
        if (rhs.get(r)) aug.set(r, m.cols, true);
    }
    RrefResult rr = rref(aug);

    SolveResult out;
    out.consistent = rr.pivots.empty() || rr.pivots.back() < m.cols;
    std::vector<int> apivs;  // pivots within the coefficient block
    for (int p : rr.pivots)
        if (p < m.cols) apivs.push_back(p);

    if (out.consistent) {
        out.x = F2Vector(m.cols);
        for (size_t i = 0; i < apivs.size(); ++i)
            if (aug.get(static_cast<int>(i), m.cols)) out.x.set(apivs[i], true);
    }

    std::vector<bool> is_piv(m.cols, false);
    for (int p : apivs) is_piv[p] = true;
    for (int f = 0; f < m.cols; ++f) {
        if (is_piv[f]) continue;
        F2Vector v(m.cols);
        v.set(f, true);
        for (size_t i = 0; i < apivs.size(); ++i)
            if (aug.get(static_cast<int>(i), f)) v.set(apivs[i], true);
        out.kernel.push_back(std::move(v));
    }
    return out;
}

std::vector<F2Vector> kernel_basis(const F2Matrix& m) {
    F2Matrix a = m;
    RrefResult rr = rref(a);
    std::vector<bool> is_piv(m.cols, false);
    for (int p : rr.pivots) is_piv[p] = true;

    std::vector<F2Vector> out;
    for (int f = 0; f < m.cols; ++f) {
        if (is_piv[f]) continue;
        F2Vector v(m.cols);
        v.set(f, true);
        for (size_t i = 0; i < rr.pivots.size(); ++i)
            if (a.get(static_cast<int>(i), f)) v.set(rr.pivots[i], true);
        out.push_back(std::move(v));
    }
    return out;
}

F2Vector F2Span::reduce(F2Vector v) const {
    for (size_t i = 0; i < rows.size(); ++i)
        if (v.get(pivs[i])) v.xor_in(rows[i]);
    return v;
}

bool F2Span::insert(F2Vector v) {
    v = reduce(std::move(v));
    if (v.is_zero()) return false;
    int p = -1;
    for (int i = 0; i < v.n && p < 0; ++i)
        if (v.get(i)) p = i;
    size_t at = 0;
    while (at < pivs.size() && pivs[at] < p) ++at;
    rows.insert(rows.begin() + at, std::move(v));
    pivs.insert(pivs.begin() + at, p);
    return true;
}

/* ---- Z/4 ---- */

void Z4Vec::add_scaled(const Z4Vec& o, z4_t c) {
    c = static_cast<z4_t>(c & 3);
    if (c == 0) return;
    size_t nw = lo.size();
    if (c & 1) {  // this += o
        for (size_t k = 0; k < nw; ++k) {
            uint64_t carry = lo[k] & o.lo[k];
            lo[k] ^= o.lo[k];
            hi[k] ^= o.hi[k] ^ carry;
        }
    }
    if (c & 2) {  // this += 2*o  (2*o has planes lo=0, hi=o.lo)
        for (size_t k = 0; k < nw; ++k) hi[k] ^= o.lo[k];
    }
}

void Z4Vec::scale(z4_t c) {
    c = static_cast<z4_t>(c & 3);
    size_t nw = lo.size();
    switch (c) {
        case 0:
            std::fill(lo.begin(), lo.end(), 0);
            std::fill(hi.begin(), hi.end(), 0);
            break;
        case 1:
            break;
        case 2:
            for (size_t k = 0; k < nw; ++k) {
                hi[k] = lo[k];
                lo[k] = 0;
            }
            break;
        case 3:  // 3x = x + 2x
            for (size_t k = 0; k < nw; ++k) hi[k] ^= lo[k];
            break;
    }
}

bool Z4Vec::is_zero() const {
    for (size_t k = 0; k < lo.size(); ++k)
        if (lo[k] | hi[k]) return false;
    return true;
}

int Z4Vec::leading() const {
    for (size_t k = 0; k < lo.size(); ++k) {
        uint64_t nz = lo[k] | hi[k];
        if (nz) return static_cast<int>(k * 64 + std::countr_zero(nz));
    }
    return -1;
}

void Z4Span::insert(Z4Vec v) {
    while (true) {
        int l = v.leading();
        if (l < 0) return;
        size_t idx = 0;
        bool found = false;
        /* rows sorted by pivot; binary search */
        size_t lo_i = 0, hi_i = pivs.size();
        while (lo_i < hi_i) {
            size_t mid = (lo_i + hi_i) / 2;
            if (pivs[mid] < l)
                lo_i = mid + 1;
            else
                hi_i = mid;
        }
        idx = lo_i;
        found = idx < pivs.size() && pivs[idx] == l;

        if (!found) {
            z4_t a = v.get(l);
            if (a == 3) v.scale(3);  // normalize odd pivot to 1
            a = v.get(l);
            rows.insert(rows.begin() + idx, v);
            pivs.insert(pivs.begin() + idx, l);
            size_log2 += (a == 2) ? 1 : 2;
            Z4Vec w = v;
            w.scale(2);
            insert(std::move(w));  // Howell closure
            return;
        }

        z4_t a = v.get(l);
        z4_t pr = rows[idx].get(l);  // 1 or 2 by construction
        if (pr == 1) {
            v.add_scaled(rows[idx], z4_neg(a));
        } else if ((a & 1) == 0) {
            v.add_scaled(rows[idx], z4_neg(static_cast<z4_t>(a >> 1)));
        } else {
            /* odd entry beats a 2-pivot row: swap them */
            Z4Vec old = rows[idx];
            rows.erase(rows.begin() + idx);
            pivs.erase(pivs.begin() + idx);
            size_log2 -= 1;
            if (a == 3) v.scale(3);
            rows.insert(rows.begin() + idx, v);
            pivs.insert(pivs.begin() + idx, l);
            size_log2 += 2;
            Z4Vec w = v;
            w.scale(2);
            insert(std::move(w));
            insert(std::move(old));
            return;
        }
    }
}

bool Z4Span::contains(Z4Vec v) const {
    while (true) {
        int l = v.leading();
        if (l < 0) return true;
        size_t lo_i = 0, hi_i = pivs.size();
        while (lo_i < hi_i) {
            size_t mid = (lo_i + hi_i) / 2;
            if (pivs[mid] < l)
                lo_i = mid + 1;
            else
                hi_i = mid;
        }
        if (lo_i >= pivs.size() || pivs[lo_i] != l) return false;
        z4_t a = v.get(l);
        z4_t pr = rows[lo_i].get(l);
        if (pr == 1)
            v.add_scaled(rows[lo_i], z4_neg(a));
        else if ((a & 1) == 0)
            v.add_scaled(rows[lo_i], z4_neg(static_cast<z4_t>(a >> 1)));
        else
            return false;
    }
}

}  // namespace secext
