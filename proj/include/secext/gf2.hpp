#pragma once

#include <cstdint>
#include <vector>

#include "secext/base.hpp"

namespace secext {

/* ---- Z/4 scalar helpers ----------------------------------------------
   pi : Z/4 -> F2 is reduction mod 2, chi : F2 -> Z/4 is the set-theoretic
   section 0 -> 0, 1 -> 1, and i : F2 = 2*(Z/4) embeds onto the 2-torsion. */
using z4_t = uint8_t;

inline z4_t z4_add(z4_t a, z4_t b) { return static_cast<z4_t>((a + b) & 3); }
inline z4_t z4_neg(z4_t a) { return static_cast<z4_t>((4 - a) & 3); }
inline z4_t z4_mul(z4_t a, z4_t b) { return static_cast<z4_t>((a * b) & 3); }
inline int z4_pi(z4_t a) { return a & 1; }
inline z4_t z4_chi(int f2) { return static_cast<z4_t>(f2 & 1); }
inline z4_t z4_i(int f2) { return static_cast<z4_t>((f2 & 1) ? 2 : 0); }

/* ---- bit-packed F2 vectors and matrices ------------------------------ */

struct F2Vector {
    int n = 0;
    std::vector<uint64_t> w;

    F2Vector() = default;
    explicit F2Vector(int n_) : n(n_), w((static_cast<size_t>(n_) + 63) / 64, 0) {}

    bool get(int i) const { return (w[static_cast<size_t>(i) >> 6] >> (i & 63)) & 1u; }
    void set(int i, bool v = true) {
        uint64_t m = uint64_t(1) << (i & 63);
        if (v)
            w[static_cast<size_t>(i) >> 6] |= m;
        else
            w[static_cast<size_t>(i) >> 6] &= ~m;
    }
    void flip(int i) { w[static_cast<size_t>(i) >> 6] ^= uint64_t(1) << (i & 63); }
    void xor_in(const F2Vector& o) {
        for (size_t k = 0; k < w.size(); ++k) w[k] ^= o.w[k];
    }
    bool is_zero() const {
        for (uint64_t x : w)
            if (x) return false;
        return true;
    }
    bool operator==(const F2Vector&) const = default;
};

/* Row-major, bit-packed. Rows are contiguous runs of `stride` limbs. */
struct F2Matrix {
    int rows = 0, cols = 0, stride = 0;
    std::vector<uint64_t> bits;

    F2Matrix() = default;
    F2Matrix(int r, int c)
        : rows(r), cols(c), stride((c + 63) / 64), bits(static_cast<size_t>(r) * stride, 0) {}

    uint64_t* row(int r) { return bits.data() + static_cast<size_t>(r) * stride; }
    const uint64_t* row(int r) const { return bits.data() + static_cast<size_t>(r) * stride; }

    bool get(int r, int c) const { return (row(r)[c >> 6] >> (c & 63)) & 1u; }
    void set(int r, int c, bool v = true) {
        uint64_t m = uint64_t(1) << (c & 63);
        if (v)
            row(r)[c >> 6] |= m;
        else
            row(r)[c >> 6] &= ~m;
    }
    void xor_rows(int dst, int src) {
        uint64_t* d = row(dst);
        const uint64_t* s = row(src);
        for (int k = 0; k < stride; ++k) d[k] ^= s[k];
    }
    void swap_rows(int a, int b);
    F2Vector row_vec(int r) const;
    void set_row(int r, const F2Vector& v);
    bool operator==(const F2Matrix&) const = default;
};

struct RrefResult {
    int rank = 0;
    std::vector<int> pivots;  // strictly increasing column indices
};

/* In-place reduced row echelon form; deterministic lowest-column pivoting
   (first nonzero row in scan order at the lowest open column). */
RrefResult rref(F2Matrix& m);

int rank(F2Matrix m);
F2Matrix transpose(const F2Matrix& m);
F2Vector mat_vec(const F2Matrix& m, const F2Vector& x);

struct SolveResult {
    bool consistent = false;
    F2Vector x;                     // particular solution, free variables = 0
    std::vector<F2Vector> kernel;   // deterministic order by free-column index
};

/* Solve m·x = rhs over F2. rhs length must equal m.rows. */
SolveResult solve(const F2Matrix& m, const F2Vector& rhs);

/* Basis of ker(m); deterministic order by free-column index. */
std::vector<F2Vector> kernel_basis(const F2Matrix& m);

/* Incremental F2 row span (echelon accumulator) used for image/complement
   bookkeeping in the resolution builder. */
struct F2Span {
    int n = 0;
    std::vector<F2Vector> rows;  // each with a unique pivot, sorted ascending
    std::vector<int> pivs;

    explicit F2Span(int n_ = 0) : n(n_) {}
    int dim() const { return static_cast<int>(rows.size()); }
    /* Reduce v against the span; returns the residue (zero iff v in span). */
    F2Vector reduce(F2Vector v) const;
    /* Insert v; returns true if it enlarged the span. */
    bool insert(F2Vector v);
};

/* ---- Z/4 vectors (bit-sliced) and Howell-style row spans --------------
   Entries are held as two bit planes: value = lo + 2*hi. Addition mod 4 is
   carried out with word-parallel half-adder logic. Used by the secondary
   exactness checker, where graded pieces are finite Z/4-modules. */

struct Z4Vec {
    int n = 0;
    std::vector<uint64_t> lo, hi;

    Z4Vec() = default;
    explicit Z4Vec(int n_)
        : n(n_), lo((static_cast<size_t>(n_) + 63) / 64, 0), hi((static_cast<size_t>(n_) + 63) / 64, 0) {}

    z4_t get(int i) const {
        size_t k = static_cast<size_t>(i) >> 6;
        int s = i & 63;
        return static_cast<z4_t>(((lo[k] >> s) & 1u) | (((hi[k] >> s) & 1u) << 1));
    }
    void set(int i, z4_t v) {
        size_t k = static_cast<size_t>(i) >> 6;
        uint64_t m = uint64_t(1) << (i & 63);
        lo[k] = (lo[k] & ~m) | ((v & 1u) ? m : 0);
        hi[k] = (hi[k] & ~m) | ((v & 2u) ? m : 0);
    }
    void add(int i, z4_t v) { set(i, z4_add(get(i), v)); }
    /* this += c * o (mod 4), elementwise. */
    void add_scaled(const Z4Vec& o, z4_t c);
    void scale(z4_t c);
    bool is_zero() const;
    int leading() const;  // lowest index with nonzero entry, or -1
    bool operator==(const Z4Vec&) const = default;
};

/* Row span of a finite Z/4-module given by generators, with Howell-style
   closure so that membership is decidable by forward reduction and
   log2 of the number of elements is the sum over pivot rows
   (unit pivot -> 2 bits, pivot 2 -> 1 bit). */
struct Z4Span {
    int n = 0;
    std::vector<Z4Vec> rows;   // sorted by pivot column
    std::vector<int> pivs;
    int size_log2 = 0;

    explicit Z4Span(int n_ = 0) : n(n_) {}
    void insert(Z4Vec v);
    bool contains(Z4Vec v) const;
};

}  // namespace secext
