#include "secext/pairmod.hpp"

#include <fmt/format.h>

namespace secext {

static void add_r(std::map<Generator, B0Elt>& m, const Generator& k, const B0Elt& v) {
    if (v.is_zero()) return;
    auto [it, inserted] = m.emplace(k, v);
    if (!inserted) {
        it->second += v;
        if (it->second.is_zero()) m.erase(it);
    }
}

static void pair_add(PairElt& x, const PairElt& y) {
    for (const auto& [k, rho] : y.r_part) add_r(x.r_part, k, rho);
    x.a_part += y.a_part;
}

/* Left action of a tensor-algebra coefficient on a pair element: the
   kernel component multiplies through, the suspended component picks up
   the A-correction of the kernel component. */
static PairElt left_act(const B0Elt& b, const PairElt& p, const ATable& atable) {
    PairElt out;
    for (const auto& [k, rho] : p.r_part) add_r(out.r_part, k, multiply(b, rho));
    Steenrod pib = project_pi(b);
    if (!pib.is_zero()) {
        out.a_part += act(pib, p.a_part);
        for (const auto& [k, rho] : p.r_part) out.a_part.add(k, eval_A(atable, pib, rho));
    }
    return out;
}

static PairElt apply_H(const SecondaryComplex& cx, const ATable& atable, const FreeEltB& x) {
    PairElt out;
    for (const auto& [g, b] : x.terms) {
        auto it = cx.H.find(g);
        if (it == cx.H.end())
            throw DataError(fmt::format("no stored secondary value for {}", to_string(g)));
        pair_add(out, left_act(b, it->second, atable));
    }
    return out;
}

/* Right action of the lifted differential on pair coefficients:
   (r, a) k |-> sum_j (r chi(c_j), a c_j) over d(k) = sum c_j j. */
static PairElt apply_d1(const Resolution& res, const PairElt& p) {
    PairElt out;
    for (const auto& [k, rho] : p.r_part) {
        if (k.m == 0) continue;
        for (const auto& [j, c] : res.diff_of(k).terms) add_r(out.r_part, j, multiply(rho, lift_chi(c)));
    }
    out.a_part = res.apply_diff(p.a_part);
    return out;
}

SecondaryComplex assemble(const Resolution& res, const DeltaTable& table) {
    if (!table.ok())
        throw InconsistentError(
            fmt::format("cannot assemble: the solve was inconsistent at {} ({})",
                        to_string(*table.inconsistent), table.inconsistent_detail));
    SecondaryComplex cx;
    cx.max_filt = res.max_filt;
    cx.solved_through = table.solved_through;
    for (int m = 2; m <= res.max_filt; ++m)
        for (const Generator& g : res.gens[static_cast<size_t>(m)]) {
            if (g.d > table.solved_through) continue;
            auto it = table.delta.find(g);
            if (it == table.delta.end())
                throw DataError(
                    fmt::format("table has no secondary value for {}", to_string(g)));
            PairElt h;
            for (const DDTerm& term : double_diff(res, g)) h.r_part.emplace(term.g, term.r);
            h.a_part = it->second;
            cx.H.emplace(g, std::move(h));
        }
    return cx;
}

PairReport check_identities(const Resolution& res, const SecondaryComplex& cx,
                            const ATable& atable) {
    PairReport rep;
    for (const auto& [g, h] : cx.H) {
        FreeEltB fresh = apply_lifted_diff(res, lifted_diff(res, g));
        ++rep.checked_bottom;
        if (!(fresh.terms == h.r_part))
            rep.failures.push_back(fmt::format(
                "bottom identity fails at {}: composite of lifted differentials differs from "
                "the stored kernel component",
                to_string(g)));
        if (g.m >= 3) {
            PairElt lhs = apply_H(cx, atable, lifted_diff(res, g));
            PairElt rhs = apply_d1(res, h);
            ++rep.checked_ladder;
            if (!(lhs == rhs))
                rep.failures.push_back(fmt::format(
                    "ladder identity fails at {}: H(d0 {}) != d1(H {})", to_string(g),
                    to_string(g), to_string(g)));
        }
    }
    return rep;
}

/* ---- total complex ---------------------------------------------------- */

namespace {
struct TotalElt {
    FreeEltB b;  // position-n component over the tensor algebra
    PairElt p;   // position n-1 pair component
    bool is_zero() const { return b.is_zero() && p.r_part.empty() && p.a_part.is_zero(); }
};

struct TotalBasis {
    int n = 0, t = 0;
    int size = 0;
    std::map<Generator, int> b_start, r_start, a_start;
};
}  // namespace

static TotalElt apply_D(const Resolution& res, const SecondaryComplex& cx, const ATable& atable,
                        const TotalElt& x) {
    TotalElt out;
    out.b = apply_lifted_diff(res, x.b);
    for (const auto& [k, rho] : x.p.r_part) {  // minus the boundary of the pair part
        B0Elt neg = rho;
        neg.scale(3);
        out.b.add(k, neg);
    }
    out.p = apply_H(cx, atable, x.b);
    PairElt d1 = apply_d1(res, x.p);
    for (auto& [k, rho] : d1.r_part) {
        rho.scale(3);
        add_r(out.p.r_part, k, rho);
    }
    out.p.a_part += d1.a_part;
    return out;
}

static TotalBasis total_basis(const Resolution& res, int n, int t) {
    TotalBasis tb;
    tb.n = n;
    tb.t = t;
    if (n >= 0 && n < static_cast<int>(res.gens.size()))
        for (const Generator& g : res.gens[static_cast<size_t>(n)]) {
            if (g.d > t) continue;
            tb.b_start.emplace(g, tb.size);
            tb.size += static_cast<int>(all_words(t - g.d).size());
        }
    if (n >= 1 && n - 1 < static_cast<int>(res.gens.size())) {
        for (const Generator& k : res.gens[static_cast<size_t>(n - 1)]) {
            if (k.d > t) continue;
            tb.r_start.emplace(k, tb.size);
            tb.size += static_cast<int>(all_words(t - k.d).size());
        }
        for (const Generator& k : res.gens[static_cast<size_t>(n - 1)]) {
            if (k.d > t - 1) continue;
            tb.a_start.emplace(k, tb.size);
            tb.size += admissible_dim(t - k.d - 1);
        }
    }
    return tb;
}

static Z4Vec total_coords(const TotalElt& x, const TotalBasis& tb) {
    Z4Vec v(tb.size);
    for (const auto& [g, c] : x.b.terms) {
        int base = tb.b_start.at(g);
        for (const auto& [w, coef] : c.terms) v.set(base + word_index(tb.t - g.d, w), coef);
    }
    for (const auto& [k, rho] : x.p.r_part) {
        int base = tb.r_start.at(k);
        for (const auto& [w, coef] : rho.terms) v.set(base + word_index(tb.t - k.d, w), coef);
    }
    for (const auto& [k, c] : x.p.a_part.terms) {
        int base = tb.a_start.at(k);
        /* suspended component: F2 values embedded as multiples of 2 */
        for (const Word& u : c.terms) v.set(base + admissible_index(tb.t - k.d - 1, u), 2);
    }
    return v;
}

static std::vector<TotalElt> module_generators(const Resolution& res, int n, int t) {
    std::vector<TotalElt> out;
    if (n >= 0 && n < static_cast<int>(res.gens.size()))
        for (const Generator& g : res.gens[static_cast<size_t>(n)]) {
            if (g.d > t) continue;
            for (const Word& w : all_words(t - g.d)) {
                TotalElt e;
                e.b.add(g, B0Elt::of_word(w, 1));
                out.push_back(std::move(e));
            }
        }
    if (n >= 1 && n - 1 < static_cast<int>(res.gens.size())) {
        for (const Generator& k : res.gens[static_cast<size_t>(n - 1)]) {
            if (k.d > t) continue;
            for (const Word& w : all_words(t - k.d)) {
                if (!word_admissible(w)) {
                    /* w - chi(admissible expansion of w): a kernel element */
                    B0Elt r = B0Elt::of_word(w, 1);
                    B0Elt lift = lift_chi(adem_reduce(w));
                    lift.scale(3);
                    r += lift;
                    TotalElt e;
                    add_r(e.p.r_part, k, r);
                    out.push_back(std::move(e));
                }
                TotalElt e2;
                add_r(e2.p.r_part, k, B0Elt::of_word(w, 2));
                out.push_back(std::move(e2));
            }
        }
        for (const Generator& k : res.gens[static_cast<size_t>(n - 1)]) {
            if (k.d > t - 1) continue;
            for (const Word& u : admissible_basis(t - k.d - 1)) {
                TotalElt e;
                e.p.a_part.add(k, Steenrod::of_word(u));
                out.push_back(std::move(e));
            }
        }
    }
    return out;
}

static int log2_module_size(const Resolution& res, int n, int t) {
    int acc = 0;
    if (n >= 0 && n < static_cast<int>(res.gens.size()))
        for (const Generator& g : res.gens[static_cast<size_t>(n)])
            if (g.d <= t) acc += 2 * static_cast<int>(all_words(t - g.d).size());
    if (n >= 1 && n - 1 < static_cast<int>(res.gens.size()))
        for (const Generator& k : res.gens[static_cast<size_t>(n - 1)]) {
            if (k.d <= t)
                acc += 2 * static_cast<int>(all_words(t - k.d).size()) -
                       admissible_dim(t - k.d);
            if (k.d <= t - 1) acc += admissible_dim(t - k.d - 1);
        }
    return acc;
}

ExactReport check_secondary_exactness(const Resolution& res, const SecondaryComplex& cx,
                                      const ATable& atable, int m_min, int m_max, int d_min,
                                      int d_max) {
    ExactReport rep;
    for (int n = m_min; n <= m_max; ++n)
        for (int t = d_min; t <= d_max; ++t) {
            if (n < 2) {
                rep.skipped.push_back(fmt::format(
                    "position ({}, {}): touches the augmentation, not modeled", n, t));
                continue;
            }
            if (n + 1 > res.max_filt) {
                rep.skipped.push_back(fmt::format(
                    "position ({}, {}): filtration frontier, image from {} unknown", n, t, n + 1));
                continue;
            }
            if (t > cx.solved_through || t > res.max_deg) {
                rep.skipped.push_back(
                    fmt::format("position ({}, {}): beyond the solved degree {}", n, t,
                                std::min(cx.solved_through, res.max_deg)));
                continue;
            }

            TotalBasis b_out = total_basis(res, n - 1, t);
            TotalBasis b_here = total_basis(res, n, t);

            Z4Span im_out(b_out.size);
            bool composite_zero = true;
            for (const TotalElt& e : module_generators(res, n, t))
                im_out.insert(total_coords(apply_D(res, cx, atable, e), b_out));
            Z4Span im_in(b_here.size);
            for (const TotalElt& e : module_generators(res, n + 1, t)) {
                TotalElt de = apply_D(res, cx, atable, e);
                if (!apply_D(res, cx, atable, de).is_zero()) composite_zero = false;
                im_in.insert(total_coords(de, b_here));
            }

            ExactPosition pos;
            pos.n = n;
            pos.t = t;
            pos.log2_module = log2_module_size(res, n, t);
            pos.log2_in = im_in.size_log2;
            pos.log2_out = im_out.size_log2;
            pos.composite_zero = composite_zero;
            pos.exact = (pos.log2_module == pos.log2_in + pos.log2_out);
            rep.positions.push_back(pos);
            if (!composite_zero)
                rep.failures.push_back(fmt::format(
                    "composite of total differentials nonzero into position ({}, {})", n, t));
            if (!pos.exact)
                rep.failures.push_back(fmt::format(
                    "total complex not exact at position ({}, {}): log2 sizes {} != {} + {}", n,
                    t, pos.log2_module, pos.log2_in, pos.log2_out));
        }
    return rep;
}

}  // namespace secext
