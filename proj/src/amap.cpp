#include "secext/amap.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include <fmt/format.h>

namespace secext {

ATable ATable::zero() {
    ATable t;
    t.synthesized_zero = true;
    t.maxdeg = 0;
    return t;
}

Steenrod ATable::lookup(uint32_t n, const RightGen& g) const {
    if (synthesized_zero) return Steenrod::zero();
    int deg = static_cast<int>(n) + g.degree();
    if (deg > maxdeg)
        throw DataError(fmt::format(
            "A-table does not cover A(Sq{}, {}): degree {} exceeds table maxdeg {}", n,
            to_string(g), deg, maxdeg));
    auto it = entries.find({n, g});
    return it == entries.end() ? Steenrod::zero() : it->second;
}

static std::string_view trim_sv(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

ATable load_atable(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot open A-table file '{}'", path));
    ATable t;
    bool have_maxdeg = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view s = trim_sv(line);
        if (s.empty() || s.front() == '#') continue;
        auto fail = [&](const std::string& why) -> DataError {
            return DataError(fmt::format("{}:{}: {}", path, lineno, why));
        };
        if (s.substr(0, 6) == "maxdeg") {
            if (have_maxdeg) throw fail("duplicate maxdeg line");
            std::string_view v = trim_sv(s.substr(6));
            int n = 0;
            if (v.empty()) throw fail("maxdeg needs a value");
            for (char ch : v) {
                if (ch < '0' || ch > '9') throw fail("bad maxdeg value");
                n = n * 10 + (ch - '0');
            }
            t.maxdeg = n;
            have_maxdeg = true;
            continue;
        }
        if (s.substr(0, 2) != "A " && s.substr(0, 2) != "A\t")
            throw fail(fmt::format("expected 'A Sq<n> <generator> = <element>', got '{}'", s));
        if (!have_maxdeg) throw fail("entry before maxdeg line");
        size_t eq = s.find('=');
        if (eq == std::string_view::npos) throw fail("missing '='");
        std::string_view lhs = trim_sv(s.substr(2, eq - 2));
        std::string_view rhs = trim_sv(s.substr(eq + 1));
        /* lhs is 'Sq<n> <generator>' */
        size_t sp = lhs.find_first_of(" \t");
        if (sp == std::string_view::npos) throw fail("expected 'Sq<n> <generator>' before '='");
        std::string_view sq = trim_sv(lhs.substr(0, sp));
        std::string_view gen = trim_sv(lhs.substr(sp + 1));
        Word w = parse_word(sq);
        if (w.size() != 1) throw fail(fmt::format("left slot must be a single Sq<n>, got '{}'", sq));
        uint32_t n = w[0];
        RightGen g = parse_right_gen(gen);
        int deg = static_cast<int>(n) + g.degree();
        if (deg > t.maxdeg)
            throw fail(fmt::format("entry degree {} exceeds maxdeg {}", deg, t.maxdeg));
        Steenrod val = parse_steenrod(rhs);
        if (!val.is_zero() && val.degree() != deg - 1)
            throw fail(fmt::format("value degree {} does not match n + |generator| - 1 = {}",
                                   val.degree(), deg - 1));
        std::string gname = to_string(g);
        auto [it, inserted] = t.entries.emplace(std::make_pair(n, std::move(g)), std::move(val));
        (void)it;
        if (!inserted) throw fail(fmt::format("duplicate entry A(Sq{}, {})", n, gname));
    }
    if (!have_maxdeg) throw DataError(fmt::format("{}: missing maxdeg line", path));
    return t;
}

void save_atable(const ATable& t, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError(fmt::format("cannot write A-table file '{}'", path));
    out << "maxdeg " << t.maxdeg << "\n";
    for (const auto& [key, val] : t.entries)
        out << fmt::format("A Sq{} {} = {}\n", key.first, to_string(key.second), to_string(val));
    if (!out) throw DataError(fmt::format("write failed for '{}'", path));
}

/* A(Sq^n, x) for x in the kernel: decompose and use right-linearity over
   the decomposition's right factors. */
static Steenrod eval_single(const ATable& t, uint32_t n, const B0Elt& x, DecStrategy strategy) {
    Steenrod acc;
    RDec dec = decompose_R(x, strategy);
    for (const RPart& p : dec.parts)
        acc += multiply(t.lookup(n, p.gen), project_pi(p.right));
    return acc;
}

namespace detail {

Steenrod eval_A_word(const ATable& t, const Word& a, const B0Elt& r, DecStrategy strategy) {
    if (a.empty() || r.is_zero()) return Steenrod::zero();
    if (a.size() == 1) return eval_single(t, a[0], r, strategy);
    /* A(Sq^n w, r) = A(Sq^n, chi(pi(w)) r) + Sq^n A(w, r). */
    Word rest(a.begin() + 1, a.end());
    B0Elt u = multiply(lift_chi(adem_reduce(rest)), r);
    Steenrod out = eval_single(t, a[0], u, strategy);
    out += act_word(Word{a[0]}, eval_A_word(t, rest, r, strategy));
    return out;
}

}  // namespace detail

static Steenrod eval_full(const ATable& t, const Steenrod& a, const B0Elt& r,
                          DecStrategy strategy) {
    Steenrod acc;
    for (const Word& w : a.terms) acc += detail::eval_A_word(t, w, r, strategy);
    return acc;
}

Steenrod eval_A(const ATable& t, const Steenrod& a, const B0Elt& r, EvalMode mode) {
    Steenrod first = eval_full(t, a, r, DecStrategy::FirstWord);
    if (mode == EvalMode::Strict) {
        Steenrod second = eval_full(t, a, r, DecStrategy::LastWord);
        if (!(first == second))
            throw DataError(fmt::format(
                "A-table is not right-linear: A({}, {}) evaluates to {} and {} under different "
                "kernel decompositions",
                to_string(a), to_string(r), to_string(first), to_string(second)));
    }
    return first;
}

AmapReport validate_atable(const ATable& t, int degree_cap, uint64_t seed, int samples) {
    AmapReport rep;
    std::mt19937_64 rng(seed);
    int cap = degree_cap;
    if (!t.synthesized_zero) cap = std::min(cap, t.maxdeg);
    if (cap < 3) return rep;

    auto rand_int = [&](int lo, int hi) {
        return lo + static_cast<int>(rng() % static_cast<uint64_t>(hi - lo + 1));
    };

    for (int i = 0; i < samples; ++i) {
        /* Right-linearity: A(Sq^n, g * b) == A(Sq^n, g) * pi(b). */
        int n = rand_int(1, std::max(1, cap / 2));
        int dg = rand_int(0, cap - n);
        const auto& gens = right_generators(dg);
        if (!gens.empty()) {
            const RightGen& g = gens[static_cast<size_t>(rng() % gens.size())];
            int room = cap - n - dg;
            Word b;
            int used = 0;
            int len = rand_int(0, 2);
            for (int j = 0; j < len && used < room; ++j) {
                uint32_t e = static_cast<uint32_t>(rand_int(1, std::min(4, room - used)));
                b.push_back(e);
                used += static_cast<int>(e);
            }
            B0Elt prod = multiply(g.expand(), B0Elt::of_word(b, 1));
            Steenrod lhs = eval_single(t, static_cast<uint32_t>(n), prod,
                                       (i & 1) ? DecStrategy::LastWord : DecStrategy::FirstWord);
            Steenrod rhs = multiply(t.lookup(static_cast<uint32_t>(n), g), adem_reduce(b));
            ++rep.checked;
            if (!(lhs == rhs))
                rep.failures.push_back(fmt::format(
                    "right rule: A(Sq{}, {} * {}) = {} but A(Sq{}, {}) * pi({}) = {}", n,
                    to_string(g), word_str(b), to_string(lhs), n, to_string(g), word_str(b),
                    to_string(rhs)));
        }

        /* Left representative independence: evaluating on the word Sq^c Sq^d
           (inadmissible) must agree with evaluating on its admissible form. */
        int d2 = rand_int(1, std::max(1, cap / 3));
        int c2hi = std::min(2 * d2 - 1, cap - d2 - 2);
        if (c2hi < 1) continue;
        int c2 = rand_int(1, c2hi);
        int dg2 = rand_int(0, cap - c2 - d2);
        const auto& gens2 = right_generators(dg2);
        if (gens2.empty()) continue;
        const RightGen& g2 = gens2[static_cast<size_t>(rng() % gens2.size())];
        B0Elt rx = g2.expand();
        Word cw{static_cast<uint32_t>(c2), static_cast<uint32_t>(d2)};
        Steenrod lhs = detail::eval_A_word(t, cw, rx, DecStrategy::FirstWord);
        Steenrod rhs;
        for (const Word& w : adem_reduce(cw).terms)
            rhs += detail::eval_A_word(t, w, rx, DecStrategy::FirstWord);
        ++rep.checked;
        if (!(lhs == rhs))
            rep.failures.push_back(
                fmt::format("left rule: A({}, {}) = {} but A({}, {}) = {}", word_str(cw),
                            to_string(g2), to_string(lhs), to_string(adem_reduce(cw)),
                            to_string(g2), to_string(rhs)));
    }
    return rep;
}

}  // namespace secext
