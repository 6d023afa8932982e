#include "secext/bzero.hpp"

#include <algorithm>
#include <mutex>

#include <fmt/format.h>

namespace secext {

B0Elt B0Elt::of_word(Word w, z4_t c) {
    B0Elt r;
    if (c & 3) r.terms.emplace(std::move(w), static_cast<z4_t>(c & 3));
    return r;
}

int B0Elt::degree() const {
    if (terms.empty()) return -1;
    int d = word_degree(terms.begin()->first);
    for (const auto& [w, c] : terms)
        if (word_degree(w) != d) throw Error("B0Elt::degree: inhomogeneous element");
    return d;
}

z4_t B0Elt::coeff(const Word& w) const {
    auto it = terms.find(w);
    return it == terms.end() ? 0 : it->second;
}

void B0Elt::add_term(const Word& w, z4_t c) {
    c &= 3;
    if (!c) return;
    auto [it, inserted] = terms.emplace(w, c);
    if (!inserted) {
        it->second = z4_add(it->second, c);
        if (!it->second) terms.erase(it);
    }
}

B0Elt& B0Elt::operator+=(const B0Elt& o) {
    for (const auto& [w, c] : o.terms) add_term(w, c);
    return *this;
}

void B0Elt::scale(z4_t c) {
    c &= 3;
    if (c == 1) return;
    if (c == 0) {
        terms.clear();
        return;
    }
    B0Elt r;
    for (const auto& [w, k] : terms) r.add_term(w, z4_mul(k, c));
    *this = std::move(r);
}

B0Elt multiply(const B0Elt& x, const B0Elt& y) {
    B0Elt r;
    for (const auto& [u, cu] : x.terms)
        for (const auto& [v, cv] : y.terms) {
            Word w;
            w.reserve(u.size() + v.size());
            w.insert(w.end(), u.begin(), u.end());
            w.insert(w.end(), v.begin(), v.end());
            r.add_term(w, z4_mul(cu, cv));
        }
    return r;
}

Steenrod project_pi(const B0Elt& x) {
    Steenrod r;
    for (const auto& [w, c] : x.terms)
        if (c & 1) r += adem_reduce(w);
    return r;
}

B0Elt lift_chi(const Steenrod& x) {
    B0Elt r;
    for (const Word& w : x.terms) r.terms.emplace(w, 1);
    return r;
}

B0Elt adem_element(uint32_t a, uint32_t b) {
    if (!(a > 0 && a < 2 * b))
        throw Error(fmt::format("adem_element: need 0 < a < 2b, got [{},{}]", a, b));
    B0Elt r = B0Elt::of_word(Word{a, b}, 1);
    for (const Word& w : adem_pair(a, b).terms) r.add_term(w, 1);
    return r;
}

int RightGen::degree() const {
    if (is_two()) return 0;
    return word_degree(prefix) + static_cast<int>(a) + static_cast<int>(b);
}

Word RightGen::full_word() const {
    if (is_two()) return {};
    Word w = prefix;
    w.push_back(a);
    w.push_back(b);
    return w;
}

B0Elt RightGen::expand() const {
    if (is_two()) return B0Elt::two();
    return multiply(B0Elt::of_word(prefix, 1), adem_element(a, b));
}

bool RightGen::operator<(const RightGen& o) const {
    if (is_two() != o.is_two()) return is_two();
    if (is_two()) return false;
    Word u = full_word(), v = o.full_word();
    if (u == v) return false;
    return word_less(u, v);
}

const std::vector<RightGen>& right_generators(int n) {
    static std::vector<std::vector<RightGen>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    if (n < 0) throw Error("right_generators: negative degree");
    while (static_cast<int>(cache.size()) <= n) {
        int m = static_cast<int>(cache.size());
        std::vector<RightGen> out;
        if (m == 0) {
            out.push_back(RightGen::scalar_two());
        } else {
            for (uint32_t b = 1; static_cast<int>(b) < m; ++b)
                for (uint32_t a = 1; a < 2 * b && static_cast<int>(a + b) <= m; ++a) {
                    int rest = m - static_cast<int>(a + b);
                    for (const Word& p : admissible_basis(rest)) {
                        if (!p.empty() && p.back() < 2 * a) continue;
                        out.push_back(RightGen{p, a, b});
                    }
                }
            std::sort(out.begin(), out.end());
        }
        cache.push_back(std::move(out));
    }
    return cache[n];
}

static void build_words(int m, Word& prefix, std::vector<Word>& out) {
    if (m == 0) {
        out.push_back(prefix);
        return;
    }
    for (uint32_t a = static_cast<uint32_t>(m); a >= 1; --a) {
        prefix.push_back(a);
        build_words(m - static_cast<int>(a), prefix, out);
        prefix.pop_back();
    }
}

const std::vector<Word>& all_words(int n) {
    static std::vector<std::vector<Word>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    if (n < 0) throw Error("all_words: negative degree");
    while (static_cast<int>(cache.size()) <= n) {
        int m = static_cast<int>(cache.size());
        std::vector<Word> out;
        Word prefix;
        build_words(m, prefix, out);
        cache.push_back(std::move(out));
    }
    return cache[n];
}

int word_index(int n, const Word& w) {
    static std::vector<std::map<Word, int, WordLess>> cache;
    static std::mutex mtx;
    {
        std::lock_guard<std::mutex> lock(mtx);
        while (static_cast<int>(cache.size()) <= n) {
            int m = static_cast<int>(cache.size());
            std::map<Word, int, WordLess> idx;
            const auto& words = all_words(m);
            for (size_t i = 0; i < words.size(); ++i) idx.emplace(words[i], static_cast<int>(i));
            cache.push_back(std::move(idx));
        }
        auto it = cache[n].find(w);
        if (it != cache[n].end()) return it->second;
    }
    throw Error(fmt::format("word_index: {} does not have degree {}", word_str(w), n));
}

RDec decompose_R(const B0Elt& x, DecStrategy strategy) {
    std::map<RightGen, B0Elt> acc;
    B0Elt work = x;
    while (!work.is_zero()) {
        /* Peel even parts off to the scalar generator; the remainder has all
           coefficients 1. */
        B0Elt odd, twopart;
        for (const auto& [w, c] : work.terms) {
            if (c & 1) {
                odd.add_term(w, 1);
                if (c == 3) twopart.add_term(w, 1);
            } else {
                twopart.add_term(w, static_cast<z4_t>(c >> 1));
            }
        }
        if (!twopart.is_zero()) acc[RightGen::scalar_two()] += twopart;
        work = std::move(odd);
        if (work.is_zero()) break;

        const Word* pick = nullptr;
        for (const auto& [w, c] : work.terms) {
            if (word_admissible(w)) continue;
            pick = &w;
            if (strategy == DecStrategy::FirstWord) break;
        }
        if (!pick)
            throw DataError(fmt::format(
                "decompose_R: element not in kernel, odd admissible remainder {}", to_string(work)));

        Word w = *pick;
        size_t j = 0;
        while (w[j] >= 2 * w[j + 1]) ++j;
        RightGen rho{Word(w.begin(), w.begin() + j), w[j], w[j + 1]};
        Word tail(w.begin() + j + 2, w.end());
        acc[rho].add_term(tail, 1);

        /* Subtract rho * tail; this cancels w and leaves strictly smaller
           rewrite terms (the Adem step lowers sum(i * w_i)). */
        B0Elt delta = multiply(rho.expand(), B0Elt::of_word(tail, 1));
        delta.scale(3);
        work += delta;
    }
    RDec dec;
    for (auto& [g, r] : acc)
        if (!r.is_zero()) dec.parts.push_back(RPart{g, std::move(r)});
    return dec;
}

B0Elt recompose(const RDec& dec) {
    B0Elt r;
    for (const RPart& p : dec.parts) r += multiply(p.gen.expand(), p.right);
    return r;
}

std::string to_string(const B0Elt& x) {
    if (x.is_zero()) return "0";
    std::string s;
    bool first = true;
    for (const auto& [w, c] : x.terms) {
        if (!first) s += '+';
        first = false;
        if (c == 2) s += "2*";
        if (c == 3) s += "3*";
        s += word_str(w);
    }
    return s;
}

std::string to_string(const RightGen& g) {
    if (g.is_two()) return "2";
    std::string s;
    for (uint32_t e : g.prefix) s += fmt::format("Sq{}", e);
    s += fmt::format("[{},{}]", g.a, g.b);
    return s;
}

std::string to_string(const RDec& dec) {
    if (dec.parts.empty()) return "0";
    std::string s;
    for (size_t i = 0; i < dec.parts.size(); ++i) {
        if (i) s += " + ";
        s += fmt::format("{} * ({})", to_string(dec.parts[i].gen), to_string(dec.parts[i].right));
    }
    return s;
}

static std::string_view trim_sv(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

B0Elt parse_b0(std::string_view s) {
    s = trim_sv(s);
    if (s == "0") return B0Elt::zero();
    B0Elt r;
    size_t start = 0;
    while (start <= s.size()) {
        size_t plus = s.find('+', start);
        std::string_view tok = s.substr(start, plus == std::string_view::npos ? plus : plus - start);
        tok = trim_sv(tok);
        if (tok.empty()) throw DataError(fmt::format("bad Z/4 element '{}': empty term", s));
        z4_t c = 1;
        if (tok.size() >= 2 && (tok[0] == '2' || tok[0] == '3') && tok[1] == '*') {
            c = static_cast<z4_t>(tok[0] - '0');
            tok = trim_sv(tok.substr(2));
        } else if (tok == "2" || tok == "3") {
            c = static_cast<z4_t>(tok[0] - '0');
            tok = "1";
        }
        r.add_term(parse_word(tok), c);
        if (plus == std::string_view::npos) break;
        start = plus + 1;
    }
    return r;
}

RightGen parse_right_gen(std::string_view s) {
    s = trim_sv(s);
    if (s == "2") return RightGen::scalar_two();
    size_t lb = s.find('[');
    size_t rb = s.find(']');
    if (lb == std::string_view::npos || rb == std::string_view::npos || rb < lb || rb + 1 != s.size())
        throw DataError(fmt::format("bad relation generator '{}'", s));
    Word prefix;
    if (lb > 0) prefix = parse_word(s.substr(0, lb));
    std::string_view inner = s.substr(lb + 1, rb - lb - 1);
    size_t comma = inner.find(',');
    if (comma == std::string_view::npos)
        throw DataError(fmt::format("bad relation generator '{}': expected [a,b]", s));
    auto parse_num = [&](std::string_view t) -> uint32_t {
        t = trim_sv(t);
        if (t.empty()) throw DataError(fmt::format("bad relation generator '{}'", s));
        uint32_t v = 0;
        for (char ch : t) {
            if (ch < '0' || ch > '9')
                throw DataError(fmt::format("bad relation generator '{}'", s));
            v = v * 10 + static_cast<uint32_t>(ch - '0');
        }
        return v;
    };
    uint32_t a = parse_num(inner.substr(0, comma));
    uint32_t b = parse_num(inner.substr(comma + 1));
    if (!(a > 0 && a < 2 * b))
        throw DataError(fmt::format("bad relation generator '{}': need 0 < a < 2b", s));
    if (!word_admissible(prefix))
        throw DataError(fmt::format("bad relation generator '{}': prefix not admissible", s));
    if (!prefix.empty() && prefix.back() < 2 * a)
        throw DataError(
            fmt::format("bad relation generator '{}': prefix not compatible with [a,b]", s));
    return RightGen{std::move(prefix), a, b};
}

}  // namespace secext
