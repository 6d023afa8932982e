#include "secext/steenrod.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include <fmt/format.h>

namespace secext {

int word_degree(const Word& w) {
    int d = 0;
    for (uint32_t e : w) d += static_cast<int>(e);
    return d;
}

bool word_admissible(const Word& w) {
    for (size_t j = 0; j + 1 < w.size(); ++j)
        if (w[j] < 2 * w[j + 1]) return false;
    return true;
}

bool word_less(const Word& a, const Word& b) {
    size_t n = std::min(a.size(), b.size());
    for (size_t i = 0; i < n; ++i) {
        if (a[i] != b[i]) return a[i] > b[i];
    }
    return a.size() < b.size();
}

bool Steenrod::contains(const Word& w) const {
    return std::binary_search(terms.begin(), terms.end(), w, word_less);
}

void toggle_term(std::vector<Word>& terms, const Word& w) {
    auto it = std::lower_bound(terms.begin(), terms.end(), w, word_less);
    if (it != terms.end() && *it == w)
        terms.erase(it);
    else
        terms.insert(it, w);
}

Steenrod& Steenrod::operator+=(const Steenrod& o) {
    if (o.terms.empty()) return *this;
    std::vector<Word> merged;
    merged.reserve(terms.size() + o.terms.size());
    std::set_symmetric_difference(terms.begin(), terms.end(), o.terms.begin(), o.terms.end(),
                                  std::back_inserter(merged), word_less);
    terms = std::move(merged);
    return *this;
}

/* binom(n,k) mod 2 by Lucas. */
static bool binom2(long n, long k) {
    if (k < 0 || n < 0 || k > n) return false;
    return (n & k) == k;
}

const Steenrod& adem_pair(uint32_t a, uint32_t b) {
    static std::map<std::pair<uint32_t, uint32_t>, Steenrod> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find({a, b});
    if (it != cache.end()) return it->second;

    Steenrod r;
    if (a >= 2 * b) {
        r.terms.push_back(Word{a, b});
    } else {
        /* Sq^a Sq^b = sum_k binom(b-k-1, a-2k) Sq^{a+b-k} Sq^k, 0 < a < 2b.
           Index range [max(0,a-b+1), min(b-1, a/2)]; the k=0 term is the
           single letter Sq^{a+b}. All resulting words are admissible. */
        long lo = std::max<long>(0, static_cast<long>(a) - b + 1);
        long hi = std::min<long>(b - 1, a / 2);
        std::vector<Word> terms;
        for (long k = lo; k <= hi; ++k) {
            if (!binom2(static_cast<long>(b) - k - 1, static_cast<long>(a) - 2 * k)) continue;
            Word w;
            if (k == 0)
                w = Word{a + b};
            else
                w = Word{static_cast<uint32_t>(a + b - k), static_cast<uint32_t>(k)};
            toggle_term(terms, w);
        }
        r.terms = std::move(terms);
    }
    return cache.emplace(std::make_pair(a, b), std::move(r)).first->second;
}

Steenrod adem_reduce(const Word& w) {
    std::vector<Word> pending{w};
    std::vector<Word> out;
    while (!pending.empty()) {
        Word cur = std::move(pending.back());
        pending.pop_back();
        size_t bad = cur.size();
        for (size_t j = 0; j + 1 < cur.size(); ++j)
            if (cur[j] < 2 * cur[j + 1]) {
                bad = j;
                break;
            }
        if (bad == cur.size()) {
            toggle_term(out, cur);
            continue;
        }
        const Steenrod& rep = adem_pair(cur[bad], cur[bad + 1]);
        for (const Word& t : rep.terms) {
            Word nw;
            nw.reserve(cur.size() + t.size() - 2);
            nw.insert(nw.end(), cur.begin(), cur.begin() + bad);
            nw.insert(nw.end(), t.begin(), t.end());
            nw.insert(nw.end(), cur.begin() + bad + 2, cur.end());
            pending.push_back(std::move(nw));
        }
    }
    return Steenrod{std::move(out)};
}

Steenrod multiply(const Steenrod& x, const Steenrod& y) {
    Steenrod acc;
    for (const Word& u : x.terms)
        for (const Word& v : y.terms) {
            Word c;
            c.reserve(u.size() + v.size());
            c.insert(c.end(), u.begin(), u.end());
            c.insert(c.end(), v.begin(), v.end());
            acc += adem_reduce(c);
        }
    return acc;
}

Steenrod act_word(const Word& a, const Steenrod& x) {
    Steenrod acc;
    for (const Word& v : x.terms) {
        Word c;
        c.reserve(a.size() + v.size());
        c.insert(c.end(), a.begin(), a.end());
        c.insert(c.end(), v.begin(), v.end());
        acc += adem_reduce(c);
    }
    return acc;
}

/* Admissible words of degree m with first exponent <= cap, word_less order. */
static void build_admissible(int m, uint32_t cap, Word& prefix, std::vector<Word>& out) {
    if (m == 0) {
        out.push_back(prefix);
        return;
    }
    uint32_t top = std::min<uint32_t>(cap, static_cast<uint32_t>(m));
    for (uint32_t a = top; a >= 1; --a) {
        prefix.push_back(a);
        build_admissible(m - static_cast<int>(a), a / 2, prefix, out);
        prefix.pop_back();
    }
}

const std::vector<Word>& admissible_basis(int n) {
    static std::vector<std::vector<Word>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    if (n < 0) throw Error("admissible_basis: negative degree");
    while (static_cast<int>(cache.size()) <= n) {
        int m = static_cast<int>(cache.size());
        std::vector<Word> out;
        Word prefix;
        build_admissible(m, m > 0 ? static_cast<uint32_t>(m) : 0, prefix, out);
        cache.push_back(std::move(out));
    }
    return cache[n];
}

int admissible_dim(int n) { return static_cast<int>(admissible_basis(n).size()); }

int admissible_index(int n, const Word& w) {
    static std::vector<std::map<Word, int, WordLess>> cache;
    static std::mutex mtx;
    {
        std::lock_guard<std::mutex> lock(mtx);
        while (static_cast<int>(cache.size()) <= n) {
            int m = static_cast<int>(cache.size());
            std::map<Word, int, WordLess> idx;
            const auto& basis = admissible_basis(m);
            for (size_t i = 0; i < basis.size(); ++i) idx.emplace(basis[i], static_cast<int>(i));
            cache.push_back(std::move(idx));
        }
        auto it = cache[n].find(w);
        if (it != cache[n].end()) return it->second;
    }
    throw Error(fmt::format("admissible_index: {} not admissible of degree {}", word_str(w), n));
}

std::string word_str(const Word& w) {
    if (w.empty()) return "1";
    std::string s;
    for (uint32_t e : w) s += fmt::format("Sq{}", e);
    return s;
}

std::string to_string(const Steenrod& x) {
    if (x.is_zero()) return "0";
    std::string s;
    for (size_t i = 0; i < x.terms.size(); ++i) {
        if (i) s += '+';
        s += word_str(x.terms[i]);
    }
    return s;
}

static std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

Word parse_word(std::string_view s) {
    s = trim(s);
    if (s == "1") return Word{};
    Word w;
    size_t i = 0;
    while (i < s.size()) {
        if (s.compare(i, 2, "Sq") != 0)
            throw DataError(fmt::format("bad monomial '{}': expected 'Sq' at offset {}", s, i));
        i += 2;
        size_t j = i;
        while (j < s.size() && s[j] >= '0' && s[j] <= '9') ++j;
        if (j == i) throw DataError(fmt::format("bad monomial '{}': missing exponent", s));
        uint32_t e = 0;
        for (size_t k = i; k < j; ++k) e = e * 10 + static_cast<uint32_t>(s[k] - '0');
        if (e == 0) throw DataError(fmt::format("bad monomial '{}': exponent 0", s));
        w.push_back(e);
        i = j;
    }
    if (w.empty()) throw DataError(fmt::format("bad monomial '{}'", s));
    return w;
}

Steenrod parse_steenrod(std::string_view s) {
    s = trim(s);
    if (s == "0") return Steenrod::zero();
    Steenrod acc;
    size_t start = 0;
    while (start <= s.size()) {
        size_t plus = s.find('+', start);
        std::string_view tok = s.substr(start, plus == std::string_view::npos ? plus : plus - start);
        tok = trim(tok);
        if (tok.empty()) throw DataError(fmt::format("bad element '{}': empty term", s));
        Word w = parse_word(tok);
        if (word_admissible(w))
            toggle_term(acc.terms, w);
        else
            acc += adem_reduce(w);
        if (plus == std::string_view::npos) break;
        start = plus + 1;
    }
    return acc;
}

}  // namespace secext
