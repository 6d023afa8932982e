#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "secext/base.hpp"

namespace secext {

/* A word Sq^{i1}...Sq^{ik} in the generators; the empty word is the unit. */
using Word = std::vector<uint32_t>;

int word_degree(const Word& w);
bool word_admissible(const Word& w);  // i_j >= 2*i_{j+1} for adjacent pairs

/* Canonical word order: lexicographic on exponent lists with the larger
   exponent first, so basis(6) reads Sq6, Sq5Sq1, Sq4Sq2. Shorter words come
   first on equal prefixes (only relevant across degrees). */
bool word_less(const Word& a, const Word& b);
struct WordLess {
    bool operator()(const Word& a, const Word& b) const { return word_less(a, b); }
};

/* Element of the Steenrod algebra: an F2 sum of admissible words, kept
   sorted by word_less with no duplicates. Homogeneous by construction in
   all uses; zero has indeterminate degree (-1). */
struct Steenrod {
    std::vector<Word> terms;

    static Steenrod zero() { return {}; }
    static Steenrod unit() { return Steenrod{{Word{}}}; }
    static Steenrod sq(uint32_t n) { return n == 0 ? unit() : Steenrod{{Word{n}}}; }
    static Steenrod of_word(Word w) { return Steenrod{{std::move(w)}}; }

    bool is_zero() const { return terms.empty(); }
    int degree() const { return terms.empty() ? -1 : word_degree(terms.front()); }
    bool contains(const Word& w) const;

    /* F2 addition: symmetric difference of term sets. */
    Steenrod& operator+=(const Steenrod& o);
    friend Steenrod operator+(Steenrod a, const Steenrod& b) {
        a += b;
        return a;
    }
    bool operator==(const Steenrod&) const = default;
};

/* Toggle a single word into a sorted term list (F2 addition of one word). */
void toggle_term(std::vector<Word>& terms, const Word& w);

/* Admissible-basis expansion of an arbitrary word. Leftmost inadmissible
   adjacent pair is rewritten first; two-letter reductions are memoized. */
Steenrod adem_reduce(const Word& w);

/* Admissible expansion of the two-letter word Sq^a Sq^b (memoized). */
const Steenrod& adem_pair(uint32_t a, uint32_t b);

Steenrod multiply(const Steenrod& x, const Steenrod& y);
Steenrod act_word(const Word& a, const Steenrod& x);  // word * element

/* All admissible words of degree n, cached, in word_less order. */
const std::vector<Word>& admissible_basis(int n);
int admissible_dim(int n);
/* Position of an admissible word within admissible_basis(n); throws if absent. */
int admissible_index(int n, const Word& w);

/* Monomial text grammar: `1` for the unit, else `Sq4Sq2Sq1`; sums joined by
   `+`; `0` for the zero element. Bit-exact round trip with to_string. */
std::string word_str(const Word& w);
std::string to_string(const Steenrod& x);
Word parse_word(std::string_view s);
Steenrod parse_steenrod(std::string_view s);

}  // namespace secext
