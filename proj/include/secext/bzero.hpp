#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "secext/gf2.hpp"
#include "secext/steenrod.hpp"

namespace secext {

/* Element of the free Z/4-tensor algebra on Sq^1, Sq^2, ... Words are kept
   free (no Adem rewriting); coefficients live in Z/4 and are never zero. */
struct B0Elt {
    std::map<Word, z4_t, WordLess> terms;

    static B0Elt zero() { return {}; }
    static B0Elt unit() { return of_word(Word{}, 1); }
    static B0Elt two() { return of_word(Word{}, 2); }
    static B0Elt of_word(Word w, z4_t c = 1);

    bool is_zero() const { return terms.empty(); }
    /* -1 for zero; throws if terms have mixed degrees. */
    int degree() const;
    z4_t coeff(const Word& w) const;
    void add_term(const Word& w, z4_t c);

    B0Elt& operator+=(const B0Elt& o);
    B0Elt operator+(const B0Elt& o) const {
        B0Elt r = *this;
        r += o;
        return r;
    }
    void scale(z4_t c);
    bool operator==(const B0Elt&) const = default;
};

B0Elt multiply(const B0Elt& x, const B0Elt& y);

/* Reduction mod 2 and mod Adem relations. */
Steenrod project_pi(const B0Elt& x);
/* Coefficientwise section of project_pi on admissible words. */
B0Elt lift_chi(const Steenrod& x);

/* The lifted Adem relation [a,b] = Sq^a Sq^b + (admissible rewrite of
   Sq^a Sq^b), an element of ker(project_pi); requires 0 < a < 2b. */
B0Elt adem_element(uint32_t a, uint32_t b);

/* Free generator of ker(project_pi) as a right module: either the scalar 2
   (encoded b == 0) or a preadmissible relation Sq^{a_k}..Sq^{a_1}[a,b] with
   the prefix admissible, a_1 >= 2a and 0 < a < 2b. */
struct RightGen {
    Word prefix;
    uint32_t a = 0;
    uint32_t b = 0;

    static RightGen scalar_two() { return {}; }
    bool is_two() const { return b == 0; }
    int degree() const;
    B0Elt expand() const;
    /* prefix + {a, b}; empty for the scalar generator. */
    Word full_word() const;

    bool operator==(const RightGen&) const = default;
    bool operator<(const RightGen& o) const;
};

/* All generators of ker(project_pi) in degree n, deterministically ordered. */
const std::vector<RightGen>& right_generators(int n);

/* All words of degree n (free tensor-algebra basis), word_less order. */
const std::vector<Word>& all_words(int n);
int word_index(int n, const Word& w);

/* One summand gen * right of a right-module decomposition. */
struct RPart {
    RightGen gen;
    B0Elt right;
    bool operator==(const RPart&) const = default;
};

struct RDec {
    std::vector<RPart> parts;  // sorted by gen, right factors nonzero
    bool operator==(const RDec&) const = default;
};

/* Which inadmissible word the rewriting loop of decompose_R picks next;
   the two strategies give different (equally valid) decompositions and are
   cross-checked in strict evaluation mode. */
enum class DecStrategy { FirstWord, LastWord };

/* Write x in ker(project_pi) as a combination of right_generators terms.
   Throws DataError if x is not in the kernel. */
RDec decompose_R(const B0Elt& x, DecStrategy strategy = DecStrategy::FirstWord);

B0Elt recompose(const RDec& dec);

std::string to_string(const B0Elt& x);
std::string to_string(const RightGen& g);
std::string to_string(const RDec& dec);
B0Elt parse_b0(std::string_view s);
RightGen parse_right_gen(std::string_view s);

}  // namespace secext
