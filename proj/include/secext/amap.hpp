#pragma once

#include <string>
#include <utility>
#include <vector>

#include "secext/bzero.hpp"

namespace secext {

/* Table of the degree -1 correction map A on generators: one value
   A(Sq^n, g) per (n, g) with g a right-module relation generator. Entries
   within coverage that are not listed are zero. */
struct ATable {
    int maxdeg = 0;  // covers all (n, g) with n + |g| <= maxdeg
    bool synthesized_zero = false;
    std::map<std::pair<uint32_t, RightGen>, Steenrod> entries;

    static ATable zero();
    bool covers(int deg) const { return synthesized_zero || deg <= maxdeg; }
    /* Throws DataError when n + |g| exceeds coverage. */
    Steenrod lookup(uint32_t n, const RightGen& g) const;
};

ATable load_atable(const std::string& path);
void save_atable(const ATable& t, const std::string& path);

/* Strict mode evaluates twice with independent kernel decompositions and
   requires agreement; a mismatch means the table is not right-linear. */
enum class EvalMode { Lenient, Strict };

/* A(a, r) for r in ker(project_pi); additive in both slots, degree -1. */
Steenrod eval_A(const ATable& t, const Steenrod& a, const B0Elt& r,
                EvalMode mode = EvalMode::Lenient);

namespace detail {
Steenrod eval_A_word(const ATable& t, const Word& a, const B0Elt& r, DecStrategy strategy);
}

struct AmapReport {
    int checked = 0;
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};

/* Randomized consistency checks of a table: right-linearity over products
   gen * b and representative-independence in the left slot. */
AmapReport validate_atable(const ATable& t, int degree_cap, uint64_t seed, int samples);

}  // namespace secext
