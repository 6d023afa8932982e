#pragma once

#include "secext/secondary.hpp"

namespace secext {

/* Element of a free module with one coefficient pair (r, sigma-a) per
   generator: the kernel-valued component inside the tensor algebra and the
   suspended Steenrod component. */
struct PairElt {
    std::map<Generator, B0Elt> r_part;
    FreeEltA a_part;
    bool operator==(const PairElt&) const = default;
};

/* The lifted complex: stored secondary values H(g) = (dd(g), delta_A(g))
   for every filtration >= 2 generator with degree <= solved_through. The
   lifted differentials themselves are recomputed from the resolution. */
struct SecondaryComplex {
    int max_filt = 0;
    int solved_through = -1;
    std::map<Generator, PairElt> H;
};

/* Populate the complex from a solved table. Refuses inconsistent solves. */
SecondaryComplex assemble(const Resolution& res, const DeltaTable& table);

struct PairReport {
    int checked_bottom = 0;  // d0 d0 = boundary(H)
    int checked_ladder = 0;  // H d0 = d1 H
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};

/* The two defining identities of the stored lift, computed with pair-level
   arithmetic on the stored H values (so perturbed data fails). */
PairReport check_identities(const Resolution& res, const SecondaryComplex& cx,
                            const ATable& atable);

struct ExactPosition {
    int n = 0, t = 0;
    int log2_module = 0;
    int log2_in = 0;   // image entering from position n+1
    int log2_out = 0;  // image leaving position n
    bool composite_zero = false;
    bool exact = false;
};

struct ExactReport {
    std::vector<ExactPosition> positions;
    std::vector<std::string> skipped;  // frontier/augmentation positions, with reason
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};

/* Exactness of the total complex on the window [m_min, m_max] x
   [d_min, d_max]: at each interior position the composite of consecutive
   differentials vanishes and log2|module| = log2|image in| + log2|image
   out|, computed over Z/4 with module-size bookkeeping. */
ExactReport check_secondary_exactness(const Resolution& res, const SecondaryComplex& cx,
                                      const ATable& atable, int m_min, int m_max, int d_min,
                                      int d_max);

}  // namespace secext
