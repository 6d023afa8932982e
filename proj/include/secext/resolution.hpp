#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

#include "secext/bzero.hpp"
#include "secext/steenrod.hpp"

namespace secext {

/* Free-module generator at filtration m, internal degree d, index q among
   the generators sharing (m, d). */
struct Generator {
    int m = 0;
    int d = 0;
    int q = 0;
    int stem() const { return d - m; }
    auto operator<=>(const Generator&) const = default;
};

std::string to_string(const Generator& g);       // g[m,d,q]
Generator parse_generator(std::string_view s);

/* Element of a free module over the Steenrod algebra. */
struct FreeEltA {
    std::map<Generator, Steenrod> terms;  // coefficients nonzero

    bool is_zero() const { return terms.empty(); }
    Steenrod coeff(const Generator& g) const;
    void add(const Generator& g, const Steenrod& c);
    FreeEltA& operator+=(const FreeEltA& o);
    bool operator==(const FreeEltA&) const = default;
};

/* Total degree gen.d + |coefficient|; -1 for zero, throws if mixed. */
int degree(const FreeEltA& x);
FreeEltA act(const Steenrod& a, const FreeEltA& x);
FreeEltA act_word(const Word& w, const FreeEltA& x);

std::string to_string(const FreeEltA& x);
FreeEltA parse_free_elt(std::string_view s);

/* Element of a free module over the Z/4 tensor algebra. */
struct FreeEltB {
    std::map<Generator, B0Elt> terms;

    bool is_zero() const { return terms.empty(); }
    void add(const Generator& g, const B0Elt& c);
    FreeEltB& operator+=(const FreeEltB& o);
    bool operator==(const FreeEltB&) const = default;
};

/* F2 basis of a free-module piece: (generator, admissible word) pairs for
   all generators of filtration m with degree <= t, in (generator, word)
   order; coordinates are used for all rank computations. */
struct ModuleBasis {
    int t = 0;
    std::vector<std::pair<Generator, Word>> elems;
    std::map<Generator, int> start;  // first index of each generator block

    int size() const { return static_cast<int>(elems.size()); }
    int index(const Generator& g, const Word& w) const;
};

F2Vector to_coords(const FreeEltA& x, const ModuleBasis& basis);
FreeEltA from_coords(const F2Vector& v, const ModuleBasis& basis);

/* Minimal free resolution of F2 over the Steenrod algebra on the window
   m <= max_filt, d <= max_deg. Generators are discovered degree by degree;
   indices q follow kernel order, so the layout is deterministic. */
struct Resolution {
    int max_filt = -1;
    int max_deg = -1;
    std::vector<std::vector<Generator>> gens;  // [m], sorted by (d, q)
    std::map<Generator, FreeEltA> diffs;       // differential on each m >= 1 generator

    bool has_gen(const Generator& g) const;
    const FreeEltA& diff_of(const Generator& g) const;
    std::vector<Generator> gens_at(int m, int d) const;
    int gen_count(int m) const;

    ModuleBasis basis(int m, int t) const;
    /* d(sum a_i g_i) = sum a_i d(g_i); filtration-0 generators map to 0. */
    FreeEltA apply_diff(const FreeEltA& x) const;
};

Resolution compute_resolution(int max_filt, int max_deg);
/* Grow an existing resolution in place; no-op directions are skipped. */
void extend_resolution(Resolution& res, int max_filt, int max_deg);

void save_resolution(const Resolution& res, const std::string& path);
Resolution load_resolution(const std::string& path);

/* Lift of the differential along the coefficientwise section of project_pi. */
FreeEltB lifted_diff(const Resolution& res, const Generator& g);
FreeEltB apply_lifted_diff(const Resolution& res, const FreeEltB& x);

/* One component of the lifted double differential d0(d0(g)): the kernel
   coefficient on a filtration m-2 generator plus its decomposition over the
   relation generators. */
struct DDTerm {
    Generator g;
    B0Elt r;
    RDec dec;
};

std::vector<DDTerm> double_diff(const Resolution& res, const Generator& g,
                                DecStrategy strategy = DecStrategy::FirstWord);

struct ResReport {
    int checked_squares = 0;
    int checked_ranks = 0;
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};

/* d*d = 0, minimality (no degree-0 coefficients), and exactness of the
   resolved window by rank counting. */
ResReport verify_resolution(const Resolution& res);

}  // namespace secext
