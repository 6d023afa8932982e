#pragma once

#include <optional>
#include <string>
#include <vector>

#include "secext/amap.hpp"
#include "secext/resolution.hpp"

namespace secext {

struct EtaAssign {
    std::string label;  // "<word> g[m,d,q]" for the unknown coefficient
    bool forced = false;
    bool value = false;
};

/* Per-generator record of the linear system solved for its secondary value:
   unknown coefficients over the target basis, equation count, and which
   unknowns were pivots (free ones are set to zero by convention). */
struct EtaInfo {
    Generator g;
    int unknowns = 0;
    int equations = 0;
    int forced = 0;
    std::vector<EtaAssign> assigns;
    int free_count() const { return unknowns - forced; }
};

/* Values of the secondary differential on generators: for each g of
   filtration m >= 2 an element over the filtration m-2 generators of total
   degree |g| - 1. */
struct DeltaTable {
    std::map<Generator, FreeEltA> delta;
    int solved_through = -1;  // all generators of degree <= this are present
    std::optional<Generator> inconsistent;
    std::string inconsistent_detail;
    std::map<Generator, EtaInfo> info;

    bool ok() const { return !inconsistent.has_value(); }
};

/* Linear extension of the secondary differential to module elements with
   tensor-algebra coefficients: delta(b g) = pi(b) delta(g) + A(pi(b), dd(g)),
   with A(a, r k) read as A(a, r) k. Every generator of x must have
   filtration >= 2 and appear in the table. */
FreeEltA delta_on_module_elt(const Resolution& res, const std::map<Generator, FreeEltA>& delta,
                             const ATable& atable, const FreeEltB& x,
                             EvalMode mode = EvalMode::Lenient);

/* Solve d(delta(g)) = delta(d(g)) for all generators of degree <= max_deg,
   degree by degree; within one degree the per-generator systems are
   independent and solved with `jobs` workers, merged in generator order.
   An unsolvable system stops the solve with the failing generator recorded;
   entries of lower degrees stay valid. */
DeltaTable solve_delta(const Resolution& res, const ATable& atable, int max_deg, int jobs = 1,
                       EvalMode mode = EvalMode::Lenient);

/* Residuals d(delta(g)) - delta(d(g)) for every tabulated generator of
   filtration >= 3; returns human-readable failure lines (empty = pass). */
std::vector<std::string> check_maineq(const Resolution& res, const DeltaTable& table,
                                      const ATable& atable);

/* Page-2 differential of the dual chart: source (m,d) -> target (m+2,d+1). */
struct D2Map {
    std::map<Generator, std::vector<Generator>> arrows;  // source -> sorted targets
    int arrow_count() const;
    bool empty() const { return arrows.empty(); }
};

/* Arrow src -> G for every unit-coefficient term 1*src in delta(G); terms
   with positive-degree coefficients die under the dual-basis pairing. */
D2Map extract_d2(const std::map<Generator, FreeEltA>& delta);

/* Failure lines when the composite of consecutive arrows is nonzero. */
std::vector<std::string> check_d2_squares(const D2Map& d2);

struct E3Cell {
    int e2 = 0;
    int rank_in = 0;
    int rank_out = 0;
    bool out_known = true;  // false when the target bidegree is outside the window
    int e3() const { return e2 - rank_in - rank_out; }
};

/* Per-bidegree page-3 dimensions by honest rank computation of the arrow
   matrices. solved_deg is the degree through which the differential is
   known; outgoing ranks beyond it (or beyond max_filt) are flagged. */
std::map<std::pair<int, int>, E3Cell> e3_dimensions(const Resolution& res, const D2Map& d2,
                                                    int solved_deg);

/* Text formats: `delta g[m,d,q] = <coeff> g[m-2,d',q'] + ...` (or `= 0`)
   and `g[m,d,q] -> g[m+2,d+1,q']` arrow lines; '#' comments allowed. */
void save_delta(const std::map<Generator, FreeEltA>& delta, const std::string& path);
std::map<Generator, FreeEltA> parse_delta_file(const std::string& path);
std::map<Generator, FreeEltA> import_delta(const std::string& path, const Resolution& res);
void save_d2(const D2Map& d2, const std::string& path);
D2Map load_d2(const std::string& path);

}  // namespace secext
