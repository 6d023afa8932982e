#include "doctest.h"
#include "oracles.hpp"
#include "secext/base.hpp"
#include "secext/secondary.hpp"

using namespace secext;
using secext::testing::TempDir;

TEST_SUITE("secondary") {
    TEST_CASE("zero correction table forces the all-zero secondary differential") {
        Resolution res = compute_resolution(6, 12);
        DeltaTable table = solve_delta(res, ATable::zero(), 12);
        REQUIRE(table.ok());
        CHECK(table.solved_through == 12);
        CHECK(table.delta.size() == 15);
        for (const auto& [g, val] : table.delta) CHECK(val.is_zero());
        int unknowns = 0;
        int forced = 0;
        for (const auto& [g, info] : table.info) {
            unknowns += info.unknowns;
            forced += info.forced;
        }
        CHECK(unknowns == 81);
        CHECK(forced == 27);
        CHECK(check_maineq(res, table, ATable::zero()).empty());
        CHECK(extract_d2(table.delta).empty());
    }

    TEST_CASE("a single correction entry pins the first interesting unknown") {
        /* A(Sq1, [1,1]) = 0 declared explicitly; everything else vanishes. */
        ATable t;
        t.maxdeg = 3;
        t.entries[{1, RightGen{{}, 1, 1}}] = Steenrod::zero();

        Resolution res = compute_resolution(3, 4);
        DeltaTable table = solve_delta(res, t, 3);
        REQUIRE(table.ok());
        CHECK(table.solved_through == 3);
        CHECK(table.delta.at(Generator{2, 2, 0}).is_zero());
        CHECK(table.delta.at(Generator{3, 3, 0}).is_zero());

        /* degree-3 system: the unit coefficient is forced, the Sq1 one is a
           free variable fixed to zero by convention */
        const EtaInfo& top = table.info.at(Generator{3, 3, 0});
        CHECK(top.unknowns == 2);
        CHECK(top.forced == 1);
        REQUIRE(top.assigns.size() == 2);
        CHECK(top.assigns[0].label == "Sq1 g[1,1,0]");
        CHECK_FALSE(top.assigns[0].forced);
        CHECK_FALSE(top.assigns[0].value);
        CHECK(top.assigns[1].label == "1 g[1,2,0]");
        CHECK(top.assigns[1].forced);
        CHECK_FALSE(top.assigns[1].value);

        /* filtration-2 rows have no equations: all unknowns stay free */
        const EtaInfo& low = table.info.at(Generator{2, 2, 0});
        CHECK(low.forced == 0);
        REQUIRE(low.assigns.size() == 1);
        CHECK(low.assigns[0].label == "Sq1 g[0,0,0]");
        CHECK_FALSE(low.assigns[0].value);

        /* a table that stops one degree short cannot feed the same solve */
        ATable t2;
        t2.maxdeg = 2;
        t2.entries[{1, RightGen{{}, 1, 1}}] = Steenrod::zero();
        CHECK_THROWS_AS(solve_delta(res, t2, 3), DataError);
    }

    TEST_CASE("module extension of the differential on simple coefficients") {
        Resolution res = compute_resolution(3, 6);
        std::map<Generator, FreeEltA> delta;
        delta[Generator{2, 2, 0}] = parse_free_elt("Sq1 g[0,0,0]");

        /* even scalar kills the linear part; unit left slot kills the rest */
        FreeEltB two_g;
        two_g.add(Generator{2, 2, 0}, B0Elt::two());
        CHECK(delta_on_module_elt(res, delta, ATable::zero(), two_g).is_zero());

        /* a pure section coefficient acts through the tabulated value */
        FreeEltB sq2_g;
        sq2_g.add(Generator{2, 2, 0}, lift_chi(Steenrod::sq(2)));
        FreeEltA got = delta_on_module_elt(res, delta, ATable::zero(), sq2_g);
        CHECK(got == act(Steenrod::sq(2), delta.at(Generator{2, 2, 0})));

        /* inputs outside the table are rejected */
        FreeEltB missing;
        missing.add(Generator{2, 4, 0}, B0Elt::unit());
        CHECK_THROWS_AS(delta_on_module_elt(res, delta, ATable::zero(), missing), DataError);
        FreeEltB low;
        low.add(Generator{1, 1, 0}, B0Elt::unit());
        CHECK_THROWS_AS(delta_on_module_elt(res, delta, ATable::zero(), low), DataError);
    }

    TEST_CASE("arrow extraction keeps exactly the unit-coefficient terms") {
        std::map<Generator, FreeEltA> delta;
        /* unit term -> arrow */
        delta[Generator{3, 17, 0}] = parse_free_elt("g[1,16,0]");
        /* positive-degree coefficient only -> no arrow */
        delta[Generator{3, 10, 0}] = parse_free_elt("Sq4Sq2 g[1,3,0]");
        /* mixed value -> one arrow */
        FreeEltA mixed = parse_free_elt("g[2,21,0] + Sq8 g[2,14,0]");
        delta[Generator{4, 22, 0}] = mixed;
        D2Map d2 = extract_d2(delta);
        CHECK(d2.arrow_count() == 2);
        CHECK(d2.arrows.at(Generator{1, 16, 0}) == std::vector<Generator>{Generator{3, 17, 0}});
        CHECK(d2.arrows.at(Generator{2, 21, 0}) == std::vector<Generator>{Generator{4, 22, 0}});
        CHECK_FALSE(d2.arrows.contains(Generator{1, 3, 0}));

        /* unit term violating the (m+2, d+1) shift is corrupt data */
        std::map<Generator, FreeEltA> bad;
        bad[Generator{3, 17, 0}] = parse_free_elt("g[1,15,0]");
        CHECK_THROWS_AS(extract_d2(bad), DataError);
    }

    TEST_CASE("square check accepts the bundled arrows and flags a chain") {
        D2Map bundled = load_d2(secext::testing::data_dir() + "/paper-d2.txt");
        CHECK(bundled.arrow_count() == 12);
        CHECK(check_d2_squares(bundled).empty());

        D2Map chain;
        chain.arrows[Generator{1, 16, 0}] = {Generator{3, 17, 0}};
        chain.arrows[Generator{3, 17, 0}] = {Generator{5, 18, 0}};
        std::vector<std::string> fails = check_d2_squares(chain);
        REQUIRE(fails.size() == 1);
        CHECK(fails[0] == "d2(d2(g[1,16,0])) hits g[5,18,0]");
    }

    TEST_CASE("bundled secondary values import and reproduce the page sizes") {
        Resolution res = compute_resolution(14, 35);
        std::map<Generator, FreeEltA> delta =
            import_delta(secext::testing::data_dir() + "/paper-delta-deg35.txt", res);
        CHECK(delta.size() == 100);
        D2Map d2 = extract_d2(delta);
        CHECK(d2.arrow_count() == 12);

        auto cells = e3_dimensions(res, d2, 35);
        int e2_total = 0;
        int e3_total = 0;
        for (const auto& [key, cell] : cells) {
            e2_total += cell.e2;
            e3_total += cell.e3();
        }
        CHECK(e2_total == 107);
        CHECK(e2_total - e3_total == 24);  /* 12 arrows kill a dot at each end */

        const E3Cell& c = cells.at({3, 17});
        CHECK(c.e2 == 1);
        CHECK(c.rank_in == 1);
        CHECK(c.rank_out == 0);
        CHECK(c.out_known);
        CHECK(c.e3() == 0);
    }

    TEST_CASE("secondary value files round trip") {
        TempDir tmp("delta");
        std::map<Generator, FreeEltA> delta;
        delta[Generator{3, 17, 0}] = parse_free_elt("g[1,16,0]");
        delta[Generator{2, 5, 0}] = FreeEltA{};
        delta[Generator{4, 22, 1}] = parse_free_elt("(Sq7Sq1+Sq8) g[2,13,0] + g[2,21,0]");
        save_delta(delta, tmp.file("d.txt"));
        CHECK(parse_delta_file(tmp.file("d.txt")) == delta);
        /* saving is deterministic */
        save_delta(delta, tmp.file("d2.txt"));
        CHECK(secext::testing::read_text(tmp.file("d.txt")) ==
              secext::testing::read_text(tmp.file("d2.txt")));
    }

    TEST_CASE("malformed secondary value files are rejected") {
        TempDir tmp("baddelta");
        auto reject = [&](const char* name, const std::string& body) {
            secext::testing::write_text(tmp.file(name), body);
            CHECK_THROWS_AS(parse_delta_file(tmp.file(name)), DataError);
        };
        /* filtration must drop by exactly 2 */
        reject("filt.txt", "delta g[3,17,0] = g[2,16,0]\n");
        /* degree must drop by exactly 1 */
        reject("deg.txt", "delta g[3,17,0] = g[1,15,0]\n");
        /* sources live in filtration >= 2 */
        reject("low.txt", "delta g[1,16,0] = g[0,15,0]\n");
        /* no duplicate sources */
        reject("dup.txt", "delta g[2,5,0] = 0\ndelta g[2,5,0] = 0\n");
        /* lines must carry the marker */
        reject("junk.txt", "g[2,5,0] = 0\n");

        /* comments and blank lines are fine */
        secext::testing::write_text(tmp.file("ok.txt"),
                                    "# comment\n\ndelta g[2,5,0] = 0\n");
        CHECK(parse_delta_file(tmp.file("ok.txt")).size() == 1);

        /* import additionally requires every generator to exist */
        Resolution res = compute_resolution(3, 6);
        secext::testing::write_text(tmp.file("ghost.txt"), "delta g[2,7,0] = g[0,6,0]\n");
        CHECK_THROWS_AS(import_delta(tmp.file("ghost.txt"), res), DataError);
    }
}
