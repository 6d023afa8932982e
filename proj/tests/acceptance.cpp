/* Acceptance gate: one line per criterion, pinned time budgets, exit 1 on any
   failure.  Run from ctest with SECEXT_BIN/SECEXT_DATA set (a missing external
   correction table downgrades criterion 5 to a skip, never a failure). */

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "oracles.hpp"
#include "secext/pairmod.hpp"
#include "secext/pipeline.hpp"

using namespace secext;
using secext::testing::TempDir;

namespace {

struct Outcome {
    bool skipped = false;
    std::string skip_reason;
    std::vector<std::string> problems;
};

int g_failures = 0;

void run_criterion(int number, const std::string& title, double budget_s,
                   const std::function<Outcome()>& body) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome oc;
    try {
        oc = body();
    } catch (const std::exception& e) {
        oc.problems.push_back(fmt::format("exception: {}", e.what()));
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::string timing = budget_s > 0 ? fmt::format("{:.2f}s, budget {:.0f}s", secs, budget_s)
                                      : fmt::format("{:.2f}s", secs);
    if (budget_s > 0 && secs > budget_s)
        oc.problems.push_back(fmt::format("time budget exceeded: {:.2f}s > {:.0f}s", secs,
                                          budget_s));

    if (oc.skipped && oc.problems.empty()) {
        fmt::print("[SKIP] criterion {}: {} ({})\n", number, title, oc.skip_reason);
        return;
    }
    if (oc.problems.empty()) {
        fmt::print("[PASS] criterion {}: {} ({})\n", number, title, timing);
        return;
    }
    ++g_failures;
    fmt::print("[FAIL] criterion {}: {} ({})\n", number, title, timing);
    for (const std::string& p : oc.problems) fmt::print("       - {}\n", p);
}

std::string data_file(const std::string& name) {
    return secext::testing::data_dir() + "/" + name;
}

/* ---- criterion 1: resolution window vs the known chart ----------------- */

std::map<std::pair<int, int>, int> known_chart_counts() {
    /* (stem, filtration) -> generator count, stems <= 22, filtration <= 8 */
    std::map<std::pair<int, int>, int> counts;
    auto row = [&](int m, std::initializer_list<int> stems) {
        for (int s : stems) counts[{s, m}] += 1;
    };
    row(0, {0});
    row(1, {0, 1, 3, 7, 15});
    row(2, {0, 2, 3, 6, 7, 8, 14, 15, 16, 18});
    row(3, {0, 3, 7, 8, 9, 14, 15, 17, 18, 19, 21});
    row(4, {0, 7, 9, 14, 15, 17, 18, 18, 20, 22});
    row(5, {0, 9, 11, 14, 15, 15, 17, 18, 20, 21});
    row(6, {0, 10, 11, 14, 15, 16, 17, 20});
    row(7, {0, 11, 15, 16, 17});
    row(8, {0, 15, 17, 22});
    return counts;
}

Outcome criterion1() {
    Outcome oc;
    Resolution res = compute_resolution(8, 30);

    auto degrees = [&](int m, int cap) {
        std::set<int> out;
        for (const Generator& g : res.gens[static_cast<size_t>(m)])
            if (g.d <= cap) out.insert(g.d);
        return out;
    };
    std::set<int> f1 = degrees(1, 22);
    if (f1 != std::set<int>{1, 2, 4, 8, 16})
        oc.problems.push_back("filtration-1 generator degrees below 23 are not {1,2,4,8,16}");
    std::set<int> f2 = degrees(2, 22);
    if (f2 != std::set<int>{2, 4, 5, 8, 9, 10, 16, 17, 18, 20})
        oc.problems.push_back("filtration-2 generator degrees below 23 are wrong");

    ResReport rep = verify_resolution(res);
    if (!rep.ok())
        for (const std::string& f : rep.failures)
            oc.problems.push_back(fmt::format("resolution check: {}", f));
    for (const auto& [g, dx] : res.diffs)
        for (const auto& [h, c] : dx.terms)
            if (c.degree() < 1) {
                oc.problems.push_back(
                    fmt::format("differential of {} has a unit coefficient: not minimal",
                                to_string(g)));
                break;
            }

    std::map<std::pair<int, int>, int> expect = known_chart_counts();
    std::map<std::pair<int, int>, int> actual;
    for (int m = 0; m <= 8; ++m)
        for (const Generator& g : res.gens[static_cast<size_t>(m)])
            if (g.stem() <= 22) actual[{g.stem(), m}] += 1;
    for (int s = 0; s <= 22; ++s)
        for (int m = 0; m <= 8; ++m) {
            int want = expect.count({s, m}) ? expect.at({s, m}) : 0;
            int got = actual.count({s, m}) ? actual.at({s, m}) : 0;
            if (want != got)
                oc.problems.push_back(fmt::format(
                    "cell (stem {}, filtration {}): {} generators, chart shows {}", s, m, got,
                    want));
        }
    return oc;
}

/* ---- criterion 2: bundled table -> the twelve known arrows -------------- */

std::vector<std::pair<Generator, Generator>> known_arrows() {
    return {
        {{1, 16, 0}, {3, 17, 0}}, {{1, 32, 0}, {3, 33, 0}},  {{2, 33, 0}, {4, 34, 0}},
        {{3, 34, 1}, {5, 35, 0}}, {{4, 21, 0}, {6, 22, 0}},  {{4, 22, 0}, {6, 23, 0}},
        {{5, 23, 0}, {7, 24, 0}}, {{7, 30, 0}, {9, 31, 0}},  {{7, 33, 0}, {9, 34, 0}},
        {{8, 31, 0}, {10, 32, 0}}, {{8, 33, 0}, {10, 34, 0}}, {{8, 34, 0}, {10, 35, 0}},
    };
}

Outcome criterion2() {
    Outcome oc;
    auto delta = parse_delta_file(data_file("paper-delta-deg35.txt"));
    D2Map d2 = extract_d2(delta);

    std::set<std::pair<Generator, Generator>> got;
    for (const auto& [src, tgts] : d2.arrows)
        for (const Generator& t : tgts) got.insert({src, t});
    std::set<std::pair<Generator, Generator>> want;
    for (const auto& a : known_arrows()) want.insert(a);

    for (const auto& [s, t] : want)
        if (!got.count({s, t}))
            oc.problems.push_back(
                fmt::format("missing arrow {} -> {}", to_string(s), to_string(t)));
    for (const auto& [s, t] : got)
        if (!want.count({s, t}))
            oc.problems.push_back(
                fmt::format("unexpected arrow {} -> {}", to_string(s), to_string(t)));

    D2Map bundled = load_d2(data_file("paper-d2.txt"));
    if (!(bundled.arrows == d2.arrows))
        oc.problems.push_back("extracted arrows differ from the bundled arrow list");
    return oc;
}

/* ---- criterion 3: one correction entry pins the degree-3 unknowns ------- */

Outcome criterion3() {
    Outcome oc;
    ATable t;
    t.maxdeg = 3;
    t.entries[{1, RightGen{{}, 1, 1}}] = Steenrod::zero();

    Resolution res = compute_resolution(3, 4);
    DeltaTable table = solve_delta(res, t, 3);
    if (!table.ok()) {
        oc.problems.push_back("degree-3 solve reported an inconsistency");
        return oc;
    }

    auto top = table.info.find(Generator{3, 3, 0});
    if (top == table.info.end() || top->second.assigns.size() != 2) {
        oc.problems.push_back("no solve record for the filtration-3 degree-3 generator");
        return oc;
    }
    const EtaAssign& unit = top->second.assigns[1];
    if (unit.label != "1 g[1,2,0]" || !unit.forced || unit.value)
        oc.problems.push_back(fmt::format(
            "unit coefficient at g[3,3,0] should be forced to zero, got '{}' forced={} value={}",
            unit.label, unit.forced, unit.value));
    const EtaAssign& free_low = table.info.at(Generator{2, 2, 0}).assigns.at(0);
    if (free_low.label != "Sq1 g[0,0,0]" || free_low.forced || free_low.value)
        oc.problems.push_back(fmt::format(
            "filtration-2 coefficient should stay free and default to zero, got '{}' forced={} "
            "value={}",
            free_low.label, free_low.forced, free_low.value));
    return oc;
}

/* ---- criterion 4: zero correction table end to end ---------------------- */

Outcome criterion4() {
    Outcome oc;
    Resolution res = compute_resolution(6, 12);
    ATable zero = ATable::zero();
    DeltaTable table = solve_delta(res, zero, 12);
    if (!table.ok()) {
        oc.problems.push_back("solve with the zero correction table failed");
        return oc;
    }
    for (const auto& [g, val] : table.delta)
        if (!val.is_zero())
            oc.problems.push_back(
                fmt::format("expected the all-zero differential, {} is nonzero", to_string(g)));
    if (!extract_d2(table.delta).empty()) oc.problems.push_back("arrow map should be empty");

    SecondaryComplex cx = assemble(res, table);
    PairReport pr = check_identities(res, cx, zero);
    for (const std::string& f : pr.failures)
        oc.problems.push_back(fmt::format("identity check: {}", f));
    ExactReport er = check_secondary_exactness(res, cx, zero, 2, 5, 0, 12);
    for (const std::string& f : er.failures)
        oc.problems.push_back(fmt::format("exactness check: {}", f));
    if (er.positions.empty()) oc.problems.push_back("exactness window came back empty");
    return oc;
}

/* ---- criterion 5: externally supplied correction table ------------------ */

Outcome criterion5() {
    Outcome oc;
    const char* path = std::getenv("SECEXT_ATABLE");
    if (path == nullptr || *path == '\0') {
        oc.skipped = true;
        oc.skip_reason = "no external correction table; set SECEXT_ATABLE to enable";
        return oc;
    }
    ATable t = load_atable(path);
    if (!t.covers(18)) {
        oc.problems.push_back(
            fmt::format("correction table covers degree {} only, need 18", t.maxdeg));
        return oc;
    }
    Resolution res = compute_resolution(18, 18);
    DeltaTable table = solve_delta(res, t, 18);
    if (!table.ok()) {
        oc.problems.push_back(fmt::format("solve inconsistent at {}: {}",
                                          to_string(*table.inconsistent),
                                          table.inconsistent_detail));
        return oc;
    }
    D2Map d2 = extract_d2(table.delta);
    bool found = false;
    for (const auto& [src, tgts] : d2.arrows) {
        if (src == Generator{1, 16, 0}) {
            found = true;
            if (tgts != std::vector<Generator>{Generator{3, 17, 0}})
                oc.problems.push_back("arrow on g[1,16,0] does not land on g[3,17,0] alone");
        } else if (src.d <= 16) {
            oc.problems.push_back(fmt::format(
                "unexpected arrow on the low-degree generator {}", to_string(src)));
        }
    }
    if (!found) oc.problems.push_back("expected the arrow g[1,16,0] -> g[3,17,0]");
    return oc;
}

/* ---- criterion 6: cross-checks and determinism --------------------------- */

int run_pipeline_cli(const std::string& bin, const std::string& args, const std::string& log) {
    std::string cmd = fmt::format("{} {} >{} 2>&1", bin, args, log);
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome criterion6() {
    Outcome oc;

    /* independent dimension count of the algebra, degree by degree */
    for (int n = 0; n <= 30; ++n)
        if (admissible_dim(n) != secext::testing::partition_dim(n)) {
            oc.problems.push_back(fmt::format("algebra dimension mismatch in degree {}", n));
            break;
        }

    /* kernel decompositions reconstruct their input */
    std::mt19937_64 rng(20260825);
    std::uniform_int_distribution<int> deg(1, 20);
    int nonzero = 0;
    for (int i = 0; i < 1000; ++i) {
        B0Elt x = secext::testing::random_kernel_elt(rng, deg(rng));
        if (!x.is_zero()) ++nonzero;
        for (DecStrategy strat : {DecStrategy::FirstWord, DecStrategy::LastWord})
            if (recompose(decompose_R(x, strat)) != x) {
                oc.problems.push_back("kernel decomposition failed to reconstruct an element");
                break;
            }
    }
    if (nonzero < 800)
        oc.problems.push_back(fmt::format("kernel sampler too weak: {}/1000 nonzero", nonzero));

    /* defining equation residuals vanish on a solved window */
    Resolution res = compute_resolution(7, 14);
    ATable zero = ATable::zero();
    DeltaTable table = solve_delta(res, zero, 14);
    if (!table.ok()) {
        oc.problems.push_back("solve failed on the residual-check window");
        return oc;
    }
    for (const std::string& f : check_maineq(res, table, zero))
        oc.problems.push_back(fmt::format("residual: {}", f));

    /* arrow composites vanish on every extracted map */
    for (const std::string& f : check_d2_squares(extract_d2(table.delta)))
        oc.problems.push_back(fmt::format("arrow composite: {}", f));
    auto bundled = parse_delta_file(data_file("paper-delta-deg35.txt"));
    for (const std::string& f : check_d2_squares(extract_d2(bundled)))
        oc.problems.push_back(fmt::format("arrow composite: {}", f));

    /* end-to-end byte determinism across worker counts */
    const char* bin = std::getenv("SECEXT_BIN");
    if (bin == nullptr || *bin == '\0') {
        oc.problems.push_back("SECEXT_BIN not set; cannot check pipeline determinism");
        return oc;
    }
    TempDir tmp("accept");
    std::string o1 = tmp.file("o1"), o2 = tmp.file("o2");
    int c1 = run_pipeline_cli(
        bin,
        fmt::format("pipeline --max-deg 12 --max-filt 6 --jobs 1 --out-dir {} --cache {}", o1,
                    tmp.file("c1")),
        tmp.file("p1.log"));
    int c2 = run_pipeline_cli(
        bin,
        fmt::format("pipeline --max-deg 12 --max-filt 6 --jobs 8 --out-dir {} --cache {}", o2,
                    tmp.file("c2")),
        tmp.file("p2.log"));
    if (c1 != 0 || c2 != 0) {
        oc.problems.push_back(fmt::format("pipeline runs exited with {} and {}", c1, c2));
        return oc;
    }
    for (const char* name : {"resolution.txt", "delta.txt", "d2.txt", "e3.txt", "chart.txt"}) {
        std::string a = secext::testing::read_text(o1 + "/" + std::string(name));
        std::string b = secext::testing::read_text(o2 + "/" + std::string(name));
        if (a != b)
            oc.problems.push_back(
                fmt::format("artifact {} differs between --jobs 1 and --jobs 8", name));
    }
    return oc;
}

}  // namespace

int main() {
    run_criterion(1, "resolution window matches the known chart", 60, criterion1);
    run_criterion(2, "bundled secondary table yields exactly the twelve arrows", 1, criterion2);
    run_criterion(3, "a single correction entry pins the degree-3 unknowns", 1, criterion3);
    run_criterion(4, "zero correction table gives a consistent secondary complex", 60,
                  criterion4);
    run_criterion(5, "external correction table reproduces the first nonzero arrow", 0,
                  criterion5);
    run_criterion(6, "dimension, decomposition, residual and determinism cross-checks", 120,
                  criterion6);
    if (g_failures > 0) {
        fmt::print("{} criterion(s) failed\n", g_failures);
        return 1;
    }
    fmt::print("all criteria satisfied\n");
    return 0;
}
