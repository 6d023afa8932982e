#include <sys/wait.h>

#include <cstdlib>
#include <string>

#include <fmt/format.h>

#include "doctest.h"
#include "oracles.hpp"

using secext::testing::TempDir;
using secext::testing::data_dir;
using secext::testing::read_text;
using secext::testing::write_text;

namespace {

struct RunResult {
    int code = -1;
    std::string out;  // stdout and stderr interleaved
};

std::string cli_bin() {
    const char* bin = std::getenv("SECEXT_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "SECEXT_BIN must point at the command-line binary");
    return bin;
}

RunResult run_cli(const std::string& args, const std::string& log) {
    std::string cmd = fmt::format("{} {} >{} 2>&1", cli_bin(), args, log);
    int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_text(log);
    return r;
}

bool contains(const std::string& hay, std::string_view needle) {
    return hay.find(needle) != std::string::npos;
}

/* One shared resolution state per suite run keeps the slow steps down. */
struct Workspace {
    TempDir tmp{"cli"};
    std::string state = tmp.file("res.txt");
    std::string delta = tmp.file("delta.txt");

    Workspace() {
        RunResult r = run_cli(
            fmt::format("resolve --max-deg 12 --max-filt 6 --state {}", state),
            tmp.file("resolve.log"));
        REQUIRE(r.code == 0);
        r = run_cli(fmt::format("delta --res {} --amap zero --out {}", state, delta),
                    tmp.file("delta.log"));
        REQUIRE(r.code == 0);
    }
};

Workspace& ws() {
    static Workspace w;
    return w;
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("resolve reports the window and resumes from its state file") {
        TempDir tmp("cli-resolve");
        std::string state = tmp.file("res.txt");
        RunResult r = run_cli(
            fmt::format("resolve --max-deg 12 --max-filt 6 --state {}", state),
            tmp.file("1.log"));
        CHECK(r.code == 0);
        CHECK(r.out ==
              fmt::format("resolution filtration <= 6, degree <= 12, 20 generators -> {}\n",
                          state));

        /* same caps: reloads and reports the resume */
        r = run_cli(fmt::format("resolve --max-deg 12 --max-filt 6 --state {}", state),
                    tmp.file("2.log"));
        CHECK(r.code == 0);
        CHECK(r.out ==
              fmt::format(
                  "resolution filtration <= 6, degree <= 12, 20 generators (resumed) -> {}\n",
                  state));

        /* larger caps grow the same state file */
        r = run_cli(fmt::format("resolve --max-deg 14 --max-filt 7 --state {}", state),
                    tmp.file("3.log"));
        CHECK(r.code == 0);
        CHECK(contains(r.out, "resolution filtration <= 7, degree <= 14,"));
        CHECK(contains(r.out, "(resumed)"));
    }

    TEST_CASE("delta prints the solve statistics") {
        RunResult r = run_cli(
            fmt::format("delta --res {} --amap zero --out {}", ws().state,
                        ws().tmp.file("delta-again.txt")),
            ws().tmp.file("delta2.log"));
        CHECK(r.code == 0);
        CHECK(r.out == fmt::format("delta solved through degree 12: 15 entries, 81 unknowns "
                                   "(27 forced, 54 free set to zero) -> {}\n",
                                   ws().tmp.file("delta-again.txt")));
    }

    TEST_CASE("d2 extraction matches the bundled arrow list byte for byte") {
        RunResult r = run_cli(fmt::format("d2 --delta {}", ws().delta),
                              ws().tmp.file("d2a.log"));
        CHECK(r.code == 0);
        CHECK(r.out == "0 arrows\n");

        std::string out = ws().tmp.file("pd2.txt");
        r = run_cli(fmt::format("d2 --delta {}/paper-delta-deg35.txt --out {}", data_dir(), out),
                    ws().tmp.file("d2b.log"));
        CHECK(r.code == 0);
        CHECK(r.out.rfind("12 arrows\n", 0) == 0);
        CHECK(contains(r.out, "g[1,16,0] -> g[3,17,0]"));
        CHECK(read_text(out) == read_text(data_dir() + "/paper-d2.txt"));
    }

    TEST_CASE("e3 emits the dimension table") {
        RunResult r = run_cli(fmt::format("e3 --res {}", ws().state), ws().tmp.file("e3a.log"));
        CHECK(r.code == 0);
        CHECK(r.out.rfind("# m d stem e2 rank_in rank_out out_known e3\n", 0) == 0);
        CHECK(contains(r.out, "\n2 2 0 1 0 0 1 1\n"));

        std::string out = ws().tmp.file("e3.txt");
        r = run_cli(fmt::format("e3 --res {} --out {}", ws().state, out),
                    ws().tmp.file("e3b.log"));
        CHECK(r.code == 0);
        CHECK(r.out == fmt::format("e3 table: 20 bidegrees -> {}\n", out));
        CHECK(read_text(out).rfind("# m d stem", 0) == 0);
    }

    TEST_CASE("chart renders to a file or stdout in both formats") {
        std::string out = ws().tmp.file("chart.txt");
        RunResult r = run_cli(fmt::format("chart --res {} --out {}", ws().state, out),
                              ws().tmp.file("ch1.log"));
        CHECK(r.code == 0);
        CHECK(r.out == fmt::format("chart -> {}\n", out));
        CHECK(read_text(out).rfind("# Adams chart", 0) == 0);

        r = run_cli(fmt::format("chart --res {} --format svg", ws().state),
                    ws().tmp.file("ch2.log"));
        CHECK(r.code == 0);
        CHECK(r.out.rfind("<svg xmlns=", 0) == 0);

        r = run_cli(fmt::format("chart --res {} --format png", ws().state),
                    ws().tmp.file("ch3.log"));
        CHECK(r.code == 2);
        CHECK(contains(r.out, "unknown chart format 'png'"));
    }

    TEST_CASE("verify passes on a consistent solve") {
        RunResult r = run_cli(
            fmt::format("verify --res {} --delta {}", ws().state, ws().delta),
            ws().tmp.file("verify.log"));
        CHECK(r.code == 0);
        CHECK(contains(r.out, "maineq checked=15 failures=0"));
        CHECK(contains(r.out, "d2-squares arrows=0 failures=0"));
        CHECK(contains(r.out, "identities bottom=15 ladder=9 failures=0"));
        CHECK(contains(r.out, "exactness positions=52 skipped=0 failures=0"));
        CHECK(r.out.size() >= 12);
        CHECK(r.out.substr(r.out.size() - 12) == "result PASS\n");
    }

    TEST_CASE("verify fails loudly on a corrupt table") {
        TempDir tmp("cli-verify");
        std::string state = tmp.file("res.txt");
        RunResult r = run_cli(
            fmt::format("resolve --max-deg 4 --max-filt 3 --state {}", state),
            tmp.file("r.log"));
        REQUIRE(r.code == 0);

        /* flipping the forced unit coefficient breaks the defining equation */
        std::string bad = tmp.file("bad.txt");
        write_text(bad, "delta g[2,2,0] = 0\ndelta g[3,3,0] = g[1,2,0]\n");
        r = run_cli(fmt::format("verify --res {} --delta {}", state, bad), tmp.file("v.log"));
        CHECK(r.code == 3);
        CHECK(contains(r.out, "main equation fails at g[3,3,0]"));
        CHECK(r.out.substr(r.out.size() - 12) == "result FAIL\n");
    }

    TEST_CASE("import-delta validates and normalizes the bundled table") {
        TempDir tmp("cli-import");
        std::string state = tmp.file("res.txt");
        RunResult r = run_cli(
            fmt::format("resolve --max-deg 35 --max-filt 14 --state {}", state),
            tmp.file("r.log"));
        REQUIRE(r.code == 0);

        std::string norm = tmp.file("norm.txt");
        r = run_cli(fmt::format("import-delta --delta {}/paper-delta-deg35.txt --res {} --out {}",
                                data_dir(), state, norm),
                    tmp.file("i.log"));
        CHECK(r.code == 0);
        CHECK(r.out == fmt::format("imported 100 entries -> {}\n", norm));

        r = run_cli(fmt::format("d2 --delta {}", norm), tmp.file("d.log"));
        CHECK(r.code == 0);
        CHECK(r.out.rfind("12 arrows\n", 0) == 0);
    }

    TEST_CASE("pipeline produces artifacts, caches, and is jobs-deterministic") {
        TempDir tmp("cli-pipe");
        std::string o1 = tmp.file("o1");
        RunResult r = run_cli(
            fmt::format("pipeline --max-deg 12 --max-filt 6 --out-dir {} --cache {}", o1,
                        tmp.file("c1")),
            tmp.file("p1.log"));
        CHECK(r.code == 0);
        CHECK(r.out == fmt::format("resolve: filtration <= 6, degree <= 12, 20 generators -> "
                                   "{0}/resolution.txt\n"
                                   "delta: 15 entries -> {0}/delta.txt\n"
                                   "d2: 0 arrows -> {0}/d2.txt\n"
                                   "e3: 20 bidegrees -> {0}/e3.txt\n"
                                   "chart: -> {0}/chart.txt\n",
                                   o1));

        /* second run hits both caches */
        r = run_cli(fmt::format("pipeline --max-deg 12 --max-filt 6 --out-dir {} --cache {}", o1,
                                tmp.file("c1")),
                    tmp.file("p2.log"));
        CHECK(r.code == 0);
        CHECK(contains(r.out, "generators (cached)"));
        CHECK(contains(r.out, "entries (cached)"));

        /* a parallel solve writes the same bytes */
        std::string o2 = tmp.file("o2");
        r = run_cli(fmt::format(
                        "pipeline --max-deg 12 --max-filt 6 --jobs 8 --out-dir {} --cache {}", o2,
                        tmp.file("c2")),
                    tmp.file("p3.log"));
        CHECK(r.code == 0);
        for (const char* name : {"resolution.txt", "delta.txt", "d2.txt", "e3.txt", "chart.txt"})
            CHECK(read_text(o1 + "/" + name) == read_text(o2 + "/" + name));
    }

    TEST_CASE("pipeline extract-only mode pulls arrows straight from a table") {
        TempDir tmp("cli-pipe-x");
        std::string out = tmp.file("out");
        RunResult r = run_cli(
            fmt::format("pipeline --delta {}/paper-delta-deg35.txt --out-dir {} --cache {}",
                        data_dir(), out, tmp.file("cache")),
            tmp.file("p.log"));
        CHECK(r.code == 0);
        CHECK(r.out.rfind(fmt::format("d2: 12 arrows (extract-only) -> {}/d2.txt\n", out), 0) ==
              0);
        CHECK(contains(r.out, "  g[1,16,0] -> g[3,17,0]\n"));
        CHECK(read_text(out + "/d2.txt") == read_text(data_dir() + "/paper-d2.txt"));
        CHECK(read_text(out + "/chart.txt").rfind("# Adams chart", 0) == 0);
    }

    TEST_CASE("bad invocations exit with the documented codes") {
        TempDir tmp("cli-bad");
        CHECK(run_cli("", tmp.file("u1.log")).code == 1);             /* no subcommand */
        CHECK(run_cli("bogus", tmp.file("u2.log")).code == 1);        /* unknown subcommand */
        CHECK(run_cli("resolve --max-deg 5", tmp.file("u3.log")).code == 1); /* missing flags */

        RunResult r = run_cli("d2 --delta /nonexistent/table.txt", tmp.file("u4.log"));
        CHECK(r.code == 2);
        CHECK(contains(r.out, "data error:"));
        r = run_cli(fmt::format("delta --res /nonexistent/res.txt --out {}", tmp.file("x.txt")),
                    tmp.file("u5.log"));
        CHECK(r.code == 2);
    }
}
