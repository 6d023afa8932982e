#include <fmt/format.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "CLI11.hpp"
#include "secext/pipeline.hpp"
#include "secext/pairmod.hpp"

using namespace secext;

namespace {

ATable load_amap_arg(const std::string& arg) {
    if (arg.empty() || arg == "zero") return ATable::zero();
    return load_atable(arg);
}

void emit(const std::string& text) { std::fputs(text.c_str(), stdout); }

struct Window {
    int m_min = 0, m_max = 0, d_min = 0, d_max = 0;
};

Window parse_window(const std::string& s) {
    Window w;
    if (std::sscanf(s.c_str(), "%d:%d,%d:%d", &w.m_min, &w.m_max, &w.d_min, &w.d_max) != 4)
        throw DataError(fmt::format("bad window '{}', expected mMin:mMax,dMin:dMax", s));
    return w;
}

// Largest degree through which every filtration >= 2 generator has an entry.
int inferred_solved_degree(const Resolution& res, const std::map<Generator, FreeEltA>& delta) {
    int solved = -1;
    for (int d = 0; d <= res.max_deg; ++d) {
        for (int m = 2; m <= res.max_filt; ++m)
            for (const Generator& g : res.gens_at(m, d))
                if (!delta.count(g)) return solved;
        solved = d;
    }
    return solved;
}

int cmd_resolve(const std::string& state, int max_filt, int max_deg) {
    Resolution res;
    bool resumed = false;
    if (std::filesystem::exists(state)) {
        res = load_resolution(state);
        extend_resolution(res, std::max(max_filt, res.max_filt), std::max(max_deg, res.max_deg));
        resumed = true;
    } else {
        res = compute_resolution(max_filt, max_deg);
    }
    save_resolution(res, state);
    int total = 0;
    for (const auto& level : res.gens) total += static_cast<int>(level.size());
    emit(fmt::format("resolution filtration <= {}, degree <= {}, {} generators{} -> {}\n",
                     res.max_filt, res.max_deg, total, resumed ? " (resumed)" : "", state));
    return 0;
}

int cmd_delta(const std::string& res_path, const std::string& amap, int max_deg,
              const std::string& out, int jobs) {
    Resolution res = load_resolution(res_path);
    if (max_deg < 0) max_deg = res.max_deg;
    ATable atable = load_amap_arg(amap);
    DeltaTable table = solve_delta(res, atable, max_deg, jobs);
    if (!table.ok()) {
        fmt::print(stderr, "INCONSISTENT at {}: {}\n", to_string(*table.inconsistent),
                   table.inconsistent_detail);
        return 4;
    }
    save_delta(table.delta, out);
    int forced = 0, unknowns = 0;
    for (const auto& [g, info] : table.info) {
        forced += info.forced;
        unknowns += info.unknowns;
    }
    emit(fmt::format("delta solved through degree {}: {} entries, {} unknowns ({} forced, {} "
                     "free set to zero) -> {}\n",
                     table.solved_through, table.delta.size(), unknowns, forced,
                     unknowns - forced, out));
    return 0;
}

int cmd_d2(const std::string& delta_path, const std::string& out) {
    auto delta = parse_delta_file(delta_path);
    D2Map d2 = extract_d2(delta);
    if (!out.empty()) save_d2(d2, out);
    emit(fmt::format("{} arrows\n", d2.arrow_count()));
    for (const auto& [src, tgts] : d2.arrows)
        for (const Generator& t : tgts) emit(fmt::format("{} -> {}\n", to_string(src), to_string(t)));
    return 0;
}

int cmd_e3(const std::string& res_path, const std::string& d2_path, int solved_deg,
           const std::string& out) {
    Resolution res = load_resolution(res_path);
    D2Map d2;
    if (!d2_path.empty()) d2 = load_d2(d2_path);
    if (solved_deg < 0) solved_deg = res.max_deg;
    auto cells = e3_dimensions(res, d2, solved_deg);
    std::string text = e3_table_text(cells);
    if (out.empty())
        emit(text);
    else {
        write_file(out, text);
        emit(fmt::format("e3 table: {} bidegrees -> {}\n", cells.size(), out));
    }
    return 0;
}

int cmd_chart(const std::string& res_path, const std::string& d2_path, const std::string& format,
              int max_stem, int max_filt, const std::string& out) {
    Resolution res = load_resolution(res_path);
    D2Map d2;
    if (!d2_path.empty()) d2 = load_d2(d2_path);
    ChartSpec spec = chart_spec(res, d2, max_stem, max_filt);
    if (format == "svg")
        spec.format = ChartFormat::Svg;
    else if (format == "text")
        spec.format = ChartFormat::Text;
    else
        throw DataError(fmt::format("unknown chart format '{}'", format));
    std::string doc = render_chart(spec);
    if (out.empty())
        emit(doc);
    else {
        write_file(out, doc);
        emit(fmt::format("chart -> {}\n", out));
    }
    return 0;
}

int cmd_verify(const std::string& res_path, const std::string& delta_path,
               const std::string& amap, const std::string& window_arg) {
    Resolution res = load_resolution(res_path);
    bool failed = false;

    ResReport rr = verify_resolution(res);
    emit(fmt::format("resolution squares={} ranks={} failures={}\n", rr.checked_squares,
                     rr.checked_ranks, rr.failures.size()));
    for (const auto& f : rr.failures) emit(fmt::format("fail {}\n", f));
    failed = failed || !rr.ok();

    if (!delta_path.empty()) {
        auto delta = import_delta(delta_path, res);
        ATable atable = load_amap_arg(amap);
        DeltaTable table;
        table.delta = delta;
        table.solved_through = inferred_solved_degree(res, delta);

        auto maineq = check_maineq(res, table, atable);
        int tabulated = static_cast<int>(delta.size());
        emit(fmt::format("maineq checked={} failures={}\n", tabulated, maineq.size()));
        for (const auto& f : maineq) emit(fmt::format("fail {}\n", f));
        failed = failed || !maineq.empty();

        D2Map d2 = extract_d2(delta);
        auto squares = check_d2_squares(d2);
        emit(fmt::format("d2-squares arrows={} failures={}\n", d2.arrow_count(), squares.size()));
        for (const auto& f : squares) emit(fmt::format("fail {}\n", f));
        failed = failed || !squares.empty();

        SecondaryComplex cx = assemble(res, table);
        PairReport pr = check_identities(res, cx, atable);
        emit(fmt::format("identities bottom={} ladder={} failures={}\n", pr.checked_bottom,
                         pr.checked_ladder, pr.failures.size()));
        for (const auto& f : pr.failures) emit(fmt::format("fail {}\n", f));
        failed = failed || !pr.ok();

        Window w;
        if (window_arg.empty()) {
            w.m_min = 2;
            w.m_max = std::max(2, res.max_filt - 1);
            w.d_min = 0;
            w.d_max = std::max(0, table.solved_through);
        } else {
            w = parse_window(window_arg);
        }
        ExactReport er =
            check_secondary_exactness(res, cx, atable, w.m_min, w.m_max, w.d_min, w.d_max);
        emit(fmt::format("exactness positions={} skipped={} failures={}\n", er.positions.size(),
                         er.skipped.size(), er.failures.size()));
        for (const auto& f : er.failures) emit(fmt::format("fail {}\n", f));
        failed = failed || !er.ok();
    }

    emit(failed ? "result FAIL\n" : "result PASS\n");
    return failed ? 3 : 0;
}

int cmd_validate_amap(const std::string& amap, int degree_cap, uint64_t seed, int samples) {
    ATable t = load_amap_arg(amap);
    AmapReport rep = validate_atable(t, degree_cap, seed, samples);
    emit(fmt::format("checked={} failures={}\n", rep.checked, rep.failures.size()));
    for (const auto& f : rep.failures) emit(fmt::format("fail {}\n", f));
    emit(rep.ok() ? "result PASS\n" : "result FAIL\n");
    return rep.ok() ? 0 : 3;
}

int cmd_import_delta(const std::string& delta_path, const std::string& res_path,
                     const std::string& out) {
    Resolution res = load_resolution(res_path);
    auto delta = import_delta(delta_path, res);
    save_delta(delta, out);
    emit(fmt::format("imported {} entries -> {}\n", delta.size(), out));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"secext: secondary differential toolkit for minimal Adams resolutions"};
    app.require_subcommand(1);

    // resolve
    auto* resolve = app.add_subcommand("resolve", "compute or extend a minimal resolution");
    int r_maxdeg = 12, r_maxfilt = 6;
    std::string r_state;
    resolve->add_option("--max-deg", r_maxdeg, "top internal degree")->required();
    resolve->add_option("--max-filt", r_maxfilt, "top filtration")->required();
    resolve->add_option("--state", r_state, "resolution state file (extended if present)")
        ->required();

    // delta
    auto* delta = app.add_subcommand("delta", "solve for the secondary differential");
    std::string dl_res, dl_amap = "zero", dl_out;
    int dl_maxdeg = -1, dl_jobs = 1;
    delta->add_option("--res", dl_res, "resolution state file")->required();
    delta->add_option("--amap", dl_amap, "A-table file, or 'zero'");
    delta->add_option("--max-deg", dl_maxdeg, "solve through this degree (default: all)");
    delta->add_option("--out", dl_out, "output table file")->required();
    delta->add_option("--jobs", dl_jobs, "worker threads");

    // d2
    auto* d2cmd = app.add_subcommand("d2", "extract page-2 arrows from a table");
    std::string d2_delta, d2_out;
    d2cmd->add_option("--delta", d2_delta, "table file")->required();
    d2cmd->add_option("--out", d2_out, "arrow list file (stdout listing always printed)");

    // e3
    auto* e3cmd = app.add_subcommand("e3", "page-3 dimensions per bidegree");
    std::string e3_res, e3_d2, e3_out;
    int e3_solved = -1;
    e3cmd->add_option("--res", e3_res, "resolution state file")->required();
    e3cmd->add_option("--d2", e3_d2, "arrow list file (default: no arrows)");
    e3cmd->add_option("--solved-deg", e3_solved, "degree through which arrows are known");
    e3cmd->add_option("--out", e3_out, "output file (default: stdout)");

    // chart
    auto* chart = app.add_subcommand("chart", "render an Adams chart");
    std::string ch_res, ch_d2, ch_format = "text", ch_out;
    int ch_stem = 40, ch_filt = 15;
    chart->add_option("--res", ch_res, "resolution state file")->required();
    chart->add_option("--d2", ch_d2, "arrow list file");
    chart->add_option("--format", ch_format, "text or svg");
    chart->add_option("--max-stem", ch_stem, "rightmost stem");
    chart->add_option("--max-filt", ch_filt, "top filtration row");
    chart->add_option("--out", ch_out, "output file (default: stdout)");

    // verify
    auto* verify = app.add_subcommand("verify", "check resolution and secondary structure");
    std::string v_res, v_delta, v_amap = "zero", v_window;
    verify->add_option("--res", v_res, "resolution state file")->required();
    verify->add_option("--delta", v_delta, "table file (enables secondary checks)");
    verify->add_option("--amap", v_amap, "A-table file, or 'zero'");
    verify->add_option("--window", v_window, "exactness window mMin:mMax,dMin:dMax");

    // validate-amap
    auto* vamap = app.add_subcommand("validate-amap", "randomized A-table consistency checks");
    std::string va_amap;
    int va_cap = 20, va_samples = 200;
    uint64_t va_seed = 12345;
    vamap->add_option("--amap", va_amap, "A-table file, or 'zero'")->required();
    vamap->add_option("--degree-cap", va_cap, "top degree sampled");
    vamap->add_option("--seed", va_seed, "RNG seed");
    vamap->add_option("--samples", va_samples, "sample count");

    // import-delta
    auto* imp = app.add_subcommand("import-delta", "validate a table against a resolution");
    std::string im_delta, im_res, im_out;
    imp->add_option("--delta", im_delta, "table file")->required();
    imp->add_option("--res", im_res, "resolution state file")->required();
    imp->add_option("--out", im_out, "normalized output file")->required();

    // pipeline
    auto* pipe = app.add_subcommand("pipeline", "resolve -> delta -> d2 -> e3 -> chart");
    PipelineConfig cfg;
    std::string p_format = "text";
    pipe->add_option("--max-deg", cfg.max_deg, "top internal degree");
    pipe->add_option("--max-filt", cfg.max_filt, "top filtration");
    pipe->add_option("--amap", cfg.amap, "A-table file, or 'zero'");
    pipe->add_option("--delta", cfg.delta_file, "table file: extract-only mode");
    pipe->add_option("--out-dir", cfg.out_dir, "artifact directory");
    pipe->add_option("--cache", cfg.cache_dir, "cache directory (default: $SECEXT_CACHE or .secext)");
    pipe->add_option("--jobs", cfg.jobs, "worker threads");
    pipe->add_flag("--resume", cfg.resume, "extend a cached resolution state");
    pipe->add_option("--format", p_format, "chart format: text or svg");
    pipe->add_option("--max-stem", cfg.chart_max_stem, "chart rightmost stem");
    pipe->add_option("--chart-max-filt", cfg.chart_max_filt, "chart top filtration row");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(resolve)) return cmd_resolve(r_state, r_maxfilt, r_maxdeg);
        if (app.got_subcommand(delta)) return cmd_delta(dl_res, dl_amap, dl_maxdeg, dl_out, dl_jobs);
        if (app.got_subcommand(d2cmd)) return cmd_d2(d2_delta, d2_out);
        if (app.got_subcommand(e3cmd)) return cmd_e3(e3_res, e3_d2, e3_solved, e3_out);
        if (app.got_subcommand(chart))
            return cmd_chart(ch_res, ch_d2, ch_format, ch_stem, ch_filt, ch_out);
        if (app.got_subcommand(verify)) return cmd_verify(v_res, v_delta, v_amap, v_window);
        if (app.got_subcommand(vamap))
            return cmd_validate_amap(va_amap, va_cap, va_seed, va_samples);
        if (app.got_subcommand(imp)) return cmd_import_delta(im_delta, im_res, im_out);
        if (app.got_subcommand(pipe)) {
            if (p_format == "svg")
                cfg.chart_format = ChartFormat::Svg;
            else if (p_format != "text")
                throw DataError(fmt::format("unknown chart format '{}'", p_format));
            PipelineResult result = run_pipeline(cfg);
            emit(result.summary);
            return 0;
        }
    } catch (const InconsistentError& e) {
        fmt::print(stderr, "INCONSISTENT: {}\n", e.what());
        return 4;
    } catch (const VerifyError& e) {
        fmt::print(stderr, "verification failure: {}\n", e.what());
        return 3;
    } catch (const DataError& e) {
        fmt::print(stderr, "data error: {}\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 2;
    }
    return 1;
}
