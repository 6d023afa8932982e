#include "secext/pipeline.hpp"

#include <fmt/format.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace secext {

std::string default_cache_dir() {
    if (const char* env = std::getenv("SECEXT_CACHE"); env && *env) return env;
    return ".secext";
}

uint64_t content_hash(std::string_view data) {
    uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(fmt::format("cannot read '{}'", path));
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

void write_file(const std::string& path, std::string_view data) {
    fs::path p(path);
    std::error_code ec;
    if (fs::exists(p, ec) && !fs::is_regular_file(p, ec)) {  // pipes, /dev/*, ...
        std::ofstream out(p, std::ios::binary);
        if (!out) throw DataError(fmt::format("cannot write '{}'", path));
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
        return;
    }
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    /* write-then-rename keeps a cache entry from ever being seen half-written */
    fs::path tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError(fmt::format("cannot write '{}'", path));
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
        if (!out) throw DataError(fmt::format("short write to '{}'", path));
    }
    fs::rename(tmp, p);
}

std::string e3_table_text(const std::map<std::pair<int, int>, E3Cell>& cells) {
    std::string out = "# m d stem e2 rank_in rank_out out_known e3\n";
    for (const auto& [key, cell] : cells) {
        auto [m, d] = key;
        out += fmt::format("{} {} {} {} {} {} {} {}\n", m, d, d - m, cell.e2, cell.rank_in,
                           cell.rank_out, cell.out_known ? 1 : 0, cell.e3());
    }
    return out;
}

static std::string hash_name(std::string_view stage, uint64_t h) {
    return fmt::format("{}-{:016x}.txt", stage, h);
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
    PipelineResult result;
    std::string cache = cfg.cache_dir.empty() ? default_cache_dir() : cfg.cache_dir;
    fs::create_directories(cache);
    fs::create_directories(cfg.out_dir);
    auto out_path = [&](std::string_view name) { return (fs::path(cfg.out_dir) / name).string(); };
    auto cache_path = [&](const std::string& name) { return (fs::path(cache) / name).string(); };

    if (!cfg.delta_file.empty()) {
        // extract-only: import the table, pull out the arrows, draw them
        auto delta = parse_delta_file(cfg.delta_file);
        result.d2 = extract_d2(delta);
        result.d2_path = out_path("d2.txt");
        save_d2(result.d2, result.d2_path);
        ChartSpec spec;
        spec.max_stem = cfg.chart_max_stem;
        spec.max_filt = cfg.chart_max_filt;
        spec.arrows = result.d2;
        spec.format = cfg.chart_format;
        result.chart_path =
            out_path(cfg.chart_format == ChartFormat::Svg ? "chart.svg" : "chart.txt");
        write_file(result.chart_path, render_chart(spec));
        result.summary += fmt::format("d2: {} arrows (extract-only) -> {}\n",
                                      result.d2.arrow_count(), result.d2_path);
        for (const auto& [src, tgts] : result.d2.arrows)
            for (const Generator& t : tgts)
                result.summary += fmt::format("  {} -> {}\n", to_string(src), to_string(t));
        result.summary += fmt::format("chart: -> {}\n", result.chart_path);
        return result;
    }

    // resolve
    uint64_t res_key = content_hash(fmt::format("resolve|{}|{}", cfg.max_filt, cfg.max_deg));
    std::string res_cache = cache_path(hash_name("res", res_key));
    std::string latest = cache_path("res-latest.txt");
    Resolution res;
    if (fs::exists(res_cache)) {
        res = load_resolution(res_cache);
        result.cached_resolution = true;
    } else if (cfg.resume && fs::exists(latest)) {
        res = load_resolution(latest);
        extend_resolution(res, cfg.max_filt, cfg.max_deg);
        save_resolution(res, res_cache);
    } else {
        res = compute_resolution(cfg.max_filt, cfg.max_deg);
        save_resolution(res, res_cache);
    }
    write_file(latest, read_file(res_cache));
    result.resolution_path = out_path("resolution.txt");
    write_file(result.resolution_path, read_file(res_cache));
    int gen_total = 0;
    for (const auto& level : res.gens) gen_total += static_cast<int>(level.size());
    result.summary += fmt::format("resolve: filtration <= {}, degree <= {}, {} generators{} -> {}\n",
                                  res.max_filt, res.max_deg, gen_total,
                                  result.cached_resolution ? " (cached)" : "",
                                  result.resolution_path);

    // delta
    ATable atable = ATable::zero();
    uint64_t amap_hash = content_hash("zero");
    if (cfg.amap != "zero" && !cfg.amap.empty()) {
        std::string bytes = read_file(cfg.amap);
        amap_hash = content_hash(bytes);
        atable = load_atable(cfg.amap);
    }
    uint64_t delta_key = content_hash(fmt::format(
        "delta|{:016x}|{:016x}|{}", content_hash(read_file(res_cache)), amap_hash, cfg.max_deg));
    std::string delta_cache = cache_path(hash_name("delta", delta_key));
    std::map<Generator, FreeEltA> delta;
    if (fs::exists(delta_cache)) {
        delta = parse_delta_file(delta_cache);
        result.cached_delta = true;
    } else {
        DeltaTable table = solve_delta(res, atable, cfg.max_deg, cfg.jobs);
        if (!table.ok())
            throw InconsistentError(fmt::format("solve failed at {}: {}",
                                                to_string(*table.inconsistent),
                                                table.inconsistent_detail));
        delta = table.delta;
        save_delta(delta, delta_cache);
    }
    result.delta_path = out_path("delta.txt");
    write_file(result.delta_path, read_file(delta_cache));
    result.summary += fmt::format("delta: {} entries{} -> {}\n", delta.size(),
                                  result.cached_delta ? " (cached)" : "", result.delta_path);

    // d2
    result.d2 = extract_d2(delta);
    result.d2_path = out_path("d2.txt");
    save_d2(result.d2, result.d2_path);
    result.summary +=
        fmt::format("d2: {} arrows -> {}\n", result.d2.arrow_count(), result.d2_path);

    // e3
    auto cells = e3_dimensions(res, result.d2, cfg.max_deg);
    result.e3_path = out_path("e3.txt");
    write_file(result.e3_path, e3_table_text(cells));
    result.summary += fmt::format("e3: {} bidegrees -> {}\n", cells.size(), result.e3_path);

    // chart
    ChartSpec spec = chart_spec(res, result.d2, cfg.chart_max_stem, cfg.chart_max_filt);
    spec.format = cfg.chart_format;
    result.chart_path =
        out_path(cfg.chart_format == ChartFormat::Svg ? "chart.svg" : "chart.txt");
    write_file(result.chart_path, render_chart(spec));
    result.summary += fmt::format("chart: -> {}\n", result.chart_path);
    return result;
}

}  // namespace secext
