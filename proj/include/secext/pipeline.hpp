#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "secext/chart.hpp"
#include "secext/secondary.hpp"

namespace secext {

/* End-to-end batch run: resolve -> delta -> d2 -> e3 -> chart, with artifact
   caching keyed on content hashes.  When `delta_file` is set the run is
   extract-only: the table is imported as-is and only d2 and the chart are
   produced (no resolution context is required or consulted). */
struct PipelineConfig {
    int max_filt = 6;
    int max_deg = 12;
    std::string amap = "zero";  // "zero" or a path to an A-table file
    std::string delta_file;     // extract-only mode when nonempty
    std::string out_dir = ".";
    std::string cache_dir;  // empty: $SECEXT_CACHE, else ".secext"
    int jobs = 1;
    bool resume = false;  // extend a previously cached resolution state
    ChartFormat chart_format = ChartFormat::Text;
    int chart_max_stem = 40;
    int chart_max_filt = 15;
};

struct PipelineResult {
    bool cached_resolution = false;
    bool cached_delta = false;
    std::string resolution_path, delta_path, d2_path, e3_path, chart_path;
    D2Map d2;
    std::string summary;  // one line per stage, deterministic
};

std::string default_cache_dir();
uint64_t content_hash(std::string_view data);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view data);

// Fixed-width text table of page-3 dimensions, one row per bidegree.
std::string e3_table_text(const std::map<std::pair<int, int>, E3Cell>& cells);

PipelineResult run_pipeline(const PipelineConfig& cfg);

}  // namespace secext
