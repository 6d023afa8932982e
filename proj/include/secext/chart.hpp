#pragma once

#include <map>
#include <string>
#include <utility>

#include "secext/resolution.hpp"
#include "secext/secondary.hpp"

namespace secext {

enum class ChartFormat { Text, Svg };

/* An Adams chart: dot counts per (stem, filtration) cell plus the arrows of
   the secondary differential.  Rendering is deterministic byte-for-byte. */
struct ChartSpec {
    int max_stem = 40;
    int max_filt = 15;
    std::map<std::pair<int, int>, int> dots;  // (stem, m) -> count
    D2Map arrows;
    ChartFormat format = ChartFormat::Text;
};

// Collect per-(stem, m) generator counts of `res` into a chart.
ChartSpec chart_spec(const Resolution& res, const D2Map& d2, int max_stem = 40,
                     int max_filt = 15);

std::string render_text(const ChartSpec& spec);
std::string render_svg(const ChartSpec& spec);
std::string render_chart(const ChartSpec& spec);

}  // namespace secext
