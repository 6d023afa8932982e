#include "secext/chart.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <set>
#include <vector>

namespace secext {

ChartSpec chart_spec(const Resolution& res, const D2Map& d2, int max_stem, int max_filt) {
    ChartSpec spec;
    spec.max_stem = max_stem;
    spec.max_filt = max_filt;
    for (const auto& level : res.gens)
        for (const Generator& g : level) {
            if (g.stem() > max_stem || g.m > max_filt) continue;
            ++spec.dots[{g.stem(), g.m}];
        }
    spec.arrows = d2;
    return spec;
}

static std::vector<std::pair<Generator, Generator>> sorted_arrows(const D2Map& d2) {
    std::vector<std::pair<Generator, Generator>> out;
    for (const auto& [src, tgts] : d2.arrows)
        for (const Generator& t : tgts) out.emplace_back(src, t);
    std::sort(out.begin(), out.end());
    return out;
}

std::string render_text(const ChartSpec& spec) {
    std::string out;
    out += fmt::format("# Adams chart: stems 0..{} (columns, d-m), filtrations 0..{} (rows, m)\n",
                       spec.max_stem, spec.max_filt);
    out += "# cell: count digit ('.' if empty); marker: '-' arrow source, 'o' arrow target\n";
    if (spec.dots.empty() && spec.arrows.empty()) return out;

    std::set<std::pair<int, int>> sources, targets;
    for (const auto& [src, tgt] : sorted_arrows(spec.arrows)) {
        sources.insert({src.stem(), src.m});
        targets.insert({tgt.stem(), tgt.m});
    }

    for (int m = spec.max_filt; m >= 0; --m) {
        out += fmt::format("{:>3} |", m);
        for (int s = 0; s <= spec.max_stem; ++s) {
            auto it = spec.dots.find({s, m});
            char count_ch = '.';
            if (it != spec.dots.end() && it->second > 0)
                count_ch = it->second > 9 ? '#' : static_cast<char>('0' + it->second);
            bool is_src = sources.count({s, m}) > 0;
            bool is_tgt = targets.count({s, m}) > 0;
            char mark = is_src && is_tgt ? 'x' : is_src ? '-' : is_tgt ? 'o' : ' ';
            out += count_ch;
            out += mark;
        }
        out += '\n';
    }
    out += "    +";
    out += std::string(static_cast<size_t>(spec.max_stem + 1) * 2, '-');
    out += '\n';
    std::string axis(static_cast<size_t>(spec.max_stem + 1) * 2 + 5, ' ');
    for (int s = 0; s <= spec.max_stem; s += 5) {
        std::string label = fmt::format("{}", s);
        size_t pos = static_cast<size_t>(s) * 2 + 5;
        for (size_t i = 0; i < label.size() && pos + i < axis.size(); ++i)
            axis[pos + i] = label[i];
    }
    out += axis;
    out += '\n';

    auto arrows = sorted_arrows(spec.arrows);
    if (!arrows.empty()) {
        out += "arrows:\n";
        for (const auto& [src, tgt] : arrows)
            out += fmt::format("  {} -> {}\n", to_string(src), to_string(tgt));
    }
    return out;
}

std::string render_svg(const ChartSpec& spec) {
    /* All coordinates are integers (doubled scale) so output bytes are
       reproducible with no floating-point formatting involved. */
    const int cell = 32, margin = 64, radius = 6, spread = 14;
    int w = 2 * margin + (spec.max_stem + 1) * cell;
    int h = 2 * margin + (spec.max_filt + 1) * cell;
    auto cx = [&](int stem) { return margin + stem * cell + cell / 2; };
    auto cy = [&](int m) { return h - margin - m * cell - cell / 2; };

    std::string out;
    out += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" "
        "viewBox=\"0 0 {} {}\">\n",
        w / 2, h / 2, w, h);
    out += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", w,
                       h);
    for (int s = 0; s <= spec.max_stem; s += 5)
        out += fmt::format(
            "<text x=\"{}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\" "
            "fill=\"gray\">{}</text>\n",
            cx(s), h - margin / 2, s);
    for (int m = 0; m <= spec.max_filt; m += 5)
        out += fmt::format(
            "<text x=\"{}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\" "
            "fill=\"gray\">{}</text>\n",
            margin / 2, cy(m) + 5, m);
    for (const auto& [src, tgt] : sorted_arrows(spec.arrows)) {
        if (src.stem() > spec.max_stem || src.m > spec.max_filt || tgt.stem() > spec.max_stem ||
            tgt.m > spec.max_filt)
            continue;
        out += fmt::format(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\" "
            "stroke-width=\"2\"/>\n",
            cx(src.stem()), cy(src.m), cx(tgt.stem()), cy(tgt.m));
    }
    for (const auto& [key, count] : spec.dots) {
        auto [stem, m] = key;
        if (stem > spec.max_stem || m > spec.max_filt || count <= 0) continue;
        for (int i = 0; i < count; ++i) {
            int x = cx(stem) + spread * i - spread * (count - 1) / 2;
            out += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"black\"/>\n", x,
                               cy(m), radius);
        }
    }
    out += "</svg>\n";
    return out;
}

std::string render_chart(const ChartSpec& spec) {
    return spec.format == ChartFormat::Svg ? render_svg(spec) : render_text(spec);
}

}  // namespace secext
