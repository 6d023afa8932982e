#include "secext/secondary.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>

#include <fmt/format.h>

namespace secext {

/* Run fn(0..n-1) on `jobs` workers; rethrows the first worker exception. */
static void parallel_for(int jobs, size_t n, const std::function<void(size_t)>& fn) {
    if (n == 0) return;
    jobs = std::max(1, jobs);
    if (jobs == 1 || n == 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mtx;
    auto worker = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mtx);
                if (!err) err = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    int k = std::min<size_t>(static_cast<size_t>(jobs), n);
    threads.reserve(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (err) std::rethrow_exception(err);
}

using DDCache = std::map<Generator, std::vector<DDTerm>>;

static FreeEltA delta_rhs(const Resolution& res, const std::map<Generator, FreeEltA>& delta,
                          const ATable& atable, const FreeEltB& x, EvalMode mode,
                          const DDCache* cache) {
    FreeEltA out;
    for (const auto& [g, b] : x.terms) {
        if (g.m < 2)
            throw DataError(fmt::format("secondary value of {} needs filtration >= 2", to_string(g)));
        auto it = delta.find(g);
        if (it == delta.end())
            throw DataError(fmt::format("no tabulated secondary value for {}", to_string(g)));
        Steenrod pib = project_pi(b);
        out += act(pib, it->second);
        if (pib.is_zero()) continue;
        if (cache) {
            auto dd = cache->find(g);
            if (dd == cache->end())
                throw DataError(fmt::format("missing double differential for {}", to_string(g)));
            for (const DDTerm& term : dd->second)
                out.add(term.g, eval_A(atable, pib, term.r, mode));
        } else {
            for (const DDTerm& term : double_diff(res, g))
                out.add(term.g, eval_A(atable, pib, term.r, mode));
        }
    }
    return out;
}

FreeEltA delta_on_module_elt(const Resolution& res, const std::map<Generator, FreeEltA>& delta,
                             const ATable& atable, const FreeEltB& x, EvalMode mode) {
    return delta_rhs(res, delta, atable, x, mode, nullptr);
}

namespace {
struct SolveOut {
    FreeEltA value;
    EtaInfo info;
    bool consistent = true;
    std::string detail;
};
}  // namespace

static SolveOut solve_one(const Resolution& res, const ATable& atable, const DeltaTable& partial,
                          const DDCache& ddcache, const Generator& g, EvalMode mode) {
    SolveOut out;
    out.info.g = g;
    ModuleBasis target = res.basis(g.m - 2, g.d - 1);
    out.info.unknowns = target.size();

    if (g.m == 2) {
        /* The next differential lands in the augmentation; there is no
           equation in positive degrees, so every coefficient is free. */
        for (const auto& [h, w] : target.elems)
            out.info.assigns.push_back(
                EtaAssign{fmt::format("{} {}", word_str(w), to_string(h)), false, false});
        return out;
    }

    ModuleBasis eqspace = res.basis(g.m - 3, g.d - 1);
    out.info.equations = eqspace.size();

    FreeEltA rhs_elt =
        delta_rhs(res, partial.delta, atable, lifted_diff(res, g), mode, &ddcache);
    F2Vector rhs = to_coords(rhs_elt, eqspace);

    F2Matrix mat(eqspace.size(), target.size());
    for (int j = 0; j < target.size(); ++j) {
        const auto& [h, w] = target.elems[static_cast<size_t>(j)];
        FreeEltA img = act_word(w, res.diff_of(h));
        for (const auto& [k, c] : img.terms)
            for (const Word& u : c.terms) mat.set(eqspace.index(k, u), j);
    }

    SolveResult sol = solve(mat, rhs);
    if (!sol.consistent) {
        out.consistent = false;
        out.detail = fmt::format("no solution for {}: target value {} is outside the image",
                                 to_string(g), to_string(rhs_elt));
        return out;
    }

    F2Matrix reduced = mat;  // recover pivot columns for the diagnostics
    RrefResult rr = rref(reduced);
    std::vector<bool> pivot(static_cast<size_t>(target.size()), false);
    for (int p : rr.pivots) pivot[static_cast<size_t>(p)] = true;
    out.info.forced = rr.rank;
    for (int j = 0; j < target.size(); ++j) {
        const auto& [h, w] = target.elems[static_cast<size_t>(j)];
        out.info.assigns.push_back(EtaAssign{fmt::format("{} {}", word_str(w), to_string(h)),
                                             pivot[static_cast<size_t>(j)], sol.x.get(j)});
    }
    out.value = from_coords(sol.x, target);
    return out;
}

DeltaTable solve_delta(const Resolution& res, const ATable& atable, int max_deg, int jobs,
                       EvalMode mode) {
    if (max_deg > res.max_deg)
        throw DataError(fmt::format(
            "cannot solve through degree {}: resolution only reaches degree {}", max_deg,
            res.max_deg));
    DeltaTable table;
    DDCache ddcache;
    std::mutex cache_mtx;

    for (int d = 0; d <= max_deg; ++d) {
        std::vector<Generator> work;
        for (int m = 2; m <= res.max_filt; ++m)
            for (const Generator& g : res.gens_at(m, d)) work.push_back(g);
        std::sort(work.begin(), work.end());

        std::vector<SolveOut> results(work.size());
        parallel_for(jobs, work.size(), [&](size_t i) {
            results[i] = solve_one(res, atable, table, ddcache, work[i], mode);
        });

        for (size_t i = 0; i < work.size(); ++i) {
            if (results[i].consistent) continue;
            table.inconsistent = work[i];
            table.inconsistent_detail = results[i].detail;
            table.solved_through = d - 1;
            return table;
        }
        for (size_t i = 0; i < work.size(); ++i) {
            table.delta.emplace(work[i], std::move(results[i].value));
            table.info.emplace(work[i], std::move(results[i].info));
        }

        /* Double differentials of this degree feed the right-hand sides of
           later degrees (and the verification layer). */
        std::vector<std::vector<DDTerm>> dds(work.size());
        parallel_for(jobs, work.size(), [&](size_t i) { dds[i] = double_diff(res, work[i]); });
        {
            std::lock_guard<std::mutex> lock(cache_mtx);
            for (size_t i = 0; i < work.size(); ++i) ddcache.emplace(work[i], std::move(dds[i]));
        }
        table.solved_through = d;
    }
    return table;
}

std::vector<std::string> check_maineq(const Resolution& res, const DeltaTable& table,
                                      const ATable& atable) {
    std::vector<std::string> failures;
    for (const auto& [g, val] : table.delta) {
        if (g.m < 3) continue;  // both sides land in the unmodeled augmentation otherwise
        FreeEltA lhs = res.apply_diff(val);
        FreeEltA rhs = delta_on_module_elt(res, table.delta, atable, lifted_diff(res, g));
        if (!(lhs == rhs)) {
            FreeEltA residual = lhs;
            residual += rhs;
            failures.push_back(fmt::format("main equation fails at {}: residual {}", to_string(g),
                                           to_string(residual)));
        }
    }
    return failures;
}

int D2Map::arrow_count() const {
    int n = 0;
    for (const auto& [src, dsts] : arrows) n += static_cast<int>(dsts.size());
    return n;
}

D2Map extract_d2(const std::map<Generator, FreeEltA>& delta) {
    D2Map d2;
    for (const auto& [g, val] : delta)
        for (const auto& [h, c] : val.terms) {
            if (!c.contains(Word{})) continue;
            if (h.d != g.d - 1 || h.m != g.m - 2)
                throw DataError(fmt::format(
                    "unit coefficient on {} in the secondary value of {} violates the degree "
                    "shift",
                    to_string(h), to_string(g)));
            d2.arrows[h].push_back(g);
        }
    for (auto& [src, dsts] : d2.arrows) std::sort(dsts.begin(), dsts.end());
    return d2;
}

std::vector<std::string> check_d2_squares(const D2Map& d2) {
    std::vector<std::string> failures;
    for (const auto& [src, dsts] : d2.arrows) {
        /* Two-step paths src -> mid -> far must cancel in pairs over F2. */
        std::map<Generator, int> far_parity;
        for (const Generator& mid : dsts) {
            auto it = d2.arrows.find(mid);
            if (it == d2.arrows.end()) continue;
            for (const Generator& far : it->second) far_parity[far] ^= 1;
        }
        for (const auto& [far, parity] : far_parity)
            if (parity)
                failures.push_back(
                    fmt::format("d2(d2({})) hits {}", to_string(src), to_string(far)));
    }
    return failures;
}

std::map<std::pair<int, int>, E3Cell> e3_dimensions(const Resolution& res, const D2Map& d2,
                                                    int solved_deg) {
    std::map<std::pair<int, int>, E3Cell> cells;
    for (int m = 0; m <= res.max_filt; ++m)
        for (const Generator& g : res.gens[static_cast<size_t>(m)])
            cells[{m, g.d}].e2 += 1;

    /* rank of the arrow matrix out of each bidegree */
    std::map<std::pair<int, int>, F2Matrix> mats;
    for (const auto& [src, dsts] : d2.arrows) {
        auto key = std::make_pair(src.m, src.d);
        auto cell = cells.find(key);
        if (cell == cells.end() || src.q >= cell->second.e2)
            throw DataError(fmt::format("arrow source {} is not a generator", to_string(src)));
        auto tkey = std::make_pair(src.m + 2, src.d + 1);
        auto tcell = cells.find(tkey);
        int tdim = tcell == cells.end() ? 0 : tcell->second.e2;
        auto [it, inserted] = mats.try_emplace(key, F2Matrix(cell->second.e2, tdim));
        F2Matrix& mat = it->second;
        for (const Generator& dst : dsts) {
            if (dst.q >= tdim)
                throw DataError(fmt::format("arrow target {} is not a generator", to_string(dst)));
            mat.set(src.q, dst.q);
        }
    }
    std::map<std::pair<int, int>, int> out_rank;
    for (auto& [key, mat] : mats) out_rank[key] = rank(std::move(mat));

    for (auto& [key, cell] : cells) {
        auto [m, d] = key;
        auto out = out_rank.find(key);
        if (out != out_rank.end()) cell.rank_out = out->second;
        auto in = out_rank.find(std::make_pair(m - 2, d - 1));
        if (in != out_rank.end()) cell.rank_in = in->second;
        cell.out_known = (m + 2 <= res.max_filt) && (d + 1 <= solved_deg);
    }
    return cells;
}

static std::string_view trim_sv(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

void save_delta(const std::map<Generator, FreeEltA>& delta, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError(fmt::format("cannot write delta file '{}'", path));
    for (const auto& [g, val] : delta)
        out << fmt::format("delta {} = {}\n", to_string(g), to_string(val));
    if (!out) throw DataError(fmt::format("write failed for '{}'", path));
}

std::map<Generator, FreeEltA> parse_delta_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot open delta file '{}'", path));
    std::map<Generator, FreeEltA> table;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view s = trim_sv(line);
        if (s.empty() || s.front() == '#') continue;
        auto fail = [&](const std::string& why) -> DataError {
            return DataError(fmt::format("{}:{}: {}", path, lineno, why));
        };
        if (s.substr(0, 6) != "delta ") throw fail(fmt::format("unrecognized line '{}'", s));
        size_t eq = s.find('=');
        if (eq == std::string_view::npos) throw fail("missing '='");
        Generator g = parse_generator(trim_sv(s.substr(6, eq - 6)));
        if (g.m < 2) throw fail(fmt::format("{} has filtration < 2", to_string(g)));
        FreeEltA val = parse_free_elt(trim_sv(s.substr(eq + 1)));
        for (const auto& [h, c] : val.terms) {
            if (h.m != g.m - 2)
                throw fail(fmt::format("term on {} violates the filtration drop of 2 from {}",
                                       to_string(h), to_string(g)));
            if (h.d + c.degree() != g.d - 1)
                throw fail(fmt::format("term on {} violates the degree shift of -1 from {}",
                                       to_string(h), to_string(g)));
        }
        if (!table.emplace(g, std::move(val)).second)
            throw fail(fmt::format("duplicate entry for {}", to_string(g)));
    }
    return table;
}

std::map<Generator, FreeEltA> import_delta(const std::string& path, const Resolution& res) {
    std::map<Generator, FreeEltA> table = parse_delta_file(path);
    for (const auto& [g, val] : table) {
        if (!res.has_gen(g))
            throw DataError(fmt::format("{}: unknown generator {}", path, to_string(g)));
        for (const auto& [h, c] : val.terms)
            if (!res.has_gen(h))
                throw DataError(fmt::format("{}: unknown generator {}", path, to_string(h)));
    }
    return table;
}

void save_d2(const D2Map& d2, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError(fmt::format("cannot write d2 file '{}'", path));
    for (const auto& [src, dsts] : d2.arrows)
        for (const Generator& dst : dsts)
            out << fmt::format("{} -> {}\n", to_string(src), to_string(dst));
    if (!out) throw DataError(fmt::format("write failed for '{}'", path));
}

D2Map load_d2(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot open d2 file '{}'", path));
    D2Map d2;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view s = trim_sv(line);
        if (s.empty() || s.front() == '#') continue;
        size_t arrow = s.find("->");
        if (arrow == std::string_view::npos)
            throw DataError(fmt::format("{}:{}: expected 'g[...] -> g[...]'", path, lineno));
        Generator src = parse_generator(trim_sv(s.substr(0, arrow)));
        Generator dst = parse_generator(trim_sv(s.substr(arrow + 2)));
        if (dst.m != src.m + 2 || dst.d != src.d + 1)
            throw DataError(fmt::format(
                "{}:{}: arrow {} -> {} must raise filtration by 2 and degree by 1", path, lineno,
                to_string(src), to_string(dst)));
        auto& dsts = d2.arrows[src];
        if (std::find(dsts.begin(), dsts.end(), dst) != dsts.end())
            throw DataError(fmt::format("{}:{}: duplicate arrow", path, lineno));
        dsts.push_back(dst);
    }
    for (auto& [src, dsts] : d2.arrows) std::sort(dsts.begin(), dsts.end());
    return d2;
}

}  // namespace secext
