#include "secext/resolution.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace secext {

std::string to_string(const Generator& g) { return fmt::format("g[{},{},{}]", g.m, g.d, g.q); }

static std::string_view trim_sv(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

Generator parse_generator(std::string_view s) {
    s = trim_sv(s);
    if (s.size() < 7 || s.substr(0, 2) != "g[" || s.back() != ']')
        throw DataError(fmt::format("bad generator token '{}': expected g[m,d,q]", s));
    std::string_view inner = s.substr(2, s.size() - 3);
    int vals[3];
    size_t pos = 0;
    for (int i = 0; i < 3; ++i) {
        size_t comma = inner.find(',', pos);
        std::string_view tok;
        if (i < 2) {
            if (comma == std::string_view::npos)
                throw DataError(fmt::format("bad generator token '{}'", s));
            tok = trim_sv(inner.substr(pos, comma - pos));
            pos = comma + 1;
        } else {
            if (inner.find(',', pos) != std::string_view::npos)
                throw DataError(fmt::format("bad generator token '{}'", s));
            tok = trim_sv(inner.substr(pos));
        }
        if (tok.empty()) throw DataError(fmt::format("bad generator token '{}'", s));
        int v = 0;
        for (char ch : tok) {
            if (ch < '0' || ch > '9')
                throw DataError(fmt::format("bad generator token '{}'", s));
            v = v * 10 + (ch - '0');
        }
        vals[i] = v;
    }
    return Generator{vals[0], vals[1], vals[2]};
}

Steenrod FreeEltA::coeff(const Generator& g) const {
    auto it = terms.find(g);
    return it == terms.end() ? Steenrod::zero() : it->second;
}

void FreeEltA::add(const Generator& g, const Steenrod& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms.emplace(g, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) terms.erase(it);
    }
}

FreeEltA& FreeEltA::operator+=(const FreeEltA& o) {
    for (const auto& [g, c] : o.terms) add(g, c);
    return *this;
}

int degree(const FreeEltA& x) {
    if (x.is_zero()) return -1;
    int d = -1;
    for (const auto& [g, c] : x.terms) {
        int dt = g.d + c.degree();
        if (d == -1) d = dt;
        if (dt != d) throw Error("FreeEltA: inhomogeneous element");
    }
    return d;
}

FreeEltA act(const Steenrod& a, const FreeEltA& x) {
    FreeEltA r;
    for (const auto& [g, c] : x.terms) r.add(g, multiply(a, c));
    return r;
}

FreeEltA act_word(const Word& w, const FreeEltA& x) {
    FreeEltA r;
    for (const auto& [g, c] : x.terms) r.add(g, act_word(w, c));
    return r;
}

std::string to_string(const FreeEltA& x) {
    if (x.is_zero()) return "0";
    std::string s;
    bool first = true;
    for (const auto& [g, c] : x.terms) {
        if (!first) s += " + ";
        first = false;
        if (c.terms.size() == 1)
            s += fmt::format("{} {}", word_str(c.terms.front()), to_string(g));
        else
            s += fmt::format("({}) {}", to_string(c), to_string(g));
    }
    return s;
}

FreeEltA parse_free_elt(std::string_view s) {
    s = trim_sv(s);
    if (s == "0") return {};
    FreeEltA out;
    size_t start = 0;
    while (start <= s.size()) {
        /* split on '+' at parenthesis depth 0 */
        int depth = 0;
        size_t plus = std::string_view::npos;
        for (size_t i = start; i < s.size(); ++i) {
            if (s[i] == '(') ++depth;
            if (s[i] == ')') --depth;
            if (s[i] == '+' && depth == 0) {
                plus = i;
                break;
            }
        }
        std::string_view term =
            trim_sv(s.substr(start, plus == std::string_view::npos ? plus : plus - start));
        if (term.empty()) throw DataError(fmt::format("bad module element '{}': empty term", s));

        Steenrod c = Steenrod::unit();
        std::string_view gen_part = term;
        if (term.front() == '(') {
            size_t close = term.find(')');
            if (close == std::string_view::npos)
                throw DataError(fmt::format("bad module element '{}': unbalanced parens", s));
            c = parse_steenrod(term.substr(1, close - 1));
            gen_part = trim_sv(term.substr(close + 1));
        } else {
            size_t gpos = std::string_view::npos;
            for (size_t i = 0; i + 1 < term.size(); ++i)
                if (term[i] == 'g' && term[i + 1] == '[') {
                    gpos = i;
                    break;
                }
            if (gpos == std::string_view::npos)
                throw DataError(fmt::format("bad module element '{}': no generator in '{}'", s, term));
            if (gpos > 0) {
                std::string_view cs = trim_sv(term.substr(0, gpos));
                if (!cs.empty()) c = parse_steenrod(cs);
            }
            gen_part = trim_sv(term.substr(gpos));
        }
        if (c.is_zero())
            throw DataError(fmt::format("bad module element '{}': zero coefficient", s));
        /* the coefficient must be homogeneous */
        for (const Word& w : c.terms)
            if (word_degree(w) != c.degree())
                throw DataError(
                    fmt::format("bad module element '{}': mixed-degree coefficient", s));
        out.add(parse_generator(gen_part), c);
        if (plus == std::string_view::npos) break;
        start = plus + 1;
    }
    return out;
}

void FreeEltB::add(const Generator& g, const B0Elt& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms.emplace(g, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) terms.erase(it);
    }
}

FreeEltB& FreeEltB::operator+=(const FreeEltB& o) {
    for (const auto& [g, c] : o.terms) add(g, c);
    return *this;
}

int ModuleBasis::index(const Generator& g, const Word& w) const {
    auto it = start.find(g);
    if (it == start.end())
        throw Error(fmt::format("module basis: unknown generator {}", to_string(g)));
    return it->second + admissible_index(t - g.d, w);
}

F2Vector to_coords(const FreeEltA& x, const ModuleBasis& basis) {
    F2Vector v(basis.size());
    for (const auto& [g, c] : x.terms)
        for (const Word& w : c.terms) v.set(basis.index(g, w));
    return v;
}

FreeEltA from_coords(const F2Vector& v, const ModuleBasis& basis) {
    FreeEltA x;
    for (int i = 0; i < basis.size(); ++i)
        if (v.get(i)) x.add(basis.elems[i].first, Steenrod::of_word(basis.elems[i].second));
    return x;
}

bool Resolution::has_gen(const Generator& g) const {
    if (g.m < 0 || g.m >= static_cast<int>(gens.size())) return false;
    return std::binary_search(gens[g.m].begin(), gens[g.m].end(), g);
}

const FreeEltA& Resolution::diff_of(const Generator& g) const {
    static const FreeEltA empty;
    if (g.m == 0) {
        if (!has_gen(g)) throw DataError(fmt::format("unknown generator {}", to_string(g)));
        return empty;
    }
    auto it = diffs.find(g);
    if (it == diffs.end()) throw DataError(fmt::format("unknown generator {}", to_string(g)));
    return it->second;
}

std::vector<Generator> Resolution::gens_at(int m, int d) const {
    std::vector<Generator> out;
    if (m < 0 || m >= static_cast<int>(gens.size())) return out;
    for (const Generator& g : gens[m])
        if (g.d == d) out.push_back(g);
    return out;
}

int Resolution::gen_count(int m) const {
    if (m < 0 || m >= static_cast<int>(gens.size())) return 0;
    return static_cast<int>(gens[m].size());
}

ModuleBasis Resolution::basis(int m, int t) const {
    ModuleBasis b;
    b.t = t;
    if (m < 0 || m >= static_cast<int>(gens.size())) return b;
    for (const Generator& g : gens[m]) {
        if (g.d > t) continue;
        b.start.emplace(g, b.size());
        for (const Word& w : admissible_basis(t - g.d)) b.elems.emplace_back(g, w);
    }
    return b;
}

FreeEltA Resolution::apply_diff(const FreeEltA& x) const {
    FreeEltA r;
    for (const auto& [g, c] : x.terms) {
        if (g.m == 0) continue;
        r += act(c, diff_of(g));
    }
    return r;
}

/* Add the generators of bidegree (m, t): one per kernel vector of the
   previous differential that is independent of the image of the current
   one. Requires all bidegrees (m', t) with m' < m and (m, t') with t' < t
   to be complete. */
static void step(Resolution& res, int m, int t) {
    ModuleBasis bprev = res.basis(m - 1, t);
    ModuleBasis bcur = res.basis(m, t);
    int n = bprev.size();

    F2Span span(n);
    for (const auto& [g, w] : bcur.elems)
        span.insert(to_coords(act_word(w, res.diff_of(g)), bprev));

    std::vector<F2Vector> kernel;
    if (m == 1) {
        /* Augmentation kernel: everything in positive degrees. */
        if (t > 0)
            for (int i = 0; i < n; ++i) {
                F2Vector e(n);
                e.set(i);
                kernel.push_back(std::move(e));
            }
    } else {
        ModuleBasis bpp = res.basis(m - 2, t);
        F2Matrix mat(bpp.size(), n);
        for (int j = 0; j < n; ++j) {
            const auto& [g, w] = bprev.elems[static_cast<size_t>(j)];
            FreeEltA img = act_word(w, res.diff_of(g));
            for (const auto& [h, c] : img.terms)
                for (const Word& u : c.terms) mat.set(bpp.index(h, u), j);
        }
        kernel = kernel_basis(mat);
    }

    int q = static_cast<int>(res.gens_at(m, t).size());
    for (F2Vector& v : kernel) {
        F2Vector copy = v;
        if (!span.insert(std::move(copy))) continue;
        Generator g{m, t, q++};
        res.gens[m].push_back(g);
        res.diffs.emplace(g, from_coords(v, bprev));
    }
}

void extend_resolution(Resolution& res, int max_filt, int max_deg) {
    if (max_filt < 0 || max_deg < 0) throw Error("resolution window must be nonnegative");
    if (res.gens.empty()) {
        res.gens.resize(1);
        res.gens[0].push_back(Generator{0, 0, 0});
        res.max_filt = 0;
        res.max_deg = max_deg;  // filtration 0 is free on one generator in any degree
    }
    int tf = std::max(res.max_filt, max_filt);
    int td = std::max(res.max_deg, max_deg);
    res.gens.resize(static_cast<size_t>(tf) + 1);

    for (int t = res.max_deg + 1; t <= td; ++t)
        for (int m = 1; m <= res.max_filt; ++m) step(res, m, t);
    for (int m = res.max_filt + 1; m <= tf; ++m)
        for (int t = 0; t <= td; ++t) step(res, m, t);

    res.max_filt = tf;
    res.max_deg = td;
}

Resolution compute_resolution(int max_filt, int max_deg) {
    Resolution res;
    extend_resolution(res, max_filt, max_deg);
    return res;
}

void save_resolution(const Resolution& res, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError(fmt::format("cannot write resolution file '{}'", path));
    out << "format secext-res 1\n";
    out << "maxfilt " << res.max_filt << "\n";
    out << "maxdeg " << res.max_deg << "\n";
    for (const auto& level : res.gens)
        for (const Generator& g : level) out << fmt::format("gen {} {} {}\n", g.m, g.d, g.q);
    for (size_t m = 1; m < res.gens.size(); ++m)
        for (const Generator& g : res.gens[m])
            out << fmt::format("d {} = {}\n", to_string(g), to_string(res.diff_of(g)));
    if (!out) throw DataError(fmt::format("write failed for '{}'", path));
}

Resolution load_resolution(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot open resolution file '{}'", path));
    Resolution res;
    res.max_filt = -1;
    res.max_deg = -1;
    bool have_format = false;
    std::string line;
    int lineno = 0;
    std::map<Generator, bool> have_diff;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view s = trim_sv(line);
        if (s.empty() || s.front() == '#') continue;
        auto fail = [&](const std::string& why) -> DataError {
            return DataError(fmt::format("{}:{}: {}", path, lineno, why));
        };
        if (!have_format) {
            if (s != "format secext-res 1") throw fail("expected 'format secext-res 1'");
            have_format = true;
            continue;
        }
        if (s.substr(0, 8) == "maxfilt ") {
            res.max_filt = std::stoi(std::string(s.substr(8)));
            continue;
        }
        if (s.substr(0, 7) == "maxdeg ") {
            res.max_deg = std::stoi(std::string(s.substr(7)));
            continue;
        }
        if (s.substr(0, 4) == "gen ") {
            if (res.max_filt < 0 || res.max_deg < 0) throw fail("gen before maxfilt/maxdeg");
            std::istringstream iss{std::string(s.substr(4))};
            Generator g;
            if (!(iss >> g.m >> g.d >> g.q)) throw fail("bad gen line");
            if (g.m < 0 || g.m > res.max_filt)
                throw fail(fmt::format("generator filtration {} outside maxfilt {}", g.m, res.max_filt));
            if (g.d < 0 || g.d > res.max_deg)
                throw fail(fmt::format("generator degree {} outside maxdeg {}", g.d, res.max_deg));
            if (static_cast<int>(res.gens.size()) <= g.m)
                res.gens.resize(static_cast<size_t>(g.m) + 1);
            res.gens[g.m].push_back(g);
            if (g.m >= 1) have_diff.emplace(g, false);
            continue;
        }
        if (s.substr(0, 2) == "d ") {
            size_t eq = s.find('=');
            if (eq == std::string_view::npos) throw fail("missing '=' in d line");
            Generator g = parse_generator(trim_sv(s.substr(2, eq - 2)));
            auto it = have_diff.find(g);
            if (it == have_diff.end())
                throw fail(fmt::format("d line for unknown generator {}", to_string(g)));
            if (it->second) throw fail(fmt::format("duplicate d line for {}", to_string(g)));
            it->second = true;
            FreeEltA dg = parse_free_elt(trim_sv(s.substr(eq + 1)));
            for (const auto& [h, c] : dg.terms) {
                if (h.m != g.m - 1)
                    throw fail(fmt::format("d {} hits filtration {} != {}", to_string(g), h.m,
                                           g.m - 1));
                if (h.d + c.degree() != g.d)
                    throw fail(fmt::format("d {} is not degree-preserving", to_string(g)));
            }
            res.diffs.emplace(g, std::move(dg));
            continue;
        }
        throw fail(fmt::format("unrecognized line '{}'", s));
    }
    if (!have_format) throw DataError(fmt::format("{}: missing format line", path));
    for (auto& level : res.gens) std::sort(level.begin(), level.end());
    for (size_t m = 0; m < res.gens.size(); ++m)
        for (size_t i = 1; i < res.gens[m].size(); ++i)
            if (res.gens[m][i] == res.gens[m][i - 1])
                throw DataError(
                    fmt::format("{}: duplicate generator {}", path, to_string(res.gens[m][i])));
    for (const auto& [g, have] : have_diff)
        if (!have)
            throw DataError(fmt::format("{}: missing d line for {}", path, to_string(g)));
    for (const auto& [g, dg] : res.diffs)
        for (const auto& [h, c] : dg.terms)
            if (!res.has_gen(h))
                throw DataError(fmt::format("{}: d {} references unknown generator {}", path,
                                            to_string(g), to_string(h)));
    return res;
}

FreeEltB lifted_diff(const Resolution& res, const Generator& g) {
    FreeEltB out;
    for (const auto& [h, c] : res.diff_of(g).terms) out.add(h, lift_chi(c));
    return out;
}

FreeEltB apply_lifted_diff(const Resolution& res, const FreeEltB& x) {
    FreeEltB out;
    for (const auto& [g, b] : x.terms) {
        if (g.m == 0) continue;
        for (const auto& [h, c] : res.diff_of(g).terms) out.add(h, multiply(b, lift_chi(c)));
    }
    return out;
}

std::vector<DDTerm> double_diff(const Resolution& res, const Generator& g, DecStrategy strategy) {
    std::vector<DDTerm> out;
    if (g.m < 2) return out;
    FreeEltB dd = apply_lifted_diff(res, lifted_diff(res, g));
    for (const auto& [h, r] : dd.terms) out.push_back(DDTerm{h, r, decompose_R(r, strategy)});
    return out;
}

ResReport verify_resolution(const Resolution& res) {
    ResReport rep;
    for (size_t m = 1; m < res.gens.size(); ++m)
        for (const Generator& g : res.gens[m]) {
            auto it = res.diffs.find(g);
            if (it == res.diffs.end()) {
                rep.failures.push_back(fmt::format("{} has no differential", to_string(g)));
                continue;
            }
            const FreeEltA& dg = it->second;
            for (const auto& [h, c] : dg.terms) {
                if (h.m != g.m - 1 || !res.has_gen(h))
                    rep.failures.push_back(
                        fmt::format("d {} hits invalid generator {}", to_string(g), to_string(h)));
                if (c.degree() == 0)
                    rep.failures.push_back(fmt::format(
                        "resolution not minimal: d {} has a unit coefficient on {}", to_string(g),
                        to_string(h)));
                if (h.d + c.degree() != g.d)
                    rep.failures.push_back(
                        fmt::format("d {} is not degree-preserving", to_string(g)));
            }
            if (g.m >= 2) {
                ++rep.checked_squares;
                if (!res.apply_diff(dg).is_zero())
                    rep.failures.push_back(fmt::format("d(d {}) != 0", to_string(g)));
            }
        }

    for (int t = 0; t <= res.max_deg; ++t) {
        std::vector<int> dims(static_cast<size_t>(res.max_filt) + 1, 0);
        std::vector<int> ranks(static_cast<size_t>(res.max_filt) + 1, 0);
        for (int m = 0; m <= res.max_filt; ++m) dims[static_cast<size_t>(m)] = res.basis(m, t).size();
        for (int m = 1; m <= res.max_filt; ++m) {
            ModuleBasis bcur = res.basis(m, t);
            ModuleBasis bprev = res.basis(m - 1, t);
            F2Matrix mat(bprev.size(), bcur.size());
            for (int j = 0; j < bcur.size(); ++j) {
                const auto& [g, w] = bcur.elems[static_cast<size_t>(j)];
                FreeEltA img = act_word(w, res.diff_of(g));
                for (const auto& [h, c] : img.terms)
                    for (const Word& u : c.terms) mat.set(bprev.index(h, u), j);
            }
            ranks[static_cast<size_t>(m)] = rank(std::move(mat));
        }
        for (int m = 0; m + 1 <= res.max_filt; ++m) {
            int kerdim;
            if (m == 0)
                kerdim = t == 0 ? 0 : dims[0];
            else
                kerdim = dims[static_cast<size_t>(m)] - ranks[static_cast<size_t>(m)];
            ++rep.checked_ranks;
            if (kerdim != ranks[static_cast<size_t>(m) + 1])
                rep.failures.push_back(
                    fmt::format("resolution not exact at filtration {}, degree {}: kernel {}, "
                                "image {}",
                                m, t, kerdim, ranks[static_cast<size_t>(m) + 1]));
        }
    }
    return rep;
}

}  // namespace secext
