#pragma once

// Reference implementations used to cross-check the sweep engine.  Except
// for the germ data model this file stands alone: the label rules, the
// transition semantics, and the final diagram checks are restated from
// scratch, with no canonical forms, no memoization and no pruning, so a bug
// in the engine and a bug here would have to be two independent bugs.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "diagram.hpp"

namespace reebext {

struct BruteForceResult {
    bool extendable = false;
    std::uint64_t witness_count = 0;
    bool budget_exceeded = false;
};

namespace bruteforce_detail {

inline bool label_ok(int g, int o) {
    if (g < 0 || (o != 0 && o != 1)) return false;
    if (g == 0) return o == 0;
    if (g % 2 == 1) return o == 1;
    return true;
}

struct Piece {
    std::vector<std::string> circles;
    int g = 0;
    int o = 0;
    int seg_origin = 0;  // vertex index where the running segment started
};

// segment of the would-be extension diagram: vertex indices plus the
// orientability bit of the piece that rode it
struct Seg {
    int upper;
    int lower;
    int o;
};

struct Walker {
    const GermDiagram& d;
    bool klein;
    std::uint64_t budget;

    std::uint64_t steps = 0;
    bool exceeded = false;
    std::uint64_t count = 0;
    std::vector<Seg> segs;

    Walker(const GermDiagram& d_, bool klein_, std::uint64_t budget_)
        : d(d_), klein(klein_), budget(budget_) {}

    int piece_with(const std::vector<Piece>& ps, const std::string& circle) const {
        for (std::size_t i = 0; i < ps.size(); ++i)
            for (const auto& c : ps[i].circles)
                if (c == circle) return static_cast<int>(i);
        return -1;
    }

    static std::vector<std::string> minus(const std::vector<std::string>& v, const std::string& x) {
        std::vector<std::string> out;
        for (const auto& c : v)
            if (c != x) out.push_back(c);
        return out;
    }

    void leaf() {
        if (!klein) {
            ++count;
            return;
        }
        const int n = static_cast<int>(d.vertices().size());
        std::vector<int> parent(n);
        std::iota(parent.begin(), parent.end(), 0);
        const auto find = [&](int v) {
            while (parent[v] != v) v = parent[v] = parent[parent[v]];
            return v;
        };
        int comps = n;
        for (const Seg& s : segs) {
            const int a = find(s.upper), b = find(s.lower);
            if (a != b) {
                parent[a] = b;
                --comps;
            }
        }
        const int rank = static_cast<int>(segs.size()) - n + comps;
        bool any_o = false;
        for (const Seg& s : segs)
            if (s.o == 1) any_o = true;
        if (!any_o) {
            if (rank == 1) ++count;
            return;
        }
        if (rank != 0) return;
        std::vector<int> p2(n);
        std::iota(p2.begin(), p2.end(), 0);
        const auto find2 = [&](int v) {
            while (p2[v] != v) v = p2[v] = p2[p2[v]];
            return v;
        };
        std::vector<int> touched;
        for (const Seg& s : segs) {
            if (s.o != 1) continue;
            p2[find2(s.upper)] = find2(s.lower);
            touched.push_back(s.upper);
            touched.push_back(s.lower);
        }
        int root = -1;
        bool connected = true;
        for (int v : touched) {
            const int r = find2(v);
            if (root == -1) root = r;
            if (r != root) connected = false;
        }
        if (connected) ++count;
    }

    void go(std::size_t vi, std::vector<Piece> ps) {
        if (exceeded) return;
        if (++steps > budget) {
            exceeded = true;
            return;
        }
        if (vi == d.vertices().size()) {
            leaf();
            return;
        }
        const auto& ups = d.up_edges(vi);
        const auto& downs = d.down_edges(vi);
        const int sign = d.vertices()[vi].sign == Sign::Plus ? +1 : -1;
        const std::size_t mark = segs.size();
        const auto end_segment = [&](Piece& p) {
            segs.push_back({p.seg_origin, static_cast<int>(vi), p.o});
            p.seg_origin = static_cast<int>(vi);
        };
        const auto recurse = [&](std::vector<Piece> next) {
            go(vi + 1, std::move(next));
            segs.resize(mark);
        };

        if (ups.empty() && downs.size() == 1) {  // local maximum
            const std::string down = d.edges()[downs[0]].id;
            if (sign > 0) {
                std::vector<Piece> next = ps;
                next.push_back({{down}, 0, 0, static_cast<int>(vi)});
                recurse(std::move(next));
            } else {
                for (std::size_t h = 0; h < ps.size(); ++h) {
                    std::vector<Piece> next = ps;
                    end_segment(next[h]);
                    next[h].circles.push_back(down);
                    recurse(std::move(next));
                    if (exceeded) return;
                }
            }
            return;
        }
        if (ups.size() == 1 && downs.empty()) {  // local minimum
            const std::string up = d.edges()[ups[0]].id;
            const int pi = piece_with(ps, up);
            Piece& p = ps[pi];
            if (sign < 0) {
                if (p.circles.size() == 1 && p.g == 0 && p.o == 0) {
                    std::vector<Piece> next = ps;
                    end_segment(next[pi]);
                    next.erase(next.begin() + pi);
                    recurse(std::move(next));
                }
            } else {
                if (p.circles.size() >= 2) {
                    std::vector<Piece> next = ps;
                    end_segment(next[pi]);
                    next[pi].circles = minus(next[pi].circles, up);
                    recurse(std::move(next));
                }
            }
            return;
        }
        if (ups.size() == 1 && downs.size() == 2) {  // circle splits in two
            const std::string up = d.edges()[ups[0]].id;
            const std::string d1 = d.edges()[downs[0]].id;
            const std::string d2 = d.edges()[downs[1]].id;
            const int pi = piece_with(ps, up);
            const Piece p = ps[pi];
            if (sign > 0) {
                std::vector<Piece> next = ps;
                end_segment(next[pi]);
                next[pi].circles = minus(next[pi].circles, up);
                next[pi].circles.push_back(d1);
                next[pi].circles.push_back(d2);
                recurse(std::move(next));
                return;
            }
            // cut that keeps the piece in one part
            if (p.g >= 2) {
                for (const int o2 : p.o == 0 ? std::vector<int>{0} : std::vector<int>{0, 1}) {
                    if (!label_ok(p.g - 2, o2)) continue;
                    std::vector<Piece> next = ps;
                    end_segment(next[pi]);
                    next[pi].circles = minus(next[pi].circles, up);
                    next[pi].circles.push_back(d1);
                    next[pi].circles.push_back(d2);
                    next[pi].g = p.g - 2;
                    next[pi].o = o2;
                    recurse(std::move(next));
                    if (exceeded) return;
                }
            }
            // cut that severs the piece in two
            const std::vector<std::string> rest = minus(p.circles, up);
            if (rest.size() >= 30) {
                exceeded = true;
                return;
            }
            for (std::uint32_t mask = 0; mask < (1u << rest.size()); ++mask) {
                std::vector<std::string> xs, ys;
                for (std::size_t i = 0; i < rest.size(); ++i)
                    (mask >> i & 1 ? xs : ys).push_back(rest[i]);
                for (int g1 = 0; g1 <= p.g; ++g1) {
                    for (int o1 = 0; o1 <= 1; ++o1) {
                        for (int o2 = 0; o2 <= 1; ++o2) {
                            if ((o1 | o2) != p.o) continue;
                            if (!label_ok(g1, o1) || !label_ok(p.g - g1, o2)) continue;
                            std::vector<Piece> next = ps;
                            end_segment(next[pi]);
                            next.erase(next.begin() + pi);
                            Piece a{xs, g1, o1, static_cast<int>(vi)};
                            a.circles.push_back(d1);
                            Piece b{ys, p.g - g1, o2, static_cast<int>(vi)};
                            b.circles.push_back(d2);
                            next.push_back(std::move(a));
                            next.push_back(std::move(b));
                            recurse(std::move(next));
                            if (exceeded) return;
                        }
                    }
                }
            }
            return;
        }
        if (ups.size() == 2 && downs.size() == 1) {  // two circles become one
            const std::string u1 = d.edges()[ups[0]].id;
            const std::string u2 = d.edges()[ups[1]].id;
            const std::string down = d.edges()[downs[0]].id;
            const int i1 = piece_with(ps, u1);
            const int i2 = piece_with(ps, u2);
            if (sign < 0) {
                if (i1 == i2) {
                    std::vector<Piece> next = ps;
                    end_segment(next[i1]);
                    next[i1].circles = minus(minus(next[i1].circles, u1), u2);
                    next[i1].circles.push_back(down);
                    recurse(std::move(next));
                }
                return;
            }
            if (i1 != i2) {
                const Piece& a = ps[i1];
                const Piece& b = ps[i2];
                Piece merged;
                merged.circles = minus(a.circles, u1);
                for (const auto& c : minus(b.circles, u2)) merged.circles.push_back(c);
                merged.circles.push_back(down);
                merged.g = a.g + b.g;
                merged.o = a.o | b.o;
                merged.seg_origin = static_cast<int>(vi);
                std::vector<Piece> next;
                for (std::size_t i = 0; i < ps.size(); ++i)
                    if (static_cast<int>(i) != i1 && static_cast<int>(i) != i2) next.push_back(ps[i]);
                segs.push_back({a.seg_origin, static_cast<int>(vi), a.o});
                segs.push_back({b.seg_origin, static_cast<int>(vi), b.o});
                next.push_back(std::move(merged));
                recurse(std::move(next));
            } else {
                const Piece p = ps[i1];
                for (const int o2 : p.o == 1 ? std::vector<int>{1} : std::vector<int>{0, 1}) {
                    if (!label_ok(p.g + 2, o2)) continue;
                    std::vector<Piece> next = ps;
                    end_segment(next[i1]);
                    next[i1].circles = minus(minus(next[i1].circles, u1), u2);
                    next[i1].circles.push_back(down);
                    next[i1].g = p.g + 2;
                    next[i1].o = o2;
                    recurse(std::move(next));
                    if (exceeded) return;
                }
            }
            return;
        }
        // one circle through a cross-cut band
        const std::string up = d.edges()[ups[0]].id;
        const std::string down = d.edges()[downs[0]].id;
        const int pi = piece_with(ps, up);
        const Piece p = ps[pi];
        if (sign > 0) {
            std::vector<Piece> next = ps;
            end_segment(next[pi]);
            next[pi].circles = minus(next[pi].circles, up);
            next[pi].circles.push_back(down);
            next[pi].g = p.g + 1;
            next[pi].o = 1;
            recurse(std::move(next));
            return;
        }
        if (p.o != 1) return;
        for (const int o2 : {0, 1}) {
            if (!label_ok(p.g - 1, o2)) continue;
            std::vector<Piece> next = ps;
            end_segment(next[pi]);
            next[pi].circles = minus(next[pi].circles, up);
            next[pi].circles.push_back(down);
            next[pi].g = p.g - 1;
            next[pi].o = o2;
            recurse(std::move(next));
            if (exceeded) return;
        }
    }
};

}  // namespace bruteforce_detail

// Counts every accepting run of the germ by plain exhaustive recursion.  In
// klein mode a run is accepted by rebuilding its diagram's segment graph at
// the leaf and testing the two filling shapes directly.
inline BruteForceResult brute_force_decide(const GermDiagram& d, bool klein,
                                           std::uint64_t budget = 10'000'000) {
    bruteforce_detail::Walker w(d, klein, budget);
    w.go(0, {});
    BruteForceResult r;
    r.witness_count = w.count;
    r.extendable = w.count > 0;
    r.budget_exceeded = w.exceeded;
    return r;
}

// --- random germ generation --------------------------------------------------

enum class MobiusTarget { Zero, Two, Any };

struct GeneratorParams {
    std::uint64_t seed = 0;
    int max_vertices = 8;
    MobiusTarget mobius = MobiusTarget::Any;
    std::optional<int> euler;
    bool require_connected = false;
};

namespace generator_detail {

inline std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// bounded uniform draw; plain modulo keeps the stream identical across
// standard libraries, and the bias is irrelevant here
inline std::size_t pick(std::mt19937_64& rng, std::size_t n) { return rng() % n; }

struct KindCounts {
    int t;  // maxima minus upward saddles (= minima minus downward ones)
    int us;
    int ds;
    int mob;

    int n() const { return 2 * t + 2 * us + 2 * ds + mob; }
};

}  // namespace generator_detail

// Draws a random well-formed germ, deterministically in the seed.  The
// vertex kinds are counted out from the constraints (the euler
// characteristic is twice the extremum surplus minus the band count, and
// rises/falls of the circle frontier must balance), ordered by a random
// feasible schedule of the frontier process, and wired by random stub
// matching.  The top vertex always gets sign +, the bottom sign -: with
// either reversed no run can pass the very first or last event, which would
// make the output useless as test fodder.
inline GermDiagram random_germ(const GeneratorParams& params) {
    using namespace generator_detail;
    if (params.euler && (*params.euler % 2 != 0))
        throw std::invalid_argument("random germ: no closed surface has an odd euler characteristic");

    std::vector<KindCounts> menu;
    const int N = params.max_vertices;
    for (int t = -N; t <= N; ++t) {
        for (int us = 0; us <= N; ++us) {
            for (int ds = 0; ds <= N; ++ds) {
                for (int mob = 0; mob <= N; mob += 2) {
                    if (params.mobius == MobiusTarget::Zero && mob != 0) continue;
                    if (params.mobius == MobiusTarget::Two && mob != 2) continue;
                    if (params.euler && 2 * t - mob != *params.euler) continue;
                    const KindCounts kc{t, us, ds, mob};
                    if (kc.n() < 2 || kc.n() > N) continue;
                    if (t + us < 1 || t + ds < 1) continue;  // needs a top and a bottom
                    menu.push_back(kc);
                }
            }
        }
    }
    if (menu.empty())
        throw std::invalid_argument("random germ: constraints are unsatisfiable within the vertex limit");

    for (std::uint64_t attempt = 0; attempt < 4096; ++attempt) {
        std::mt19937_64 rng(mix(params.seed + attempt * 0x100000001b3ULL));
        const KindCounts kc = menu[pick(rng, menu.size())];
        const int n = kc.n();

        // schedule the kinds along a frontier walk; dead ends just retry
        struct Slot {
            VertexKind kind;
            int need;   // circles consumed
            int delta;  // frontier change
            int left;
        };
        std::vector<Slot> slots = {
            {VertexKind::Max, 0, +1, kc.t + kc.us},
            {VertexKind::Min, 1, -1, kc.t + kc.ds},
            {VertexKind::UpSaddle, 2, -1, kc.us},
            {VertexKind::DownSaddle, 1, +1, kc.ds},
            {VertexKind::Mobius, 1, 0, kc.mob},
        };
        std::vector<VertexKind> order;
        int frontier = 0;
        bool dead = false;
        for (int pos = 0; pos < n; ++pos) {
            std::vector<std::size_t> ok;
            for (std::size_t i = 0; i < slots.size(); ++i)
                if (slots[i].left > 0 && frontier >= slots[i].need) ok.push_back(i);
            if (ok.empty()) {
                dead = true;
                break;
            }
            Slot& s = slots[ok[pick(rng, ok.size())]];
            order.push_back(s.kind);
            frontier += s.delta;
            --s.left;
        }
        if (dead || frontier != 0) continue;

        // wire edges by matching each vertex's up side to random open stubs
        std::vector<GermVertex> vs;
        std::vector<GermEdge> es;
        std::vector<std::size_t> pool;  // indices of edges still missing a lower vertex
        for (int pos = 0; pos < n; ++pos) {
            const std::string vid = "v" + std::to_string(pos + 1);
            const VertexKind kind = order[pos];
            int take = 0, give = 0;
            switch (kind) {
                case VertexKind::Max: take = 0; give = 1; break;
                case VertexKind::Min: take = 1; give = 0; break;
                case VertexKind::UpSaddle: take = 2; give = 1; break;
                case VertexKind::DownSaddle: take = 1; give = 2; break;
                case VertexKind::Mobius: take = 1; give = 1; break;
            }
            for (int k = 0; k < take; ++k) {
                const std::size_t j = pick(rng, pool.size());
                es[pool[j]].lower = vid;
                pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
            }
            for (int k = 0; k < give; ++k) {
                pool.push_back(es.size());
                es.push_back({"e" + std::to_string(es.size() + 1), vid, ""});
            }
            Sign sign = rng() % 2 ? Sign::Plus : Sign::Minus;
            if (pos == 0) sign = Sign::Plus;
            if (pos == n - 1) sign = Sign::Minus;
            vs.push_back({vid, static_cast<double>(n - pos), sign});
        }

        GermDiagram d(vs, es, {"seeded random germ"});
        if (params.require_connected && validate_germ(d).components != 1) continue;
        if (params.euler && validate_germ(d).euler != *params.euler)
            throw std::logic_error("random germ: count bookkeeping broke");
        return d;
    }
    throw std::runtime_error("random germ: no valid draw after many attempts");
}

}  // namespace reebext
