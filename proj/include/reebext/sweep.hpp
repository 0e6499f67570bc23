#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "diagram.hpp"
#include "surface.hpp"

namespace reebext {

// One component of the level surface of a candidate extension: the set of
// germ edges whose circles bound it, its capped class, and the connected
// component of the partial 3-manifold it belongs to.
struct Block {
    std::vector<std::string> edges;  // sorted, nonempty
    SurfaceClass cls;
    int component = 0;

    bool operator==(const Block&) const = default;
};

// Partition of the currently active germ edges into blocks.  States are kept
// canonical: blocks sorted by their edge lists, component ids renumbered by
// first appearance.  Two states are equal up to block/component renaming iff
// they compare equal (and iff their keys match).
class SweepState {
public:
    SweepState() = default;

    static SweepState make(std::vector<Block> blocks) {
        for (auto& b : blocks) {
            if (b.edges.empty()) throw std::logic_error("sweep state: empty block");
            std::sort(b.edges.begin(), b.edges.end());
            if (!lambda_valid(b.cls)) throw std::logic_error("sweep state: class outside label set");
        }
        std::sort(blocks.begin(), blocks.end(),
                  [](const Block& a, const Block& b) { return a.edges < b.edges; });
        for (std::size_t i = 0; i + 1 < blocks.size(); ++i) {
            if (!blocks[i].edges.empty() && !blocks[i + 1].edges.empty() &&
                blocks[i].edges == blocks[i + 1].edges)
                throw std::logic_error("sweep state: duplicate block");
        }
        // blocks are pairwise disjoint; a shared edge would make two lists
        // compare equal on their first common prefix only by coincidence, so
        // verify membership directly
        std::map<std::string_view, int> seen;
        for (std::size_t i = 0; i < blocks.size(); ++i)
            for (const auto& e : blocks[i].edges)
                if (!seen.emplace(e, static_cast<int>(i)).second)
                    throw std::logic_error("sweep state: edge '" + e + "' in two blocks");
        std::map<int, int> renum;
        for (auto& b : blocks) {
            const auto it = renum.emplace(b.component, static_cast<int>(renum.size()));
            b.component = it.first->second;
        }
        SweepState s;
        s.blocks_ = std::move(blocks);
        return s;
    }

    const std::vector<Block>& blocks() const noexcept { return blocks_; }
    bool empty() const noexcept { return blocks_.empty(); }

    // Canonical index of the block holding an edge, or -1 when inactive.
    int block_of(std::string_view edge) const noexcept {
        for (std::size_t i = 0; i < blocks_.size(); ++i)
            if (std::binary_search(blocks_[i].edges.begin(), blocks_[i].edges.end(), edge))
                return static_cast<int>(i);
        return -1;
    }

    std::string key() const {
        std::string out;
        for (const Block& b : blocks_) {
            out += std::to_string(b.edges.size());
            out += '[';
            for (const auto& e : b.edges) {
                out += std::to_string(e.size());
                out += '#';
                out += e;
            }
            out += ']';
            out += std::to_string(b.cls.g);
            out += ',';
            out += std::to_string(b.cls.o);
            out += '@';
            out += std::to_string(b.component);
            out += ';';
        }
        return out;
    }

    bool operator==(const SweepState&) const = default;

private:
    std::vector<Block> blocks_;
};

inline std::string canonical_key(const SweepState& s) { return s.key(); }

// Event vocabulary, keyed by (vertex kind, sign):
//   Max+        MPlus   a disc component appears
//   Max-        MMinus  a disc is cut out of a chosen host block
//   Min+        NPlus   a circle of a block with >= 2 circles is capped
//   Min-        NMinus  a lone disc block dies
//   DownSaddle+ SPlus   one circle becomes two on the same block
//   DownSaddle- GMinus  cut keeps the block connected, demigenus drops by 2
//               JMinus  cut splits the block in two (bipartition + label split)
//   UpSaddle+   JPlus   two blocks merge (label join)
//               GPlus   both circles on one block, demigenus grows by 2
//   UpSaddle-   SMinus  two circles of one block become one
//   Mobius+     OPlus   crosscap added
//   Mobius-     OMinus  crosscap removed (non-orientable blocks only)
enum class ChoiceKind { MPlus, MMinus, NPlus, NMinus, SPlus, SMinus, JPlus, GPlus, JMinus, GMinus, OPlus, OMinus };

inline const char* to_string(ChoiceKind k) noexcept {
    switch (k) {
        case ChoiceKind::MPlus: return "MPlus";
        case ChoiceKind::MMinus: return "MMinus";
        case ChoiceKind::NPlus: return "NPlus";
        case ChoiceKind::NMinus: return "NMinus";
        case ChoiceKind::SPlus: return "SPlus";
        case ChoiceKind::SMinus: return "SMinus";
        case ChoiceKind::JPlus: return "JPlus";
        case ChoiceKind::GPlus: return "GPlus";
        case ChoiceKind::JMinus: return "JMinus";
        case ChoiceKind::GMinus: return "GMinus";
        case ChoiceKind::OPlus: return "OPlus";
        case ChoiceKind::OMinus: return "OMinus";
    }
    return "?";
}

inline std::optional<ChoiceKind> choice_kind_from_string(std::string_view s) noexcept {
    static constexpr std::array<std::pair<std::string_view, ChoiceKind>, 12> table{{
        {"MPlus", ChoiceKind::MPlus},   {"MMinus", ChoiceKind::MMinus},
        {"NPlus", ChoiceKind::NPlus},   {"NMinus", ChoiceKind::NMinus},
        {"SPlus", ChoiceKind::SPlus},   {"SMinus", ChoiceKind::SMinus},
        {"JPlus", ChoiceKind::JPlus},   {"GPlus", ChoiceKind::GPlus},
        {"JMinus", ChoiceKind::JMinus}, {"GMinus", ChoiceKind::GMinus},
        {"OPlus", ChoiceKind::OPlus},   {"OMinus", ChoiceKind::OMinus},
    }};
    for (const auto& [name, kind] : table)
        if (name == s) return kind;
    return std::nullopt;
}

// One nondeterministic choice at a vertex.  Payloads:
//   host    MMinus: canonical block index (0-based) in the state before the step
//   parts   JMinus: bipartition of the block minus its up edge; parts[0] goes
//           with the lexicographically smaller down edge, parts[1] with the
//           other one; either part may be empty
//   labels  GPlus/GMinus/OMinus: the chosen class; JMinus: classes of
//           parts[0] and parts[1]
struct TransitionChoice {
    ChoiceKind kind = ChoiceKind::MPlus;
    int host = -1;
    std::array<std::vector<std::string>, 2> parts{};
    std::vector<SurfaceClass> labels{};

    bool operator==(const TransitionChoice&) const = default;
};

struct TraceStep {
    std::string vertex;
    TransitionChoice choice;

    bool operator==(const TraceStep&) const = default;
};

// Vertices in strictly decreasing height order, covering the whole germ.
using Trace = std::vector<TraceStep>;

struct SuccessorInfo {
    SweepState state;
    TransitionChoice choice;
};

struct SuccessorList {
    std::vector<SuccessorInfo> items;
    bool truncated = false;  // generation stopped at the cap
};

namespace detail {

inline std::vector<std::string> edges_without(const std::vector<std::string>& edges,
                                              std::string_view remove) {
    std::vector<std::string> out;
    out.reserve(edges.size());
    for (const auto& e : edges)
        if (e != remove) out.push_back(e);
    return out;
}

inline int fresh_component(const SweepState& s) {
    int m = -1;
    for (const Block& b : s.blocks()) m = std::max(m, b.component);
    return m + 1;
}

// Ordered label pairs (c1, c2) with join(c1, c2) == c, sorted by
// (c1.g, c1.o, c2.o).  Both orientations of an asymmetric split are listed:
// assigning c1 to one side and c2 to the other yields a different successor.
inline std::vector<std::pair<SurfaceClass, SurfaceClass>> ordered_split_pairs(SurfaceClass c) {
    std::vector<std::pair<SurfaceClass, SurfaceClass>> out;
    for (int g1 = 0; g1 <= c.g; ++g1) {
        for (int o1 = 0; o1 <= 1; ++o1) {
            for (int o2 = 0; o2 <= 1; ++o2) {
                const SurfaceClass c1{g1, o1};
                const SurfaceClass c2{c.g - g1, o2};
                if (!lambda_valid(c1) || !lambda_valid(c2)) continue;
                if ((o1 | o2) != c.o) continue;
                out.emplace_back(c1, c2);
            }
        }
    }
    return out;
}

}  // namespace detail

// All successor states of s at vertex v (index into d.vertices()), paired
// with the choice that produces each of them, in canonical order: MMinus
// hosts by block index, GMinus/GPlus/OMinus labels by (g,o), JMinus
// bipartitions in lexicographic order of their membership vectors with label
// pairs nested inside.  Distinct choices give distinct states.  Generation
// stops after `cap` items (truncated lists signal a blown node budget).
inline SuccessorList successors(const GermDiagram& d, std::size_t v, const SweepState& s,
                                std::uint64_t cap = std::numeric_limits<std::uint64_t>::max()) {
    SuccessorList out;
    const auto emit = [&](std::vector<Block> blocks, TransitionChoice choice) {
        if (out.items.size() >= cap) {
            out.truncated = true;
            return false;
        }
        out.items.push_back({SweepState::make(std::move(blocks)), std::move(choice)});
        return true;
    };
    const auto up_ids = [&] {
        std::vector<std::string> ids;
        for (std::size_t e : d.up_edges(v)) ids.push_back(d.edges()[e].id);
        return ids;
    }();
    const auto down_ids = [&] {
        std::vector<std::string> ids;
        for (std::size_t e : d.down_edges(v)) ids.push_back(d.edges()[e].id);
        return ids;
    }();
    for (const auto& e : up_ids)
        if (s.block_of(e) < 0) throw std::logic_error("successors: up edge '" + e + "' not active");

    const VertexKind k = d.kind(v);
    const Sign sign = d.vertices()[v].sign;

    switch (k) {
        case VertexKind::Max: {
            if (sign == Sign::Plus) {
                std::vector<Block> blocks = s.blocks();
                blocks.push_back({{down_ids[0]}, SurfaceClass{0, 0}, detail::fresh_component(s)});
                emit(std::move(blocks), {ChoiceKind::MPlus});
            } else {
                for (std::size_t h = 0; h < s.blocks().size(); ++h) {
                    std::vector<Block> blocks = s.blocks();
                    blocks[h].edges.push_back(down_ids[0]);
                    TransitionChoice c{ChoiceKind::MMinus};
                    c.host = static_cast<int>(h);
                    if (!emit(std::move(blocks), std::move(c))) return out;
                }
            }
            break;
        }
        case VertexKind::Min: {
            const int pi = s.block_of(up_ids[0]);
            const Block& p = s.blocks()[pi];
            if (sign == Sign::Minus) {
                if (p.edges.size() == 1 && p.cls == SurfaceClass{0, 0}) {
                    std::vector<Block> blocks = s.blocks();
                    blocks.erase(blocks.begin() + pi);
                    emit(std::move(blocks), {ChoiceKind::NMinus});
                }
            } else {
                if (p.edges.size() >= 2) {
                    std::vector<Block> blocks = s.blocks();
                    blocks[pi].edges = detail::edges_without(p.edges, up_ids[0]);
                    emit(std::move(blocks), {ChoiceKind::NPlus});
                }
            }
            break;
        }
        case VertexKind::DownSaddle: {
            const int pi = s.block_of(up_ids[0]);
            const Block& p = s.blocks()[pi];
            if (sign == Sign::Plus) {
                std::vector<Block> blocks = s.blocks();
                blocks[pi].edges = detail::edges_without(p.edges, up_ids[0]);
                blocks[pi].edges.push_back(down_ids[0]);
                blocks[pi].edges.push_back(down_ids[1]);
                emit(std::move(blocks), {ChoiceKind::SPlus});
            } else {
                // connected cut first, ordered by target class
                if (p.cls.g >= 2) {
                    for (const SurfaceClass target : genus_remove_options(p.cls)) {
                        std::vector<Block> blocks = s.blocks();
                        blocks[pi].edges = detail::edges_without(p.edges, up_ids[0]);
                        blocks[pi].edges.push_back(down_ids[0]);
                        blocks[pi].edges.push_back(down_ids[1]);
                        blocks[pi].cls = target;
                        TransitionChoice c{ChoiceKind::GMinus};
                        c.labels = {target};
                        if (!emit(std::move(blocks), std::move(c))) return out;
                    }
                }
                // disconnecting cut: every bipartition of the remaining edges,
                // every ordered label pair
                const std::vector<std::string> rest = detail::edges_without(p.edges, up_ids[0]);
                if (rest.size() >= 63) {
                    out.truncated = true;
                    return out;
                }
                const auto pairs = detail::ordered_split_pairs(p.cls);
                const std::uint64_t masks = std::uint64_t{1} << rest.size();
                for (std::uint64_t mask = 0; mask < masks; ++mask) {
                    std::vector<std::string> xs, ys;
                    for (std::size_t i = 0; i < rest.size(); ++i) {
                        // bit 0 of the mask is the last edge: masks count up in
                        // lexicographic order of the membership vector
                        if (mask >> (rest.size() - 1 - i) & 1)
                            xs.push_back(rest[i]);
                        else
                            ys.push_back(rest[i]);
                    }
                    for (const auto& [c1, c2] : pairs) {
                        std::vector<Block> blocks = s.blocks();
                        blocks.erase(blocks.begin() + pi);
                        Block left{xs, c1, p.component};
                        left.edges.push_back(down_ids[0]);
                        Block right{ys, c2, p.component};
                        right.edges.push_back(down_ids[1]);
                        blocks.push_back(std::move(left));
                        blocks.push_back(std::move(right));
                        TransitionChoice c{ChoiceKind::JMinus};
                        c.parts = {xs, ys};
                        c.labels = {c1, c2};
                        if (!emit(std::move(blocks), std::move(c))) return out;
                    }
                }
            }
            break;
        }
        case VertexKind::UpSaddle: {
            const int p1 = s.block_of(up_ids[0]);
            const int p2 = s.block_of(up_ids[1]);
            if (sign == Sign::Minus) {
                if (p1 == p2) {
                    std::vector<Block> blocks = s.blocks();
                    blocks[p1].edges = detail::edges_without(blocks[p1].edges, up_ids[0]);
                    blocks[p1].edges = detail::edges_without(blocks[p1].edges, up_ids[1]);
                    blocks[p1].edges.push_back(down_ids[0]);
                    emit(std::move(blocks), {ChoiceKind::SMinus});
                }
            } else if (p1 != p2) {
                const Block& a = s.blocks()[p1];
                const Block& b = s.blocks()[p2];
                Block merged;
                merged.edges = detail::edges_without(a.edges, up_ids[0]);
                for (const auto& e : detail::edges_without(b.edges, up_ids[1]))
                    merged.edges.push_back(e);
                merged.edges.push_back(down_ids[0]);
                merged.cls = join(a.cls, b.cls);
                merged.component = a.component;
                std::vector<Block> blocks;
                for (std::size_t i = 0; i < s.blocks().size(); ++i) {
                    if (static_cast<int>(i) == p1 || static_cast<int>(i) == p2) continue;
                    Block copy = s.blocks()[i];
                    if (copy.component == b.component) copy.component = a.component;
                    blocks.push_back(std::move(copy));
                }
                blocks.push_back(std::move(merged));
                emit(std::move(blocks), {ChoiceKind::JPlus});
            } else {
                const Block& p = s.blocks()[p1];
                for (const SurfaceClass target : genus_add_options(p.cls)) {
                    std::vector<Block> blocks = s.blocks();
                    blocks[p1].edges = detail::edges_without(blocks[p1].edges, up_ids[0]);
                    blocks[p1].edges = detail::edges_without(blocks[p1].edges, up_ids[1]);
                    blocks[p1].edges.push_back(down_ids[0]);
                    blocks[p1].cls = target;
                    TransitionChoice c{ChoiceKind::GPlus};
                    c.labels = {target};
                    if (!emit(std::move(blocks), std::move(c))) return out;
                }
            }
            break;
        }
        case VertexKind::Mobius: {
            const int pi = s.block_of(up_ids[0]);
            const Block& p = s.blocks()[pi];
            if (sign == Sign::Plus) {
                std::vector<Block> blocks = s.blocks();
                blocks[pi].edges = detail::edges_without(p.edges, up_ids[0]);
                blocks[pi].edges.push_back(down_ids[0]);
                blocks[pi].cls = crosscap_add(p.cls);
                emit(std::move(blocks), {ChoiceKind::OPlus});
            } else if (p.cls.o == 1) {
                for (const SurfaceClass target : crosscap_remove_options(p.cls)) {
                    std::vector<Block> blocks = s.blocks();
                    blocks[pi].edges = detail::edges_without(p.edges, up_ids[0]);
                    blocks[pi].edges.push_back(down_ids[0]);
                    blocks[pi].cls = target;
                    TransitionChoice c{ChoiceKind::OMinus};
                    c.labels = {target};
                    if (!emit(std::move(blocks), std::move(c))) return out;
                }
            }
            break;
        }
    }
    return out;
}

namespace detail {

inline bool set_reason(std::string* why, std::string msg) {
    if (why) *why = std::move(msg);
    return false;
}

}  // namespace detail

// Applies one choice directly, without enumerating the whole successor set.
// Returns the successor state exactly when the choice is a member of
// successors(d, v, s); otherwise nullopt with a reason.
inline std::optional<SweepState> apply_choice(const GermDiagram& d, std::size_t v,
                                              const SweepState& s, const TransitionChoice& c,
                                              std::string* why = nullptr) {
    const VertexKind k = d.kind(v);
    const Sign sign = d.vertices()[v].sign;
    const auto fail = [&](std::string msg) {
        detail::set_reason(why, std::move(msg));
        return std::optional<SweepState>{};
    };

    ChoiceKind expected1 = ChoiceKind::MPlus, expected2 = ChoiceKind::MPlus;
    bool two_expected = false;
    switch (k) {
        case VertexKind::Max: expected1 = sign == Sign::Plus ? ChoiceKind::MPlus : ChoiceKind::MMinus; break;
        case VertexKind::Min: expected1 = sign == Sign::Plus ? ChoiceKind::NPlus : ChoiceKind::NMinus; break;
        case VertexKind::DownSaddle:
            if (sign == Sign::Plus) {
                expected1 = ChoiceKind::SPlus;
            } else {
                expected1 = ChoiceKind::GMinus;
                expected2 = ChoiceKind::JMinus;
                two_expected = true;
            }
            break;
        case VertexKind::UpSaddle:
            if (sign == Sign::Minus) {
                expected1 = ChoiceKind::SMinus;
            } else {
                expected1 = ChoiceKind::JPlus;
                expected2 = ChoiceKind::GPlus;
                two_expected = true;
            }
            break;
        case VertexKind::Mobius: expected1 = sign == Sign::Plus ? ChoiceKind::OPlus : ChoiceKind::OMinus; break;
    }
    if (c.kind != expected1 && (!two_expected || c.kind != expected2))
        return fail(std::string("choice kind ") + to_string(c.kind) +
                    " incompatible with vertex '" + d.vertices()[v].id + "'");

    std::vector<std::string> up_ids, down_ids;
    for (std::size_t e : d.up_edges(v)) up_ids.push_back(d.edges()[e].id);
    for (std::size_t e : d.down_edges(v)) down_ids.push_back(d.edges()[e].id);
    for (const auto& e : up_ids)
        if (s.block_of(e) < 0) return fail("up edge '" + e + "' is not active");

    switch (c.kind) {
        case ChoiceKind::MPlus: {
            std::vector<Block> blocks = s.blocks();
            blocks.push_back({{down_ids[0]}, SurfaceClass{0, 0}, detail::fresh_component(s)});
            return SweepState::make(std::move(blocks));
        }
        case ChoiceKind::MMinus: {
            if (c.host < 0 || c.host >= static_cast<int>(s.blocks().size()))
                return fail("choice not in successor set: host block index out of range");
            std::vector<Block> blocks = s.blocks();
            blocks[c.host].edges.push_back(down_ids[0]);
            return SweepState::make(std::move(blocks));
        }
        case ChoiceKind::NMinus: {
            const int pi = s.block_of(up_ids[0]);
            const Block& p = s.blocks()[pi];
            if (p.edges.size() != 1 || p.cls != SurfaceClass{0, 0})
                return fail("choice not in successor set: block must be a lone disc");
            std::vector<Block> blocks = s.blocks();
            blocks.erase(blocks.begin() + pi);
            return SweepState::make(std::move(blocks));
        }
        case ChoiceKind::NPlus: {
            const int pi = s.block_of(up_ids[0]);
            if (s.blocks()[pi].edges.size() < 2)
                return fail("choice not in successor set: capping the last circle of a block");
            std::vector<Block> blocks = s.blocks();
            blocks[pi].edges = detail::edges_without(blocks[pi].edges, up_ids[0]);
            return SweepState::make(std::move(blocks));
        }
        case ChoiceKind::SPlus: {
            const int pi = s.block_of(up_ids[0]);
            std::vector<Block> blocks = s.blocks();
            blocks[pi].edges = detail::edges_without(blocks[pi].edges, up_ids[0]);
            blocks[pi].edges.push_back(down_ids[0]);
            blocks[pi].edges.push_back(down_ids[1]);
            return SweepState::make(std::move(blocks));
        }
        case ChoiceKind::SMinus: {
            const int p1 = s.block_of(up_ids[0]);
            const int p2 = s.block_of(up_ids[1]);
            if (p1 != p2) return fail("choice not in successor set: up edges lie in different blocks");
            std::vector<Block> blocks = s.blocks();
            blocks[p1].edges = detail::edges_without(blocks[p1].edges, up_ids[0]);
            blocks[p1].edges = detail::edges_without(blocks[p1].edges, up_ids[1]);
            blocks[p1].edges.push_back(down_ids[0]);
            return SweepState::make(std::move(blocks));
        }
        case ChoiceKind::JPlus: {
            const int p1 = s.block_of(up_ids[0]);
            const int p2 = s.block_of(up_ids[1]);
            if (p1 == p2) return fail("choice not in successor set: up edges lie in the same block");
            const Block& a = s.blocks()[p1];
            const Block& b = s.blocks()[p2];
            Block merged;
            merged.edges = detail::edges_without(a.edges, up_ids[0]);
            for (const auto& e : detail::edges_without(b.edges, up_ids[1])) merged.edges.push_back(e);
            merged.edges.push_back(down_ids[0]);
            merged.cls = join(a.cls, b.cls);
            merged.component = a.component;
            std::vector<Block> blocks;
            for (std::size_t i = 0; i < s.blocks().size(); ++i) {
                if (static_cast<int>(i) == p1 || static_cast<int>(i) == p2) continue;
                Block copy = s.blocks()[i];
                if (copy.component == b.component) copy.component = a.component;
                blocks.push_back(std::move(copy));
            }
            blocks.push_back(std::move(merged));
            return SweepState::make(std::move(blocks));
        }
        case ChoiceKind::GPlus: {
            const int p1 = s.block_of(up_ids[0]);
            const int p2 = s.block_of(up_ids[1]);
            if (p1 != p2) return fail("choice not in successor set: up edges lie in different blocks");
            if (c.labels.size() != 1) return fail("GPlus choice needs exactly one label");
            const auto options = genus_add_options(s.blocks()[p1].cls);
            if (std::find(options.begin(), options.end(), c.labels[0]) == options.end())
                return fail("choice not in successor set: label not reachable by adding a handle");
            std::vector<Block> blocks = s.blocks();
            blocks[p1].edges = detail::edges_without(blocks[p1].edges, up_ids[0]);
            blocks[p1].edges = detail::edges_without(blocks[p1].edges, up_ids[1]);
            blocks[p1].edges.push_back(down_ids[0]);
            blocks[p1].cls = c.labels[0];
            return SweepState::make(std::move(blocks));
        }
        case ChoiceKind::GMinus: {
            const int pi = s.block_of(up_ids[0]);
            const Block& p = s.blocks()[pi];
            if (p.cls.g < 2) return fail("choice not in successor set: demigenus below 2");
            if (c.labels.size() != 1) return fail("GMinus choice needs exactly one label");
            const auto options = genus_remove_options(p.cls);
            if (std::find(options.begin(), options.end(), c.labels[0]) == options.end())
                return fail("choice not in successor set: label not reachable by removing a handle");
            std::vector<Block> blocks = s.blocks();
            blocks[pi].edges = detail::edges_without(p.edges, up_ids[0]);
            blocks[pi].edges.push_back(down_ids[0]);
            blocks[pi].edges.push_back(down_ids[1]);
            blocks[pi].cls = c.labels[0];
            return SweepState::make(std::move(blocks));
        }
        case ChoiceKind::JMinus: {
            const int pi = s.block_of(up_ids[0]);
            const Block& p = s.blocks()[pi];
            if (c.labels.size() != 2) return fail("JMinus choice needs exactly two labels");
            std::vector<std::string> rest = detail::edges_without(p.edges, up_ids[0]);
            std::vector<std::string> xs = c.parts[0], ys = c.parts[1];
            std::sort(xs.begin(), xs.end());
            std::sort(ys.begin(), ys.end());
            std::vector<std::string> merged = xs;
            merged.insert(merged.end(), ys.begin(), ys.end());
            std::sort(merged.begin(), merged.end());
            if (merged != rest)
                return fail("choice not in successor set: parts do not partition the block's other edges");
            if (!lambda_valid(c.labels[0]) || !lambda_valid(c.labels[1]) ||
                c.labels[0].g + c.labels[1].g != p.cls.g ||
                (c.labels[0].o | c.labels[1].o) != p.cls.o)
                return fail("choice not in successor set: labels are not a split of the block's class");
            std::vector<Block> blocks = s.blocks();
            blocks.erase(blocks.begin() + pi);
            Block left{std::move(xs), c.labels[0], p.component};
            left.edges.push_back(down_ids[0]);
            Block right{std::move(ys), c.labels[1], p.component};
            right.edges.push_back(down_ids[1]);
            blocks.push_back(std::move(left));
            blocks.push_back(std::move(right));
            return SweepState::make(std::move(blocks));
        }
        case ChoiceKind::OPlus: {
            const int pi = s.block_of(up_ids[0]);
            std::vector<Block> blocks = s.blocks();
            blocks[pi].edges = detail::edges_without(blocks[pi].edges, up_ids[0]);
            blocks[pi].edges.push_back(down_ids[0]);
            blocks[pi].cls = crosscap_add(blocks[pi].cls);
            return SweepState::make(std::move(blocks));
        }
        case ChoiceKind::OMinus: {
            const int pi = s.block_of(up_ids[0]);
            const Block& p = s.blocks()[pi];
            if (p.cls.o != 1) return fail("choice not in successor set: block is orientable");
            if (c.labels.size() != 1) return fail("OMinus choice needs exactly one label");
            const auto options = crosscap_remove_options(p.cls);
            if (std::find(options.begin(), options.end(), c.labels[0]) == options.end())
                return fail("choice not in successor set: label not reachable by removing a crosscap");
            std::vector<Block> blocks = s.blocks();
            blocks[pi].edges = detail::edges_without(p.edges, up_ids[0]);
            blocks[pi].edges.push_back(down_ids[0]);
            blocks[pi].cls = c.labels[0];
            return SweepState::make(std::move(blocks));
        }
    }
    return fail("unreachable choice kind");
}

struct ReplayResult {
    bool accepted = false;
    std::string reason;
    std::string vertex;  // where the replay stopped, when rejected
    SweepState final_state;
};

// Replays a trace from the empty state.  Accepts exactly when every step's
// choice is a legal successor at the next vertex (in decreasing height
// order) and every vertex is covered.
inline ReplayResult check_trace(const GermDiagram& d, const Trace& trace) {
    ReplayResult r;
    SweepState state;
    const std::size_t n = d.vertices().size();
    if (trace.size() > n) {
        r.reason = "trace has more steps than the germ has vertices";
        r.vertex = trace[n].vertex;
        return r;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::string& expect = d.vertices()[i].id;
        if (i >= trace.size()) {
            r.reason = "unprocessed vertices: trace ends before '" + expect + "'";
            r.vertex = expect;
            r.final_state = state;
            return r;
        }
        if (trace[i].vertex != expect) {
            r.reason = "trace out of order: step " + std::to_string(i) + " names '" +
                       trace[i].vertex + "', expected '" + expect + "'";
            r.vertex = trace[i].vertex;
            r.final_state = state;
            return r;
        }
        std::string why;
        auto next = apply_choice(d, i, state, trace[i].choice, &why);
        if (!next) {
            r.reason = why;
            r.vertex = expect;
            r.final_state = state;
            return r;
        }
        state = std::move(*next);
    }
    if (!state.empty()) {
        // unreachable for valid germs: every edge is consumed at its lower vertex
        r.reason = "active edges remain after the last vertex";
        r.final_state = state;
        return r;
    }
    r.accepted = true;
    return r;
}

// How one step rewires blocks: parents are canonical indices into the state
// before the step, children into the state after it.  Blocks untouched by
// the event map across by identical edge sets.
struct StepLink {
    std::vector<int> parents;
    std::vector<int> children;
    std::vector<int> after_to_before;  // -1 for children
};

inline StepLink link_step(const GermDiagram& d, std::size_t v, const SweepState& before,
                          const TransitionChoice& choice, const SweepState& after) {
    StepLink link;
    if (choice.kind == ChoiceKind::MMinus) {
        link.parents.push_back(choice.host);
    } else if (choice.kind != ChoiceKind::MPlus) {
        for (std::size_t e : d.up_edges(v)) {
            const int pi = before.block_of(d.edges()[e].id);
            if (std::find(link.parents.begin(), link.parents.end(), pi) == link.parents.end())
                link.parents.push_back(pi);
        }
        std::sort(link.parents.begin(), link.parents.end());
    }
    std::map<std::vector<std::string>, int> before_sets;
    for (std::size_t i = 0; i < before.blocks().size(); ++i)
        before_sets.emplace(before.blocks()[i].edges, static_cast<int>(i));
    link.after_to_before.assign(after.blocks().size(), -1);
    for (std::size_t j = 0; j < after.blocks().size(); ++j) {
        const auto it = before_sets.find(after.blocks()[j].edges);
        if (it != before_sets.end()) {
            link.after_to_before[j] = it->second;
        } else {
            link.children.push_back(static_cast<int>(j));
        }
    }
    return link;
}

// --- trace file format -----------------------------------------------------
//
// A trace file is a JSON array of {"vertex": id, "choice": {...}} objects.
// The choice carries a "type" tag (MPlus .. OMinus) plus the payload fields
// described at TransitionChoice; "labels" entries are [g, o] pairs.

inline nlohmann::json choice_to_json(const TransitionChoice& c) {
    nlohmann::json j;
    j["type"] = to_string(c.kind);
    if (c.kind == ChoiceKind::MMinus) j["host"] = c.host;
    if (c.kind == ChoiceKind::JMinus) j["parts"] = {c.parts[0], c.parts[1]};
    if (!c.labels.empty()) {
        auto& ls = j["labels"] = nlohmann::json::array();
        for (const SurfaceClass& l : c.labels) ls.push_back({l.g, l.o});
    }
    return j;
}

inline TransitionChoice choice_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("choice must be an object");
    detail::reject_unknown_fields(j, {"type", "host", "parts", "labels"}, "choice");
    if (!j.contains("type") || !j["type"].is_string()) throw ParseError("choice needs a 'type' tag");
    const auto kind = choice_kind_from_string(j["type"].get<std::string>());
    if (!kind) throw ParseError("unknown choice type '" + j["type"].get<std::string>() + "'");
    TransitionChoice c;
    c.kind = *kind;
    const bool wants_host = c.kind == ChoiceKind::MMinus;
    const bool wants_parts = c.kind == ChoiceKind::JMinus;
    const int wants_labels = c.kind == ChoiceKind::JMinus ? 2
                             : (c.kind == ChoiceKind::GPlus || c.kind == ChoiceKind::GMinus ||
                                c.kind == ChoiceKind::OMinus)
                                 ? 1
                                 : 0;
    if (j.contains("host") != wants_host)
        throw ParseError(std::string("choice ") + to_string(c.kind) +
                         (wants_host ? " needs a 'host'" : " does not take a 'host'"));
    if (wants_host) {
        if (!j["host"].is_number_integer() || j["host"].get<int>() < 0)
            throw ParseError("'host' must be a nonnegative block index");
        c.host = j["host"].get<int>();
    }
    if (j.contains("parts") != wants_parts)
        throw ParseError(std::string("choice ") + to_string(c.kind) +
                         (wants_parts ? " needs 'parts'" : " does not take 'parts'"));
    if (wants_parts) {
        const auto& ps = j["parts"];
        if (!ps.is_array() || ps.size() != 2) throw ParseError("'parts' must be two arrays of edge ids");
        for (int side = 0; side < 2; ++side) {
            if (!ps[side].is_array()) throw ParseError("'parts' must be two arrays of edge ids");
            for (const auto& e : ps[side]) {
                if (!e.is_string()) throw ParseError("'parts' entries must be edge id strings");
                c.parts[side].push_back(e.get<std::string>());
            }
            std::sort(c.parts[side].begin(), c.parts[side].end());
        }
    }
    if (j.contains("labels") != (wants_labels > 0))
        throw ParseError(std::string("choice ") + to_string(c.kind) +
                         (wants_labels ? " needs 'labels'" : " does not take 'labels'"));
    if (wants_labels > 0) {
        const auto& ls = j["labels"];
        if (!ls.is_array() || static_cast<int>(ls.size()) != wants_labels)
            throw ParseError(std::string("choice ") + to_string(c.kind) + " needs exactly " +
                             std::to_string(wants_labels) + " label(s)");
        for (const auto& l : ls) {
            if (!l.is_array() || l.size() != 2 || !l[0].is_number_integer() || !l[1].is_number_integer())
                throw ParseError("labels must be [g, o] integer pairs");
            c.labels.push_back({l[0].get<int>(), l[1].get<int>()});
        }
    }
    return c;
}

inline std::string serialize_trace(const Trace& t) {
    nlohmann::json j = nlohmann::json::array();
    for (const TraceStep& step : t)
        j.push_back({{"vertex", step.vertex}, {"choice", choice_to_json(step.choice)}});
    return j.dump(2) + "\n";
}

inline Trace trace_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw ParseError("a trace must be an array of steps");
    Trace t;
    for (const auto& sj : j) {
        if (!sj.is_object()) throw ParseError("trace steps must be objects");
        detail::reject_unknown_fields(sj, {"vertex", "choice"}, "trace step");
        TraceStep step;
        step.vertex = detail::require_string(sj, "vertex", "trace step");
        if (!sj.contains("choice")) throw ParseError("trace step needs a 'choice'");
        step.choice = choice_from_json(sj["choice"]);
        t.push_back(std::move(step));
    }
    return t;
}

inline Trace parse_trace(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("trace file: ") + e.what());
    }
    return trace_from_json(j);
}

}  // namespace reebext
