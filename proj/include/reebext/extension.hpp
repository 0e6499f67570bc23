#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "diagram.hpp"
#include "surface.hpp"
#include "sweep.hpp"
#include "union_find.hpp"

namespace reebext {

// Labelled Reeb diagram of a candidate extension.  Vertices are the germ
// vertices (each one is a surgery event); edges are maximal lifetime
// segments of level-surface blocks, labelled with the block's class and the
// germ edges riding on it (both constant along a segment).
struct ExtensionVertex {
    std::string id;
    double height = 0.0;
    ChoiceKind event = ChoiceKind::MPlus;

    bool operator==(const ExtensionVertex&) const = default;
};

struct ExtensionEdge {
    std::string id;
    std::string upper;
    std::string lower;
    SurfaceClass cls;
    std::vector<std::string> germ_edges;  // sorted

    bool operator==(const ExtensionEdge&) const = default;
};

struct ExtensionDiagram {
    std::vector<ExtensionVertex> vertices;  // decreasing height
    std::vector<ExtensionEdge> edges;       // emission order, ids s1, s2, ...
    int loop_count = 0;                     // same-component merges seen
    std::vector<std::string> loop_vertices;

    bool operator==(const ExtensionDiagram&) const = default;
};

inline int betti1(const ExtensionDiagram& x) {
    std::map<std::string, std::size_t> idx;
    for (const auto& v : x.vertices) {
        const std::size_t n = idx.size();
        idx.emplace(v.id, n);
    }
    UnionFind uf(x.vertices.size());
    for (const auto& e : x.edges) uf.unite(idx.at(e.upper), idx.at(e.lower));
    return static_cast<int>(x.edges.size()) - static_cast<int>(x.vertices.size()) +
           static_cast<int>(uf.components());
}

// Replays an accepting trace and records the block segments.  Throws
// ValidationError when the trace is not accepting.
inline ExtensionDiagram build_extension_diagram(const GermDiagram& d, const Trace& trace) {
    if (trace.size() != d.vertices().size())
        throw ValidationError("extension build: trace covers " + std::to_string(trace.size()) +
                              " of " + std::to_string(d.vertices().size()) + " vertices");
    ExtensionDiagram x;
    SweepState state;
    std::vector<std::string> segstart;  // aligned with state.blocks()
    int next_edge = 1;
    for (std::size_t i = 0; i < d.vertices().size(); ++i) {
        const std::string& vid = d.vertices()[i].id;
        if (trace[i].vertex != vid)
            throw ValidationError("extension build: step " + std::to_string(i) + " names '" +
                                  trace[i].vertex + "', expected '" + vid + "'");
        std::string why;
        auto next = apply_choice(d, i, state, trace[i].choice, &why);
        if (!next) throw ValidationError("extension build: " + why);
        const StepLink link = link_step(d, i, state, trace[i].choice, *next);

        x.vertices.push_back({vid, d.vertices()[i].height, trace[i].choice.kind});
        for (int p : link.parents) {
            ExtensionEdge e;
            e.id = "s" + std::to_string(next_edge++);
            e.upper = segstart[p];
            e.lower = vid;
            e.cls = state.blocks()[p].cls;
            e.germ_edges = state.blocks()[p].edges;
            x.edges.push_back(std::move(e));
        }
        if (trace[i].choice.kind == ChoiceKind::JPlus) {
            const auto& ups = d.up_edges(i);
            const int p1 = state.block_of(d.edges()[ups[0]].id);
            const int p2 = state.block_of(d.edges()[ups[1]].id);
            if (state.blocks()[p1].component == state.blocks()[p2].component) {
                x.loop_count += 1;
                x.loop_vertices.push_back(vid);
            }
        }
        std::vector<std::string> nextstart(next->blocks().size());
        for (std::size_t j = 0; j < next->blocks().size(); ++j) {
            const int src = link.after_to_before[j];
            nextstart[j] = src >= 0 ? segstart[src] : vid;
        }
        state = std::move(*next);
        segstart = std::move(nextstart);
    }
    if (!state.empty())
        throw ValidationError("extension build: active blocks remain after the last vertex");
    if (betti1(x) != x.loop_count)
        throw std::logic_error("extension build: loop count does not match the cycle rank");
    return x;
}

// Shape a solid Klein bottle filling can take: either the diagram is a
// single cycle of orientable blocks (condition 1), or it is a tree whose
// non-orientable blocks form one connected stretch (condition 2).
enum class KleinCondition { Condition1, Condition2, Neither };

inline const char* to_string(KleinCondition c) noexcept {
    switch (c) {
        case KleinCondition::Condition1: return "condition 1";
        case KleinCondition::Condition2: return "condition 2";
        case KleinCondition::Neither: return "neither";
    }
    return "?";
}

inline std::optional<KleinCondition> klein_condition_from_string(std::string_view s) noexcept {
    if (s == "condition 1") return KleinCondition::Condition1;
    if (s == "condition 2") return KleinCondition::Condition2;
    if (s == "neither") return KleinCondition::Neither;
    return std::nullopt;
}

inline KleinCondition check_klein_conditions(const ExtensionDiagram& x) {
    const int b1 = betti1(x);
    bool any_nonorientable = false;
    for (const auto& e : x.edges)
        if (e.cls.o != 0) any_nonorientable = true;
    if (!any_nonorientable) return b1 == 1 ? KleinCondition::Condition1 : KleinCondition::Neither;
    if (b1 != 0) return KleinCondition::Neither;
    // the non-orientable edges must share endpoints into one connected piece
    std::map<std::string, std::size_t> idx;
    for (const auto& v : x.vertices) {
        const std::size_t n = idx.size();
        idx.emplace(v.id, n);
    }
    UnionFind uf(x.vertices.size());
    std::set<std::size_t> touched;
    for (const auto& e : x.edges) {
        if (e.cls.o != 1) continue;
        const std::size_t a = idx.at(e.upper), b = idx.at(e.lower);
        uf.unite(a, b);
        touched.insert(a);
        touched.insert(b);
    }
    std::set<std::size_t> roots;
    for (std::size_t v : touched) roots.insert(uf.find(v));
    return roots.size() == 1 ? KleinCondition::Condition2 : KleinCondition::Neither;
}

namespace detail {

inline std::vector<std::string> rewrite_edges(std::vector<std::string> edges,
                                              const std::vector<std::string>& removes,
                                              const std::vector<std::string>& adds) {
    for (const auto& r : removes) edges.erase(std::remove(edges.begin(), edges.end(), r), edges.end());
    edges.insert(edges.end(), adds.begin(), adds.end());
    std::sort(edges.begin(), edges.end());
    return edges;
}

}  // namespace detail

// Structural audit of an extension diagram against its germ: vertex/event
// compatibility, segment degrees, label transitions, germ edge bookkeeping,
// and the loop count.  Returns a list of violations (empty means coherent).
inline std::vector<std::string> check_extension_invariants(const ExtensionDiagram& x,
                                                           const GermDiagram& d) {
    std::vector<std::string> bad;
    const auto complain = [&](std::string msg) { bad.push_back(std::move(msg)); };

    if (x.vertices.size() != d.vertices().size()) {
        complain("vertex count differs from the germ");
        return bad;
    }
    std::map<std::string, std::size_t> vidx;
    for (std::size_t i = 0; i < x.vertices.size(); ++i) {
        const auto& xv = x.vertices[i];
        const auto& gv = d.vertices()[i];
        if (xv.id != gv.id || xv.height != gv.height) {
            complain("vertex " + std::to_string(i) + " does not match the germ ordering");
            return bad;
        }
        vidx[xv.id] = i;
        const VertexKind k = d.kind(i);
        const Sign sg = gv.sign;
        const ChoiceKind ev = xv.event;
        const bool ok =
            (k == VertexKind::Max && (sg == Sign::Plus ? ev == ChoiceKind::MPlus : ev == ChoiceKind::MMinus)) ||
            (k == VertexKind::Min && (sg == Sign::Plus ? ev == ChoiceKind::NPlus : ev == ChoiceKind::NMinus)) ||
            (k == VertexKind::DownSaddle &&
             (sg == Sign::Plus ? ev == ChoiceKind::SPlus
                               : (ev == ChoiceKind::GMinus || ev == ChoiceKind::JMinus))) ||
            (k == VertexKind::UpSaddle &&
             (sg == Sign::Minus ? ev == ChoiceKind::SMinus
                                : (ev == ChoiceKind::JPlus || ev == ChoiceKind::GPlus))) ||
            (k == VertexKind::Mobius && (sg == Sign::Plus ? ev == ChoiceKind::OPlus : ev == ChoiceKind::OMinus));
        if (!ok)
            complain("vertex '" + xv.id + "': event " + to_string(ev) + " impossible for a " +
                     std::string(to_string(sg)) + " " + to_string(k));
    }

    std::set<std::string> edge_ids;
    std::map<std::string, std::vector<const ExtensionEdge*>> ending_at, starting_at;
    for (const auto& e : x.edges) {
        if (!edge_ids.insert(e.id).second) complain("duplicate segment id '" + e.id + "'");
        const auto ui = vidx.find(e.upper), li = vidx.find(e.lower);
        if (ui == vidx.end() || li == vidx.end()) {
            complain("segment '" + e.id + "' has an unknown endpoint");
            continue;
        }
        if (x.vertices[ui->second].height <= x.vertices[li->second].height)
            complain("segment '" + e.id + "' does not descend");
        if (!lambda_valid(e.cls)) complain("segment '" + e.id + "' carries a class outside the label set");
        if (!std::is_sorted(e.germ_edges.begin(), e.germ_edges.end()))
            complain("segment '" + e.id + "' lists its germ edges out of order");
        ending_at[e.lower].push_back(&e);
        starting_at[e.upper].push_back(&e);
    }
    if (!bad.empty()) return bad;

    for (std::size_t i = 0; i < x.vertices.size(); ++i) {
        const auto& xv = x.vertices[i];
        std::vector<const ExtensionEdge*> parents = ending_at[xv.id];
        std::vector<const ExtensionEdge*> children = starting_at[xv.id];
        std::vector<std::string> ups, downs;
        for (std::size_t e : d.up_edges(i)) ups.push_back(d.edges()[e].id);
        for (std::size_t e : d.down_edges(i)) downs.push_back(d.edges()[e].id);
        const auto want = [&](std::size_t np, std::size_t nc) {
            if (parents.size() != np || children.size() != nc) {
                complain("vertex '" + xv.id + "': event " + to_string(xv.event) + " needs " +
                         std::to_string(np) + " ending and " + std::to_string(nc) +
                         " starting segments, has " + std::to_string(parents.size()) + "/" +
                         std::to_string(children.size()));
                return false;
            }
            return true;
        };
        const auto expect_edges = [&](const ExtensionEdge* seg, const std::vector<std::string>& want_edges) {
            if (seg->germ_edges != want_edges)
                complain("vertex '" + xv.id + "': segment '" + seg->id +
                         "' carries the wrong germ edges");
        };
        using detail::rewrite_edges;
        switch (xv.event) {
            case ChoiceKind::MPlus:
                if (!want(0, 1)) break;
                expect_edges(children[0], {downs[0]});
                if (children[0]->cls != SurfaceClass{0, 0})
                    complain("vertex '" + xv.id + "': a fresh block must start as a disc");
                break;
            case ChoiceKind::MMinus:
                if (!want(1, 1)) break;
                expect_edges(children[0], rewrite_edges(parents[0]->germ_edges, {}, {downs[0]}));
                if (children[0]->cls != parents[0]->cls)
                    complain("vertex '" + xv.id + "': cutting out a disc must keep the class");
                break;
            case ChoiceKind::NPlus:
                if (!want(1, 1)) break;
                if (parents[0]->germ_edges.size() < 2)
                    complain("vertex '" + xv.id + "': capping the last circle of a block");
                expect_edges(children[0], rewrite_edges(parents[0]->germ_edges, {ups[0]}, {}));
                if (children[0]->cls != parents[0]->cls)
                    complain("vertex '" + xv.id + "': capping a circle must keep the class");
                break;
            case ChoiceKind::NMinus:
                if (!want(1, 0)) break;
                expect_edges(parents[0], {ups[0]});
                if (parents[0]->cls != SurfaceClass{0, 0})
                    complain("vertex '" + xv.id + "': only a lone disc block may die");
                break;
            case ChoiceKind::SPlus:
                if (!want(1, 1)) break;
                expect_edges(children[0], rewrite_edges(parents[0]->germ_edges, {ups[0]}, downs));
                if (children[0]->cls != parents[0]->cls)
                    complain("vertex '" + xv.id + "': splitting a circle must keep the class");
                break;
            case ChoiceKind::SMinus:
                if (!want(1, 1)) break;
                expect_edges(children[0], rewrite_edges(parents[0]->germ_edges, ups, downs));
                if (children[0]->cls != parents[0]->cls)
                    complain("vertex '" + xv.id + "': merging two circles must keep the class");
                break;
            case ChoiceKind::JPlus: {
                if (!want(2, 1)) break;
                const auto has = [](const ExtensionEdge* e, const std::string& id) {
                    return std::binary_search(e->germ_edges.begin(), e->germ_edges.end(), id);
                };
                const ExtensionEdge* a = parents[0];
                const ExtensionEdge* b = parents[1];
                if (!has(a, ups[0])) std::swap(a, b);
                if (!has(a, ups[0]) || !has(b, ups[1])) {
                    complain("vertex '" + xv.id + "': the joined blocks must carry one up edge each");
                    break;
                }
                auto merged = rewrite_edges(a->germ_edges, {ups[0]}, {});
                auto other = rewrite_edges(b->germ_edges, {ups[1]}, {downs[0]});
                merged.insert(merged.end(), other.begin(), other.end());
                std::sort(merged.begin(), merged.end());
                expect_edges(children[0], merged);
                if (children[0]->cls != join(a->cls, b->cls))
                    complain("vertex '" + xv.id + "': merged class must be the join of the parts");
                break;
            }
            case ChoiceKind::GPlus: {
                if (!want(1, 1)) break;
                expect_edges(children[0], rewrite_edges(parents[0]->germ_edges, ups, downs));
                const auto opts = genus_add_options(parents[0]->cls);
                if (std::find(opts.begin(), opts.end(), children[0]->cls) == opts.end())
                    complain("vertex '" + xv.id + "': class after a handle attachment is unreachable");
                break;
            }
            case ChoiceKind::JMinus: {
                if (!want(1, 2)) break;
                const ExtensionEdge* c1 = children[0];
                const ExtensionEdge* c2 = children[1];
                const auto has = [](const ExtensionEdge* e, const std::string& id) {
                    return std::binary_search(e->germ_edges.begin(), e->germ_edges.end(), id);
                };
                if (!has(c1, downs[0])) std::swap(c1, c2);
                if (!has(c1, downs[0]) || !has(c2, downs[1])) {
                    complain("vertex '" + xv.id + "': the split parts must carry one down edge each");
                    break;
                }
                auto unioned = c1->germ_edges;
                unioned.insert(unioned.end(), c2->germ_edges.begin(), c2->germ_edges.end());
                std::sort(unioned.begin(), unioned.end());
                if (unioned != rewrite_edges(parents[0]->germ_edges, {ups[0]}, downs))
                    complain("vertex '" + xv.id + "': split parts do not partition the block's edges");
                if (join(c1->cls, c2->cls) != parents[0]->cls)
                    complain("vertex '" + xv.id + "': split classes must join back to the block's class");
                break;
            }
            case ChoiceKind::GMinus: {
                if (!want(1, 1)) break;
                expect_edges(children[0], rewrite_edges(parents[0]->germ_edges, {ups[0]}, downs));
                if (parents[0]->cls.g < 2) {
                    complain("vertex '" + xv.id + "': removing a handle needs demigenus at least 2");
                    break;
                }
                const auto opts = genus_remove_options(parents[0]->cls);
                if (std::find(opts.begin(), opts.end(), children[0]->cls) == opts.end())
                    complain("vertex '" + xv.id + "': class after a handle removal is unreachable");
                break;
            }
            case ChoiceKind::OPlus:
                if (!want(1, 1)) break;
                expect_edges(children[0], rewrite_edges(parents[0]->germ_edges, ups, downs));
                if (children[0]->cls != crosscap_add(parents[0]->cls))
                    complain("vertex '" + xv.id + "': class after a crosscap attachment is wrong");
                break;
            case ChoiceKind::OMinus: {
                if (!want(1, 1)) break;
                expect_edges(children[0], rewrite_edges(parents[0]->germ_edges, ups, downs));
                if (parents[0]->cls.o != 1) {
                    complain("vertex '" + xv.id + "': removing a crosscap from an orientable block");
                    break;
                }
                const auto opts = crosscap_remove_options(parents[0]->cls);
                if (std::find(opts.begin(), opts.end(), children[0]->cls) == opts.end())
                    complain("vertex '" + xv.id + "': class after a crosscap removal is unreachable");
                break;
            }
        }
    }

    if (x.loop_count != betti1(x))
        complain("loop count " + std::to_string(x.loop_count) + " does not match the cycle rank " +
                 std::to_string(betti1(x)));
    if (static_cast<int>(x.loop_vertices.size()) != x.loop_count)
        complain("loop vertex list does not match the loop count");
    for (const auto& lv : x.loop_vertices) {
        const auto it = vidx.find(lv);
        if (it == vidx.end())
            complain("loop vertex '" + lv + "' is not a vertex");
        else if (x.vertices[it->second].event != ChoiceKind::JPlus)
            complain("loop vertex '" + lv + "' is not a merge event");
    }
    return bad;
}

// --- serialization ----------------------------------------------------------

inline nlohmann::json extension_to_json(const ExtensionDiagram& x) {
    nlohmann::json j;
    j["condition"] = to_string(check_klein_conditions(x));
    auto& vs = j["vertices"] = nlohmann::json::array();
    for (const auto& v : x.vertices)
        vs.push_back({{"id", v.id}, {"height", v.height}, {"event", to_string(v.event)}});
    auto& es = j["edges"] = nlohmann::json::array();
    for (const auto& e : x.edges)
        es.push_back({{"id", e.id},
                      {"upper", e.upper},
                      {"lower", e.lower},
                      {"label", {e.cls.g, e.cls.o}},
                      {"germ_edges", e.germ_edges}});
    j["loop_count"] = x.loop_count;
    j["loop_vertices"] = x.loop_vertices;
    return j;
}

inline ExtensionDiagram extension_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("extension must be an object");
    detail::reject_unknown_fields(
        j, {"condition", "vertices", "edges", "loop_count", "loop_vertices"}, "extension");
    ExtensionDiagram x;
    if (!j.contains("vertices") || !j["vertices"].is_array())
        throw ParseError("extension needs a 'vertices' array");
    for (const auto& vj : j["vertices"]) {
        if (!vj.is_object()) throw ParseError("extension vertices must be objects");
        detail::reject_unknown_fields(vj, {"id", "height", "event"}, "extension vertex");
        ExtensionVertex v;
        v.id = detail::require_string(vj, "id", "extension vertex");
        if (!vj.contains("height") || !vj["height"].is_number())
            throw ParseError("extension vertex needs a numeric 'height'");
        v.height = vj["height"].get<double>();
        const auto ev = choice_kind_from_string(detail::require_string(vj, "event", "extension vertex"));
        if (!ev) throw ParseError("unknown extension vertex event");
        v.event = *ev;
        x.vertices.push_back(std::move(v));
    }
    if (!j.contains("edges") || !j["edges"].is_array())
        throw ParseError("extension needs an 'edges' array");
    for (const auto& ej : j["edges"]) {
        if (!ej.is_object()) throw ParseError("extension edges must be objects");
        detail::reject_unknown_fields(ej, {"id", "upper", "lower", "label", "germ_edges"},
                                      "extension edge");
        ExtensionEdge e;
        e.id = detail::require_string(ej, "id", "extension edge");
        e.upper = detail::require_string(ej, "upper", "extension edge");
        e.lower = detail::require_string(ej, "lower", "extension edge");
        if (!ej.contains("label") || !ej["label"].is_array() || ej["label"].size() != 2 ||
            !ej["label"][0].is_number_integer() || !ej["label"][1].is_number_integer())
            throw ParseError("extension edge needs a [g, o] 'label'");
        e.cls = {ej["label"][0].get<int>(), ej["label"][1].get<int>()};
        if (!ej.contains("germ_edges") || !ej["germ_edges"].is_array())
            throw ParseError("extension edge needs a 'germ_edges' array");
        for (const auto& ge : ej["germ_edges"]) {
            if (!ge.is_string()) throw ParseError("'germ_edges' entries must be strings");
            e.germ_edges.push_back(ge.get<std::string>());
        }
        x.edges.push_back(std::move(e));
    }
    if (!j.contains("loop_count") || !j["loop_count"].is_number_integer())
        throw ParseError("extension needs an integer 'loop_count'");
    x.loop_count = j["loop_count"].get<int>();
    if (j.contains("loop_vertices")) {
        if (!j["loop_vertices"].is_array()) throw ParseError("'loop_vertices' must be an array");
        for (const auto& lv : j["loop_vertices"]) {
            if (!lv.is_string()) throw ParseError("'loop_vertices' entries must be strings");
            x.loop_vertices.push_back(lv.get<std::string>());
        }
    }
    if (j.contains("condition")) {
        const std::string cond = detail::require_string(j, "condition", "extension");
        if (!klein_condition_from_string(cond))
            throw ParseError("unknown extension condition '" + cond + "'");
    }
    return x;
}

inline std::string export_dot(const ExtensionDiagram& x) {
    std::string out = "digraph extension {\n  rankdir=TB;\n";
    for (const auto& v : x.vertices) {
        out += "  " + detail::dot_quote(v.id) + " [label=" +
               detail::dot_quote(v.id + " " + to_string(v.event) + " h=" +
                                 detail::format_height(v.height)) +
               "];\n";
    }
    for (const auto& e : x.edges) {
        out += "  " + detail::dot_quote(e.upper) + " -> " + detail::dot_quote(e.lower) +
               " [label=" +
               detail::dot_quote(e.id + " (" + std::to_string(e.cls.g) + "," +
                                 std::to_string(e.cls.o) + ")") +
               "];\n";
    }
    out += "}\n";
    return out;
}

}  // namespace reebext
