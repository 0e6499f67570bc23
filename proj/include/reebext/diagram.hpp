#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "union_find.hpp"

namespace reebext {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Sign { Plus, Minus };

// Kind of a boundary critical point, derived from (up-degree, down-degree):
//   Max        (0,1)   level circle is born going down
//   Min        (1,0)   level circle dies
//   DownSaddle (1,2)   one circle splits into two
//   UpSaddle   (2,1)   two circles merge into one
//   Mobius     (1,1)   circle crosses a non-orientation event, count unchanged
enum class VertexKind { Max, Min, DownSaddle, UpSaddle, Mobius };

inline const char* to_string(Sign s) noexcept { return s == Sign::Plus ? "+" : "-"; }

inline const char* to_string(VertexKind k) noexcept {
    switch (k) {
        case VertexKind::Max: return "Max";
        case VertexKind::Min: return "Min";
        case VertexKind::DownSaddle: return "DownSaddle";
        case VertexKind::UpSaddle: return "UpSaddle";
        case VertexKind::Mobius: return "Mobius";
    }
    return "?";
}

inline std::optional<VertexKind> vertex_kind_from_string(std::string_view s) noexcept {
    if (s == "Max") return VertexKind::Max;
    if (s == "Min") return VertexKind::Min;
    if (s == "DownSaddle") return VertexKind::DownSaddle;
    if (s == "UpSaddle") return VertexKind::UpSaddle;
    if (s == "Mobius") return VertexKind::Mobius;
    return std::nullopt;
}

struct GermVertex {
    std::string id;
    double height = 0.0;
    Sign sign = Sign::Plus;

    bool operator==(const GermVertex&) const = default;
};

struct GermEdge {
    std::string id;
    std::string upper;
    std::string lower;

    bool operator==(const GermEdge&) const = default;
};

// Signed Reeb diagram of a Morse germ along a closed surface.  Vertices are
// boundary critical points at pairwise distinct heights; edges are families
// of level circles, directed from the higher endpoint to the lower one.
// The structure is immutable after construction and stored canonically:
// vertices by decreasing height, edges by id.
class GermDiagram {
public:
    GermDiagram(std::vector<GermVertex> vertices, std::vector<GermEdge> edges,
                std::vector<std::string> comment = {})
        : vertices_(std::move(vertices)), edges_(std::move(edges)), comment_(std::move(comment)) {
        if (vertices_.empty()) throw ValidationError("germ has no vertices");
        for (const auto& v : vertices_) {
            if (!std::isfinite(v.height))
                throw ValidationError("vertex '" + v.id + "' has a non-finite height");
        }
        std::sort(vertices_.begin(), vertices_.end(),
                  [](const GermVertex& a, const GermVertex& b) { return a.height > b.height; });
        std::sort(edges_.begin(), edges_.end(),
                  [](const GermEdge& a, const GermEdge& b) { return a.id < b.id; });
        for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
            if (vertices_[i].height == vertices_[i + 1].height)
                throw ValidationError("heights not distinct: vertices '" + vertices_[i].id +
                                      "' and '" + vertices_[i + 1].id + "'");
        }
        for (std::size_t i = 0; i < vertices_.size(); ++i) {
            if (!vertex_idx_.emplace(vertices_[i].id, i).second)
                throw ValidationError("duplicate vertex id '" + vertices_[i].id + "'");
        }
        for (std::size_t i = 0; i + 1 < edges_.size(); ++i) {
            if (edges_[i].id == edges_[i + 1].id)
                throw ValidationError("duplicate edge id '" + edges_[i].id + "'");
        }
        up_.resize(vertices_.size());
        down_.resize(vertices_.size());
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            edge_idx_.emplace(edges_[e].id, e);
            const auto ui = vertex_idx_.find(edges_[e].upper);
            const auto li = vertex_idx_.find(edges_[e].lower);
            if (ui == vertex_idx_.end())
                throw ValidationError("edge '" + edges_[e].id + "' refers to unknown vertex '" +
                                      edges_[e].upper + "'");
            if (li == vertex_idx_.end())
                throw ValidationError("edge '" + edges_[e].id + "' refers to unknown vertex '" +
                                      edges_[e].lower + "'");
            if (vertices_[ui->second].height <= vertices_[li->second].height)
                throw ValidationError("edge '" + edges_[e].id +
                                      "' does not descend: height of '" + edges_[e].upper +
                                      "' must exceed height of '" + edges_[e].lower + "'");
            // edges_ is sorted by id, so adjacency lists come out sorted by edge id
            down_[ui->second].push_back(e);
            up_[li->second].push_back(e);
        }
        kinds_.reserve(vertices_.size());
        for (std::size_t i = 0; i < vertices_.size(); ++i) kinds_.push_back(derive_kind(i));
    }

    const std::vector<GermVertex>& vertices() const noexcept { return vertices_; }
    const std::vector<GermEdge>& edges() const noexcept { return edges_; }
    const std::vector<std::string>& comment() const noexcept { return comment_; }

    std::size_t vertex_index(std::string_view id) const {
        const auto it = vertex_idx_.find(std::string(id));
        if (it == vertex_idx_.end()) throw ValidationError("unknown vertex id '" + std::string(id) + "'");
        return it->second;
    }

    std::size_t edge_index(std::string_view id) const {
        const auto it = edge_idx_.find(std::string(id));
        if (it == edge_idx_.end()) throw ValidationError("unknown edge id '" + std::string(id) + "'");
        return it->second;
    }

    VertexKind kind(std::size_t v) const { return kinds_.at(v); }

    // Edges whose lower endpoint is v (they arrive from above), sorted by id.
    const std::vector<std::size_t>& up_edges(std::size_t v) const { return up_.at(v); }
    // Edges whose upper endpoint is v (they leave downwards), sorted by id.
    const std::vector<std::size_t>& down_edges(std::size_t v) const { return down_.at(v); }

    bool operator==(const GermDiagram& other) const {
        return vertices_ == other.vertices_ && edges_ == other.edges_;
    }

private:
    VertexKind derive_kind(std::size_t v) const {
        const std::size_t u = up_[v].size();
        const std::size_t d = down_[v].size();
        if (u == 0 && d == 1) return VertexKind::Max;
        if (u == 1 && d == 0) return VertexKind::Min;
        if (u == 1 && d == 2) return VertexKind::DownSaddle;
        if (u == 2 && d == 1) return VertexKind::UpSaddle;
        if (u == 1 && d == 1) return VertexKind::Mobius;
        throw ValidationError("vertex '" + vertices_[v].id + "' has degree pattern (" +
                              std::to_string(u) + "," + std::to_string(d) +
                              "); allowed: (0,1) (1,0) (1,2) (2,1) (1,1)");
    }

    std::vector<GermVertex> vertices_;
    std::vector<GermEdge> edges_;
    std::vector<std::string> comment_;
    std::vector<VertexKind> kinds_;
    std::vector<std::vector<std::size_t>> up_, down_;
    std::unordered_map<std::string, std::size_t> vertex_idx_, edge_idx_;
};

struct ValidationReport {
    int euler = 0;        // #Max + #Min - #saddle-like vertices
    int betti1 = 0;       // E - V + C of the underlying graph
    int mobius_count = 0;
    int components = 0;

    bool operator==(const ValidationReport&) const = default;
};

inline ValidationReport validate_germ(const GermDiagram& d) {
    ValidationReport r;
    int extremes = 0, saddles = 0;
    for (std::size_t v = 0; v < d.vertices().size(); ++v) {
        switch (d.kind(v)) {
            case VertexKind::Max:
            case VertexKind::Min: ++extremes; break;
            case VertexKind::Mobius:
                ++r.mobius_count;
                ++saddles;
                break;
            default: ++saddles; break;
        }
    }
    r.euler = extremes - saddles;
    UnionFind uf(d.vertices().size());
    for (const auto& e : d.edges()) uf.unite(d.vertex_index(e.upper), d.vertex_index(e.lower));
    r.components = static_cast<int>(uf.components());
    r.betti1 = static_cast<int>(d.edges().size()) - static_cast<int>(d.vertices().size()) + r.components;
    return r;
}

struct KleinCheck {
    bool ok = true;
    std::vector<std::string> failures;
    std::vector<std::string> warnings;
};

// Necessary conditions for a germ along a Klein bottle.  The Euler
// characteristic and connectivity checks are always enforced; the
// mobius/betti pattern check rests on a partially proven classification of
// admissible diagrams, so strict mode can be turned off to downgrade it to
// a warning.
inline KleinCheck validate_klein_germ(const GermDiagram& d, bool strict = true) {
    KleinCheck out;
    const ValidationReport r = validate_germ(d);
    if (r.euler != 0)
        out.failures.push_back("euler characteristic " + std::to_string(r.euler) + " != 0");
    if (r.components != 1)
        out.failures.push_back("diagram is disconnected (" + std::to_string(r.components) +
                               " components)");
    const bool pattern_ok = (r.mobius_count == 0 && r.betti1 == 1) ||
                            (r.mobius_count == 2 && r.betti1 == 0);
    if (!pattern_ok) {
        const std::string msg = "mobius/betti pattern (mobius=" + std::to_string(r.mobius_count) +
                                ", betti1=" + std::to_string(r.betti1) +
                                ") not in {(0,1),(2,0)} (partially proven pattern check)";
        if (strict)
            out.failures.push_back(msg);
        else
            out.warnings.push_back(msg);
    }
    out.ok = out.failures.empty();
    return out;
}

namespace detail {

inline void reject_unknown_fields(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                                  const std::string& where) {
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (item.key() == a) ok = true;
        if (!ok) throw ParseError("unknown field '" + item.key() + "' in " + where);
    }
}

inline std::string require_string(const nlohmann::json& obj, const char* field, const std::string& where) {
    if (!obj.contains(field) || !obj[field].is_string())
        throw ParseError("missing or non-string field '" + std::string(field) + "' in " + where);
    return obj[field].get<std::string>();
}

inline std::string dot_quote(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    out += '"';
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string format_height(double h) {
    std::ostringstream os;
    os << h;
    return os.str();
}

}  // namespace detail

// Germ files are JSON with two arrays.  Vertex objects carry id, height,
// sign ("+" or "-") and an optional kind that is cross-checked against the
// degrees; edge objects carry id, upper, lower.  An optional top-level
// "comment" (string or array of strings) survives round-trips.  Any other
// field is rejected.
inline GermDiagram parse_germ(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("germ file: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("germ file must be an object with 'vertices' and 'edges'");
    detail::reject_unknown_fields(j, {"vertices", "edges", "comment"}, "germ file");
    if (!j.contains("vertices") || !j["vertices"].is_array())
        throw ParseError("germ file needs a 'vertices' array");
    if (!j.contains("edges") || !j["edges"].is_array())
        throw ParseError("germ file needs an 'edges' array");

    std::vector<std::string> comment;
    if (j.contains("comment")) {
        const auto& c = j["comment"];
        if (c.is_string()) {
            comment.push_back(c.get<std::string>());
        } else if (c.is_array()) {
            for (const auto& line : c) {
                if (!line.is_string()) throw ParseError("'comment' entries must be strings");
                comment.push_back(line.get<std::string>());
            }
        } else {
            throw ParseError("'comment' must be a string or an array of strings");
        }
    }

    std::vector<GermVertex> vertices;
    std::vector<std::pair<std::string, VertexKind>> declared_kinds;
    for (const auto& vj : j["vertices"]) {
        if (!vj.is_object()) throw ParseError("vertex entries must be objects");
        detail::reject_unknown_fields(vj, {"id", "height", "sign", "kind"}, "vertex entry");
        GermVertex v;
        v.id = detail::require_string(vj, "id", "vertex entry");
        if (!vj.contains("height") || !vj["height"].is_number())
            throw ParseError("vertex '" + v.id + "' needs a numeric 'height'");
        v.height = vj["height"].get<double>();
        const std::string sign = detail::require_string(vj, "sign", "vertex '" + v.id + "'");
        if (sign == "+")
            v.sign = Sign::Plus;
        else if (sign == "-")
            v.sign = Sign::Minus;
        else
            throw ParseError("vertex '" + v.id + "': sign must be \"+\" or \"-\"");
        if (vj.contains("kind")) {
            const std::string ks = detail::require_string(vj, "kind", "vertex '" + v.id + "'");
            const auto k = vertex_kind_from_string(ks);
            if (!k) throw ParseError("vertex '" + v.id + "': unknown kind '" + ks + "'");
            declared_kinds.emplace_back(v.id, *k);
        }
        vertices.push_back(std::move(v));
    }

    std::vector<GermEdge> edges;
    for (const auto& ej : j["edges"]) {
        if (!ej.is_object()) throw ParseError("edge entries must be objects");
        detail::reject_unknown_fields(ej, {"id", "upper", "lower"}, "edge entry");
        GermEdge e;
        e.id = detail::require_string(ej, "id", "edge entry");
        e.upper = detail::require_string(ej, "upper", "edge '" + e.id + "'");
        e.lower = detail::require_string(ej, "lower", "edge '" + e.id + "'");
        edges.push_back(std::move(e));
    }

    GermDiagram d(std::move(vertices), std::move(edges), std::move(comment));
    for (const auto& [id, declared] : declared_kinds) {
        const VertexKind derived = d.kind(d.vertex_index(id));
        if (derived != declared)
            throw ValidationError("vertex '" + id + "': declared kind " + to_string(declared) +
                                  " does not match derived kind " + to_string(derived));
    }
    return d;
}

// Canonical bytes: vertices by decreasing height, edges by id, keys sorted.
// Diagrams that are equal up to list reordering serialize identically.
inline std::string serialize_germ(const GermDiagram& d) {
    nlohmann::json j;
    if (!d.comment().empty()) j["comment"] = d.comment();
    auto& vs = j["vertices"] = nlohmann::json::array();
    for (std::size_t i = 0; i < d.vertices().size(); ++i) {
        const GermVertex& v = d.vertices()[i];
        vs.push_back({{"id", v.id},
                      {"height", v.height},
                      {"sign", to_string(v.sign)},
                      {"kind", to_string(d.kind(i))}});
    }
    auto& es = j["edges"] = nlohmann::json::array();
    for (const GermEdge& e : d.edges())
        es.push_back({{"id", e.id}, {"upper", e.upper}, {"lower", e.lower}});
    return j.dump(2) + "\n";
}

inline std::string export_dot(const GermDiagram& d) {
    std::ostringstream os;
    os << "digraph germ {\n";
    os << "  rankdir=TB;\n";
    for (std::size_t i = 0; i < d.vertices().size(); ++i) {
        const GermVertex& v = d.vertices()[i];
        const std::string label = v.id + " " + to_string(d.kind(i)) + " " + to_string(v.sign) +
                                  " " + detail::format_height(v.height);
        os << "  " << detail::dot_quote(v.id) << " [label=" << detail::dot_quote(label) << "];\n";
    }
    for (const GermEdge& e : d.edges()) {
        os << "  " << detail::dot_quote(e.upper) << " -> " << detail::dot_quote(e.lower)
           << " [label=" << detail::dot_quote(e.id) << "];\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace reebext
