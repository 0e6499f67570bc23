#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "diagram.hpp"
#include "extension.hpp"
#include "surface.hpp"
#include "sweep.hpp"

namespace reebext {

enum class Mode { General, Klein };

inline const char* to_string(Mode m) noexcept {
    return m == Mode::General ? "general" : "klein";
}

inline std::optional<Mode> mode_from_string(std::string_view s) noexcept {
    if (s == "general") return Mode::General;
    if (s == "klein") return Mode::Klein;
    return std::nullopt;
}

enum class Outcome { Extendable, NotExtendable, BudgetExceeded };

inline const char* to_string(Outcome o) noexcept {
    switch (o) {
        case Outcome::Extendable: return "extendable";
        case Outcome::NotExtendable: return "not extendable";
        case Outcome::BudgetExceeded: return "budget exceeded";
    }
    return "?";
}

// A full certificate of extendability: the accepting trace, the labelled
// diagram it builds, and which filling shape the diagram has.
struct Witness {
    Trace trace;
    ExtensionDiagram diagram;
    KleinCondition condition = KleinCondition::Neither;
};

struct SearchStats {
    std::uint64_t nodes = 0;
    std::uint64_t memo_entries = 0;
};

struct SearchOptions {
    std::uint64_t node_budget = 10'000'000;
    bool memoize = true;
    bool klein_strict = true;  // reject inputs outside the proven shape test
};

struct Verdict {
    Outcome outcome = Outcome::NotExtendable;
    Mode mode = Mode::General;
    std::optional<Witness> witness;
    SearchStats stats;
};

namespace detail {

// Summary of everything a partial sweep has already committed the final
// diagram to, as far as the filling shapes care: how many cycles have been
// closed and how the non-orientable segments group into connected regions.
// Live blocks carry the tag of the region their running segment belongs to
// (-1 while orientable); a region with no remaining carrier is closed for
// good, because later segments can only attach at later vertices.
struct KleinAux {
    std::vector<int> region;  // aligned with the canonical blocks
    int loops = 0;
    int closed = 0;
    int next_tag = 0;

    int open_count() const {
        std::set<int> tags;
        for (int t : region)
            if (t >= 0) tags.insert(t);
        return static_cast<int>(tags.size());
    }

    // false exactly when no completion of this sweep can reach either
    // filling shape, so cutting the subtree loses no accepting runs
    bool viable() const {
        const int open = open_count();
        if (loops >= 2) return false;
        if (closed >= 2) return false;
        if (closed >= 1 && open >= 1) return false;
        if (loops >= 1 && closed + open >= 1) return false;
        return true;
    }

    KleinCondition leaf_condition() const {
        if (closed == 1 && loops == 0) return KleinCondition::Condition2;
        if (closed == 0 && loops == 1) return KleinCondition::Condition1;
        return KleinCondition::Neither;
    }

    std::string key() const {
        std::map<int, int> renum;
        std::string out;
        for (int t : region) {
            if (t < 0) {
                out += "-,";
                continue;
            }
            const auto it = renum.emplace(t, static_cast<int>(renum.size()));
            out += std::to_string(it.first->second);
            out += ',';
        }
        out += '|';
        out += std::to_string(loops);
        out += '|';
        out += std::to_string(closed);
        return out;
    }
};

inline KleinAux klein_advance(const KleinAux& aux, const GermDiagram& d, std::size_t v,
                              const SweepState& before, const TransitionChoice& choice,
                              const SweepState& after) {
    KleinAux out;
    out.loops = aux.loops;
    out.closed = aux.closed;
    out.next_tag = aux.next_tag;
    const StepLink link = link_step(d, v, before, choice, after);

    std::vector<int> ptags;  // distinct region tags on non-orientable parents
    for (int p : link.parents) {
        if (before.blocks()[p].cls.o != 1) continue;
        const int t = aux.region[p];
        if (std::find(ptags.begin(), ptags.end(), t) == ptags.end()) ptags.push_back(t);
    }
    std::sort(ptags.begin(), ptags.end());

    out.region.assign(after.blocks().size(), -1);
    for (std::size_t j = 0; j < after.blocks().size(); ++j) {
        const int src = link.after_to_before[j];
        if (src >= 0) {
            out.region[j] = aux.region[src];
            continue;
        }
        if (after.blocks()[j].cls.o == 0) continue;
        // a non-orientable child extends its parents' region, or starts one
        out.region[j] = ptags.empty() ? out.next_tag++ : ptags[0];
    }
    int merged_from = -1, merged_to = -1;
    if (ptags.size() == 2) {
        // a merge event welded two regions at this vertex
        merged_to = ptags[0];
        merged_from = ptags[1];
        for (int& t : out.region)
            if (t == merged_from) t = merged_to;
    }
    if (choice.kind == ChoiceKind::JPlus) {
        const auto& ups = d.up_edges(v);
        const int p1 = before.block_of(d.edges()[ups[0]].id);
        const int p2 = before.block_of(d.edges()[ups[1]].id);
        if (before.blocks()[p1].component == before.blocks()[p2].component) out.loops += 1;
    }
    std::set<int> before_tags, after_tags;
    for (int t : aux.region)
        if (t >= 0) before_tags.insert(t == merged_from ? merged_to : t);
    for (int t : out.region)
        if (t >= 0) after_tags.insert(t);
    for (int t : before_tags)
        if (!after_tags.count(t)) out.closed += 1;
    return out;
}

// Depth-first sweep over the choice tree, in canonical choice order, with
// failure-only memoization: a (vertex, state[, summary]) triple is cached
// only once its whole subtree is known to hold no accepting run, so cache
// hits never change the set (or count) of accepting runs.
struct SearchEngine {
    const GermDiagram& d;
    Mode mode;
    SearchOptions opts;
    bool stop_after_first;
    std::size_t store_limit;

    SearchStats stats;
    bool budget_exceeded = false;
    std::uint64_t found = 0;
    std::vector<Trace> stored;
    Trace current;
    std::unordered_set<std::string> memo;
    std::vector<int> ds_minus_suffix, mob_minus_suffix;

    SearchEngine(const GermDiagram& d_, Mode mode_, SearchOptions opts_, bool stop_after_first_,
                 std::size_t store_limit_)
        : d(d_), mode(mode_), opts(opts_), stop_after_first(stop_after_first_),
          store_limit(store_limit_) {
        const std::size_t n = d.vertices().size();
        ds_minus_suffix.assign(n + 1, 0);
        mob_minus_suffix.assign(n + 1, 0);
        for (std::size_t i = n; i-- > 0;) {
            ds_minus_suffix[i] = ds_minus_suffix[i + 1];
            mob_minus_suffix[i] = mob_minus_suffix[i + 1];
            if (d.vertices()[i].sign == Sign::Minus) {
                if (d.kind(i) == VertexKind::DownSaddle) ++ds_minus_suffix[i];
                if (d.kind(i) == VertexKind::Mobius) ++mob_minus_suffix[i];
            }
        }
    }

    void run() {
        SweepState root;
        KleinAux aux;
        dfs(0, root, aux);
        stats.memo_entries = memo.size();
    }

    bool dfs(std::size_t i, const SweepState& s, const KleinAux& aux) {
        if (i == d.vertices().size()) {
            if (!s.empty()) return false;
            if (mode == Mode::Klein && aux.leaf_condition() == KleinCondition::Neither) return false;
            ++found;
            if (stored.size() < store_limit) stored.push_back(current);
            return true;
        }
        // every remaining cut can lower the total demigenus by at most 2
        // (handle) or 1 (crosscap), and it must reach 0
        int total_g = 0;
        for (const Block& b : s.blocks()) total_g += b.cls.g;
        if (total_g > 2 * ds_minus_suffix[i] + mob_minus_suffix[i]) return false;

        std::string key;
        if (opts.memoize) {
            key = std::to_string(i);
            key += '|';
            key += s.key();
            if (mode == Mode::Klein) {
                key += '|';
                key += aux.key();
            }
            if (memo.count(key)) return false;
        }
        if (stats.nodes >= opts.node_budget) {
            budget_exceeded = true;
            return false;
        }
        ++stats.nodes;
        // generating a successor is work too: a single vertex can offer an
        // enormous choice set, so generation honors the remaining budget
        const std::uint64_t cap = opts.node_budget - stats.nodes + 1;
        SuccessorList succ = successors(d, i, s, cap);
        if (succ.truncated) {
            budget_exceeded = true;
            return false;
        }
        bool any = false;
        for (SuccessorInfo& si : succ.items) {
            KleinAux aux2;
            if (mode == Mode::Klein) {
                aux2 = klein_advance(aux, d, i, s, si.choice, si.state);
                if (!aux2.viable()) continue;
            }
            current.push_back({d.vertices()[i].id, si.choice});
            const bool sub = dfs(i + 1, si.state, aux2);
            current.pop_back();
            if (sub) any = true;
            if (budget_exceeded) return any;
            if (any && stop_after_first) return true;
        }
        if (!any && opts.memoize) memo.insert(std::move(key));
        return any;
    }
};

inline void require_klein_ready(const GermDiagram& d, bool strict) {
    const KleinCheck chk = validate_klein_germ(d, strict);
    if (chk.ok) return;
    std::string msg = "klein mode precondition failed: ";
    for (std::size_t i = 0; i < chk.failures.size(); ++i) {
        if (i) msg += "; ";
        msg += chk.failures[i];
    }
    throw ValidationError(msg);
}

inline Witness make_witness(const GermDiagram& d, Trace trace) {
    Witness w;
    w.trace = std::move(trace);
    w.diagram = build_extension_diagram(d, w.trace);
    w.condition = check_klein_conditions(w.diagram);
    return w;
}

}  // namespace detail

// Searches for a labelled extension of the germ.  Klein mode restricts to
// runs whose diagram fits one of the two filling shapes and first checks
// the germ-level necessary conditions (throws ValidationError otherwise).
// The witness, when present, is the first accepting run in canonical choice
// order; its diagram and condition are rebuilt from the trace rather than
// trusted from the search.
inline Verdict decide(const GermDiagram& d, Mode mode, SearchOptions opts = {}) {
    if (mode == Mode::Klein) detail::require_klein_ready(d, opts.klein_strict);
    detail::SearchEngine eng(d, mode, opts, true, 1);
    eng.run();
    Verdict v;
    v.mode = mode;
    v.stats = eng.stats;
    if (eng.found > 0) {
        v.outcome = Outcome::Extendable;
        Witness w = detail::make_witness(d, std::move(eng.stored[0]));
        if (mode == Mode::Klein && w.condition == KleinCondition::Neither)
            throw std::logic_error("search accepted a run whose diagram fits neither filling shape");
        v.witness = std::move(w);
    } else if (eng.budget_exceeded) {
        v.outcome = Outcome::BudgetExceeded;
    } else {
        v.outcome = Outcome::NotExtendable;
    }
    return v;
}

inline Verdict decide_general(const GermDiagram& d, SearchOptions opts = {}) {
    return decide(d, Mode::General, opts);
}

inline Verdict decide_klein(const GermDiagram& d, SearchOptions opts = {}) {
    return decide(d, Mode::Klein, opts);
}

struct Enumeration {
    std::vector<Witness> witnesses;  // the first `limit` accepting runs
    std::uint64_t total_count = 0;   // all accepting runs (lower bound if over budget)
    bool budget_exceeded = false;
    SearchStats stats;
};

inline Enumeration enumerate_witnesses(const GermDiagram& d, Mode mode, std::size_t limit,
                                       SearchOptions opts = {}) {
    if (mode == Mode::Klein) detail::require_klein_ready(d, opts.klein_strict);
    detail::SearchEngine eng(d, mode, opts, false, limit);
    eng.run();
    Enumeration out;
    out.total_count = eng.found;
    out.budget_exceeded = eng.budget_exceeded;
    out.stats = eng.stats;
    out.witnesses.reserve(eng.stored.size());
    for (Trace& t : eng.stored) out.witnesses.push_back(detail::make_witness(d, std::move(t)));
    return out;
}

// --- witness file format -----------------------------------------------------
//
// {"extension": {...}, "trace": [...]}; the extension embeds the condition
// its shape satisfies, and parsing recomputes and cross-checks it.

inline nlohmann::json witness_to_json(const Witness& w) {
    nlohmann::json j;
    j["extension"] = extension_to_json(w.diagram);
    auto& t = j["trace"] = nlohmann::json::array();
    for (const TraceStep& step : w.trace)
        t.push_back({{"vertex", step.vertex}, {"choice", choice_to_json(step.choice)}});
    return j;
}

inline std::string serialize_witness(const Witness& w) { return witness_to_json(w).dump(2) + "\n"; }

inline Witness parse_witness(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("witness file: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("witness file must be an object");
    detail::reject_unknown_fields(j, {"extension", "trace"}, "witness");
    if (!j.contains("extension") || !j.contains("trace"))
        throw ParseError("witness needs 'extension' and 'trace'");
    Witness w;
    w.diagram = extension_from_json(j["extension"]);
    w.trace = trace_from_json(j["trace"]);
    w.condition = check_klein_conditions(w.diagram);
    if (j["extension"].contains("condition") &&
        j["extension"]["condition"].get<std::string>() != to_string(w.condition))
        throw ParseError("witness condition does not match its extension diagram");
    return w;
}

}  // namespace reebext
