// reebext: decision engine for signed Reeb germs along closed surfaces.
//
// Exit codes across all subcommands:
//   0  extendable / valid / accepted
//   1  not extendable / invalid / rejected
//   2  unusable input (bad file, bad arguments, unmet mode preconditions)
//   3  search budget exhausted before an answer

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include <reebext/reebext.hpp>

namespace {

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path == "-" || path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::string verdict_line(const reebext::Verdict& v) {
    if (v.outcome != reebext::Outcome::Extendable) return reebext::to_string(v.outcome);
    std::string line = "extendable";
    if (v.witness && v.witness->condition != reebext::KleinCondition::Neither)
        line += std::string(" (") + reebext::to_string(v.witness->condition) + ")";
    return line;
}

void print_stats(const reebext::SearchStats& st) {
    std::cerr << "nodes: " << st.nodes << "\n"
              << "memo entries: " << st.memo_entries << "\n";
}

int run_validate(const std::string& path, bool klein, bool strict) {
    const std::string text = read_input(path);
    std::optional<reebext::GermDiagram> d;
    try {
        d = reebext::parse_germ(text);
    } catch (const reebext::ValidationError& e) {
        std::cout << "invalid: " << e.what() << "\n";
        return 1;
    }
    const reebext::ValidationReport rep = reebext::validate_germ(*d);
    std::cout << "vertices: " << d->vertices().size() << "\n"
              << "edges: " << d->edges().size() << "\n"
              << "euler characteristic: " << rep.euler << "\n"
              << "connected components: " << rep.components << "\n"
              << "first betti number: " << rep.betti1 << "\n"
              << "mobius vertices: " << rep.mobius_count << "\n";
    if (!klein) return 0;
    const reebext::KleinCheck chk = reebext::validate_klein_germ(*d, strict);
    for (const auto& f : chk.failures) std::cout << "failure: " << f << "\n";
    for (const auto& w : chk.warnings) std::cout << "warning: " << w << "\n";
    std::cout << "klein-ready: " << (chk.ok ? "yes" : "no") << "\n";
    return chk.ok ? 0 : 1;
}

int outcome_code(const reebext::Verdict& v) {
    switch (v.outcome) {
        case reebext::Outcome::Extendable: return 0;
        case reebext::Outcome::NotExtendable: return 1;
        case reebext::Outcome::BudgetExceeded: return 3;
    }
    return 2;
}

int run_decide(const std::string& path, reebext::Mode mode, const reebext::SearchOptions& opts,
               bool stats) {
    const reebext::GermDiagram d = reebext::parse_germ(read_input(path));
    const reebext::Verdict v = reebext::decide(d, mode, opts);
    if (stats) print_stats(v.stats);
    std::cout << verdict_line(v) << "\n";
    return outcome_code(v);
}

int run_witness(const std::string& path, reebext::Mode mode, const reebext::SearchOptions& opts,
                bool stats, const std::string& out, const std::string& dot) {
    const reebext::GermDiagram d = reebext::parse_germ(read_input(path));
    const reebext::Verdict v = reebext::decide(d, mode, opts);
    if (stats) print_stats(v.stats);
    if (v.outcome == reebext::Outcome::Extendable) {
        write_output(out, reebext::serialize_witness(*v.witness));
        if (!dot.empty()) write_output(dot, reebext::export_dot(v.witness->diagram));
    }
    std::cerr << verdict_line(v) << "\n";
    return outcome_code(v);
}

int run_enumerate(const std::string& path, reebext::Mode mode, std::size_t limit,
                  const reebext::SearchOptions& opts, bool stats) {
    const reebext::GermDiagram d = reebext::parse_germ(read_input(path));
    const reebext::Enumeration en = reebext::enumerate_witnesses(d, mode, limit, opts);
    if (stats) print_stats(en.stats);
    nlohmann::json j;
    j["total_count"] = en.total_count;
    j["budget_exceeded"] = en.budget_exceeded;
    auto& ws = j["witnesses"] = nlohmann::json::array();
    for (const reebext::Witness& w : en.witnesses) ws.push_back(reebext::witness_to_json(w));
    std::cout << j.dump(2) << "\n";
    if (en.budget_exceeded && en.total_count == 0) return 3;
    return en.total_count > 0 ? 0 : 1;
}

int run_check_trace(const std::string& germ_path, const std::string& trace_path) {
    const reebext::GermDiagram d = reebext::parse_germ(read_input(germ_path));
    const std::string ttext = read_input(trace_path);
    nlohmann::json tj;
    try {
        tj = nlohmann::json::parse(ttext);
    } catch (const nlohmann::json::parse_error& e) {
        throw reebext::ParseError(std::string("trace file: ") + e.what());
    }
    reebext::Trace trace;
    std::optional<reebext::ExtensionDiagram> embedded;
    if (tj.is_object()) {
        const reebext::Witness w = reebext::parse_witness(ttext);
        trace = w.trace;
        embedded = w.diagram;
    } else {
        trace = reebext::trace_from_json(tj);
    }
    const reebext::ReplayResult rr = reebext::check_trace(d, trace);
    if (!rr.accepted) {
        std::cout << "rejected: " << rr.reason << "\n";
        return 1;
    }
    const reebext::ExtensionDiagram x = reebext::build_extension_diagram(d, trace);
    if (embedded && !(x == *embedded)) {
        std::cout << "rejected: embedded extension does not match the trace\n";
        return 1;
    }
    const reebext::KleinCondition cond = reebext::check_klein_conditions(x);
    std::string line = "accepted";
    if (cond != reebext::KleinCondition::Neither)
        line += std::string(" (") + reebext::to_string(cond) + ")";
    std::cout << line << "\n";
    return 0;
}

int run_export_dot(const std::string& path, const std::string& out) {
    const std::string text = read_input(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw reebext::ParseError(std::string("input file: ") + e.what());
    }
    std::string dot;
    if (j.is_object() && j.contains("extension")) {
        const reebext::Witness w = reebext::parse_witness(text);
        dot = reebext::export_dot(w.diagram);
    } else {
        dot = reebext::export_dot(reebext::parse_germ(text));
    }
    write_output(out, dot);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"decision engine and witness generator for signed Reeb germs"};
    app.require_subcommand(1);

    std::string in_path, out_path = "-", dot_path, mode_str = "general", mobius_str = "any";
    std::uint64_t budget = 10'000'000;
    std::uint64_t seed = 0;
    std::size_t limit = 1;
    int max_vertices = 8;
    int euler = 0;
    bool klein = false, no_strict = false, stats = false, connected = false;
    std::string trace_path;

    auto* c_validate = app.add_subcommand("validate", "check a germ file and print its invariants");
    c_validate->add_option("file", in_path, "germ file, or - for stdin")->required();
    c_validate->add_flag("--klein", klein, "also test the solid Klein bottle preconditions");
    c_validate->add_flag("--no-strict", no_strict, "downgrade the partially proven shape test to a warning");

    const auto add_search_opts = [&](CLI::App* c) {
        c->add_option("file", in_path, "germ file, or - for stdin")->required();
        c->add_option("--mode", mode_str, "extension target: general or klein")
            ->required()
            ->check(CLI::IsMember({"general", "klein"}));
        c->add_option("--budget", budget, "node budget for the search");
        c->add_flag("--no-strict", no_strict, "downgrade the partially proven shape test to a warning");
        c->add_flag("--stats", stats, "print search statistics to stderr");
    };

    auto* c_decide = app.add_subcommand("decide", "decide whether the germ extends");
    add_search_opts(c_decide);

    auto* c_witness = app.add_subcommand("witness", "decide and write a witness for extendability");
    add_search_opts(c_witness);
    c_witness->add_option("--out", out_path, "witness file, or - for stdout");
    c_witness->add_option("--dot", dot_path, "also write the extension diagram as graphviz");

    auto* c_enum = app.add_subcommand("enumerate", "count all witnesses, printing the first few");
    add_search_opts(c_enum);
    c_enum->add_option("--limit", limit, "how many witnesses to include in the output");

    auto* c_check = app.add_subcommand("check-trace", "replay a trace or witness against a germ");
    c_check->add_option("germ", in_path, "germ file, or - for stdin")->required();
    c_check->add_option("trace", trace_path, "trace or witness file")->required();

    auto* c_random = app.add_subcommand("random", "generate a seeded random germ");
    c_random->add_option("--seed", seed, "generator seed")->required();
    c_random->add_option("--max-vertices", max_vertices, "vertex budget for the draw");
    auto* euler_opt = c_random->add_option("--euler", euler, "target euler characteristic");
    c_random->add_option("--mobius", mobius_str, "band vertex count: 0, 2 or any")
        ->check(CLI::IsMember({"0", "2", "any"}));
    c_random->add_flag("--connected", connected, "only emit connected germs");
    c_random->add_option("--out", out_path, "output file, or - for stdout");

    auto* c_dot = app.add_subcommand("export-dot", "render a germ or witness file as graphviz");
    c_dot->add_option("file", in_path, "germ or witness file, or - for stdin")->required();
    c_dot->add_option("--out", out_path, "output file, or - for stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        reebext::SearchOptions opts;
        opts.node_budget = budget;
        opts.klein_strict = !no_strict;
        const reebext::Mode mode =
            mode_str == "klein" ? reebext::Mode::Klein : reebext::Mode::General;
        if (c_validate->parsed()) return run_validate(in_path, klein, !no_strict);
        if (c_decide->parsed()) return run_decide(in_path, mode, opts, stats);
        if (c_witness->parsed()) return run_witness(in_path, mode, opts, stats, out_path, dot_path);
        if (c_enum->parsed()) return run_enumerate(in_path, mode, limit, opts, stats);
        if (c_check->parsed()) return run_check_trace(in_path, trace_path);
        if (c_random->parsed()) {
            reebext::GeneratorParams p;
            p.seed = seed;
            p.max_vertices = max_vertices;
            p.require_connected = connected;
            if (euler_opt->count() > 0) p.euler = euler;
            p.mobius = mobius_str == "0"  ? reebext::MobiusTarget::Zero
                       : mobius_str == "2" ? reebext::MobiusTarget::Two
                                           : reebext::MobiusTarget::Any;
            write_output(out_path, reebext::serialize_germ(reebext::random_germ(p)));
            return 0;
        }
        if (c_dot->parsed()) return run_export_dot(in_path, out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
