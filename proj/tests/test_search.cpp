#include "helpers.hpp"

using namespace reebext;
using testutil::load_fixture;
using testutil::path_germ;

namespace {

void check_witness_replays(const GermDiagram& d, const Witness& w) {
    const ReplayResult r = check_trace(d, w.trace);
    REQUIRE(r.accepted);
    const ExtensionDiagram rebuilt = build_extension_diagram(d, w.trace);
    CHECK(rebuilt == w.diagram);
    CHECK(check_extension_invariants(w.diagram, d).empty());
    CHECK(check_klein_conditions(w.diagram) == w.condition);
}

}  // namespace

TEST_CASE("the disc over a sphere is found immediately") {
    const GermDiagram d = load_fixture("sphere.germ");
    const Verdict v = decide_general(d);
    REQUIRE(v.outcome == Outcome::Extendable);
    REQUIRE(v.witness.has_value());
    CHECK(v.witness->trace.size() == 2);
    CHECK(v.witness->condition == KleinCondition::Neither);
    CHECK(v.witness->diagram.edges.size() == 1);
    CHECK(v.witness->diagram.edges[0].cls == SurfaceClass{0, 0});
    check_witness_replays(d, *v.witness);
    CHECK(enumerate_witnesses(d, Mode::General, 10).total_count == 1);
}

TEST_CASE("the crosscap chain extends exactly one way") {
    const GermDiagram d = load_fixture("path4.germ");

    const Verdict g = decide_general(d);
    REQUIRE(g.outcome == Outcome::Extendable);
    check_witness_replays(d, *g.witness);

    const Verdict k = decide_klein(d);
    REQUIRE(k.outcome == Outcome::Extendable);
    REQUIRE(k.witness.has_value());
    CHECK(k.witness->condition == KleinCondition::Condition2);
    const auto& edges = k.witness->diagram.edges;
    REQUIRE(edges.size() == 3);
    CHECK(edges[0].cls == SurfaceClass{0, 0});
    CHECK(edges[1].cls == SurfaceClass{1, 1});
    CHECK(edges[2].cls == SurfaceClass{0, 0});
    check_witness_replays(d, *k.witness);

    CHECK(enumerate_witnesses(d, Mode::General, 10).total_count == 1);
    CHECK(enumerate_witnesses(d, Mode::Klein, 10).total_count == 1);
}

TEST_CASE("only one sign pattern on the crosscap chain admits an extension") {
    const std::vector<VertexKind> kinds = {VertexKind::Max, VertexKind::Mobius, VertexKind::Mobius,
                                           VertexKind::Min};
    for (int bits = 0; bits < 16; ++bits) {
        std::vector<Sign> signs;
        for (int i = 0; i < 4; ++i)
            signs.push_back((bits >> (3 - i)) & 1 ? Sign::Minus : Sign::Plus);
        const GermDiagram d = path_germ(kinds, signs);
        const bool expect = bits == 0b0011;  // +,+,-,-
        CAPTURE(bits);
        CHECK((decide_general(d).outcome == Outcome::Extendable) == expect);
        CHECK((decide_klein(d).outcome == Outcome::Extendable) == expect);
    }
}

TEST_CASE("the loop pattern fills as a circle family") {
    const GermDiagram d = load_fixture("cycle4.germ");
    const Verdict k = decide_klein(d);
    REQUIRE(k.outcome == Outcome::Extendable);
    REQUIRE(k.witness.has_value());
    CHECK(k.witness->condition == KleinCondition::Condition1);
    CHECK(betti1(k.witness->diagram) == 1);
    for (const ExtensionEdge& e : k.witness->diagram.edges) CHECK(e.cls == SurfaceClass{0, 0});
    check_witness_replays(d, *k.witness);
    CHECK(enumerate_witnesses(d, Mode::General, 10).total_count == 1);
    CHECK(enumerate_witnesses(d, Mode::Klein, 10).total_count == 1);
}

TEST_CASE("the pinched torus germ has two fillings but only one odd one") {
    const GermDiagram d = load_fixture("loop6.germ");
    const Enumeration gen = enumerate_witnesses(d, Mode::General, 10);
    CHECK(gen.total_count == 2);
    REQUIRE(gen.witnesses.size() == 2);
    CHECK(gen.witnesses[0].diagram.edges[2].cls == SurfaceClass{2, 0});
    CHECK(gen.witnesses[1].diagram.edges[2].cls == SurfaceClass{2, 1});
    for (const Witness& w : gen.witnesses) check_witness_replays(d, w);

    const Verdict k = decide_klein(d);
    REQUIRE(k.outcome == Outcome::Extendable);
    CHECK(k.witness->condition == KleinCondition::Condition2);
    CHECK(k.witness->diagram.edges[2].cls == SurfaceClass{2, 1});
    CHECK(enumerate_witnesses(d, Mode::Klein, 10).total_count == 1);
}

TEST_CASE("every single sign flip kills extendability") {
    for (const char* name :
         {"path4_flip_max.germ", "path4_flip_mob1.germ", "path4_flip_mob2.germ",
          "path4_flip_min.germ", "cycle4_flip_max.germ", "cycle4_flip_dsaddle.germ",
          "cycle4_flip_usaddle.germ", "cycle4_flip_min.germ"}) {
        const GermDiagram d = load_fixture(name);
        CAPTURE(name);
        const Verdict g = decide_general(d);
        CHECK(g.outcome == Outcome::NotExtendable);
        CHECK_FALSE(g.witness.has_value());
        CHECK(enumerate_witnesses(d, Mode::General, 10).total_count == 0);
        if (validate_klein_germ(d).ok) {
            CHECK(decide_klein(d).outcome == Outcome::NotExtendable);
            CHECK(enumerate_witnesses(d, Mode::Klein, 10).total_count == 0);
        }
    }
}

TEST_CASE("klein mode refuses germs that cannot bound the target at all") {
    CHECK_THROWS_MATCHES(decide_klein(load_fixture("sphere.germ")), ValidationError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("precondition failed")));
    const GermDiagram split({{"v1", 4, Sign::Plus},
                             {"v2", 3, Sign::Minus},
                             {"v3", 2, Sign::Plus},
                             {"v4", 1, Sign::Minus}},
                            {{"e1", "v1", "v2"}, {"e2", "v3", "v4"}});
    CHECK_THROWS_AS(decide_klein(split), ValidationError);
    SearchOptions lax;
    lax.klein_strict = false;
    CHECK_THROWS_AS(decide(split, Mode::Klein, lax), ValidationError);
}

TEST_CASE("strictness does not change verdicts on well-formed inputs") {
    SearchOptions lax;
    lax.klein_strict = false;
    for (const char* name : {"path4.germ", "cycle4.germ", "loop6.germ"}) {
        const GermDiagram d = load_fixture(name);
        const Verdict strict = decide(d, Mode::Klein, {});
        const Verdict loose = decide(d, Mode::Klein, lax);
        CHECK(strict.outcome == loose.outcome);
    }
}

TEST_CASE("a starved node budget reports exhaustion, not a verdict") {
    const GermDiagram d = load_fixture("path4.germ");
    SearchOptions tiny;
    tiny.node_budget = 1;
    const Verdict v = decide(d, Mode::General, tiny);
    CHECK(v.outcome == Outcome::BudgetExceeded);
    CHECK_FALSE(v.witness.has_value());
    const Enumeration e = enumerate_witnesses(d, Mode::General, 10, tiny);
    CHECK(e.budget_exceeded);
}

TEST_CASE("memoization changes the node count, never the answer") {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        GeneratorParams p;
        p.seed = seed * 977 + 5;
        p.max_vertices = 7;
        const GermDiagram d = random_germ(p);
        SearchOptions memo_on, memo_off;
        memo_off.memoize = false;
        const Enumeration a = enumerate_witnesses(d, Mode::General, 3, memo_on);
        const Enumeration b = enumerate_witnesses(d, Mode::General, 3, memo_off);
        REQUIRE_FALSE(a.budget_exceeded);
        REQUIRE_FALSE(b.budget_exceeded);
        CAPTURE(seed);
        CHECK(a.total_count == b.total_count);
        CHECK(a.witnesses.size() == b.witnesses.size());
        for (std::size_t i = 0; i < a.witnesses.size(); ++i)
            CHECK(a.witnesses[i].trace == b.witnesses[i].trace);
    }
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        GeneratorParams p;
        p.seed = seed * 1013 + 3;
        p.max_vertices = 7;
        p.euler = 0;
        p.require_connected = true;
        p.mobius = seed % 2 ? MobiusTarget::Two : MobiusTarget::Zero;
        const GermDiagram d = random_germ(p);
        SearchOptions memo_off;
        memo_off.memoize = false;
        const Enumeration a = enumerate_witnesses(d, Mode::Klein, 3);
        const Enumeration b = enumerate_witnesses(d, Mode::Klein, 3, memo_off);
        CAPTURE(seed);
        CHECK(a.total_count == b.total_count);
    }
}

TEST_CASE("witness files carry the trace and the diagram faithfully") {
    const GermDiagram d = load_fixture("loop6.germ");
    const Verdict v = decide_klein(d);
    REQUIRE(v.witness.has_value());
    const std::string text = serialize_witness(*v.witness);
    const Witness back = parse_witness(text);
    CHECK(back.trace == v.witness->trace);
    CHECK(back.diagram == v.witness->diagram);
    CHECK(back.condition == v.witness->condition);

    nlohmann::json j = nlohmann::json::parse(text);
    j["extension"]["condition"] = "condition 1";
    CHECK_THROWS_MATCHES(parse_witness(j.dump()), ParseError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("does not match")));
    CHECK_THROWS_AS(parse_witness("[]"), ParseError);
    j = nlohmann::json::parse(text);
    j["other"] = true;
    CHECK_THROWS_AS(parse_witness(j.dump()), ParseError);
}
