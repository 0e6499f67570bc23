#pragma once

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include <reebext/reebext.hpp>

namespace testutil {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string fixture_path(const std::string& name) {
    return std::string(REEBEXT_FIXTURE_DIR) + "/" + name;
}

inline reebext::GermDiagram load_fixture(const std::string& name) {
    return reebext::parse_germ(read_file(fixture_path(name)));
}

// Path-shaped germ (one Max, one Min, vertex kinds in between all degree 2)
// with an arbitrary sign assignment; used for sign-flip sweeps.
inline reebext::GermDiagram path_germ(const std::vector<reebext::VertexKind>& kinds,
                                      const std::vector<reebext::Sign>& signs) {
    REQUIRE(kinds.size() == signs.size());
    std::vector<reebext::GermVertex> vs;
    std::vector<reebext::GermEdge> es;
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        vs.push_back({"v" + std::to_string(i + 1),
                      static_cast<double>(kinds.size() - i), signs[i]});
        if (i + 1 < kinds.size())
            es.push_back({"e" + std::to_string(i + 1), "v" + std::to_string(i + 1),
                          "v" + std::to_string(i + 2)});
    }
    return reebext::GermDiagram(vs, es);
}

}  // namespace testutil
