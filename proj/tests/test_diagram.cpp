#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "tt/diagram.hpp"
#include "tt/structure.hpp"

using namespace tt;

static std::string slurp(const std::string& name) {
    std::ifstream f(std::string(TT_DATA_DIR) + "/" + name);
    REQUIRE(f.good());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

static std::multiset<size_t> region_sizes(const LinkDiagram& d) {
    std::multiset<size_t> s;
    for (const Region& r : d.regions) s.insert(r.size());
    return s;
}

TEST_CASE("trefoil: 3 crossings, 6 edges, 5 regions of sizes 2,2,2,3,3") {
    auto p = parse_diagram(slurp("trefoil.json"));
    REQUIRE(p.link.has_value());
    const LinkDiagram& d = *p.link;
    CHECK(d.crossings.size() == 3);
    CHECK(d.edges.size() == 6);
    CHECK(d.regions.size() == 5);
    CHECK(region_sizes(d) == std::multiset<size_t>{2, 2, 2, 3, 3});
}

TEST_CASE("single-crossing kink: regions of sizes 1,1,2") {
    auto p = parse_diagram(slurp("kink.json"));
    REQUIRE(p.link.has_value());
    CHECK(region_sizes(*p.link) == std::multiset<size_t>{1, 1, 2});
}

TEST_CASE("square weave: 4 quadrilateral regions on the torus") {
    auto p = parse_diagram(slurp("squareweave.json"));
    REQUIRE(p.link.has_value());
    const LinkDiagram& d = *p.link;
    CHECK(d.regions.size() == 4);
    CHECK(region_sizes(d) == std::multiset<size_t>{4, 4, 4, 4});
    CHECK(d.components.size() == 4);
    // alternating: every edge joins under- to overpass
    for (size_t e = 0; e < d.edges.size(); ++e) CHECK(d.kappa_prime(int(e)) != 0);
    // overpass structure: 4 overpasses and 4 underpasses, each covering one crossing
    int over = 0, under = 0;
    for (const Strandpass& sp : d.passes) {
        CHECK(sp.covered.size() == 1);
        (sp.over ? over : under)++;
    }
    CHECK(over == 4);
    CHECK(under == 4);
}

TEST_CASE("overpass graph: vertex degree 2(n_a + 1)") {
    for (const char* file : {"squareweave.json", "trefoil.json"}) {
        auto p = parse_diagram(slurp(file));
        const LinkDiagram& d = *p.link;
        if (!d.ambient.torus) continue;  // vertical structure is a torus feature
        PeripheralStructure ps = build_structure(d);
        std::map<int, int> degree;  // north point -> incident N-edges
        for (const Eps& e : ps.eps) {
            if (e.kind != EpsKind::NEdge) continue;
            degree[e.tail]++;
            degree[e.head]++;
        }
        for (size_t pi = 0; pi < d.passes.size(); ++pi) {
            if (!d.passes[pi].over) continue;
            int pt = ps.pass_npoint.at(int(pi));
            CHECK(degree[pt] == 2 * (int(d.passes[pi].covered.size()) + 1));
        }
    }
}

TEST_CASE("degenerate inputs are rejected with the offending id") {
    CHECK_THROWS_WITH_AS(parse_diagram(R"({"ambient":"sphere","kind":"link",
        "crossings":[],"edges":[]})"),
                         doctest::Contains("no crossings"), std::runtime_error);
    // dangling end: drop one edge of the trefoil
    auto txt = slurp("trefoil.json");
    auto cut = txt.find(R"({"id": "x6")");
    auto txt2 = txt.substr(0, cut - 5) + "\n  ]\n}\n";
    CHECK_THROWS_AS(parse_diagram(txt2), std::runtime_error);
    // non-cellular torus diagram: break one wrap
    auto weave = slurp("squareweave.json");
    auto pos = weave.find(R"("wrap": [1, 0]})");
    weave.replace(pos, 15, R"("wrap": [0, 0]})");
    CHECK_THROWS_WITH_AS(parse_diagram(weave), doctest::Contains("non-cellular"),
                         std::runtime_error);
}

TEST_CASE("Borromean FAL bow-tie graph and region graph") {
    auto p = parse_diagram(slurp("borromean.json"));
    REQUIRE(p.fal.has_value());
    const FalDiagram& d = *p.fal;
    const BowTieGraph& b = d.bowtie;
    CHECK(b.vertices.size() == 6);
    CHECK(b.edges.size() == 12);
    CHECK(b.euler() == 2);
    int bowties = 0;
    for (const BtFace& f : b.faces) bowties += f.bowtie ? 1 : 0;
    CHECK(bowties == 4);
    CHECK(int(b.faces.size()) - bowties == 4);

    RegionGraph g = region_graph(b);
    CHECK(g.face_of_vertex.size() == 4);
    CHECK(g.edges.size() == 6);
    CHECK(g.faces.size() == 4);
    // K4: each pair of regions joined exactly once
    std::multiset<std::pair<int, int>> pairs;
    for (auto [a, c] : g.edges) pairs.insert(std::minmax(a, c));
    CHECK(pairs.size() == 6);
    std::set<std::pair<int, int>> unique_pairs(pairs.begin(), pairs.end());
    CHECK(unique_pairs.size() == 6);
}

TEST_CASE("half-twist flag leaves the bow-tie graph unchanged") {
    auto base = slurp("borromean.json");
    auto p1 = parse_diagram(base);
    auto pos = base.find(R"("half_twist": false)");
    auto twisted = base;
    twisted.replace(pos, 19, R"("half_twist": true )");
    auto p2 = parse_diagram(twisted);
    CHECK(p2.fal->circles[0].half_twist);
    const BowTieGraph& a = p1.fal->bowtie;
    const BowTieGraph& b = p2.fal->bowtie;
    REQUIRE(a.vertices.size() == b.vertices.size());
    REQUIRE(a.edges.size() == b.edges.size());
    CHECK(a.faces.size() == b.faces.size());
    for (size_t i = 0; i < a.edges.size(); ++i) {
        CHECK(a.edges[i].ends[0] == b.edges[i].ends[0]);
        CHECK(a.edges[i].ends[1] == b.edges[i].ends[1]);
    }
    for (size_t i = 0; i < a.vertices.size(); ++i) CHECK(a.vertices[i].rot == b.vertices[i].rot);
}
