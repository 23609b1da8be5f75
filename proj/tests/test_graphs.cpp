#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "nlqs/graphs.hpp"

using namespace nlqs;

namespace {

// Independent SRG parameter count straight from the adjacency matrix.
SrgParams count_params(const Graph& g) {
    SrgParams p;
    p.n_vertices = g.n;
    p.degree = g.degree(0);
    p.lambda_common = -1;
    p.mu_common = -1;
    for (int u = 0; u < g.n; ++u)
        for (int v = u + 1; v < g.n; ++v) {
            int common = 0;
            for (int w = 0; w < g.n; ++w) common += g.has_edge(u, w) && g.has_edge(v, w);
            int& slot = g.has_edge(u, v) ? p.lambda_common : p.mu_common;
            if (slot < 0) slot = common;
            if (slot != common) return {};
        }
    return p;
}

bool same(const SrgParams& a, const SrgParams& b) {
    return a.n_vertices == b.n_vertices && a.degree == b.degree && a.lambda_common == b.lambda_common &&
           a.mu_common == b.mu_common;
}

}  // namespace

TEST_CASE("srg_check classifies parameter sets") {
    auto petersen = srg_check({10, 3, 0, 1});
    CHECK(petersen.feasible);
    CHECK(petersen.type == SrgType::TypeII);

    auto pentagon = srg_check({5, 2, 0, 1});
    CHECK(pentagon.feasible);
    CHECK(pentagon.type == SrgType::TypeI);

    auto bad = srg_check({10, 3, 0, 2});
    CHECK_FALSE(bad.feasible);
    CHECK_FALSE(bad.violations.empty());
}

TEST_CASE("families carry their strongly regular parameters") {
    CHECK(same(*family_srg_params({Family::latin_square, 3}), {9, 6, 3, 6}));
    CHECK(same(*family_srg_params({Family::triangular, 4}), {6, 4, 2, 4}));
    CHECK(same(*family_srg_params({Family::square_lattice, 3}), {9, 4, 1, 2}));
    CHECK(same(*family_srg_params({Family::petersen, 0}), {10, 3, 0, 1}));
    CHECK_FALSE(family_srg_params({Family::hypercube, 4}).has_value());
}

TEST_CASE("built SRG families match a brute-force parameter count") {
    const FamilySpec specs[] = {{Family::petersen, 0},      {Family::paley, 13},       {Family::paley, 9},
                                {Family::square_lattice, 3}, {Family::square_lattice, 5}, {Family::latin_square, 3},
                                {Family::latin_square, 4},   {Family::triangular, 4},    {Family::triangular, 6}};
    for (const auto& s : specs) {
        CAPTURE(to_string(s.family));
        CAPTURE(s.size_param);
        const Graph g = build_graph(s);
        REQUIRE(g.srg.has_value());
        CHECK(same(count_params(g), *g.srg));
        CHECK(srg_check(*g.srg).feasible);
        for (int u = 0; u < g.n; ++u) CHECK(g.degree(u) == g.srg->degree);
    }
}

TEST_CASE("hypercube and complete graphs") {
    const Graph q4 = build_graph({Family::hypercube, 4});
    CHECK(q4.n == 16);
    for (int u = 0; u < 16; ++u) {
        CHECK(q4.degree(u) == 4);
        for (int v : q4.neighbors(u)) CHECK(__builtin_popcount(unsigned(u ^ v)) == 1);
    }
    const Graph k7 = build_graph({Family::complete, 7});
    CHECK(k7.n == 7);
    CHECK(k7.degree(3) == 6);
    CHECK_FALSE(k7.has_edge(2, 2));
}

TEST_CASE("paley accepts only primes congruent to 1 mod 4 and the hard-coded 9") {
    CHECK(is_prime(13));
    CHECK_FALSE(is_prime(9));
    CHECK_THROWS(build_graph({Family::paley, 7}));
    CHECK_THROWS(build_graph({Family::paley, 15}));
    CHECK(build_graph({Family::paley, 9}).n == 9);
}

TEST_CASE("collapse of Petersen with one marked vertex") {
    const Graph g = build_graph({Family::petersen, 0});
    const CollapsedGraph cg = collapse(g, {0});
    REQUIRE(cg.size() == 3);
    CHECK(cg.class_sizes == std::vector<long long>{1, 3, 6});
    const double expect[3][3] = {{0, std::sqrt(3.0), 0}, {std::sqrt(3.0), 0, std::sqrt(2.0)}, {0, std::sqrt(2.0), 2}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(cg.reduced_adjacency(i, j) == doctest::Approx(expect[i][j]).epsilon(1e-12));
    CHECK(is_equitable(g, cg.vertex_class, cg.size()));

    const CollapsedGraph an = collapse_analytic(SrgParams{10, 3, 0, 1});
    REQUIRE(an.size() == 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(std::abs(an.reduced_adjacency(i, j) - cg.reduced_adjacency(i, j)) < 1e-12);
}

TEST_CASE("collapse of hypercube and complete graphs") {
    const CollapsedGraph q4 = collapse(build_graph({Family::hypercube, 4}), {0});
    CHECK(q4.class_sizes == std::vector<long long>{1, 4, 6, 4, 1});

    const CollapsedGraph k6 = collapse(build_graph({Family::complete, 6}), {0});
    REQUIRE(k6.size() == 2);
    CHECK(k6.class_sizes == std::vector<long long>{1, 5});
    CHECK(k6.reduced_adjacency(0, 1) == doctest::Approx(std::sqrt(5.0)));
    CHECK(k6.reduced_adjacency(1, 1) == doctest::Approx(4.0));

    const CollapsedGraph q2 = collapse_analytic({Family::hypercube, 2});
    REQUIRE(q2.size() == 3);
    CHECK(q2.reduced_adjacency(0, 1) == doctest::Approx(std::sqrt(2.0)));
    CHECK(q2.reduced_adjacency(1, 2) == doctest::Approx(std::sqrt(2.0)));
    CHECK(q2.reduced_adjacency(0, 2) == doctest::Approx(0.0));
    CHECK(q2.reduced_adjacency(1, 1) == doctest::Approx(0.0));
}

TEST_CASE("complete collapse with two marked vertices matches the brute-force collapse") {
    const CollapsedGraph an = collapse_complete(100, 2);
    const CollapsedGraph bf = collapse(build_graph({Family::complete, 100}), {0, 1});
    REQUIRE(an.size() == bf.size());
    CHECK(an.class_sizes == std::vector<long long>{2, 98});
    CHECK(an.reduced_adjacency(0, 1) == doctest::Approx(std::sqrt(2.0) * std::sqrt(98.0)));
    for (int i = 0; i < an.size(); ++i)
        for (int j = 0; j < an.size(); ++j)
            CHECK(an.reduced_adjacency(i, j) == doctest::Approx(bf.reduced_adjacency(i, j)).epsilon(1e-12));
    CHECK(an.marked_count() == 2);
    CHECK(an.n_vertices() == 100);
}

TEST_CASE("analytic SRG collapse agrees with explicit collapse across families") {
    const FamilySpec specs[] = {{Family::paley, 13}, {Family::square_lattice, 4}, {Family::latin_square, 4},
                                {Family::triangular, 5}};
    for (const auto& s : specs) {
        CAPTURE(to_string(s.family));
        const Graph g = build_graph(s);
        const CollapsedGraph bf = collapse(g, {0});
        const CollapsedGraph an = collapse_analytic(*g.srg);
        REQUIRE(bf.size() == an.size());
        CHECK(bf.class_sizes == an.class_sizes);
        for (int i = 0; i < an.size(); ++i)
            for (int j = 0; j < an.size(); ++j)
                CHECK(std::abs(an.reduced_adjacency(i, j) - bf.reduced_adjacency(i, j)) < 1e-12);
        CHECK(an.reduced_adjacency.symmetry_residual() < 1e-14);
    }
}

TEST_CASE("is_equitable rejects a non-equitable partition") {
    const Graph g = build_graph({Family::petersen, 0});
    std::vector<int> cls(10, 1);
    cls[0] = 0;
    CHECK_FALSE(is_equitable(g, cls, 2));
}

TEST_CASE("edge list and collapsed JSON round trips") {
    const Graph g = build_graph({Family::triangular, 5});
    std::stringstream ss;
    write_edge_list(g, ss);
    const Graph back = read_edge_list(ss, g.n);
    CHECK(back.n == g.n);
    CHECK(back.adj == g.adj);

    const CollapsedGraph cg = collapse(g, {0});
    const CollapsedGraph rt = collapsed_from_json(collapsed_to_json(cg));
    CHECK(rt.class_sizes == cg.class_sizes);
    CHECK(rt.reduced_adjacency.data() == cg.reduced_adjacency.data());
}

TEST_CASE("family names parse") {
    for (Family f : {Family::complete, Family::paley, Family::square_lattice, Family::latin_square,
                     Family::triangular, Family::hypercube, Family::petersen})
        CHECK(parse_family(to_string(f)) == f);
    CHECK_THROWS(parse_family("dodecahedron"));
}
