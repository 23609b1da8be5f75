#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nlqs/matrix.hpp"

namespace nlqs {

struct SrgParams {
    int n_vertices = 0;
    int degree = 0;
    int lambda_common = 0;
    int mu_common = 0;
};

enum class SrgType { TypeI, TypeII, neither };

struct FeasibilityReport {
    bool feasible = false;
    SrgType type = SrgType::neither;
    std::vector<std::string> violations;
};

FeasibilityReport srg_check(const SrgParams& p);
std::string to_string(SrgType t);

enum class Family { complete, paley, square_lattice, latin_square, triangular, hypercube, petersen };

struct FamilySpec {
    Family family = Family::complete;
    int size_param = 0;
};

std::string to_string(Family f);
Family parse_family(const std::string& name);

// Parameters of the family member when it is strongly regular.
std::optional<SrgParams> family_srg_params(const FamilySpec& spec);
int family_vertex_count(const FamilySpec& spec);

struct Graph {
    int n = 0;
    std::vector<std::uint8_t> adj;  // n*n, row-major
    std::optional<SrgParams> srg;

    Graph() = default;
    explicit Graph(int n_vertices)
        : n(n_vertices), adj(std::size_t(n_vertices) * std::size_t(n_vertices), 0) {}

    bool has_edge(int u, int v) const { return adj[std::size_t(u) * n + v] != 0; }
    void add_edge(int u, int v);
    int degree(int u) const;
    std::vector<int> neighbors(int u) const;
};

Graph build_graph(const FamilySpec& spec);
Graph build_from_srg_family(const FamilySpec& spec);

bool is_prime(int q);

// Vertex classes over which the search evolves identically.
struct CollapsedGraph {
    std::vector<long long> class_sizes;
    Matrix reduced_adjacency;
    double degree = 0.0;
    // classes [0, n_marked_classes) partition the marked set
    int n_marked_classes = 1;
    // vertex -> class; only filled when collapsed from an explicit graph
    std::vector<int> vertex_class;

    int size() const { return int(class_sizes.size()); }
    long long n_vertices() const;
    long long marked_count() const;
};

CollapsedGraph collapse(const Graph& graph, const std::vector<int>& marked);
CollapsedGraph collapse_analytic(const FamilySpec& spec, int marked_count = 1);
CollapsedGraph collapse_analytic(const SrgParams& params);
CollapsedGraph collapse_complete(long long n, long long marked_count);

// Exact integer check that `vertex_class` is an equitable partition of `graph`.
bool is_equitable(const Graph& graph, const std::vector<int>& vertex_class, int n_classes);

void write_edge_list(const Graph& graph, std::ostream& out);
Graph read_edge_list(std::istream& in, int n_vertices = -1);

std::string collapsed_to_json(const CollapsedGraph& cg);
CollapsedGraph collapsed_from_json(const std::string& text);

}  // namespace nlqs
