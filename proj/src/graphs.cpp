#include "nlqs/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace nlqs {

FeasibilityReport srg_check(const SrgParams& p) {
    FeasibilityReport r;
    const long long N = p.n_vertices, k = p.degree, l = p.lambda_common, m = p.mu_common;
    if (N < 0 || k < 0 || l < 0 || m < 0) {
        r.violations.push_back("negative parameter");
        return r;
    }
    if (!(k > 0 && k < N)) r.violations.push_back("degree must satisfy 0 < k < N");
    if (l > k - 1) r.violations.push_back("lambda must satisfy lambda <= k - 1");
    if (m > k) r.violations.push_back("mu must satisfy mu <= k");
    if (k * (k - l - 1) != (N - k - 1) * m) {
        std::ostringstream os;
        os << "counting identity fails: k(k-lambda-1) = " << k * (k - l - 1)
           << " but (N-k-1)mu = " << (N - k - 1) * m;
        r.violations.push_back(os.str());
    }
    r.feasible = r.violations.empty();
    if (r.feasible) {
        r.type = ((N - 1) * (l - m) + 2 * k == 0) ? SrgType::TypeI : SrgType::TypeII;
    }
    return r;
}

std::string to_string(SrgType t) {
    switch (t) {
        case SrgType::TypeI: return "TypeI";
        case SrgType::TypeII: return "TypeII";
        default: return "neither";
    }
}

std::string to_string(Family f) {
    switch (f) {
        case Family::complete: return "complete";
        case Family::paley: return "paley";
        case Family::square_lattice: return "square_lattice";
        case Family::latin_square: return "latin_square";
        case Family::triangular: return "triangular";
        case Family::hypercube: return "hypercube";
        case Family::petersen: return "petersen";
    }
    return "?";
}

Family parse_family(const std::string& name) {
    std::string s = name;
    std::replace(s.begin(), s.end(), '-', '_');
    for (Family f : {Family::complete, Family::paley, Family::square_lattice, Family::latin_square,
                     Family::triangular, Family::hypercube, Family::petersen})
        if (to_string(f) == s) return f;
    if (s == "l2") return Family::square_lattice;
    if (s == "l3") return Family::latin_square;
    if (s == "t") return Family::triangular;
    throw std::invalid_argument("unknown graph family: " + name);
}

bool is_prime(int q) {
    if (q < 2) return false;
    for (int d = 2; d * d <= q; ++d)
        if (q % d == 0) return false;
    return true;
}

static void validate(const FamilySpec& s) {
    const int t = s.size_param;
    auto fail = [&](const std::string& why) {
        throw std::invalid_argument(to_string(s.family) + " with size " + std::to_string(t) + ": " + why);
    };
    switch (s.family) {
        case Family::complete:
            if (t < 2) fail("need N >= 2");
            break;
        case Family::paley:
            if (t != 9 && !(is_prime(t) && t % 4 == 1)) fail("need a prime q = 1 mod 4 (or q = 9)");
            break;
        case Family::square_lattice:
            if (t < 2) fail("need t >= 2");
            break;
        case Family::latin_square:
            if (t < 3) fail("need t >= 3");
            break;
        case Family::triangular:
            if (t < 4) fail("need t >= 4");
            break;
        case Family::hypercube:
            if (t < 1 || t > 20) fail("need 1 <= n <= 20");
            break;
        case Family::petersen:
            break;
    }
}

std::optional<SrgParams> family_srg_params(const FamilySpec& spec) {
    validate(spec);
    const int t = spec.size_param;
    switch (spec.family) {
        case Family::paley: return SrgParams{t, (t - 1) / 2, (t - 5) / 4, (t - 1) / 4};
        case Family::square_lattice: return SrgParams{t * t, 2 * (t - 1), t - 2, 2};
        case Family::latin_square: return SrgParams{t * t, 3 * (t - 1), t, 6};
        case Family::triangular: return SrgParams{t * (t - 1) / 2, 2 * (t - 2), t - 2, 4};
        case Family::petersen: return SrgParams{10, 3, 0, 1};
        default: return std::nullopt;
    }
}

int family_vertex_count(const FamilySpec& spec) {
    validate(spec);
    switch (spec.family) {
        case Family::complete: return spec.size_param;
        case Family::hypercube: return 1 << spec.size_param;
        default: return family_srg_params(spec)->n_vertices;
    }
}

void Graph::add_edge(int u, int v) {
    if (u == v) throw std::invalid_argument("self-loop");
    adj[std::size_t(u) * n + v] = 1;
    adj[std::size_t(v) * n + u] = 1;
}

int Graph::degree(int u) const {
    int d = 0;
    for (int v = 0; v < n; ++v) d += adj[std::size_t(u) * n + v];
    return d;
}

std::vector<int> Graph::neighbors(int u) const {
    std::vector<int> out;
    for (int v = 0; v < n; ++v)
        if (has_edge(u, v)) out.push_back(v);
    return out;
}

namespace {

// Paley(9) = the 3x3 rook graph; GF(9) elements a + b*i indexed as 3a + b.
constexpr int kPaley9Edges[][2] = {{0, 1}, {0, 2}, {0, 3}, {0, 6}, {1, 2}, {1, 4}, {1, 7}, {2, 5}, {2, 8},
                                   {3, 4}, {3, 5}, {3, 6}, {4, 5}, {4, 7}, {5, 8}, {6, 7}, {6, 8}, {7, 8}};

constexpr int kPetersen[10][3] = {{1, 4, 5}, {0, 2, 6}, {1, 3, 7}, {2, 4, 8}, {0, 3, 9},
                                  {0, 7, 8}, {1, 8, 9}, {2, 5, 9}, {3, 5, 6}, {4, 6, 7}};

Graph paley(int q) {
    Graph g(q);
    if (q == 9) {
        for (auto& e : kPaley9Edges) g.add_edge(e[0], e[1]);
        return g;
    }
    std::vector<char> residue(q, 0);
    for (long long x = 1; x < q; ++x) residue[(x * x) % q] = 1;
    for (int u = 0; u < q; ++u)
        for (int v = u + 1; v < q; ++v)
            if (residue[(v - u) % q]) g.add_edge(u, v);
    return g;
}

Graph lattice(int t, bool with_symbols) {
    Graph g(t * t);
    for (int a = 0; a < t * t; ++a)
        for (int b = a + 1; b < t * t; ++b) {
            int ra = a / t, ca = a % t, rb = b / t, cb = b % t;
            bool adj = ra == rb || ca == cb;
            if (with_symbols) adj = adj || (ra + ca) % t == (rb + cb) % t;
            if (adj) g.add_edge(a, b);
        }
    return g;
}

Graph triangular(int t) {
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < t; ++a)
        for (int b = a + 1; b < t; ++b) pairs.emplace_back(a, b);
    Graph g(int(pairs.size()));
    for (int u = 0; u < g.n; ++u)
        for (int v = u + 1; v < g.n; ++v) {
            auto [a, b] = pairs[u];
            auto [c, d] = pairs[v];
            int shared = (a == c) + (a == d) + (b == c) + (b == d);
            if (shared == 1) g.add_edge(u, v);
        }
    return g;
}

}  // namespace

Graph build_graph(const FamilySpec& spec) {
    validate(spec);
    const int t = spec.size_param;
    Graph g;
    switch (spec.family) {
        case Family::complete:
            g = Graph(t);
            for (int u = 0; u < t; ++u)
                for (int v = u + 1; v < t; ++v) g.add_edge(u, v);
            break;
        case Family::paley: g = paley(t); break;
        case Family::square_lattice: g = lattice(t, false); break;
        case Family::latin_square: g = lattice(t, true); break;
        case Family::triangular: g = triangular(t); break;
        case Family::hypercube:
            g = Graph(1 << t);
            for (int u = 0; u < g.n; ++u)
                for (int b = 0; b < t; ++b) {
                    int v = u ^ (1 << b);
                    if (v > u) g.add_edge(u, v);
                }
            break;
        case Family::petersen:
            g = Graph(10);
            for (int u = 0; u < 10; ++u)
                for (int v : kPetersen[u])
                    if (v > u) g.add_edge(u, v);
            break;
    }
    g.srg = family_srg_params(spec);
    return g;
}

Graph build_from_srg_family(const FamilySpec& spec) {
    if (!family_srg_params(spec)) throw std::invalid_argument(to_string(spec.family) + " is not strongly regular");
    return build_graph(spec);
}

long long CollapsedGraph::n_vertices() const {
    long long n = 0;
    for (long long s : class_sizes) n += s;
    return n;
}

long long CollapsedGraph::marked_count() const {
    long long n = 0;
    for (int i = 0; i < n_marked_classes; ++i) n += class_sizes[i];
    return n;
}

CollapsedGraph collapse(const Graph& graph, const std::vector<int>& marked) {
    const int n = graph.n;
    if (marked.empty()) throw std::invalid_argument("collapse: marked set is empty");
    std::vector<char> is_marked(n, 0);
    for (int v : marked) {
        if (v < 0 || v >= n) throw std::invalid_argument("collapse: marked vertex out of range");
        is_marked[v] = 1;
    }
    // visiting order: marked vertices first so that they own the lowest class ids
    std::vector<int> order;
    for (int v = 0; v < n; ++v)
        if (is_marked[v]) order.push_back(v);
    for (int v = 0; v < n; ++v)
        if (!is_marked[v]) order.push_back(v);

    std::vector<int> color(n);
    for (int v = 0; v < n; ++v) color[v] = is_marked[v] ? 0 : 1;
    int n_colors = (int(marked.size()) == n) ? 1 : 2;
    if (n_colors == 1) throw std::invalid_argument("collapse: every vertex is marked");

    std::vector<int> counts;
    while (true) {
        std::map<std::vector<int>, int> ids;
        std::vector<int> next(n);
        std::vector<int> sig(n_colors + 1);
        for (int v : order) {
            std::fill(sig.begin(), sig.end(), 0);
            sig[0] = color[v];
            const std::uint8_t* row = &graph.adj[std::size_t(v) * n];
            for (int u = 0; u < n; ++u)
                if (row[u]) ++sig[1 + color[u]];
            auto it = ids.find(sig);
            if (it == ids.end()) it = ids.emplace(sig, int(ids.size())).first;
            next[v] = it->second;
        }
        const int new_count = int(ids.size());
        color.swap(next);
        if (new_count == n_colors) break;
        n_colors = new_count;
    }

    CollapsedGraph cg;
    cg.vertex_class = color;
    cg.class_sizes.assign(n_colors, 0);
    std::vector<int> rep(n_colors, -1);
    for (int v : order) {
        ++cg.class_sizes[color[v]];
        if (rep[color[v]] < 0) rep[color[v]] = v;
    }
    cg.n_marked_classes = 0;
    for (int c = 0; c < n_colors; ++c)
        if (is_marked[rep[c]]) ++cg.n_marked_classes;

    cg.reduced_adjacency = Matrix(n_colors, n_colors);
    for (int i = 0; i < n_colors; ++i) {
        std::vector<int> cnt(n_colors, 0);
        for (int u = 0; u < n; ++u)
            if (graph.has_edge(rep[i], u)) ++cnt[color[u]];
        for (int j = 0; j < n_colors; ++j)
            cg.reduced_adjacency(i, j) =
                cnt[j] * std::sqrt(double(cg.class_sizes[i]) / double(cg.class_sizes[j]));
    }
    cg.degree = graph.degree(0);
    return cg;
}

bool is_equitable(const Graph& graph, const std::vector<int>& vertex_class, int n_classes) {
    const int n = graph.n;
    std::vector<int> reference(std::size_t(n_classes) * n_classes, -1);
    std::vector<int> cnt(n_classes);
    for (int v = 0; v < n; ++v) {
        std::fill(cnt.begin(), cnt.end(), 0);
        for (int u = 0; u < n; ++u)
            if (graph.has_edge(v, u)) ++cnt[vertex_class[u]];
        int ci = vertex_class[v];
        for (int j = 0; j < n_classes; ++j) {
            int& ref = reference[std::size_t(ci) * n_classes + j];
            if (ref < 0) ref = cnt[j];
            else if (ref != cnt[j]) return false;
        }
    }
    return true;
}

CollapsedGraph collapse_complete(long long n, long long k) {
    if (n < 2 || k < 1 || k >= n) throw std::invalid_argument("complete collapse needs 1 <= k < N");
    CollapsedGraph cg;
    cg.class_sizes = {k, n - k};
    cg.reduced_adjacency = Matrix(2, 2);
    const double off = std::sqrt(double(k) * double(n - k));
    cg.reduced_adjacency(0, 0) = double(k - 1);
    cg.reduced_adjacency(0, 1) = off;
    cg.reduced_adjacency(1, 0) = off;
    cg.reduced_adjacency(1, 1) = double(n - k - 1);
    cg.degree = double(n - 1);
    return cg;
}

CollapsedGraph collapse_analytic(const SrgParams& p) {
    auto rep = srg_check(p);
    if (!rep.feasible) throw std::invalid_argument("collapse_analytic: infeasible SRG parameters");
    const double k = p.degree, l = p.lambda_common, m = p.mu_common;
    CollapsedGraph cg;
    cg.class_sizes = {1, p.degree, (long long)p.n_vertices - p.degree - 1};
    Matrix& A = cg.reduced_adjacency;
    A = Matrix(3, 3);
    const double b = std::sqrt(m) * std::sqrt(k - l - 1);
    A(0, 1) = A(1, 0) = std::sqrt(k);
    A(1, 1) = l;
    A(1, 2) = A(2, 1) = b;
    A(2, 2) = k - m;
    cg.degree = k;
    return cg;
}

CollapsedGraph collapse_analytic(const FamilySpec& spec, int marked_count) {
    validate(spec);
    if (spec.family == Family::complete) return collapse_complete(spec.size_param, marked_count);
    if (marked_count != 1) throw std::invalid_argument("collapse_analytic: only the complete graph supports several marked vertices");
    if (spec.family == Family::hypercube) {
        const int n = spec.size_param;
        CollapsedGraph cg;
        cg.class_sizes.resize(n + 1);
        long long c = 1;
        for (int j = 0; j <= n; ++j) {
            cg.class_sizes[j] = c;
            c = c * (n - j) / (j + 1);
        }
        cg.reduced_adjacency = Matrix(n + 1, n + 1);
        for (int j = 0; j < n; ++j) {
            double v = std::sqrt(double(n - j) * double(j + 1));
            cg.reduced_adjacency(j, j + 1) = v;
            cg.reduced_adjacency(j + 1, j) = v;
        }
        cg.degree = n;
        return cg;
    }
    return collapse_analytic(*family_srg_params(spec));
}

void write_edge_list(const Graph& graph, std::ostream& out) {
    for (int u = 0; u < graph.n; ++u)
        for (int v = u + 1; v < graph.n; ++v)
            if (graph.has_edge(u, v)) out << u << ' ' << v << '\n';
}

Graph read_edge_list(std::istream& in, int n_vertices) {
    std::vector<std::pair<int, int>> edges;
    int max_index = -1;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        int u, v;
        if (!(ls >> u)) continue;
        if (!(ls >> v) || u < 0 || v < 0) throw std::runtime_error("malformed edge line: " + line);
        edges.emplace_back(u, v);
        max_index = std::max({max_index, u, v});
    }
    const int n = n_vertices >= 0 ? n_vertices : max_index + 1;
    if (max_index >= n) throw std::runtime_error("edge list references vertex beyond n");
    Graph g(n);
    for (auto [u, v] : edges) g.add_edge(u, v);
    return g;
}

std::string collapsed_to_json(const CollapsedGraph& cg) {
    nlohmann::json j;
    j["class_sizes"] = cg.class_sizes;
    j["reduced_adjacency"] = cg.reduced_adjacency.data();
    j["degree"] = cg.degree;
    j["n_marked_classes"] = cg.n_marked_classes;
    return j.dump(2);
}

CollapsedGraph collapsed_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    CollapsedGraph cg;
    cg.class_sizes = j.at("class_sizes").get<std::vector<long long>>();
    const int m = int(cg.class_sizes.size());
    auto flat = j.at("reduced_adjacency").get<std::vector<double>>();
    if (int(flat.size()) != m * m) throw std::runtime_error("reduced_adjacency must have M*M entries");
    cg.reduced_adjacency = Matrix(m, m);
    cg.reduced_adjacency.data() = flat;
    cg.degree = j.value("degree", 0.0);
    cg.n_marked_classes = j.value("n_marked_classes", 1);
    return cg;
}

}  // namespace nlqs
