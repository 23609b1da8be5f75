#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

#include "nlqs/closedform.hpp"
#include "nlqs/oracle.hpp"
#include "nlqs/spectral.hpp"

using namespace nlqs;

namespace {

IntegrateControls ctl(double dt = 0.05) {
    IntegrateControls c;
    c.rel_tol = 1e-11;
    c.abs_tol = 1e-13;
    c.sample_dt = dt;
    return c;
}

// exp(-iHt)|s> for the time-independent full Hamiltonian -gamma A - sum_marked |v><v|,
// evaluated through its eigendecomposition.
std::vector<double> exact_linear_probs(const Graph& g, const std::vector<int>& marked, double gamma, double t) {
    Matrix h(g.n, g.n);
    for (int u = 0; u < g.n; ++u)
        for (int v = 0; v < g.n; ++v) h(u, v) = g.has_edge(u, v) ? -gamma : 0.0;
    for (int m : marked) h(m, m) -= 1.0;
    const auto e = eig_sym(h);
    std::vector<cplx> psi(g.n, 0.0);
    const double amp = 1.0 / std::sqrt(double(g.n));
    for (int j = 0; j < g.n; ++j) {
        double proj = 0.0;
        for (int u = 0; u < g.n; ++u) proj += e.vectors(u, j) * amp;
        const cplx phase = std::exp(cplx(0.0, -e.values[j] * t)) * proj;
        for (int u = 0; u < g.n; ++u) psi[u] += phase * e.vectors(u, j);
    }
    std::vector<double> p(g.n);
    for (int u = 0; u < g.n; ++u) p[u] = std::norm(psi[u]);
    return p;
}

}  // namespace

TEST_CASE("complete graph: unmarked vertices evolve identically") {
    const Graph g = build_graph({Family::complete, 8});
    const Trajectory tr = full_integrate(g, {0}, Nonlinearity::linear(), GammaPolicy::fixed(1.0 / 8), 10.0, ctl());
    REQUIRE(tr.probs.front().size() == 8);
    double spread = 0.0;
    for (const auto& row : tr.probs) {
        const auto [lo, hi] = std::minmax_element(row.begin() + 1, row.end());
        spread = std::max(spread, *hi - *lo);
    }
    CHECK(spread < 1e-12);
}

TEST_CASE("Petersen: adjacent and non-adjacent vertices share probabilities") {
    const Graph g = build_graph({Family::petersen, 0});
    const Trajectory tr = full_integrate(g, {0}, Nonlinearity::linear(), GammaPolicy::fixed(1.0 / 3), 12.0, ctl());
    const auto nb = g.neighbors(0);
    double worst = 0.0;
    for (const auto& row : tr.probs) {
        for (int v : nb) worst = std::max(worst, std::abs(row[v] - row[nb[0]]));
        std::vector<double> far;
        for (int v = 1; v < g.n; ++v)
            if (!g.has_edge(0, v)) far.push_back(row[v]);
        const auto [lo, hi] = std::minmax_element(far.begin(), far.end());
        worst = std::max(worst, *hi - *lo);
    }
    CHECK(worst < 1e-12);

    // the full integration itself against the spectral propagator
    for (std::size_t i = 0; i < tr.size(); i += 40) {
        const auto p = exact_linear_probs(g, {0}, 1.0 / 3, tr.t[i]);
        for (int v = 0; v < g.n; ++v) CHECK(tr.probs[i][v] == doctest::Approx(p[v]).epsilon(1e-8));
    }
}

TEST_CASE("complete graph cubic search follows the closed form") {
    const Graph g = build_graph({Family::complete, 8});
    const double n = 8, gc = 1.0 * (n - 1);
    const Trajectory tr =
        full_integrate(g, {0}, Nonlinearity::cubic(gc), GammaPolicy::of(PolicyKind::cubic_critical), 3.0, ctl(0.01));
    const CompleteSearchParams p{n, 1, gc};
    double worst = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i) worst = std::max(worst, std::abs(tr.probs[i][0] - cubic_prob(p, tr.t[i])));
    CHECK(worst < 1e-6);
}

TEST_CASE("reduced and full dynamics agree") {
    struct Case {
        FamilySpec spec;
        Nonlinearity nl;
        GammaPolicy policy;
    };
    const std::vector<Case> cases = {
        {{Family::complete, 8}, Nonlinearity::linear(), GammaPolicy::of(PolicyKind::general_critical)},
        {{Family::complete, 8}, Nonlinearity::cubic(7.0), GammaPolicy::of(PolicyKind::cubic_critical)},
        {{Family::complete, 64}, Nonlinearity::cubic_quintic(5.0), GammaPolicy::of(PolicyKind::general_critical)},
        {{Family::complete, 64}, Nonlinearity::loglinear(0.5), GammaPolicy::of(PolicyKind::general_critical)},
        {{Family::petersen, 0}, Nonlinearity::cubic(2.0), GammaPolicy::of(PolicyKind::srg_c1)},
        {{Family::paley, 13}, Nonlinearity::linear(), GammaPolicy::of(PolicyKind::srg_c1)},
        {{Family::square_lattice, 3}, Nonlinearity::cubic(1.0), GammaPolicy::fixed(0.25)},
        {{Family::triangular, 4}, Nonlinearity::linear(), GammaPolicy::of(PolicyKind::srg_c2)},
        {{Family::hypercube, 3}, Nonlinearity::cubic(1.5), GammaPolicy::fixed(1.0 / 3)},
        {{Family::hypercube, 4}, Nonlinearity::linear(), GammaPolicy::fixed(0.25)},
    };
    for (const auto& c : cases) {
        CAPTURE(to_string(c.spec.family));
        CAPTURE(c.spec.size_param);
        CAPTURE(to_string(c.nl.kind));
        const Graph g = build_graph(c.spec);
        const OracleRun run = run_oracle(g, {0}, c.nl, c.policy, 8.0, ctl(0.1));
        CHECK(run.comparison.samples == run.reduced.size());
        CHECK(run.comparison.max_abs_dev <= 1e-6);
    }
}

TEST_CASE("projector walk on the complete graph with two marked vertices") {
    const Graph g = build_graph({Family::complete, 12});
    const OracleRun run = run_oracle(g, {0, 5}, Nonlinearity::cubic(3.0), GammaPolicy::of(PolicyKind::general_critical),
                                     6.0, ctl(0.1), WalkForm::projector);
    CHECK(run.collapsed.marked_count() == 2);
    CHECK(run.comparison.max_abs_dev <= 1e-6);
}

TEST_CASE("compare") {
    const Graph g = build_graph({Family::complete, 6});
    const CollapsedGraph cg = collapse(g, {0});
    const SearchSystem sys(cg, Nonlinearity::linear(), GammaPolicy::fixed(1.0 / 6));
    const Trajectory red = integrate(sys, 2.0, ctl(0.5));

    // a full trajectory built from the reduced one, spread evenly over each class
    Trajectory full = red;
    for (auto& row : full.probs) {
        std::vector<double> v(g.n);
        for (int u = 0; u < g.n; ++u) v[u] = row[cg.vertex_class[u]] / double(cg.class_sizes[cg.vertex_class[u]]);
        row = v;
    }
    const auto same = compare(full, red, cg.vertex_class);
    CHECK(same.max_abs_dev < 1e-15);
    CHECK(same.samples == red.size());

    full.probs[1][3] += 0.01;
    CHECK(compare(full, red, cg.vertex_class).max_abs_dev == doctest::Approx(0.01).epsilon(1e-9));

    std::ostringstream os;
    write_comparison_json(same, os);
    CHECK(nlohmann::json::parse(os.str()).contains("per_class_dev"));

    Trajectory shorter = red;
    shorter.t.pop_back();
    shorter.probs.pop_back();
    CHECK_THROWS(compare(full, shorter, cg.vertex_class));
}

TEST_CASE("oracle rejects invalid marked sets") {
    const Graph g = build_graph({Family::complete, 6});
    CHECK_THROWS(full_integrate(g, {9}, Nonlinearity::linear(), GammaPolicy::fixed(0.1), 1.0, ctl()));
    CHECK_THROWS(full_integrate(g, {}, Nonlinearity::linear(), GammaPolicy::fixed(0.1), 1.0, ctl()));
}
