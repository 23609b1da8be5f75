#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlqs/closedform.hpp"
#include "nlqs/dynamics.hpp"
#include "nlqs/ode.hpp"

using namespace nlqs;

namespace {

constexpr double kPi = 3.14159265358979323846;

IntegrateControls tight() {
    IntegrateControls c;
    c.rel_tol = 1e-11;
    c.abs_tol = 1e-13;
    c.sample_dt = 0.01;
    return c;
}

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

}  // namespace

TEST_CASE("dopri5 integrates exponential decay and a harmonic oscillator") {
    OdeControls ctl;
    std::vector<DenseStep> steps;
    const auto y = dopri5([](double, const std::vector<double>& y, std::vector<double>& d) { d[0] = -y[0]; }, 0.0,
                          {1.0}, 3.0, ctl, [&](const DenseStep& s) { steps.push_back(s); });
    CHECK(y[0] == doctest::Approx(std::exp(-3.0)).epsilon(1e-9));
    REQUIRE_FALSE(steps.empty());
    std::vector<double> mid;
    const auto& s = steps[steps.size() / 2];
    s.interpolate(s.t0 + 0.37 * s.h, mid);
    CHECK(mid[0] == doctest::Approx(std::exp(-(s.t0 + 0.37 * s.h))).epsilon(1e-8));

    const auto osc = dopri5(
        [](double, const std::vector<double>& y, std::vector<double>& d) {
            d[0] = y[1];
            d[1] = -y[0];
        },
        0.0, {1.0, 0.0}, 10.0, ctl, nullptr);
    CHECK(osc[0] == doctest::Approx(std::cos(10.0)).epsilon(1e-8));
    CHECK(osc[1] == doctest::Approx(-std::sin(10.0)).epsilon(1e-8));
}

TEST_CASE("nonlinearity functions") {
    CHECK(Nonlinearity::linear().f(0.3) == 0.0);
    CHECK(Nonlinearity::cubic(2.0).f(0.3) == doctest::Approx(0.3));
    CHECK(Nonlinearity::cubic_quintic(2.0).f(0.3) == doctest::Approx(0.3 - 0.09));
    CHECK(Nonlinearity::loglinear(2.0).f(0.3) == doctest::Approx(std::log(0.3)));
    CHECK(std::isfinite(Nonlinearity::loglinear(1.0).f(0.0)));
    CHECK(parse_nl_kind("cubic_quintic") == NlKind::cubic_quintic);
    CHECK_THROWS(parse_nl_kind("septic"));
}

TEST_CASE("self_potential") {
    const CollapsedGraph cg = collapse_complete(4, 1);
    SubspaceState st{0.0, {cplx(0.5, 0.0), cplx(std::sqrt(0.75), 0.0)}};
    auto lin = self_potential(st, cg, Nonlinearity::linear());
    CHECK(lin[0] == 0.0);
    CHECK(lin[1] == 0.0);

    auto cub = self_potential(st, cg, Nonlinearity::cubic(1.0));
    CHECK(cub[0] == doctest::Approx(0.25));
    CHECK(cub[1] == doctest::Approx(0.25));

    const CollapsedGraph big = collapse_complete(11, 1);
    SubspaceState ab{0.0, {cplx(0.6, 0.0), cplx(0.0, 0.8)}};
    auto v = self_potential(ab, big, Nonlinearity::cubic(3.0));
    CHECK(v[0] == doctest::Approx(3.0 * 0.36));
    CHECK(v[1] == doctest::Approx(3.0 * 0.64 / 10.0));
}

TEST_CASE("gamma policies") {
    const double n = 64;
    SearchSystem lin(collapse_complete(64, 1), Nonlinearity::linear(), GammaPolicy::of(PolicyKind::general_critical));
    SubspaceState st{0.0, {cplx(0.3, 0.1), cplx(0.2, std::sqrt(1 - 0.1 - 0.04 - 0.01))}};
    CHECK(gamma_eval(GammaPolicy::of(PolicyKind::general_critical), st, lin) == doctest::Approx(1.0 / n));

    SearchSystem cub(collapse_complete(64, 1), Nonlinearity::cubic(5.0), GammaPolicy::of(PolicyKind::cubic_critical));
    SubspaceState start{0.0, cub.initial_state()};
    CHECK(cub.gamma(start.c, 0.0) == doctest::Approx(1.0 / n));

    const SrgParams p{900, 87, 30, 6};
    SearchSystem srg(collapse_analytic(p), Nonlinearity::linear(), GammaPolicy::of(PolicyKind::srg_c2),
                     WalkForm::adjacency, p);
    CHECK(srg.gamma(srg.initial_state(), 0.0) == doctest::Approx(0.0116796).epsilon(1e-5));
    CHECK(gamma_eval(GammaPolicy::of(PolicyKind::srg_c1), start, srg) == doctest::Approx(1.0 / 87));
    CHECK(gamma_eval(GammaPolicy::of(PolicyKind::srg_c2_prime), start, srg) == doctest::Approx(1.0 / 81));
    CHECK(gamma_eval(GammaPolicy::fixed(0.25), start, srg) == 0.25);

    GammaPolicy table;
    table.kind = PolicyKind::numeric_table;
    table.table = {{0.0, 1.0}, {2.0, 3.0}};
    CHECK(gamma_eval(table, {1.0, start.c}, lin) == doctest::Approx(2.0));
    CHECK(gamma_eval(table, {5.0, start.c}, lin) == doctest::Approx(3.0));
}

TEST_CASE("linear search on the complete graph rotates to the marked vertex") {
    const double n = 1024;
    SearchSystem sys(collapse_complete(1024, 1), Nonlinearity::linear(), GammaPolicy::fixed(1.0 / n));
    DenseSolution dense(&sys);
    const Trajectory tr = integrate(sys, 60.0, tight(), &dense);
    const auto pk = first_peak(dense, 0.05, 0.5);
    REQUIRE(pk.has_value());
    CHECK(pk->height >= 1 - 1e-4);
    CHECK(pk->t == doctest::Approx(kPi * std::sqrt(n) / 2).epsilon(1e-3));
    CHECK(tr.max_norm_error() <= 10 * 1e-11);

    for (std::size_t i = 0; i < tr.size(); i += 500)
        CHECK(tr.probs[i][0] == doctest::Approx(linear_prob(n, tr.t[i])).epsilon(1e-7));
}

TEST_CASE("critical cubic search is constant time") {
    SearchSystem sys(collapse_complete(100, 1), Nonlinearity::cubic(99.0), GammaPolicy::of(PolicyKind::cubic_critical));
    DenseSolution dense(&sys);
    const Trajectory tr = integrate(sys, 3.0, tight(), &dense);
    const auto pk = first_peak(dense, 0.01, 0.5);
    REQUIRE(pk.has_value());
    CHECK(pk->t == doctest::Approx(kPi / 2).epsilon(1e-6));
    CHECK(pk->height == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(tr.max_norm_error() <= 10 * 1e-11);
}

TEST_CASE("cubic search with a fixed rate veers off") {
    const double n = 1024;
    SearchSystem sys(collapse_complete(1024, 1), Nonlinearity::cubic(1.0), GammaPolicy::fixed(1.0 / n));
    IntegrateControls c = tight();
    c.sample_dt = 0.05;
    const Trajectory tr = integrate(sys, 200.0, c);
    CHECK(max_of(tr.column(0)) < 0.5);
}

TEST_CASE("norm is conserved for every real nonlinearity") {
    const Nonlinearity nls[] = {Nonlinearity::linear(), Nonlinearity::cubic(3.0), Nonlinearity::cubic_quintic(3.0),
                                Nonlinearity::loglinear(0.5)};
    for (const auto& nl : nls) {
        CAPTURE(to_string(nl.kind));
        SearchSystem sys(collapse_analytic({Family::petersen, 0}), nl, GammaPolicy::fixed(1.0 / 3.0));
        IntegrateControls c;
        c.rel_tol = 1e-10;
        c.abs_tol = 1e-12;
        c.sample_dt = 0.1;
        const Trajectory tr = integrate(sys, 20.0, c);
        CHECK(tr.max_norm_error() <= 10 * c.rel_tol);
    }
}

TEST_CASE("sample grid and peak width") {
    const auto ts = sample_times(1.0, 0.3);
    REQUIRE(ts.size() == 5);
    CHECK(ts.back() == 1.0);
    CHECK(ts[3] == doctest::Approx(0.9));

    const double n = 100;
    SearchSystem sys(collapse_complete(100, 1), Nonlinearity::linear(), GammaPolicy::fixed(1.0 / n));
    DenseSolution dense(&sys);
    integrate(sys, 25.0, tight(), &dense);
    const auto pk = first_peak(dense, 0.05, 0.5);
    REQUIRE(pk.has_value());
    // independent width from bisection on the closed-form rotation
    auto f = [&](double t) { return linear_prob(n, t) - 0.99; };
    auto cross = [&](double lo, double hi) {
        for (int i = 0; i < 200; ++i) {
            const double m = 0.5 * (lo + hi);
            ((f(lo) < 0) == (f(m) < 0) ? lo : hi) = m;
        }
        return 0.5 * (lo + hi);
    };
    const double expect = cross(pk->t, pk->t + 5) - cross(pk->t - 5, pk->t);
    CHECK(peak_width(dense, *pk, 0.01, 0.01) == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("configs hash deterministically and trajectories serialize") {
    SearchConfig a;
    a.family = {Family::complete, 16};
    a.nl = Nonlinearity::cubic(2.0);
    a.policy = GammaPolicy::of(PolicyKind::cubic_critical);
    SearchConfig b = a;
    CHECK(config_hash(a) == config_hash(b));
    b.nl.g = 2.5;
    CHECK(config_hash(a) != config_hash(b));

    IntegrateControls c;
    c.sample_dt = 0.5;
    const Trajectory tr = integrate(a, 2.0, c);
    CHECK(tr.config_hash == config_hash(a));
    std::ostringstream os;
    write_trajectory_csv(tr, os);
    CHECK(os.str().rfind("t,", 0) == 0);
}
