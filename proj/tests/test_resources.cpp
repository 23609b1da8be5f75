#include "doctest.h"

#include <cmath>
#include <sstream>

#include "json.hpp"

#include "nlqs/closedform.hpp"
#include "nlqs/resources.hpp"

using namespace nlqs;

TEST_CASE("space requirement") {
    const double n = 4096;
    CHECK(space_requirement({1.0, 1.0, n, ClockMode::entangled}) == doctest::Approx(1 + 12.0));
    const double w = 1 / std::sqrt(n);
    CHECK(space_requirement({1.0, w, n, ClockMode::entangled}) == doctest::Approx(std::sqrt(n) + 12));
    CHECK(space_requirement({1.0, w, n, ClockMode::independent}) == doctest::Approx(n + 12));
    // width N^(-1/2 - kappa) with kappa = -1/2 leaves a constant clock term
    CHECK(space_requirement({1.0, std::pow(n, -0.5 + 0.5), n}) == doctest::Approx(13.0));
    CHECK_THROWS(space_requirement({1.0, 0.0, n}));
}

TEST_CASE("ST products") {
    const auto unit = st_products({1.0, 1.0, 1.0});
    CHECK(unit.st == doctest::Approx(1.0));
    CHECK(unit.st2 == doctest::Approx(1.0));
    const auto p = st_products({3.0, 0.5, 2.0});
    CHECK(p.st == doctest::Approx(3 * 3.0));
    CHECK(p.st2 == doctest::Approx(9 * 3.0));
}

TEST_CASE("ST scaling") {
    // cubic with G = N^(-1/2), i.e. g = N^(1/2) for k = 1
    const auto c = st_scaling(NlKind::cubic, 0.0, 0.5);
    CHECK(c.st.label() == "N^(1/4) log N");
    const auto lin = st_scaling(NlKind::linear, 0.0, 0.0);
    CHECK(lin.st.label() == "N^(1/2) log N");
    CHECK(lin.space.label() == "log N");  // width grows like N^(1/2), so the clock term vanishes
    CHECK_THROWS(st_scaling(NlKind::custom, 0.0, 0.0));
    CHECK_THROWS(st_scaling(NlKind::cubic, 1.5, 0.0));
}

TEST_CASE("kappa conventions") {
    ScalingExponents e;
    e.kappa = -0.5;
    e.lambda_marked = 0.0;
    e.convention = KappaConvention::G_coeff;
    CHECK(kappa_in_convention(e, KappaConvention::g_coeff) == doctest::Approx(0.5));
    e.lambda_marked = 0.5;
    CHECK(kappa_in_convention(e, KappaConvention::g_coeff) == doctest::Approx(1.0));
    CHECK(kappa_in_convention(e, KappaConvention::G_coeff) == doctest::Approx(-0.5));
}

TEST_CASE("N0 lower bound regimes") {
    const double n = 1e6;
    ScalingExponents c;
    c.kappa = 1.0;
    const auto strong = n0_lower_bound(NlKind::cubic, c, n);
    CHECK(strong.value == doctest::Approx(n / std::log(n)));
    CHECK(strong.regime == "kappa_ge_lambda");

    c.kappa = 0.3;
    c.lambda_marked = 0.2;
    CHECK(n0_lower_bound(NlKind::cubic, c, n).value == doctest::Approx(std::pow(n, 0.3) / std::log(n)));
    c.kappa = 0.1;
    const auto low = n0_lower_bound(NlKind::cubic, c, n);
    CHECK(low.regime == "kappa_lt_lambda");
    CHECK(low.value == doctest::Approx(std::pow(n, 0.2) / std::log(n)));

    ScalingExponents l;
    l.sigma_log = 0.25;
    CHECK(n0_lower_bound(NlKind::loglinear, l, n).regime == "unconstrained");
    l.sigma_log = 0.75;
    l.lambda_marked = 0.0;
    CHECK(n0_lower_bound(NlKind::loglinear, l, n).value == doctest::Approx(std::pow(n, 1.5) / std::log(n)));
    CHECK(n0_lower_bound(NlKind::linear, l, n).regime == "no_bound");
}

TEST_CASE("exponent optimum") {
    const auto c0 = optimize_exponent(NlKind::cubic, 0.0);
    CHECK(c0.kappa_star == doctest::Approx(0.5));
    CHECK(c0.st_label == "N^(1/4) log N");
    CHECK_FALSE(c0.at_grid_boundary);

    for (double lam : {0.25, 0.5}) {
        const auto o = optimize_exponent(NlKind::cubic, lam);
        CHECK(o.kappa_star == doctest::Approx(lam / 2 + 0.5));
        CHECK(o.scaling.st.power == doctest::Approx(0.25 - lam / 4));
    }

    const auto c1 = optimize_exponent(NlKind::cubic, 1.0);
    CHECK(c1.kappa_star == doctest::Approx(1.0));
    CHECK(c1.st_label == "log N");

    const auto lg = optimize_exponent(NlKind::loglinear, 0.0);
    CHECK(lg.parameter == "sigma");
    CHECK(lg.kappa_star == doctest::Approx(0.5));
    CHECK(lg.st_label == "log N <= ST <= N^(1/4) log N");
}

TEST_CASE("power-law fit") {
    const auto f = fit_power_law({{10, 2 * std::sqrt(10.0)}, {100, 20.0}, {1000, 2 * std::sqrt(1000.0)}});
    CHECK(f.prefactor == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.exponent == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));

    const auto k = fit_power_law({{10, 3.0}, {100, 3.0}, {1000, 3.0}, {5000, 3.0}});
    CHECK(std::abs(k.exponent) < 1e-12);
    CHECK(k.prefactor == doctest::Approx(3.0));

    CHECK_THROWS(fit_power_law({{1, 1}, {2, 2}}));
    CHECK_THROWS(fit_power_law({{1, 1}, {2, 2}, {3, -1}}));

    std::ostringstream os;
    write_fit_json({{10, 1}, {100, 2}, {1000, 4}}, f, "demo", os);
    const auto j = nlohmann::json::parse(os.str());
    CHECK(j["exponent"].get<double>() == doctest::Approx(0.5));
    CHECK(j["recipe"] == "demo");
    CHECK(j["points"].size() == 3);
}

TEST_CASE("loglinear runtime fit reproduces the sublinear trend") {
    std::vector<std::pair<double, double>> pts;
    for (double n = 5e5; n <= 1e6 + 1; n += 5e4) {
        const double k = std::round(std::pow(n, 0.25));
        const double g = std::pow(n, 0.125) / std::log(n / k);
        pts.push_back({n, log_runtime_numeric(n, k, g)});
    }
    const auto f = fit_power_law(pts);
    CHECK(f.exponent == doctest::Approx(0.261).epsilon(0.02 / 0.261));
    CHECK(f.prefactor == doctest::Approx(1.226).epsilon(0.1));
}

TEST_CASE("resource rows") {
    ScalingExponents e;
    e.kappa = 0.5;
    const auto r = resource_row(NlKind::cubic, e, 1e4);
    CHECK(r.runtime == doctest::Approx(3.14159265358979 * 100 / (2 * std::sqrt(101.0))));
    CHECK(r.space == doctest::Approx(1 / r.width + std::log2(1e4)));
    CHECK(r.st == doctest::Approx(r.space * r.runtime));

    std::ostringstream os;
    write_resource_csv({r}, os);
    CHECK(os.str().rfind("N,kappa,lambda,T,width,S,ST,ST2,N0_bound,regime\n", 0) == 0);
}

TEST_CASE("scaling labels and order") {
    CHECK(Scaling{0.0, 1}.label() == "log N");
    CHECK(Scaling{1.0, 0}.label() == "N");
    CHECK(Scaling{0.0, 0}.label() == "1");
    CHECK(Scaling{1.0 / 3, 2}.label() == "N^(1/3) log^2 N");
    CHECK(Scaling{0.25, 0} < Scaling{0.25, 1});
    CHECK(Scaling{0.0, 5} < Scaling{0.1, 0});
    CHECK(parse_clock_mode("independent") == ClockMode::independent);
    CHECK_THROWS(parse_clock_mode("atomic"));
}
