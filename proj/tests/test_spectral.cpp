#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "nlqs/hamiltonian.hpp"
#include "nlqs/spectral.hpp"

using namespace nlqs;

namespace {

double det3(const Matrix& a, double shift) {
    auto e = [&](int i, int j) { return a(i, j) - (i == j ? shift : 0.0); };
    return e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0)) +
           e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0));
}

// Roots of det(A - x I) located by scanning for sign changes and bisecting.
std::vector<double> char_roots3(const Matrix& a) {
    const double r = 3.0 * a.max_abs() + 1.0;
    std::vector<double> roots;
    const int n = 200000;
    double x0 = -r, f0 = det3(a, x0);
    for (int i = 1; i <= n; ++i) {
        const double x1 = -r + 2 * r * i / n, f1 = det3(a, x1);
        if (f0 == 0.0) roots.push_back(x0);
        else if (f0 * f1 < 0) {
            double lo = x0, hi = x1;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                (det3(a, lo) * det3(a, mid) <= 0 ? hi : lo) = mid;
            }
            roots.push_back(0.5 * (lo + hi));
        }
        x0 = x1;
        f0 = f1;
    }
    return roots;
}

}  // namespace

TEST_CASE("eig_sym on small exact cases") {
    const double n = 1024;
    Matrix a(2, 2);
    a(0, 0) = a(1, 1) = -1.0;
    a(0, 1) = a(1, 0) = -1.0 / std::sqrt(n);
    const auto e = eig_sym(a);
    CHECK(e.values[0] == doctest::Approx(-1 - 1.0 / 32).epsilon(1e-14));
    CHECK(e.values[1] == doctest::Approx(-1 + 1.0 / 32).epsilon(1e-14));

    const auto id = eig_sym(Matrix::identity(3));
    for (double v : id.values) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("eig_sym reconstructs random symmetric matrices") {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> dim(1, 16);
    double worst = 0.0;
    for (int c = 0; c < 1000; ++c) {
        const int m = dim(rng);
        Matrix a(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) a(i, j) = a(j, i) = u(rng);
        const auto e = eig_sym(a);
        REQUIRE(std::is_sorted(e.values.begin(), e.values.end()));
        double res = 0.0, orth = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                double r = a(i, j), q = i == j ? -1.0 : 0.0;
                for (int l = 0; l < m; ++l) {
                    r -= e.vectors(i, l) * e.values[l] * e.vectors(j, l);
                    q += e.vectors(l, i) * e.vectors(l, j);
                }
                res = std::max(res, std::abs(r));
                orth = std::max(orth, std::abs(q));
            }
        worst = std::max(worst, res / std::max(a.max_abs(), 1e-300));
        CHECK(orth < 1e-10);
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("Petersen Hamiltonian eigenvalues match characteristic polynomial roots") {
    const CollapsedGraph cg = collapse_analytic(SrgParams{10, 3, 0, 1});
    const Matrix h = hamiltonian(cg, 1.0 / 3.0);
    // explicit reduced form with (k, lambda, mu) = (3, 0, 1)
    const double g = 1.0 / 3.0;
    CHECK(h(0, 0) == doctest::Approx(-1.0));
    CHECK(h(0, 1) == doctest::Approx(-g * std::sqrt(3.0)));
    CHECK(h(1, 2) == doctest::Approx(-g * std::sqrt(2.0)));
    CHECK(h(2, 2) == doctest::Approx(-g * 2.0));
    CHECK(h(1, 1) == doctest::Approx(0.0));

    const auto roots = char_roots3(h);
    REQUIRE(roots.size() == 3);
    const auto e = eig_sym(h);
    for (int i = 0; i < 3; ++i) CHECK(e.values[i] == doctest::Approx(roots[i]).epsilon(1e-10));
}

TEST_CASE("oracle-only Hamiltonian at gamma = 0") {
    const auto e = eig_sym(hamiltonian(collapse_complete(50, 1), 0.0));
    CHECK(e.values[0] == doctest::Approx(-1.0));
    CHECK(e.values[1] == doctest::Approx(0.0));
}

TEST_CASE("complete graph at the critical rate has balanced overlaps and gap 2/sqrt(N)") {
    const double n = 1024;
    for (WalkForm form : {WalkForm::adjacency, WalkForm::projector}) {
        const auto s = spectral_summary(collapse_complete(1024, 1), 1.0 / n, form);
        // exact finite-N overlaps are (1 +- 1/sqrt(N))/2
        CHECK(s.overlaps_s[0] == doctest::Approx(0.5 * (1 + 1 / std::sqrt(n))).epsilon(1e-10));
        CHECK(s.overlaps_s[1] == doctest::Approx(0.5 * (1 - 1 / std::sqrt(n))).epsilon(1e-10));
        CHECK(s.gap == doctest::Approx(2.0 / std::sqrt(n)).epsilon(0.01));
    }
}

TEST_CASE("small gamma pins the ground state to the marked vertex") {
    const auto s = spectral_summary(collapse_complete(1024, 1), 1e-7);
    CHECK(s.overlaps_w[0] > 0.999);
}

TEST_CASE("find_gamma_numeric locates the critical rate") {
    const auto k = find_gamma_numeric(collapse_complete(1024, 1), 0.1 / 1024, 10.0 / 1024);
    CHECK(k.gamma == doctest::Approx(1.0 / 1024).epsilon(0.01));
    CHECK_FALSE(k.at_boundary);

    const auto p = find_gamma_numeric(collapse_analytic(SrgParams{101, 50, 24, 25}), 0.005, 0.05);
    CHECK(p.gamma == doctest::Approx(1.0 / 50).epsilon(0.02));

    const auto l3 = find_gamma_numeric(collapse_analytic({Family::latin_square, 30}), 0.005, 0.02);
    const double c2 = 1.0 / 87 + 1.0 / (899.0 * 6.0);
    CHECK(c2 == doctest::Approx(0.0116796).epsilon(1e-5));
    CHECK(l3.gamma == doctest::Approx(0.011680).epsilon(0.02));
}

TEST_CASE("third eigenvector of the latin square graph barely overlaps the start state") {
    std::vector<double> grid;
    for (int i = 0; i <= 40; ++i) grid.push_back(0.008 + i * 0.0002);
    const auto rows = overlap_sweep(collapse_analytic({Family::latin_square, 30}), grid);
    REQUIRE(rows.size() == grid.size());
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, r.overlaps_s[2]);
    CHECK(worst < 0.01);

    std::ostringstream os;
    write_sweep_csv(rows, os);
    CHECK(os.str().rfind("gamma,", 0) == 0);
}
