#include "nlqs/numerics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace nlqs {

GaussRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        r.nodes[i] = -z;
        r.nodes[n - 1 - i] = z;
        r.weights[i] = r.weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
    return r;
}

namespace {

const GaussRule& rule20() {
    static const GaussRule r = gauss_legendre(20);
    return r;
}

double panel(const std::function<double(double)>& f, double a, double b, long& evals) {
    const auto& r = rule20();
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double s = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(mid + half * r.nodes[i]);
    evals += long(r.nodes.size());
    return s * half;
}

void refine(const std::function<double(double)>& f, double a, double b, double whole, double tol, int depth,
            QuadResult& out) {
    const double m = 0.5 * (a + b);
    const double left = panel(f, a, m, out.evaluations);
    const double right = panel(f, m, b, out.evaluations);
    const double diff = std::abs(left + right - whole);
    if (diff <= tol || depth <= 0 || !(m > a && b > m)) {
        out.value += left + right;
        out.error += diff;
        if (diff > tol) out.converged = false;
        return;
    }
    refine(f, a, m, left, 0.5 * tol, depth - 1, out);
    refine(f, m, b, right, 0.5 * tol, depth - 1, out);
}

}  // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol,
                              double abs_tol, int max_depth) {
    QuadResult out;
    out.converged = true;
    const double whole = panel(f, a, b, out.evaluations);
    const double tol = std::max(abs_tol, rel_tol * std::abs(whole));
    refine(f, a, b, whole, tol, max_depth, out);
    return out;
}

double exp_integral_e1_scaled(double x) {
    if (!(x > 0.0)) throw std::domain_error("exp_integral_e1: x must be positive");
    constexpr double euler = 0.57721566490153286061;
    constexpr double eps = 1e-16;
    if (x < 1.0) {
        double sum = 0.0, term = 1.0;
        for (int k = 1; k < 200; ++k) {
            term *= -x / k;
            const double add = term / k;
            sum += add;
            if (std::abs(add) < eps * std::abs(sum)) break;
        }
        return std::exp(x) * (-euler - std::log(x) - sum);
    }
    // modified Lentz on the continued fraction
    const double tiny = std::numeric_limits<double>::min() / eps;
    double b = x + 1.0, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -double(i) * i;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

double exp_integral_e1(double x) {
    if (!(x > 0.0)) throw std::domain_error("exp_integral_e1: x must be positive");
    return exp_integral_e1_scaled(x) * std::exp(-x);
}

LinearFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw std::invalid_argument("least_squares_line: need matching samples");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= double(n);
    my /= double(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0) throw std::invalid_argument("least_squares_line: x values are all equal");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

}  // namespace nlqs
