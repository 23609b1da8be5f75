#pragma once

#include <functional>
#include <vector>

namespace nlqs {

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

GaussRule gauss_legendre(int n);

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    long evaluations = 0;
    bool converged = false;
};

// Adaptive panel subdivision: a panel is accepted when its 20-point Gauss-Legendre value
// agrees with the sum over its two halves.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-12,
                              double abs_tol = 0.0, int max_depth = 60);

// E1(x) = int_x^inf e^-t / t dt, x > 0.
double exp_integral_e1(double x);
// e^x E1(x), finite for large x where E1 itself underflows.
double exp_integral_e1_scaled(double x);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

LinearFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace nlqs
