#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "nlqs/dynamics.hpp"
#include "nlqs/graphs.hpp"
#include "nlqs/numerics.hpp"

namespace nlqs {

inline constexpr double kDefaultEpsilon = 0.01;

// Complete-graph search with k marked vertices; G = g / (k (N - k)).
struct CompleteSearchParams {
    double n_vertices = 2.0;
    double marked_count = 1.0;
    double g = 0.0;
    double epsilon_height = kDefaultEpsilon;

    double G() const { return g / (marked_count * (n_vertices - marked_count)); }
    static CompleteSearchParams from_G(double n, double k, double G, double eps = kDefaultEpsilon) {
        return {n, k, G * k * (n - k), eps};
    }
};

double linear_prob(double n, double t);

double cubic_prob(const CompleteSearchParams& p, double t);
double cubic_time_of_prob(const CompleteSearchParams& p, double x);
// dx/dt on the rising branch
double cubic_rate(const CompleteSearchParams& p, double x);
double cubic_runtime(const CompleteSearchParams& p);

enum class WidthKind { exact, leading };
double cubic_width(const CompleteSearchParams& p, WidthKind kind);

// Runtime integral for a general nonlinearity, evaluated in theta with
// x = k/N + (1 - k/N) sin^2(theta). Throws when 1 + g(f_a - f_b) reaches zero.
double general_runtime(const Nonlinearity& nl, double n, double k, double rel_tol = 1e-11);
double general_time_of_prob(const Nonlinearity& nl, double n, double k, double x, double rel_tol = 1e-11);
double general_width_leading(const Nonlinearity& nl, double n, double k, double eps = kDefaultEpsilon);

struct CubicQuinticCoeffs {
    double a = 0.0, b = 0.0, c = 0.0;
    double Delta = 0.0, Sigma = 0.0, Xi = 0.0;
};

CubicQuinticCoeffs cq_coeffs(double n, double k, double g);

struct CqRuntime {
    double value = 0.0;
    bool used_quadrature = false;
    std::string warning;
};

CqRuntime cq_runtime_detail(double n, double k, double g);
double cq_runtime(double n, double k, double g);

double log_runtime_numeric(double n, double k, double g);

struct LogRuntimeBounds {
    double lower = 0.0;
    double lower_elementary = 0.0;  // lower with E1 replaced by its elementary lower bound
    double upper_loose = 0.0;
    double upper_tight = 0.0;
    bool tight_from_quadrature = false;
};

LogRuntimeBounds log_runtime_bounds(double n, double k, double g);
// integrals of the piecewise bounding integrands, evaluated by quadrature
LogRuntimeBounds log_runtime_bounds_quadrature(double n, double k, double g);

double log_width_lower_bound(double n, double k, double g, double eps = kDefaultEpsilon);

struct StationaryPoints {
    double x_min = 0.0;
    double x_max = 1.0;
    double x_stat = 0.0;
    bool blocking = false;
};

StationaryPoints repulsive_stationary_points(double n, double k, double G);

enum class SrgRegime { degree_linear_in_n, degree_sublinear };
std::string to_string(SrgRegime r);

struct SrgPrediction {
    SrgRegime regime = SrgRegime::degree_sublinear;
    double norm_A = 0.0;
    double e_plus = 0.0;
    double e_minus = 0.0;
    double amplitude = 0.0;  // A mu N / k^(3/2)
    double frequency = 0.0;  // A sqrt(N/k) mu / k
    double gap_case1 = 0.0;
    double runtime_case1 = 0.0;

    double predicted_prob(double t) const;
    double predicted_peak() const { return amplitude * amplitude; }
};

SrgPrediction srg_prediction(const SrgParams& p, double gamma);
SrgPrediction srg_prediction(const SrgParams& p);

std::vector<double> suff_complete_probs(const CollapsedGraph& cg, double t);

struct BlochPoint {
    double x = 0.0, y = 0.0, z = 0.0;
};

BlochPoint bloch_coords(std::complex<double> c0, std::complex<double> c1);

// Largest deviation between a two-class trajectory and the linear rotation in the
// rescaled time tau = int gamma N dt (critical policies only).
double rescaled_time_residual(const Trajectory& traj, double n, double k);

struct TableRow {
    double n = 0.0, k = 0.0, g = 0.0;
    double t_star = 0.0, width_exact = 0.0, width_leading = 0.0;
};

void write_table_csv(const std::vector<TableRow>& rows, std::ostream& out);

}  // namespace nlqs
