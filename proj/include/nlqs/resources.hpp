#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "nlqs/dynamics.hpp"

namespace nlqs {

enum class ClockMode { independent, entangled };
std::string to_string(ClockMode m);
ClockMode parse_clock_mode(const std::string& s);

struct ResourceModel {
    double runtime = 1.0;
    double width = 1.0;
    double n_vertices = 2.0;
    ClockMode clock_mode = ClockMode::entangled;
};

// clock ions (1/width or 1/width^2) plus log2 N qubits
double space_requirement(const ResourceModel& model);

struct StProducts {
    double st = 0.0;
    double st2 = 0.0;
};
StProducts st_products(const ResourceModel& model);

// Which quantity the exponent kappa scales: g = N^kappa or G = g/(k(N-k)) = N^kappa.
enum class KappaConvention { g_coeff, G_coeff };
std::string to_string(KappaConvention c);

struct ScalingExponents {
    double kappa = 0.0;          // g = N^kappa (g_coeff convention)
    double lambda_marked = 0.0;  // k = N^lambda
    double sigma_log = 0.0;      // loglinear: g = R^sigma / log R, R = N/k
    KappaConvention convention = KappaConvention::g_coeff;
};

// Converts kappa between conventions, using k(N-k) = N^(1+lambda) for lambda < 1.
double kappa_in_convention(const ScalingExponents& e, KappaConvention target);

// Asymptotic order N^power (log N)^log_power.
struct Scaling {
    double power = 0.0;
    int log_power = 0;

    double evaluate(double n) const;
    std::string label() const;
};
bool operator<(const Scaling& a, const Scaling& b);

struct N0Bound {
    double value = 0.0;  // scaling estimate evaluated at N, not a point truth
    Scaling scaling;
    std::string regime;
    std::string expression;
};

N0Bound n0_lower_bound(NlKind kind, const ScalingExponents& e, double n);

// ST scaling for g = N^kappa (or the sigma parameterization for loglinear, where the pair is
// (lower, upper) and the optimizer minimizes the upper bound).
struct StScaling {
    Scaling st;
    Scaling st_upper;  // equals st except for loglinear
    Scaling runtime;
    Scaling space;
    std::string regime;
};
StScaling st_scaling(NlKind kind, double lambda_marked, double exponent);

struct ExponentOptimum {
    double kappa_star = 0.0;  // sigma* for loglinear
    StScaling scaling;
    std::string st_label;
    std::string parameter;  // "kappa" or "sigma"
    KappaConvention convention = KappaConvention::g_coeff;
    bool at_grid_boundary = false;
};

inline constexpr double kExponentGridLo = -1.0;
inline constexpr double kExponentGridHi = 1.0;  // beyond 1 the runtime would fall below constant
inline constexpr double kExponentGridStep = 1e-3;

ExponentOptimum optimize_exponent(NlKind kind, double lambda_marked);

struct PowerLawFit {
    double prefactor = 0.0;
    double exponent = 0.0;
    double r_squared = 0.0;
};
PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points);

void write_fit_json(const std::vector<std::pair<double, double>>& points, const PowerLawFit& fit,
                    const std::string& recipe, std::ostream& out);

// Finite-N resource figures from the closed forms.
struct ResourceRow {
    double n = 0.0;
    double kappa = 0.0;
    double lambda = 0.0;
    double runtime = 0.0;
    double width = 0.0;
    double space = 0.0;
    double st = 0.0;
    double st2 = 0.0;
    double n0_bound = 0.0;
    std::string regime;
};

ResourceRow resource_row(NlKind kind, const ScalingExponents& e, double n, ClockMode mode = ClockMode::entangled,
                         double eps = 0.01);
void write_resource_csv(const std::vector<ResourceRow>& rows, std::ostream& out);

}  // namespace nlqs
