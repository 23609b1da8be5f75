#include "nlqs/resources.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

#include "nlqs/closedform.hpp"
#include "nlqs/format.hpp"
#include "nlqs/numerics.hpp"

namespace nlqs {

std::string to_string(ClockMode m) { return m == ClockMode::entangled ? "entangled" : "independent"; }

ClockMode parse_clock_mode(const std::string& s) {
    if (s == "entangled") return ClockMode::entangled;
    if (s == "independent") return ClockMode::independent;
    throw std::invalid_argument("unknown clock mode: " + s);
}

std::string to_string(KappaConvention c) { return c == KappaConvention::g_coeff ? "g" : "G"; }

static void check_model(const ResourceModel& m) {
    if (!(m.runtime > 0.0) || !(m.width > 0.0)) throw std::invalid_argument("resource model needs T > 0 and width > 0");
    if (!(m.n_vertices >= 1.0)) throw std::invalid_argument("resource model needs N >= 1");
}

double space_requirement(const ResourceModel& model) {
    check_model(model);
    const double clock = model.clock_mode == ClockMode::entangled ? 1.0 / model.width
                                                                  : 1.0 / (model.width * model.width);
    return clock + std::log2(model.n_vertices);
}

StProducts st_products(const ResourceModel& model) {
    const double s = space_requirement(model);
    return {s * model.runtime, s * model.runtime * model.runtime};
}

double kappa_in_convention(const ScalingExponents& e, KappaConvention target) {
    if (e.convention == target) return e.kappa;
    // G = g / (k(N - k)) with k(N - k) of order N^(1 + lambda)
    const double shift = 1.0 + e.lambda_marked;
    return target == KappaConvention::G_coeff ? e.kappa - shift : e.kappa + shift;
}

double Scaling::evaluate(double n) const { return std::pow(n, power) * std::pow(std::log(n), log_power); }

static std::string format_power(double p) {
    for (int q = 1; q <= 64; ++q) {
        const double num = p * q;
        if (std::abs(num - std::round(num)) < 1e-9) {
            const long a = std::lround(num);
            if (q == 1) return std::to_string(a);
            return std::to_string(a) + "/" + std::to_string(q);
        }
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", p);
    return buf;
}

std::string Scaling::label() const {
    std::string out;
    if (std::abs(power) > 1e-12) {
        const std::string p = format_power(power);
        out = p == "1" ? "N" : "N^(" + p + ")";
    }
    if (log_power != 0) {
        if (!out.empty()) out += " ";
        out += log_power == 1 ? "log N" : "log^" + std::to_string(log_power) + " N";
    }
    return out.empty() ? "1" : out;
}

bool operator<(const Scaling& a, const Scaling& b) {
    if (std::abs(a.power - b.power) > 1e-12) return a.power < b.power;
    return a.log_power < b.log_power;
}

static Scaling product(const Scaling& a, const Scaling& b) { return {a.power + b.power, a.log_power + b.log_power}; }

// clock ions scale as 1/width; log N qubits dominate when the clock term does not grow
static Scaling space_for_width(double width_power) {
    const double clock = -width_power;
    return clock > 1e-12 ? Scaling{clock, 0} : Scaling{0.0, 1};
}

static void check_lambda(double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0, 1]");
}

StScaling st_scaling(NlKind kind, double lambda, double exponent) {
    check_lambda(lambda);
    StScaling s;
    switch (kind) {
        case NlKind::linear: {
            const double p = 0.5 - lambda / 2;
            s.runtime = {p, 0};
            s.space = space_for_width(p);
            s.regime = "linear";
            break;
        }
        case NlKind::cubic:
        case NlKind::cubic_quintic: {
            const double kappa = exponent;
            const double m = std::max(kappa, lambda);
            s.runtime = {0.5 - m / 2, 0};
            double width = 0.5 + lambda / 2 - m;
            if (kind == NlKind::cubic_quintic && lambda == 0.0) width = 0.5;
            s.space = space_for_width(width);
            if (kind == NlKind::cubic_quintic && lambda == 0.0) s.regime = "single_marked";
            else if (kappa >= lambda / 2 + 0.5) s.regime = "kappa_ge_lambda/2+1/2";
            else if (kappa >= lambda) s.regime = "lambda_le_kappa_lt_lambda/2+1/2";
            else s.regime = "kappa_lt_lambda";
            break;
        }
        case NlKind::loglinear: {
            const double sigma = exponent, r = 1.0 - lambda;
            const double t_lo = std::min(0.5, 0.5 - sigma), t_hi = std::min(0.5, 0.5 - sigma / 2);
            const double width = std::min(0.5, 0.5 - sigma);
            s.runtime = {r * t_hi, 0};
            s.space = space_for_width(r * width);
            s.st = product({r * t_lo, 0}, s.space);
            s.st_upper = product(s.runtime, s.space);
            s.regime = sigma <= 0.5 ? "sigma_le_1/2" : "sigma_gt_1/2";
            return s;
        }
        case NlKind::custom: throw std::invalid_argument("no resource scaling for a custom nonlinearity");
    }
    s.st = product(s.runtime, s.space);
    s.st_upper = s.st;
    return s;
}

N0Bound n0_lower_bound(NlKind kind, const ScalingExponents& e, double n) {
    check_lambda(e.lambda_marked);
    if (!(n > 1.0)) throw std::invalid_argument("n0_lower_bound needs N > 1");
    N0Bound b;
    switch (kind) {
        case NlKind::cubic:
        case NlKind::cubic_quintic: {
            const double kappa = kappa_in_convention(e, KappaConvention::g_coeff);
            if (kappa >= e.lambda_marked) {
                b.scaling = {kappa, -1};
                b.regime = "kappa_ge_lambda";
                b.expression = "N^kappa / log N";
            } else {
                b.scaling = {e.lambda_marked, -1};
                b.regime = "kappa_lt_lambda";
                b.expression = "N^lambda / log N";
            }
            break;
        }
        case NlKind::loglinear:
            if (e.sigma_log <= 0.5) {
                b.scaling = {0.0, 0};
                b.regime = "unconstrained";
                b.expression = "1";
            } else {
                b.scaling = {1.0 + (1.0 - e.lambda_marked) * (2.0 * e.sigma_log - 1.0), -1};
                b.regime = "sigma_gt_1/2";
                b.expression = "N R^(2 sigma - 1) / log N";
            }
            break;
        case NlKind::linear:
            b.scaling = {0.0, 0};
            b.regime = "no_bound";
            b.expression = "1";
            break;
        case NlKind::custom: throw std::invalid_argument("no N0 bound for a custom nonlinearity");
    }
    b.value = b.scaling.evaluate(n);
    return b;
}

ExponentOptimum optimize_exponent(NlKind kind, double lambda) {
    check_lambda(lambda);
    ExponentOptimum best;
    best.parameter = kind == NlKind::loglinear ? "sigma" : "kappa";
    const int steps = int(std::lround((kExponentGridHi - kExponentGridLo) / kExponentGridStep));
    bool first = true;
    for (int i = 0; i <= steps; ++i) {
        const double x = kExponentGridLo + i * kExponentGridStep;
        const StScaling s = st_scaling(kind, lambda, x);
        // loglinear minimizes the upper bound; ties go to the largest exponent
        const Scaling& cost = s.st_upper;
        if (first || cost < best.scaling.st_upper || !(best.scaling.st_upper < cost)) {
            best.kappa_star = x;
            best.scaling = s;
            first = false;
        }
    }
    best.at_grid_boundary = std::abs(best.kappa_star - kExponentGridLo) < 1e-12 ||
                            std::abs(best.kappa_star - kExponentGridHi) < 1e-12;
    best.st_label = kind == NlKind::loglinear
                        ? best.scaling.st.label() + " <= ST <= " + best.scaling.st_upper.label()
                        : best.scaling.st.label();
    return best;
}

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw std::invalid_argument("fit_power_law needs at least 3 points");
    std::vector<double> lx, ly;
    for (const auto& [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0)) throw std::invalid_argument("fit_power_law needs positive N and values");
        lx.push_back(std::log(x));
        ly.push_back(std::log(y));
    }
    const LinearFit f = least_squares_line(lx, ly);
    return {std::exp(f.intercept), f.slope, f.r_squared};
}

void write_fit_json(const std::vector<std::pair<double, double>>& points, const PowerLawFit& fit,
                    const std::string& recipe, std::ostream& out) {
    nlohmann::ordered_json j;
    j["points"] = nlohmann::json::array();
    for (const auto& [x, y] : points) j["points"].push_back({x, y});
    j["prefactor"] = fit.prefactor;
    j["exponent"] = fit.exponent;
    j["r_squared"] = fit.r_squared;
    j["recipe"] = recipe;
    out << j.dump(2) << '\n';
}

ResourceRow resource_row(NlKind kind, const ScalingExponents& e, double n, ClockMode mode, double eps) {
    check_lambda(e.lambda_marked);
    ResourceRow row;
    row.n = n;
    row.lambda = e.lambda_marked;
    const double k = std::max(1.0, std::round(std::pow(n, e.lambda_marked)));
    switch (kind) {
        case NlKind::linear:
            row.kappa = 0.0;
            row.runtime = general_runtime(Nonlinearity::linear(), n, k);
            row.width = general_width_leading(Nonlinearity::linear(), n, k, eps);
            break;
        case NlKind::cubic: {
            row.kappa = kappa_in_convention(e, KappaConvention::g_coeff);
            const CompleteSearchParams p{n, k, std::pow(n, row.kappa), eps};
            row.runtime = cubic_runtime(p);
            row.width = cubic_width(p, WidthKind::leading);
            break;
        }
        case NlKind::cubic_quintic: {
            row.kappa = kappa_in_convention(e, KappaConvention::g_coeff);
            const double g = std::pow(n, row.kappa);
            row.runtime = cq_runtime(n, k, g);
            row.width = general_width_leading(Nonlinearity::cubic_quintic(g), n, k, eps);
            break;
        }
        case NlKind::loglinear: {
            row.kappa = e.sigma_log;
            const double r = n / k;
            const double g = std::pow(r, e.sigma_log) / std::log(r);
            row.runtime = log_runtime_numeric(n, k, g);
            row.width = log_width_lower_bound(n, k, g, eps);
            break;
        }
        case NlKind::custom: throw std::invalid_argument("no resource row for a custom nonlinearity");
    }
    const ResourceModel model{row.runtime, row.width, n, mode};
    row.space = space_requirement(model);
    const StProducts st = st_products(model);
    row.st = st.st;
    row.st2 = st.st2;
    const N0Bound b = n0_lower_bound(kind, e, n);
    row.n0_bound = b.value;
    row.regime = b.regime;
    return row;
}

void write_resource_csv(const std::vector<ResourceRow>& rows, std::ostream& out) {
    out << "N,kappa,lambda,T,width,S,ST,ST2,N0_bound,regime\n";
    for (const auto& r : rows)
        out << fmt_num(r.n) << ',' << fmt_num(r.kappa) << ',' << fmt_num(r.lambda) << ',' << fmt_num(r.runtime) << ','
            << fmt_num(r.width) << ',' << fmt_num(r.space) << ',' << fmt_num(r.st) << ',' << fmt_num(r.st2) << ','
            << fmt_num(r.n0_bound) << ',' << r.regime << '\n';
}

}  // namespace nlqs
