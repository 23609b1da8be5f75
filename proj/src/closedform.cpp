#include "nlqs/closedform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "nlqs/format.hpp"

namespace nlqs {

using std::numbers::pi;

double linear_prob(double n, double t) {
    if (n < 2) throw std::invalid_argument("linear_prob: N must be at least 2");
    const double c = std::cos(t / std::sqrt(n)), s = std::sin(t / std::sqrt(n));
    return c * c / n + s * s;
}

static double sum_kg(const CompleteSearchParams& p) {
    const double s = p.marked_count + p.g;
    if (!(s > 0.0)) throw std::invalid_argument("cubic closed forms need k + g > 0");
    return s;
}

double cubic_prob(const CompleteSearchParams& p, double t) {
    const double n = p.n_vertices, k = p.marked_count, s = sum_kg(p);
    const double theta = pi / 2 - std::sqrt(s / n) * t;
    const double c2 = std::cos(theta) * std::cos(theta), s2 = std::sin(theta) * std::sin(theta);
    return (n * c2 + s * s2) / (n * c2 + (n / k) * s * s2);
}

double cubic_time_of_prob(const CompleteSearchParams& p, double x) {
    const double n = p.n_vertices, k = p.marked_count, s = sum_kg(p);
    if (x < k / n - 1e-15 || x > 1.0 + 1e-15) throw std::domain_error("cubic_time_of_prob: x outside [k/N, 1]");
    x = std::clamp(x, k / n, 1.0);
    const double num = std::sqrt(n * k) * std::sqrt(1.0 - x);
    const double den = std::sqrt(s) * std::sqrt(n * x - k);
    return std::sqrt(n / s) * (pi / 2 - std::atan2(num, den));
}

double cubic_rate(const CompleteSearchParams& p, double x) {
    const double n = p.n_vertices, k = p.marked_count;
    const double d = 1.0 + p.G() * (n * x - k);
    return 2.0 * std::sqrt(k) / n * d * std::sqrt(std::max(0.0, (1.0 - x) * (n * x - k)));
}

double cubic_runtime(const CompleteSearchParams& p) {
    return pi * std::sqrt(p.n_vertices) / (2.0 * std::sqrt(sum_kg(p)));
}

double cubic_width(const CompleteSearchParams& p, WidthKind kind) {
    const double n = p.n_vertices, k = p.marked_count, eps = p.epsilon_height;
    if (!(eps > 0.0 && eps < 1.0 - k / n)) throw std::domain_error("cubic_width: need 0 < eps < 1 - k/N");
    if (kind == WidthKind::leading) return 2.0 * n / (1.0 + p.g / k) * std::sqrt(eps / (k * (n - k)));
    const double s = sum_kg(p);
    return 2.0 * std::sqrt(n / s) *
           std::atan(std::sqrt(n * k) * std::sqrt(eps) / (std::sqrt(s) * std::sqrt(n * (1.0 - eps) - k)));
}

namespace {

// Point on the search path parameterized by theta; 1 - x is kept separately to avoid cancellation.
struct PathPoint {
    double x;
    double omx;
};

PathPoint path_point(double n, double k, double theta) {
    const double q = 1.0 - k / n;
    const double s = std::sin(theta), c = std::cos(theta);
    return {k / n + q * s * s, q * c * c};
}

double runtime_denominator(const Nonlinearity& nl, double n, double k, const PathPoint& pt) {
    if (nl.kind == NlKind::linear || nl.g == 0.0) return 1.0;
    return 1.0 + nl.g * (nl.f(pt.x / k) - nl.f(pt.omx / (n - k)));
}

void check_positive_denominator(const Nonlinearity& nl, double n, double k) {
    constexpr int samples = 4000;
    double prev = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double th = (pi / 2) * i / samples;
        const double d = runtime_denominator(nl, n, k, path_point(n, k, th));
        if (!(d > 0.0)) {
            double lo = (pi / 2) * std::max(i - 1, 0) / samples, hi = th;
            for (int it = 0; it < 100 && i > 0; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (runtime_denominator(nl, n, k, path_point(n, k, mid)) > 0.0) lo = mid;
                else hi = mid;
            }
            std::ostringstream os;
            os << "1 + g(f_a - f_b) vanishes on the search path: stationary point x_s = "
               << path_point(n, k, 0.5 * (lo + hi)).x << " blocks the runtime integral";
            throw std::domain_error(os.str());
        }
        prev = d;
    }
    (void)prev;
}

double path_integral(const Nonlinearity& nl, double n, double k, double theta_end, double rel_tol) {
    auto f = [&](double th) { return 1.0 / runtime_denominator(nl, n, k, path_point(n, k, th)); };
    auto r = integrate_adaptive(f, 0.0, theta_end, rel_tol);
    return std::sqrt(n / k) * r.value;
}

void check_search_domain(double n, double k) {
    if (!(k >= 1.0 && k < n)) throw std::invalid_argument("need 1 <= k < N");
}

}  // namespace

double general_runtime(const Nonlinearity& nl, double n, double k, double rel_tol) {
    check_search_domain(n, k);
    check_positive_denominator(nl, n, k);
    return path_integral(nl, n, k, pi / 2, rel_tol);
}

double general_time_of_prob(const Nonlinearity& nl, double n, double k, double x, double rel_tol) {
    check_search_domain(n, k);
    if (x < k / n || x > 1.0) throw std::domain_error("general_time_of_prob: x outside [k/N, 1]");
    check_positive_denominator(nl, n, k);
    const double theta = std::asin(std::sqrt(std::clamp((x - k / n) / (1.0 - k / n), 0.0, 1.0)));
    if (theta == 0.0) return 0.0;
    return path_integral(nl, n, k, theta, rel_tol);
}

double general_width_leading(const Nonlinearity& nl, double n, double k, double eps) {
    check_search_domain(n, k);
    double fdiff = 0.0;
    switch (nl.kind) {
        case NlKind::linear: fdiff = 0.0; break;
        case NlKind::cubic: fdiff = 1.0 / k; break;
        case NlKind::cubic_quintic:
            // f(1/k) - f(0) = (k - 1)/k^2; for k >= 2 the large-k form 1/k is used
            fdiff = k < 2.0 ? (k - 1.0) / (k * k) : 1.0 / k;
            break;
        case NlKind::loglinear:
            throw std::domain_error("f diverges at 0 for the loglinear nonlinearity; use log_width_lower_bound");
        case NlKind::custom: {
            const double f0 = nl.f(0.0), f1 = nl.f(1.0 / k);
            if (!std::isfinite(f0) || !std::isfinite(f1))
                throw std::domain_error("f is not finite at the peak; use a nonlinearity-specific width bound");
            fdiff = f1 - f0;
            break;
        }
    }
    return 2.0 * n / (1.0 + nl.g * fdiff) * std::sqrt(eps / (k * (n - k)));
}

CubicQuinticCoeffs cq_coeffs(double n, double k, double g) {
    CubicQuinticCoeffs c;
    c.a = -g * n * (n - 2.0 * k);
    c.b = g * k * (n * n - k * n - 2.0 * k);
    c.c = -g * k * k * (n - k - 1.0) + k * k * (n - k) * (n - k);
    c.Delta = c.b * c.b - 4.0 * c.a * c.c;
    c.Sigma = c.a + c.b + c.c;
    c.Xi = 2.0 * c.a * k + 2.0 * c.c * n + c.b * (k + n);
    return c;
}

CqRuntime cq_runtime_detail(double n, double k, double g) {
    check_search_domain(n, k);
    if (!(2.0 * k < n)) throw std::domain_error("cq_runtime: needs k < N/2");
    CqRuntime out;
    const auto c = cq_coeffs(n, k, g);
    auto fallback = [&](const std::string& why) {
        out.value = general_runtime(Nonlinearity::cubic_quintic(g), n, k);
        out.used_quadrature = true;
        out.warning = why + "; evaluated by quadrature instead";
        return out;
    };
    if (g == 0.0) {
        out.value = general_runtime(Nonlinearity::linear(), n, k);
        return out;
    }
    if (!(c.Delta > 0.0) || !(c.Sigma > 0.0) || !(c.Xi > 0.0)) return fallback("closed form radicand is not positive");

    const double sd = std::sqrt(c.Delta);
    const double q = n - k;
    // xi - sqrt(Delta)(N-k) loses its leading digits; use
    // (xi - sD q)(xi + sD q) = xi^2 - Delta q^2 = 4 Sigma N^2 k^2 (N-k)^2.
    const double r_plus = c.Xi + sd * q;
    const double r_minus = 4.0 * c.Sigma * n * n * k * k * q * q / r_plus;
    const double u = 2.0 * c.a + c.b;
    // sD - u, rationalized when u > 0: (Delta - u^2) = -4 a Sigma
    const double m_term = u <= 0.0 ? sd - u : -4.0 * c.a * c.Sigma / (sd + u);
    if (!(r_minus > 0.0)) return fallback("cancellation left a non-positive radicand");

    const double pre = (pi / 2) * (n * k * k * q * q / (2.0 * std::sqrt(k))) * std::sqrt(2.0) /
                       (std::sqrt(c.Sigma) * sd);
    out.value = pre * ((u + sd) / std::sqrt(r_minus) + m_term / std::sqrt(r_plus));
    if (!std::isfinite(out.value) || out.value <= 0.0) return fallback("closed form produced a non-finite value");
    return out;
}

double cq_runtime(double n, double k, double g) { return cq_runtime_detail(n, k, g).value; }

double log_runtime_numeric(double n, double k, double g) {
    if (!(g > 0.0)) throw std::domain_error("log_runtime_numeric: needs g > 0");
    if (!(2.0 * k < n)) throw std::domain_error("log_runtime_numeric: needs k < N/2");
    return general_runtime(Nonlinearity::loglinear(g), n, k);
}

static void check_log_domain(double n, double k, double g) {
    if (!(g > 0.0)) throw std::domain_error("loglinear bounds need g > 0");
    if (!(k >= 1.0 && 2.0 * k < n)) throw std::domain_error("loglinear bounds need 1 <= k < N/2");
}

LogRuntimeBounds log_runtime_bounds_quadrature(double n, double k, double g) {
    check_log_domain(n, k, g);
    const double rp = (n - k) / k, L = std::log(rp);
    const double theta_half = std::asin(std::sqrt((0.5 - k / n) / (1.0 - k / n)));
    // every integrand is h(x) / sqrt((1-x)(Nx-k)); in theta that is (2/sqrt(N)) h
    auto integrate_h = [&](auto h1, auto h2) {
        auto f1 = [&](double th) { return h1(path_point(n, k, th)); };
        auto f2 = [&](double th) { return h2(path_point(n, k, th)); };
        const double i1 = integrate_adaptive(f1, 0.0, theta_half, 1e-12).value;
        const double i2 = integrate_adaptive(f2, theta_half, pi / 2, 1e-12).value;
        return std::sqrt(n / k) * (i1 + i2);
    };
    LogRuntimeBounds b;
    b.lower = integrate_h(
        [&](PathPoint p) { return std::sqrt(p.omx) / ((1.0 + g * L) * std::sqrt(1.0 - k / n)); },
        [&](PathPoint p) {
            return std::sqrt(n * p.x - k) / ((1.0 + g * std::log(rp / p.omx)) * std::sqrt(n - k));
        });
    b.upper_loose = integrate_h([&](PathPoint p) { return std::sqrt(p.omx) / std::sqrt(0.5); },
                                [&](PathPoint p) {
                                    return std::sqrt(n * p.x - k) / ((1.0 + g * L) * std::sqrt(n / 2 - k));
                                });
    b.upper_tight = integrate_h(
        [&](PathPoint p) { return 1.0 / (1.0 + g * 2.0 / (n - 2.0 * k) * L * (n * p.x - k)); },
        [&](PathPoint p) { return 1.0 / (1.0 + g * (L + 4.0 * (p.x - 0.5))); });
    b.tight_from_quadrature = true;
    b.lower_elementary = b.lower;
    return b;
}

LogRuntimeBounds log_runtime_bounds(double n, double k, double g) {
    check_log_domain(n, k, g);
    const double rp = (n - k) / k, L = std::log(rp);
    const double pre = n / (2.0 * std::sqrt(k));
    LogRuntimeBounds b;

    // lower: both bounding integrals are positive, so their sum bounds the runtime from below
    const double v = (1.0 + g * std::log(2.0 * rp)) / (2.0 * g);
    const double first = std::sqrt(2.0 * (n - 2.0 * k) / n) / (1.0 + g * L);
    // e^(1/2g) sqrt(R') E1(v) / g with the exponentials combined: sqrt(R') e^(-v + 1/2g) = 1/sqrt(2)
    const double second = exp_integral_e1_scaled(v) / (g * std::sqrt(2.0));
    b.lower = pre / std::sqrt(n - k) * (first + second);
    const double second_elem = std::log(1.0 + 4.0 * g / (1.0 + g * std::log(2.0 * rp))) / (2.0 * std::sqrt(2.0) * g);
    b.lower_elementary = pre / std::sqrt(n - k) * (first + second_elem);

    b.upper_loose = pre * (2.0 * std::sqrt(n - 2.0 * k) / n + 2.0 / (std::sqrt(n - 2.0 * k) * (1.0 + g * L)));

    const double d1 = n - 2.0 * k + 2.0 * g * (n - k) * L;
    const double e = 4.0 * g * k + n - 2.0 * g * n + g * n * L;
    const double h = 1.0 + 2.0 * g + g * L;
    if (d1 > 0.0 && e > 0.0 && h > 0.0) {
        const double t1 = -2.0 * std::sqrt(n - 2.0 * k) / (std::sqrt(n) * std::sqrt(d1)) *
                          std::atan(std::sqrt(n) / std::sqrt(d1));
        const double t2 = pi / (std::sqrt(n - k) * std::sqrt(n)) * std::sqrt((n * n - 3.0 * k * n + 2.0 * k * k) / d1);
        const double t3 = 2.0 * std::atan(std::sqrt(e) / (std::sqrt(n - 2.0 * k) * std::sqrt(h))) /
                          (std::sqrt(h) * std::sqrt(e));
        b.upper_tight = pre * (t1 + t2 + t3);
    } else {
        b.upper_tight = log_runtime_bounds_quadrature(n, k, g).upper_tight;
        b.tight_from_quadrature = true;
    }
    return b;
}

double log_width_lower_bound(double n, double k, double g, double eps) {
    if (!(eps > 0.0 && eps < 0.5)) throw std::domain_error("log_width_lower_bound: need 0 < eps < 1/2");
    if (!(g > 0.0)) throw std::domain_error("log_width_lower_bound: needs g > 0");
    return std::sqrt(n / k) / (g * std::log(n / (k * eps)));
}

StationaryPoints repulsive_stationary_points(double n, double k, double G) {
    if (!(G < 0.0)) throw std::domain_error("repulsive_stationary_points: needs G < 0");
    StationaryPoints s;
    s.x_min = k / n;
    s.x_max = 1.0;
    s.x_stat = (k * G - 1.0) / (n * G);
    s.blocking = s.x_stat > s.x_min && s.x_stat < 1.0;
    return s;
}

std::string to_string(SrgRegime r) {
    return r == SrgRegime::degree_linear_in_n ? "degree_linear_in_n" : "degree_sublinear";
}

double SrgPrediction::predicted_prob(double t) const {
    const double s = std::sin(frequency * t);
    return amplitude * amplitude * s * s;
}

SrgPrediction srg_prediction(const SrgParams& p, double gamma) {
    if (!srg_check(p).feasible) throw std::invalid_argument("srg_prediction: infeasible parameters");
    const double n = p.n_vertices, k = p.degree, l = p.lambda_common, m = p.mu_common;
    SrgPrediction s;
    s.regime = 4.0 * k >= n ? SrgRegime::degree_linear_in_n : SrgRegime::degree_sublinear;
    const double d = k - l + m;
    s.norm_A = 1.0 / std::sqrt(1.0 + d * d / k);
    s.e_plus = -gamma * k + gamma * s.norm_A * std::sqrt(n / k) * m;
    s.e_minus = -gamma * k - gamma * s.norm_A * std::sqrt(n / k) * m;
    s.amplitude = s.norm_A * m * n / std::pow(k, 1.5);
    s.frequency = s.norm_A * std::sqrt(n / k) * m / k;
    s.gap_case1 = 2.0 / std::sqrt(n - 1.0);
    s.runtime_case1 = pi * std::sqrt(n - 1.0) / 2.0;
    return s;
}

SrgPrediction srg_prediction(const SrgParams& p) { return srg_prediction(p, 1.0 / p.degree); }

std::vector<double> suff_complete_probs(const CollapsedGraph& cg, double t) {
    if (cg.n_marked_classes != 1 || cg.class_sizes.at(0) != 1)
        throw std::invalid_argument("suff_complete_probs: needs a single marked vertex");
    const double n = double(cg.n_vertices());
    const double c = std::cos(t / std::sqrt(n)), s = std::sin(t / std::sqrt(n));
    std::vector<double> p(cg.size());
    p[0] = c * c / n + s * s;
    for (int i = 1; i < cg.size(); ++i) p[i] = double(cg.class_sizes[i]) / n * c * c;
    return p;
}

BlochPoint bloch_coords(std::complex<double> c0, std::complex<double> c1) {
    const double norm = std::norm(c0) + std::norm(c1);
    if (std::abs(norm - 1.0) > 1e-8) throw std::domain_error("bloch_coords: amplitudes are not normalized");
    const std::complex<double> w = 2.0 * c0 * std::conj(c1);
    return {w.real(), w.imag(), std::norm(c0) - std::norm(c1)};
}

double rescaled_time_residual(const Trajectory& traj, double n, double k) {
    if (traj.size() < 2) throw std::invalid_argument("rescaled_time_residual: needs at least two samples");
    const double w = std::sqrt(k / n);
    double tau = 0.0, worst = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (i > 0) tau += 0.5 * (traj.gamma[i] + traj.gamma[i - 1]) * n * (traj.t[i] - traj.t[i - 1]);
        const double c = std::cos(w * tau), s = std::sin(w * tau);
        const double predicted = s * s + (k / n) * c * c;
        worst = std::max(worst, std::abs(traj.probs[i][0] - predicted));
    }
    return worst;
}

void write_table_csv(const std::vector<TableRow>& rows, std::ostream& out) {
    out << "N,k,g,t_star,width_exact,width_leading\n";
    for (const auto& r : rows)
        out << fmt_num(r.n) << ',' << fmt_num(r.k) << ',' << fmt_num(r.g) << ',' << fmt_num(r.t_star) << ','
            << fmt_num(r.width_exact) << ',' << fmt_num(r.width_leading) << '\n';
}

}  // namespace nlqs
