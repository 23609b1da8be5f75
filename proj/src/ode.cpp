#include "nlqs/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nlqs {

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

double rms(const std::vector<double>& v, const std::vector<double>& scale) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        double r = v[i] / scale[i];
        s += r * r;
    }
    return std::sqrt(s / double(v.size()));
}

}  // namespace

void DenseStep::interpolate(double t, std::vector<double>& out) const {
    const std::size_t n = dim();
    out.resize(n);
    const double th = (t - t0) / h, th1 = 1.0 - th;
    const double* r1 = coeffs.data();
    const double* r2 = r1 + n;
    const double* r3 = r2 + n;
    const double* r4 = r3 + n;
    const double* r5 = r4 + n;
    for (std::size_t i = 0; i < n; ++i)
        out[i] = r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
}

std::vector<double> dopri5(const OdeRhs& rhs, double t0, std::vector<double> y, double t_end,
                           const OdeControls& ctl, const StepObserver& observer, OdeStats* stats_out) {
    const std::size_t n = y.size();
    OdeStats stats;
    if (!(t_end > t0)) throw std::invalid_argument("dopri5: t_end must exceed t0");

    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n), sk(n);
    auto call = [&](double t, const std::vector<double>& yy, std::vector<double>& out) {
        rhs(t, yy, out);
        ++stats.rhs_calls;
    };
    auto scale_of = [&](const std::vector<double>& a, const std::vector<double>& b) {
        for (std::size_t i = 0; i < n; ++i)
            sk[i] = ctl.abs_tol + ctl.rel_tol * std::max(std::abs(a[i]), std::abs(b[i]));
    };

    double t = t0;
    call(t, y, k1);

    double h = ctl.initial_step;
    if (h <= 0.0) {
        scale_of(y, y);
        const double dnf = rms(k1, sk), dny = rms(y, sk);
        double h0 = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * dny / dnf;
        h0 = std::min(h0, ctl.max_step);
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h0 * k1[i];
        call(t + h0, ytmp, k2);
        for (std::size_t i = 0; i < n; ++i) err[i] = (k2[i] - k1[i]) / h0;
        const double der2 = rms(err, sk);
        const double der12 = std::max(der2, dnf);
        const double h1 = der12 <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / der12, 0.2);
        h = std::min({100.0 * h0, h1, ctl.max_step});
    }

    DenseStep step;
    step.coeffs.resize(5 * n);
    double facold = 1e-4;
    bool last_rejected = false;

    while (t < t_end) {
        if (stats.accepted + stats.rejected >= ctl.max_steps) {
            std::ostringstream os;
            os << "step budget exhausted at t=" << t;
            throw IntegrationError(os.str());
        }
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
            std::ostringstream os;
            os << "step size underflow at t=" << t << " (h=" << h << ")";
            throw IntegrationError(os.str());
        }
        bool last = false;
        if (t + h >= t_end || t_end - (t + h) < 1e-12 * std::abs(t_end)) {
            h = t_end - t;
            last = true;
        }

        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        call(t + c2 * h, ytmp, k2);
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        call(t + c3 * h, ytmp, k3);
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        call(t + c4 * h, ytmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        call(t + c5 * h, ytmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        call(t + h, ytmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        call(t + h, ynew, k7);

        for (std::size_t i = 0; i < n; ++i)
            err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        scale_of(y, ynew);
        const double e = rms(err, sk);
        if (!std::isfinite(e)) {
            std::ostringstream os;
            os << "non-finite state encountered at t=" << t;
            throw IntegrationError(os.str());
        }

        const double fac11 = std::pow(e, 0.17);
        if (e <= 1.0) {
            for (std::size_t i = 0; i < n; ++i) {
                const double ydiff = ynew[i] - y[i];
                const double bspl = h * k1[i] - ydiff;
                step.coeffs[i] = y[i];
                step.coeffs[n + i] = ydiff;
                step.coeffs[2 * n + i] = bspl;
                step.coeffs[3 * n + i] = ydiff - h * k7[i] - bspl;
                step.coeffs[4 * n + i] =
                    h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
            }
            step.t0 = t;
            step.h = h;
            ++stats.accepted;
            t = last ? t_end : t + h;
            y.swap(ynew);
            k1.swap(k7);
            if (observer) observer(step);

            double fac = fac11 / std::pow(facold, 0.04);
            fac = std::clamp(fac / 0.9, 0.1, 5.0);
            double hnew = h / fac;
            if (last_rejected) hnew = std::min(hnew, h);
            facold = std::max(e, 1e-4);
            last_rejected = false;
            h = std::min(hnew, ctl.max_step);
        } else {
            ++stats.rejected;
            last_rejected = true;
            h = h / std::min(5.0, fac11 / 0.9);
        }
    }
    if (stats_out) *stats_out = stats;
    return y;
}

}  // namespace nlqs
