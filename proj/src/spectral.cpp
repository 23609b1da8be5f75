#include "nlqs/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "nlqs/format.hpp"

namespace nlqs {

EigenDecomposition eig_sym(const Matrix& input) {
    const int n = input.rows();
    if (input.cols() != n) throw std::invalid_argument("eig_sym: matrix is not square");
    const double scale = std::max(input.max_abs(), 1e-300);
    if (input.symmetry_residual() > 1e-10 * std::max(scale, 1.0))
        throw std::invalid_argument("eig_sym: matrix is not symmetric");

    Matrix a = input;
    Matrix v = Matrix::identity(n);
    EigenDecomposition out;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (std::sqrt(off) <= 1e-14 * scale) break;
        out.sweeps = sweep + 1;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) { return a(i, i) < a(j, j); });
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (int j = 0; j < n; ++j) {
        const int src = idx[j];
        out.values[j] = a(src, src);
        double sign = 1.0;
        for (int k = 0; k < n; ++k)
            if (std::abs(v(k, src)) > 1e-14) {
                sign = v(k, src) < 0 ? -1.0 : 1.0;
                break;
            }
        for (int k = 0; k < n; ++k) out.vectors(k, j) = sign * v(k, src);
    }
    return out;
}

SpectralSummary spectral_summary(const CollapsedGraph& cg, double gamma, WalkForm form) {
    const int m = cg.size();
    auto eig = eig_sym(hamiltonian(cg, gamma, form));
    const double n = double(cg.n_vertices());
    SpectralSummary s;
    s.gamma = gamma;
    s.eigenvalues = eig.values;
    s.gap = m > 1 ? eig.values[1] - eig.values[0] : 0.0;
    s.overlaps_s.resize(m);
    s.overlaps_w.resize(m);
    for (int j = 0; j < m; ++j) {
        double os = 0.0;
        for (int i = 0; i < m; ++i) os += std::sqrt(double(cg.class_sizes[i]) / n) * eig.vectors(i, j);
        s.overlaps_s[j] = os * os;
        s.overlaps_w[j] = eig.vectors(0, j) * eig.vectors(0, j);
    }
    return s;
}

std::vector<SpectralSummary> overlap_sweep(const CollapsedGraph& cg, const std::vector<double>& gamma_grid,
                                           WalkForm form) {
    if (gamma_grid.empty()) throw std::invalid_argument("overlap_sweep: empty gamma grid");
    std::vector<SpectralSummary> out;
    out.reserve(gamma_grid.size());
    for (double g : gamma_grid) out.push_back(spectral_summary(cg, g, form));
    return out;
}

GammaSearchResult find_gamma_numeric(const CollapsedGraph& cg, double lo, double hi, int n_grid, WalkForm form) {
    if (!(hi > lo) || n_grid < 3) throw std::invalid_argument("find_gamma_numeric: need lo < hi and n_grid >= 3");
    if (cg.size() < 2) throw std::invalid_argument("find_gamma_numeric: need at least two classes");
    auto imbalance = [&](double g) {
        auto s = spectral_summary(cg, g, form);
        return std::abs(s.overlaps_s[0] - s.overlaps_s[1]);
    };
    int best = 0;
    double best_val = 1e300;
    std::vector<double> grid(n_grid);
    for (int i = 0; i < n_grid; ++i) {
        grid[i] = lo + (hi - lo) * i / (n_grid - 1);
        double v = imbalance(grid[i]);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    double a = grid[std::max(best - 1, 0)];
    double b = grid[std::min(best + 1, n_grid - 1)];
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double fc = imbalance(c), fd = imbalance(d);
    while (b - a > 1e-13 * std::max(1.0, std::abs(b))) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = imbalance(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = imbalance(d);
        }
    }
    GammaSearchResult r;
    r.gamma = 0.5 * (a + b);
    r.imbalance = imbalance(r.gamma);
    if (best_val < r.imbalance) {
        r.gamma = grid[best];
        r.imbalance = best_val;
    }
    if (best == 0 || best == n_grid - 1) {
        r.at_boundary = true;
        r.warning = "no overlap crossing inside the gamma range; returning the boundary";
    }
    return r;
}

void write_sweep_csv(const std::vector<SpectralSummary>& rows, std::ostream& out) {
    if (rows.empty()) return;
    const std::size_t m = rows.front().eigenvalues.size();
    out << "gamma,gap";
    for (std::size_t j = 0; j < m; ++j) out << ",os" << j;
    for (std::size_t j = 0; j < m; ++j) out << ",ow" << j;
    out << '\n';
    for (const auto& r : rows) {
        out << fmt_num(r.gamma) << ',' << fmt_num(r.gap);
        for (double v : r.overlaps_s) out << ',' << fmt_num(v);
        for (double v : r.overlaps_w) out << ',' << fmt_num(v);
        out << '\n';
    }
}

}  // namespace nlqs
