#include "nlqs/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace nlqs {

namespace {

class FullSystem {
public:
    FullSystem(const Graph& graph, const std::vector<int>& marked, const SearchSystem& reduced, WalkForm walk)
        : n_(graph.n), reduced_(reduced), walk_(walk), vertex_class_(reduced.collapsed().vertex_class) {
        is_marked_.assign(n_, 0);
        for (int v : marked) is_marked_.at(v) = 1;
        if (walk_ == WalkForm::adjacency)
            for (int u = 0; u < n_; ++u) nbrs_.push_back(graph.neighbors(u));
        class_amp_.resize(reduced.dim());
    }

    double gamma(const std::vector<double>& y, double t) const {
        std::fill(class_amp_.begin(), class_amp_.end(), cplx(0.0, 0.0));
        for (int v = 0; v < n_; ++v) class_amp_[vertex_class_[v]] += y[2 * v] * y[2 * v] + y[2 * v + 1] * y[2 * v + 1];
        for (auto& c : class_amp_) c = std::sqrt(c.real());
        return reduced_.gamma(class_amp_, t);
    }

    void derivative(double t, const std::vector<double>& y, std::vector<double>& dy) const {
        const double gam = gamma(y, t);
        const Nonlinearity& nl = reduced_.nonlinearity();
        dy.resize(y.size());
        double sre = 0.0, sim = 0.0;
        if (walk_ == WalkForm::projector)
            for (int v = 0; v < n_; ++v) {
                sre += y[2 * v];
                sim += y[2 * v + 1];
            }
        for (int v = 0; v < n_; ++v) {
            double are = sre, aim = sim;
            if (walk_ == WalkForm::adjacency) {
                are = aim = 0.0;
                for (int u : nbrs_[v]) {
                    are += y[2 * u];
                    aim += y[2 * u + 1];
                }
            }
            const double re = y[2 * v], im = y[2 * v + 1];
            const double p = re * re + im * im;
            const double diag = (is_marked_[v] ? 1.0 : 0.0) + (nl.g != 0.0 ? nl.g * nl.f(p) : 0.0);
            const double hre = -gam * are - diag * re;
            const double him = -gam * aim - diag * im;
            dy[2 * v] = him;  // -i (hre + i him)
            dy[2 * v + 1] = -hre;
        }
    }

private:
    int n_;
    const SearchSystem& reduced_;
    WalkForm walk_;
    std::vector<int> vertex_class_;
    std::vector<std::uint8_t> is_marked_;
    std::vector<std::vector<int>> nbrs_;
    mutable std::vector<cplx> class_amp_;
};

void check_graph(const Graph& graph, const std::vector<int>& marked) {
    if (graph.n < 2 || graph.n > kOracleMaxVertices) throw std::invalid_argument("oracle supports 2 <= N <= 5000");
    if (marked.empty()) throw std::invalid_argument("oracle needs at least one marked vertex");
    for (int v : marked)
        if (v < 0 || v >= graph.n) throw std::invalid_argument("marked vertex out of range");
}

Trajectory integrate_full(const Graph& graph, const std::vector<int>& marked, const SearchSystem& reduced,
                          double t_end, const IntegrateControls& ctl, WalkForm walk) {
    if (!(t_end > 0.0)) throw std::invalid_argument("full_integrate: t_end must be positive");
    FullSystem sys(graph, marked, reduced, walk);
    const int n = graph.n;
    const auto times = sample_times(t_end, ctl.sample_dt);
    Trajectory traj;

    auto record = [&](double t, const std::vector<double>& y) {
        std::vector<double> p(n);
        double norm = 0.0;
        for (int v = 0; v < n; ++v) {
            p[v] = y[2 * v] * y[2 * v] + y[2 * v + 1] * y[2 * v + 1];
            norm += p[v];
        }
        traj.t.push_back(t);
        traj.probs.push_back(std::move(p));
        traj.gamma.push_back(sys.gamma(y, t));
        traj.norm_error.push_back(std::abs(norm - 1.0));
    };

    std::vector<double> y0(2 * std::size_t(n), 0.0);
    for (int v = 0; v < n; ++v) y0[2 * v] = 1.0 / std::sqrt(double(n));
    record(0.0, y0);
    std::size_t next = 1;

    OdeControls oc;
    oc.rel_tol = ctl.rel_tol;
    oc.abs_tol = ctl.abs_tol;
    if (ctl.max_step > 0.0) oc.max_step = ctl.max_step;
    OdeRhs rhs = [&](double t, const std::vector<double>& y, std::vector<double>& dy) { sys.derivative(t, y, dy); };
    std::vector<double> ybuf;
    StepObserver obs = [&](const DenseStep& step) {
        while (next < times.size() && times[next] <= step.t1() + 1e-12 * std::max(1.0, step.t1())) {
            step.interpolate(times[next], ybuf);
            record(times[next], ybuf);
            ++next;
        }
    };
    dopri5(rhs, 0.0, y0, t_end, oc, obs);
    return traj;
}

}  // namespace

Trajectory full_integrate(const Graph& graph, const std::vector<int>& marked, const Nonlinearity& nl,
                          const GammaPolicy& policy, double t_end, const IntegrateControls& controls,
                          WalkForm walk) {
    check_graph(graph, marked);
    SearchSystem reduced(collapse(graph, marked), nl, policy, walk, graph.srg);
    return integrate_full(graph, marked, reduced, t_end, controls, walk);
}

OracleComparison compare(const Trajectory& full, const Trajectory& reduced, const std::vector<int>& vertex_class) {
    if (full.size() != reduced.size()) throw std::invalid_argument("compare: trajectories differ in sample count");
    OracleComparison out;
    out.samples = full.size();
    if (full.size() == 0) return out;
    const std::size_t m = reduced.probs[0].size();
    out.per_class_dev.assign(m, 0.0);
    std::vector<double> agg(m);
    for (std::size_t s = 0; s < full.size(); ++s) {
        if (std::abs(full.t[s] - reduced.t[s]) > 1e-12 * std::max(1.0, std::abs(full.t[s])))
            throw std::invalid_argument("compare: sample times differ");
        if (full.probs[s].size() != vertex_class.size())
            throw std::invalid_argument("compare: vertex map does not match the full trajectory");
        std::fill(agg.begin(), agg.end(), 0.0);
        for (std::size_t v = 0; v < vertex_class.size(); ++v) agg.at(std::size_t(vertex_class[v])) += full.probs[s][v];
        for (std::size_t i = 0; i < m; ++i)
            out.per_class_dev[i] = std::max(out.per_class_dev[i], std::abs(agg[i] - reduced.probs[s][i]));
    }
    for (double d : out.per_class_dev) out.max_abs_dev = std::max(out.max_abs_dev, d);
    return out;
}

OracleRun run_oracle(const Graph& graph, const std::vector<int>& marked, const Nonlinearity& nl,
                     const GammaPolicy& policy, double t_end, const IntegrateControls& controls, WalkForm walk) {
    check_graph(graph, marked);
    OracleRun run;
    run.collapsed = collapse(graph, marked);
    SearchSystem reduced(run.collapsed, nl, policy, walk, graph.srg);
    run.reduced = integrate(reduced, t_end, controls);
    run.full = integrate_full(graph, marked, reduced, t_end, controls, walk);
    run.comparison = compare(run.full, run.reduced, run.collapsed.vertex_class);
    return run;
}

void write_comparison_json(const OracleComparison& cmp, std::ostream& out) {
    nlohmann::ordered_json j;
    j["max_abs_dev"] = cmp.max_abs_dev;
    j["per_class_dev"] = cmp.per_class_dev;
    j["samples"] = cmp.samples;
    out << j.dump(2) << '\n';
}

}  // namespace nlqs
