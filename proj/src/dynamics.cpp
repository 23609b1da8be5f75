#include "nlqs/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "nlqs/format.hpp"

namespace nlqs {

std::string to_string(NlKind k) {
    switch (k) {
        case NlKind::linear: return "linear";
        case NlKind::cubic: return "cubic";
        case NlKind::cubic_quintic: return "cubic_quintic";
        case NlKind::loglinear: return "loglinear";
        case NlKind::custom: return "custom";
    }
    return "?";
}

NlKind parse_nl_kind(const std::string& s0) {
    std::string s = s0;
    std::replace(s.begin(), s.end(), '-', '_');
    for (NlKind k : {NlKind::linear, NlKind::cubic, NlKind::cubic_quintic, NlKind::loglinear})
        if (to_string(k) == s) return k;
    if (s == "log") return NlKind::loglinear;
    throw std::invalid_argument("unknown nonlinearity: " + s0);
}

double Nonlinearity::f(double p) const {
    switch (kind) {
        case NlKind::linear: return 0.0;
        case NlKind::cubic: return p;
        case NlKind::cubic_quintic: return p - p * p;
        case NlKind::loglinear: return std::log(std::max(p, kLogFloor));
        case NlKind::custom: return custom_f(p);
    }
    return 0.0;
}

double Nonlinearity::f_prime(double p) const {
    switch (kind) {
        case NlKind::linear: return 0.0;
        case NlKind::cubic: return 1.0;
        case NlKind::cubic_quintic: return 1.0 - 2.0 * p;
        case NlKind::loglinear: return 1.0 / std::max(p, kLogFloor);
        case NlKind::custom: return custom_f_prime ? custom_f_prime(p) : 0.0;
    }
    return 0.0;
}

Nonlinearity Nonlinearity::make(NlKind kind, double g) {
    switch (kind) {
        case NlKind::linear: return linear();
        case NlKind::cubic: return cubic(g);
        case NlKind::cubic_quintic: return cubic_quintic(g);
        case NlKind::loglinear: return loglinear(g);
        case NlKind::custom: break;
    }
    throw std::invalid_argument("custom nonlinearity needs explicit f");
}

std::string to_string(PolicyKind k) {
    switch (k) {
        case PolicyKind::fixed: return "fixed";
        case PolicyKind::cubic_critical: return "cubic_critical";
        case PolicyKind::general_critical: return "general_critical";
        case PolicyKind::srg_c1: return "srg_c1";
        case PolicyKind::srg_c2: return "srg_c2";
        case PolicyKind::srg_c2_prime: return "srg_c2_prime";
        case PolicyKind::suff_complete_critical: return "suff_complete_critical";
        case PolicyKind::numeric_table: return "numeric_table";
    }
    return "?";
}

PolicyKind parse_policy_kind(const std::string& s0) {
    std::string s = s0;
    std::replace(s.begin(), s.end(), '-', '_');
    for (PolicyKind k : {PolicyKind::fixed, PolicyKind::cubic_critical, PolicyKind::general_critical,
                         PolicyKind::srg_c1, PolicyKind::srg_c2, PolicyKind::srg_c2_prime,
                         PolicyKind::suff_complete_critical, PolicyKind::numeric_table})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown gamma policy: " + s0);
}

SearchSystem::SearchSystem(CollapsedGraph cg, Nonlinearity nl, GammaPolicy policy, WalkForm walk,
                           std::optional<SrgParams> srg)
    : cg_(std::move(cg)), nl_(std::move(nl)), policy_(std::move(policy)), walk_(walk), srg_(srg) {
    w_ = walk_operator(cg_, walk_);
    n_ = double(cg_.n_vertices());
    k_ = double(cg_.marked_count());
    if (nl_.kind == NlKind::custom && !nl_.custom_f) throw std::invalid_argument("custom nonlinearity without f");

    const PolicyKind pk = policy_.kind;
    if ((pk == PolicyKind::cubic_critical || pk == PolicyKind::general_critical) && cg_.size() != 2)
        throw std::invalid_argument(to_string(pk) + " needs a two-class (complete graph) collapse");
    if (pk == PolicyKind::cubic_critical && nl_.kind != NlKind::cubic && nl_.kind != NlKind::linear)
        throw std::invalid_argument("cubic_critical needs the cubic nonlinearity");
    if ((pk == PolicyKind::srg_c1 || pk == PolicyKind::srg_c2 || pk == PolicyKind::srg_c2_prime) && !srg_)
        throw std::invalid_argument(to_string(pk) + " needs strongly regular graph parameters");
    if (pk == PolicyKind::srg_c2_prime && srg_ && srg_->degree == srg_->mu_common)
        throw std::invalid_argument("srg_c2_prime undefined for k = mu");
    if (pk == PolicyKind::suff_complete_critical && cg_.size() < 2)
        throw std::invalid_argument("suff_complete_critical needs at least two classes");
    if (pk == PolicyKind::numeric_table && policy_.table.empty())
        throw std::invalid_argument("numeric_table policy has an empty table");
}

SearchSystem SearchSystem::from_config(const SearchConfig& cfg) {
    std::optional<SrgParams> srg = cfg.srg;
    CollapsedGraph cg;
    if (cfg.srg) {
        if (cfg.marked_count != 1) throw std::invalid_argument("SRG searches use a single marked vertex");
        cg = collapse_analytic(*cfg.srg);
    } else {
        cg = collapse_analytic(cfg.family, cfg.marked_count);
        if (!srg && cfg.family.family != Family::complete && cfg.family.family != Family::hypercube)
            srg = family_srg_params(cfg.family);
    }
    return SearchSystem(std::move(cg), cfg.nl, cfg.policy, cfg.walk, srg);
}

std::vector<cplx> SearchSystem::initial_state() const {
    std::vector<cplx> c(cg_.size());
    for (int i = 0; i < cg_.size(); ++i) c[i] = std::sqrt(double(cg_.class_sizes[i]) / n_);
    return c;
}

std::vector<double> SearchSystem::self_potential(const std::vector<cplx>& c) const {
    std::vector<double> v(c.size(), 0.0);
    if (nl_.kind == NlKind::linear || nl_.g == 0.0) return v;
    for (std::size_t i = 0; i < c.size(); ++i) v[i] = nl_.g * nl_.f(std::norm(c[i]) / double(cg_.class_sizes[i]));
    return v;
}

double SearchSystem::gamma(const std::vector<cplx>& c, double t) const {
    switch (policy_.kind) {
        case PolicyKind::fixed: return policy_.gamma0;
        case PolicyKind::cubic_critical: {
            const double a2 = std::norm(c[0]), b2 = std::norm(c[1]);
            const double G = nl_.g / (k_ * (n_ - k_));
            const double delta = (n_ - k_) * a2 - k_ * b2;
            return (1.0 + G * delta) / n_;
        }
        case PolicyKind::general_critical: {
            const double fa = nl_.f(std::norm(c[0]) / k_);
            const double fb = nl_.f(std::norm(c[1]) / (n_ - k_));
            return (1.0 + nl_.g * (fa - fb)) / n_;
        }
        case PolicyKind::srg_c1: return 1.0 / srg_->degree;
        case PolicyKind::srg_c2:
            return 1.0 / srg_->degree + 1.0 / ((double(srg_->n_vertices) - 1.0) * srg_->mu_common);
        case PolicyKind::srg_c2_prime: return 1.0 / double(srg_->degree - srg_->mu_common);
        case PolicyKind::suff_complete_critical: {
            const double f0 = nl_.f(std::norm(c[0]) / double(cg_.class_sizes[0]));
            const double f1 = nl_.f(std::norm(c[1]) / double(cg_.class_sizes[1]));
            return policy_.gamma_linear * (1.0 + nl_.g * f0 - nl_.g * f1);
        }
        case PolicyKind::numeric_table: {
            const auto& tab = policy_.table;
            if (t <= tab.front().first) return tab.front().second;
            if (t >= tab.back().first) return tab.back().second;
            auto it = std::upper_bound(tab.begin(), tab.end(), t,
                                       [](double x, const std::pair<double, double>& e) { return x < e.first; });
            const auto& hi = *it;
            const auto& lo = *(it - 1);
            return lo.second + (hi.second - lo.second) * (t - lo.first) / (hi.first - lo.first);
        }
    }
    return 0.0;
}

void SearchSystem::apply_effective(double gamma, const std::vector<cplx>& c, const std::vector<double>& v,
                                   std::vector<cplx>& out) const {
    const int m = cg_.size();
    out.assign(m, cplx(0.0, 0.0));
    for (int i = 0; i < m; ++i) {
        cplx acc(0.0, 0.0);
        for (int j = 0; j < m; ++j) acc += w_(i, j) * c[j];
        out[i] = -gamma * acc - v[i] * c[i];
    }
    for (int i = 0; i < cg_.n_marked_classes; ++i) out[i] -= c[i];
}

void SearchSystem::derivative(double t, const std::vector<cplx>& c, std::vector<cplx>& dcdt) const {
    const double g = gamma(c, t);
    apply_effective(g, c, self_potential(c), dcdt);
    for (auto& z : dcdt) z = cplx(z.imag(), -z.real());  // multiply by -i
}

double SearchSystem::success_rate(double t, const std::vector<cplx>& c) const {
    std::vector<cplx> hc;
    apply_effective(gamma(c, t), c, self_potential(c), hc);
    double r = 0.0;
    for (int i = 0; i < cg_.n_marked_classes; ++i) r += 2.0 * (std::conj(c[i]) * hc[i]).imag();
    return r;
}

double SearchSystem::success(const std::vector<cplx>& c) const {
    double p = 0.0;
    for (int i = 0; i < cg_.n_marked_classes; ++i) p += std::norm(c[i]);
    return p;
}

std::vector<double> self_potential(const SubspaceState& state, const CollapsedGraph& cg, const Nonlinearity& nl) {
    SearchSystem sys(cg, nl, GammaPolicy::fixed(0.0));
    return sys.self_potential(state.c);
}

double gamma_eval(const GammaPolicy& policy, const SubspaceState& state, const SearchSystem& system) {
    SearchSystem s(system.collapsed(), system.nonlinearity(), policy, system.walk(), system.srg());
    return s.gamma(state.c, state.t);
}

double Trajectory::max_norm_error() const {
    double m = 0.0;
    for (double e : norm_error) m = std::max(m, e);
    return m;
}

std::vector<double> Trajectory::column(std::size_t j) const {
    std::vector<double> out(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) out[i] = probs[i][j];
    return out;
}

static void to_real(const std::vector<cplx>& c, std::vector<double>& y) {
    y.resize(2 * c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        y[2 * i] = c[i].real();
        y[2 * i + 1] = c[i].imag();
    }
}

static void to_complex(const std::vector<double>& y, std::vector<cplx>& c) {
    c.resize(y.size() / 2);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = cplx(y[2 * i], y[2 * i + 1]);
}

std::vector<cplx> DenseSolution::state(double t) const {
    if (steps_.empty()) throw std::logic_error("DenseSolution is empty");
    auto it = std::lower_bound(steps_.begin(), steps_.end(), t,
                               [](const DenseStep& s, double x) { return s.t1() < x; });
    if (it == steps_.end()) --it;
    std::vector<double> y;
    it->interpolate(t, y);
    std::vector<cplx> c;
    to_complex(y, c);
    return c;
}

double DenseSolution::success(double t) const { return system_->success(state(t)); }

double DenseSolution::success_rate(double t) const { return system_->success_rate(t, state(t)); }

std::vector<double> sample_times(double t_end, double dt) {
    if (!(dt > 0.0) || !(t_end > 0.0)) throw std::invalid_argument("sample_times: need dt > 0 and t_end > 0");
    std::vector<double> ts;
    const long n = long(std::floor(t_end / dt + 1e-9));
    for (long i = 0; i <= n; ++i) ts.push_back(std::min(double(i) * dt, t_end));
    if (t_end - ts.back() > 1e-9 * t_end) ts.push_back(t_end);
    return ts;
}

Trajectory integrate(const SearchSystem& system, double t_end, const IntegrateControls& ctl, DenseSolution* dense,
                     bool keep_amplitudes) {
    if (!(t_end > 0.0)) throw std::invalid_argument("integrate: t_end must be positive");
    const auto times = sample_times(t_end, ctl.sample_dt);
    Trajectory traj;
    std::size_t next = 0;
    std::vector<cplx> c;

    auto record = [&](double t, const std::vector<cplx>& cc) {
        traj.t.push_back(t);
        std::vector<double> p(cc.size());
        double norm = 0.0;
        for (std::size_t i = 0; i < cc.size(); ++i) {
            p[i] = std::norm(cc[i]);
            norm += p[i];
        }
        traj.probs.push_back(std::move(p));
        traj.gamma.push_back(system.gamma(cc, t));
        traj.norm_error.push_back(std::abs(norm - 1.0));
        if (keep_amplitudes) traj.amplitudes.push_back(cc);
    };

    const auto c0 = system.initial_state();
    record(0.0, c0);
    next = 1;

    std::vector<double> y0;
    to_real(c0, y0);
    if (dense) *dense = DenseSolution(&system);

    OdeControls oc;
    oc.rel_tol = ctl.rel_tol;
    oc.abs_tol = ctl.abs_tol;
    if (ctl.max_step > 0.0) oc.max_step = ctl.max_step;

    std::vector<cplx> cin, cout;
    OdeRhs rhs = [&](double t, const std::vector<double>& y, std::vector<double>& dy) {
        to_complex(y, cin);
        system.derivative(t, cin, cout);
        to_real(cout, dy);
    };
    std::vector<double> ybuf;
    StepObserver obs = [&](const DenseStep& step) {
        if (dense) dense->push(step);
        while (next < times.size() && times[next] <= step.t1() + 1e-12 * std::max(1.0, step.t1())) {
            step.interpolate(times[next], ybuf);
            to_complex(ybuf, c);
            record(times[next], c);
            ++next;
        }
    };
    dopri5(rhs, 0.0, y0, t_end, oc, obs);
    return traj;
}

Trajectory integrate(const SearchConfig& config, double t_end, const IntegrateControls& controls) {
    auto system = SearchSystem::from_config(config);
    auto traj = integrate(system, t_end, controls);
    traj.config_hash = config_hash(config);
    return traj;
}

std::optional<Peak> first_peak(const DenseSolution& dense, double resolution, double min_height) {
    const double t0 = dense.t_begin(), t1 = dense.t_end();
    if (!(resolution > 0.0)) throw std::invalid_argument("first_peak: resolution must be positive");
    double ta = t0, ra = dense.success_rate(ta);
    while (ta < t1) {
        const double tb = std::min(ta + resolution, t1);
        const double rb = dense.success_rate(tb);
        if (ra > 0.0 && rb <= 0.0) {
            double lo = ta, hi = tb;
            for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
                const double mid = 0.5 * (lo + hi);
                if (dense.success_rate(mid) > 0.0) lo = mid;
                else hi = mid;
            }
            Peak p{0.5 * (lo + hi), 0.0};
            p.height = dense.success(p.t);
            if (p.height >= min_height) return p;
        }
        ta = tb;
        ra = rb;
    }
    return std::nullopt;
}

double peak_width(const DenseSolution& dense, const Peak& peak, double eps, double resolution) {
    const double target = 1.0 - eps;
    if (peak.height < target) throw std::runtime_error("peak_width: peak does not reach the height 1 - eps");
    auto crossing = [&](double dir) {
        double inside = peak.t, outside = peak.t;
        while (true) {
            outside = inside + dir * resolution;
            if (outside < dense.t_begin() || outside > dense.t_end())
                throw std::runtime_error("peak_width: crossing lies outside the integrated window");
            if (dense.success(outside) < target) break;
            inside = outside;
        }
        for (int it = 0; it < 200 && std::abs(outside - inside) > 1e-14 * std::max(1.0, std::abs(inside)); ++it) {
            const double mid = 0.5 * (inside + outside);
            if (dense.success(mid) >= target) inside = mid;
            else outside = mid;
        }
        return 0.5 * (inside + outside);
    };
    return crossing(+1.0) - crossing(-1.0);
}

std::string describe(const SearchConfig& cfg) {
    nlohmann::ordered_json j;
    if (cfg.srg) {
        j["srg"] = {cfg.srg->n_vertices, cfg.srg->degree, cfg.srg->lambda_common, cfg.srg->mu_common};
    } else {
        j["family"] = to_string(cfg.family.family);
        j["size_param"] = cfg.family.size_param;
    }
    j["marked_count"] = cfg.marked_count;
    j["nonlinearity"] = to_string(cfg.nl.kind);
    j["g"] = cfg.nl.g;
    j["policy"] = to_string(cfg.policy.kind);
    if (cfg.policy.kind == PolicyKind::fixed) j["gamma0"] = cfg.policy.gamma0;
    if (cfg.policy.kind == PolicyKind::suff_complete_critical) j["gamma_linear"] = cfg.policy.gamma_linear;
    if (cfg.policy.kind == PolicyKind::numeric_table) j["table"] = cfg.policy.table;
    j["walk"] = to_string(cfg.walk);
    return j.dump();
}

std::string config_hash(const SearchConfig& cfg) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : describe(cfg)) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
    const std::size_t m = traj.probs.empty() ? 0 : traj.probs.front().size();
    out << 't';
    for (std::size_t j = 0; j < m; ++j) out << ",p" << j;
    out << ",gamma,norm_err\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out << fmt_num(traj.t[i]);
        for (double p : traj.probs[i]) out << ',' << fmt_num(p);
        out << ',' << fmt_num(traj.gamma[i]) << ',' << fmt_num(traj.norm_error[i]) << '\n';
    }
}

}  // namespace nlqs
