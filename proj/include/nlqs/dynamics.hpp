#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nlqs/graphs.hpp"
#include "nlqs/hamiltonian.hpp"
#include "nlqs/ode.hpp"

namespace nlqs {

using cplx = std::complex<double>;

enum class NlKind { linear, cubic, cubic_quintic, loglinear, custom };

std::string to_string(NlKind k);
NlKind parse_nl_kind(const std::string& s);

// log p is evaluated at max(p, kLogFloor) so that exact zeros stay finite.
inline constexpr double kLogFloor = 1e-300;

struct Nonlinearity {
    NlKind kind = NlKind::linear;
    double g = 0.0;
    std::function<double(double)> custom_f;
    std::function<double(double)> custom_f_prime;

    double f(double p) const;
    double f_prime(double p) const;

    static Nonlinearity linear() { return {}; }
    static Nonlinearity cubic(double g) { return {NlKind::cubic, g, {}, {}}; }
    static Nonlinearity cubic_quintic(double g) { return {NlKind::cubic_quintic, g, {}, {}}; }
    static Nonlinearity loglinear(double g) { return {NlKind::loglinear, g, {}, {}}; }
    static Nonlinearity custom(double g, std::function<double(double)> f, std::function<double(double)> fp) {
        return {NlKind::custom, g, std::move(f), std::move(fp)};
    }
    static Nonlinearity make(NlKind kind, double g);
};

enum class PolicyKind {
    fixed,
    cubic_critical,
    general_critical,
    srg_c1,
    srg_c2,
    srg_c2_prime,
    suff_complete_critical,
    numeric_table
};

std::string to_string(PolicyKind k);
PolicyKind parse_policy_kind(const std::string& s);

struct GammaPolicy {
    PolicyKind kind = PolicyKind::general_critical;
    double gamma0 = 0.0;        // fixed
    double gamma_linear = 0.0;  // suff_complete_critical
    std::vector<std::pair<double, double>> table;  // numeric_table, (t, gamma) sorted by t

    static GammaPolicy fixed(double gamma) { return {PolicyKind::fixed, gamma, 0.0, {}}; }
    static GammaPolicy of(PolicyKind k) { return {k, 0.0, 0.0, {}}; }
    static GammaPolicy suff_complete(double gamma_l) { return {PolicyKind::suff_complete_critical, 0.0, gamma_l, {}}; }
};

struct SearchConfig {
    FamilySpec family{Family::complete, 2};
    std::optional<SrgParams> srg;  // when set, the SRG collapse is built from these parameters
    int marked_count = 1;
    Nonlinearity nl;
    GammaPolicy policy;
    WalkForm walk = WalkForm::adjacency;
};

struct SubspaceState {
    double t = 0.0;
    std::vector<cplx> c;
};

// A fully resolved reduced system: collapse, walk operator and evaluation context.
class SearchSystem {
public:
    SearchSystem(CollapsedGraph cg, Nonlinearity nl, GammaPolicy policy, WalkForm walk = WalkForm::adjacency,
                 std::optional<SrgParams> srg = std::nullopt);
    static SearchSystem from_config(const SearchConfig& config);

    const CollapsedGraph& collapsed() const { return cg_; }
    const Nonlinearity& nonlinearity() const { return nl_; }
    const GammaPolicy& policy() const { return policy_; }
    WalkForm walk() const { return walk_; }
    const std::optional<SrgParams>& srg() const { return srg_; }
    double n_vertices() const { return n_; }
    double marked_count() const { return k_; }
    int dim() const { return cg_.size(); }

    std::vector<cplx> initial_state() const;

    // g f(|c_i|^2/|m_i|) per class
    std::vector<double> self_potential(const std::vector<cplx>& c) const;
    double gamma(const std::vector<cplx>& c, double t) const;
    // dc/dt = -i [H0 - V] c
    void derivative(double t, const std::vector<cplx>& c, std::vector<cplx>& dcdt) const;
    // d/dt of the total marked-class probability
    double success_rate(double t, const std::vector<cplx>& c) const;
    double success(const std::vector<cplx>& c) const;

private:
    void apply_effective(double gamma, const std::vector<cplx>& c, const std::vector<double>& v,
                         std::vector<cplx>& out) const;

    CollapsedGraph cg_;
    Matrix w_;
    Nonlinearity nl_;
    GammaPolicy policy_;
    WalkForm walk_;
    std::optional<SrgParams> srg_;
    double n_ = 0.0;
    double k_ = 0.0;
};

std::vector<double> self_potential(const SubspaceState& state, const CollapsedGraph& cg, const Nonlinearity& nl);
double gamma_eval(const GammaPolicy& policy, const SubspaceState& state, const SearchSystem& system);

struct IntegrateControls {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.0;  // 0 = unlimited
    double sample_dt = 0.01;
};

struct Trajectory {
    std::vector<double> t;
    std::vector<std::vector<double>> probs;  // probs[sample][class or vertex]
    std::vector<double> gamma;
    std::vector<double> norm_error;
    std::vector<std::vector<cplx>> amplitudes;  // kept when requested
    std::string config_hash;

    std::size_t size() const { return t.size(); }
    double max_norm_error() const;
    std::vector<double> column(std::size_t j) const;
};

// Dense record of the accepted steps, for locating peaks and widths between samples.
class DenseSolution {
public:
    DenseSolution() = default;
    explicit DenseSolution(const SearchSystem* system) : system_(system) {}
    void push(const DenseStep& s) { steps_.push_back(s); }
    double t_begin() const { return steps_.empty() ? 0.0 : steps_.front().t0; }
    double t_end() const { return steps_.empty() ? 0.0 : steps_.back().t1(); }
    std::vector<cplx> state(double t) const;
    double success(double t) const;
    double success_rate(double t) const;
    std::size_t n_steps() const { return steps_.size(); }

private:
    const SearchSystem* system_ = nullptr;
    std::vector<DenseStep> steps_;
};

Trajectory integrate(const SearchSystem& system, double t_end, const IntegrateControls& controls,
                     DenseSolution* dense = nullptr, bool keep_amplitudes = false);
Trajectory integrate(const SearchConfig& config, double t_end, const IntegrateControls& controls);

// Sample times 0, dt, 2dt, ... up to t_end (t_end appended if not on the grid).
std::vector<double> sample_times(double t_end, double dt);

struct Peak {
    double t = 0.0;
    double height = 0.0;
};

// First local maximum of the success probability above `min_height`, resolved to the root
// of its time derivative. Scans with spacing `resolution`.
std::optional<Peak> first_peak(const DenseSolution& dense, double resolution, double min_height = 0.0);
// Width of the peak at height 1 - eps, bisecting both crossings around `peak`.
double peak_width(const DenseSolution& dense, const Peak& peak, double eps, double resolution);

std::string config_hash(const SearchConfig& config);
std::string describe(const SearchConfig& config);

void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

}  // namespace nlqs
