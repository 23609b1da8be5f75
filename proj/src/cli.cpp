#include "nlqs/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "nlqs/closedform.hpp"
#include "nlqs/dynamics.hpp"
#include "nlqs/format.hpp"
#include "nlqs/graphs.hpp"
#include "nlqs/manifest.hpp"
#include "nlqs/oracle.hpp"
#include "nlqs/resources.hpp"
#include "nlqs/spectral.hpp"

namespace nlqs::cli {

namespace {

using json = nlohmann::ordered_json;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SearchOpts {
    std::string family = "complete";
    int n = 0;
    std::string srg;
    int marked = 1;
    std::string nl = "linear";
    double g = 0.0;
    std::string policy = "auto";
    double gamma = kNaN;
    double gamma_linear = kNaN;
    std::string walk = "adjacency";
};

struct RunOpts {
    double t_end = 0.0;  // 0 picks a horizon from the expected runtime
    double dt = 0.01;
    double rtol = 1e-10;
    double atol = 1e-12;
    double max_step = 0.0;
    double eps = kDefaultEpsilon;
};

struct OutOpts {
    std::string out;
    std::string manifest;
    std::string config;

    std::string manifest_path() const { return manifest.empty() ? out + ".manifest.json" : manifest; }
};

void add_search_options(CLI::App* app, SearchOpts& o) {
    app->add_option("--family", o.family, "complete|paley|square_lattice|latin_square|triangular|hypercube|petersen");
    app->add_option("--n", o.n, "family size parameter (N for complete, q for paley, t for lattices, n for hypercube)");
    app->add_option("--srg", o.srg, "strongly regular parameters N,k,lambda,mu (overrides --family)");
    app->add_option("--marked", o.marked, "number of marked vertices");
    app->add_option("--nl", o.nl, "linear|cubic|cubic_quintic|loglinear");
    app->add_option("--g-coeff", o.g, "nonlinearity coefficient g");
    app->add_option("--policy", o.policy,
                    "auto|fixed|cubic_critical|general_critical|srg_c1|srg_c2|srg_c2_prime|suff_complete_critical");
    app->add_option("--gamma", o.gamma, "jumping rate for the fixed policy");
    app->add_option("--gamma-linear", o.gamma_linear, "linear critical gamma for suff_complete_critical");
    app->add_option("--walk", o.walk, "adjacency|projector");
}

void add_run_options(CLI::App* app, RunOpts& r) {
    app->add_option("--t-end", r.t_end, "integration horizon (default: from the expected runtime)");
    app->add_option("--dt", r.dt, "sample spacing");
    app->add_option("--rtol", r.rtol, "relative tolerance");
    app->add_option("--atol", r.atol, "absolute tolerance");
    app->add_option("--max-step", r.max_step, "largest step (0 = unlimited)");
    app->add_option("--eps", r.eps, "peak width is measured at height 1 - eps");
}

void add_out_options(CLI::App* app, OutOpts& o, const std::string& default_out) {
    o.out = default_out;
    app->add_option("--out", o.out, "output data file");
    app->add_option("--manifest", o.manifest, "manifest path (default: <out>.manifest.json)");
    app->add_option("--config", o.config, "JSON file whose keys mirror the long flags");
}

SrgParams parse_srg(const std::string& s) {
    std::vector<int> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            v.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            throw UsageError("--srg expects four integers N,k,lambda,mu");
        }
    }
    if (v.size() != 4) throw UsageError("--srg expects four integers N,k,lambda,mu");
    return {v[0], v[1], v[2], v[3]};
}

bool same_params(const SrgParams& a, const SrgParams& b) {
    return a.n_vertices == b.n_vertices && a.degree == b.degree && a.lambda_common == b.lambda_common &&
           a.mu_common == b.mu_common;
}

// A buildable family member with these parameters, if one is known.
std::optional<FamilySpec> family_for_srg(const SrgParams& p) {
    const int n = p.n_vertices;
    const int t2 = int(std::lround(std::sqrt(double(n))));
    const int t3 = int(std::lround((1.0 + std::sqrt(1.0 + 8.0 * n)) / 2.0));
    const std::vector<FamilySpec> candidates{{Family::petersen, 0},      {Family::paley, n},
                                             {Family::square_lattice, t2}, {Family::latin_square, t2},
                                             {Family::triangular, t3}};
    for (const auto& c : candidates) {
        try {
            auto q = family_srg_params(c);
            if (q && same_params(*q, p)) return c;
        } catch (const std::exception&) {
        }
    }
    return std::nullopt;
}

FamilySpec family_spec(const SearchOpts& o) {
    const Family f = parse_family(o.family);
    if (f != Family::petersen && o.n <= 0) throw UsageError("--n is required for family " + o.family);
    return {f, f == Family::petersen ? 0 : o.n};
}

struct Resolved {
    SearchConfig config;
    json describe;
    double n_vertices = 0.0;
    double k = 0.0;
};

double numeric_linear_gamma(const CollapsedGraph& cg, WalkForm walk, json* note) {
    const double deg = std::max(1.0, cg.degree);
    const auto r = find_gamma_numeric(cg, 0.25 / deg, 4.0 / deg, 400, walk);
    if (note) {
        (*note)["gamma_linear_numeric"] = r.gamma;
        (*note)["gamma_search_imbalance"] = r.imbalance;
        if (!r.warning.empty()) (*note)["gamma_search_warning"] = r.warning;
    }
    return r.gamma;
}

Resolved resolve(const SearchOpts& o) {
    Resolved r;
    SearchConfig& c = r.config;
    if (!o.srg.empty()) {
        c.srg = parse_srg(o.srg);
        if (!srg_check(*c.srg).feasible) throw UsageError("--srg parameters are not feasible");
    } else {
        c.family = family_spec(o);
    }
    if (o.marked < 1) throw UsageError("--marked must be at least 1");
    c.marked_count = o.marked;
    c.nl = Nonlinearity::make(parse_nl_kind(o.nl), o.g);
    c.walk = parse_walk_form(o.walk);

    const CollapsedGraph cg = c.srg ? collapse_analytic(*c.srg) : collapse_analytic(c.family, c.marked_count);
    r.n_vertices = double(cg.n_vertices());
    r.k = double(cg.marked_count());
    const bool srg_like = c.srg.has_value() || family_srg_params(c.family).has_value();

    std::string pol = o.policy;
    std::replace(pol.begin(), pol.end(), '-', '_');
    json extra = json::object();
    if (pol == "auto") {
        if (!std::isnan(o.gamma)) pol = "fixed";
        else if (!c.srg && c.family.family == Family::complete) pol = "general_critical";
        else if (srg_like) pol = "srg_c1";
        else pol = "suff_complete_critical";
    }
    const PolicyKind kind = parse_policy_kind(pol);
    switch (kind) {
        case PolicyKind::fixed:
            if (std::isnan(o.gamma)) throw UsageError("the fixed policy needs --gamma");
            c.policy = GammaPolicy::fixed(o.gamma);
            break;
        case PolicyKind::suff_complete_critical:
            c.policy = GammaPolicy::suff_complete(std::isnan(o.gamma_linear) ? numeric_linear_gamma(cg, c.walk, &extra)
                                                                            : o.gamma_linear);
            break;
        case PolicyKind::numeric_table: throw UsageError("the numeric_table policy is not available from flags");
        default: c.policy = GammaPolicy::of(kind);
    }
    SearchSystem::from_config(c);  // validates the combination

    r.describe = json::parse(describe(c));
    r.describe["n_vertices"] = r.n_vertices;
    r.describe["marked_vertices"] = r.k;
    if (r.k < r.n_vertices) r.describe["G"] = o.g / (r.k * (r.n_vertices - r.k));
    for (auto& [key, val] : extra.items()) r.describe[key] = val;
    return r;
}

bool critical_on_complete(const SearchConfig& c) {
    return !c.srg && c.family.family == Family::complete &&
           (c.policy.kind == PolicyKind::general_critical || c.policy.kind == PolicyKind::cubic_critical);
}

double auto_t_end(const Resolved& r) {
    const double linear = std::numbers::pi * std::sqrt(r.n_vertices / r.k) / 2.0;
    if (critical_on_complete(r.config)) {
        try {
            return 1.25 * general_runtime(r.config.nl, r.n_vertices, r.k, 1e-9);
        } catch (const std::exception&) {
        }
    }
    return 1.5 * linear;
}

IntegrateControls controls(const RunOpts& r) {
    IntegrateControls c;
    c.rel_tol = r.rtol;
    c.abs_tol = r.atol;
    c.max_step = r.max_step;
    c.sample_dt = r.dt;
    return c;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    return f;
}

json peak_summary(const DenseSolution& dense, double resolution, double eps) {
    json j = json::object();
    const auto pk = first_peak(dense, resolution);
    if (!pk) {
        j["peak_found"] = false;
        return j;
    }
    j["peak_found"] = true;
    j["peak_t"] = pk->t;
    j["peak_height"] = pk->height;
    if (pk->height >= 1.0 - eps) {
        try {
            j["width"] = peak_width(dense, *pk, eps, resolution);
        } catch (const std::exception& e) {
            j["width_note"] = e.what();
        }
    }
    return j;
}

// ---- subcommands -------------------------------------------------------------------------

struct Context {
    RunManifest manifest;
};

int cmd_simulate(const SearchOpts& so, const RunOpts& ro, const OutOpts& oo, Context& ctx) {
    const Resolved r = resolve(so);
    const double t_end = ro.t_end > 0.0 ? ro.t_end : auto_t_end(r);
    const SearchSystem sys = SearchSystem::from_config(r.config);
    DenseSolution dense;
    Trajectory traj = integrate(sys, t_end, controls(ro), &dense);
    traj.config_hash = config_hash(r.config);
    {
        auto f = open_out(oo.out);
        write_trajectory_csv(traj, f);
    }
    ctx.manifest.config = r.describe;
    ctx.manifest.config["t_end"] = t_end;
    ctx.manifest.config["sample_dt"] = ro.dt;
    ctx.manifest.config["rtol"] = ro.rtol;
    ctx.manifest.config["atol"] = ro.atol;
    ctx.manifest.config["config_hash"] = traj.config_hash;
    ctx.manifest.outputs.push_back(oo.out);
    ctx.manifest.results = peak_summary(dense, ro.dt, ro.eps);
    ctx.manifest.results["max_norm_error"] = traj.max_norm_error();
    std::cout << ctx.manifest.results.dump() << '\n';
    return kExitOk;
}

struct ClosedFormOpts {
    std::string op;
    double n = kNaN, k = 1.0, g = 0.0, t = kNaN, x = kNaN;
    double eps = kDefaultEpsilon;
    double gamma = kNaN;
    double lambda = 0.0, kappa = 0.0, sigma = 0.0;
    double runtime = kNaN, width = kNaN;
    std::string kind = "exact";
    std::string nl = "cubic";
    std::string srg;
    std::string family = "complete";
    std::string clock = "entangled";
    std::string convention = "g";
};

double need(double v, const char* flag) {
    if (std::isnan(v)) throw UsageError(std::string("this operation needs ") + flag);
    return v;
}

json closed_form_eval(const ClosedFormOpts& o) {
    json res;
    const std::string& op = o.op;
    auto params = [&] {
        return CompleteSearchParams{need(o.n, "--n"), o.k, o.g, o.eps};
    };
    auto nl = [&] { return Nonlinearity::make(parse_nl_kind(o.nl), o.g); };
    if (op == "linear_prob") {
        res["value"] = linear_prob(need(o.n, "--n"), need(o.t, "--t"));
    } else if (op == "cubic_prob") {
        res["value"] = cubic_prob(params(), need(o.t, "--t"));
    } else if (op == "cubic_time_of_prob") {
        res["value"] = cubic_time_of_prob(params(), need(o.x, "--x"));
    } else if (op == "cubic_rate") {
        res["value"] = cubic_rate(params(), need(o.x, "--x"));
    } else if (op == "cubic_runtime") {
        res["value"] = cubic_runtime(params());
    } else if (op == "cubic_width") {
        if (o.kind != "exact" && o.kind != "leading") throw UsageError("--kind must be exact or leading");
        res["value"] = cubic_width(params(), o.kind == "exact" ? WidthKind::exact : WidthKind::leading);
    } else if (op == "general_runtime") {
        res["value"] = general_runtime(nl(), need(o.n, "--n"), o.k);
    } else if (op == "general_time_of_prob") {
        res["value"] = general_time_of_prob(nl(), need(o.n, "--n"), o.k, need(o.x, "--x"));
    } else if (op == "general_width_leading") {
        res["value"] = general_width_leading(nl(), need(o.n, "--n"), o.k, o.eps);
    } else if (op == "cq_coeffs") {
        const auto c = cq_coeffs(need(o.n, "--n"), o.k, o.g);
        res = {{"a", c.a}, {"b", c.b}, {"c", c.c}, {"Delta", c.Delta}, {"Sigma", c.Sigma}, {"Xi", c.Xi}};
    } else if (op == "cq_runtime") {
        const auto c = cq_runtime_detail(need(o.n, "--n"), o.k, o.g);
        res["value"] = c.value;
        res["used_quadrature"] = c.used_quadrature;
        if (!c.warning.empty()) res["warning"] = c.warning;
    } else if (op == "log_runtime_numeric") {
        res["value"] = log_runtime_numeric(need(o.n, "--n"), o.k, o.g);
    } else if (op == "log_runtime_bounds") {
        const auto b = log_runtime_bounds(need(o.n, "--n"), o.k, o.g);
        res = {{"lower", b.lower},
               {"lower_elementary", b.lower_elementary},
               {"upper_tight", b.upper_tight},
               {"upper_loose", b.upper_loose},
               {"tight_from_quadrature", b.tight_from_quadrature}};
    } else if (op == "log_width_lower_bound") {
        res["value"] = log_width_lower_bound(need(o.n, "--n"), o.k, o.g, o.eps);
        res["semantics"] = "lower bound, scaling estimate";
    } else if (op == "exp_integral_e1") {
        const double x = need(o.x, "--x");
        res["value"] = exp_integral_e1(x);
        res["lower_bound"] = 0.5 * std::exp(-x) * std::log(1.0 + 2.0 / x);
        res["upper_bound"] = std::exp(-x) * std::log(1.0 + 1.0 / x);
    } else if (op == "repulsive_stationary_points") {
        const double n = need(o.n, "--n");
        const double G = o.g / (o.k * (n - o.k));
        const auto s = repulsive_stationary_points(n, o.k, G);
        res = {{"G", G}, {"x_min", s.x_min}, {"x_max", s.x_max}, {"x_stat", s.x_stat}, {"blocking", s.blocking}};
    } else if (op == "srg_prediction") {
        if (o.srg.empty()) throw UsageError("srg_prediction needs --srg");
        const SrgParams p = parse_srg(o.srg);
        const auto s = std::isnan(o.gamma) ? srg_prediction(p) : srg_prediction(p, o.gamma);
        res = {{"regime", to_string(s.regime)},       {"norm_A", s.norm_A},
               {"e_plus", s.e_plus},                  {"e_minus", s.e_minus},
               {"amplitude", s.amplitude},            {"frequency", s.frequency},
               {"predicted_peak", s.predicted_peak()}, {"gap_case1", s.gap_case1},
               {"runtime_case1", s.runtime_case1}};
        if (!std::isnan(o.t)) res["predicted_prob"] = s.predicted_prob(o.t);
    } else if (op == "suff_complete_probs") {
        SearchOpts so;
        so.family = o.family;
        so.n = int(need(o.n, "--n"));
        const auto cg = collapse_analytic(family_spec(so), 1);
        res["value"] = suff_complete_probs(cg, need(o.t, "--t"));
    } else if (op == "space_requirement" || op == "st_products") {
        const ResourceModel m{need(o.runtime, "--runtime"), need(o.width, "--width"), need(o.n, "--n"),
                              parse_clock_mode(o.clock)};
        const auto st = st_products(m);
        res = {{"S", space_requirement(m)}, {"ST", st.st}, {"ST2", st.st2}};
    } else if (op == "n0_lower_bound") {
        ScalingExponents e{o.kappa, o.lambda, o.sigma,
                           o.convention == "G" ? KappaConvention::G_coeff : KappaConvention::g_coeff};
        const auto b = n0_lower_bound(parse_nl_kind(o.nl), e, need(o.n, "--n"));
        res = {{"value", b.value},
               {"scaling", b.scaling.label()},
               {"regime", b.regime},
               {"expression", b.expression},
               {"semantics", "scaling estimate"}};
    } else if (op == "optimize_exponent") {
        const auto r = optimize_exponent(parse_nl_kind(o.nl), o.lambda);
        res = {{r.parameter + "_star", r.kappa_star},
               {"st_label", r.st_label},
               {"regime", r.scaling.regime},
               {"convention", to_string(r.convention)},
               {"at_grid_boundary", r.at_grid_boundary}};
    } else {
        throw UsageError("unknown closed-form operation: " + op);
    }
    return res;
}

int cmd_closed_form(const ClosedFormOpts& co, const OutOpts& oo, Context& ctx) {
    json out;
    out["op"] = co.op;
    out["inputs"] = {{"n", co.n},          {"k", co.k},         {"g", co.g},      {"t", co.t},
                     {"x", co.x},          {"eps", co.eps},     {"nl", co.nl},    {"kind", co.kind},
                     {"srg", co.srg},      {"gamma", co.gamma}, {"lambda", co.lambda},
                     {"kappa", co.kappa},  {"sigma", co.sigma}};
    if (!std::isnan(co.n) && co.k < co.n) out["inputs"]["G"] = co.g / (co.k * (co.n - co.k));
    out["result"] = closed_form_eval(co);
    {
        auto f = open_out(oo.out);
        f << out.dump(2) << '\n';
    }
    ctx.manifest.config = out["inputs"];
    ctx.manifest.config["op"] = co.op;
    ctx.manifest.outputs.push_back(oo.out);
    ctx.manifest.results = out["result"];
    std::cout << out["result"].dump() << '\n';
    return kExitOk;
}

struct SweepOpts {
    std::vector<int> n_values;
    std::vector<double> g_values;
    std::vector<double> gamma_values;
    double k_exponent = kNaN;
    std::string g_rule = "fixed";
    double g_exponent = 0.0;
    std::string mode = "integrate";
    int jobs = 1;
};

struct SweepPoint {
    int n = 0;
    double g_param = 0.0;
    double gamma = kNaN;
};

double rule_g(const SweepOpts& sw, double c, double n, double k) {
    if (sw.g_rule == "fixed") return c;
    if (sw.g_rule == "power") return c * std::pow(n, sw.g_exponent);
    if (sw.g_rule == "ratio-log") return c * std::pow(n / k, sw.g_exponent) / std::log(n / k);
    if (sw.g_rule == "power-log") return c * std::pow(n, sw.g_exponent) / std::log(n / k);
    if (sw.g_rule == "k-complement") return c * k * (n - k);
    throw UsageError("unknown --g-rule " + sw.g_rule);
}

std::string sweep_row(const SearchOpts& base, const RunOpts& ro, const SweepOpts& sw, const SweepPoint& pt) {
    SearchOpts so = base;
    so.n = pt.n;
    const double size = double(family_vertex_count(family_spec(so)));
    if (!std::isnan(sw.k_exponent)) so.marked = std::max(1, int(std::lround(std::pow(size, sw.k_exponent))));
    so.g = rule_g(sw, pt.g_param, size, so.marked);
    if (!std::isnan(pt.gamma)) {
        so.policy = "fixed";
        so.gamma = pt.gamma;
    }
    const Resolved r = resolve(so);
    const SearchSystem sys = SearchSystem::from_config(r.config);
    const double gamma0 = sys.gamma(sys.initial_state(), 0.0);
    double t_star = kNaN, peak = kNaN, width = kNaN;
    if (sw.mode == "quadrature") {
        if (!critical_on_complete(r.config))
            throw UsageError("quadrature mode needs the complete graph with a critical policy");
        t_star = general_runtime(r.config.nl, r.n_vertices, r.k, 1e-10);
        peak = 1.0;
        width = r.config.nl.kind == NlKind::loglinear
                    ? log_width_lower_bound(r.n_vertices, r.k, so.g, ro.eps)
                    : general_width_leading(r.config.nl, r.n_vertices, r.k, ro.eps);
    } else if (sw.mode == "integrate") {
        const double t_end = ro.t_end > 0.0 ? ro.t_end : auto_t_end(r);
        DenseSolution dense;
        IntegrateControls ctl = controls(ro);
        ctl.sample_dt = t_end;  // only the dense record is needed here
        integrate(sys, t_end, ctl, &dense);
        const json pk = peak_summary(dense, ro.dt, ro.eps);
        if (pk["peak_found"].get<bool>()) {
            t_star = pk["peak_t"].get<double>();
            peak = pk["peak_height"].get<double>();
            if (pk.contains("width")) width = pk["width"].get<double>();
        }
    } else {
        throw UsageError("--mode must be integrate or quadrature");
    }
    const double G = r.k < r.n_vertices ? so.g / (r.k * (r.n_vertices - r.k)) : kNaN;
    std::ostringstream os;
    os << fmt_num(r.n_vertices) << ',' << fmt_num(r.k) << ',' << fmt_num(so.g) << ',' << fmt_num(G) << ','
       << fmt_num(gamma0) << ',' << fmt_num(t_star) << ',' << fmt_num(peak) << ',' << fmt_num(width);
    return os.str();
}

int cmd_sweep(const SearchOpts& so, const RunOpts& ro, const SweepOpts& sw, const OutOpts& oo, Context& ctx) {
    if (sw.n_values.empty()) throw UsageError("sweep needs --n-values");
    if (sw.jobs < 1) throw UsageError("--jobs must be at least 1");
    std::vector<double> gs = sw.g_values.empty() ? std::vector<double>{sw.g_rule == "fixed" ? so.g : 1.0}
                                                 : sw.g_values;
    std::vector<SweepPoint> points;
    for (int n : sw.n_values)
        for (double g : gs) {
            if (sw.gamma_values.empty()) points.push_back({n, g, kNaN});
            else
                for (double gm : sw.gamma_values) points.push_back({n, g, gm});
        }

    // workers append "index,row" lines to private staging files, merged in index order afterwards
    const int jobs = std::min<int>(sw.jobs, int(points.size()));
    std::vector<std::string> staging;
    for (int j = 0; j < jobs; ++j) staging.push_back(oo.out + ".part" + std::to_string(j));
    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::string first_error;
    bool usage_error = false;
    auto worker = [&](int j) {
        std::ofstream part(staging[j]);
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= points.size()) break;
            try {
                part << i << ',' << sweep_row(so, ro, sw, points[i]) << '\n';
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (first_error.empty()) {
                    first_error = e.what();
                    usage_error = dynamic_cast<const UsageError*>(&e) != nullptr ||
                                  dynamic_cast<const std::invalid_argument*>(&e) != nullptr;
                }
                next = points.size();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker, j);
    worker(0);
    for (auto& th : pool) th.join();

    std::map<std::size_t, std::string> rows;
    for (const auto& path : staging) {
        std::ifstream in(path);
        std::string line;
        while (std::getline(in, line)) {
            const auto comma = line.find(',');
            rows[std::stoul(line.substr(0, comma))] = line.substr(comma + 1);
        }
        std::filesystem::remove(path);
    }
    if (!first_error.empty()) {
        if (usage_error) throw UsageError(first_error);
        throw std::runtime_error(first_error);
    }
    {
        auto f = open_out(oo.out);
        f << "N,k,g,G,gamma,t_star,peak,width\n";
        for (const auto& [i, row] : rows) f << row << '\n';
    }
    ctx.manifest.config = {{"family", so.srg.empty() ? so.family : "srg"},
                           {"nl", so.nl},
                           {"policy", so.policy},
                           {"walk", so.walk},
                           {"n_values", sw.n_values},
                           {"g_values", gs},
                           {"g_rule", sw.g_rule},
                           {"g_exponent", sw.g_exponent},
                           {"mode", sw.mode},
                           {"jobs", sw.jobs},
                           {"eps", ro.eps}};
    if (!std::isnan(sw.k_exponent)) ctx.manifest.config["k_exponent"] = sw.k_exponent;
    else ctx.manifest.config["marked"] = so.marked;
    if (!sw.gamma_values.empty()) ctx.manifest.config["gamma_values"] = sw.gamma_values;
    ctx.manifest.outputs.push_back(oo.out);
    ctx.manifest.results["rows"] = rows.size();
    std::cout << "wrote " << rows.size() << " rows to " << oo.out << '\n';
    return kExitOk;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(tok);
    return out;
}

struct FitOpts {
    std::string input;
    std::string x_column = "N";
    std::string y_column = "t_star";
    std::string recipe;
};

int cmd_fit(const FitOpts& fo, const OutOpts& oo, Context& ctx) {
    std::ifstream in(fo.input);
    if (!in) throw UsageError("cannot read " + fo.input);
    std::string line;
    if (!std::getline(in, line)) throw UsageError(fo.input + " is empty");
    const auto header = split_csv_line(line);
    auto col = [&](const std::string& name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw UsageError("column " + name + " not found in " + fo.input);
        return std::size_t(it - header.begin());
    };
    const std::size_t cx = col(fo.x_column), cy = col(fo.y_column);
    std::vector<std::pair<double, double>> pts;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() <= std::max(cx, cy)) continue;
        const double x = std::strtod(f[cx].c_str(), nullptr), y = std::strtod(f[cy].c_str(), nullptr);
        if (std::isfinite(x) && std::isfinite(y)) pts.emplace_back(x, y);
    }
    const PowerLawFit fit = fit_power_law(pts);
    const std::string recipe = fo.recipe.empty()
                                   ? "least squares on log(" + fo.y_column + ") vs log(" + fo.x_column + ")"
                                   : fo.recipe;
    {
        auto f = open_out(oo.out);
        write_fit_json(pts, fit, recipe, f);
    }
    ctx.manifest.config = {{"input", fo.input}, {"x_column", fo.x_column}, {"y_column", fo.y_column},
                           {"recipe", recipe}};
    ctx.manifest.outputs.push_back(oo.out);
    ctx.manifest.results = {{"prefactor", fit.prefactor}, {"exponent", fit.exponent}, {"r_squared", fit.r_squared},
                            {"points", pts.size()}};
    std::cout << ctx.manifest.results.dump() << '\n';
    return kExitOk;
}

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (int j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
        rows.push_back(r);
    }
    return rows;
}

json audit(const Graph& graph, const std::vector<int>& marked) {
    const CollapsedGraph cg = collapse(graph, marked);
    json a;
    a["n_vertices"] = graph.n;
    a["n_classes"] = cg.size();
    a["class_sizes"] = cg.class_sizes;
    a["equitable"] = is_equitable(graph, cg.vertex_class, cg.size());
    a["reduced_adjacency"] = matrix_json(cg.reduced_adjacency);
    a["symmetry_residual"] = cg.reduced_adjacency.symmetry_residual();
    return a;
}

struct ValidateOpts {
    std::string edges;
    int vertices = -1;
};

int cmd_validate(const SearchOpts& so, const ValidateOpts& vo, const OutOpts& oo, Context& ctx) {
    json out;
    std::vector<int> marked(std::size_t(std::max(so.marked, 1)));
    for (int i = 0; i < int(marked.size()); ++i) marked[i] = i;
    std::optional<Graph> graph;
    std::optional<SrgParams> params;
    if (!vo.edges.empty()) {
        std::ifstream in(vo.edges);
        if (!in) throw UsageError("cannot read " + vo.edges);
        graph = read_edge_list(in, vo.vertices);
        out["source"] = vo.edges;
    } else if (!so.srg.empty()) {
        params = parse_srg(so.srg);
        if (auto fam = family_for_srg(*params)) graph = build_graph(*fam);
        out["source"] = so.srg;
    } else {
        const FamilySpec fs = family_spec(so);
        params = family_srg_params(fs);
        graph = build_graph(fs);
        out["source"] = to_string(fs.family) + "(" + std::to_string(fs.size_param) + ")";
    }
    if (params) {
        const auto rep = srg_check(*params);
        out["params"] = {params->n_vertices, params->degree, params->lambda_common, params->mu_common};
        out["feasible"] = rep.feasible;
        out["type"] = to_string(rep.type);
        out["violations"] = rep.violations;
    }
    if (graph) out["audit"] = audit(*graph, marked);
    else out["audit"] = nullptr;
    {
        auto f = open_out(oo.out);
        f << out.dump(2) << '\n';
    }
    ctx.manifest.config = {{"source", out["source"]}, {"marked", so.marked}};
    ctx.manifest.outputs.push_back(oo.out);
    ctx.manifest.results = out;
    if (params)
        std::cout << "feasible=" << (out["feasible"].get<bool>() ? "true" : "false")
                  << " type=" << out["type"].get<std::string>();
    if (graph) std::cout << (params ? " " : "") << "equitable=" << (out["audit"]["equitable"].get<bool>() ? "true" : "false");
    std::cout << '\n';
    return kExitOk;
}

struct OracleOpts {
    std::vector<int> marked_vertices;
    std::string report;
    double tolerance = 1e-6;
};

Graph graph_for(const SearchOpts& so) {
    if (!so.srg.empty()) {
        const auto fam = family_for_srg(parse_srg(so.srg));
        if (!fam) throw UsageError("no buildable family matches --srg " + so.srg);
        return build_graph(*fam);
    }
    return build_graph(family_spec(so));
}

int cmd_compare_oracle(const SearchOpts& so0, const RunOpts& ro, const OracleOpts& oo2, const OutOpts& oo,
                       Context& ctx) {
    SearchOpts so = so0;
    std::vector<int> marked = oo2.marked_vertices;
    if (marked.empty())
        for (int i = 0; i < so.marked; ++i) marked.push_back(i);
    so.marked = int(marked.size());
    const Graph graph = graph_for(so);
    if (graph.n > kOracleMaxVertices) throw UsageError("the oracle supports at most 5000 vertices");
    const Resolved r = resolve(so);
    const double t_end = ro.t_end > 0.0 ? ro.t_end : auto_t_end(r);
    const OracleRun run = run_oracle(graph, marked, r.config.nl, r.config.policy, t_end, controls(ro), r.config.walk);
    const std::string report = oo2.report.empty() ? oo.out + ".report.json" : oo2.report;
    {
        auto f = open_out(oo.out);
        write_trajectory_csv(run.full, f);
    }
    {
        auto f = open_out(report);
        write_comparison_json(run.comparison, f);
    }
    ctx.manifest.config = r.describe;
    ctx.manifest.config["marked_vertices"] = marked;
    ctx.manifest.config["t_end"] = t_end;
    ctx.manifest.config["sample_dt"] = ro.dt;
    ctx.manifest.outputs = {oo.out, report};
    ctx.manifest.results = {{"max_abs_dev", run.comparison.max_abs_dev},
                            {"n_classes", run.collapsed.size()},
                            {"tolerance", oo2.tolerance},
                            {"within_tolerance", run.comparison.max_abs_dev <= oo2.tolerance}};
    std::cout << ctx.manifest.results.dump() << '\n';
    if (run.comparison.max_abs_dev > oo2.tolerance) {
        std::cerr << "reduced and full dynamics differ by " << run.comparison.max_abs_dev << '\n';
        return kExitNumeric;
    }
    return kExitOk;
}

struct OverlapOpts {
    double lo = kNaN, hi = kNaN;
    int points = 201;
    bool find_gamma = false;
};

int cmd_overlap(const SearchOpts& so, const OverlapOpts& ov, const OutOpts& oo, Context& ctx) {
    CollapsedGraph cg;
    if (!so.srg.empty()) cg = collapse_analytic(parse_srg(so.srg));
    else cg = collapse_analytic(family_spec(so), so.marked);
    const WalkForm walk = parse_walk_form(so.walk);
    const double deg = std::max(1.0, cg.degree);
    const double lo = std::isnan(ov.lo) ? 0.0 : ov.lo, hi = std::isnan(ov.hi) ? 3.0 / deg : ov.hi;
    if (!(hi > lo) || ov.points < 2) throw UsageError("overlap-sweep needs --gamma-hi > --gamma-lo and --points >= 2");
    std::vector<double> grid(std::size_t(ov.points));
    for (int i = 0; i < ov.points; ++i) grid[i] = lo + (hi - lo) * i / (ov.points - 1);
    const auto rows = overlap_sweep(cg, grid, walk);
    {
        auto f = open_out(oo.out);
        write_sweep_csv(rows, f);
    }
    ctx.manifest.config = {{"n_vertices", cg.n_vertices()}, {"n_classes", cg.size()}, {"walk", so.walk},
                           {"gamma_lo", lo},            {"gamma_hi", hi},          {"points", ov.points}};
    ctx.manifest.outputs.push_back(oo.out);
    if (ov.find_gamma) {
        const auto r = find_gamma_numeric(cg, lo > 0.0 ? lo : 0.25 / deg, hi, 400, walk);
        ctx.manifest.results = {{"gamma_star", r.gamma}, {"imbalance", r.imbalance}, {"at_boundary", r.at_boundary}};
        if (!r.warning.empty()) ctx.manifest.results["warning"] = r.warning;
        std::cout << ctx.manifest.results.dump() << '\n';
    }
    return kExitOk;
}

int cmd_bloch(const SearchOpts& so, const RunOpts& ro, const OutOpts& oo, Context& ctx) {
    const Resolved r = resolve(so);
    const SearchSystem sys = SearchSystem::from_config(r.config);
    if (sys.dim() != 2) throw UsageError("bloch needs a two-class system (complete graph)");
    const double t_end = ro.t_end > 0.0 ? ro.t_end : auto_t_end(r);
    const Trajectory traj = integrate(sys, t_end, controls(ro), nullptr, true);
    {
        auto f = open_out(oo.out);
        f << "t,p0,p1,gamma,norm_err,bloch_x,bloch_y,bloch_z\n";
        for (std::size_t i = 0; i < traj.size(); ++i) {
            const auto& c = traj.amplitudes[i];
            const double norm = std::sqrt(std::norm(c[0]) + std::norm(c[1]));
            const BlochPoint b = bloch_coords(c[0] / norm, c[1] / norm);
            f << fmt_num(traj.t[i]) << ',' << fmt_num(traj.probs[i][0]) << ',' << fmt_num(traj.probs[i][1]) << ','
              << fmt_num(traj.gamma[i]) << ',' << fmt_num(traj.norm_error[i]) << ',' << fmt_num(b.x) << ','
              << fmt_num(b.y) << ',' << fmt_num(b.z) << '\n';
        }
    }
    ctx.manifest.config = r.describe;
    ctx.manifest.config["t_end"] = t_end;
    ctx.manifest.config["sample_dt"] = ro.dt;
    ctx.manifest.outputs.push_back(oo.out);
    ctx.manifest.results["max_norm_error"] = traj.max_norm_error();
    return kExitOk;
}

// Splices key/value pairs of a JSON config file in after the subcommand, skipping flags that
// are given explicitly on the command line.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty() || args.size() < 2) return args;
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file " + path);
    json cfg;
    try {
        cfg = json::parse(in);
    } catch (const std::exception& e) {
        throw UsageError("config file " + path + " is not valid JSON: " + e.what());
    }
    if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");
    auto given = [&](const std::string& flag) {
        for (const auto& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
        return false;
    };
    std::vector<std::string> injected;
    for (auto& [key, val] : cfg.items()) {
        const std::string flag = "--" + key;
        if (key == "config" || given(flag)) continue;
        if (val.is_boolean()) {
            if (val.get<bool>()) injected.push_back(flag);
            continue;
        }
        std::string text;
        if (val.is_string()) text = val.get<std::string>();
        else if (val.is_array()) {
            for (std::size_t i = 0; i < val.size(); ++i) {
                if (i) text += ',';
                text += val[i].is_string() ? val[i].get<std::string>() : val[i].dump();
            }
        } else text = val.dump();
        injected.push_back(flag);
        injected.push_back(text);
    }
    std::vector<std::string> out(args.begin(), args.begin() + 2);
    out.insert(out.end(), injected.begin(), injected.end());
    out.insert(out.end(), args.begin() + 2, args.end());
    return out;
}

}  // namespace

int run(const std::vector<std::string>& args_in) {
    const auto t0 = std::chrono::steady_clock::now();
    CLI::App app{"Nonlinear quantum search toolkit", "nlqs"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    SearchOpts so;
    RunOpts ro;
    std::map<const CLI::App*, OutOpts> outs;
    Context ctx;

    auto* sim = app.add_subcommand("simulate", "integrate one reduced trajectory");
    add_search_options(sim, so);
    add_run_options(sim, ro);
    add_out_options(sim, outs[sim], "simulate.csv");

    ClosedFormOpts co;
    auto* cf = app.add_subcommand("closed-form", "evaluate a closed-form or resource operation by name");
    cf->add_option("--op", co.op, "operation name")->required();
    cf->add_option("--n", co.n, "N");
    cf->add_option("--k", co.k, "marked count k");
    cf->add_option("--g-coeff", co.g, "nonlinearity coefficient g");
    cf->add_option("--t", co.t, "time");
    cf->add_option("--x", co.x, "success probability or E1 argument");
    cf->add_option("--eps", co.eps, "height parameter");
    cf->add_option("--kind", co.kind, "exact|leading");
    cf->add_option("--nl", co.nl, "nonlinearity");
    cf->add_option("--srg", co.srg, "N,k,lambda,mu");
    cf->add_option("--gamma", co.gamma, "jumping rate");
    cf->add_option("--family", co.family, "graph family");
    cf->add_option("--lambda", co.lambda, "marked-count exponent");
    cf->add_option("--kappa", co.kappa, "nonlinearity exponent");
    cf->add_option("--sigma", co.sigma, "loglinear exponent");
    cf->add_option("--convention", co.convention, "g|G: which coefficient kappa scales");
    cf->add_option("--runtime", co.runtime, "runtime T");
    cf->add_option("--width", co.width, "peak width");
    cf->add_option("--clock", co.clock, "entangled|independent");
    add_out_options(cf, outs[cf], "closed_form.json");

    SweepOpts sw;
    auto* swp = app.add_subcommand("sweep", "grid of runs over N, g and gamma");
    add_search_options(swp, so);
    add_run_options(swp, ro);
    swp->add_option("--n-values", sw.n_values, "family size parameters")->delimiter(',');
    swp->add_option("--g-values", sw.g_values, "g values, or prefactors for rule-based g")->delimiter(',');
    swp->add_option("--gamma-values", sw.gamma_values, "fixed gamma values")->delimiter(',');
    swp->add_option("--k-exponent", sw.k_exponent, "marked count k = round(N^value)");
    swp->add_option("--g-rule", sw.g_rule, "fixed|power|power-log|ratio-log|k-complement");
    swp->add_option("--g-exponent", sw.g_exponent, "exponent for the power, power-log and ratio-log rules");
    swp->add_option("--mode", sw.mode, "integrate|quadrature");
    swp->add_option("--jobs", sw.jobs, "worker threads");
    add_out_options(swp, outs[swp], "sweep.csv");

    FitOpts fo;
    auto* fit = app.add_subcommand("fit", "power-law fit over a sweep output");
    fit->add_option("--input", fo.input, "CSV input")->required();
    fit->add_option("--x-column", fo.x_column, "abscissa column");
    fit->add_option("--y-column", fo.y_column, "ordinate column");
    fit->add_option("--recipe", fo.recipe, "free-text description stored with the fit");
    add_out_options(fit, outs[fit], "fit.json");

    ValidateOpts vo;
    auto* val = app.add_subcommand("validate-graph", "feasibility check and equitable-partition audit");
    add_search_options(val, so);
    val->add_option("--edges", vo.edges, "edge list file");
    val->add_option("--vertices", vo.vertices, "vertex count for --edges");
    add_out_options(val, outs[val], "validate.json");

    OracleOpts orc;
    auto* cmp = app.add_subcommand("compare-oracle", "reduced dynamics against the full N-dimensional integration");
    add_search_options(cmp, so);
    add_run_options(cmp, ro);
    cmp->add_option("--marked-vertices", orc.marked_vertices, "marked vertex indices")->delimiter(',');
    cmp->add_option("--report", orc.report, "comparison JSON (default: <out>.report.json)");
    cmp->add_option("--tolerance", orc.tolerance, "largest accepted deviation");
    add_out_options(cmp, outs[cmp], "oracle.csv");

    OverlapOpts ov;
    auto* ovs = app.add_subcommand("overlap-sweep", "spectrum and overlaps against gamma");
    add_search_options(ovs, so);
    ovs->add_option("--gamma-lo", ov.lo, "first gamma");
    ovs->add_option("--gamma-hi", ov.hi, "last gamma");
    ovs->add_option("--points", ov.points, "grid points");
    ovs->add_flag("--find-gamma", ov.find_gamma, "also locate the critical gamma numerically");
    add_out_options(ovs, outs[ovs], "overlap.csv");

    auto* blo = app.add_subcommand("bloch", "two-class trajectory with Bloch coordinates");
    add_search_options(blo, so);
    add_run_options(blo, ro);
    add_out_options(blo, outs[blo], "bloch.csv");

    std::vector<std::string> args;
    try {
        args = expand_config(args_in);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(int(argv.size()), const_cast<char**>(argv.data()));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    CLI::App* active = app.get_subcommands().front();
    const OutOpts& oo = outs.at(active);
    ctx.manifest.command = active->get_name();
    ctx.manifest.argv = args_in;
    int rc = kExitOk;
    try {
        if (active == sim) rc = cmd_simulate(so, ro, oo, ctx);
        else if (active == cf) rc = cmd_closed_form(co, oo, ctx);
        else if (active == swp) rc = cmd_sweep(so, ro, sw, oo, ctx);
        else if (active == fit) rc = cmd_fit(fo, oo, ctx);
        else if (active == val) rc = cmd_validate(so, vo, oo, ctx);
        else if (active == cmp) rc = cmd_compare_oracle(so, ro, orc, oo, ctx);
        else if (active == ovs) rc = cmd_overlap(so, ov, oo, ctx);
        else if (active == blo) rc = cmd_bloch(so, ro, oo, ctx);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n" << active->help();
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n" << active->help();
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumeric;
    }
    ctx.manifest.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    try {
        ctx.manifest.write(oo.manifest_path());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
    return rc;
}

}  // namespace nlqs::cli
