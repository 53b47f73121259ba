// shearlab <weights|linear|toy|simulate|diagnose> --config FILE --out DIR [--seed N]
//
// Exit codes: 0 ok, 1 check failed, 2 usage or configuration error,
// 3 numerical abort.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "shearlab/config.hpp"
#include "shearlab/diagnostics.hpp"
#include "shearlab/lemma_checks.hpp"
#include "shearlab/linear_dynamics.hpp"
#include "shearlab/manifest.hpp"
#include "shearlab/rate_fit.hpp"
#include "shearlab/spectral/run.hpp"
#include "shearlab/toy_model.hpp"

namespace fs = std::filesystem;
using namespace shearlab;

namespace {

enum Exit { ok = 0, check_failed = 1, usage = 2, numerical = 3 };

struct Options {
    std::string config;
    std::string out;
    std::optional<std::int64_t> seed;
    std::string snapshots;
};

// Shortest representation that reads back to the same double.
std::string num(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
    return s;
}

std::ofstream open_csv(const fs::path& path, RunManifest& m) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os.precision(17);
    m.add_artifact(path);
    return os;
}

using Echo = std::map<std::string, std::string>;

void echo_weights(Echo& e, const WeightParams& p) {
    e["weights.s"] = num(p.s);
    e["weights.lambda0"] = num(p.lambda0);
    e["weights.lambda_prime"] = num(p.lambda_prime);
    e["weights.sigma"] = num(p.sigma);
    e["weights.beta"] = num(p.beta);
    e["weights.kappa"] = num(p.kappa);
    e["weights.C_theta"] = num(p.C_theta);
    e["weights.mu"] = num(p.mu);
    e["weights.delta_L"] = num(p.delta_L);
    e["weights.delta_B"] = num(p.delta_B);
    e["weights.q_tilde"] = num(p.q_tilde);
    e["weights.delta_lambda"] = num(p.delta_lambda);
}

void echo_grid(Echo& e, const spectral::Grid& g) {
    e["grid.Nx"] = std::to_string(g.Nx);
    e["grid.Ny"] = std::to_string(g.Ny);
    e["grid.Ly"] = num(g.Ly);
    e["grid.dealias_fraction"] = num(g.dealias_fraction);
}

void echo_sim(Echo& e, const spectral::SimConfig& c) {
    e["sim.nu"] = num(c.nu);
    e["sim.gamma"] = num(c.gamma);
    e["sim.system"] = spectral::system_name(c.system);
    e["sim.epsilon"] = num(c.epsilon);
    e["sim.s_init"] = num(c.s_init);
    e["sim.T"] = num(c.T);
    e["sim.dt"] = num(c.dt);
    e["sim.seed"] = std::to_string(c.seed);
    e["sim.lambda0"] = num(c.lambda0);
    e["sim.cfl"] = num(c.cfl);
    e["sim.snapshot_count"] = std::to_string(c.snapshot_count);
    e["sim.shift_range"] = num(c.shift_range);
}

void echo_diag(Echo& e, const DiagnosticsOptions& o) {
    e["diag.noise_floor"] = num(o.noise_floor);
    e["diag.fit_lo"] = num(o.fit_lo);
    e["diag.fit_hi"] = num(o.fit_hi);
    e["diag.threads"] = std::to_string(o.threads);
}

KeyValueConfig load_config(const Options& o) {
    return o.config.empty() ? KeyValueConfig{} : KeyValueConfig::load(o.config);
}

void prepare_out(const Options& o) {
    if (o.out.empty()) throw config_error("--out is required");
    fs::create_directories(o.out);
}

void write_summary_lines(const fs::path& path, const std::vector<std::pair<std::string, std::string>>& kv,
                         RunManifest& m) {
    std::ofstream os(path);
    for (auto& [k, v] : kv) os << k << '=' << v << '\n';
    m.add_artifact(path);
}

const char* pass_word(bool b) { return b ? "PASS" : "FAIL"; }

// ---- weights ----

int cmd_weights(const Options& o) {
    auto cfg = load_config(o);
    auto p = weight_params_from(cfg);
    auto growth_etas = cfg.get_list({"lemmas.growth_etas"}, {10, 1e2, 1e3, 1e4, 1e5, 1e6});
    LemmaSampleSpec spec;
    spec.count = std::size_t(cfg.get_int({"lemmas.samples"}, std::int64_t(spec.count)));
    spec.seed = std::uint64_t(cfg.get_int({"lemmas.seed"}, 1));
    spec.eta_min = cfg.get_double({"lemmas.eta_min"}, spec.eta_min);
    spec.eta_max = cfg.get_double({"lemmas.eta_max"}, spec.eta_max);
    spec.k_max = cfg.get_int({"lemmas.k_max"}, spec.k_max);
    double stability = cfg.get_double({"lemmas.stability"}, 0.1);
    auto junction_etas = cfg.get_list({"lemmas.junction_etas"}, {10, 27.5, 100, 1e3, 1e4, 1e5});
    double junction_tol = cfg.get_double({"lemmas.junction_tol"}, 1e-12);
    cfg.reject_unused();
    if (o.seed) spec.seed = std::uint64_t(*o.seed);
    if (growth_etas.empty()) throw config_error("lemmas.growth_etas is empty");
    if (junction_etas.empty()) throw config_error("lemmas.junction_etas is empty");
    if (spec.count == 0) throw config_error("lemmas.samples must be positive");

    prepare_out(o);
    Echo echo;
    echo_weights(echo, p);
    echo["lemmas.growth_etas"] = join(growth_etas);
    echo["lemmas.samples"] = std::to_string(spec.count);
    echo["lemmas.seed"] = std::to_string(spec.seed);
    echo["lemmas.eta_min"] = num(spec.eta_min);
    echo["lemmas.eta_max"] = num(spec.eta_max);
    echo["lemmas.k_max"] = std::to_string(spec.k_max);
    echo["lemmas.stability"] = num(stability);
    echo["lemmas.junction_etas"] = join(junction_etas);
    echo["lemmas.junction_tol"] = num(junction_tol);
    RunManifest manifest(o.out, "weights", echo, spec.seed);

    auto growth = verify_growth_lemma(growth_etas, p);
    {
        auto os = open_csv(fs::path(o.out) / "growth.csv", manifest);
        os << "eta,log_inv_theta0,ratio,stirling_ratio\n";
        for (auto& r : growth.rows) os << r.eta << ',' << r.log_inv_theta0 << ',' << r.ratio << ',' << r.stirling_ratio << '\n';
    }

    // Two independent sample sets; a constant passes when finite on both and
    // stable between them.
    auto first = verify_ratio_lemmas(spec, p);
    LemmaSampleSpec spec2 = spec;
    spec2.seed = spec.seed + 0x9e3779b97f4a7c15ULL;
    auto second = verify_ratio_lemmas(spec2, p);
    bool lemmas_pass = true;
    {
        auto os = open_csv(fs::path(o.out) / "lemmas.csv", manifest);
        os << "lemma_id,sample_count,fitted_constant,fitted_constant_second_set,relative_change,pass,worst_case_inputs\n";
        for (std::size_t i = 0; i < first.size(); ++i) {
            double a = first[i].fitted_constant, b = second[i].fitted_constant;
            double change = std::abs(a - b) / std::max(std::abs(a), std::abs(b));
            if (a == b) change = 0;
            bool pass = first[i].pass && second[i].pass && std::isfinite(a) && std::isfinite(b) && change <= stability;
            lemmas_pass = lemmas_pass && pass;
            os << first[i].lemma_id << ',' << first[i].sample_count << ',' << a << ',' << b << ',' << change << ','
               << pass_word(pass) << ",\"" << first[i].worst_case_inputs << "\"\n";
        }
    }

    auto junctions = verify_junctions(junction_etas, p, junction_tol);
    {
        auto os = open_csv(fs::path(o.out) / "junctions.csv", manifest);
        os << "checked,max_log_jump,pass,worst_case_inputs\n";
        os << junctions.checked << ',' << junctions.max_log_jump << ',' << pass_word(junctions.pass) << ",\""
           << junctions.worst << "\"\n";
    }

    bool all = growth.pass && lemmas_pass && junctions.pass;
    write_summary_lines(fs::path(o.out) / "summary.txt",
                        {{"growth", pass_word(growth.pass)},
                         {"growth.min_ratio", num(growth.min_ratio)},
                         {"growth.max_ratio", num(growth.max_ratio)},
                         {"growth.max_drift", num(growth.max_drift)},
                         {"lemmas", pass_word(lemmas_pass)},
                         {"junctions", pass_word(junctions.pass)},
                         {"overall", pass_word(all)}},
                        manifest);
    std::cout << "growth " << pass_word(growth.pass) << "\nlemmas " << pass_word(lemmas_pass) << "\njunctions "
              << pass_word(junctions.pass) << '\n';
    int code = all ? ok : check_failed;
    manifest.finish(code);
    return code;
}

// ---- linear ----

int cmd_linear(const Options& o) {
    auto cfg = load_config(o);
    auto p = weight_params_from(cfg);
    auto gammas = cfg.get_list({"linear.gamma_sq"}, {1, 0.16});
    auto ks = cfg.get_list({"linear.k"}, {1});
    auto etas = cfg.get_list({"linear.eta"}, {0});
    double T = cfg.get_double({"linear.T"}, 1e4);
    auto samples = std::size_t(cfg.get_int({"linear.samples"}, 48));
    double rate_tol = cfg.get_double({"linear.rate_tolerance"}, 0.1);
    double nu = cfg.get_double({"linear.nu"}, 1);
    double bound_gamma_sq = cfg.get_double({"linear.bound_gamma_sq"}, 1);
    auto bound_ks = cfg.get_list({"linear.bound_k"}, {1, 2, 3});
    auto bound_etas = cfg.get_list({"linear.bound_eta"}, {-50, -40, -30, -20, -10, 0, 10, 20, 30, 40, 50});
    double bound_T = cfg.get_double({"linear.bound_T"}, 50);
    auto bound_samples = std::size_t(cfg.get_int({"linear.bound_samples"}, 201));
    double bound_limit = cfg.get_double({"linear.bound_limit"}, 20);
    double gap_tol = cfg.get_double({"linear.integrator_tolerance"}, 1e-8);
    cfg.reject_unused();
    if (gammas.empty() || ks.empty() || etas.empty()) throw config_error("linear: empty gamma_sq, k or eta list");
    if (!(T > 0)) throw config_error("linear.T must be positive");
    std::vector<ModeIndex> modes;
    for (double k : ks) {
        if (k != std::round(k) || k == 0) throw config_error("linear.k must hold nonzero integers");
        for (double e : etas) modes.push_back({int(k), e});
    }
    std::vector<int> bks;
    for (double k : bound_ks) {
        if (k != std::round(k) || k == 0) throw config_error("linear.bound_k must hold nonzero integers");
        bks.push_back(int(k));
    }

    prepare_out(o);
    Echo echo;
    echo_weights(echo, p);
    echo["linear.gamma_sq"] = join(gammas);
    echo["linear.k"] = join(ks);
    echo["linear.eta"] = join(etas);
    echo["linear.T"] = num(T);
    echo["linear.samples"] = std::to_string(samples);
    echo["linear.rate_tolerance"] = num(rate_tol);
    echo["linear.nu"] = num(nu);
    echo["linear.bound_gamma_sq"] = num(bound_gamma_sq);
    echo["linear.bound_k"] = join(bound_ks);
    echo["linear.bound_eta"] = join(bound_etas);
    echo["linear.bound_T"] = num(bound_T);
    echo["linear.bound_samples"] = std::to_string(bound_samples);
    echo["linear.bound_limit"] = num(bound_limit);
    echo["linear.integrator_tolerance"] = num(gap_tol);
    RunManifest manifest(o.out, "linear", echo, o.seed ? std::uint64_t(*o.seed) : 0);

    bool rates_pass = true;
    {
        auto os = open_csv(fs::path(o.out) / "rates.csv", manifest);
        os << "gamma_sq,quantity,fitted_exponent,expected_exponent,residual,window\n";
        for (double gsq : gammas) {
            RateScanOptions opt;
            opt.samples = samples;
            auto rows = yang_lin_rate_scan(LinearParams{0, gsq, 1}, modes, T, opt);
            for (auto& r : rows) {
                if (std::isfinite(r.expected))
                    rates_pass = rates_pass && r.fit.ok && std::abs(r.fit.exponent - r.expected) <= rate_tol;
                os << gsq << ',' << r.quantity << ',' << r.fit.exponent << ',' << r.expected << ','
                   << r.fit.residual << ',' << r.fit.window_lo << ':' << r.fit.window_hi << '\n';
            }
        }
    }

    auto bound = viscous_bound_sweep(bks, bound_etas, bound_T, bound_samples, nu, bound_gamma_sq);
    {
        auto os = open_csv(fs::path(o.out) / "viscous_bound.csv", manifest);
        os << "k,eta,t,data,ratio\n";
        for (auto& r : bound.rows) os << r.k << ',' << r.eta << ',' << r.t << ',' << r.data << ',' << r.ratio << '\n';
    }
    bool bound_pass = bound.constant <= bound_limit;

    std::vector<double> times;
    for (int i = 1; i <= 40; ++i) times.push_back(i);
    double gap = closed_form_integrator_gap({{1, 10}}, times, nu, bound_gamma_sq, {1, 0}, {0, 1});
    bool gap_pass = gap <= gap_tol;

    bool all = rates_pass && bound_pass && gap_pass;
    write_summary_lines(fs::path(o.out) / "summary.txt",
                        {{"rates", pass_word(rates_pass)},
                         {"viscous_bound.constant", num(bound.constant)},
                         {"viscous_bound.worst", bound.worst},
                         {"viscous_bound", pass_word(bound_pass)},
                         {"closed_form_integrator_gap", num(gap)},
                         {"closed_form", pass_word(gap_pass)},
                         {"overall", pass_word(all)}},
                        manifest);
    std::cout << "rates " << pass_word(rates_pass) << "\nviscous_bound " << pass_word(bound_pass) << " C="
              << bound.constant << "\nclosed_form " << pass_word(gap_pass) << " gap=" << gap << '\n';
    int code = all ? ok : check_failed;
    manifest.finish(code);
    return code;
}

// ---- toy ----

int cmd_toy(const Options& o) {
    auto cfg = load_config(o);
    auto p = weight_params_from(cfg);
    int k = int(cfg.get_int({"toy.k"}, 1));
    double eta_min = cfg.get_double({"toy.eta_min"}, 1e2), eta_max = cfg.get_double({"toy.eta_max"}, 1e5);
    auto count = std::size_t(cfg.get_int({"toy.samples"}, 16));
    double tol = cfg.get_double({"toy.tolerance"}, 0.1);
    bool chain = cfg.get_bool({"toy.chain"}, true);
    double chain_eta = cfg.get_double({"toy.chain_eta"}, 1e3);
    double gamma_sq = cfg.get_double({"toy.gamma_sq"}, 1);
    double width = cfg.get_double({"toy.rho_lo_width"}, 1), mass = cfg.get_double({"toy.rho_lo_mass"}, 1);
    double truncation_tol = cfg.get_double({"toy.truncation_tolerance"}, 0.05);
    cfg.reject_unused();
    if (!(eta_min > 1 && eta_max > eta_min)) throw config_error("toy: need 1 < eta_min < eta_max");
    if (k < 1) throw config_error("toy.k must be positive");

    prepare_out(o);
    Echo echo;
    echo_weights(echo, p);
    echo["toy.k"] = std::to_string(k);
    echo["toy.eta_min"] = num(eta_min);
    echo["toy.eta_max"] = num(eta_max);
    echo["toy.samples"] = std::to_string(count);
    echo["toy.tolerance"] = num(tol);
    echo["toy.chain"] = chain ? "true" : "false";
    echo["toy.chain_eta"] = num(chain_eta);
    echo["toy.gamma_sq"] = num(gamma_sq);
    echo["toy.rho_lo_width"] = num(width);
    echo["toy.rho_lo_mass"] = num(mass);
    echo["toy.truncation_tolerance"] = num(truncation_tol);
    RunManifest manifest(o.out, "toy", echo, o.seed ? std::uint64_t(*o.seed) : 0);

    auto rep = toy_growth_sweep(log_spaced(eta_min, eta_max, count), k, p.kappa, p.C_theta);
    {
        auto os = open_csv(fs::path(o.out) / "toy.csv", manifest);
        os << "eta,k,interval,amplification,designed_theta_ratio,ratio_of_ratios\n";
        for (auto& r : rep.rows)
            os << r.eta << ',' << r.k << ',' << r.t_minus << ':' << r.t_plus << ',' << r.amplification << ','
               << r.designed_theta_ratio << ',' << r.ratio_of_ratios << '\n';
    }
    bool growth_pass = std::abs(rep.fit.exponent - rep.expected_exponent) <= tol * rep.expected_exponent;
    std::vector<std::pair<std::string, std::string>> summary{
        {"toy.fitted_exponent", num(rep.fit.exponent)},
        {"toy.expected_exponent", num(rep.expected_exponent)},
        {"toy.residual", num(rep.fit.residual)},
        {"toy", pass_word(growth_pass)}};

    bool chain_pass = true;
    if (chain) {
        int N = int(floor_cbrt(chain_eta));
        if (N < 1) throw config_error("toy.chain_eta must be at least 1");
        ChainOptions copt;
        copt.gamma_sq = gamma_sq;
        auto profile = gaussian_profile(width, mass);
        auto base = integrate_chain(make_chain(chain_eta, N), profile, 2 * chain_eta, copt);
        auto wide = integrate_chain(make_chain(chain_eta, 2 * N), profile, 2 * chain_eta, copt);
        double designed = std::exp(-theta_weight(0, 1, chain_eta, p).log_value);
        double truncation = std::abs(wide.total_growth - base.total_growth) / base.total_growth;
        chain_pass = !base.overflow && base.total_growth <= designed && truncation < truncation_tol;
        auto os = open_csv(fs::path(o.out) / "chain.csv", manifest);
        os << "l,t_lo,t_hi,dominant_mode,growth\n";
        for (auto& ci : base.intervals)
            os << ci.l << ',' << ci.t_lo << ',' << ci.t_hi << ',' << ci.dominant_mode << ',' << ci.growth << '\n';
        summary.push_back({"chain.total_growth", num(base.total_growth)});
        summary.push_back({"chain.designed_growth", num(designed)});
        summary.push_back({"chain.truncation_change", num(truncation)});
        summary.push_back({"chain", pass_word(chain_pass)});
    }
    bool all = growth_pass && chain_pass;
    summary.push_back({"overall", pass_word(all)});
    write_summary_lines(fs::path(o.out) / "summary.txt", summary, manifest);
    std::cout << "toy " << pass_word(growth_pass) << " exponent=" << rep.fit.exponent << " expected="
              << rep.expected_exponent << '\n';
    if (chain) std::cout << "chain " << pass_word(chain_pass) << '\n';
    int code = all ? ok : check_failed;
    manifest.finish(code);
    return code;
}

// ---- simulate / diagnose ----

void write_diagnostics(const fs::path& dir, const spectral::Grid& g, const spectral::SimConfig& c,
                       const WeightParams& p, const std::vector<spectral::SimState>& snaps,
                       const spectral::ZeroModeHistory& zm, const DiagnosticsOptions& opt, RunManifest& m) {
    auto recs = analyze(g, c, p, snaps, zm, opt);
    {
        auto os = open_csv(dir / "diagnostics.csv", m);
        os << diagnostics_csv_header() << '\n';
        for (auto& r : recs) write_csv_row(os, r);
    }
    auto s = summarize(recs, c, opt);
    std::ofstream os(dir / "summary.txt");
    write_summary(os, s);
    m.add_artifact(dir / "summary.txt");
}

int cmd_simulate(const Options& o) {
    auto cfg = load_config(o);
    auto p = weight_params_from(cfg);
    auto g = grid_from(cfg);
    auto c = sim_config_from(cfg, p);
    auto opt = diagnostics_options_from(cfg);
    bool diagnostics = cfg.get_bool({"sim.diagnostics"}, true);
    cfg.reject_unused();
    if (o.seed) c.seed = std::uint64_t(*o.seed);

    prepare_out(o);
    Echo echo;
    echo_weights(echo, p);
    echo_grid(echo, g);
    echo_sim(echo, c);
    echo_diag(echo, opt);
    echo["sim.diagnostics"] = diagnostics ? "true" : "false";
    RunManifest manifest(o.out, "simulate", echo, c.seed);

    const fs::path dir(o.out);
    std::vector<spectral::SimState> snaps;
    spectral::RunResult res;
    try {
        res = spectral::run(g, c, [&](const spectral::SimState& s, int index) {
            auto path = dir / spectral::snapshot_name(index);
            spectral::write_snapshot(path, g, s);
            manifest.add_artifact(path);
            if (diagnostics) snaps.push_back(s);
        });
    } catch (const numerical_error& e) {
        std::cerr << "numerical abort: " << e.what() << '\n';
        manifest.finish(numerical, e.what());
        return numerical;
    }
    spectral::write_zero_modes(dir / "zero_modes.bin", res.zero_modes);
    manifest.add_artifact(dir / "zero_modes.bin");
    if (diagnostics) write_diagnostics(dir, g, c, p, snaps, res.zero_modes, opt, manifest);
    std::cout << "steps=" << res.steps << " dt=" << res.dt << " snapshots=" << res.snapshots
              << " max_divergence=" << res.max_divergence << '\n';
    manifest.finish(ok);
    return ok;
}

int cmd_diagnose(const Options& o) {
    if (o.snapshots.empty()) throw config_error("--snapshots is required");
    const fs::path src(o.snapshots);
    auto files = spectral::list_snapshots(src);
    if (files.empty()) throw config_error("no snapshots in " + src.string());

    // Start from the configuration recorded by the simulation; --config
    // entries override it.
    KeyValueConfig cfg;
    if (fs::exists(src / "manifest.json")) {
        std::ifstream is(src / "manifest.json");
        auto doc = nlohmann::json::parse(is, nullptr, false);
        if (!doc.is_discarded() && doc.contains("config"))
            for (auto& [k, v] : doc["config"].items()) cfg.set(k, v.get<std::string>());
    }
    if (!o.config.empty())
        for (auto& [k, v] : KeyValueConfig::load(o.config).values()) cfg.set(k, v);
    cfg.find({"sim.diagnostics"});
    auto p = weight_params_from(cfg);
    auto g = grid_from(cfg);
    auto c = sim_config_from(cfg, p);
    auto opt = diagnostics_options_from(cfg);
    cfg.reject_unused();

    std::vector<spectral::SimState> snaps;
    for (auto& f : files) {
        spectral::Grid fg = g;
        snaps.push_back(spectral::read_snapshot(f, fg));
        if (fg.Nx != g.Nx || fg.Ny != g.Ny || fg.Ly != g.Ly) {
            if (snaps.size() > 1) throw config_error("snapshots disagree on the grid: " + f.string());
            g.Nx = fg.Nx, g.Ny = fg.Ny, g.Ly = fg.Ly;
        }
    }
    spectral::ZeroModeHistory zm;
    if (fs::exists(src / "zero_modes.bin")) {
        zm = spectral::read_zero_modes(src / "zero_modes.bin");
        if (zm.Ny != g.Ny) throw config_error("zero_modes.bin does not match the snapshot grid");
    } else {
        for (auto& s : snaps) zm.record(g, s);
    }
    if (!c.T || c.T < snaps.back().t) c.T = snaps.back().t;

    prepare_out(o);
    Echo echo;
    echo_weights(echo, p);
    echo_grid(echo, g);
    echo_sim(echo, c);
    echo_diag(echo, opt);
    echo["snapshots"] = src.string();
    RunManifest manifest(o.out, "diagnose", echo, c.seed);
    try {
        write_diagnostics(o.out, g, c, p, snaps, zm, opt, manifest);
    } catch (const numerical_error& e) {
        std::cerr << "numerical abort: " << e.what() << '\n';
        manifest.finish(numerical, e.what());
        return numerical;
    }
    std::cout << "snapshots=" << snaps.size() << '\n';
    manifest.finish(ok);
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weights, linear rates, toy model, spectral simulation and diagnostics for perturbed Couette flow"};
    app.require_subcommand(1);
    Options o;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "key=value configuration file");
        sub->add_option("--out", o.out, "output directory")->required();
        sub->add_option("--seed", o.seed, "random seed override");
    };
    auto* weights = app.add_subcommand("weights", "verify the multiplier growth, ratio and junction properties");
    auto* linear = app.add_subcommand("linear", "linear decay rates and the viscous bound");
    auto* toy = app.add_subcommand("toy", "toy-model and frequency-chain growth");
    auto* simulate = app.add_subcommand("simulate", "nonlinear pseudo-spectral run");
    auto* diagnose = app.add_subcommand("diagnose", "diagnostics from stored snapshots");
    for (auto* s : {weights, linear, toy, simulate, diagnose}) add_common(s);
    diagnose->add_option("--snapshots", o.snapshots, "snapshot directory written by simulate")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    }

    try {
        if (*weights) return cmd_weights(o);
        if (*linear) return cmd_linear(o);
        if (*toy) return cmd_toy(o);
        if (*simulate) return cmd_simulate(o);
        if (*diagnose) return cmd_diagnose(o);
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return usage;
    } catch (const numerical_error& e) {
        std::cerr << "numerical abort: " << e.what() << '\n';
        return numerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    }
    return usage;
}
