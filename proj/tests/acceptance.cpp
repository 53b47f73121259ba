// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.
// Takes roughly 10 minutes on one core, most of it in the 256^2 run.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <algorithm>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "shearlab/config.hpp"
#include "shearlab/diagnostics.hpp"
#include "shearlab/lemma_checks.hpp"
#include "shearlab/linear_dynamics.hpp"
#include "shearlab/spectral/run.hpp"
#include "shearlab/toy_model.hpp"

using namespace shearlab;

namespace {

const WeightParams P = WeightParams::defaults();
int failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(int id, const char* name, bool pass, const std::string& detail) {
    if (!pass) ++failures;
    std::printf("[%s] %2d %s: %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Runs the body, reports it and appends the wall time against the limit.
void criterion(int id, const char* name, double limit_s, const std::function<bool(std::string&)>& body) {
    auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool pass = false;
    try {
        pass = body(detail);
    } catch (const std::exception& e) {
        detail += std::string(" exception: ") + e.what();
    }
    double el = seconds_since(t0);
    if (limit_s > 0) {
        detail += fmt("; %.1f s (limit %.0f s)", el, limit_s);
        pass = pass && el < limit_s;
    } else {
        detail += fmt("; %.1f s", el);
    }
    report(id, name, pass, detail);
}

KeyValueConfig load(const char* name) {
    return KeyValueConfig::load(std::string(SHEARLAB_SOURCE_DIR) + "/configs/" + name + ".cfg");
}

struct DeskRun {
    Grid g;
    DiagnosticsSummary sum;
    std::vector<DiagnosticsRecord> recs;
    double max_divergence = 0;
    double seconds = 0;
};

DeskRun desk_run(const KeyValueConfig& cfg, const Grid* override_grid = nullptr) {
    auto t0 = std::chrono::steady_clock::now();
    DeskRun d;
    auto p = weight_params_from(cfg);
    d.g = override_grid ? *override_grid : grid_from(cfg);
    auto c = sim_config_from(cfg, p);
    auto opt = diagnostics_options_from(cfg);
    std::vector<SimState> snaps;
    auto res = spectral::run(d.g, c, [&](const SimState& s, int) { snaps.push_back(s); });
    d.max_divergence = res.max_divergence;
    d.recs = analyze(d.g, c, p, snaps, res.zero_modes, opt);
    d.sum = summarize(d.recs, c, opt);
    d.seconds = seconds_since(t0);
    std::printf("  desk run %dx%d Ly=%g: %ld steps, omega %.3f ux %.3f uy %.3f h %.3f f0 %.3f, "
                "ln C_E %.4f ln C_CK %.4f, %.1f s\n",
                d.g.Nx, d.g.Ny, d.g.Ly, res.steps, d.sum.omega_fit.exponent, d.sum.ux_fit.exponent,
                d.sum.uy_fit.exponent, d.sum.h_fit.exponent, d.sum.f0_fit.exponent, d.sum.log_C_energy,
                d.sum.log_C_ck, d.seconds);
    std::fflush(stdout);
    return d;
}

}  // namespace

int main() {
    criterion(1, "weight growth", 10, [](std::string& out) {
        auto rep = verify_growth_lemma({10, 1e2, 1e3, 1e4, 1e5, 1e6}, P);
        out = fmt("ratio in [%.4g, %.4g] (band [1/50, 50]), drift %.3f (< 2)", rep.min_ratio, rep.max_ratio,
                  rep.max_drift);
        return rep.min_ratio >= 1.0 / 50 && rep.max_ratio <= 50 && rep.max_drift < 2;
    });

    criterion(2, "g closed form vs ODE", 30, [](std::string& out) {
        double worst = 0;
        for (double eta : {10.0, 1e3, 1e5}) {
            double tb = 2 * eta / (2.0 * floor_two_thirds(eta) + 1);
            for (double t : {0.0, tb, 0.3 * eta, 0.55 * eta, 0.8 * eta, eta, 1.3 * eta, 2 * eta, 3 * eta}) {
                double ode = oracle::g_log_by_ode(t, eta, P);
                double closed = g_weight(t, eta, P).log_value;
                // |ln a - ln b| is the relative error of g to first order
                worst = std::max(worst, std::abs(std::expm1(closed - ode)));
            }
        }
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<> u(0, 1);
        int bad = 0;
        for (int n = 0; n < 10000; ++n) {
            double eta = std::exp(u(rng) * std::log(1e6)) * (u(rng) < 0.5 ? -1 : 1);
            double t = u(rng) * 3 * std::abs(eta);
            double inv = -g_weight(t, eta, P).log_value;
            if (!(inv >= 0 && inv <= 3 * pi / P.delta_L * std::cbrt(std::abs(eta)))) ++bad;
        }
        out = fmt("max relative gap %.2e (<= 1e-8), bound violations %d / 10000", worst, bad);
        return worst <= 1e-8 && bad == 0;
    });

    criterion(3, "ratio and commutator constants", 120, [](std::string& out) {
        auto a = verify_ratio_lemmas({10000, 1, 1, 1e4, 100}, P);
        auto b = verify_ratio_lemmas({10000, 2, 1, 1e4, 100}, P);
        bool pass = a.size() == b.size() && !a.empty();
        for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
            double ca = a[i].fitted_constant, cb = b[i].fitted_constant;
            double change = std::abs(ca - cb) / std::max(ca, cb);
            bool ok = std::isfinite(ca) && std::isfinite(cb) && change <= 0.1;
            pass = pass && ok;
            out += fmt("%s%s %.4g/%.4g (%.1f%%)", i ? ", " : "", a[i].lemma_id.c_str(), ca, cb, 100 * change);
        }
        return pass;
    });

    criterion(4, "viscous linear bound", 60, [](std::string& out) {
        std::vector<double> etas;
        for (int e = -50; e <= 50; e += 10) etas.push_back(e);
        auto rep = viscous_bound_sweep({1, 2, 3}, etas, 50, 201);
        std::vector<ModeIndex> modes;
        for (int k : {1, 2, 3})
            for (double e : etas) modes.push_back({k, e});
        std::vector<double> times;
        for (int i = 1; i <= 10; ++i) times.push_back(5.0 * i);
        double gap = closed_form_integrator_gap(modes, times, 1, 1, {1, 0}, {0, 1});
        std::vector<double> fine;
        for (int i = 1; i <= 40; ++i) fine.push_back(i);
        gap = std::max(gap, closed_form_integrator_gap({{1, 10}}, fine, 1, 1, {1, 0}, {0, 1}));
        out = fmt("C = %.4f (<= 20) worst at %s; closed form vs integrator %.2e (<= 1e-8)", rep.constant,
                  rep.worst.c_str(), gap);
        return rep.constant <= 20 && gap <= 1e-8;
    });

    criterion(5, "inviscid linear rates", 120, [](std::string& out) {
        bool pass = true;
        double u1[2] = {NAN, NAN};
        int n = 0;
        for (double g2 : {1.0, 0.16}) {
            auto rows = yang_lin_rate_scan({0, g2, 1}, {{1, 0}}, 1e4);
            out += fmt("%sgamma^2=%g:", n ? "; " : "", g2);
            for (auto& r : rows) {
                bool ok = r.fit.ok && std::abs(r.fit.exponent - r.expected) <= 0.1;
                pass = pass && ok;
                out += fmt(" %s %.3f (%.2f)", r.quantity.c_str(), r.fit.exponent, r.expected);
            }
            u1[n++] = rows[0].fit.exponent;
        }
        double shift = u1[1] - u1[0];
        out += fmt("; shift %.3f (0.3 +- 0.1)", shift);
        return pass && std::abs(shift - 0.3) <= 0.1;
    });

    criterion(6, "toy growth exponent", 60, [](std::string& out) {
        auto rep = toy_growth_sweep(log_spaced(1e2, 1e5, 16), 1, P.kappa, P.C_theta);
        double rel = std::abs(rep.fit.exponent - rep.expected_exponent) / rep.expected_exponent;
        out = fmt("fitted %.4f vs %.4f (%.1f%%, limit 10%%)", rep.fit.exponent, rep.expected_exponent, 100 * rel);
        return rep.fit.ok && rel <= 0.1;
    });

    DeskRun r128, r256;
    criterion(7, "nonlinear decay", 0, [&](std::string& out) {
        r128 = desk_run(load("desk_128"));
        r256 = desk_run(load("desk_256"));
        const RateFit* f128[] = {&r128.sum.omega_fit, &r128.sum.ux_fit, &r128.sum.uy_fit};
        const RateFit* f256[] = {&r256.sum.omega_fit, &r256.sum.ux_fit, &r256.sum.uy_fit};
        const double bound[] = {-1.5, -2.5, -3.2}, target[] = {-2, -3, -4};
        const char* names[] = {"omega", "ux", "uy"};
        bool pass = r128.seconds < 900 && r256.seconds < 7200;
        for (int i = 0; i < 3; ++i) {
            bool ok = f128[i]->ok && f256[i]->ok && f128[i]->exponent <= bound[i] && f256[i]->exponent <= bound[i] &&
                      std::abs(f256[i]->exponent - target[i]) <= std::abs(f128[i]->exponent - target[i]) + 1e-3;
            pass = pass && ok;
            out += fmt("%s%s %.3f -> %.3f (<= %.1f)", i ? ", " : "", names[i], f128[i]->exponent, f256[i]->exponent,
                       bound[i]);
        }
        out += fmt("; 128^2 %.0f s (< 900), 256^2 %.0f s (< 7200)", r128.seconds, r256.seconds);
        return pass;
    });

    criterion(8, "transport conservation", 0, [](std::string& out) {
        auto cfg = load("transport");
        cfg.find({"sim.diagnostics"});
        auto g = grid_from(cfg);
        auto c = sim_config_from(cfg, weight_params_from(cfg));
        double w0 = NAN, t0 = NAN, worst = 0;
        auto res = spectral::run(g, c, [&](const SimState& s, int) {
            double w = l2_norm(g, s.omega), th = l2_norm(g, s.theta);
            if (std::isnan(w0)) w0 = w, t0 = th;
            worst = std::max({worst, std::abs(w / w0 - 1), std::abs(th / t0 - 1)});
        });
        out = fmt("max relative norm drift %.2e (<= 1e-6), divergence %.2e (<= 1e-13), %ld steps", worst,
                  res.max_divergence, res.steps);
        return worst <= 1e-6 && res.max_divergence <= 1e-13;
    });

    criterion(9, "bootstrap constants", 0, [&](std::string& out) {
        // constants are stored as logs; the change is that of C itself
        double dE = std::abs(std::expm1(r256.sum.log_C_energy - r128.sum.log_C_energy));
        double dC = std::abs(std::expm1(r256.sum.log_C_ck - r128.sum.log_C_ck));
        out = fmt("ln C_E %.3f -> %.3f (ratio %.3g), ln C_CK %.3f -> %.3f (ratio %.3g), allowed ratio 0.75..1.25",
                  r128.sum.log_C_energy, r256.sum.log_C_energy, std::exp(r256.sum.log_C_energy - r128.sum.log_C_energy),
                  r128.sum.log_C_ck, r256.sum.log_C_ck, std::exp(r256.sum.log_C_ck - r128.sum.log_C_ck));
        return std::isfinite(dE) && std::isfinite(dC) && dE < 0.25 && dC < 0.25;
    });

    criterion(10, "scattering residual", 0, [&](std::string& out) {
        auto& s = r128.sum;
        out = fmt("residual(50)/residual(5) = %.3g (< 0.1), largest rise after t = 10: %.2f%% (<= 5%%)",
                  s.scattering_ratio, 100 * s.scattering_max_rise);
        return s.scattering_ratio < 0.1 && s.scattering_max_rise <= 0.05;
    });

    criterion(11, "zero-mode decay", 0, [&](std::string& out) {
        auto& s = r128.sum;
        out = fmt("h %.3f (-1 +- 0.25), f0 %.3f (-1.25 +- 0.25)", s.h_fit.exponent, s.f0_fit.exponent);
        return s.h_fit.ok && s.f0_fit.ok && std::abs(s.h_fit.exponent + 1) <= 0.25 &&
               std::abs(s.f0_fit.exponent + 1.25) <= 0.25;
    });

    // Periodic box in y: doubling the half-period (same dy) should change the
    // diagnostics by less than 1%.
    {
        auto t0 = std::chrono::steady_clock::now();
        auto cfg = load("desk_128");
        Grid wide = grid_from(cfg);
        wide.Ny *= 2;
        wide.Ly *= 2;
        std::string detail;
        bool pass = false;
        try {
            auto rw = desk_run(cfg, &wide);
            auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(a); };
            double de[] = {rel(r128.sum.omega_fit.exponent, rw.sum.omega_fit.exponent),
                           rel(r128.sum.ux_fit.exponent, rw.sum.ux_fit.exponent),
                           rel(r128.sum.uy_fit.exponent, rw.sum.uy_fit.exponent),
                           rel(r128.sum.h_fit.exponent, rw.sum.h_fit.exponent),
                           rel(r128.sum.f0_fit.exponent, rw.sum.f0_fit.exponent)};
            double dexp = *std::max_element(std::begin(de), std::end(de));
            double dE = std::abs(std::expm1(rw.sum.log_C_energy - r128.sum.log_C_energy));
            double dC = std::abs(std::expm1(rw.sum.log_C_ck - r128.sum.log_C_ck));
            detail = fmt("decay exponents %.2f%%, C_E %.1f%%, C_CK %.1f%% (limit 1%%)", 100 * dexp, 100 * dE, 100 * dC);
            pass = dexp < 0.01 && dE < 0.01 && dC < 0.01;
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        detail += fmt("; %.1f s", seconds_since(t0));
        if (!pass) ++failures;
        std::printf("[%s]    y-box doubling: %s\n", pass ? "PASS" : "FAIL", detail.c_str());
    }

    std::printf("%d check(s) failed\n", failures);
    return failures ? 1 : 0;
}
