#pragma once

// Flat key=value configuration with section prefixes (weights.kappa=0.01).
// '#' starts a comment. Unknown keys are an error.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "shearlab/diagnostics.hpp"
#include "shearlab/linear_dynamics.hpp"
#include "shearlab/spectral/state.hpp"
#include "shearlab/weight_params.hpp"

namespace shearlab {

class KeyValueConfig {
public:
    static KeyValueConfig parse(std::istream& in, const std::string& origin = "<config>") {
        KeyValueConfig c;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw config_error(origin + ":" + std::to_string(lineno) + ": expected key=value");
            std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
            if (key.empty()) throw config_error(origin + ":" + std::to_string(lineno) + ": empty key");
            if (c.values_.count(key)) throw config_error(origin + ": duplicate key '" + key + "'");
            c.values_[key] = value;
        }
        return c;
    }

    static KeyValueConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw config_error("cannot read config file " + path);
        return parse(in, path);
    }

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) > 0; }

    // First present key among the aliases, marked as used.
    const std::string* find(std::initializer_list<std::string> keys) const {
        for (auto& k : keys) {
            auto it = values_.find(k);
            if (it != values_.end()) {
                used_.insert(k);
                return &it->second;
            }
        }
        return nullptr;
    }

    double get_double(std::initializer_list<std::string> keys, double fallback) const {
        auto* v = find(keys);
        return v ? to_double(*keys.begin(), *v) : fallback;
    }
    std::int64_t get_int(std::initializer_list<std::string> keys, std::int64_t fallback) const {
        auto* v = find(keys);
        if (!v) return fallback;
        std::int64_t out = 0;
        auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
        if (ec != std::errc{} || p != v->data() + v->size())
            throw config_error("key '" + *keys.begin() + "': not an integer: " + *v);
        return out;
    }
    std::string get_string(std::initializer_list<std::string> keys, const std::string& fallback) const {
        auto* v = find(keys);
        return v ? *v : fallback;
    }
    bool get_bool(std::initializer_list<std::string> keys, bool fallback) const {
        auto* v = find(keys);
        if (!v) return fallback;
        if (*v == "true" || *v == "1" || *v == "yes") return true;
        if (*v == "false" || *v == "0" || *v == "no") return false;
        throw config_error("key '" + *keys.begin() + "': not a boolean: " + *v);
    }
    // Comma-separated list of numbers; an explicitly empty value gives an
    // empty list.
    std::vector<double> get_list(std::initializer_list<std::string> keys, const std::vector<double>& fallback) const {
        auto* v = find(keys);
        if (!v) return fallback;
        std::vector<double> out;
        std::stringstream ss(*v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) out.push_back(to_double(*keys.begin(), item));
        }
        return out;
    }

    // Keys never read by any accessor.
    std::vector<std::string> unused() const {
        std::vector<std::string> out;
        for (auto& [k, v] : values_)
            if (!used_.count(k)) out.push_back(k);
        return out;
    }
    void reject_unused() const {
        auto u = unused();
        if (!u.empty()) {
            std::string msg = "unknown config key(s):";
            for (auto& k : u) msg += " " + k;
            throw config_error(msg);
        }
    }

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    static std::string trim(const std::string& s) {
        auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return "";
        auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    }
    static double to_double(const std::string& key, const std::string& v) {
        try {
            std::size_t pos = 0;
            double d = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw config_error("key '" + key + "': not a number: " + v);
        }
    }

    std::map<std::string, std::string> values_;
    mutable std::set<std::string> used_;
};

// mu defaults to 6(1 + 2 C kappa) and delta_lambda to the calibrated value;
// explicit values are kept and validated.
inline WeightParams weight_params_from(const KeyValueConfig& c) {
    WeightParams p = WeightParams::defaults();
    p.s = c.get_double({"weights.s"}, p.s);
    p.lambda0 = c.get_double({"weights.lambda0"}, p.lambda0);
    p.lambda_prime = c.get_double({"weights.lambda_prime"}, p.lambda_prime);
    p.sigma = c.get_double({"weights.sigma"}, p.sigma);
    p.beta = c.get_double({"weights.beta"}, p.beta);
    p.kappa = c.get_double({"weights.kappa"}, p.kappa);
    p.C_theta = c.get_double({"weights.C_theta"}, p.C_theta);
    p.delta_L = c.get_double({"weights.delta_L"}, p.delta_L);
    p.delta_B = c.get_double({"weights.delta_B"}, p.delta_B);
    p.q_tilde = c.get_double({"weights.q_tilde"}, 0.75 * p.s);
    p.mu = c.get_double({"weights.mu"}, 6.0 * (1.0 + 2.0 * p.theta_exponent()));
    const bool calibrate = !c.has("weights.delta_lambda");
    p.delta_lambda = c.get_double({"weights.delta_lambda"}, 1);
    validate(p);
    if (calibrate) {
        calibrate_delta_lambda(p);
        validate(p);
    }
    return p;
}

inline spectral::Grid grid_from(const KeyValueConfig& c) {
    spectral::Grid g;
    g.Nx = int(c.get_int({"grid.Nx", "Nx"}, g.Nx));
    g.Ny = int(c.get_int({"grid.Ny", "Ny"}, g.Ny));
    g.Ly = c.get_double({"grid.Ly", "Ly"}, g.Ly);
    g.dealias_fraction = c.get_double({"grid.dealias_fraction", "dealias_fraction"}, g.dealias_fraction);
    validate(g);
    return g;
}

// Simulation keys may carry the sim. prefix or be bare SimConfig names.
inline spectral::SimConfig sim_config_from(const KeyValueConfig& c, const WeightParams& p) {
    spectral::SimConfig s;
    s.nu = c.get_double({"sim.nu", "nu"}, s.nu);
    s.gamma = c.get_double({"sim.gamma", "gamma"}, s.gamma);
    s.system = spectral::parse_system(c.get_string({"sim.system", "system"}, "NSB3"));
    s.epsilon = c.get_double({"sim.epsilon", "epsilon"}, s.epsilon);
    s.s_init = c.get_double({"sim.s_init", "s_init"}, s.s_init);
    s.T = c.get_double({"sim.T", "T"}, s.T);
    s.dt = c.get_double({"sim.dt", "dt"}, s.dt);
    s.seed = std::uint64_t(c.get_int({"sim.seed", "seed"}, std::int64_t(s.seed)));
    s.lambda0 = c.get_double({"sim.lambda0"}, p.lambda0);
    s.cfl = c.get_double({"sim.cfl", "cfl"}, s.cfl);
    s.snapshot_count = int(c.get_int({"sim.snapshot_count", "snapshot_count"}, s.snapshot_count));
    s.shift_range = c.get_double({"sim.shift_range"}, s.shift_range);
    validate(s);
    return s;
}

inline DiagnosticsOptions diagnostics_options_from(const KeyValueConfig& c) {
    DiagnosticsOptions o;
    o.noise_floor = c.get_double({"diag.noise_floor"}, o.noise_floor);
    o.fit_lo = c.get_double({"diag.fit_lo"}, o.fit_lo);
    o.fit_hi = c.get_double({"diag.fit_hi"}, o.fit_hi);
    o.threads = int(c.get_int({"diag.threads"}, o.threads));
    if (!(o.noise_floor >= 0 && o.noise_floor < 1)) throw config_error("diag.noise_floor must lie in [0, 1)");
    return o;
}

}  // namespace shearlab
