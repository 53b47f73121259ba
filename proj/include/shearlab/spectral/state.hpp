#pragma once

#include <cstdint>
#include <string>

#include "shearlab/spectral/grid.hpp"

namespace shearlab::spectral {

// NSB3: buoyancy feedback with the u^y source in the density equation.
// NSB4: density is transported only.
enum class System { NSB3, NSB4 };

inline const char* system_name(System s) { return s == System::NSB3 ? "NSB3" : "NSB4"; }

inline System parse_system(const std::string& s) {
    if (s == "NSB3" || s == "nsb3") return System::NSB3;
    if (s == "NSB4" || s == "nsb4") return System::NSB4;
    throw config_error("system must be NSB3 or NSB4, got '" + s + "'");
}

struct SimConfig {
    double nu = 1;
    double gamma = 1;
    System system = System::NSB3;
    double epsilon = 1e-3;
    double s_init = 1;
    double T = 50;
    double dt = 0.05;
    std::uint64_t seed = 1;

    double lambda0 = 1;        // Gevrey radius of the initial data
    double cfl = 0.5;          // dt * (|u^x - t u^y|/dx + |u^y|/dy) limit
    int snapshot_count = 50;   // snapshots at T j / snapshot_count
    double shift_range = 2;    // per-k packet centres drawn from [-r, r]
};

inline void validate(const SimConfig& c) {
    if (!(c.nu >= 0)) throw config_error("sim: nu >= 0 required");
    if (!(c.gamma >= 0)) throw config_error("sim: gamma >= 0 required");
    if (c.system == System::NSB3 && !(c.gamma > 0)) throw config_error("sim: NSB3 requires gamma > 0");
    if (!(c.epsilon >= 0)) throw config_error("sim: epsilon >= 0 required");
    if (!(c.s_init > 0 && c.s_init <= 1)) throw config_error("sim: s_init in (0, 1]");
    if (!(c.T >= 0)) throw config_error("sim: T >= 0 required");
    if (!(c.dt > 0)) throw config_error("sim: dt > 0 required");
    if (!(c.lambda0 > 0)) throw config_error("sim: lambda0 > 0 required");
    if (!(c.cfl > 0)) throw config_error("sim: cfl > 0 required");
    if (c.snapshot_count < 1) throw config_error("sim: snapshot_count >= 1 required");
}

struct SimState {
    SpectralField omega;
    SpectralField theta;
    double t = 0;
};

}  // namespace shearlab::spectral
