#pragma once

#include <cmath>
#include <functional>
#include <sstream>

#include "shearlab/spectral/init.hpp"
#include "shearlab/spectral/snapshot.hpp"
#include "shearlab/spectral/solver.hpp"

namespace shearlab::spectral {

struct RunResult {
    SimState final;
    ZeroModeHistory zero_modes;
    double dt = 0;
    long steps = 0;
    int snapshots = 0;
    double max_divergence = 0;  // relative, over checkpoints
};

// Step size actually used: the largest value <= dt that divides the
// snapshot spacing.
inline double effective_dt(const SimConfig& c) {
    if (c.T == 0) return c.dt;
    double spacing = c.T / c.snapshot_count;
    return spacing / std::ceil(spacing / c.dt - 1e-9);
}

// Integrates from the generated initial data to T. on_snapshot sees the
// state at t = T j / snapshot_count (only t = 0 when T = 0).
inline RunResult run(const Grid& g, const SimConfig& c,
                     const std::function<void(const SimState&, int)>& on_snapshot = {}) {
    Solver solver(g, c);
    RunResult res;
    SimState s = init_perturbation(g, c);
    res.dt = effective_dt(c);
    auto checkpoint = [&](int index) {
        if (hermitian_defect(g, s.omega) != 0 || hermitian_defect(g, s.theta) != 0)
            throw numerical_error("conjugate symmetry lost at t=" + std::to_string(s.t));
        if (s.omega(0, 0) != cplx{} || s.theta(0, 0) != cplx{})
            throw numerical_error("mean drift at t=" + std::to_string(s.t));
        double div = divergence_residual(g, velocity_from_vorticity(g, s.omega, s.t), s.t);
        res.max_divergence = std::max(res.max_divergence, div);
        if (div > 1e-13) throw numerical_error("divergence residual " + std::to_string(div));
        if (on_snapshot) on_snapshot(s, index);
        ++res.snapshots;
    };
    res.zero_modes.record(g, s);
    checkpoint(0);
    if (c.T > 0) {
        long per_snapshot = std::lround(c.T / c.snapshot_count / res.dt);
        for (int snap = 1; snap <= c.snapshot_count; ++snap) {
            for (long q = 0; q < per_snapshot; ++q) {
                solver.step(s, res.dt);
                ++res.steps;
                res.zero_modes.record(g, s);
            }
            s.t = c.T * snap / c.snapshot_count;  // drop accumulated rounding in the clock
            res.zero_modes.t.back() = s.t;
            checkpoint(snap);
        }
    }
    res.final = s;
    return res;
}

}  // namespace shearlab::spectral
