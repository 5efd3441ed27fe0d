#pragma once

#include "fbg/solver.hpp"

namespace testutil {

// 16 cm window, grating on [4, 12], short pulse starting at 2.5 cm.
inline fbg::SolverConfig small_config(double kappa = 10.0, double gamma = 0.018, std::int64_t steps = 400,
                                      double dz = 0.01) {
    const int n = static_cast<int>(std::lround(16.0 / dz)) + 1;
    const auto grid = fbg::SimGrid::with_steps(0.0, 16.0, n, fbg::kDefaultGroupVelocity, steps);
    fbg::GratingProfile::Params p;
    p.kappa0 = kappa;
    p.gamma = gamma;
    p.grating_start = 4.0;
    p.grating_end = 12.0;
    fbg::SolverConfig c{grid, fbg::GratingProfile(p)};
    c.record_observables_every = 50;
    return c;
}

inline fbg::FieldState small_pulse(const fbg::SimGrid& grid, double peak = 200.0, double detune = 12.0) {
    return fbg::sech_pulse(grid, 2.5, 10.0, peak, detune);
}

}  // namespace testutil
