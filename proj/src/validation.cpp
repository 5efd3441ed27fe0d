#include "fbg/validation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fbg/adjoint.hpp"
#include "fbg/covariance.hpp"
#include "fbg/measurement.hpp"

namespace fbg {

OracleInstance make_oracle_instance(const OracleValidationOptions& opt) {
    if (opt.n_points < 16 || static_cast<std::size_t>(opt.n_points) > kMaxOraclePoints) {
        throw ValidationError("validate: points must lie in [16, 512]");
    }
    if (opt.n_steps < 1) throw ValidationError("validate: steps must be >= 1");
    constexpr double dz = 0.05;
    const double z_max = dz * (opt.n_points - 1);
    const SimGrid grid = SimGrid::with_steps(0.0, z_max, opt.n_points, kDefaultGroupVelocity, opt.n_steps);
    GratingProfile::Params p;
    p.kappa0 = 10.0;
    p.gamma = 0.018;
    p.grating_start = 0.0;
    p.grating_end = z_max;
    const GratingProfile profile(p);
    // Pulse spans about a tenth of the window; width scales with the window.
    const double w = z_max / 26.0;
    const double fwhm_time = w * 2.0 * std::acosh(std::sqrt(2.0)) / grid.v_g();
    FieldState init = sech_pulse(grid, 0.5 * z_max, fwhm_time, 170.0, 0.0);
    SolverConfig cfg{grid, profile, opt.splitting};
    cfg.record_observables_every = std::max<std::int64_t>(opt.n_steps, 1);
    return {cfg, std::move(init)};
}

OracleValidationReport run_oracle_validation(const OracleValidationOptions& opt) {
    const OracleInstance inst = make_oracle_instance(opt);
    const ForwardRun run = run_forward(inst.config, inst.initial);
    const SimGrid& grid = run.history.grid();
    const double dz = grid.dz();

    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> normal;
    std::vector<ProjectionFunction> fs;
    for (int r = 0; r < opt.random_projections; ++r) {
        ProjectionFunction f(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            f.f_a[i] = {normal(rng), normal(rng)};
            f.f_b[i] = {normal(rng), normal(rng)};
        }
        f *= 1.0 / std::sqrt(f.sq_norm(dz));
        fs.push_back(std::move(f));
    }
    MeasurementSpec spec;
    spec.gated = false;
    fs.push_back(build_projection(run.final_state, spec, grid));

    const auto back = backpropagate(fs, run.history);
    const auto cov = forward_covariance(run.history);

    OracleValidationReport rep;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const double adj = 0.25 * back.total_sq_norm(i);
        const double orc = oracle_variance(cov, fs[i]);
        const double rel = std::abs(adj - orc) / std::abs(orc);
        rep.max_relative_error = std::max(rep.max_relative_error, rel);
        ++rep.projections_checked;
        if (i + 1 == fs.size()) {
            rep.photon_number_relative_error = rel;
            rep.photon_number_ratio = adj / coherent_variance(fs[i], dz);
        }
    }

    if (opt.symplectic_check_every > 0) {
        std::vector<FieldState> segment;
        const auto& cps = run.history.checkpoints();
        for (std::size_t k = 0; k + 1 < cps.size(); ++k) {
            run.history.replay_segment(k, segment);
            const auto len = cps[k + 1].first - cps[k].first;
            for (std::int64_t j = 0; j < len; ++j) {
                if ((cps[k].first + j) % opt.symplectic_check_every != 0) continue;
                const auto s = one_step_map(run.history, segment[static_cast<std::size_t>(j)]);
                rep.max_symplectic_defect = std::max(rep.max_symplectic_defect, symplectic_defect(s));
            }
        }
    }
    return rep;
}

}  // namespace fbg
