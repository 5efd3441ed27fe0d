#pragma once

// Classical time-domain solver for the nonlinear coupled-mode equations, with
// checkpointed history for the adjoint pass and run diagnostics.

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fbg/scheme.hpp"
#include "fbg/types.hpp"

namespace fbg {

class NoTransmittedPulse : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SolverConfig {
    SimGrid grid;
    GratingProfile profile;
    Splitting splitting = Splitting::lie;
    /// 0 selects ceil(sqrt(n_steps)).
    std::int64_t checkpoint_stride = 0;
    std::int64_t record_observables_every = 100;
    /// Abort when the escaped fraction of the input energy exceeds this.
    double edge_loss_limit = std::numeric_limits<double>::infinity();

    std::int64_t effective_stride() const;
};

struct ObservableSample {
    double t_ps = 0.0;
    double norm = 0.0;  // window norm plus energy escaped through the edges
    double hamiltonian = 0.0;
    double peak_a = 0.0;
    double transmitted_fraction = 0.0;
};

struct RunObservables {
    std::vector<ObservableSample> samples;
};

/// Start-of-step classical fields at every multiple of the stride plus the final
/// step; intermediate steps are recomputed on demand.
class FieldHistory {
public:
    FieldHistory(SimGrid grid, GratingProfile profile, Splitting splitting, std::int64_t stride);

    const SimGrid& grid() const noexcept { return grid_; }
    const GratingProfile& profile() const noexcept { return profile_; }
    Splitting splitting() const noexcept { return splitting_; }
    std::int64_t stride() const noexcept { return stride_; }
    std::int64_t n_steps() const noexcept { return grid_.n_steps(); }
    const std::vector<std::pair<std::int64_t, FieldState>>& checkpoints() const noexcept { return checkpoints_; }

    void add_checkpoint(std::int64_t step, FieldState state);
    /// Marks the history complete at `final_step`; the grid's step count is updated to match.
    void finalize(std::int64_t final_step);

    /// Recomputes the start-of-step fields of checkpoint segment k (steps
    /// checkpoint[k] .. checkpoint[k+1]-1) into `out`. Throws if the replay does
    /// not reproduce checkpoint k+1.
    void replay_segment(std::size_t k, std::vector<FieldState>& out) const;

    SplitStepKernel kernel() const { return SplitStepKernel(grid_, profile_, splitting_); }

private:
    SimGrid grid_;
    GratingProfile profile_;
    Splitting splitting_;
    std::int64_t stride_;
    std::vector<std::pair<std::int64_t, FieldState>> checkpoints_;
};

struct ForwardRun {
    FieldHistory history;
    RunObservables observables;
    FieldState final_state;
    EscapeTally escape;
};

/// One step of the nonlinear split-step scheme.
FieldState step_ncme(const FieldState& state, const GratingProfile& profile, const SimGrid& grid,
                     Splitting splitting = Splitting::lie);

/// Runs config.grid.n_steps steps.
ForwardRun run_forward(const SolverConfig& config, const FieldState& initial);

/// Runs until `stop(step, state, escape)` returns true or config.grid.n_steps is
/// reached; the returned history's grid carries the actual step count.
using StopPredicate = std::function<bool(std::int64_t, const FieldState&, const EscapeTally&)>;
ForwardRun run_forward_until(const SolverConfig& config, const FieldState& initial, const StopPredicate& stop);

/// Classical value of the field Hamiltonian: -v_g { delta N + i int (a* a_z - b* b_z)
/// + kappa int (a* b + b* a) + Gamma/2 int (|a|^4 + |b|^4) + 2 Gamma int |a|^2 |b|^2 },
/// centred differences for d/dz.
double compute_hamiltonian(const FieldState& state, const GratingProfile& profile, const SimGrid& grid);

struct Gate {
    double z_lo = 0.0;
    double z_hi = 0.0;
    std::size_t i_lo = 0;
    std::size_t i_hi = 0;  // exclusive
};

inline constexpr double kDefaultGateThreshold = 1e-3;

/// Interval around the leading transmitted pulse (largest-z significant local
/// maximum of |u_a|^2 beyond the grating), extended until the intensity falls
/// below threshold * peak.
Gate gate_first_pulse(const FieldState& final_state, const GratingProfile& profile, const SimGrid& grid,
                      double threshold, double input_peak);

/// Fraction of the input energy carried by u_a beyond the grating end, counting
/// forward energy that has already left through z_max.
double transmittance(const FieldState& final_state, const FieldState& initial, const GratingProfile& profile,
                     const SimGrid& grid, const EscapeTally& escape = {});

/// Energy of u_a on [i_lo, i_hi).
double gated_energy(const FieldState& s, const Gate& g, double dz);

}  // namespace fbg
