#include "fbg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fbg {

namespace {

// Local maxima of the transmitted intensity below this fraction of its maximum
// are treated as ripple when looking for the leading pulse.
constexpr double kSignificantPeakFraction = 0.1;

constexpr std::int64_t kFiniteCheckInterval = 64;

double relative_l2(const FieldState& x, const FieldState& ref) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += std::norm(x.u_a[i] - ref.u_a[i]) + std::norm(x.u_b[i] - ref.u_b[i]);
        den += std::norm(ref.u_a[i]) + std::norm(ref.u_b[i]);
    }
    if (den == 0.0) return std::sqrt(num);
    return std::sqrt(num / den);
}

double transmitted_energy(const FieldState& s, const GratingProfile& profile, const SimGrid& grid) {
    double e = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.z(i) > profile.grating_end()) e += std::norm(s.u_a[i]);
    }
    return e * grid.dz();
}

ObservableSample sample(const FieldState& s, const GratingProfile& profile, const SimGrid& grid,
                        const EscapeTally& escape, double input_norm) {
    ObservableSample o;
    o.t_ps = s.t;
    o.norm = s.norm(grid.dz()) + escape.total();
    o.hamiltonian = compute_hamiltonian(s, profile, grid);
    double peak = 0.0;
    for (const auto& v : s.u_a) peak = std::max(peak, std::norm(v));
    o.peak_a = peak;
    o.transmitted_fraction =
        input_norm > 0.0 ? (transmitted_energy(s, profile, grid) + escape.a_right) / input_norm : 0.0;
    return o;
}

}  // namespace

std::int64_t SolverConfig::effective_stride() const {
    if (checkpoint_stride > 0) return checkpoint_stride;
    const auto n = grid.n_steps();
    auto s = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    return std::max<std::int64_t>(s, 1);
}

FieldHistory::FieldHistory(SimGrid grid, GratingProfile profile, Splitting splitting, std::int64_t stride)
    : grid_(std::move(grid)), profile_(std::move(profile)), splitting_(splitting), stride_(stride) {
    if (stride_ < 1) throw ValidationError("history: checkpoint stride must be positive");
}

void FieldHistory::add_checkpoint(std::int64_t step, FieldState state) {
    if (state.size() != grid_.size()) throw GridMismatchError("history: checkpoint size does not match grid");
    if (!checkpoints_.empty() && step <= checkpoints_.back().first) {
        throw std::logic_error("history: checkpoint steps must be strictly increasing");
    }
    checkpoints_.emplace_back(step, std::move(state));
}

void FieldHistory::finalize(std::int64_t final_step) {
    if (checkpoints_.empty() || checkpoints_.front().first != 0) {
        throw std::logic_error("history: missing initial checkpoint");
    }
    if (checkpoints_.back().first != final_step) throw std::logic_error("history: final checkpoint missing");
    grid_ = grid_.with_n_steps(std::max<std::int64_t>(final_step, 1));
}

void FieldHistory::replay_segment(std::size_t k, std::vector<FieldState>& out) const {
    if (k + 1 >= checkpoints_.size()) throw std::out_of_range("history: segment index out of range");
    const auto begin = checkpoints_[k].first;
    const auto end = checkpoints_[k + 1].first;
    const auto len = static_cast<std::size_t>(end - begin);
    const SplitStepKernel kern = kernel();
    out.resize(len);
    out[0] = checkpoints_[k].second;
    for (std::size_t j = 1; j < len; ++j) {
        out[j] = out[j - 1];
        kern.step(out[j]);
    }
    FieldState next = out[len - 1];
    kern.step(next);
    const double err = relative_l2(next, checkpoints_[k + 1].second);
    if (!(err <= 1e-10)) {
        std::ostringstream os;
        os << "checkpoint replay mismatch at step " << end << " (relative L2 " << err << ")";
        throw std::runtime_error(os.str());
    }
}

FieldState step_ncme(const FieldState& state, const GratingProfile& profile, const SimGrid& grid,
                     Splitting splitting) {
    if (state.size() != grid.size()) throw GridMismatchError("step_ncme: state is not on the grid");
    FieldState out = state;
    SplitStepKernel(grid, profile, splitting).step(out);
    if (!out.is_finite()) throw DivergenceError("step_ncme: non-finite field", 1);
    return out;
}

ForwardRun run_forward(const SolverConfig& config, const FieldState& initial) {
    return run_forward_until(config, initial, {});
}

ForwardRun run_forward_until(const SolverConfig& config, const FieldState& initial, const StopPredicate& stop) {
    const SimGrid& grid = config.grid;
    if (initial.size() != grid.size()) throw GridMismatchError("run_forward: initial state is not on the grid");
    if (!initial.is_finite()) throw DivergenceError("run_forward: non-finite initial field", 0);
    if (config.record_observables_every < 1) throw ValidationError("run_forward: record_observables_every must be >= 1");

    const SplitStepKernel kern(grid, config.profile, config.splitting);
    const std::int64_t stride = config.effective_stride();
    const double input_norm = initial.norm(grid.dz());

    ForwardRun run{FieldHistory(grid, config.profile, config.splitting, stride), {}, initial, {}};
    FieldState& s = run.final_state;
    run.history.add_checkpoint(0, s);
    run.observables.samples.push_back(sample(s, config.profile, grid, run.escape, input_norm));

    std::int64_t step = 0;
    const std::int64_t cap = grid.n_steps();
    while (step < cap) {
        kern.step(s, &run.escape);
        ++step;
        if (step % kFiniteCheckInterval == 0 || step == cap) {
            if (!s.is_finite()) throw DivergenceError("run_forward: non-finite field", step);
        }
        if (input_norm > 0.0 && run.escape.total() > config.edge_loss_limit * input_norm) {
            std::ostringstream os;
            os << "run_forward: energy escaping through the window edges exceeds "
               << config.edge_loss_limit << " of the input";
            throw ValidationError(os.str() + " at step " + std::to_string(step));
        }
        const bool stopping = stop && stop(step, s, run.escape);
        const bool last = stopping || step == cap;
        if (step % stride == 0 || last) run.history.add_checkpoint(step, s);
        if (step % config.record_observables_every == 0 || last) {
            if (!s.is_finite()) throw DivergenceError("run_forward: non-finite field", step);
            run.observables.samples.push_back(sample(s, config.profile, grid, run.escape, input_norm));
        }
        if (stopping) break;
    }
    run.history.finalize(step);
    return run;
}

double compute_hamiltonian(const FieldState& state, const GratingProfile& profile, const SimGrid& grid) {
    const std::size_t n = grid.size();
    if (state.size() != n) throw GridMismatchError("compute_hamiltonian: state is not on the grid");
    const double dz = grid.dz();
    const auto& a = state.u_a;
    const auto& b = state.u_b;
    auto at = [n](const ComplexField& f, std::ptrdiff_t i) -> cplx {
        return (i < 0 || i >= static_cast<std::ptrdiff_t>(n)) ? cplx{} : f[static_cast<std::size_t>(i)];
    };
    const cplx iu(0.0, 1.0);
    double number = 0.0;
    double kinetic = 0.0;
    double coupling = 0.0;
    double self = 0.0;
    double cross = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto i = static_cast<std::ptrdiff_t>(k);
        const double ia = std::norm(a[k]);
        const double ib = std::norm(b[k]);
        const double z = grid.z(k);
        const double g = profile.gamma_cell(z, dz);
        number += ia + ib;
        const cplx da = (at(a, i + 1) - at(a, i - 1)) / (2.0 * dz);
        const cplx db = (at(b, i + 1) - at(b, i - 1)) / (2.0 * dz);
        kinetic += (iu * (std::conj(a[k]) * da - std::conj(b[k]) * db)).real();
        coupling += profile.kappa_cell(z, dz) * 2.0 * (std::conj(a[k]) * b[k]).real();
        self += 0.5 * g * (ia * ia + ib * ib);
        cross += 2.0 * g * ia * ib;
    }
    return -grid.v_g() * dz * (profile.delta() * number + kinetic + coupling + self + cross);
}

Gate gate_first_pulse(const FieldState& final_state, const GratingProfile& profile, const SimGrid& grid,
                      double threshold, double input_peak) {
    if (!(threshold > 0.0 && threshold < 1.0)) throw ValidationError("gate: threshold must lie in (0, 1)");
    const std::size_t n = grid.size();
    if (final_state.size() != n) throw GridMismatchError("gate: state is not on the grid");
    std::size_t r0 = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (grid.z(i) > profile.grating_end()) {
            r0 = i;
            break;
        }
    }
    if (r0 >= n) throw NoTransmittedPulse("no transmitted pulse: window ends at the grating");
    std::vector<double> I(n, 0.0);
    double imax = 0.0;
    for (std::size_t i = r0; i < n; ++i) {
        I[i] = std::norm(final_state.u_a[i]);
        imax = std::max(imax, I[i]);
    }
    if (!(imax >= 1e-12 * input_peak) || imax == 0.0) throw NoTransmittedPulse("no transmitted pulse");

    std::size_t peak = n;
    for (std::size_t i = n; i-- > r0;) {
        const bool left_ok = i == r0 || I[i] >= I[i - 1];
        const bool right_ok = i + 1 == n || I[i] >= I[i + 1];
        if (left_ok && right_ok && I[i] >= kSignificantPeakFraction * imax) {
            peak = i;
            break;
        }
    }
    const double floor = threshold * I[peak];
    std::size_t lo = peak;
    while (lo > r0 && I[lo - 1] >= floor) --lo;
    std::size_t hi = peak;
    while (hi + 1 < n && I[hi + 1] >= floor) ++hi;
    return {grid.z(lo), grid.z(hi), lo, hi + 1};
}

double transmittance(const FieldState& final_state, const FieldState& initial, const GratingProfile& profile,
                     const SimGrid& grid, const EscapeTally& escape) {
    const double in = initial.norm(grid.dz());
    if (!(in > 0.0)) throw ValidationError("transmittance: input energy is zero");
    return (transmitted_energy(final_state, profile, grid) + escape.a_right) / in;
}

double gated_energy(const FieldState& s, const Gate& g, double dz) {
    double e = 0.0;
    for (std::size_t i = g.i_lo; i < g.i_hi; ++i) e += std::norm(s.u_a[i]);
    return e * dz;
}

}  // namespace fbg
