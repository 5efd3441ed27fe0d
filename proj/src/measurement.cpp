#include "fbg/measurement.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace fbg {

std::string_view to_string(MeasurementKind k) {
    return k == MeasurementKind::photon_number ? "photon_number" : "homodyne";
}

MeasurementKind measurement_kind_from_string(std::string_view s) {
    if (s == "photon_number") return MeasurementKind::photon_number;
    if (s == "homodyne") return MeasurementKind::homodyne;
    throw ValidationError("measurement kind must be 'photon_number' or 'homodyne', got '" + std::string(s) + "'");
}

ProjectionFunction build_projection(const FieldState& final_state, const MeasurementSpec& spec, const SimGrid& grid) {
    const std::size_t n = grid.size();
    if (final_state.size() != n) throw GridMismatchError("build_projection: field not on grid");
    std::size_t lo = 0;
    std::size_t hi = n;
    if (spec.gated) {
        if (!(spec.gate.i_lo < spec.gate.i_hi && spec.gate.i_hi <= n)) {
            throw ValidationError("build_projection: gate is empty or outside the window");
        }
        lo = spec.gate.i_lo;
        hi = spec.gate.i_hi;
    }
    double energy = 0.0;
    for (std::size_t i = lo; i < hi; ++i) energy += std::norm(final_state.u_a[i]);
    energy *= grid.dz();
    if (!(energy > 0.0)) throw ValidationError("build_projection: zero energy inside the gate");

    const double theta = spec.kind == MeasurementKind::homodyne ? spec.lo_phase : 0.0;
    const cplx scale = std::polar(1.0 / std::sqrt(energy), theta);
    ProjectionFunction f(n);
    for (std::size_t i = lo; i < hi; ++i) f.f_a[i] = scale * final_state.u_a[i];
    return f;
}

double coherent_variance(const ProjectionFunction& F, double dz) { return 0.25 * F.sq_norm(dz); }

double squeezing_ratio_only(const ProjectionFunction& f_T, const FieldHistory& history) {
    const double dz = history.grid().dz();
    const double den = f_T.sq_norm(dz);
    if (!(den > 0.0)) throw ValidationError("squeezing_ratio: projection has zero norm");
    const auto back = backpropagate(f_T, history);
    return back.total_sq_norm(0) / den;
}

PulseMetrics gated_pulse_metrics(const FieldState& final_state, const Gate& gate, const SimGrid& grid) {
    std::vector<double> intensity;
    intensity.reserve(gate.i_hi - gate.i_lo);
    for (std::size_t i = gate.i_lo; i < gate.i_hi; ++i) intensity.push_back(std::norm(final_state.u_a[i]));
    PulseMetrics m;
    if (intensity.empty()) return m;
    m.peak = *std::max_element(intensity.begin(), intensity.end());
    m.fwhm_ps = intensity_fwhm(intensity, grid.dz()) / grid.v_g();
    return m;
}

SqueezeResult squeezing_ratio(const ProjectionFunction& f_T, const ForwardRun& run, const Gate& gate) {
    const auto& hist = run.history;
    SqueezeResult r = SqueezeResult::from_ratio(squeezing_ratio_only(f_T, hist));
    const FieldState& initial = hist.checkpoints().front().second;
    r.transmittance = transmittance(run.final_state, initial, hist.profile(), hist.grid(), run.escape);
    r.gate_lo = gate.z_lo;
    r.gate_hi = gate.z_hi;
    const auto pm = gated_pulse_metrics(run.final_state, gate, hist.grid());
    r.pulse_fwhm_ps = pm.fwhm_ps;
    r.peak_intensity = pm.peak;
    return r;
}

QuadratureSweep quadrature_sweep(const FieldHistory& history, const FieldState& final_state, const Gate& gate,
                                 std::span<const double> phases, bool gated) {
    if (phases.empty()) throw ValidationError("quadrature_sweep: no phases given");
    const SimGrid& grid = history.grid();
    MeasurementSpec spec{MeasurementKind::photon_number, 0.0, gate, gated};
    const ProjectionFunction f0 = build_projection(final_state, spec, grid);
    ProjectionFunction f1 = f0;
    f1 *= cplx(0.0, 1.0);
    const std::array<ProjectionFunction, 2> basis{f0, f1};
    const auto back = backpropagate(basis, history);

    const double g00 = back.total_gram(0, 0);
    const double g11 = back.total_gram(1, 1);
    const double g01 = back.total_gram(0, 1);
    const double den = f0.sq_norm(grid.dz());

    QuadratureSweep out;
    out.min_ratio = std::numeric_limits<double>::infinity();
    for (double th : phases) {
        const double c = std::cos(th);
        const double s = std::sin(th);
        const double r = (c * c * g00 + s * s * g11 + 2.0 * c * s * g01) / den;
        out.points.push_back({th, r});
        if (r < out.min_ratio) {
            out.min_ratio = r;
            out.argmin_theta = th;
        }
    }
    return out;
}

}  // namespace fbg
