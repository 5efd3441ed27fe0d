#pragma once

// Measurement characteristic functions, coherent-input variances and squeezing
// ratios of the detected (gated) transmitted pulse.
//
// With coherent input every fluctuation mode is vacuum, and the equal-time
// commutator [u(z1), u^dag(z2)] = delta(z1 - z2) gives
//     var <F|u> = 1/4 int |F_a|^2 + |F_b|^2 dz.
// The squeezing ratio of an output projection f is therefore the squared norm of
// its back-propagated image over that of f itself.

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fbg/adjoint.hpp"
#include "fbg/solver.hpp"
#include "fbg/types.hpp"

namespace fbg {

enum class MeasurementKind { photon_number, homodyne };

std::string_view to_string(MeasurementKind k);
MeasurementKind measurement_kind_from_string(std::string_view s);

struct MeasurementSpec {
    MeasurementKind kind = MeasurementKind::photon_number;
    double lo_phase = 0.0;  // radians, homodyne only
    Gate gate;
    /// false: use the whole window instead of the gate.
    bool gated = true;
};

/// f_a = e^{i theta} U_a / sqrt(gated energy) inside the gate, f_b = 0.
ProjectionFunction build_projection(const FieldState& final_state, const MeasurementSpec& spec, const SimGrid& grid);

/// 1/4 sq_norm(F).
double coherent_variance(const ProjectionFunction& F, double dz);

/// R = |F_T|^2 / |f_T|^2 with escaped parts of F_T included.
double squeezing_ratio_only(const ProjectionFunction& f_T, const FieldHistory& history);

/// Ratio plus transmittance, gate and output pulse metrics of a forward run.
SqueezeResult squeezing_ratio(const ProjectionFunction& f_T, const ForwardRun& run, const Gate& gate);

struct QuadraturePoint {
    double theta = 0.0;
    double ratio = 1.0;
};

struct QuadratureSweep {
    std::vector<QuadraturePoint> points;
    double argmin_theta = 0.0;
    double min_ratio = 1.0;
};

/// Homodyne ratios R(theta) with the local oscillator equal to the gated output
/// pulse. Uses that back-propagation is real-linear: only f and i f are pulled
/// back, and R(theta) follows from their 2x2 input-side Gram matrix.
QuadratureSweep quadrature_sweep(const FieldHistory& history, const FieldState& final_state, const Gate& gate,
                                 std::span<const double> phases, bool gated = true);

/// Output pulse metrics inside the gate: FWHM in ps (via v_g) and peak |u_a|^2.
struct PulseMetrics {
    double fwhm_ps = 0.0;
    double peak = 0.0;
};
PulseMetrics gated_pulse_metrics(const FieldState& final_state, const Gate& gate, const SimGrid& grid);

}  // namespace fbg
