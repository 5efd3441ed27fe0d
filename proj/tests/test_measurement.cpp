#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "fbg/measurement.hpp"
#include "helpers.hpp"

using namespace fbg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using testutil::small_config;
using testutil::small_pulse;

namespace {

// Pulse that has fully crossed the grating region [4, 12].
ForwardRun crossed(double kappa, double gamma, double peak = 200.0, std::int64_t steps = 1150, double detune = 12.0) {
    auto cfg = small_config(kappa, gamma, steps);
    return run_forward(cfg, small_pulse(cfg.grid, peak, detune));
}

}  // namespace

TEST_CASE("projection is the normalized gated output field") {
    const auto run = crossed(0.0, 0.0);
    const auto& g = run.history.grid();
    const Gate gate = gate_first_pulse(run.final_state, run.history.profile(), g, 1e-3, 200.0);
    MeasurementSpec spec{MeasurementKind::homodyne, 0.3, gate, true};
    const auto f = build_projection(run.final_state, spec, g);
    CHECK_THAT(f.sq_norm(g.dz()), WithinRel(1.0, 1e-12));
    CHECK(f.f_a[gate.i_lo - 1] == cplx{});
    const std::size_t pk = (gate.i_lo + gate.i_hi) / 2;
    CHECK_THAT(std::arg(f.f_a[pk] / run.final_state.u_a[pk]), WithinAbs(0.3, 1e-12));
    CHECK_THAT(coherent_variance(f, g.dz()), WithinRel(0.25, 1e-12));
}

TEST_CASE("linear propagation leaves shot noise untouched") {
    // Gamma = 0: every projection keeps R = 1.
    const auto run = crossed(10.0, 0.0, 200.0, 1250, 30.0);
    const auto& g = run.history.grid();
    const Gate gate = gate_first_pulse(run.final_state, run.history.profile(), g, 1e-3, 200.0);
    const double pn = squeezing_ratio_only(build_projection(run.final_state, {MeasurementKind::photon_number, 0.0, gate}, g),
                                           run.history);
    CHECK_THAT(pn, WithinAbs(1.0, 1e-9));
    const std::vector<double> th{0.0, 0.7, 1.5, 2.9};
    const auto qs = quadrature_sweep(run.history, run.final_state, gate, th);
    for (const auto& p : qs.points) CHECK_THAT(p.ratio, WithinAbs(1.0, 1e-9));
}

TEST_CASE("pure self-phase modulation keeps photon-number noise at shot noise") {
    // kappa = 0: Kerr only. Photon number is conserved pointwise, so the
    // photon-number ratio of the whole pulse is 1 while some quadrature squeezes.
    const auto run = crossed(0.0, 0.018);
    const auto& g = run.history.grid();
    const Gate gate = gate_first_pulse(run.final_state, run.history.profile(), g, 1e-6, 200.0);
    const auto f = build_projection(run.final_state, {MeasurementKind::photon_number, 0.0, gate}, g);
    CHECK_THAT(squeezing_ratio_only(f, run.history), WithinAbs(1.0, 1e-9));

    std::vector<double> th;
    // strong Kerr phase: the squeezed quadrature lies just off the amplitude one
    for (int j = -100; j <= 100; ++j) th.push_back(1e-3 * j);
    const auto qs = quadrature_sweep(run.history, run.final_state, gate, th);
    CHECK(qs.min_ratio < 0.5);
    CHECK(qs.argmin_theta != 0.0);
}

TEST_CASE("quadrature sweep at theta = 0 equals the photon-number ratio") {
    const auto run = crossed(10.0, 0.018, 200.0, 1250, 30.0);
    const auto& g = run.history.grid();
    const Gate gate = gate_first_pulse(run.final_state, run.history.profile(), g, 1e-3, 200.0);
    const auto f = build_projection(run.final_state, {MeasurementKind::photon_number, 0.0, gate}, g);
    const double r = squeezing_ratio_only(f, run.history);
    const double zero[1] = {0.0};
    CHECK(quadrature_sweep(run.history, run.final_state, gate, zero).points[0].ratio == r);
    // and a single homodyne back-propagation agrees to round-off
    const auto fh = build_projection(run.final_state, {MeasurementKind::homodyne, 1.1, gate}, g);
    const double one[1] = {1.1};
    CHECK_THAT(quadrature_sweep(run.history, run.final_state, gate, one).points[0].ratio,
               WithinRel(squeezing_ratio_only(fh, run.history), 1e-12));
}

TEST_CASE("pulse metrics inside the gate") {
    const auto run = crossed(0.0, 0.0);
    const auto& g = run.history.grid();
    const Gate gate = gate_first_pulse(run.final_state, run.history.profile(), g, 1e-3, 200.0);
    const auto m = gated_pulse_metrics(run.final_state, gate, g);
    CHECK_THAT(m.peak, WithinRel(200.0, 1e-9));
    CHECK_THAT(m.fwhm_ps, WithinRel(10.0, 2e-2));
}

TEST_CASE("measurement kinds round-trip through text") {
    CHECK(measurement_kind_from_string(to_string(MeasurementKind::homodyne)) == MeasurementKind::homodyne);
    CHECK_THROWS_AS(measurement_kind_from_string("heterodyne"), ValidationError);
}
