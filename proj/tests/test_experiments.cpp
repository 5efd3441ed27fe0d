#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "fbg/experiments.hpp"

using namespace fbg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Short grating keeps each pipeline to about a second.
RunConfig quick() {
    RunConfig c;
    c.length = 10.0;
    c.dz = 0.02;
    return c;
}

SweepTable synthetic(const std::vector<double>& x, const std::vector<double>& t, const std::vector<double>& r) {
    SweepTable tab;
    for (std::size_t i = 0; i < x.size(); ++i) {
        SweepRow row;
        row.value = x[i];
        SqueezeResult s = SqueezeResult::from_ratio(r[i]);
        s.transmittance = t[i];
        row.result = s;
        tab.rows.push_back(row);
    }
    return tab;
}

}  // namespace

TEST_CASE("geometry: pads, grating and launch point") {
    RunConfig c;
    c.pad_before = 16.0;
    const Geometry g = make_geometry(c, 12.0, 10);
    CHECK(g.profile.grating_start() == 16.0);
    CHECK(g.profile.grating_end() == 66.0);
    CHECK(g.pulse_center == 8.0);
    CHECK_THAT(g.grid.z_max(), WithinAbs(78.0, 1e-9));
    CHECK_THAT(g.grid.dz(), WithinRel(0.01, 1e-12));
    CHECK(g.profile.delta() == 0.0);
}

TEST_CASE("automatic run length lets the transmitted pulse clear the grating") {
    const RunConfig c = quick();
    const ClassicalRun cr = run_classical(c);
    CHECK(cr.auto_time);
    const auto& obs = cr.run.observables.samples;
    CHECK(obs.back().transmitted_fraction > 0.3);
    // the leading transmitted pulse sits wholly behind the grating
    const Gate gate = gate_first_pulse(cr.run.final_state, cr.geometry.profile, cr.run.history.grid(),
                                       c.gate_threshold, c.peak_intensity);
    CHECK(gate.z_lo > cr.geometry.profile.grating_end());
    CHECK(cr.run.escape.a_right <= 1e-9 * cr.initial.norm(cr.run.history.grid().dz()));
}

TEST_CASE("pipeline is deterministic and rows match standalone runs") {
    const RunConfig c = quick();
    SweepSpec spec{SweepVariable::input_intensity, {5.0, 4.0}, c};
    const SweepTable t = run_sweep(spec, 2);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0].value == 4.0);  // sorted
    RunConfig c4 = c;
    c4.peak_intensity = 4.0;
    const SqueezeResult solo = run_squeeze(c4);
    REQUIRE(t.rows[0].result);
    CHECK(t.rows[0].result->ratio == solo.ratio);
    CHECK(t.rows[0].result->transmittance == solo.transmittance);
    CHECK(sweep_csv(run_sweep(spec, 1)) == sweep_csv(t));
}

TEST_CASE("phase sweep rows match standalone homodyne runs") {
    const RunConfig c = quick();
    SweepSpec spec{SweepVariable::lo_phase, {0.0, 0.4, std::numbers::pi / 2}, c};
    const SweepTable t = run_sweep(spec);
    RunConfig h = row_config(spec, 0.4);
    CHECK(h.kind == MeasurementKind::homodyne);
    REQUIRE(t.rows[1].result);
    CHECK(t.rows[1].result->ratio == run_squeeze(h).ratio);
    // theta = 0 homodyne is the photon-number measurement
    CHECK(t.rows[0].result->ratio == run_squeeze(c).ratio);
}

TEST_CASE("failing rows are recorded and the sweep continues") {
    RunConfig c = quick();
    SweepSpec spec{SweepVariable::grating_length, {10.0, -5.0}, c};
    const SweepTable t = run_sweep(spec, 1);
    CHECK_FALSE(t.rows[0].result);
    CHECK(t.rows[0].error.find("length") != std::string::npos);
    CHECK(t.rows[1].result);
    const std::string csv = sweep_csv(t);
    CHECK(csv.rfind(std::string(kSweepCsvHeader), 0) == 0);
    CHECK(csv.find("-5,,,,,,\"") != std::string::npos);
}

TEST_CASE("default sweep grids") {
    const auto I = default_values(SweepVariable::input_intensity);
    CHECK(I.size() == 41);
    CHECK(I.front() == 3.0);
    CHECK(I.back() == 7.0);
    const auto L = default_values(SweepVariable::grating_length);
    CHECK(L.size() == 19);
    const auto th = default_values(SweepVariable::lo_phase);
    CHECK(th.size() == 65);
    CHECK(th.back() == std::numbers::pi);
    CHECK(default_values(SweepVariable::apodization_slope).size() == 5);
    CHECK_THROWS_AS(sweep_variable_from_string("intensity"), ValidationError);
    CHECK_THROWS_AS(run_sweep({SweepVariable::grating_length, {}, RunConfig{}}), ValidationError);
}

TEST_CASE("alignment report") {
    const std::vector<double> x{1, 2, 3, 4, 5, 6, 7, 8};
    SECTION("monotone curves have no extrema") {
        const auto rep = alignment_report(synthetic(x, {1, 2, 3, 4, 5, 6, 7, 8}, {8, 7, 6, 5, 4, 3, 2, 1}));
        CHECK(rep.no_extrema);
        CHECK(rep.summary == "no extrema");
    }
    SECTION("aligned extrema give zero offsets") {
        const auto rep = alignment_report(
            synthetic(x, {1, 3, 2, 1, 4, 2, 5, 1}, {1.0, 0.5, 0.8, 0.9, 0.4, 0.7, 0.3, 0.9}));
        REQUIRE(rep.pairs.size() == 3);
        for (const auto& p : rep.pairs) CHECK(p.offset == 0.0);
    }
    SECTION("offsets in sweep units") {
        const auto rep =
            alignment_report(synthetic(x, {1, 2, 3, 2, 1, 1, 1, 1}, {1.0, 0.9, 0.8, 0.7, 0.8, 0.9, 1.0, 1.1}));
        REQUIRE(rep.pairs.size() == 1);
        CHECK(rep.pairs[0].transmittance_max == 3);
        CHECK(rep.pairs[0].ratio_min == 4);
        CHECK(rep.pairs[0].offset == 1.0);
    }
    SECTION("too few rows") {
        CHECK_THROWS_AS(alignment_report(synthetic({1, 2, 3}, {1, 2, 1}, {1, 0, 1})), ValidationError);
    }
}

TEST_CASE("sweep outputs: csv, sidecar and plot script") {
    SweepTable t = synthetic({-0.04, 0.0, 0.04}, {0.7, 0.7, 0.7}, {0.5, 0.6, 0.7});
    t.variable = SweepVariable::apodization_slope;
    t.rows[0].result->pulse_fwhm_ps = 30.0;
    t.rows[1].result->pulse_fwhm_ps = 60.0;
    t.rows[2].result->pulse_fwhm_ps = 80.0;
    const auto dir = std::filesystem::temp_directory_path() / "fbgsq_test_outputs";
    std::filesystem::remove_all(dir);
    write_sweep_outputs(t, dir);
    CHECK(std::filesystem::exists(dir / "fig7.csv"));
    CHECK(std::filesystem::exists(dir / "fig7_plot.py"));
    std::ifstream js(dir / "fig7.json");
    const auto j = nlohmann::json::parse(js);
    CHECK(j["variable"] == "apodization_slope");
    CHECK(j["code_version"] == std::string(kVersion));
    CHECK(j["fixed"]["grating"]["kappa0"] == 10.0);
    CHECK(j["slope_labels"][0]["label"] == "compressing");
    CHECK(j["slope_labels"][1]["label"] == "broadening");
    std::filesystem::remove_all(dir);
}
