#pragma once

// Single-run squeezing pipeline (geometry, automatic run length, gating,
// back-propagation) and one-dimensional parameter sweeps over it.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fbg/config.hpp"
#include "fbg/measurement.hpp"
#include "fbg/solver.hpp"

namespace fbg {

inline constexpr std::string_view kVersion = "0.1.0";

/// Window layout derived from a RunConfig: [0, pad_before) free fibre, the
/// grating, then pad_after of free fibre. The pulse starts at pad_before / 2.
struct Geometry {
    GratingProfile profile;
    SimGrid grid;
    double pulse_center = 0.0;
};

Geometry make_geometry(const RunConfig& c, double pad_after, std::int64_t n_steps);

struct ClassicalRun {
    Geometry geometry;
    ForwardRun run;
    FieldState initial;
    double pad_after = 0.0;  // as actually used
    bool auto_time = false;
};

/// Classical run of `c`. With total_time = 0 the run stops once the flux of
/// transmitted energy has peaked and dropped below 1% of its peak, plus 10% of
/// the elapsed time. With pad_after = 0 the window behind the grating is
/// widened (and the run repeated) until the transmitted light stays inside.
ClassicalRun run_classical(const RunConfig& c);

/// Gate, projection and squeezing ratio for a finished classical run, using the
/// measurement settings of `c`.
SqueezeResult measure(const RunConfig& c, const ClassicalRun& cr);

/// run_classical + measure.
SqueezeResult run_squeeze(const RunConfig& c);

enum class SweepVariable { input_intensity, grating_length, lo_phase, apodization_slope };

std::string_view to_string(SweepVariable v);
SweepVariable sweep_variable_from_string(std::string_view s);

/// Default grids: intensity 3.0..7.0 step 0.1, length 10..100 step 5,
/// phase 0..pi step pi/64, slopes {-0.08, -0.04, 0, 0.04, 0.08}.
std::vector<double> default_values(SweepVariable v);

struct SweepSpec {
    SweepVariable variable = SweepVariable::input_intensity;
    std::vector<double> values;
    RunConfig fixed;
};

/// Applies the swept value to a copy of the fixed record (lo_phase also
/// switches the measurement to homodyne).
RunConfig row_config(const SweepSpec& spec, double value);

struct SweepRow {
    double value = 0.0;
    std::optional<SqueezeResult> result;
    std::string error;
};

struct SweepTable {
    SweepVariable variable = SweepVariable::input_intensity;
    RunConfig fixed;
    std::vector<SweepRow> rows;
};

/// Worker count from FBGSQ_WORKERS, else the hardware concurrency.
int default_workers();

/// One pipeline per value, run on `workers` threads; rows come back in value
/// order. Row failures are recorded in the row. A lo_phase sweep shares one
/// classical run and one pair of back-propagations across all phases.
SweepTable run_sweep(const SweepSpec& spec, int workers = 0);

struct AlignmentPair {
    double transmittance_max = 0.0;
    double ratio_min = 0.0;  // NaN when no R minimum exists
    double offset = 0.0;     // ratio_min - transmittance_max
};

struct AlignmentReport {
    std::vector<AlignmentPair> pairs;
    bool no_extrema = false;
    std::string summary;
};

/// Pairs each interior local maximum of the transmittance with the nearest
/// interior local minimum of R. Failed rows are skipped; needs >= 7 good rows.
AlignmentReport alignment_report(const SweepTable& table);

/// CSV header and row schema of sweep outputs.
inline constexpr std::string_view kSweepCsvHeader = "value,transmittance,ratio,ratio_db,fwhm_ps,peak_gw_cm2,error";

std::string sweep_csv(const SweepTable& t);
std::string sweep_sidecar_json(const SweepTable& t);
std::string sweep_plot_script(const SweepTable& t, std::string_view csv_name);

/// Conventional output stem of a sweep: fig3 / fig4 / fig5 / fig7.
std::string_view figure_stem(SweepVariable v);

/// Writes <stem>.csv, <stem>.json and <stem>_plot.py into `dir`.
void write_sweep_outputs(const SweepTable& t, const std::filesystem::path& dir);

}  // namespace fbg
