#include "fbg/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fbg/output.hpp"

namespace fbg {

namespace {

constexpr std::int64_t kFluxProbeEvery = 16;
constexpr double kFluxClearFraction = 1e-2;
constexpr double kMinTransmittedForClear = 1e-3;
constexpr double kFirstLightFraction = 1e-4;
constexpr double kTimeMargin = 0.1;
constexpr double kEscapeTolerance = 1e-9;  // of the input energy, through z_max
constexpr double kPadMargin = 10.0;        // cm

std::size_t first_index_beyond(const SimGrid& grid, double z) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.z(i) > z) return i;
    }
    return grid.size();
}

// Watches the transmitted energy and decides when to stop.
class FluxMonitor {
public:
    FluxMonitor(const Geometry& g, double input_energy)
        : dz_(g.grid.dz()), r0_(first_index_beyond(g.grid, g.profile.grating_end())), in_(input_energy) {}

    bool operator()(std::int64_t step, const FieldState& s, const EscapeTally& esc) {
        if (stop_step_ > 0) return step >= stop_step_;
        if (step % kFluxProbeEvery != 0) return false;
        double e = 0.0;
        for (std::size_t i = r0_; i < s.size(); ++i) e += std::norm(s.u_a[i]);
        e = (e * dz_ + esc.a_right) / in_;
        const double flux = e - last_;
        last_ = e;
        if (first_light_ < 0 && e > kFirstLightFraction) first_light_ = step;
        if (flux > peak_flux_) peak_flux_ = flux;
        if (e > kMinTransmittedForClear && peak_flux_ > 0.0 && flux < kFluxClearFraction * peak_flux_) {
            stop_step_ = static_cast<std::int64_t>(std::ceil((1.0 + kTimeMargin) * static_cast<double>(step)));
            return step >= stop_step_;
        }
        return false;
    }

    std::int64_t first_light() const { return first_light_; }

private:
    double dz_;
    std::size_t r0_;
    double in_;
    double last_ = 0.0;
    double peak_flux_ = 0.0;
    std::int64_t first_light_ = -1;
    std::int64_t stop_step_ = 0;
};

SolverConfig solver_config(const RunConfig& c, const Geometry& g) {
    SolverConfig sc{g.grid, g.profile};
    sc.splitting = c.splitting;
    sc.checkpoint_stride = c.checkpoint_stride;
    sc.record_observables_every = c.record_every;
    return sc;
}

FieldState launch(const RunConfig& c, const Geometry& g) {
    return sech_pulse(g.grid, g.pulse_center, c.fwhm_ps, c.peak_intensity, c.delta);
}

std::int64_t steps_for(const RunConfig& c, double time) {
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(time * c.v_g / c.dz * (1.0 - 1e-12))));
}

}  // namespace

Geometry make_geometry(const RunConfig& c, double pad_after, std::int64_t n_steps) {
    validate(c);
    const double span = c.pad_before + c.length + pad_after;
    const auto cells = static_cast<std::int64_t>(std::ceil(span / c.dz - 1e-9));
    const double z_max = static_cast<double>(cells) * c.dz;
    GratingProfile::Params p;
    p.kappa0 = c.kappa0;
    p.alpha = c.alpha;
    p.delta = 0.0;
    p.gamma = c.gamma;
    p.grating_start = c.pad_before;
    p.grating_end = c.pad_before + c.length;
    return Geometry{GratingProfile(p), SimGrid::with_steps(0.0, z_max, static_cast<int>(cells + 1), c.v_g, n_steps),
                    0.5 * c.pad_before};
}

ClassicalRun run_classical(const RunConfig& c) {
    validate(c);
    const double lead_start = 0.5 * c.pad_before;
    if (c.total_time > 0.0) {
        const std::int64_t n = steps_for(c, c.total_time);
        double pad = c.pad_after;
        if (pad <= 0.0) {
            // the leading edge cannot outrun v_g
            pad = std::max(kPadMargin, lead_start + c.v_g * c.total_time - c.pad_before - c.length + kPadMargin);
        }
        Geometry g = make_geometry(c, pad, n);
        FieldState init = launch(c, g);
        ForwardRun run = run_forward(solver_config(c, g), init);
        return ClassicalRun{std::move(g), std::move(run), std::move(init), pad, false};
    }

    // Generous cap: slow light inside the grating, then the trip to the far end.
    const double cap_time = (c.pad_before + 4.0 * c.length + 40.0) / c.v_g;
    const std::int64_t cap = steps_for(c, cap_time);
    double pad = c.pad_after > 0.0 ? c.pad_after : 0.2 * (lead_start + c.length) + kPadMargin;

    Geometry g = make_geometry(c, pad, cap);
    FieldState init = launch(c, g);
    const double in = init.norm(g.grid.dz());
    FluxMonitor mon(g, in);
    ForwardRun run = run_forward_until(solver_config(c, g), init,
                                       [&mon](std::int64_t k, const FieldState& s, const EscapeTally& e) {
                                           return mon(k, s, e);
                                       });
    if (c.pad_after > 0.0 || run.escape.a_right <= kEscapeTolerance * in) {
        return ClassicalRun{std::move(g), std::move(run), std::move(init), pad, true};
    }

    // Transmitted light reached z_max: widen the window behind the grating and
    // repeat with the step count already found.
    const std::int64_t n = run.history.n_steps();
    const std::int64_t first = std::max<std::int64_t>(0, mon.first_light());
    pad = std::max(pad, g.grid.v_g() * g.grid.dt() * static_cast<double>(n - first) + kPadMargin);
    for (int attempt = 0; attempt < 4; ++attempt) {
        Geometry g2 = make_geometry(c, pad, n);
        FieldState init2 = launch(c, g2);
        ForwardRun run2 = run_forward(solver_config(c, g2), init2);
        if (run2.escape.a_right <= kEscapeTolerance * in) {
            return ClassicalRun{std::move(g2), std::move(run2), std::move(init2), pad, true};
        }
        pad *= 1.5;
    }
    throw ValidationError("pad_after: transmitted light keeps leaving the window; set pad_after explicitly");
}

SqueezeResult measure(const RunConfig& c, const ClassicalRun& cr) {
    const auto& g = cr.geometry;
    const Gate gate = gate_first_pulse(cr.run.final_state, g.profile, cr.run.history.grid(), c.gate_threshold,
                                       c.peak_intensity);
    if (c.kind == MeasurementKind::photon_number) {
        MeasurementSpec spec{c.kind, 0.0, gate, c.gated};
        const ProjectionFunction f = build_projection(cr.run.final_state, spec, cr.run.history.grid());
        return squeezing_ratio(f, cr.run, gate);
    }
    // Homodyne goes through the two-basis route so a single phase is
    // bit-identical to the same phase inside a sweep.
    const double phase[1] = {c.lo_phase};
    const QuadratureSweep qs = quadrature_sweep(cr.run.history, cr.run.final_state, gate, phase, c.gated);
    SqueezeResult r = SqueezeResult::from_ratio(qs.points.front().ratio);
    r.transmittance =
        transmittance(cr.run.final_state, cr.initial, g.profile, cr.run.history.grid(), cr.run.escape);
    r.gate_lo = gate.z_lo;
    r.gate_hi = gate.z_hi;
    const auto pm = gated_pulse_metrics(cr.run.final_state, gate, cr.run.history.grid());
    r.pulse_fwhm_ps = pm.fwhm_ps;
    r.peak_intensity = pm.peak;
    return r;
}

SqueezeResult run_squeeze(const RunConfig& c) { return measure(c, run_classical(c)); }

std::string_view to_string(SweepVariable v) {
    switch (v) {
        case SweepVariable::input_intensity: return "input_intensity";
        case SweepVariable::grating_length: return "grating_length";
        case SweepVariable::lo_phase: return "lo_phase";
        case SweepVariable::apodization_slope: return "apodization_slope";
    }
    return "?";
}

SweepVariable sweep_variable_from_string(std::string_view s) {
    for (auto v : {SweepVariable::input_intensity, SweepVariable::grating_length, SweepVariable::lo_phase,
                   SweepVariable::apodization_slope}) {
        if (to_string(v) == s) return v;
    }
    throw ValidationError("sweep variable must be one of input_intensity, grating_length, lo_phase, "
                          "apodization_slope; got '" +
                          std::string(s) + "'");
}

std::string_view figure_stem(SweepVariable v) {
    switch (v) {
        case SweepVariable::input_intensity: return "fig3";
        case SweepVariable::lo_phase: return "fig4";
        case SweepVariable::grating_length: return "fig5";
        case SweepVariable::apodization_slope: return "fig7";
    }
    return "sweep";
}

std::vector<double> default_values(SweepVariable v) {
    std::vector<double> out;
    switch (v) {
        case SweepVariable::input_intensity:
            for (int i = 30; i <= 70; ++i) out.push_back(i / 10.0);
            break;
        case SweepVariable::grating_length:
            for (int l = 10; l <= 100; l += 5) out.push_back(l);
            break;
        case SweepVariable::lo_phase:
            for (int j = 0; j <= 64; ++j) out.push_back(j * std::numbers::pi / 64.0);
            break;
        case SweepVariable::apodization_slope:
            out = {-0.08, -0.04, 0.0, 0.04, 0.08};
            break;
    }
    return out;
}

RunConfig row_config(const SweepSpec& spec, double value) {
    RunConfig c = spec.fixed;
    switch (spec.variable) {
        case SweepVariable::input_intensity: c.peak_intensity = value; break;
        case SweepVariable::grating_length: c.length = value; break;
        case SweepVariable::lo_phase:
            c.kind = MeasurementKind::homodyne;
            c.lo_phase = value;
            break;
        case SweepVariable::apodization_slope: c.alpha = value; break;
    }
    return c;
}

int default_workers() {
    if (const char* e = std::getenv("FBGSQ_WORKERS")) {
        const int n = std::atoi(e);
        if (n >= 1) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

SweepTable run_sweep(const SweepSpec& spec, int workers) {
    if (spec.values.empty()) throw ValidationError("sweep: values must be non-empty");
    for (double v : spec.values) {
        if (!std::isfinite(v)) throw ValidationError("sweep: values must be finite");
    }
    validate(spec.fixed);
    std::vector<double> values = spec.values;
    std::sort(values.begin(), values.end());

    SweepTable table{spec.variable, spec.fixed, {}};
    table.rows.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) table.rows[i].value = values[i];

    if (spec.variable == SweepVariable::lo_phase) {
        // every phase shares the classical run; the measurement is linear in e^{i theta}
        try {
            RunConfig c = row_config(spec, values.front());
            const ClassicalRun cr = run_classical(c);
            const Gate gate = gate_first_pulse(cr.run.final_state, cr.geometry.profile, cr.run.history.grid(),
                                               c.gate_threshold, c.peak_intensity);
            const QuadratureSweep qs = quadrature_sweep(cr.run.history, cr.run.final_state, gate, values, c.gated);
            const double tr = transmittance(cr.run.final_state, cr.initial, cr.geometry.profile,
                                            cr.run.history.grid(), cr.run.escape);
            const auto pm = gated_pulse_metrics(cr.run.final_state, gate, cr.run.history.grid());
            for (std::size_t i = 0; i < values.size(); ++i) {
                SqueezeResult r = SqueezeResult::from_ratio(qs.points[i].ratio);
                r.transmittance = tr;
                r.gate_lo = gate.z_lo;
                r.gate_hi = gate.z_hi;
                r.pulse_fwhm_ps = pm.fwhm_ps;
                r.peak_intensity = pm.peak;
                table.rows[i].result = r;
            }
        } catch (const std::exception& e) {
            for (auto& row : table.rows) row.error = e.what();
        }
        return table;
    }

    const int n_workers = std::clamp(workers > 0 ? workers : default_workers(), 1, static_cast<int>(values.size()));
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= values.size()) return;
            SweepRow& row = table.rows[i];
            try {
                row.result = run_squeeze(row_config(spec, row.value));
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < n_workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return table;
}

AlignmentReport alignment_report(const SweepTable& table) {
    std::vector<double> x, tr, r;
    for (const auto& row : table.rows) {
        if (!row.result) continue;
        x.push_back(row.value);
        tr.push_back(row.result->transmittance);
        r.push_back(row.result->ratio);
    }
    if (x.size() < 7) throw ValidationError("alignment_report: needs at least 7 successful rows");

    std::vector<double> tmax, rmin;
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        if (tr[i] > tr[i - 1] && tr[i] >= tr[i + 1]) tmax.push_back(x[i]);
        if (r[i] < r[i - 1] && r[i] <= r[i + 1]) rmin.push_back(x[i]);
    }
    AlignmentReport rep;
    if (tmax.empty() && rmin.empty()) {
        rep.no_extrema = true;
        rep.summary = "no extrema";
        return rep;
    }
    for (double t : tmax) {
        AlignmentPair p{t, std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity()};
        for (double m : rmin) {
            if (std::abs(m - t) < std::abs(p.offset)) {
                p.ratio_min = m;
                p.offset = m - t;
            }
        }
        rep.pairs.push_back(p);
    }
    std::ostringstream os;
    os << tmax.size() << " transmittance maxima, " << rmin.size() << " ratio minima";
    rep.summary = os.str();
    return rep;
}

std::string sweep_csv(const SweepTable& t) {
    std::ostringstream os;
    os << kSweepCsvHeader << '\n';
    for (const auto& row : t.rows) {
        os << format_double(row.value);
        if (row.result) {
            const auto& r = *row.result;
            os << ',' << format_double(r.transmittance) << ',' << format_double(r.ratio) << ','
               << format_double(r.ratio_db) << ',' << format_double(r.pulse_fwhm_ps) << ','
               << format_double(r.peak_intensity) << ",";
        } else {
            std::string msg = row.error;
            std::replace(msg.begin(), msg.end(), '"', '\'');
            os << ",,,,,,\"" << msg << '"';
        }
        os << '\n';
    }
    return os.str();
}

std::string sweep_sidecar_json(const SweepTable& t) {
    nlohmann::json j;
    j["code_version"] = kVersion;
    j["variable"] = to_string(t.variable);
    j["fixed"] = nlohmann::json::parse(params_json(t.fixed));
    j["csv_columns"] = kSweepCsvHeader;
    j["rows"] = t.rows.size();
    std::size_t failed = 0;
    for (const auto& row : t.rows) failed += row.result ? 0 : 1;
    j["failed_rows"] = failed;
    j["ratio_db_convention"] = "10 log10(R); negative = squeezed";
    if (t.variable == SweepVariable::apodization_slope) {
        // Which sign compresses is decided by the measured output width.
        const SweepRow* uniform = nullptr;
        for (const auto& row : t.rows) {
            if (row.value == 0.0 && row.result) uniform = &row;
        }
        nlohmann::json labels = nlohmann::json::array();
        for (const auto& row : t.rows) {
            if (!row.result || row.value == 0.0) continue;
            std::string label = "unknown";
            if (uniform) {
                label = row.result->pulse_fwhm_ps < uniform->result->pulse_fwhm_ps ? "compressing" : "broadening";
            }
            labels.push_back({{"alpha", row.value}, {"fwhm_ps", row.result->pulse_fwhm_ps}, {"label", label}});
        }
        j["slope_labels"] = labels;
        j["slope_sign_note"] =
            "the sign of alpha that compresses the pulse is ambiguous in the reference description; "
            "slopes are labelled by measured output FWHM against the uniform grating";
    }
    return j.dump(2) + "\n";
}

std::string sweep_plot_script(const SweepTable& t, std::string_view csv_name) {
    std::ostringstream os;
    os << "# Plot " << csv_name << " (" << to_string(t.variable) << " sweep).\n"
       << "import csv\n"
       << "import matplotlib\n"
       << "matplotlib.use('Agg')\n"
       << "import matplotlib.pyplot as plt\n\n"
       << "rows = [r for r in csv.DictReader(open('" << csv_name << "')) if r['ratio']]\n"
       << "x = [float(r['value']) for r in rows]\n"
       << "fig, ax = plt.subplots()\n"
       << "ax.plot(x, [-float(r['ratio_db']) for r in rows], 'o-', label='squeezing [dB]')\n"
       << "ax.set_xlabel('" << to_string(t.variable) << "')\n"
       << "ax.set_ylabel('squeezing [dB]')\n"
       << "ax2 = ax.twinx()\n"
       << "ax2.plot(x, [float(r['transmittance']) for r in rows], 's--', color='gray', label='transmittance')\n"
       << "ax2.set_ylabel('transmittance')\n"
       << "fig.tight_layout()\n"
       << "fig.savefig('" << std::filesystem::path(csv_name).stem().string() << ".png', dpi=150)\n";
    return os.str();
}

void write_sweep_outputs(const SweepTable& t, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const std::string stem(figure_stem(t.variable));
    auto put = [&](const std::string& name, const std::string& text) {
        std::ofstream f(dir / name);
        if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
        f << text;
    };
    put(stem + ".csv", sweep_csv(t));
    put(stem + ".json", sweep_sidecar_json(t));
    put(stem + "_plot.py", sweep_plot_script(t, stem + ".csv"));
}

}  // namespace fbg
