#include "fbg/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fbg/adjoint.hpp"
#include "fbg/config.hpp"
#include "fbg/dispersion.hpp"
#include "fbg/experiments.hpp"
#include "fbg/output.hpp"
#include "fbg/validation.hpp"

namespace fbg {

namespace {

namespace fs = std::filesystem;

// Missing files and the like: reported as usage errors.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot read config file '" + path + "'");
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

void write_file(const fs::path& p, const std::string& text) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
    f << text;
}

RunConfig load_config(const std::string& path, const std::string& out_dir) {
    RunConfig c = path.empty() ? parse_config("") : parse_config(read_file(path));
    if (!out_dir.empty()) c.directory = out_dir;
    validate(c);
    return c;
}

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos) {
            throw UsageError("--values: cannot parse '" + item + "'");
        }
        v.push_back(x);
    }
    if (v.empty()) throw UsageError("--values: empty list");
    return v;
}

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

}  // namespace

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Quantum-noise squeezing of optical pulses in nonlinear fibre Bragg gratings", "fbgsq"};
    app.footer("Configuration keys (defaults):\n" + config_reference() +
               "\nEnvironment: FBGSQ_WORKERS sets the sweep worker count.");
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;

    auto* sim = app.add_subcommand("simulate", "classical run; writes observables.csv and final_state.csv");
    sim->add_option("-c,--config", config_path, "config file");
    sim->add_option("-o,--out", out_dir, "output directory (overrides [output] directory)");

    bool dump_adjoint = false;
    auto* sq = app.add_subcommand("squeeze", "single squeezing pipeline; writes result.json");
    sq->add_option("-c,--config", config_path, "config file");
    sq->add_option("-o,--out", out_dir, "output directory");
    sq->add_flag("--dump-adjoint", dump_adjoint, "also write projection_out.csv and projection_in.csv");

    std::string variable;
    std::string values_text;
    int workers = 0;
    auto* sw = app.add_subcommand("sweep", "one-dimensional parameter sweep; writes <fig>.csv/.json/_plot.py");
    sw->add_option("-c,--config", config_path, "config file with the fixed parameters");
    sw->add_option("-o,--out", out_dir, "output directory");
    sw->add_option("--variable", variable, "input_intensity | grating_length | lo_phase | apodization_slope")
        ->required();
    sw->add_option("--values", values_text, "comma-separated values (default: the standard grid)");
    sw->add_option("--workers", workers, "worker threads (default: FBGSQ_WORKERS or all cores)");

    double kappa = 10.0, length = 50.0, dmin = -30.0, dmax = 30.0;
    int n_delta = 601;
    auto* disp = app.add_subcommand("dispersion", "band structure and transfer tables of a uniform grating");
    disp->add_option("--kappa", kappa, "coupling [1/cm]")->capture_default_str();
    disp->add_option("--length", length, "grating length [cm]")->capture_default_str();
    disp->add_option("--delta-min", dmin, "[1/cm]")->capture_default_str();
    disp->add_option("--delta-max", dmax, "[1/cm]")->capture_default_str();
    disp->add_option("--n", n_delta, "number of detunings")->capture_default_str()->check(CLI::Range(2, 10000000));
    disp->add_option("-o,--out", out_dir, "output directory (default: out)");

    OracleValidationOptions vopt;
    std::string split = "lie";
    auto* val = app.add_subcommand("validate", "adjoint engine versus forward covariance oracle");
    val->add_option("--points", vopt.n_points, "grid points")->capture_default_str()->check(CLI::Range(16, 512));
    val->add_option("--steps", vopt.n_steps, "time steps")->capture_default_str()->check(CLI::PositiveNumber);
    val->add_option("--projections", vopt.random_projections, "random projections")->capture_default_str();
    val->add_option("--splitting", split, "lie | strang")->capture_default_str();

    auto* ver = app.add_subcommand("version", "print the version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "error: usage: " << one_line(e.what()) << '\n' << app.help();
        return kExitUsage;
    }

    try {
        if (*ver) {
            out << "fbgsq " << kVersion << '\n';
        } else if (*sim) {
            const RunConfig c = load_config(config_path, out_dir);
            const ClassicalRun cr = run_classical(c);
            const fs::path dir(c.directory);
            write_file(dir / "config.ini", serialize_config(c));
            write_file(dir / "observables.csv", observables_csv(cr.run.observables));
            write_file(dir / "final_state.csv", snapshot_csv(cr.run.final_state, cr.run.history.grid()));
            const auto& last = cr.run.observables.samples.back();
            out << "steps " << cr.run.history.n_steps() << ", t = " << format_double(last.t_ps)
                << " ps, transmitted fraction " << format_double(last.transmitted_fraction) << '\n';
        } else if (*sq) {
            const RunConfig c = load_config(config_path, out_dir);
            const ClassicalRun cr = run_classical(c);
            const SqueezeResult r = measure(c, cr);
            const fs::path dir(c.directory);
            const std::string js = squeeze_json(r, c);
            write_file(dir / "result.json", js);
            if (dump_adjoint) {
                const SimGrid& grid = cr.run.history.grid();
                const Gate gate = gate_first_pulse(cr.run.final_state, cr.geometry.profile, grid, c.gate_threshold,
                                                   c.peak_intensity);
                const MeasurementSpec spec{c.kind, c.lo_phase, gate, c.gated};
                const ProjectionFunction f = build_projection(cr.run.final_state, spec, grid);
                const auto back = backpropagate(f, cr.run.history);
                write_file(dir / "projection_out.csv", projection_csv(f, grid));
                write_file(dir / "projection_in.csv", projection_csv(back.fields.front(), grid));
            }
            out << js;
        } else if (*sw) {
            SweepSpec spec;
            spec.variable = sweep_variable_from_string(variable);
            spec.fixed = load_config(config_path, out_dir);
            spec.values = values_text.empty() ? default_values(spec.variable) : parse_values(values_text);
            const SweepTable t = run_sweep(spec, workers);
            write_sweep_outputs(t, spec.fixed.directory);
            std::size_t failed = 0;
            for (const auto& row : t.rows) failed += row.result ? 0 : 1;
            out << "wrote " << (fs::path(spec.fixed.directory) / figure_stem(spec.variable)).string() << ".csv ("
                << t.rows.size() << " rows, " << failed << " failed)\n";
            if (spec.variable == SweepVariable::input_intensity && t.rows.size() - failed >= 7) {
                const auto rep = alignment_report(t);
                out << "alignment: " << rep.summary << '\n';
                for (const auto& p : rep.pairs) {
                    out << "  T max at " << format_double(p.transmittance_max) << ", R min at "
                        << format_double(p.ratio_min) << ", offset " << format_double(p.offset) << '\n';
                }
            }
            if (failed == t.rows.size()) {
                err << "error: compute: every row failed: " << one_line(t.rows.front().error) << '\n';
                return kExitNumerical;
            }
        } else if (*disp) {
            if (!(dmax > dmin)) throw ValidationError("delta-max: must exceed delta-min");
            if (!(kappa >= 0.0)) throw ValidationError("kappa: must be >= 0");
            if (!(length > 0.0)) throw ValidationError("length: must be > 0");
            std::vector<double> deltas(static_cast<std::size_t>(n_delta));
            for (int i = 0; i < n_delta; ++i) deltas[i] = dmin + (dmax - dmin) * i / (n_delta - 1);
            const fs::path dir(out_dir.empty() ? "out" : out_dir);
            write_file(dir / "band.csv", band_csv(band_structure(kappa, deltas)));
            write_file(dir / "transfer.csv", transfer_csv(kappa, length, deltas));
            out << "wrote " << (dir / "band.csv").string() << " and " << (dir / "transfer.csv").string() << '\n';
        } else if (*val) {
            vopt.splitting = splitting_from_string(split);
            const auto rep = run_oracle_validation(vopt);
            out << "max relative error " << format_double(rep.max_relative_error) << " over "
                << rep.projections_checked << " projections; photon-number R "
                << format_double(rep.photon_number_ratio) << "; max symplectic defect "
                << format_double(rep.max_symplectic_defect) << '\n';
            if (!(rep.max_relative_error <= 1e-6)) {
                err << "error: validation: adjoint and oracle disagree (max relative error "
                    << format_double(rep.max_relative_error) << ")\n";
                return kExitNumerical;
            }
        }
        return kExitOk;
    } catch (const UsageError& e) {
        err << "error: usage: " << one_line(e.what()) << '\n';
        return kExitUsage;
    } catch (const ConfigParseError& e) {
        err << "error: config: " << one_line(e.what()) << '\n';
        return kExitValidation;
    } catch (const ValidationError& e) {
        err << "error: validation: " << one_line(e.what()) << '\n';
        return kExitValidation;
    } catch (const GridMismatchError& e) {
        err << "error: validation: " << one_line(e.what()) << '\n';
        return kExitValidation;
    } catch (const NoTransmittedPulse& e) {
        err << "error: validation: " << one_line(e.what()) << '\n';
        return kExitValidation;
    } catch (const DivergenceError& e) {
        err << "error: divergence: " << one_line(e.what()) << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "error: runtime: " << one_line(e.what()) << '\n';
        return kExitNumerical;
    }
}

}  // namespace fbg
