#include "fbg/output.hpp"

#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "fbg/experiments.hpp"

namespace fbg {

namespace {

std::string fd(double v) { return format_double(v); }

}  // namespace

std::string observables_csv(const RunObservables& obs) {
    std::ostringstream os;
    os << "t_ps,norm,hamiltonian,peak_a,transmitted_fraction\n";
    for (const auto& s : obs.samples) {
        os << fd(s.t_ps) << ',' << fd(s.norm) << ',' << fd(s.hamiltonian) << ',' << fd(s.peak_a) << ','
           << fd(s.transmitted_fraction) << '\n';
    }
    return os.str();
}

std::string snapshot_csv(const FieldState& s, const SimGrid& grid) {
    if (s.size() != grid.size()) throw GridMismatchError("snapshot_csv: field not on grid");
    std::ostringstream os;
    os << "z,re_a,im_a,re_b,im_b\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        os << fd(grid.z(i)) << ',' << fd(s.u_a[i].real()) << ',' << fd(s.u_a[i].imag()) << ','
           << fd(s.u_b[i].real()) << ',' << fd(s.u_b[i].imag()) << '\n';
    }
    return os.str();
}

std::string projection_csv(const ProjectionFunction& f, const SimGrid& grid) {
    if (f.size() != grid.size()) throw GridMismatchError("projection_csv: projection not on grid");
    std::ostringstream os;
    os << "z,re_fa,im_fa,re_fb,im_fb\n";
    for (std::size_t i = 0; i < f.size(); ++i) {
        os << fd(grid.z(i)) << ',' << fd(f.f_a[i].real()) << ',' << fd(f.f_a[i].imag()) << ','
           << fd(f.f_b[i].real()) << ',' << fd(f.f_b[i].imag()) << '\n';
    }
    return os.str();
}

std::string band_csv(std::span<const BandPoint> band) {
    std::ostringstream os;
    os << "delta,re_q,im_q\n";
    for (const auto& p : band) os << fd(p.delta) << ',' << fd(p.q.real()) << ',' << fd(p.q.imag()) << '\n';
    return os.str();
}

std::string transfer_csv(double kappa, double length, std::span<const double> deltas) {
    std::ostringstream os;
    os << "delta,t2,r2\n";
    for (double d : deltas) {
        const auto tr = linear_transfer(kappa, d, length);
        os << fd(d) << ',' << fd(std::norm(tr.t)) << ',' << fd(std::norm(tr.r)) << '\n';
    }
    return os.str();
}

std::string squeeze_json(const SqueezeResult& r, const RunConfig& c) {
    nlohmann::json j;
    j["ratio"] = r.ratio;
    j["ratio_db"] = r.ratio_db;
    j["transmittance"] = r.transmittance;
    j["gate_lo_cm"] = r.gate_lo;
    j["gate_hi_cm"] = r.gate_hi;
    j["fwhm_ps"] = r.pulse_fwhm_ps;
    j["peak_gw_cm2"] = r.peak_intensity;
    j["code_version"] = kVersion;
    j["params"] = nlohmann::json::parse(params_json(c));
    return j.dump(2) + "\n";
}

std::string params_json(const RunConfig& c) {
    nlohmann::json p = nlohmann::json::object();
    for (const auto& e : config_entries(c)) {
        if (e.numeric) {
            p[e.section][e.key] = std::strtod(e.value.c_str(), nullptr);
        } else if (e.value == "true" || e.value == "false") {
            p[e.section][e.key] = e.value == "true";
        } else {
            p[e.section][e.key] = e.value;
        }
    }
    return p.dump();
}

}  // namespace fbg
