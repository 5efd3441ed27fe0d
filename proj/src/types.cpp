#include "fbg/types.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace fbg {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw ValidationError(msg);
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

SimGrid::SimGrid(double z_min, double z_max, int n_points, double v_g, std::int64_t n_steps)
    : z_min_(z_min), z_max_(z_max), n_points_(n_points), v_g_(v_g), n_steps_(n_steps) {
    require(finite(z_min) && finite(z_max), "grid: z_min and z_max must be finite");
    require(z_max > z_min, "grid: z_max must exceed z_min");
    require(n_points >= 16, "grid: n_points must be >= 16");
    require(finite(v_g) && v_g > 0.0, "grid: v_g must be positive and finite");
    require(n_steps >= 1, "grid: n_steps must be >= 1");
    dz_ = (z_max - z_min) / static_cast<double>(n_points - 1);
    dt_ = dz_ / v_g;
}

SimGrid SimGrid::make(double z_min, double z_max, int n_points, double v_g, double total_time) {
    require(finite(total_time) && total_time > 0.0, "grid: total_time must be positive and finite");
    require(finite(v_g) && v_g > 0.0, "grid: v_g must be positive and finite");
    require(n_points >= 2 && finite(z_min) && finite(z_max) && z_max > z_min,
            "grid: z_max must exceed z_min and n_points must be >= 16");
    const double dz = (z_max - z_min) / static_cast<double>(n_points - 1);
    const double steps = total_time / (dz / v_g);
    // Relative slack so that exact multiples do not round up on representation error.
    const auto n_steps = static_cast<std::int64_t>(std::ceil(steps * (1.0 - 1e-12)));
    return SimGrid(z_min, z_max, n_points, v_g, std::max<std::int64_t>(n_steps, 1));
}

SimGrid SimGrid::with_steps(double z_min, double z_max, int n_points, double v_g, std::int64_t n_steps) {
    return SimGrid(z_min, z_max, n_points, v_g, n_steps);
}

SimGrid SimGrid::with_n_steps(std::int64_t n_steps) const {
    return SimGrid(z_min_, z_max_, n_points_, v_g_, n_steps);
}

GratingProfile::GratingProfile(const Params& p) : p_(p) {
    require(finite(p.kappa0) && p.kappa0 >= 0.0, "grating: kappa0 must be >= 0");
    require(finite(p.alpha), "grating: alpha must be finite");
    require(finite(p.delta), "grating: delta must be finite");
    require(finite(p.gamma) && p.gamma >= 0.0, "grating: gamma must be >= 0");
    require(finite(p.grating_start) && finite(p.grating_end) && p.grating_end >= p.grating_start,
            "grating: grating_end must be >= grating_start");
    const double kappa_end = p.kappa0 + p.alpha * (p.grating_end - p.grating_start);
    if (kappa_end < 0.0) {
        std::ostringstream os;
        os << "grating: apodization slope alpha=" << p.alpha << " drives kappa negative (kappa(end)=" << kappa_end
           << ")";
        throw ValidationError(os.str());
    }
}

bool GratingProfile::operator==(const GratingProfile& o) const noexcept {
    return p_.kappa0 == o.p_.kappa0 && p_.alpha == o.p_.alpha && p_.delta == o.p_.delta &&
           p_.gamma == o.p_.gamma && p_.grating_start == o.p_.grating_start && p_.grating_end == o.p_.grating_end;
}

double FieldState::norm(double dz) const noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < u_a.size(); ++i) s += std::norm(u_a[i]) + std::norm(u_b[i]);
    return s * dz;
}

bool FieldState::is_finite() const noexcept {
    auto ok = [](const ComplexField& f) {
        return std::all_of(f.begin(), f.end(), [](cplx c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
    };
    return ok(u_a) && ok(u_b) && std::isfinite(t);
}

double ProjectionFunction::sq_norm(double dz) const noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < f_a.size(); ++i) s += std::norm(f_a[i]) + std::norm(f_b[i]);
    return s * dz;
}

ProjectionFunction& ProjectionFunction::operator*=(cplx s) {
    for (auto& v : f_a) v *= s;
    for (auto& v : f_b) v *= s;
    return *this;
}

ProjectionFunction& ProjectionFunction::operator+=(const ProjectionFunction& o) {
    if (o.size() != size()) throw GridMismatchError("projection: size mismatch in +=");
    for (std::size_t i = 0; i < f_a.size(); ++i) {
        f_a[i] += o.f_a[i];
        f_b[i] += o.f_b[i];
    }
    return *this;
}

SqueezeResult SqueezeResult::from_ratio(double ratio) {
    SqueezeResult r;
    r.ratio = ratio;
    r.ratio_db = 10.0 * std::log10(ratio);
    return r;
}

double intensity_fwhm(const std::vector<double>& intensity, double dz) {
    if (intensity.empty()) return 0.0;
    const auto peak_it = std::max_element(intensity.begin(), intensity.end());
    const double peak = *peak_it;
    if (!(peak > 0.0)) return 0.0;
    const double half = 0.5 * peak;
    const auto ip = static_cast<std::size_t>(peak_it - intensity.begin());

    std::size_t hi = ip;
    while (hi + 1 < intensity.size() && intensity[hi + 1] >= half) ++hi;
    double right = static_cast<double>(hi);
    if (hi + 1 < intensity.size()) right += (intensity[hi] - half) / (intensity[hi] - intensity[hi + 1]);

    std::size_t lo = ip;
    while (lo > 0 && intensity[lo - 1] >= half) --lo;
    double left = static_cast<double>(lo);
    if (lo > 0) left -= (intensity[lo] - half) / (intensity[lo] - intensity[lo - 1]);

    return (right - left) * dz;
}

double sech_width_from_fwhm(double spatial_fwhm) {
    return spatial_fwhm / (2.0 * std::acosh(std::numbers::sqrt2));
}

FieldState sech_pulse(const SimGrid& grid, double center, double fwhm_time, double peak_intensity,
                      double carrier_detune) {
    require(finite(center) && finite(fwhm_time) && finite(peak_intensity) && finite(carrier_detune),
            "sech_pulse: parameters must be finite");
    require(fwhm_time > 0.0, "sech_pulse: fwhm_time must be positive");
    require(peak_intensity >= 0.0, "sech_pulse: peak_intensity must be >= 0");
    const double w = sech_width_from_fwhm(grid.v_g() * fwhm_time);
    require(center - 5.0 * w >= grid.z_min() && center + 5.0 * w <= grid.z_max(),
            "sech_pulse: pulse (center +/- 5 widths) does not fit in the window");

    FieldState s(grid.size());
    const double amp = std::sqrt(peak_intensity);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double z = grid.z(i);
        const double env = amp / std::cosh((z - center) / w);
        s.u_a[i] = env * std::polar(1.0, carrier_detune * z);
    }
    if (peak_intensity > 0.0) {
        const double edge = std::max(std::norm(s.u_a.front()), std::norm(s.u_a.back()));
        if (edge > 1e-8 * peak_intensity) {
            std::ostringstream os;
            os << "sech_pulse: pulse clipped by window edge (edge intensity " << edge / peak_intensity
               << " of peak)";
            throw ValidationError(os.str());
        }
    }
    return s;
}

}  // namespace fbg
