#pragma once

// Core value types shared by every stage of the pipeline: the space-time grid,
// the grating profile, field containers and measurement projections.
//
// Units: z in cm, t in ps, intensity |U|^2 in GW/cm^2, kappa/delta in 1/cm,
// Kerr coefficient gamma in cm/GW.

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fbg {

using cplx = std::complex<double>;
using ComplexField = std::vector<cplx>;

inline constexpr double kSpeedOfLight = 0.0299792458;  // cm/ps
inline constexpr double kDefaultRefractiveIndex = 1.5;
inline constexpr double kDefaultGroupVelocity = kSpeedOfLight / kDefaultRefractiveIndex;

/// Rejected input: out-of-range, non-finite or inconsistent parameters.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Non-finite field values detected during time stepping.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, std::int64_t step)
        : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
    std::int64_t step() const noexcept { return step_; }

private:
    std::int64_t step_;
};

/// Two objects that must live on the same grid do not.
class GridMismatchError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Uniform spatial grid with the time step locked to dz / v_g, so that one step
/// moves each envelope by exactly one cell.
class SimGrid {
public:
    static SimGrid make(double z_min, double z_max, int n_points, double v_g, double total_time);
    static SimGrid with_steps(double z_min, double z_max, int n_points, double v_g, std::int64_t n_steps);

    double z_min() const noexcept { return z_min_; }
    double z_max() const noexcept { return z_max_; }
    int n_points() const noexcept { return n_points_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(n_points_); }
    double dz() const noexcept { return dz_; }
    double dt() const noexcept { return dt_; }
    double v_g() const noexcept { return v_g_; }
    std::int64_t n_steps() const noexcept { return n_steps_; }
    double total_time() const noexcept { return static_cast<double>(n_steps_) * dt_; }

    /// Position of grid node i; the last node is z_max exactly.
    double z(std::size_t i) const noexcept {
        return i + 1 == size() ? z_max_ : z_min_ + static_cast<double>(i) * dz_;
    }

    SimGrid with_n_steps(std::int64_t n_steps) const;

    bool same_space(const SimGrid& other) const noexcept {
        return z_min_ == other.z_min_ && z_max_ == other.z_max_ && n_points_ == other.n_points_ &&
               v_g_ == other.v_g_;
    }
    bool operator==(const SimGrid&) const = default;

private:
    SimGrid(double z_min, double z_max, int n_points, double v_g, std::int64_t n_steps);

    double z_min_ = 0.0;
    double z_max_ = 0.0;
    int n_points_ = 0;
    double dz_ = 0.0;
    double dt_ = 0.0;
    double v_g_ = 0.0;
    std::int64_t n_steps_ = 0;
};

/// Linearly apodized grating kappa(z) = kappa0 + alpha (z - grating_start) on
/// [grating_start, grating_end]; coupling and Kerr response vanish outside.
class GratingProfile {
public:
    struct Params {
        double kappa0 = 10.0;
        double alpha = 0.0;
        double delta = 0.0;
        double gamma = 0.018;
        double grating_start = 0.0;
        double grating_end = 50.0;
    };

    GratingProfile() : GratingProfile(Params{}) {}
    explicit GratingProfile(const Params& p);

    const Params& params() const noexcept { return p_; }
    double kappa0() const noexcept { return p_.kappa0; }
    double alpha() const noexcept { return p_.alpha; }
    double delta() const noexcept { return p_.delta; }
    double gamma() const noexcept { return p_.gamma; }
    double grating_start() const noexcept { return p_.grating_start; }
    double grating_end() const noexcept { return p_.grating_end; }
    double length() const noexcept { return p_.grating_end - p_.grating_start; }

    bool inside(double z) const noexcept { return z >= p_.grating_start && z <= p_.grating_end; }
    double kappa_at(double z) const noexcept {
        return inside(z) ? p_.kappa0 + p_.alpha * (z - p_.grating_start) : 0.0;
    }
    double gamma_at(double z) const noexcept { return inside(z) ? p_.gamma : 0.0; }

    // Averages over the grid cell [z - dz/2, z + dz/2]. Grid quantities use these
    // so the abrupt grating ends cost O(dz^2) rather than O(dz).
    double kappa_cell(double z, double dz) const noexcept {
        const double lo = std::max(z - 0.5 * dz, p_.grating_start);
        const double hi = std::min(z + 0.5 * dz, p_.grating_end);
        if (hi <= lo) return 0.0;
        return (hi - lo) / dz * (p_.kappa0 + p_.alpha * (0.5 * (lo + hi) - p_.grating_start));
    }
    double gamma_cell(double z, double dz) const noexcept {
        const double lo = std::max(z - 0.5 * dz, p_.grating_start);
        const double hi = std::min(z + 0.5 * dz, p_.grating_end);
        return hi > lo ? (hi - lo) / dz * p_.gamma : 0.0;
    }

    bool operator==(const GratingProfile& o) const noexcept;

private:
    Params p_;
};

/// Forward/backward envelopes on a grid at one instant.
struct FieldState {
    ComplexField u_a;
    ComplexField u_b;
    double t = 0.0;

    FieldState() = default;
    explicit FieldState(std::size_t n, double time = 0.0) : u_a(n), u_b(n), t(time) {}

    std::size_t size() const noexcept { return u_a.size(); }
    /// sum (|u_a|^2 + |u_b|^2) dz
    double norm(double dz) const noexcept;
    bool is_finite() const noexcept;
};

/// Measurement characteristic function pair (f_a, f_b).
struct ProjectionFunction {
    ComplexField f_a;
    ComplexField f_b;

    ProjectionFunction() = default;
    explicit ProjectionFunction(std::size_t n) : f_a(n), f_b(n) {}
    ProjectionFunction(ComplexField a, ComplexField b) : f_a(std::move(a)), f_b(std::move(b)) {}

    std::size_t size() const noexcept { return f_a.size(); }
    double sq_norm(double dz) const noexcept;
    ProjectionFunction& operator*=(cplx s);
    ProjectionFunction& operator+=(const ProjectionFunction& o);
    friend ProjectionFunction operator*(cplx s, ProjectionFunction f) { return f *= s; }
};

struct SqueezeResult {
    double ratio = 1.0;
    double ratio_db = 0.0;
    double transmittance = 0.0;
    double gate_lo = 0.0;  // cm
    double gate_hi = 0.0;  // cm
    double pulse_fwhm_ps = 0.0;
    double peak_intensity = 0.0;  // GW/cm^2

    static SqueezeResult from_ratio(double ratio);
};

/// Intensity-FWHM (spatial) of a sampled pulse with linear interpolation at the
/// half-maximum crossings around the global peak; 0 for an all-zero input.
double intensity_fwhm(const std::vector<double>& intensity, double dz);

/// sech-shaped launch pulse in u_a, zero u_b. fwhm_time is the intensity FWHM
/// in ps, mapped to space through v_g.
FieldState sech_pulse(const SimGrid& grid, double center, double fwhm_time, double peak_intensity,
                      double carrier_detune = 0.0);

/// sech amplitude width w such that sech^2(z/w) has FWHM = spatial_fwhm.
double sech_width_from_fwhm(double spatial_fwhm);

}  // namespace fbg
