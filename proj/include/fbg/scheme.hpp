#pragma once

// Transport-exact split-step discretization of the nonlinear coupled-mode
// equations on a grid with dt = dz / v_g.
//
// One time step is a composition of three kinds of substeps:
//   transport  u_a shifts one cell toward +z, u_b one cell toward -z; zero inflow
//   linear     (u_a, u_b) <- exp(i f dz [[delta, kappa], [kappa, delta]]) (u_a, u_b)
//   kerr       u_a <- u_a exp(i f dz gamma (|u_a|^2 + 2|u_b|^2)), likewise u_b
// with fraction f = 1 (Lie: transport, linear, kerr) or the symmetric Strang
// sequence kerr/2, linear/2, transport, linear/2, kerr/2.
//
// The class also exposes the real-linear tangent map of every substep, its
// transpose with respect to <x|y> = sum dz Re(conj(x) y) and the inverse of that
// transpose. Those three families are what the fluctuation and adjoint
// propagators are built from.

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "fbg/types.hpp"

namespace fbg {

enum class Splitting { lie, strang };

std::string_view to_string(Splitting s);
Splitting splitting_from_string(std::string_view s);

enum class SubstepKind { transport, linear, kerr };

struct Substep {
    SubstepKind kind;
    double fraction;
};

std::span<const Substep> substeps(Splitting s);

/// Energy carried out of the window by the outgoing characteristics.
struct EscapeTally {
    double a_right = 0.0;  // forward envelope leaving through z_max
    double b_left = 0.0;   // backward envelope leaving through z_min

    double total() const noexcept { return a_right + b_left; }
};

/// Complex values that left the window in one transport substep of a linear field.
struct EscapedCells {
    cplx a{};
    cplx b{};
};

class SplitStepKernel {
public:
    SplitStepKernel(const SimGrid& grid, const GratingProfile& profile, Splitting splitting = Splitting::lie);

    const SimGrid& grid() const noexcept { return grid_; }
    const GratingProfile& profile() const noexcept { return profile_; }
    Splitting splitting() const noexcept { return splitting_; }
    std::span<const Substep> sequence() const noexcept { return substeps(splitting_); }
    std::size_t kerr_substeps() const noexcept { return splitting_ == Splitting::lie ? 1 : 2; }

    /// Full nonlinear step; advances state.t by dt.
    void step(FieldState& s, EscapeTally* escape = nullptr) const;

    // Classical substeps.
    void transport(ComplexField& a, ComplexField& b, EscapeTally* escape = nullptr) const;
    void linear(ComplexField& a, ComplexField& b, double fraction) const;
    void kerr(ComplexField& a, ComplexField& b, double fraction) const;
    void apply(const Substep& sub, ComplexField& a, ComplexField& b, EscapeTally* escape = nullptr) const;

    // Tangent maps of the substeps; (ca, cb) is the classical field the Kerr
    // substep is linearized about (its input). Transport and linear substeps
    // are already linear: their tangent map is the map itself.
    EscapedCells transport_tangent(ComplexField& pa, ComplexField& pb) const;
    void kerr_tangent(const ComplexField& ca, const ComplexField& cb, ComplexField& pa, ComplexField& pb,
                      double fraction) const;

    // Transposes (backward adjoint substeps).
    EscapedCells transport_transpose(ComplexField& pa, ComplexField& pb) const;
    void linear_transpose(ComplexField& pa, ComplexField& pb, double fraction) const;
    void kerr_tangent_transpose(const ComplexField& ca, const ComplexField& cb, ComplexField& pa,
                                ComplexField& pb, double fraction) const;

    // Inverse transposes (forward adjoint substeps).
    EscapedCells transport_inverse_transpose(ComplexField& pa, ComplexField& pb) const {
        return transport_tangent(pa, pb);
    }
    void linear_inverse_transpose(ComplexField& pa, ComplexField& pb, double fraction) const {
        linear(pa, pb, fraction);
    }
    void kerr_tangent_inverse_transpose(const ComplexField& ca, const ComplexField& cb, ComplexField& pa,
                                        ComplexField& pb, double fraction) const;

    /// Index range [lo, hi) of grid nodes carrying nonzero coupling or Kerr response.
    std::size_t grating_lo() const noexcept { return lo_; }
    std::size_t grating_hi() const noexcept { return hi_; }

private:
    struct LinearCoeffs {
        std::vector<double> cos_k;
        std::vector<double> sin_k;
        cplx phase;  // exp(i f dz delta)
    };
    const LinearCoeffs& coeffs(double fraction) const;

    SimGrid grid_;
    GratingProfile profile_;
    Splitting splitting_;
    std::size_t lo_ = 0;
    std::size_t hi_ = 0;
    std::vector<double> gamma_dz_;  // gamma(z) dz on [lo, hi)
    LinearCoeffs full_;
    LinearCoeffs half_;
};

}  // namespace fbg
