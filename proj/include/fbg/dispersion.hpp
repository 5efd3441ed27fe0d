#pragma once

// Analytic tools for the linear, uniform grating: Bloch band structure and the
// monochromatic transmission/reflection of a finite grating section.

#include <span>
#include <vector>

#include "fbg/types.hpp"

namespace fbg {

struct BandPoint {
    double delta = 0.0;
    cplx q;  // Bloch wavenumber, 1/cm; purely imaginary inside the gap
};

/// q^2 = delta^2 - kappa^2. Outside the gap q carries the sign of delta (positive
/// group velocity d delta / d q); inside the gap Im q > 0.
std::vector<BandPoint> band_structure(double kappa, std::span<const double> delta_values);

struct TransferCoefficients {
    cplx t;
    cplx r;
};

/// Amplitude transmission and reflection of a wave at detuning delta incident on
/// a uniform grating of the given length.
TransferCoefficients linear_transfer(double kappa, double delta, double length);

}  // namespace fbg
