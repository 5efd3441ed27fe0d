#include "fbg/dispersion.hpp"

#include <cmath>

namespace fbg {

std::vector<BandPoint> band_structure(double kappa, std::span<const double> delta_values) {
    if (!std::isfinite(kappa) || kappa < 0.0) throw ValidationError("band_structure: kappa must be >= 0");
    std::vector<BandPoint> out;
    out.reserve(delta_values.size());
    for (double d : delta_values) {
        if (!std::isfinite(d)) throw ValidationError("band_structure: delta values must be finite");
        const double q2 = d * d - kappa * kappa;
        BandPoint p{d, {}};
        if (q2 >= 0.0) {
            p.q = cplx(std::copysign(std::sqrt(q2), d), 0.0);
        } else {
            p.q = cplx(0.0, std::sqrt(-q2));
        }
        out.push_back(p);
    }
    return out;
}

TransferCoefficients linear_transfer(double kappa, double delta, double length) {
    if (!std::isfinite(kappa) || !std::isfinite(delta) || !std::isfinite(length) || length < 0.0 || kappa < 0.0) {
        throw ValidationError("linear_transfer: need finite kappa >= 0, delta, length >= 0");
    }
    // d/dz (a, b) = A (a, b), A = i [[delta, kappa], [-kappa, -delta]], A^2 = s^2 I.
    const cplx s = std::sqrt(cplx(kappa * kappa - delta * delta, 0.0));
    const cplx sl = s * length;
    const cplx ch = std::cosh(sl);
    // sinh(sL)/s, with the series for small |sL|.
    cplx sh_over_s;
    if (std::abs(sl) < 1e-6) {
        sh_over_s = length * (1.0 + sl * sl / 6.0);
    } else {
        sh_over_s = std::sinh(sl) / s;
    }
    const cplx i(0.0, 1.0);
    const cplx m22 = ch - i * delta * sh_over_s;
    const cplx m21 = -i * kappa * sh_over_s;
    return {1.0 / m22, -m21 / m22};
}

}  // namespace fbg
