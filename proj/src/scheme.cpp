#include "fbg/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fbg {

namespace {

constexpr std::array<Substep, 3> kLie{{
    {SubstepKind::transport, 1.0},
    {SubstepKind::linear, 1.0},
    {SubstepKind::kerr, 1.0},
}};

constexpr std::array<Substep, 5> kStrang{{
    {SubstepKind::kerr, 0.5},
    {SubstepKind::linear, 0.5},
    {SubstepKind::transport, 1.0},
    {SubstepKind::linear, 0.5},
    {SubstepKind::kerr, 0.5},
}};

constexpr cplx kI{0.0, 1.0};

}  // namespace

std::string_view to_string(Splitting s) { return s == Splitting::lie ? "lie" : "strang"; }

Splitting splitting_from_string(std::string_view s) {
    if (s == "lie") return Splitting::lie;
    if (s == "strang") return Splitting::strang;
    throw ValidationError("splitting must be 'lie' or 'strang', got '" + std::string(s) + "'");
}

std::span<const Substep> substeps(Splitting s) {
    if (s == Splitting::lie) return kLie;
    return kStrang;
}

SplitStepKernel::SplitStepKernel(const SimGrid& grid, const GratingProfile& profile, Splitting splitting)
    : grid_(grid), profile_(profile), splitting_(splitting) {
    const std::size_t n = grid.size();
    lo_ = n;
    hi_ = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (profile.gamma_cell(grid.z(i), grid.dz()) != 0.0 || profile.kappa_cell(grid.z(i), grid.dz()) != 0.0) {
            lo_ = std::min(lo_, i);
            hi_ = i + 1;
        }
    }
    if (lo_ >= hi_) lo_ = hi_ = 0;

    gamma_dz_.resize(hi_ - lo_);
    for (std::size_t i = lo_; i < hi_; ++i) gamma_dz_[i - lo_] = profile.gamma_cell(grid.z(i), grid.dz()) * grid.dz();

    auto build = [&](double f) {
        LinearCoeffs c;
        c.cos_k.resize(n);
        c.sin_k.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double th = f * grid.dz() * profile.kappa_cell(grid.z(i), grid.dz());
            c.cos_k[i] = std::cos(th);
            c.sin_k[i] = std::sin(th);
        }
        c.phase = std::polar(1.0, f * grid.dz() * profile.delta());
        return c;
    };
    full_ = build(1.0);
    half_ = build(0.5);
}

const SplitStepKernel::LinearCoeffs& SplitStepKernel::coeffs(double fraction) const {
    return fraction == 1.0 ? full_ : half_;
}

void SplitStepKernel::step(FieldState& s, EscapeTally* escape) const {
    for (const auto& sub : sequence()) apply(sub, s.u_a, s.u_b, escape);
    s.t += grid_.dt();
}

void SplitStepKernel::apply(const Substep& sub, ComplexField& a, ComplexField& b, EscapeTally* escape) const {
    switch (sub.kind) {
        case SubstepKind::transport: transport(a, b, escape); break;
        case SubstepKind::linear: linear(a, b, sub.fraction); break;
        case SubstepKind::kerr: kerr(a, b, sub.fraction); break;
    }
}

void SplitStepKernel::transport(ComplexField& a, ComplexField& b, EscapeTally* escape) const {
    if (escape) {
        escape->a_right += std::norm(a.back()) * grid_.dz();
        escape->b_left += std::norm(b.front()) * grid_.dz();
    }
    std::move_backward(a.begin(), a.end() - 1, a.end());
    a.front() = 0.0;
    std::move(b.begin() + 1, b.end(), b.begin());
    b.back() = 0.0;
}

void SplitStepKernel::linear(ComplexField& a, ComplexField& b, double fraction) const {
    const auto& c = coeffs(fraction);
    const bool detuned = c.phase != cplx(1.0, 0.0);
    const std::size_t begin = detuned ? 0 : lo_;
    const std::size_t end = detuned ? a.size() : hi_;
    for (std::size_t i = begin; i < end; ++i) {
        const cplx ai = a[i];
        const cplx bi = b[i];
        const cplx is = kI * c.sin_k[i];
        a[i] = c.phase * (c.cos_k[i] * ai + is * bi);
        b[i] = c.phase * (c.cos_k[i] * bi + is * ai);
    }
}

void SplitStepKernel::linear_transpose(ComplexField& pa, ComplexField& pb, double fraction) const {
    // The linear substep is unitary, so its transpose is its inverse.
    const auto& c = coeffs(fraction);
    const cplx phase = std::conj(c.phase);
    const bool detuned = phase != cplx(1.0, 0.0);
    const std::size_t begin = detuned ? 0 : lo_;
    const std::size_t end = detuned ? pa.size() : hi_;
    for (std::size_t i = begin; i < end; ++i) {
        const cplx ai = pa[i];
        const cplx bi = pb[i];
        const cplx is = kI * c.sin_k[i];
        pa[i] = phase * (c.cos_k[i] * ai - is * bi);
        pb[i] = phase * (c.cos_k[i] * bi - is * ai);
    }
}

void SplitStepKernel::kerr(ComplexField& a, ComplexField& b, double fraction) const {
    for (std::size_t i = lo_; i < hi_; ++i) {
        const double g = gamma_dz_[i - lo_] * fraction;
        if (g == 0.0) continue;
        const double ia = std::norm(a[i]);
        const double ib = std::norm(b[i]);
        a[i] *= std::polar(1.0, g * (ia + 2.0 * ib));
        b[i] *= std::polar(1.0, g * (ib + 2.0 * ia));
    }
}

EscapedCells SplitStepKernel::transport_tangent(ComplexField& pa, ComplexField& pb) const {
    EscapedCells out{pa.back(), pb.front()};
    std::move_backward(pa.begin(), pa.end() - 1, pa.end());
    pa.front() = 0.0;
    std::move(pb.begin() + 1, pb.end(), pb.begin());
    pb.back() = 0.0;
    return out;
}

EscapedCells SplitStepKernel::transport_transpose(ComplexField& pa, ComplexField& pb) const {
    EscapedCells out{pa.front(), pb.back()};
    std::move(pa.begin() + 1, pa.end(), pa.begin());
    pa.back() = 0.0;
    std::move_backward(pb.begin(), pb.end() - 1, pb.end());
    pb.front() = 0.0;
    return out;
}

// Tangent of the Kerr rotation about (A, B):
//   p_a' = e^{i phi_a} (p_a + i A g (2 Re(A* p_a) + 4 Re(B* p_b)))
//   p_b' = e^{i phi_b} (p_b + i B g (2 Re(B* p_b) + 4 Re(A* p_a)))
// i.e. J = D (I + N) with D the phase rotation and N nilpotent (N^2 = 0).
void SplitStepKernel::kerr_tangent(const ComplexField& ca, const ComplexField& cb, ComplexField& pa,
                                   ComplexField& pb, double fraction) const {
    for (std::size_t i = lo_; i < hi_; ++i) {
        const double g = gamma_dz_[i - lo_] * fraction;
        if (g == 0.0) continue;
        const cplx A = ca[i];
        const cplx B = cb[i];
        const double ia = std::norm(A);
        const double ib = std::norm(B);
        const double ra = (std::conj(A) * pa[i]).real();
        const double rb = (std::conj(B) * pb[i]).real();
        const cplx na = pa[i] + kI * A * (g * (2.0 * ra + 4.0 * rb));
        const cplx nb = pb[i] + kI * B * (g * (2.0 * rb + 4.0 * ra));
        pa[i] = std::polar(1.0, g * (ia + 2.0 * ib)) * na;
        pb[i] = std::polar(1.0, g * (ib + 2.0 * ia)) * nb;
    }
}

// J^T = (I + N^T) D^{-1}, with N^T y = g ((2 s_a + 4 s_b) A, (4 s_a + 2 s_b) B),
// s_a = Re(conj(y_a) i A), s_b = Re(conj(y_b) i B).
void SplitStepKernel::kerr_tangent_transpose(const ComplexField& ca, const ComplexField& cb, ComplexField& pa,
                                             ComplexField& pb, double fraction) const {
    for (std::size_t i = lo_; i < hi_; ++i) {
        const double g = gamma_dz_[i - lo_] * fraction;
        if (g == 0.0) continue;
        const cplx A = ca[i];
        const cplx B = cb[i];
        const double ia = std::norm(A);
        const double ib = std::norm(B);
        const cplx ya = std::polar(1.0, -g * (ia + 2.0 * ib)) * pa[i];
        const cplx yb = std::polar(1.0, -g * (ib + 2.0 * ia)) * pb[i];
        const double sa = (std::conj(ya) * kI * A).real();
        const double sb = (std::conj(yb) * kI * B).real();
        pa[i] = ya + A * (g * (2.0 * sa + 4.0 * sb));
        pb[i] = yb + B * (g * (4.0 * sa + 2.0 * sb));
    }
}

// J^{-T} = D (I - N^T), using N^T N^T = 0.
void SplitStepKernel::kerr_tangent_inverse_transpose(const ComplexField& ca, const ComplexField& cb,
                                                     ComplexField& pa, ComplexField& pb, double fraction) const {
    for (std::size_t i = lo_; i < hi_; ++i) {
        const double g = gamma_dz_[i - lo_] * fraction;
        if (g == 0.0) continue;
        const cplx A = ca[i];
        const cplx B = cb[i];
        const double ia = std::norm(A);
        const double ib = std::norm(B);
        const double sa = (std::conj(pa[i]) * kI * A).real();
        const double sb = (std::conj(pb[i]) * kI * B).real();
        const cplx ya = pa[i] - A * (g * (2.0 * sa + 4.0 * sb));
        const cplx yb = pb[i] - B * (g * (4.0 * sa + 2.0 * sb));
        pa[i] = std::polar(1.0, g * (ia + 2.0 * ib)) * ya;
        pb[i] = std::polar(1.0, g * (ib + 2.0 * ia)) * yb;
    }
}

}  // namespace fbg
