#include "fbg/covariance.hpp"

#include <cmath>
#include <string>

namespace fbg {

namespace {

using Vec = Eigen::Ref<Eigen::VectorXd>;

// Pointwise real-linear substep maps written directly in the quadrature basis.
// They deliberately do not reuse the complex-field tangent kernels.
class QuadratureSteps {
public:
    QuadratureSteps(const SimGrid& grid, const GratingProfile& profile) : grid_(grid), profile_(profile) {}

    void linear(Vec x, double fraction) const {
        const double dz = grid_.dz();
        const double ph = fraction * dz * profile_.delta();
        const double cp = std::cos(ph);
        const double sp = std::sin(ph);
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            const double th = fraction * dz * profile_.kappa_cell(grid_.z(i), dz);
            const double c = std::cos(th);
            const double s = std::sin(th);
            const std::size_t o = 4 * i;
            const double ar = x[o], ai = x[o + 1], br = x[o + 2], bi = x[o + 3];
            // (c a + i s b), (c b + i s a), then rotate by ph
            const double nar = c * ar - s * bi, nai = c * ai + s * br;
            const double nbr = c * br - s * ai, nbi = c * bi + s * ar;
            x[o] = cp * nar - sp * nai;
            x[o + 1] = sp * nar + cp * nai;
            x[o + 2] = cp * nbr - sp * nbi;
            x[o + 3] = sp * nbr + cp * nbi;
        }
    }

    // Jacobian of (a, b) -> (a e^{i phi_a}, b e^{i phi_b}),
    // phi_a = g (|a|^2 + 2 |b|^2), phi_b = g (|b|^2 + 2 |a|^2), about (A, B).
    void kerr_jacobian(Vec x, const FieldState& c, double fraction) const {
        const double dz = grid_.dz();
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            const double g = fraction * dz * profile_.gamma_cell(grid_.z(i), dz);
            if (g == 0.0) continue;
            const double Ar = c.u_a[i].real(), Ai = c.u_a[i].imag();
            const double Br = c.u_b[i].real(), Bi = c.u_b[i].imag();
            const double phia = g * (Ar * Ar + Ai * Ai + 2.0 * (Br * Br + Bi * Bi));
            const double phib = g * (Br * Br + Bi * Bi + 2.0 * (Ar * Ar + Ai * Ai));
            // Gradients of the phases with respect to (ar, ai, br, bi).
            const double dpa[4] = {2 * g * Ar, 2 * g * Ai, 4 * g * Br, 4 * g * Bi};
            const double dpb[4] = {4 * g * Ar, 4 * g * Ai, 2 * g * Br, 2 * g * Bi};
            const std::size_t o = 4 * i;
            const double v[4] = {x[o], x[o + 1], x[o + 2], x[o + 3]};
            double dphia = 0.0, dphib = 0.0;
            for (int k = 0; k < 4; ++k) {
                dphia += dpa[k] * v[k];
                dphib += dpb[k] * v[k];
            }
            // d(a e^{i phi}) = e^{i phi} (da + i a dphi)
            const double tar = v[0] - Ai * dphia, tai = v[1] + Ar * dphia;
            const double tbr = v[2] - Bi * dphib, tbi = v[3] + Br * dphib;
            const double ca = std::cos(phia), sa = std::sin(phia);
            const double cb = std::cos(phib), sb = std::sin(phib);
            x[o] = ca * tar - sa * tai;
            x[o + 1] = sa * tar + ca * tai;
            x[o + 2] = cb * tbr - sb * tbi;
            x[o + 3] = sb * tbr + cb * tbi;
        }
    }

    void transport(Vec x, bool cyclic) const {
        const std::size_t n = grid_.size();
        const double wa_r = x[4 * (n - 1)], wa_i = x[4 * (n - 1) + 1];
        const double wb_r = x[2], wb_i = x[3];
        for (std::size_t i = n - 1; i > 0; --i) {
            x[4 * i] = x[4 * (i - 1)];
            x[4 * i + 1] = x[4 * (i - 1) + 1];
        }
        for (std::size_t i = 0; i + 1 < n; ++i) {
            x[4 * i + 2] = x[4 * (i + 1) + 2];
            x[4 * i + 3] = x[4 * (i + 1) + 3];
        }
        x[0] = cyclic ? wa_r : 0.0;
        x[1] = cyclic ? wa_i : 0.0;
        x[4 * (n - 1) + 2] = cyclic ? wb_r : 0.0;
        x[4 * (n - 1) + 3] = cyclic ? wb_i : 0.0;
    }

private:
    const SimGrid& grid_;
    const GratingProfile& profile_;
};

// Classical inputs of each Kerr substep of the step starting at `classical`.
std::vector<FieldState> kerr_inputs(const SplitStepKernel& kern, const FieldState& classical) {
    std::vector<FieldState> out;
    FieldState s = classical;
    for (const auto& sub : kern.sequence()) {
        if (sub.kind == SubstepKind::kerr) out.push_back(s);
        kern.apply(sub, s.u_a, s.u_b);
    }
    return out;
}

template <class ColumnOp>
void apply_congruence(Eigen::MatrixXd& c, ColumnOp op) {
    for (Eigen::Index j = 0; j < c.cols(); ++j) op(c.col(j));
    c.transposeInPlace();
    for (Eigen::Index j = 0; j < c.cols(); ++j) op(c.col(j));
}

void check_size(const SimGrid& grid) {
    if (grid.size() > kMaxOraclePoints) {
        throw ValidationError("covariance oracle: n_points " + std::to_string(grid.size()) + " exceeds " +
                              std::to_string(kMaxOraclePoints));
    }
}

}  // namespace

QuadratureCovariance QuadratureCovariance::vacuum(std::size_t n_points, double dz) {
    QuadratureCovariance c;
    c.dz = dz;
    const auto dim = static_cast<Eigen::Index>(4 * n_points);
    c.matrix = Eigen::MatrixXd::Identity(dim, dim) / (4.0 * dz);
    return c;
}

QuadratureCovariance forward_covariance(const FieldHistory& history) {
    const SimGrid& grid = history.grid();
    check_size(grid);
    const std::size_t n = grid.size();
    const double vac = 1.0 / (4.0 * grid.dz());
    const QuadratureSteps q(grid, history.profile());
    const SplitStepKernel kern = history.kernel();

    QuadratureCovariance cov = QuadratureCovariance::vacuum(n, grid.dz());
    Eigen::MatrixXd& c = cov.matrix;
    std::vector<FieldState> segment;
    const auto& cps = history.checkpoints();
    for (std::size_t k = 0; k + 1 < cps.size(); ++k) {
        history.replay_segment(k, segment);
        const auto len = static_cast<std::size_t>(cps[k + 1].first - cps[k].first);
        for (std::size_t j = 0; j < len; ++j) {
            const auto kin = kerr_inputs(kern, segment[j]);
            std::size_t kk = 0;
            for (const auto& sub : kern.sequence()) {
                switch (sub.kind) {
                    case SubstepKind::transport: {
                        apply_congruence(c, [&](Vec x) { q.transport(x, false); });
                        const Eigen::Index ia = 0;
                        const auto ib = static_cast<Eigen::Index>(4 * (n - 1) + 2);
                        c(ia, ia) = c(ia + 1, ia + 1) = vac;
                        c(ib, ib) = c(ib + 1, ib + 1) = vac;
                        break;
                    }
                    case SubstepKind::linear:
                        apply_congruence(c, [&](Vec x) { q.linear(x, sub.fraction); });
                        break;
                    case SubstepKind::kerr: {
                        const FieldState& cl = kin[kk++];
                        apply_congruence(c, [&](Vec x) { q.kerr_jacobian(x, cl, sub.fraction); });
                        break;
                    }
                }
            }
        }
    }
    return cov;
}

double oracle_variance(const QuadratureCovariance& c, const ProjectionFunction& f) {
    const std::size_t n = c.n_points();
    if (f.size() != n) throw GridMismatchError("oracle_variance: projection size does not match covariance");
    Eigen::VectorXd v(static_cast<Eigen::Index>(4 * n));
    for (std::size_t i = 0; i < n; ++i) {
        v[4 * i] = f.f_a[i].real();
        v[4 * i + 1] = f.f_a[i].imag();
        v[4 * i + 2] = f.f_b[i].real();
        v[4 * i + 3] = f.f_b[i].imag();
    }
    return c.dz * c.dz * v.dot(c.matrix * v);
}

Eigen::MatrixXd one_step_map(const FieldHistory& history, const FieldState& classical) {
    const SimGrid& grid = history.grid();
    check_size(grid);
    const QuadratureSteps q(grid, history.profile());
    const SplitStepKernel kern = history.kernel();
    const auto kin = kerr_inputs(kern, classical);
    const auto dim = static_cast<Eigen::Index>(4 * grid.size());
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(dim, dim);
    std::size_t kk = 0;
    for (const auto& sub : kern.sequence()) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            switch (sub.kind) {
                case SubstepKind::transport: q.transport(s.col(j), true); break;
                case SubstepKind::linear: q.linear(s.col(j), sub.fraction); break;
                case SubstepKind::kerr: q.kerr_jacobian(s.col(j), kin[kk], sub.fraction); break;
            }
        }
        if (sub.kind == SubstepKind::kerr) ++kk;
    }
    return s;
}

Eigen::MatrixXd canonical_form(std::size_t n_points) {
    const auto dim = static_cast<Eigen::Index>(4 * n_points);
    Eigen::MatrixXd om = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index k = 0; k < dim; k += 2) {
        om(k, k + 1) = 1.0;
        om(k + 1, k) = -1.0;
    }
    return om;
}

double symplectic_defect(const Eigen::MatrixXd& s) {
    const Eigen::MatrixXd om = canonical_form(static_cast<std::size_t>(s.rows() / 4));
    return (s * om * s.transpose() - om).cwiseAbs().maxCoeff();
}

}  // namespace fbg
