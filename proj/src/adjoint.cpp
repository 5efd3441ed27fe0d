#include "fbg/adjoint.hpp"

#include <cmath>

namespace fbg {

double inner_product(const ProjectionFunction& f, const ProjectionFunction& g, double dz) {
    if (f.size() != g.size()) throw GridMismatchError("inner_product: projections live on different grids");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        s += (std::conj(f.f_a[i]) * g.f_a[i]).real() + (std::conj(f.f_b[i]) * g.f_b[i]).real();
    }
    return s * dz;
}

TangentStepper::TangentStepper(SplitStepKernel kernel) : kernel_(std::move(kernel)) {
    kerr_in_.assign(kernel_.kerr_substeps(), FieldState(kernel_.grid().size()));
}

void TangentStepper::kerr_inputs(const FieldState& classical) {
    if (classical.size() != kernel_.grid().size()) throw GridMismatchError("tangent step: classical field not on grid");
    scratch_ = classical;
    std::size_t k = 0;
    for (const auto& sub : kernel_.sequence()) {
        if (sub.kind == SubstepKind::kerr) {
            kerr_in_[k].u_a = scratch_.u_a;
            kerr_in_[k].u_b = scratch_.u_b;
            ++k;
            // The final Kerr substep's output is never needed.
            if (k == kerr_in_.size()) break;
        }
        kernel_.apply(sub, scratch_.u_a, scratch_.u_b);
    }
}

EscapedCells TangentStepper::forward(ProjectionFunction& p, const FieldState& classical) {
    kerr_inputs(classical);
    EscapedCells esc{};
    std::size_t k = 0;
    for (const auto& sub : kernel_.sequence()) {
        switch (sub.kind) {
            case SubstepKind::transport: esc = kernel_.transport_tangent(p.f_a, p.f_b); break;
            case SubstepKind::linear: kernel_.linear(p.f_a, p.f_b, sub.fraction); break;
            case SubstepKind::kerr:
                kernel_.kerr_tangent(kerr_in_[k].u_a, kerr_in_[k].u_b, p.f_a, p.f_b, sub.fraction);
                ++k;
                break;
        }
    }
    return esc;
}

void TangentStepper::backward(std::span<ProjectionFunction> adj, const FieldState& classical,
                              std::span<EscapedCells> escaped) {
    kerr_inputs(classical);
    const auto seq = kernel_.sequence();
    for (std::size_t m = 0; m < adj.size(); ++m) {
        ProjectionFunction& p = adj[m];
        std::size_t k = kerr_in_.size();
        for (auto it = seq.rbegin(); it != seq.rend(); ++it) {
            switch (it->kind) {
                case SubstepKind::transport: escaped[m] = kernel_.transport_transpose(p.f_a, p.f_b); break;
                case SubstepKind::linear: kernel_.linear_transpose(p.f_a, p.f_b, it->fraction); break;
                case SubstepKind::kerr:
                    --k;
                    kernel_.kerr_tangent_transpose(kerr_in_[k].u_a, kerr_in_[k].u_b, p.f_a, p.f_b, it->fraction);
                    break;
            }
        }
    }
}

EscapedCells TangentStepper::backward(ProjectionFunction& adj, const FieldState& classical) {
    EscapedCells esc{};
    backward(std::span<ProjectionFunction>(&adj, 1), classical, std::span<EscapedCells>(&esc, 1));
    return esc;
}

EscapedCells TangentStepper::adjoint_forward(ProjectionFunction& p, const FieldState& classical) {
    kerr_inputs(classical);
    EscapedCells esc{};
    std::size_t k = 0;
    for (const auto& sub : kernel_.sequence()) {
        switch (sub.kind) {
            case SubstepKind::transport: esc = kernel_.transport_inverse_transpose(p.f_a, p.f_b); break;
            case SubstepKind::linear: kernel_.linear_inverse_transpose(p.f_a, p.f_b, sub.fraction); break;
            case SubstepKind::kerr:
                kernel_.kerr_tangent_inverse_transpose(kerr_in_[k].u_a, kerr_in_[k].u_b, p.f_a, p.f_b,
                                                       sub.fraction);
                ++k;
                break;
        }
    }
    return esc;
}

ProjectionFunction step_linearized_forward(const ProjectionFunction& pert, const FieldState& classical,
                                           const GratingProfile& profile, const SimGrid& grid,
                                           Splitting splitting) {
    if (pert.size() != grid.size()) throw GridMismatchError("step_linearized_forward: perturbation not on grid");
    TangentStepper st(SplitStepKernel(grid, profile, splitting));
    ProjectionFunction out = pert;
    st.forward(out, classical);
    return out;
}

AdjointState step_adjoint_backward(const AdjointState& adj, const FieldState& classical,
                                   const GratingProfile& profile, const SimGrid& grid, Splitting splitting) {
    if (adj.f.size() != grid.size()) throw GridMismatchError("step_adjoint_backward: adjoint not on grid");
    TangentStepper st(SplitStepKernel(grid, profile, splitting));
    AdjointState out = adj;
    st.backward(out.f, classical);
    out.step -= 1;
    return out;
}

double BackpropResult::total_gram(std::size_t i, std::size_t j) const {
    return inner_product(fields[i], fields[j], dz) + escaped(i, j);
}

BackpropResult backpropagate(std::span<const ProjectionFunction> f_T, const FieldHistory& history) {
    const SimGrid& grid = history.grid();
    const std::size_t m = f_T.size();
    for (const auto& f : f_T) {
        if (f.size() != grid.size()) throw GridMismatchError("backpropagate: projection not on the history grid");
    }
    BackpropResult res;
    res.dz = grid.dz();
    res.fields.assign(f_T.begin(), f_T.end());
    res.escaped_gram.assign(m * m, 0.0);

    TangentStepper stepper(history.kernel());
    std::vector<EscapedCells> esc(m);
    std::vector<FieldState> segment;
    const auto& cps = history.checkpoints();
    const double dz = grid.dz();
    for (std::size_t k = cps.size() - 1; k-- > 0;) {
        history.replay_segment(k, segment);
        const auto len = static_cast<std::size_t>(cps[k + 1].first - cps[k].first);
        for (std::size_t j = len; j-- > 0;) {
            stepper.backward(res.fields, segment[j], esc);
            for (std::size_t p = 0; p < m; ++p) {
                for (std::size_t q = p; q < m; ++q) {
                    const double v = dz * ((std::conj(esc[p].a) * esc[q].a).real() +
                                           (std::conj(esc[p].b) * esc[q].b).real());
                    res.escaped_gram[p * m + q] += v;
                    if (q != p) res.escaped_gram[q * m + p] += v;
                }
            }
        }
        for (const auto& f : res.fields) {
            for (std::size_t i = 0; i < f.size(); ++i) {
                if (!std::isfinite(f.f_a[i].real() + f.f_a[i].imag() + f.f_b[i].real() + f.f_b[i].imag())) {
                    throw DivergenceError("backpropagate: non-finite adjoint field", cps[k].first);
                }
            }
        }
    }
    return res;
}

BackpropResult backpropagate(const ProjectionFunction& f_T, const FieldHistory& history) {
    return backpropagate(std::span<const ProjectionFunction>(&f_T, 1), history);
}

}  // namespace fbg
