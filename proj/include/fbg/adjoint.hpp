#pragma once

// Linearized fluctuation dynamics around a stored classical run and the
// discrete adjoint used to pull measurement projections back to the input.
//
// The backward adjoint step is the exact transpose (w.r.t. <f|g> below) of the
// discrete tangent map of one forward step, substep by substep, linearized
// about the same classical snapshots. Hence <A_k | u_k> is conserved exactly,
// up to the cells that leave the window; those are tallied so that nothing is
// lost from the variance bookkeeping.

#include <cstdint>
#include <span>
#include <vector>

#include "fbg/scheme.hpp"
#include "fbg/solver.hpp"
#include "fbg/types.hpp"

namespace fbg {

/// <f|g> = 1/2 sum dz [f_a* g_a + f_a g_a* + f_b* g_b + f_b g_b*] = sum dz Re(f* g).
double inner_product(const ProjectionFunction& f, const ProjectionFunction& g, double dz);

struct AdjointState {
    ProjectionFunction f;
    std::int64_t step = 0;  // counts down during back-propagation
};

/// Tangent and adjoint steppers over one forward step. `classical` is always the
/// start-of-step field of the forward step in question. Returned escaped cells
/// are the values that left the window during the transport substep.
class TangentStepper {
public:
    explicit TangentStepper(SplitStepKernel kernel);

    const SplitStepKernel& kernel() const noexcept { return kernel_; }

    /// u_{k+1} = J_k u_k
    EscapedCells forward(ProjectionFunction& pert, const FieldState& classical);
    /// A_k = J_k^T A_{k+1}, for every field in the batch.
    void backward(std::span<ProjectionFunction> adj, const FieldState& classical,
                  std::span<EscapedCells> escaped);
    EscapedCells backward(ProjectionFunction& adj, const FieldState& classical);
    /// A_{k+1} = J_k^{-T} A_k
    EscapedCells adjoint_forward(ProjectionFunction& adj, const FieldState& classical);

private:
    // Classical inputs of the Kerr substeps of this step, in forward order.
    void kerr_inputs(const FieldState& classical);

    SplitStepKernel kernel_;
    std::vector<FieldState> kerr_in_;
    FieldState scratch_;
};

ProjectionFunction step_linearized_forward(const ProjectionFunction& pert, const FieldState& classical,
                                           const GratingProfile& profile, const SimGrid& grid,
                                           Splitting splitting = Splitting::lie);

AdjointState step_adjoint_backward(const AdjointState& adj, const FieldState& classical,
                                   const GratingProfile& profile, const SimGrid& grid,
                                   Splitting splitting = Splitting::lie);

/// Projections pulled back to t = 0 plus the cross-products of everything that
/// left the window on the way, so that
///   total_gram(i, j) = <F_i|F_j> + sum over escaped cells dz Re(e_i* e_j)
/// is the exact input-side Gram matrix of the back-propagated set.
struct BackpropResult {
    std::vector<ProjectionFunction> fields;
    std::vector<double> escaped_gram;  // row-major n x n
    double dz = 0.0;

    std::size_t count() const noexcept { return fields.size(); }
    double escaped(std::size_t i, std::size_t j) const { return escaped_gram[i * count() + j]; }
    double total_gram(std::size_t i, std::size_t j) const;
    double total_sq_norm(std::size_t i) const { return total_gram(i, i); }
};

BackpropResult backpropagate(std::span<const ProjectionFunction> f_T, const FieldHistory& history);
BackpropResult backpropagate(const ProjectionFunction& f_T, const FieldHistory& history);

}  // namespace fbg
