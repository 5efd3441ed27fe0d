#pragma once

// Brute-force second-moment propagation of the linearized fluctuations, used as
// an independent check of the adjoint engine on small grids.
//
// State vector per cell: (Re u_a, Im u_a, Re u_b, Im u_b). The vacuum covariance
// is I / (4 dz), so that the variance of <f|u> = sum dz Re(f* u) is
// dz^2 f^T C f = 1/4 sq_norm(f). Cells entering the window through the
// transport substep carry fresh vacuum.

#include <cstddef>

#include <Eigen/Dense>

#include "fbg/solver.hpp"
#include "fbg/types.hpp"

namespace fbg {

inline constexpr std::size_t kMaxOraclePoints = 512;

struct QuadratureCovariance {
    Eigen::MatrixXd matrix;
    double dz = 0.0;

    std::size_t n_points() const noexcept { return static_cast<std::size_t>(matrix.rows() / 4); }
    static QuadratureCovariance vacuum(std::size_t n_points, double dz);
};

/// C(T) from vacuum C(0) along the classical run stored in `history`.
QuadratureCovariance forward_covariance(const FieldHistory& history);

/// dz^2 f^T C f with f stacked as (Re f_a, Im f_a, Re f_b, Im f_b) per cell.
double oracle_variance(const QuadratureCovariance& c, const ProjectionFunction& f);

/// Dense 4N x 4N matrix of one linearized step about the given start-of-step
/// classical field, with transport taken as a cyclic permutation so that the map
/// is square (the wrapped cells are the ones re-seeded with vacuum).
Eigen::MatrixXd one_step_map(const FieldHistory& history, const FieldState& classical);

/// Block-diagonal canonical form, [[0, 1], [-1, 0]] per complex amplitude.
Eigen::MatrixXd canonical_form(std::size_t n_points);

/// max |S Omega S^T - Omega|
double symplectic_defect(const Eigen::MatrixXd& s);

}  // namespace fbg
