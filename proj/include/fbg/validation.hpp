#pragma once

// Reduced-scale equivalence check between the adjoint engine and the forward
// covariance oracle.

#include <cstdint>

#include "fbg/solver.hpp"

namespace fbg {

struct OracleValidationOptions {
    int n_points = 64;
    std::int64_t n_steps = 500;
    int random_projections = 10;
    std::uint64_t seed = 20040101;
    Splitting splitting = Splitting::lie;
    /// Check S Omega S^T = Omega at every k-th step (0 disables).
    std::int64_t symplectic_check_every = 1;
};

struct OracleValidationReport {
    double max_relative_error = 0.0;       // over random and photon-number projections
    double photon_number_relative_error = 0.0;
    double photon_number_ratio = 1.0;
    double max_symplectic_defect = 0.0;
    int projections_checked = 0;
};

/// Trapped high-intensity pulse at the gap centre of a grating covering the whole
/// window, so that the background stays strongly nonlinear for the whole run.
struct OracleInstance {
    SolverConfig config;
    FieldState initial;
};
OracleInstance make_oracle_instance(const OracleValidationOptions& opt);

OracleValidationReport run_oracle_validation(const OracleValidationOptions& opt);

}  // namespace fbg
