#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fbg/adjoint.hpp"
#include "fbg/covariance.hpp"
#include "fbg/validation.hpp"

using namespace fbg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("vacuum covariance gives the coherent variance") {
    const auto c = QuadratureCovariance::vacuum(20, 0.05);
    ProjectionFunction f(20);
    f.f_a[3] = {1.0, -2.0};
    f.f_b[7] = {0.5, 0.0};
    CHECK_THAT(oracle_variance(c, f), WithinRel(0.25 * f.sq_norm(0.05), 1e-14));
}

TEST_CASE("oracle and adjoint agree on a reduced instance") {
    for (auto sp : {Splitting::lie, Splitting::strang}) {
        OracleValidationOptions opt;
        opt.n_points = 32;
        opt.n_steps = 120;
        opt.random_projections = 4;
        opt.splitting = sp;
        const auto rep = run_oracle_validation(opt);
        CHECK(rep.projections_checked == 5);
        CHECK(rep.max_relative_error < 1e-9);
        CHECK(rep.max_symplectic_defect < 1e-10);
        CHECK(rep.photon_number_ratio != Catch::Approx(1.0).epsilon(1e-3));  // nonlinearity acts
    }
}

TEST_CASE("one-step map is symplectic and the canonical form is antisymmetric") {
    OracleValidationOptions opt;
    opt.n_points = 24;
    opt.n_steps = 10;
    const auto inst = make_oracle_instance(opt);
    const auto run = run_forward(inst.config, inst.initial);
    const auto s = one_step_map(run.history, run.final_state);
    CHECK(symplectic_defect(s) < 1e-12);
    const auto om = canonical_form(24);
    CHECK((om + om.transpose()).cwiseAbs().maxCoeff() == 0.0);
    // a non-symplectic matrix is detected
    Eigen::MatrixXd bad = s;
    bad(0, 0) += 0.01;
    CHECK(symplectic_defect(bad) > 1e-4);
}

TEST_CASE("oracle refuses large grids") {
    OracleValidationOptions opt;
    opt.n_points = 600;
    CHECK_THROWS_AS(make_oracle_instance(opt), ValidationError);
}
