#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fbg/types.hpp"

using namespace fbg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("grid locks dt to dz / v_g") {
    const auto g = SimGrid::make(0.0, 10.0, 1001, kDefaultGroupVelocity, 100.0);
    CHECK(g.dz() == 0.01);
    CHECK_THAT(g.dt(), WithinRel(0.01 / kDefaultGroupVelocity, 1e-15));
    CHECK(g.z(g.size() - 1) == 10.0);
    CHECK(g.n_steps() == static_cast<std::int64_t>(std::ceil(100.0 / g.dt())));
    CHECK(g.total_time() >= 100.0);
}

TEST_CASE("grid rejects bad input") {
    CHECK_THROWS_AS(SimGrid::make(0.0, 10.0, 8, 0.02, 1.0), ValidationError);
    CHECK_THROWS_AS(SimGrid::make(1.0, 1.0, 100, 0.02, 1.0), ValidationError);
    CHECK_THROWS_AS(SimGrid::make(0.0, 1.0, 100, -0.02, 1.0), ValidationError);
    CHECK_THROWS_AS(SimGrid::with_steps(0.0, 1.0, 100, 0.02, 0), ValidationError);
}

TEST_CASE("grating profile is linear inside and zero outside") {
    GratingProfile::Params p;
    p.kappa0 = 10;
    p.alpha = 0.04;
    p.grating_start = 5;
    p.grating_end = 75;
    const GratingProfile g(p);
    CHECK(g.kappa_at(4.99) == 0.0);
    CHECK(g.gamma_at(80.0) == 0.0);
    CHECK_THAT(g.kappa_at(75.0), WithinAbs(12.8, 1e-12));
    CHECK(g.gamma_at(40.0) == 0.018);
    CHECK(g.length() == 70.0);

    p.alpha = -0.2;  // would go negative before the end
    CHECK_THROWS_AS(GratingProfile(p), ValidationError);
}

TEST_CASE("cell averages halve the end cells and keep the total coupling") {
    GratingProfile::Params p;
    p.kappa0 = 10;
    p.alpha = 0.04;
    p.grating_start = 5;
    p.grating_end = 75;
    const GratingProfile g(p);
    const double dz = 0.5;
    CHECK_THAT(g.kappa_cell(40.0, dz), WithinAbs(g.kappa_at(40.0), 1e-12));
    CHECK_THAT(g.kappa_cell(5.0, dz), WithinAbs(0.5 * (10.0 + 0.04 * 0.125), 1e-12));
    CHECK_THAT(g.gamma_cell(75.0, dz), WithinAbs(0.009, 1e-15));
    CHECK(g.kappa_cell(75.5, dz) == 0.0);

    // Riemann sum of the cell averages = integral of kappa over the grating.
    double sum = 0.0;
    for (int i = 0; i <= 200; ++i) sum += g.kappa_cell(i * dz, dz) * dz;
    CHECK_THAT(sum, WithinRel(10.0 * 70.0 + 0.5 * 0.04 * 70.0 * 70.0, 1e-12));
}

TEST_CASE("sech pulse has the requested intensity FWHM and peak") {
    const auto g = SimGrid::make(0.0, 20.0, 4001, kDefaultGroupVelocity, 1.0);
    const auto s = sech_pulse(g, 10.0, 60.0, 4.5, 15.0);
    std::vector<double> I;
    double peak = 0.0;
    for (const auto& a : s.u_a) {
        I.push_back(std::norm(a));
        peak = std::max(peak, std::norm(a));
    }
    CHECK_THAT(peak, WithinRel(4.5, 1e-12));
    CHECK_THAT(intensity_fwhm(I, g.dz()) / g.v_g(), WithinRel(60.0, 1e-4));
    // energy of a sech^2 pulse: 2 w P
    const double w = sech_width_from_fwhm(60.0 * g.v_g());
    CHECK_THAT(s.norm(g.dz()), WithinRel(2.0 * w * 4.5, 1e-6));
}

TEST_CASE("sech pulse must fit the window") {
    const auto g = SimGrid::make(0.0, 5.0, 501, kDefaultGroupVelocity, 1.0);
    CHECK_THROWS_AS(sech_pulse(g, 1.0, 60.0, 1.0), ValidationError);
}

TEST_CASE("projection algebra") {
    ProjectionFunction f(4);
    f.f_a[0] = {1.0, 1.0};
    f.f_b[3] = {0.0, 2.0};
    CHECK_THAT(f.sq_norm(0.5), WithinAbs(3.0, 1e-15));
    auto g = cplx(0.0, 2.0) * f;
    CHECK_THAT(g.sq_norm(0.5), WithinAbs(12.0, 1e-15));
    g += f;
    CHECK(g.f_a[0] == cplx(-1.0, 3.0));
}

TEST_CASE("decibel convention: squeezed is negative") {
    CHECK_THAT(SqueezeResult::from_ratio(0.1).ratio_db, WithinAbs(-10.0, 1e-12));
    CHECK(SqueezeResult::from_ratio(1.0).ratio_db == 0.0);
}
