#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fbg/adjoint.hpp"
#include "helpers.hpp"

using namespace fbg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using testutil::small_config;
using testutil::small_pulse;

namespace {

ProjectionFunction random_field(std::size_t n, std::mt19937_64& rng, double lo = 0.0, double hi = 10.0,
                                const SimGrid* grid = nullptr) {
    std::normal_distribution<double> nd;
    ProjectionFunction f(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (grid && (grid->z(i) < lo || grid->z(i) > hi)) continue;
        f.f_a[i] = {nd(rng), nd(rng)};
        f.f_b[i] = {nd(rng), nd(rng)};
    }
    return f;
}

FieldState plus(const FieldState& s, const ProjectionFunction& p, double eps) {
    FieldState r = s;
    for (std::size_t i = 0; i < s.size(); ++i) {
        r.u_a[i] += eps * p.f_a[i];
        r.u_b[i] += eps * p.f_b[i];
    }
    return r;
}

}  // namespace

TEST_CASE("inner product is the real part of the L2 product") {
    ProjectionFunction f(2), g(2);
    f.f_a[0] = {1, 2};
    g.f_a[0] = {3, -1};
    f.f_b[1] = {0, 1};
    g.f_b[1] = {0, 1};
    CHECK_THAT(inner_product(f, g, 0.5), WithinAbs(0.5 * (3 - 2 + 1), 1e-15));
}

TEST_CASE("tangent step matches central finite differences") {
    for (auto sp : {Splitting::lie, Splitting::strang}) {
        auto cfg = small_config(10.0, 0.018, 60);
        const auto run = run_forward(cfg, small_pulse(cfg.grid));
        const FieldState& s = run.final_state;
        std::mt19937_64 rng(7);
        const auto p = random_field(s.size(), rng);
        const auto lin = step_linearized_forward(p, s, cfg.profile, cfg.grid, sp);
        double prev = 0.0;
        for (double eps : {1e-3, 1e-4}) {
            const auto up = step_ncme(plus(s, p, eps), cfg.profile, cfg.grid, sp);
            const auto dn = step_ncme(plus(s, p, -eps), cfg.profile, cfg.grid, sp);
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < s.size(); ++i) {
                const cplx da = (up.u_a[i] - dn.u_a[i]) / (2 * eps) - lin.f_a[i];
                const cplx db = (up.u_b[i] - dn.u_b[i]) / (2 * eps) - lin.f_b[i];
                num += std::norm(da) + std::norm(db);
                den += std::norm(lin.f_a[i]) + std::norm(lin.f_b[i]);
            }
            const double rel = std::sqrt(num / den);
            CHECK(rel < 1e-6);
            if (prev > 0.0) CHECK(rel < 0.05 * prev);  // O(eps^2)
            prev = rel;
        }
    }
}

TEST_CASE("backward step is the transpose of the tangent step") {
    for (auto sp : {Splitting::lie, Splitting::strang}) {
        auto cfg = small_config(10.0, 0.018, 60);
        const auto run = run_forward(cfg, small_pulse(cfg.grid));
        const FieldState& s = run.final_state;
        std::mt19937_64 rng(11);
        // Keep both fields away from the edges so nothing escapes in one step.
        const auto u = random_field(s.size(), rng, 0.5, 15.5, &cfg.grid);
        const auto a = random_field(s.size(), rng, 0.5, 15.5, &cfg.grid);
        const auto ju = step_linearized_forward(u, s, cfg.profile, cfg.grid, sp);
        const auto jta = step_adjoint_backward({a, 1}, s, cfg.profile, cfg.grid, sp);
        CHECK(jta.step == 0);
        const double lhs = inner_product(a, ju, cfg.grid.dz());
        const double rhs = inner_product(jta.f, u, cfg.grid.dz());
        CHECK_THAT(lhs, WithinRel(rhs, 1e-12));
    }
}

TEST_CASE("adjoint-forward conserves <A|u> along the run") {
    auto cfg = small_config(10.0, 0.018, 400);
    const auto run = run_forward(cfg, small_pulse(cfg.grid));
    REQUIRE(run.escape.total() < 1e-60);
    TangentStepper ts(run.history.kernel());
    std::mt19937_64 rng(3);
    auto u = random_field(cfg.grid.size(), rng, 4.5, 11.5, &cfg.grid);
    auto a = random_field(cfg.grid.size(), rng, 4.5, 11.5, &cfg.grid);
    const double ip0 = inner_product(a, u, cfg.grid.dz());
    std::vector<FieldState> seg;
    const auto& cps = run.history.checkpoints();
    for (std::size_t k = 0; k + 1 < cps.size(); ++k) {
        run.history.replay_segment(k, seg);
        for (const auto& cl : seg) {
            ts.forward(u, cl);
            ts.adjoint_forward(a, cl);
        }
    }
    CHECK_THAT(inner_product(a, u, cfg.grid.dz()), WithinRel(ip0, 1e-10));
}

TEST_CASE("back-propagation accounts for light leaving the window") {
    auto cfg = small_config(10.0, 0.018, 1500);
    const auto run = run_forward(cfg, small_pulse(cfg.grid));
    std::mt19937_64 rng(5);
    const auto f = random_field(cfg.grid.size(), rng);
    // Linear and Kerr-free check: kappa = gamma = 0 makes J an isometry, so
    // the total back-propagated norm equals the original.
    auto free_cfg = small_config(0.0, 0.0, 1500);
    const auto free_run = run_forward(free_cfg, small_pulse(free_cfg.grid));
    const auto back = backpropagate(f, free_run.history);
    CHECK(back.escaped(0, 0) > 0.0);
    CHECK_THAT(back.total_sq_norm(0), WithinRel(f.sq_norm(cfg.grid.dz()), 1e-12));

    // batch and single projections agree exactly
    const ProjectionFunction fs[2] = {f, cplx(0, 1) * f};
    const auto b2 = backpropagate(fs, run.history);
    const auto b1 = backpropagate(f, run.history);
    CHECK(b2.total_sq_norm(0) == b1.total_sq_norm(0));
}

TEST_CASE("back-propagation is independent of the checkpoint stride") {
    auto c1 = small_config(10.0, 0.018, 150);
    auto c2 = c1;
    c2.checkpoint_stride = 1;
    const auto r1 = run_forward(c1, small_pulse(c1.grid));
    const auto r2 = run_forward(c2, small_pulse(c2.grid));
    std::mt19937_64 rng(9);
    const auto f = random_field(c1.grid.size(), rng);
    CHECK(backpropagate(f, r1.history).total_sq_norm(0) == backpropagate(f, r2.history).total_sq_norm(0));
}
