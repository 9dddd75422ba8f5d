#include "thinfree/solver.hpp"

#include <doctest.h>

#include <cmath>

using namespace thinfree;

namespace {

std::vector<double> sample_grid(const Grid2D& g, double (*f)(double, double)) {
    std::vector<double> u(g.size());
    for (int i = 0; i < g.n; ++i) {
        for (int j = 0; j < g.n; ++j) u[g.idx(i, j)] = f(g.x1(j), g.x2(i));
    }
    return u;
}

} // namespace

TEST_CASE("grid invariants") {
    const Grid2D g(65);
    CHECK(g.h == doctest::Approx(2.0 / 64.0));
    CHECK(g.x2(g.thin_row) == 0.0);
    CHECK_THROWS_AS(Grid2D(64), ParameterError);
    CHECK_THROWS_AS(Grid2D(3), ParameterError);
}

TEST_CASE("stencil construction") {
    const auto pucci = ConvexOperator::pucci(EllipticityPair(1.0, 2.0));
    SUBCASE("direction counts and reach") {
        for (int k : {4, 8, 16}) {
            const auto st = build_stencil(pucci, k);
            CHECK(st.direction_count() == k);
            CHECK(st.width() <= 4);
        }
        const auto st32 = build_stencil(pucci, 32);
        CHECK(st32.direction_count() == 24); // all coprime lines at width 4
        CHECK(build_stencil(pucci, 16).dtheta() == doctest::Approx(std::atan(0.25)).epsilon(1e-12));
        CHECK_THROWS_AS(build_stencil(pucci, 6), ParameterError);
    }
    SUBCASE("orthogonal partners") {
        const auto st = build_stencil(pucci, 16);
        for (const auto& p : st.pairs()) {
            CHECK(p.ax * p.bx + p.ay * p.by == 0);
            CHECK(p.ax * p.ax + p.ay * p.ay == p.bx * p.bx + p.by * p.by);
        }
    }
}

TEST_CASE("stencil consistency on quadratics") {
    const Grid2D g(65);
    const int c = g.thin_row;

    SUBCASE("trace reduces to the 5-point laplacian on the axis pair") {
        const auto st = build_stencil(parse_operator_spec("laplacian"), 4);
        const auto q = sample_grid(g, [](double x1, double x2) { return x1 * x1 - 2.0 * x2 * x2; });
        // Exact double of the second derivative sum for any grid quadratic.
        CHECK(st.apply(g, q, c, c) == doctest::Approx(-2.0).epsilon(1e-9));
        const auto axis_only = (q[g.idx(c, c + 1)] + q[g.idx(c, c - 1)] + q[g.idx(c + 1, c)] +
                                q[g.idx(c - 1, c)] - 4.0 * q[g.idx(c, c)]) /
                               (g.h * g.h);
        CHECK(st.apply(g, q, c, c) == doctest::Approx(axis_only).epsilon(1e-12));
    }

    SUBCASE("pucci exact on axis-aligned quadratics") {
        const auto st = build_stencil(ConvexOperator::pucci(EllipticityPair(1.0, 2.0)), 4);
        const auto q = sample_grid(g, [](double x1, double) { return x1 * x1; });
        CHECK(st.apply(g, q, c, c) == doctest::Approx(4.0).epsilon(1e-10));
        // D^2 = diag(2,-2): P+ = 2*2 + 1*(-2) = 2.
        const auto q2 = sample_grid(g, [](double x1, double x2) { return x1 * x1 - x2 * x2; });
        CHECK(st.apply(g, q2, c, c) == doctest::Approx(2.0).epsilon(1e-10));
    }

    SUBCASE("directional resolution improves with K") {
        // Quadratic with eigenframe at 0.30 rad, between the stencil lines of
        // every direction set; the frame max sharpens as K grows.
        const double ang = 0.30;
        const SymMat2 hess = SymMat2::diag(2.0, -1.0).rotated(ang);
        const EllipticityPair ell(1.0, 2.0);
        const double exact = pucci_plus(hess, ell);
        auto qfun = [&](double x1, double x2) {
            return 0.5 * (hess.m11 * x1 * x1 + 2.0 * hess.m12 * x1 * x2 + hess.m22 * x2 * x2);
        };
        std::vector<double> q(g.size());
        for (int i = 0; i < g.n; ++i) {
            for (int j = 0; j < g.n; ++j) q[g.idx(i, j)] = qfun(g.x1(j), g.x2(i));
        }
        double prev = 1e300;
        for (int k : {4, 8, 16, 32}) {
            const auto st = build_stencil(ConvexOperator::pucci(ell), k);
            const double err = std::abs(st.apply(g, q, c, c) - exact);
            CHECK(err < prev);
            CHECK(st.apply(g, q, c, c) <= exact + 1e-10); // frame restriction of the sup
            prev = err;
        }
    }
}

TEST_CASE("trivial solves reproduce closed forms") {
    SUBCASE("constant boundary data keeps the membrane flat") {
        const Grid2D g(33);
        const auto st = build_stencil(parse_operator_spec("laplacian"), 4);
        SolveConfig cfg;
        cfg.tol = 1e-9;
        const auto r = solve_thin_obstacle(g, BoundaryData::constant(1.0), st, cfg);
        for (double v : r.u) CHECK(v == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(r.residual_interior < 1e-8);
        CHECK(!r.fb_point.has_value()); // thin line detached everywhere
    }

    SUBCASE("linear data x2 is grid-exact with the contact set covering the line") {
        const Grid2D g(33);
        const auto st = build_stencil(parse_operator_spec("laplacian"), 4);
        SolveConfig cfg;
        cfg.tol = 1e-10;
        const auto r = solve_thin_obstacle(g, BoundaryData::preset("linear-x2"), st, cfg);
        for (int i = 0; i < g.n; ++i) {
            for (int j = 0; j < g.n; ++j) {
                CHECK(std::abs(r.u[g.idx(i, j)] - g.x2(i)) < 1e-8);
            }
        }
        CHECK(r.complementarity_gap < 1e-8);
        CHECK(!r.fb_point.has_value()); // all-contact thin line has no crossing
    }
}

TEST_CASE("thin obstacle solve with the counterexample boundary data") {
    const Grid2D g(65);
    const auto st = build_stencil(ConvexOperator::pucci(EllipticityPair(1.0, 2.0)), 16);
    SolveConfig cfg;
    cfg.tol = 1e-9;
    const auto r = solve_thin_obstacle(g, BoundaryData::thm17(), st, cfg);

    SUBCASE("complementarity holds at every thin node") {
        CHECK(r.complementarity_gap < 1e-6);
        double min_thin = 0.0;
        for (int j = 0; j < g.n; ++j) {
            min_thin = std::min(min_thin, r.u[g.idx(g.thin_row, j)]);
        }
        CHECK(min_thin >= 0.0);
        CHECK(r.residual_interior < 1e-6);
    }

    SUBCASE("boundary data is held exactly") {
        const auto bc = BoundaryData::thm17();
        for (int j = 0; j < g.n; ++j) {
            CHECK(r.u[g.idx(0, j)] == bc(g.x1(j), -1.0));
            CHECK(r.u[g.idx(g.n - 1, j)] == bc(g.x1(j), 1.0));
        }
    }

    SUBCASE("single free boundary point with a monotone thin line") {
        REQUIRE(r.fb_point.has_value());
        CHECK(*r.fb_point > -1.0);
        CHECK(*r.fb_point < 1.0);
        const auto rep = residual_report(r);
        CHECK(rep.thin_min_increment >= -1e-10);
    }

    SUBCASE("even in x2 for rotationally invariant operators") {
        const auto rep = residual_report(r);
        CHECK(rep.evenness_gap < 1e-10);
    }

    SUBCASE("reference and accelerated paths agree") {
        const Grid2D g33(33);
        SolveConfig plain;
        plain.tol = 1e-9;
        plain.accelerate = false;
        plain.max_sweeps = 400000;
        SolveConfig fast;
        fast.tol = 1e-9;
        const auto a = solve_thin_obstacle(g33, BoundaryData::thm17(), st, plain);
        const auto b = solve_thin_obstacle(g33, BoundaryData::thm17(), st, fast);
        double worst = 0.0;
        for (size_t k = 0; k < a.u.size(); ++k) worst = std::max(worst, std::abs(a.u[k] - b.u[k]));
        CHECK(worst < 5e-8);
    }
}

TEST_CASE("discrete comparison principles") {
    const Grid2D g(65);
    const auto st = build_stencil(ConvexOperator::pucci(EllipticityPair(1.0, 2.0)), 16);
    SolveConfig cfg;
    cfg.tol = 1e-11;

    SUBCASE("dominating boundary data gives a dominating solution") {
        const auto lo = solve_thin_obstacle(g, BoundaryData::constant(-0.2), st, cfg);
        const auto hi = solve_thin_obstacle(g, BoundaryData::constant(0.3), st, cfg);
        double worst = 0.0;
        for (size_t k = 0; k < lo.u.size(); ++k) {
            worst = std::min(worst, hi.u[k] - lo.u[k]);
        }
        CHECK(worst >= -1e-10);
    }

    SUBCASE("growing the operator family grows the solution") {
        const auto f0 = build_stencil(ConvexOperator::thm17_family(0), 16);
        const auto f1 = build_stencil(ConvexOperator::thm17_family(1, {1.0, 1.5}, {0.0, 0.5}), 16);
        const auto u0 = solve_thin_obstacle(g, BoundaryData::thm17(), f0, cfg);
        const auto u1 = solve_thin_obstacle(g, BoundaryData::thm17(), f1, cfg);
        double worst = 0.0;
        for (size_t k = 0; k < u0.u.size(); ++k) {
            worst = std::min(worst, u1.u[k] - u0.u[k]);
        }
        CHECK(worst >= -1e-10);
    }
}

TEST_CASE("solver error paths") {
    const Grid2D g(33);
    const auto st = build_stencil(parse_operator_spec("laplacian"), 4);

    SUBCASE("sweep cap raises NonConvergence with diagnostics") {
        SolveConfig cfg;
        cfg.tol = 1e-9;
        cfg.accelerate = false;
        cfg.max_sweeps = 3;
        CHECK_THROWS_AS(solve_thin_obstacle(g, BoundaryData::thm17(), st, cfg), NonConvergence);
        try {
            solve_thin_obstacle(g, BoundaryData::thm17(), st, cfg);
        } catch (const NonConvergence& e) {
            CHECK(e.iterations == 3);
            CHECK(e.residual > 0.0);
        }
    }

    SUBCASE("tau above the stability bound is rejected") {
        SolveConfig cfg;
        cfg.tau = 10.0 * g.h * g.h; // far beyond 1 / max_weight_sum
        CHECK_THROWS_AS(solve_thin_obstacle(g, BoundaryData::thm17(), st, cfg), ParameterError);
    }

    SUBCASE("invalid tolerance is rejected") {
        SolveConfig cfg;
        cfg.tol = 0.0;
        CHECK_THROWS_AS(solve_thin_obstacle(g, BoundaryData::thm17(), st, cfg), ParameterError);
    }
}

TEST_CASE("free boundary detection on raw fields") {
    const Grid2D g(33);
    SUBCASE("all-positive thin line has no crossing") {
        auto u = sample_grid(g, [](double, double) { return 1.0; });
        CHECK(!detect_free_boundary(g, u).has_value());
    }
    SUBCASE("zero-positive split is interpolated") {
        auto u = sample_grid(g, [](double x1, double) { return x1 > 0.3 ? x1 - 0.3 : 0.0; });
        const auto z = detect_free_boundary(g, u);
        REQUIRE(z.has_value());
        CHECK(*z == doctest::Approx(0.3).epsilon(0.08));
    }
}
