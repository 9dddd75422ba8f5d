#include "thinfree/profiles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace thinfree;

TEST_CASE("polar hessian of homogeneous functions") {
    SUBCASE("closed-form entries") {
        const SymMat2 m = hessian_of_homogeneous(2.0, 1.0, 0.0, -2.0);
        CHECK(m.m11 == doctest::Approx(2.0));
        CHECK(m.m12 == doctest::Approx(0.0));
        CHECK(m.m22 == doctest::Approx(0.0));
    }
    SUBCASE("linear functions have zero hessian") {
        for (double theta = 0.1; theta < 6.2; theta += 0.5) {
            const SymMat2 m =
                hessian_of_homogeneous(1.0, std::sin(theta), std::cos(theta), -std::sin(theta));
            CHECK(std::abs(m.m11) < 1e-15);
            CHECK(std::abs(m.m12) < 1e-15);
            CHECK(std::abs(m.m22) < 1e-15);
        }
    }
    SUBCASE("classical harmonic profile is in the kernel of the trace") {
        const EllipticityPair ell(1.0, 1.0);
        for (double theta = 0.0; theta < 6.3; theta += 0.3) {
            const double p = std::cos(1.5 * theta);
            const double pp = -1.5 * std::sin(1.5 * theta);
            const double ppp = -2.25 * std::cos(1.5 * theta);
            CHECK(std::abs(pucci_plus(hessian_of_homogeneous(1.5, p, pp, ppp), ell)) < 1e-12);
        }
    }
    SUBCASE("matches the rotated cartesian hessian of x1^2") {
        // u = r^2 cos^2(theta) = x1^2 has Hessian diag(2, 0); in the polar
        // frame at angle theta that is R^T diag(2,0) R.
        for (double theta = 0.05; theta < 6.3; theta += 0.4) {
            const double c = std::cos(theta), s = std::sin(theta);
            const SymMat2 m =
                hessian_of_homogeneous(2.0, c * c, -2.0 * c * s, 2.0 * (s * s - c * c));
            CHECK(m.m11 == doctest::Approx(2.0 * c * c).epsilon(1e-12));
            CHECK(m.m12 == doctest::Approx(-2.0 * c * s).epsilon(1e-12));
            CHECK(m.m22 == doctest::Approx(2.0 * s * s).epsilon(1e-12));
        }
    }
    SUBCASE("finite differences of the cartesian function") {
        // u(x) = r^beta cos(beta * theta) solves the polar formula; compare a
        // cartesian central-difference Hessian at a sample point.
        const double beta = 1.7;
        auto u = [&](double x, double y) {
            const double r = std::hypot(x, y);
            return std::pow(r, beta) * std::cos(beta * std::atan2(y, x));
        };
        const double x = 0.6, y = 0.35, fd = 1e-4;
        const double d11 = (u(x + fd, y) - 2 * u(x, y) + u(x - fd, y)) / (fd * fd);
        const double d22 = (u(x, y + fd) - 2 * u(x, y) + u(x, y - fd)) / (fd * fd);
        const double d12 =
            (u(x + fd, y + fd) + u(x - fd, y - fd) - u(x + fd, y - fd) - u(x - fd, y + fd)) /
            (4 * fd * fd);
        const double r = std::hypot(x, y), theta = std::atan2(y, x);
        const double phi = std::cos(beta * theta);
        const double phi_p = -beta * std::sin(beta * theta);
        const double phi_pp = -beta * beta * std::cos(beta * theta);
        // Scale to r = 1 by homogeneity, rotate into the cartesian frame.
        const SymMat2 polar = hessian_of_homogeneous(beta, phi, phi_p, phi_pp) *
                              std::pow(r, beta - 2.0);
        const SymMat2 cart = polar.rotated(-theta);
        CHECK(cart.m11 == doctest::Approx(d11).epsilon(1e-5));
        CHECK(cart.m12 == doctest::Approx(d12).epsilon(1e-5));
        CHECK(cart.m22 == doctest::Approx(d22).epsilon(1e-5));
    }
}

TEST_CASE("angular ODE right-hand side") {
    SUBCASE("recovers the harmonic equation at omega = 1") {
        const double beta = 1.5;
        for (double phi : {-0.8, -0.1, 0.3, 1.0}) {
            for (double phi_p : {-1.0, 0.0, 0.7}) {
                CHECK(angular_rhs(beta, 1.0, phi, phi_p) ==
                      doctest::Approx(-beta * beta * phi).epsilon(1e-11));
            }
        }
    }
    SUBCASE("zero state gives zero curvature") {
        CHECK(angular_rhs(1.5, 2.0, 0.0, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("positive 1-homogeneity in (phi, phi')") {
        for (double t : {0.5, 2.0, 7.0}) {
            const double base = angular_rhs(1.6, 3.0, -0.4, 0.9);
            CHECK(angular_rhs(1.6, 3.0, -0.4 * t, 0.9 * t) ==
                  doctest::Approx(t * base).epsilon(1e-9).scale(1.0 + std::abs(t * base)));
        }
    }
    SUBCASE("defines a root of the pucci equation") {
        const EllipticityPair ell(1.0, 2.5);
        const double phi_pp = angular_rhs(1.55, 2.5, -0.6, 0.4);
        CHECK(std::abs(pucci_plus(hessian_of_homogeneous(1.55, -0.6, 0.4, phi_pp), ell)) < 1e-11);
    }
}

TEST_CASE("sector shooting against the implicit equations") {
    SUBCASE("laplacian sector of the classical profile") {
        CHECK(shoot_sector(1.5, 1.0, ConeSign::Negative) ==
              doctest::Approx(2.0 * M_PI / 3.0).epsilon(1e-6));
        CHECK(shoot_sector(1.5, 1.0, ConeSign::Positive) ==
              doctest::Approx(2.0 * M_PI / 3.0).epsilon(1e-6));
    }
    SUBCASE("apertures match 2g and 2h across omega") {
        for (double w : {1.0, 1.5, 2.0, 5.0, 20.0}) {
            const double alpha = alpha_pucci(w).alpha;
            const double neg = shoot_sector(1.0 + alpha, w, ConeSign::Negative);
            const double pos = shoot_sector(1.0 + alpha, w, ConeSign::Positive);
            CHECK(std::abs(neg - 2.0 * g(alpha, w)) < 1e-4);
            CHECK(std::abs(pos - 2.0 * h(alpha, w)) < 1e-4);
            CHECK(std::abs(2.0 * neg + pos - 2.0 * M_PI) < 2e-4);
        }
    }
    SUBCASE("parameter errors") {
        CHECK_THROWS_AS(shoot_sector(0.9, 1.0, ConeSign::Negative), ParameterError);
        CHECK_THROWS_AS(shoot_sector(3.2, 1.0, ConeSign::Negative), ParameterError);
        CHECK_THROWS_AS(shoot_sector(1.5, 0.5, ConeSign::Negative), ParameterError);
    }
}

TEST_CASE("three-sector blow-up profile") {
    SUBCASE("omega = 1 equals the classical harmonic profile") {
        const BlowupProfile p = build_profile(1.0);
        CHECK(p.alpha_G == doctest::Approx(0.5).epsilon(1e-12));
        double worst = 0.0;
        for (int k = 1; k < 2048; ++k) {
            const double theta = 2.0 * M_PI * k / 2048.0;
            worst = std::max(worst, std::abs(profile_angular_value(p, theta) -
                                             std::cos(1.5 * (theta - M_PI))));
        }
        CHECK(worst < 1e-4);
    }

    SUBCASE("sector geometry and matching for omega = 2") {
        const BlowupProfile p = build_profile(2.0);
        CHECK(p.homogeneity() > 1.0);
        CHECK(p.homogeneity() < 2.0);
        CHECK(p.theta1 < M_PI);
        CHECK(p.theta2 - p.theta1 < M_PI);
        CHECK(2.0 * M_PI - p.theta2 < M_PI);
        CHECK(std::abs(p.theta1 + (p.theta2 - p.theta1) + (2.0 * M_PI - p.theta2) - 2.0 * M_PI) <
              1e-10);
        CHECK(p.c1 > 0.0);
        CHECK(p.c3 > 0.0);

        // Signs: negative, positive, negative at sector midpoints.
        CHECK(profile_angular_value(p, 0.5 * p.theta1) < 0.0);
        CHECK(profile_angular_value(p, 0.5 * (p.theta1 + p.theta2)) > 0.0);
        CHECK(profile_angular_value(p, 0.5 * (p.theta2 + 2.0 * M_PI)) < 0.0);
    }

    SUBCASE("assembled profile is C1 at the interfaces") {
        for (double w : {1.0, 2.0, 5.0}) {
            const BlowupProfile p = build_profile(w);
            for (double theta : {p.theta1, p.theta2}) {
                // One-sided derivatives from the interpolant with Richardson
                // refinement; the interface values are exact zeros.
                const double d = 1e-4;
                auto from_left = [&](double dd) { return -profile_angular_value(p, theta - dd) / dd; };
                auto from_right = [&](double dd) { return profile_angular_value(p, theta + dd) / dd; };
                const double dl = 2.0 * from_left(d) - from_left(2.0 * d);
                const double dr = 2.0 * from_right(d) - from_right(2.0 * d);
                CHECK(std::abs(dl - dr) <= 1e-8 * std::max(1.0, std::abs(dl)));
            }
        }
    }

    SUBCASE("angular grids are internally consistent") {
        const BlowupProfile p = build_profile(2.0);
        for (const auto& sec : p.sectors) {
            CHECK(sec.phi.front() == 0.0);
            CHECK(sec.phi.back() == 0.0);
            // Sign constant in the interior.
            const double s = sec.sign == ConeSign::Positive ? 1.0 : -1.0;
            for (size_t k = 1; k + 1 < sec.phi.size(); ++k) CHECK(s * sec.phi[k] > 0.0);
            // Trapezoidal integral of phi' reproduces phi.
            double acc = 0.0, worst = 0.0;
            for (size_t k = 1; k < sec.phi.size(); ++k) {
                const double dt = sec.theta_grid[k] - sec.theta_grid[k - 1];
                acc += 0.5 * dt * (sec.phi_prime[k] + sec.phi_prime[k - 1]);
                worst = std::max(worst, std::abs(acc - sec.phi[k]));
            }
            CHECK(worst < 1e-8);
        }
    }

    SUBCASE("positive x1 axis carries the maximum") {
        for (double w : {1.0, 2.0, 5.0}) {
            const BlowupProfile p = build_profile(w);
            const double at_pi = profile_angular_value(p, M_PI);
            CHECK(at_pi > 0.0);
            double sup = 0.0;
            for (int k = 0; k < 4096; ++k) {
                sup = std::max(sup, std::abs(profile_angular_value(p, 2.0 * M_PI * k / 4096.0)));
            }
            CHECK(sup == doctest::Approx(1.0).epsilon(1e-6)); // normalization
            CHECK(at_pi >= sup - 1e-9);
        }
    }
}

TEST_CASE("profile evaluation") {
    const BlowupProfile p = build_profile(2.0);
    SUBCASE("origin and slit vanish") {
        CHECK(eval_profile(p, 0.0, 0.0) == 0.0);
        for (double x1 : {-0.9, -0.5, -0.05}) {
            CHECK(std::abs(eval_profile(p, x1, 0.0)) < 1e-8);
        }
    }
    SUBCASE("exact homogeneity") {
        std::mt19937_64 rng(42);
        std::uniform_real_distribution<double> d(-1.0, 1.0);
        const double beta = p.homogeneity();
        for (int k = 0; k < 50; ++k) {
            const double x1 = d(rng), x2 = d(rng);
            if (std::abs(x2) < 1e-3 && x1 < 0.0) continue;
            const double v = eval_profile(p, x1, x2);
            if (std::abs(v) < 1e-12) continue;
            CHECK(eval_profile(p, 2.0 * x1, 2.0 * x2) / v ==
                  doctest::Approx(std::pow(2.0, beta)).epsilon(1e-10));
        }
    }
    SUBCASE("analytic x1-derivative matches finite differences") {
        for (double x1 : {-0.4, 0.2, 0.6}) {
            for (double x2 : {-0.5, 0.3, 0.8}) {
                const double fd = 1e-6;
                const double num =
                    (eval_profile(p, x1 + fd, x2) - eval_profile(p, x1 - fd, x2)) / (2.0 * fd);
                CHECK(eval_profile_dx1(p, x1, x2) ==
                      doctest::Approx(num).epsilon(1e-5).scale(1.0 + std::abs(num)));
            }
        }
    }
    SUBCASE("monotone in x1") {
        for (double w : {1.0, 2.0, 5.0}) {
            const BlowupProfile q = build_profile(w);
            double worst = 0.0;
            for (int i = 0; i < 64; ++i) {
                for (int j = 0; j < 64; ++j) {
                    const double x1 = -1.0 + 2.0 * (i + 0.5) / 64.0;
                    const double x2 = -1.0 + 2.0 * (j + 0.5) / 64.0;
                    worst = std::min(worst, eval_profile_dx1(q, x1, x2));
                }
            }
            CHECK(worst >= -1e-8);
        }
    }
}

TEST_CASE("profile verification report") {
    for (double w : {1.0, 2.0}) {
        const auto rep = verify_profile(build_profile(w), 1e-3);
        CHECK(rep.residual_pass);
        CHECK(rep.max_residual_rel <= 1e-3);
        CHECK(rep.sign_pass);
        CHECK(rep.pass);
        // The contact-set reaction pushes the membrane up: the distributional
        // gap of u_x2 across the slit is negative.
        CHECK(rep.max_slit_jump < 0.0);
    }
    const auto rep5 = verify_profile(build_profile(5.0), 1e-3);
    CHECK(rep5.sign_pass);
}
