#include "thinfree/exponents.hpp"
#include "thinfree/profiles.hpp"

#include <doctest.h>

#include <cmath>

using namespace thinfree;

namespace {

// Independent bisection of a strictly decreasing function, used to
// cross-check alpha_pucci through the rescaled equations.
template <typename F>
double bisect_root(F&& f, double lo, double hi) {
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("half-aperture functions at closed-form points") {
    for (double w : {1.0, 2.0, 7.5}) {
        CHECK(g(1.0, w) == doctest::Approx(std::atan(std::sqrt(w))).epsilon(1e-14));
        CHECK(h(1.0, w) == doctest::Approx(std::atan(1.0 / std::sqrt(w))).epsilon(1e-14));
        // alpha = 0 is the half-plane case for both signs.
        CHECK(g(0.0, w) == doctest::Approx(M_PI / 2.0).epsilon(1e-14));
        CHECK(h(0.0, w) == doctest::Approx(M_PI / 2.0).epsilon(1e-14));
    }
    CHECK(g(0.5, 1.0) == doctest::Approx(M_PI / 3.0).epsilon(1e-14));
    CHECK(h(0.5, 1.0) == doctest::Approx(M_PI / 3.0).epsilon(1e-14));
}

TEST_CASE("monotonicity of the half-aperture functions") {
    for (double w : {1.0, 2.0, 10.0}) {
        double gp = g(0.0, w), hp = h(0.0, w);
        for (double a = 0.05; a <= 1.0001; a += 0.05) {
            CHECK(g(a, w) < gp);
            CHECK(h(a, w) < hp);
            gp = g(a, w);
            hp = h(a, w);
        }
    }
    // g grows and h shrinks in omega at fixed alpha.
    for (double a : {0.25, 0.5, 0.75}) {
        double gp = g(a, 1.0), hp = h(a, 1.0);
        for (double w : {1.5, 2.0, 4.0, 10.0}) {
            CHECK(g(a, w) > gp);
            CHECK(h(a, w) < hp);
            gp = g(a, w);
            hp = h(a, w);
        }
    }
    CHECK_THROWS_AS(g(-0.1, 1.0), ParameterError);
    CHECK_THROWS_AS(h(0.5, 0.9), ParameterError);
}

TEST_CASE("master equation") {
    CHECK(master_equation(0.5, 1.0) == doctest::Approx(0.0).epsilon(1e-14));
    for (double w : {1.5, 2.0, 10.0}) {
        CHECK(master_equation(1.0, w) < 0.0); // alpha(omega) < 1
    }
    for (double w : {1.0, 2.0, 5.0}) {
        double prev = master_equation(0.0, w);
        for (double a = 0.1; a <= 1.0001; a += 0.1) {
            CHECK(master_equation(a, w) < prev);
            prev = master_equation(a, w);
        }
    }
}

TEST_CASE("cone homogeneity") {
    SUBCASE("half-plane closes at homogeneity 1") {
        for (double w : {1.0, 2.0, 5.0}) {
            CHECK(cone_homogeneity({M_PI, ConeSign::Negative, w}) == 1.0);
            CHECK(cone_homogeneity({M_PI, ConeSign::Positive, w}) == 1.0);
        }
    }
    SUBCASE("laplacian cones have homogeneity pi/theta") {
        for (double theta : {M_PI / 3.0, M_PI / 2.0, 2.0}) {
            for (auto sign : {ConeSign::Negative, ConeSign::Positive}) {
                CHECK(cone_homogeneity({theta, sign, 1.0}) ==
                      doctest::Approx(M_PI / theta).epsilon(1e-12));
            }
        }
    }
    SUBCASE("inversion identity") {
        const ConeSpec spec{M_PI / 2.0, ConeSign::Negative, 2.0};
        const double beta = cone_homogeneity(spec);
        CHECK(g(beta - 1.0, 2.0) == doctest::Approx(M_PI / 4.0).epsilon(1e-12));
        const ConeSpec pos{M_PI / 2.0, ConeSign::Positive, 2.0};
        CHECK(h(cone_homogeneity(pos) - 1.0, 2.0) == doctest::Approx(M_PI / 4.0).epsilon(1e-12));
    }
    SUBCASE("shooting oracle inverts the aperture") {
        const ConeSpec spec{M_PI / 2.0, ConeSign::Negative, 2.0};
        const double beta = cone_homogeneity(spec);
        CHECK(shoot_sector(beta, 2.0, ConeSign::Negative) ==
              doctest::Approx(M_PI / 2.0).epsilon(1e-4));
    }
    SUBCASE("aperture domain errors") {
        CHECK_THROWS_AS(cone_homogeneity({0.0, ConeSign::Negative, 1.0}), ParameterError);
        CHECK_THROWS_AS(cone_homogeneity({3.5, ConeSign::Negative, 1.0}), ParameterError);
    }
}

TEST_CASE("optimal exponent alpha(omega)") {
    SUBCASE("alpha(1) = 1/2") {
        const auto r = alpha_pucci(1.0);
        CHECK(std::abs(r.alpha - 0.5) < 1e-12);
        CHECK(std::abs(r.residual) < 1e-12);
    }
    SUBCASE("residuals vanish across an omega grid") {
        for (double w : {1.0, 1.5, 2.0, 4.0, 10.0, 100.0}) {
            const auto r = alpha_pucci(w);
            CHECK(std::abs(r.residual) < 1e-12);
            CHECK(std::abs(master_equation(r.alpha, w)) < 1e-12);
            // Independent check of the sector identity 2g + h = pi.
            CHECK(2.0 * g(r.alpha, w) + h(r.alpha, w) ==
                  doctest::Approx(M_PI).epsilon(1e-13));
            CHECK(r.alpha >= 0.5);
            CHECK(r.alpha < alpha_infinity());
        }
    }
    SUBCASE("large omega approaches the limit exponent") {
        CHECK(std::abs(alpha_pucci(1e8).alpha - alpha_infinity()) < 1e-4);
    }
    SUBCASE("omega = 2 agrees with the rescaled equations") {
        const double alpha = alpha_pucci(2.0).alpha;
        const double x = 1.0 / std::sqrt(2.0);
        const double via_F = bisect_root([&](double a) { return F_func(x, a); }, 0.01, 0.99);
        const double via_G = bisect_root([&](double a) { return G_func(x, a); }, 0.01, 0.99);
        CHECK(alpha == doctest::Approx(via_F).epsilon(1e-10));
        CHECK(alpha == doctest::Approx(via_G).epsilon(1e-10));
        // Shooting oracle: the negative sector of homogeneity 1 + alpha spans 2g.
        const double aperture = shoot_sector(1.0 + alpha, 2.0, ConeSign::Negative);
        CHECK(aperture == doctest::Approx(2.0 * g(alpha, 2.0)).epsilon(1e-4));
    }
    SUBCASE("parameter errors") {
        CHECK_THROWS_AS(alpha_pucci(0.5), ParameterError);
        CHECK_THROWS_AS(alpha_pucci(std::numeric_limits<double>::infinity()), ParameterError);
    }
}

TEST_CASE("limit exponent alpha_infinity") {
    const double a = alpha_infinity();
    CHECK(std::round(a * 1e8) / 1e8 == doctest::Approx(0.64306995).epsilon(1e-12));
    const double s = std::sqrt(a);
    CHECK(std::abs(2.0 * s - (1.0 - a) * (M_PI + 2.0 * std::atan(s))) < 1e-12);
    // Same root as G(0, alpha) = pi/2 + arctan sqrt(a) - sqrt(a)/(1-a).
    const double via_G = bisect_root([&](double t) { return G_func(0.0, t); }, 0.01, 0.99);
    CHECK(std::abs(a - via_G) < 1e-10);
}

TEST_CASE("rescaled implicit equations F and G") {
    for (double a : {0.2, 0.5, 0.8}) {
        CHECK(F_func(0.0, a) == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(F_func(1.0, a) ==
              doctest::Approx(M_PI / 2.0 * (1.0 - 2.0 * a) / (1.0 + a)).epsilon(1e-13));
        CHECK(G_func(1.0, a) ==
              doctest::Approx(M_PI / 2.0 * (1.0 - 2.0 * a) / (1.0 - a)).epsilon(1e-13));
        const double s = std::sqrt(a);
        CHECK(G_func(0.0, a) ==
              doctest::Approx(M_PI / 2.0 + std::atan(s) - s / (1.0 - a)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(F_func(0.5, 1.0), ParameterError);
    CHECK_THROWS_AS(G_func(1.2, 0.5), ParameterError);
}

TEST_CASE("finite-difference signs of the partials of G") {
    const double fd = 1e-5;
    for (double x = 0.05; x <= 0.9501; x += 0.05) {
        for (double a = 0.05; a <= 0.9001; a += 0.05) {
            const double dx = (G_func(x + fd, a) - G_func(x - fd, a)) / (2.0 * fd);
            const double da = (G_func(x, a + fd) - G_func(x, a - fd)) / (2.0 * fd);
            CHECK(dx < 0.0);
            CHECK(da < 0.0);
        }
    }
}

TEST_CASE("alpha table") {
    SUBCASE("single omega") {
        const auto rows = alpha_table({1.0});
        REQUIRE(rows.size() == 1);
        CHECK(std::abs(rows[0].alpha - 0.5) < 1e-12);
    }
    SUBCASE("strictly increasing across the grid") {
        const auto rows = alpha_table({1.0, 2.0, 4.0, 10.0, 100.0});
        const double ainf = alpha_infinity();
        for (size_t k = 0; k < rows.size(); ++k) {
            CHECK(rows[k].alpha < ainf);
            if (k > 0) CHECK(rows[k].alpha - rows[k - 1].alpha > 1e-10);
        }
    }
    SUBCASE("rejects unsorted input") {
        CHECK_THROWS_AS(alpha_table({2.0, 1.0}), ParameterError);
        CHECK_THROWS_AS(alpha_table({1.0, 1.0}), ParameterError);
        CHECK_THROWS_AS(alpha_table({0.5, 2.0}), ParameterError);
    }
}
