#pragma once

#include "thinfree/errors.hpp"

#include <vector>

namespace thinfree {

enum class ConeSign { Positive, Negative };

/// Planar cone for the homogeneity equations: aperture theta in (0, pi]
/// (theta = pi is the closed-form half-plane case), sign of the solution
/// inside, and ellipticity ratio omega = Lam/lam >= 1.
struct ConeSpec {
    double theta = 0.0;
    ConeSign sign = ConeSign::Negative;
    double omega = 1.0;
};

/// Root of an implicit homogeneity equation. `alpha` is the excess over
/// linear: the profile is (1+alpha)-homogeneous.
struct ExponentResult {
    double alpha = 0.0;
    double omega = 1.0;
    double residual = 0.0;
    int iterations = 0;
};

/// Half-aperture functions for homogeneous Pucci solutions in plane cones.
/// A negative solution of homogeneity 1+alpha fills aperture 2*g(alpha,omega);
/// a positive one fills 2*h(alpha,omega). Both decrease from pi/2 (alpha = 0)
/// to 0 as alpha grows, and are continuous at alpha = 1.
double g(double alpha, double omega);
double h(double alpha, double omega);

/// 2*g(alpha,omega) + h(alpha,omega) - pi. The root in alpha is the
/// homogeneity excess of the three-sector blow-up profile.
double master_equation(double alpha, double omega);

/// Homogeneity beta = 1 + alpha of the signed cone solution, from inverting
/// g (negative sign) or h (positive sign) at theta/2. Exactly 1 at theta = pi.
double cone_homogeneity(const ConeSpec& spec);

/// Optimal regular-point exponent for P^+ with ratio omega: the unique root
/// of the master equation in (0,1). alpha(1) = 1/2 and alpha is strictly
/// increasing with limit alpha_infinity().
ExponentResult alpha_pucci(double omega);

/// Limit exponent alpha(infinity), the root of
///   2 sqrt(a) = (1 - a)(pi + 2 arctan sqrt(a)),
/// approximately 0.64306995.
double alpha_infinity();

/// Rescaled forms of the master equation in x = 1/sqrt(omega):
///   F_func(x, alpha) = 0  <=>  master_equation(alpha, 1/x^2) = 0.
/// G_func is F_func scaled by sqrt((alpha+x^2)(alpha x^2+1)) / ((1-alpha) x)
/// and extends continuously to x = 0. Both decrease in x and in alpha.
double F_func(double x, double alpha);
double G_func(double x, double alpha);

/// alpha_pucci over a strictly ascending omega grid.
std::vector<ExponentResult> alpha_table(const std::vector<double>& omegas);

} // namespace thinfree
