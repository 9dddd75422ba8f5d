#pragma once

#include "thinfree/exponents.hpp"
#include "thinfree/operators.hpp"
#include "thinfree/symmat2.hpp"

#include <array>
#include <vector>

namespace thinfree {

/// Hessian of r^beta * phi(theta) at r = 1 in the orthonormal
/// (radial, tangential) frame:
///   [ beta(beta-1) phi     (beta-1) phi'      ]
///   [ (beta-1) phi'        beta phi + phi''   ]
SymMat2 hessian_of_homogeneous(double beta, double phi, double phi_p, double phi_pp);

/// Angular ODE right-hand side: the unique phi'' with
/// P^+_{1,omega}(hessian_of_homogeneous(beta, phi, phi', phi'')) = 0,
/// found by bisection on an adaptive bracket (the map is strictly
/// increasing in phi'' by ellipticity).
double angular_rhs(double beta, double omega, double phi, double phi_p);

/// Aperture of the cone in which r^beta * phi solves the Pucci equation with
/// the given interior sign: integrate phi from (0, +-1) with classical RK4
/// (fixed step pi/16384) until phi returns to zero and locate the crossing by
/// linear interpolation plus one secant refinement. Throws NoSectorClosure if
/// phi does not return within 2 pi.
double shoot_sector(double beta, double omega, ConeSign sign);

/// One signed sector of the angular profile on a uniform theta grid.
struct AngularSolution {
    double beta = 0.0;
    ConeSign sign = ConeSign::Negative;
    std::vector<double> theta_grid; // ascending, endpoints on the interfaces
    std::vector<double> phi;        // zero at both endpoints
    std::vector<double> phi_prime;
};

/// Three-sector homogeneous blow-up profile for P^+ with ratio omega.
/// Angles are measured counterclockwise from the slit {x2 = 0, x1 <= 0}:
/// theta = arg(-x1 + i x2) in [0, 2 pi). Sector signs are -, +, - and the
/// assembled profile is C^1 across theta1 and theta2 with max |phi| = 1.
struct BlowupProfile {
    double omega = 1.0;
    double alpha_G = 0.0; // homogeneity is 1 + alpha_G in (1, 2)
    double theta1 = 0.0;  // = 2 g(alpha_G, omega)
    double theta2 = 0.0;  // = theta1 + 2 h(alpha_G, omega)
    std::array<AngularSolution, 3> sectors;
    double c1 = 0.0; // positive matching coefficients of the outer sectors
    double c3 = 0.0;

    double homogeneity() const { return 1.0 + alpha_G; }
};

BlowupProfile build_profile(double omega);

/// r^(1+alpha_G) * phi(theta) with phi interpolated cubically on the angular
/// grids (endpoints clamped to exact zeros). Returns 0 at the origin.
double eval_profile(const BlowupProfile& p, double x1, double x2);

/// d/dx1 of eval_profile from the stored (phi, phi') pair:
/// r^(beta-2) * (beta * phi * x1 + phi' * x2).
double eval_profile_dx1(const BlowupProfile& p, double x1, double x2);

/// Angular value phi(theta) of the assembled profile, theta in [0, 2 pi).
double profile_angular_value(const BlowupProfile& p, double theta);

struct ProfileReport {
    double max_residual_rel = 0.0;  // max |P^+(D^2 u)| / (Lam |D^2 u|) off the slit
    double min_thin_value = 0.0;    // min of u on the thin space samples
    double min_dx1 = 0.0;           // min of du/dx1 over samples
    double max_slit_jump = 0.0;     // max over slit samples of [u_x2(0+) + u_x2(0-)] sign proxy
    bool residual_pass = false;
    bool sign_pass = false;
    bool pass = false;
};

/// Samples Cartesian finite-difference Hessians of eval_profile off the slit
/// (step 1e-3) and checks the defining inequalities: equation residual off
/// the slit, u >= 0 on the thin space, du/dx1 >= 0. The slit jump sign is
/// reported, not asserted.
ProfileReport verify_profile(const BlowupProfile& p, double tolerance);

} // namespace thinfree
