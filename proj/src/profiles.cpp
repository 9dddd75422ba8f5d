#include "thinfree/profiles.hpp"

#include <algorithm>
#include <cmath>

namespace thinfree {

namespace {

constexpr double kShootStep = M_PI / 16384.0;
constexpr int kSectorGridPoints = 32769;

} // namespace

SymMat2 hessian_of_homogeneous(double beta, double phi, double phi_p, double phi_pp) {
    return {beta * (beta - 1.0) * phi, (beta - 1.0) * phi_p, beta * phi + phi_pp};
}

double angular_rhs(double beta, double omega, double phi, double phi_p) {
    const EllipticityPair ell(1.0, omega);
    auto value = [&](double phi_pp) {
        return pucci_plus(hessian_of_homogeneous(beta, phi, phi_p, phi_pp), ell);
    };

    double b = (1.0 + std::abs(phi) * beta * beta + 2.0 * beta * std::abs(phi_p)) * (omega + 1.0);
    double lo = -b, hi = b;
    double flo = value(lo), fhi = value(hi);
    int doublings = 0;
    while (flo > 0.0 || fhi < 0.0) {
        if (++doublings > 60) {
            throw NumericalError("angular_rhs: bracket expansion failed");
        }
        b *= 2.0;
        lo = -b;
        hi = b;
        flo = value(lo);
        fhi = value(hi);
    }
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (value(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

namespace {

struct AngularState {
    double phi;
    double phi_p;
};

AngularState rk4_step(double beta, double omega, const AngularState& y, double step) {
    auto f = [&](const AngularState& s) -> AngularState {
        return {s.phi_p, angular_rhs(beta, omega, s.phi, s.phi_p)};
    };
    const AngularState k1 = f(y);
    const AngularState k2 = f({y.phi + 0.5 * step * k1.phi, y.phi_p + 0.5 * step * k1.phi_p});
    const AngularState k3 = f({y.phi + 0.5 * step * k2.phi, y.phi_p + 0.5 * step * k2.phi_p});
    const AngularState k4 = f({y.phi + step * k3.phi, y.phi_p + step * k3.phi_p});
    return {y.phi + step / 6.0 * (k1.phi + 2.0 * k2.phi + 2.0 * k3.phi + k4.phi),
            y.phi_p + step / 6.0 * (k1.phi_p + 2.0 * k2.phi_p + 2.0 * k3.phi_p + k4.phi_p)};
}

} // namespace

double shoot_sector(double beta, double omega, ConeSign sign) {
    if (!(beta > 1.0 && beta < 3.0)) throw ParameterError("shoot_sector: beta must lie in (1,3)");
    if (!(omega >= 1.0)) throw ParameterError("shoot_sector: omega must be >= 1");

    const double s0 = sign == ConeSign::Positive ? 1.0 : -1.0;
    AngularState y{0.0, s0};
    double theta = 0.0;
    const long max_steps = static_cast<long>(std::ceil(2.0 * M_PI / kShootStep)) + 1;

    for (long k = 0; k < max_steps; ++k) {
        const AngularState y_next = rk4_step(beta, omega, y, kShootStep);
        const double theta_next = theta + kShootStep;
        // Crossing back to zero: the interior keeps the launch sign.
        if (k > 0 && (s0 > 0.0 ? y_next.phi <= 0.0 : y_next.phi >= 0.0)) {
            const double frac = y.phi / (y.phi - y_next.phi);
            double t_lin = theta + frac * kShootStep;
            // One secant refinement through a partial step from theta.
            const AngularState y_part = rk4_step(beta, omega, y, t_lin - theta);
            const double denom = y_next.phi - y_part.phi;
            if (std::abs(denom) > 0.0) {
                const double t_sec = t_lin - y_part.phi * (theta_next - t_lin) / denom;
                if (t_sec > theta && t_sec < theta_next) return t_sec;
            }
            return t_lin;
        }
        y = y_next;
        theta = theta_next;
    }
    throw NoSectorClosure("shoot_sector: no zero crossing before 2 pi");
}

namespace {

// Integrate one sector on a uniform grid from (0, slope) at theta_left.
AngularSolution integrate_sector(double beta, double omega, ConeSign sign, double theta_left,
                                 double theta_right, double slope) {
    AngularSolution sec;
    sec.beta = beta;
    sec.sign = sign;
    const int n = kSectorGridPoints;
    sec.theta_grid.resize(n);
    sec.phi.resize(n);
    sec.phi_prime.resize(n);
    const double step = (theta_right - theta_left) / (n - 1);

    AngularState y{0.0, slope};
    for (int i = 0; i < n; ++i) {
        sec.theta_grid[i] = theta_left + i * step;
        sec.phi[i] = y.phi;
        sec.phi_prime[i] = y.phi_p;
        if (i + 1 < n) y = rk4_step(beta, omega, y, step);
    }
    sec.theta_grid.back() = theta_right;
    return sec;
}

void scale_sector(AngularSolution& sec, double factor) {
    for (auto& v : sec.phi) v *= factor;
    for (auto& v : sec.phi_prime) v *= factor;
}

double sector_max_abs(const AngularSolution& sec) {
    double m = 0.0;
    for (double v : sec.phi) m = std::max(m, std::abs(v));
    return m;
}

} // namespace

BlowupProfile build_profile(double omega) {
    const ExponentResult res = alpha_pucci(omega);
    const double alpha = res.alpha;
    const double beta = 1.0 + alpha;

    BlowupProfile p;
    p.omega = omega;
    p.alpha_G = alpha;
    p.theta1 = 2.0 * g(alpha, omega);
    p.theta2 = p.theta1 + 2.0 * h(alpha, omega);

    p.sectors[0] = integrate_sector(beta, omega, ConeSign::Negative, 0.0, p.theta1, -1.0);
    p.sectors[1] = integrate_sector(beta, omega, ConeSign::Positive, p.theta1, p.theta2, 1.0);
    p.sectors[2] = integrate_sector(beta, omega, ConeSign::Negative, p.theta2, 2.0 * M_PI, -1.0);

    // Endpoint values are zero up to the root residual of alpha; clamp so the
    // interpolant honors the boundary condition exactly.
    for (auto& sec : p.sectors) {
        if (std::abs(sec.phi.back()) > 1e-8) {
            throw NumericalError("build_profile: sector did not close at its interface");
        }
        sec.phi.front() = 0.0;
        sec.phi.back() = 0.0;
    }

    // Sup-normalize each piece, then match one-sided derivatives at the
    // interfaces (Hopf keeps the endpoint slopes away from zero).
    for (auto& sec : p.sectors) scale_sector(sec, 1.0 / sector_max_abs(sec));

    const double d1_left = p.sectors[0].phi_prime.back();
    const double d1_right = p.sectors[1].phi_prime.front();
    const double d2_left = p.sectors[1].phi_prime.back();
    const double d2_right = p.sectors[2].phi_prime.front();
    if (std::abs(d1_left) < 1e-10 || std::abs(d2_right) < 1e-10) {
        throw NumericalError("build_profile: degenerate interface derivative");
    }
    p.c1 = d1_right / d1_left;
    p.c3 = d2_left / d2_right;
    if (!(p.c1 > 0.0 && p.c3 > 0.0)) {
        throw NumericalError("build_profile: matching coefficients are not positive");
    }
    scale_sector(p.sectors[0], p.c1);
    scale_sector(p.sectors[2], p.c3);

    double vmax = 0.0;
    for (const auto& sec : p.sectors) vmax = std::max(vmax, sector_max_abs(sec));
    for (auto& sec : p.sectors) scale_sector(sec, 1.0 / vmax);
    p.c1 /= vmax;
    p.c3 /= vmax;
    return p;
}

namespace {

// 4-point Lagrange interpolation on the uniform sector grid.
double interp_uniform(const std::vector<double>& grid, const std::vector<double>& vals,
                      double theta) {
    const int n = static_cast<int>(grid.size());
    const double step = (grid.back() - grid.front()) / (n - 1);
    double t = (theta - grid.front()) / step;
    t = std::clamp(t, 0.0, static_cast<double>(n - 1));
    int j = static_cast<int>(std::floor(t)) - 1;
    j = std::clamp(j, 0, n - 4);
    const double u = t - static_cast<double>(j);
    // Nodes at local coordinates 0,1,2,3.
    const double w0 = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
    const double w1 = u * (u - 2.0) * (u - 3.0) / 2.0;
    const double w2 = -u * (u - 1.0) * (u - 3.0) / 2.0;
    const double w3 = u * (u - 1.0) * (u - 2.0) / 6.0;
    return w0 * vals[j] + w1 * vals[j + 1] + w2 * vals[j + 2] + w3 * vals[j + 3];
}

const AngularSolution& sector_at(const BlowupProfile& p, double theta) {
    if (theta < p.theta1) return p.sectors[0];
    if (theta < p.theta2) return p.sectors[1];
    return p.sectors[2];
}

// Angle from the slit: theta = arg(-x1 + i x2) mapped to [0, 2 pi).
double slit_angle(double x1, double x2) {
    double theta = std::atan2(x2, -x1);
    if (theta < 0.0) theta += 2.0 * M_PI;
    return theta;
}

} // namespace

double profile_angular_value(const BlowupProfile& p, double theta) {
    const AngularSolution& sec = sector_at(p, theta);
    return interp_uniform(sec.theta_grid, sec.phi, theta);
}

double eval_profile(const BlowupProfile& p, double x1, double x2) {
    const double r = std::hypot(x1, x2);
    if (r == 0.0) return 0.0;
    const double theta = slit_angle(x1, x2);
    return std::pow(r, p.homogeneity()) * profile_angular_value(p, theta);
}

double eval_profile_dx1(const BlowupProfile& p, double x1, double x2) {
    const double r = std::hypot(x1, x2);
    if (r == 0.0) return 0.0;
    const double theta = slit_angle(x1, x2);
    const AngularSolution& sec = sector_at(p, theta);
    const double phi = interp_uniform(sec.theta_grid, sec.phi, theta);
    const double phi_p = interp_uniform(sec.theta_grid, sec.phi_prime, theta);
    const double beta = p.homogeneity();
    return std::pow(r, beta - 2.0) * (beta * phi * x1 + phi_p * x2);
}

ProfileReport verify_profile(const BlowupProfile& p, double tolerance) {
    const EllipticityPair ell(1.0, p.omega);
    const double fd = 1e-3;
    ProfileReport rep;
    rep.min_thin_value = std::numeric_limits<double>::infinity();
    rep.min_dx1 = std::numeric_limits<double>::infinity();
    rep.max_slit_jump = -std::numeric_limits<double>::infinity();

    auto u = [&](double a, double b) { return eval_profile(p, a, b); };

    // Equation residual at polar samples away from the slit band.
    for (double r = 0.3; r <= 0.9001; r += 0.15) {
        for (int k = 0; k < 160; ++k) {
            const double theta = 2.0 * M_PI * (k + 0.5) / 160.0;
            const double x1 = -r * std::cos(theta);
            const double x2 = r * std::sin(theta);
            // Keep clear of the slit so FD stencils see smooth values.
            if (std::abs(x2) < 0.05 && x1 < 0.05) continue;
            const double d11 = (u(x1 + fd, x2) - 2.0 * u(x1, x2) + u(x1 - fd, x2)) / (fd * fd);
            const double d22 = (u(x1, x2 + fd) - 2.0 * u(x1, x2) + u(x1, x2 - fd)) / (fd * fd);
            const double d12 = (u(x1 + fd, x2 + fd) + u(x1 - fd, x2 - fd) - u(x1 + fd, x2 - fd) -
                                u(x1 - fd, x2 + fd)) /
                               (4.0 * fd * fd);
            const SymMat2 hess{d11, d12, d22};
            const double rel = std::abs(pucci_plus(hess, ell)) / (ell.Lam * hess.norm() + 1e-300);
            rep.max_residual_rel = std::max(rep.max_residual_rel, rel);
        }
    }

    // Thin-space sign and x1-monotonicity samples.
    for (int k = -64; k <= 64; ++k) {
        const double x1 = k / 64.0;
        rep.min_thin_value = std::min(rep.min_thin_value, u(x1, 0.0));
    }
    for (int i = -32; i <= 32; ++i) {
        for (int j = -32; j <= 32; ++j) {
            const double x1 = i / 32.0, x2 = j / 32.0;
            if (x1 == 0.0 && x2 == 0.0) continue;
            rep.min_dx1 = std::min(rep.min_dx1, eval_profile_dx1(p, x1, x2));
        }
    }

    // Reaction sign on the slit: the distributional part of d22 u across the
    // contact set is [u_x2(0+) - u_x2(0-)] * delta, which must be <= 0.
    for (double x1 = -0.9; x1 < -0.05; x1 += 0.1) {
        const double above = (u(x1, fd) - u(x1, 0.0)) / fd;   // u_x2 from above
        const double below = (u(x1, 0.0) - u(x1, -fd)) / fd;  // u_x2 from below
        rep.max_slit_jump = std::max(rep.max_slit_jump, above - below);
    }

    rep.residual_pass = rep.max_residual_rel <= tolerance;
    rep.sign_pass = rep.min_thin_value >= -1e-8 && rep.min_dx1 >= -1e-8;
    rep.pass = rep.residual_pass && rep.sign_pass;
    return rep;
}

} // namespace thinfree
