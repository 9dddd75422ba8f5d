#pragma once

#include "thinfree/profiles.hpp"
#include "thinfree/solver.hpp"

#include <utility>
#include <vector>

namespace thinfree {

/// Growth-exponent fit at a free boundary point: sup norms over shrinking
/// balls against the radius on log-log axes.
struct ExponentFit {
    std::vector<double> radii;      // strictly decreasing, dyadic
    std::vector<double> sup_values; // sup of |u| over B_r(z) intersected with Q1
    double global_slope = 0.0;      // fitted 1 + alpha
    std::vector<double> local_slopes; // sliding 3-point window slopes, coarse to fine
    double r_max_used = 0.0;
    double r_min_used = 0.0;
    double fit_residual = 0.0; // RMS deviation on log-log axes
};

/// Free boundary abscissa of a solved field. Validates that the thin line is
/// nondecreasing in x1 (MonotonicityViolated otherwise) and has a genuine
/// zero/positive split (NoFreeBoundary otherwise).
double find_free_boundary(const SolveResult& result);

/// Least-squares growth exponent at z from sup norms over dyadic radii in
/// [r_min, r_max]. Requires r_min >= 4h and r_max <= dist(z, boundary)/2;
/// throws InsufficientScales with fewer than 4 usable radii.
ExponentFit estimate_exponent(const Grid2D& grid, const std::vector<double>& u, double z,
                              double r_max, double r_min);
ExponentFit estimate_exponent(const SolveResult& result, double z, double r_max, double r_min);

/// Two-term family of the scale-dependent-exponent construction:
/// F = max(trace, P^+_{1,Lambda1} - offset) solved with thm17 boundary data.
struct CounterexampleScenario {
    double Lambda1 = 1.5;
    double offset = 0.0; // ctilde_1 >= 0; ctilde_0 is always 0
    int n = 513;
    int directions = 16;
    double tol = 1e-8;
    int threads = 1;
    double slope_threshold = 0.03; // decade disagreement that flags scale dependence
};

struct ScaleReport {
    ExponentFit fit;
    double z = 0.0;
    double coarse_slope = 0.0; // slope of the coarsest 3-radius window
    double fine_slope = 0.0;   // slope of the finest 3-radius window
    double slope_spread = 0.0; // max - min over all windows
    double recession_slope = 0.0; // 1 + alpha_pucci(Lambda1), the fine-scale target
    bool scale_dependent = false; // |coarse - fine| >= threshold
    long iterations = 0;
};

ScaleReport run_counterexample(const CounterexampleScenario& scenario);

/// Extremal ratios a/b over the region nodes where b >= 1e-12. Throws
/// DegenerateRegion when no node survives the floor.
std::pair<double, double> comparability_check(const std::vector<double>& a,
                                              const std::vector<double>& b,
                                              const std::vector<size_t>& region);

/// Node set for the comparability experiment: an annulus r_in <= |x - (z,0)|
/// <= r_out with a band of width `slit_margin` around the closed slit
/// {x2 = 0, x1 <= z} removed.
std::vector<size_t> annulus_region(const Grid2D& grid, double z, double r_in, double r_out,
                                   double slit_margin);

/// Centered d/dx1 of a grid field (one-sided at the x1 edges).
std::vector<double> dx1_field(const Grid2D& grid, const std::vector<double>& u);

/// d/dx1 of the blow-up profile translated to (z, 0), sampled on the grid.
std::vector<double> profile_dx1_field(const Grid2D& grid, const BlowupProfile& profile, double z);

} // namespace thinfree
