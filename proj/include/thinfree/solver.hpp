#pragma once

#include "thinfree/grid.hpp"
#include "thinfree/stencil.hpp"

#include <optional>
#include <vector>

namespace thinfree {

struct SolveConfig {
    double tol = 1e-8;        // terminate when max |update| < tol * h^2
    double tau = 0.0;         // pseudo-time step; 0 selects tau_safety / max_weight_sum
    double tau_safety = 0.9;  // fraction of the monotone stability bound
    long max_sweeps = 2'000'000;
    bool nested = true;       // coarse-to-fine initialization
    bool accelerate = true;   // momentum with restart on top of the damped sweep
    int coarsest_n = 65;
    int threads = 1;          // sweeps are Jacobi-style, results independent of this
};

struct SolveResult {
    int n = 0;
    double h = 0.0;
    std::vector<double> u;              // row-major field on Q1
    double residual_interior = 0.0;     // max |F_h(u)| off the thin line and boundary
    double complementarity_gap = 0.0;   // max over thin nodes of |min(-F_h(u), u)|
    long iterations = 0;                // total sweeps over all levels
    std::optional<double> fb_point;     // largest thin abscissa with u = 0, interpolated

    Grid2D grid() const { return Grid2D(n); }
};

/// Solve the discrete thin obstacle problem on Q1: damped Jacobi-style
/// pseudo-time iteration u <- u + tau F_h(u) at interior nodes, with the
/// projection u <- max(0, .) on the thin line and Dirichlet data held fixed.
/// Monotone for tau below the stability bound. Nested grids plus a
/// restart-guarded momentum term accelerate the fine levels; a plain damped
/// phase always runs last so the termination criterion is met by the
/// unaccelerated map. Throws NonConvergence at the sweep cap and
/// ParameterError if tau exceeds the stability bound.
SolveResult solve_thin_obstacle(const Grid2D& grid, const BoundaryData& bc,
                                const StencilOperator& stencil, const SolveConfig& config = {});

/// Largest thin-line abscissa where u = 0, by interpolation between the last
/// zero node and the first positive node. Empty when the thin line has no
/// zero/positive split.
std::optional<double> detect_free_boundary(const Grid2D& grid, const std::vector<double>& u);

struct ResidualReport {
    double residual_interior = 0.0;
    double complementarity_gap = 0.0;
    double thin_min_increment = 0.0; // min of u(j+1)-u(j) on the thin line
    double evenness_gap = 0.0;       // max |u(i,j) - u(mirror(i),j)|
    double min_dx1 = 0.0;            // min centered d/dx1 over interior nodes
    std::optional<double> fb_point;
};

ResidualReport residual_report(const SolveResult& result);

} // namespace thinfree
