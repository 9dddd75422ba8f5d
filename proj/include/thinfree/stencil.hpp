#pragma once

#include "thinfree/grid.hpp"
#include "thinfree/operators.hpp"

#include <vector>

namespace thinfree {

/// One orthogonal pair of lattice directions. Second differences along the
/// two legs discretize the pure second derivatives in that frame.
struct StencilPairDir {
    int ax, ay; // first direction offset
    int bx, by; // orthogonal partner (-ay, ax)
    double inv_a2; // 1 / |a|^2
    double inv_b2; // 1 / |b|^2
    int reach;     // max |component|, for boundary admissibility
    double angle;  // direction angle of (ax, ay) in [0, pi)
};

/// Coefficient data of one monotone branch. For eigenvalue-based operators
/// the branch carries the {lam, Lam} alphabet applied to every pair; for
/// sup-form terms it pins fixed coefficients to the pair nearest to the
/// term's eigenframe.
struct PucciBranch {
    double lam, Lam, c;
};
struct FrameBranch {
    int pair;            // preferred pair index
    double a, b, c;      // coefficients along the pair legs
    double axis_a, axis_b; // axis-pair fallback for nodes where `pair` does not fit
};

/// Monotone wide-stencil discretization of a convex operator:
///   F_h(u) = max over admissible pairs/branches of
///            (coef_a * D2_a u + coef_b * D2_b u + c),
/// with D2 the centered second difference along a lattice leg. Exact on
/// quadratics whose Hessian eigenframe lies in the direction set; consistency
/// error O(h |offset| + dtheta) otherwise.
class StencilOperator {
public:
    enum class Mode { PucciFamily, FixedFrames };

    Mode mode() const { return mode_; }
    const std::vector<StencilPairDir>& pairs() const { return pairs_; }
    const std::vector<PucciBranch>& family() const { return family_; }
    const std::vector<FrameBranch>& frames() const { return frames_; }
    const EllipticityPair& ell() const { return ell_; }

    int direction_count() const { return static_cast<int>(pairs_.size()) * 2; }
    double dtheta() const { return dtheta_; } // max angular gap between directions
    int width() const { return width_; }      // max offset component

    /// Largest possible sum of off-center weights; the damped iteration is
    /// monotone for tau <= 1 / max_weight_sum(h).
    double max_weight_sum(double h) const;

    /// Evaluate F_h at an interior node. `field` is row-major on `grid`;
    /// wide pairs that would leave the grid are dropped (the axis pair
    /// always fits).
    double apply(const Grid2D& grid, const std::vector<double>& field, int i, int j) const;

    /// Exact nodal solve: the value v of the center node with
    /// F_h(..., v, ...) = rhs given the current neighbor values. Each branch
    /// is affine and strictly decreasing in v, so the root of the max is the
    /// max of the per-branch roots.
    double local_solve(const Grid2D& grid, const std::vector<double>& field, int i, int j,
                       double rhs = 0.0) const;

    friend StencilOperator build_stencil(const ConvexOperator& f, int directions);

private:
    Mode mode_ = Mode::PucciFamily;
    std::vector<StencilPairDir> pairs_;
    std::vector<PucciBranch> family_;
    std::vector<FrameBranch> frames_;
    EllipticityPair ell_;
    double dtheta_ = 0.0;
    int width_ = 1;
};

/// Build the monotone stencil for F with K directions, K in {4, 8, 16, 32}.
/// Offsets stay within max component 4; K = 32 selects every coprime lattice
/// line available at that width (24 directions), which is the densest set
/// this stencil family admits.
StencilOperator build_stencil(const ConvexOperator& f, int directions);

} // namespace thinfree
