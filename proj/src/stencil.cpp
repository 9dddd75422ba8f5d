#include "thinfree/stencil.hpp"

#include <algorithm>
#include <cmath>

namespace thinfree {

namespace {

std::vector<StencilPairDir> direction_pairs(int directions) {
    // First-quadrant representatives; the orthogonal partner is (-ay, ax).
    // The 16-direction set has max angular gap atan(1/4) ~ 0.245 rad.
    static const std::vector<std::pair<int, int>> k4 = {{1, 0}, {1, 1}};
    static const std::vector<std::pair<int, int>> k8 = {{1, 0}, {2, 1}, {1, 1}, {1, 2}};
    static const std::vector<std::pair<int, int>> k16 = {{1, 0}, {4, 1}, {2, 1}, {3, 2},
                                                         {1, 1}, {2, 3}, {1, 2}, {1, 4}};
    static const std::vector<std::pair<int, int>> k24 = {{1, 0}, {4, 1}, {3, 1}, {2, 1},
                                                         {3, 2}, {4, 3}, {1, 1}, {3, 4},
                                                         {2, 3}, {1, 2}, {1, 3}, {1, 4}};

    const std::vector<std::pair<int, int>>* base = nullptr;
    switch (directions) {
        case 4: base = &k4; break;
        case 8: base = &k8; break;
        case 16: base = &k16; break;
        case 32: base = &k24; break; // all coprime lines at width 4
        default:
            throw ParameterError("build_stencil: direction count must be one of 4, 8, 16, 32");
    }

    std::vector<StencilPairDir> out;
    for (auto [ax, ay] : *base) {
        StencilPairDir p;
        p.ax = ax;
        p.ay = ay;
        p.bx = -ay;
        p.by = ax;
        p.inv_a2 = 1.0 / static_cast<double>(ax * ax + ay * ay);
        p.inv_b2 = p.inv_a2;
        p.reach = std::max(std::max(std::abs(ax), std::abs(ay)),
                           std::max(std::abs(p.bx), std::abs(p.by)));
        p.angle = std::atan2(static_cast<double>(ay), static_cast<double>(ax));
        out.push_back(p);
    }
    return out;
}

double max_angle_gap(const std::vector<StencilPairDir>& pairs) {
    std::vector<double> angles;
    for (const auto& p : pairs) {
        angles.push_back(std::fmod(p.angle + M_PI, M_PI));
        angles.push_back(std::fmod(p.angle + M_PI / 2.0 + M_PI, M_PI));
    }
    std::sort(angles.begin(), angles.end());
    double gap = angles.front() + M_PI - angles.back();
    for (size_t i = 1; i < angles.size(); ++i) gap = std::max(gap, angles[i] - angles[i - 1]);
    return gap;
}

double angular_distance_mod_pi(double a, double b) {
    double d = std::fmod(std::abs(a - b), M_PI);
    return std::min(d, M_PI - d);
}

} // namespace

StencilOperator build_stencil(const ConvexOperator& f, int directions) {
    StencilOperator st;
    st.pairs_ = direction_pairs(directions);
    st.ell_ = f.ell();
    st.dtheta_ = max_angle_gap(st.pairs_);
    st.width_ = 1;
    for (const auto& p : st.pairs_) st.width_ = std::max(st.width_, p.reach);

    if (f.kind() == OperatorKind::PucciPlus || f.kind() == OperatorKind::PucciMax) {
        st.mode_ = StencilOperator::Mode::PucciFamily;
        for (const auto& t : f.pucci_terms()) st.family_.push_back({t.ell.lam, t.ell.Lam, t.c});
        return st;
    }

    // Sup form: pin each term to the pair nearest its eigenframe, with the
    // eigenvalue coefficients on the matching legs.
    st.mode_ = StencilOperator::Mode::FixedFrames;
    for (const auto& t : f.linear_terms()) {
        auto [mu1, mu2] = t.L.eigenvalues();
        // Angle of the eigenvector for the larger eigenvalue.
        const double psi = 0.5 * std::atan2(2.0 * t.L.m12, t.L.m11 - t.L.m22);

        int best_pair = 0;
        bool mu2_on_a = true;
        double best = std::numeric_limits<double>::infinity();
        for (size_t pi = 0; pi < st.pairs_.size(); ++pi) {
            const double da = angular_distance_mod_pi(psi, st.pairs_[pi].angle);
            const double db = angular_distance_mod_pi(psi, st.pairs_[pi].angle + M_PI / 2.0);
            if (da < best) {
                best = da;
                best_pair = static_cast<int>(pi);
                mu2_on_a = true;
            }
            if (db < best) {
                best = db;
                best_pair = static_cast<int>(pi);
                mu2_on_a = false;
            }
        }
        FrameBranch br;
        br.pair = best_pair;
        br.a = mu2_on_a ? mu2 : mu1;
        br.b = mu2_on_a ? mu1 : mu2;
        br.c = t.c;
        // Fallback assignment on the axis pair for nodes near the boundary.
        const double da0 = angular_distance_mod_pi(psi, 0.0);
        br.axis_a = da0 <= M_PI / 4.0 ? mu2 : mu1;
        br.axis_b = da0 <= M_PI / 4.0 ? mu1 : mu2;
        st.frames_.push_back(br);
    }
    return st;
}

double StencilOperator::max_weight_sum(double h) const {
    double best = 0.0;
    if (mode_ == Mode::PucciFamily) {
        double lam_max = 0.0;
        for (const auto& t : family_) lam_max = std::max(lam_max, t.Lam);
        for (const auto& p : pairs_) best = std::max(best, 2.0 * lam_max * (p.inv_a2 + p.inv_b2));
    } else {
        for (const auto& t : frames_) {
            const auto& p = pairs_[t.pair];
            best = std::max(best, 2.0 * (t.a * p.inv_a2 + t.b * p.inv_b2));
            best = std::max(best, 2.0 * (t.axis_a + t.axis_b));
        }
    }
    return best / (h * h);
}

double StencilOperator::apply(const Grid2D& grid, const std::vector<double>& field, int i,
                              int j) const {
    const int n = grid.n;
    const double inv_h2 = 1.0 / (grid.h * grid.h);
    const double* u = field.data();
    const size_t c = grid.idx(i, j);
    const double uc2 = 2.0 * u[c];

    const int margin = std::min(std::min(i, n - 1 - i), std::min(j, n - 1 - j));
    double best = -std::numeric_limits<double>::infinity();

    for (const auto& p : pairs_) {
        if (p.reach > margin) {
            // A leg would leave the grid; admissible pairs only. The axis
            // pair (reach 1) always fits for interior nodes.
            continue;
        }
        const size_t oa = static_cast<size_t>(p.ay) * n + p.ax;
        const ptrdiff_t ob = static_cast<ptrdiff_t>(p.by) * n + p.bx;
        const double sa = (u[c + oa] + u[c - oa] - uc2) * p.inv_a2 * inv_h2;
        const double sb = (u[c + ob] + u[c - ob] - uc2) * p.inv_b2 * inv_h2;

        if (mode_ == Mode::PucciFamily) {
            for (const auto& t : family_) {
                const double v = std::max(t.lam * sa, t.Lam * sa) +
                                 std::max(t.lam * sb, t.Lam * sb) + t.c;
                best = std::max(best, v);
            }
        } else {
            const ptrdiff_t pair_index = &p - pairs_.data();
            for (const auto& t : frames_) {
                if (t.pair == pair_index) best = std::max(best, t.a * sa + t.b * sb + t.c);
            }
        }
    }

    if (mode_ == Mode::FixedFrames) {
        // Terms whose preferred pair does not fit here fall back to the axes.
        const size_t o1 = 1;
        const size_t on = static_cast<size_t>(n);
        const double s1 = (u[c + o1] + u[c - o1] - uc2) * inv_h2;
        const double s2 = (u[c + on] + u[c - on] - uc2) * inv_h2;
        for (const auto& t : frames_) {
            if (pairs_[t.pair].reach > margin) {
                best = std::max(best, t.axis_a * s1 + t.axis_b * s2 + t.c);
            }
        }
    }
    return best;
}

double StencilOperator::local_solve(const Grid2D& grid, const std::vector<double>& field, int i,
                                    int j, double rhs) const {
    const int n = grid.n;
    const double h2 = grid.h * grid.h;
    const double* u = field.data();
    const size_t c = grid.idx(i, j);
    const int margin = std::min(std::min(i, n - 1 - i), std::min(j, n - 1 - j));

    double best = -std::numeric_limits<double>::infinity();
    for (const auto& p : pairs_) {
        if (p.reach > margin) continue;
        const size_t oa = static_cast<size_t>(p.ay) * n + p.ax;
        const ptrdiff_t ob = static_cast<ptrdiff_t>(p.by) * n + p.bx;
        const double sa = (u[c + oa] + u[c - oa]) * p.inv_a2; // neighbor part, no center
        const double sb = (u[c + ob] + u[c - ob]) * p.inv_b2;

        if (mode_ == Mode::PucciFamily) {
            for (const auto& t : family_) {
                // max over the {lam, Lam} alphabet per leg: each combination is
                // an affine decreasing function of the center value.
                for (double a : {t.lam, t.Lam}) {
                    for (double b : {t.lam, t.Lam}) {
                        const double v = (a * sa + b * sb + (t.c - rhs) * h2) /
                                         (2.0 * (a * p.inv_a2 + b * p.inv_b2));
                        best = std::max(best, v);
                    }
                }
            }
        } else {
            const ptrdiff_t pair_index = &p - pairs_.data();
            for (const auto& t : frames_) {
                if (t.pair != pair_index) continue;
                const double v = (t.a * sa + t.b * sb + (t.c - rhs) * h2) /
                                 (2.0 * (t.a * p.inv_a2 + t.b * p.inv_b2));
                best = std::max(best, v);
            }
        }
    }

    if (mode_ == Mode::FixedFrames) {
        const size_t o1 = 1;
        const size_t on = static_cast<size_t>(n);
        const double s1 = u[c + o1] + u[c - o1];
        const double s2 = u[c + on] + u[c - on];
        for (const auto& t : frames_) {
            if (pairs_[t.pair].reach > margin) {
                const double v = (t.axis_a * s1 + t.axis_b * s2 + (t.c - rhs) * h2) /
                                 (2.0 * (t.axis_a + t.axis_b));
                best = std::max(best, v);
            }
        }
    }
    return best;
}

} // namespace thinfree
