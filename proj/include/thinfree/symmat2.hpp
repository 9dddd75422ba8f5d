#pragma once

#include <cmath>
#include <utility>

namespace thinfree {

/// Symmetric 2x2 matrix, the argument of every operator in the library.
/// Stored as the three independent entries, so symmetry holds by construction.
struct SymMat2 {
    double m11 = 0.0;
    double m12 = 0.0;
    double m22 = 0.0;

    static SymMat2 identity() { return {1.0, 0.0, 1.0}; }
    static SymMat2 diag(double a, double b) { return {a, 0.0, b}; }
    static SymMat2 zero() { return {}; }

    double trace() const { return m11 + m22; }
    double det() const { return m11 * m22 - m12 * m12; }

    /// Eigenvalues in nondecreasing order, from the closed form for 2x2
    /// symmetric matrices. Exact up to rounding: mu1+mu2 = trace and
    /// mu1*mu2 = det to ~1e-12 relative.
    std::pair<double, double> eigenvalues() const {
        const double mean = 0.5 * (m11 + m22);
        const double disc = std::hypot(0.5 * (m11 - m22), m12);
        return {mean - disc, mean + disc};
    }

    /// Spectral norm, max |eigenvalue|.
    double norm() const {
        auto [mu1, mu2] = eigenvalues();
        return std::max(std::abs(mu1), std::abs(mu2));
    }

    /// Nuclear norm, |mu1| + |mu2|. Dual of the spectral norm.
    double nuclear_norm() const {
        auto [mu1, mu2] = eigenvalues();
        return std::abs(mu1) + std::abs(mu2);
    }

    SymMat2 operator+(const SymMat2& o) const { return {m11 + o.m11, m12 + o.m12, m22 + o.m22}; }
    SymMat2 operator-(const SymMat2& o) const { return {m11 - o.m11, m12 - o.m12, m22 - o.m22}; }
    SymMat2 operator*(double t) const { return {t * m11, t * m12, t * m22}; }

    /// R(angle)^T M R(angle) with R the counterclockwise rotation.
    SymMat2 rotated(double angle) const {
        const double c = std::cos(angle), s = std::sin(angle);
        // Columns of R are (c, s) and (-s, c).
        const double a = m11, b = m12, d = m22;
        return {
            c * (a * c + b * s) + s * (b * c + d * s),
            -s * (a * c + b * s) + c * (b * c + d * s),
            -s * (-a * s + b * c) + c * (-b * s + d * c),
        };
    }
};

inline SymMat2 operator*(double t, const SymMat2& m) { return m * t; }

inline double trace_product(const SymMat2& l, const SymMat2& m) {
    return l.m11 * m.m11 + 2.0 * l.m12 * m.m12 + l.m22 * m.m22;
}

} // namespace thinfree
