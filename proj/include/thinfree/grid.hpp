#pragma once

#include "thinfree/errors.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace thinfree {

/// Uniform grid on Q1 = [-1,1]^2 with the thin line {x2 = 0} on grid nodes.
struct Grid2D {
    int n = 0;        // points per side, odd
    double h = 0.0;   // 2 / (n - 1)
    int thin_row = 0; // index of the x2 = 0 row

    explicit Grid2D(int n_pts) : n(n_pts) {
        if (n < 5 || n % 2 == 0) throw ParameterError("Grid2D: n must be odd and >= 5");
        h = 2.0 / static_cast<double>(n - 1);
        thin_row = (n - 1) / 2;
    }

    double x1(int j) const { return -1.0 + h * j; }
    double x2(int i) const { return -1.0 + h * i; }
    size_t idx(int i, int j) const { return static_cast<size_t>(i) * n + j; }
    size_t size() const { return static_cast<size_t>(n) * n; }
    bool on_boundary(int i, int j) const { return i == 0 || j == 0 || i == n - 1 || j == n - 1; }
};

/// Dirichlet data on the boundary of Q1. The thm17 preset is the boundary
/// datum of the scale-dependent counterexample runs: +1 on {x1 = 1}, -1 on
/// {x1 = -1} and on {x2 = +-1} (corners take the x2-edge value).
class BoundaryData {
public:
    static BoundaryData thm17() {
        return BoundaryData([](double x1, double x2) {
            if (std::abs(x2) >= 1.0) return -1.0;
            return x1 >= 1.0 ? 1.0 : -1.0;
        });
    }
    static BoundaryData constant(double v) {
        return BoundaryData([v](double, double) { return v; });
    }
    static BoundaryData function(std::function<double(double, double)> f) {
        return BoundaryData(std::move(f));
    }
    /// Named presets used by the CLI: "thm17", "const:<v>", "linear-x2".
    static BoundaryData preset(const std::string& name);

    double operator()(double x1, double x2) const { return f_(x1, x2); }

private:
    explicit BoundaryData(std::function<double(double, double)> f) : f_(std::move(f)) {}
    std::function<double(double, double)> f_;
};

} // namespace thinfree
