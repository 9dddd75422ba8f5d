#include "thinfree/exponents.hpp"

#include <cmath>

namespace thinfree {

namespace {

void check_gh_domain(double alpha, double omega) {
    if (!(alpha >= 0.0)) throw ParameterError("g/h: alpha must be >= 0");
    if (!(omega >= 1.0)) throw ParameterError("g/h: omega must be >= 1");
}

struct Bisection {
    double root = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

// Bisection for a strictly decreasing function with f(lo) > 0 > f(hi).
template <typename F>
Bisection bisect_decreasing(F&& f, double lo, double hi, int max_iter = 200) {
    double flo = f(lo);
    double fhi = f(hi);
    if (!(flo > 0.0) || !(fhi < 0.0)) {
        throw NumericalError("bisection bracket does not straddle the root");
    }
    int it = 0;
    for (; it < max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break; // interval below double resolution
        const double fm = f(mid);
        if (fm == 0.0) {
            lo = hi = mid;
            break;
        }
        if (fm > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double root = 0.5 * (lo + hi);
    return {root, f(root), it};
}

} // namespace

double g(double alpha, double omega) {
    check_gh_domain(alpha, omega);
    const double first = std::atan(std::sqrt(omega));
    const double p = (alpha + 1.0 / omega) * (alpha + omega);
    const double arg = omega * (alpha + 1.0 / omega) / (alpha + omega);
    return first + (1.0 - alpha) / std::sqrt(p) * std::atan(std::sqrt(arg));
}

double h(double alpha, double omega) {
    check_gh_domain(alpha, omega);
    const double first = std::atan(1.0 / std::sqrt(omega));
    const double p = (alpha + 1.0 / omega) * (alpha + omega);
    const double arg = (alpha + omega) / (omega * (alpha + 1.0 / omega));
    return first + (1.0 - alpha) / std::sqrt(p) * std::atan(std::sqrt(arg));
}

double master_equation(double alpha, double omega) {
    return 2.0 * g(alpha, omega) + h(alpha, omega) - M_PI;
}

double cone_homogeneity(const ConeSpec& spec) {
    if (!(spec.theta > 0.0 && spec.theta <= M_PI)) {
        throw ParameterError("cone_homogeneity: aperture must lie in (0, pi]");
    }
    if (!(spec.omega >= 1.0)) throw ParameterError("cone_homogeneity: omega must be >= 1");
    if (spec.theta == M_PI) return 1.0; // half-plane: the hyperplane solution

    const double target = 0.5 * spec.theta;
    auto half_aperture = [&](double alpha) {
        return spec.sign == ConeSign::Negative ? g(alpha, spec.omega) : h(alpha, spec.omega);
    };
    // g and h decrease from pi/2 to 0 on alpha in [0, inf); grow the bracket
    // until the equation changes sign.
    double hi = 1.0;
    while (half_aperture(hi) - target > 0.0) {
        hi *= 2.0;
        if (hi > 1e8) throw NumericalError("cone_homogeneity: bracket expansion failed");
    }
    auto fn = [&](double alpha) { return half_aperture(alpha) - target; };
    const auto r = bisect_decreasing(fn, 0.0, hi);
    return 1.0 + r.root;
}

ExponentResult alpha_pucci(double omega) {
    if (!(omega >= 1.0) || std::isinf(omega)) {
        throw ParameterError("alpha_pucci: omega must be finite and >= 1");
    }
    auto fn = [&](double alpha) { return master_equation(alpha, omega); };
    const auto r = bisect_decreasing(fn, 0.0, 1.0);
    return {r.root, omega, r.residual, r.iterations};
}

double alpha_infinity() {
    // 2 sqrt(a) - (1-a)(pi + 2 arctan sqrt(a)) is strictly increasing on (0,1).
    auto fn = [](double a) {
        const double s = std::sqrt(a);
        return -(2.0 * s - (1.0 - a) * (M_PI + 2.0 * std::atan(s)));
    };
    const auto r = bisect_decreasing(fn, 0.0, 1.0);
    return r.root;
}

double F_func(double x, double alpha) {
    if (!(x >= 0.0 && x <= 1.0)) throw ParameterError("F_func: x must lie in [0,1]");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("F_func: alpha must lie in (0,1)");
    const double p = (alpha + x * x) * (alpha * x * x + 1.0);
    const double arg = (alpha + x * x) / (alpha * x * x + 1.0);
    return (1.0 - alpha) * x / std::sqrt(p) * (M_PI / 2.0 + std::atan(std::sqrt(arg))) -
           std::atan(x);
}

double G_func(double x, double alpha) {
    if (!(x >= 0.0 && x <= 1.0)) throw ParameterError("G_func: x must lie in [0,1]");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("G_func: alpha must lie in (0,1)");
    if (x == 0.0) {
        const double s = std::sqrt(alpha);
        return M_PI / 2.0 + std::atan(s) - s / (1.0 - alpha);
    }
    const double p = (alpha + x * x) * (alpha * x * x + 1.0);
    return std::sqrt(p) / ((1.0 - alpha) * x) * F_func(x, alpha);
}

std::vector<ExponentResult> alpha_table(const std::vector<double>& omegas) {
    for (size_t i = 0; i < omegas.size(); ++i) {
        if (!(omegas[i] >= 1.0)) throw ParameterError("alpha_table: omegas must be >= 1");
        if (i > 0 && !(omegas[i] > omegas[i - 1])) {
            throw ParameterError("alpha_table: omegas must be strictly ascending");
        }
    }
    std::vector<ExponentResult> out;
    out.reserve(omegas.size());
    for (double w : omegas) out.push_back(alpha_pucci(w));
    return out;
}

} // namespace thinfree
