#pragma once

#include "thinfree/errors.hpp"
#include "thinfree/symmat2.hpp"

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace thinfree {

/// Ellipticity constants 0 < lam <= Lam.
struct EllipticityPair {
    double lam = 1.0;
    double Lam = 1.0;

    EllipticityPair() = default;
    EllipticityPair(double lam_, double Lam_) : lam(lam_), Lam(Lam_) {
        if (!(lam > 0.0) || !(Lam >= lam)) {
            throw ParameterError("EllipticityPair requires 0 < lam <= Lam");
        }
    }

    double omega() const { return Lam / lam; }
};

/// Maximal Pucci operator: Lam * (positive eigenvalues) + lam * (negative ones).
double pucci_plus(const SymMat2& m, const EllipticityPair& ell);

/// Minimal Pucci operator: lam on positive eigenvalues, Lam on negative ones.
double pucci_minus(const SymMat2& m, const EllipticityPair& ell);

/// One affine piece tr(L M) + c of a sup-form operator. Offsets are <= 0
/// after the construction-time normalization of the owning operator.
struct LinearTerm {
    SymMat2 L;
    double c = 0.0;
};

/// One Pucci piece P^+_{lam,Lam}(M) + c; used for max-of-Pucci families.
struct PucciTerm {
    EllipticityPair ell;
    double c = 0.0;
};

enum class OperatorKind {
    SupForm,   // finite max of affine terms
    PucciPlus, // single extremal operator, exact eigenvalue formula
    PucciMax,  // max of Pucci operators with offsets (the two-ellipticity families)
};

/// Convex uniformly elliptic operator in sup form. Invariants enforced at
/// construction: the offsets are shifted so that max_gamma c_gamma = 0 (hence
/// F(0) = 0), every linear coefficient matrix satisfies lam*Id <= L <= Lam*Id
/// for the derived ellipticity pair, and term lists are nonempty.
class ConvexOperator {
public:
    /// Finite sup of affine terms. Ellipticity constants are derived from the
    /// extreme eigenvalues of the coefficient matrices.
    static ConvexOperator sup_form(std::vector<LinearTerm> terms);

    /// Exact maximal Pucci operator.
    static ConvexOperator pucci(const EllipticityPair& ell);

    /// max_j { P^+_{ell_j} + c_j }. Offsets are shifted so the largest is 0.
    static ConvexOperator pucci_max(std::vector<PucciTerm> terms);

    /// The family F_i(A) = max_{0<=j<=i} { P^+_{1,Lambda_j}(A) - offset_j }
    /// with Lambda_j = 2 - 1/(j+1) unless explicit Lambdas are given.
    /// offsets must be nonnegative with offsets[0] = 0.
    static ConvexOperator thm17_family(int i,
                                       const std::vector<double>& Lambdas = {},
                                       const std::vector<double>& offsets = {});

    OperatorKind kind() const { return kind_; }
    const EllipticityPair& ell() const { return ell_; }
    const std::vector<LinearTerm>& linear_terms() const { return linear_; }
    const std::vector<PucciTerm>& pucci_terms() const { return pucci_; }

    double eval(const SymMat2& m) const;
    double operator()(const SymMat2& m) const { return eval(m); }

    /// True when all offsets are zero, i.e. the operator is positively
    /// 1-homogeneous and equals its own recession.
    bool is_one_homogeneous() const;

    /// Blow-down limit mu^-1 F(mu A): same pieces with all offsets zeroed.
    ConvexOperator recession() const;

private:
    ConvexOperator() = default;

    OperatorKind kind_ = OperatorKind::SupForm;
    EllipticityPair ell_;
    std::vector<LinearTerm> linear_;
    std::vector<PucciTerm> pucci_;
};

/// Deterministic grid estimate of the blow-down modulus
///   omega_F(tau) = sup_{0<=xi<=tau} sup_{|A|<=1} |xi F(xi^-1 A) - F*(A)|,
/// with |A| the spectral norm. The A-grid runs over eigenframe angles and
/// eigenvalue pairs in [-1,1]^2; `samples` sets the resolution of all three
/// grids. Exactly zero for 1-homogeneous F; nondecreasing in tau.
double modulus_omega(const ConvexOperator& f, double tau, int samples);

struct KappaFit {
    double kappa = 0.0;   // +infinity when omega_F vanishes identically
    double C_kappa = 0.0; // prefactor of the bound omega_F(tau) <= C tau^kappa
    double residual = 0.0; // RMS deviation of log omega_F from the fit
};

/// Least-squares power fit omega_F(tau) ~ C * tau^kappa over a tau grid.
KappaFit estimate_kappa(const ConvexOperator& f, const std::vector<double>& tau_grid,
                        int samples = 48);

/// Eigenvalue map of a rotationally invariant 2D operator, arguments ordered
/// l1 >= l2.
using EigenvalueMap = std::function<double(double, double)>;

/// Ratio omega_tilde in [1, Lam/lam] with {f = 0} = {(l1, -omega_tilde*l1)},
/// located by bisection of f(1, -w) = 0. The map must be 1-homogeneous and
/// strictly increasing in each argument (spot-checked). Throws
/// NotEquivalentToPucci when f(1,-1) and f(1,-Lam/lam) have the same sign.
double equivalent_pucci_2d(const EigenvalueMap& f, const EllipticityPair& ell);

/// Pucci bound 1 + (1/n)(sqrt(Ln/L1) - 1) from a nondecreasing positive
/// subgradient list (L1, ..., Ln).
double lambda_f_bound(const std::vector<double>& subgradient);

/// Parse an operator spec, either from a config file or inline:
///   pucci { lam = 1, Lam = 2 }
///   supform { terms = [(L11, L12, L22, c), ...] }
///   thm17 { i = 1, Lambdas = [1, 1.5], offsets = [0, 0.4] }
///   laplacian
ConvexOperator parse_operator_spec(const std::string& text);
ConvexOperator load_operator_spec(const std::string& path_or_inline);

} // namespace thinfree
