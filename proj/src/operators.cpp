#include "thinfree/operators.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace thinfree {

double pucci_plus(const SymMat2& m, const EllipticityPair& ell) {
    auto [mu1, mu2] = m.eigenvalues();
    auto branch = [&](double mu) { return mu > 0.0 ? ell.Lam * mu : ell.lam * mu; };
    return branch(mu1) + branch(mu2);
}

double pucci_minus(const SymMat2& m, const EllipticityPair& ell) {
    auto [mu1, mu2] = m.eigenvalues();
    auto branch = [&](double mu) { return mu > 0.0 ? ell.lam * mu : ell.Lam * mu; };
    return branch(mu1) + branch(mu2);
}

ConvexOperator ConvexOperator::sup_form(std::vector<LinearTerm> terms) {
    if (terms.empty()) throw ParameterError("sup-form operator needs at least one term");

    double cmax = -std::numeric_limits<double>::infinity();
    double lam = std::numeric_limits<double>::infinity();
    double Lam = -std::numeric_limits<double>::infinity();
    for (const auto& t : terms) {
        cmax = std::max(cmax, t.c);
        auto [mu1, mu2] = t.L.eigenvalues();
        lam = std::min(lam, mu1);
        Lam = std::max(Lam, mu2);
    }
    if (!(lam > 0.0)) {
        throw ParameterError("sup-form coefficient matrices must be positive definite");
    }
    for (auto& t : terms) t.c -= cmax; // normalization sup_gamma c_gamma = 0

    ConvexOperator f;
    f.kind_ = OperatorKind::SupForm;
    f.ell_ = EllipticityPair(lam, Lam);
    f.linear_ = std::move(terms);
    return f;
}

ConvexOperator ConvexOperator::pucci(const EllipticityPair& ell) {
    ConvexOperator f;
    f.kind_ = OperatorKind::PucciPlus;
    f.ell_ = ell;
    f.pucci_ = {PucciTerm{ell, 0.0}};
    return f;
}

ConvexOperator ConvexOperator::pucci_max(std::vector<PucciTerm> terms) {
    if (terms.empty()) throw ParameterError("pucci-max operator needs at least one term");
    double cmax = -std::numeric_limits<double>::infinity();
    double lam = std::numeric_limits<double>::infinity();
    double Lam = -std::numeric_limits<double>::infinity();
    for (const auto& t : terms) {
        cmax = std::max(cmax, t.c);
        lam = std::min(lam, t.ell.lam);
        Lam = std::max(Lam, t.ell.Lam);
    }
    for (auto& t : terms) t.c -= cmax;

    ConvexOperator f;
    f.kind_ = OperatorKind::PucciMax;
    f.ell_ = EllipticityPair(lam, Lam);
    f.pucci_ = std::move(terms);
    return f;
}

ConvexOperator ConvexOperator::thm17_family(int i, const std::vector<double>& Lambdas,
                                            const std::vector<double>& offsets) {
    if (i < 0) throw ParameterError("thm17 family index must be >= 0");
    const size_t count = static_cast<size_t>(i) + 1;

    std::vector<double> L = Lambdas;
    if (L.empty()) {
        // Lambda_j = 2 - 1/(j+1): the trace at j = 0, increasing toward 2.
        L.resize(count);
        for (size_t j = 0; j < count; ++j) L[j] = 2.0 - 1.0 / static_cast<double>(j + 1);
    }
    if (L.size() != count) throw ParameterError("thm17 family needs i+1 Lambdas");
    for (size_t j = 0; j < count; ++j) {
        if (!(L[j] >= 1.0)) throw ParameterError("thm17 Lambdas must be >= 1");
        if (j > 0 && !(L[j] > L[j - 1])) throw ParameterError("thm17 Lambdas must be increasing");
    }

    std::vector<double> c = offsets;
    if (c.empty()) c.assign(count, 0.0);
    if (c.size() != count) throw ParameterError("thm17 family needs i+1 offsets");
    if (c[0] != 0.0) throw ParameterError("thm17 offsets must start at 0");
    for (double v : c) {
        if (!(v >= 0.0)) throw ParameterError("thm17 offsets must be nonnegative");
    }

    std::vector<PucciTerm> terms(count);
    for (size_t j = 0; j < count; ++j) terms[j] = {EllipticityPair(1.0, L[j]), -c[j]};
    return pucci_max(std::move(terms));
}

double ConvexOperator::eval(const SymMat2& m) const {
    switch (kind_) {
        case OperatorKind::SupForm: {
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& t : linear_) best = std::max(best, trace_product(t.L, m) + t.c);
            return best;
        }
        case OperatorKind::PucciPlus:
            return pucci_plus(m, ell_);
        case OperatorKind::PucciMax: {
            auto [mu1, mu2] = m.eigenvalues();
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& t : pucci_) {
                auto branch = [&](double mu) { return mu > 0.0 ? t.ell.Lam * mu : t.ell.lam * mu; };
                best = std::max(best, branch(mu1) + branch(mu2) + t.c);
            }
            return best;
        }
    }
    return 0.0;
}

bool ConvexOperator::is_one_homogeneous() const {
    auto zero = [](double c) { return c == 0.0; };
    return std::all_of(linear_.begin(), linear_.end(), [&](const LinearTerm& t) { return zero(t.c); }) &&
           std::all_of(pucci_.begin(), pucci_.end(), [&](const PucciTerm& t) { return zero(t.c); });
}

ConvexOperator ConvexOperator::recession() const {
    ConvexOperator f = *this;
    for (auto& t : f.linear_) t.c = 0.0;
    for (auto& t : f.pucci_) t.c = 0.0;
    return f;
}

double modulus_omega(const ConvexOperator& f, double tau, int samples) {
    if (!(tau > 0.0 && tau <= 1.0)) throw ParameterError("modulus_omega: tau must lie in (0,1]");
    if (samples <= 0) throw ParameterError("modulus_omega: samples must be positive");
    if (f.is_one_homogeneous()) return 0.0;

    const ConvexOperator rec = f.recession();

    // Unit-spectral-norm test matrices: eigenframe angles in [0, pi) and
    // eigenvalue pairs on a [-1,1]^2 lattice (corners included).
    const int nframe = samples;
    const int neig = samples + 1;
    std::vector<SymMat2> mats;
    mats.reserve(static_cast<size_t>(nframe) * neig * neig);
    for (int a = 0; a < nframe; ++a) {
        const double angle = M_PI * static_cast<double>(a) / nframe;
        for (int i = 0; i < neig; ++i) {
            const double e1 = -1.0 + 2.0 * static_cast<double>(i) / (neig - 1);
            for (int j = 0; j < neig; ++j) {
                const double e2 = -1.0 + 2.0 * static_cast<double>(j) / (neig - 1);
                mats.push_back(SymMat2::diag(e1, e2).rotated(angle));
            }
        }
    }

    double sup = 0.0;
    for (int k = 1; k <= samples; ++k) {
        const double xi = tau * static_cast<double>(k) / samples;
        for (const auto& a : mats) {
            const double d = std::abs(xi * f.eval(a * (1.0 / xi)) - rec.eval(a));
            sup = std::max(sup, d);
        }
    }
    return sup;
}

KappaFit estimate_kappa(const ConvexOperator& f, const std::vector<double>& tau_grid, int samples) {
    if (tau_grid.size() < 3) throw ParameterError("estimate_kappa: need at least 3 tau points");
    for (double t : tau_grid) {
        if (!(t > 0.0)) throw ParameterError("estimate_kappa: tau grid must be strictly positive");
    }

    std::vector<double> w(tau_grid.size());
    bool all_zero = true;
    for (size_t i = 0; i < tau_grid.size(); ++i) {
        w[i] = modulus_omega(f, tau_grid[i], samples);
        if (w[i] > 1e-14) all_zero = false;
    }
    if (all_zero) {
        // 1-homogeneous case: omega_F vanishes and any power bounds it.
        return {std::numeric_limits<double>::infinity(), 0.0, 0.0};
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(tau_grid.size());
    for (size_t i = 0; i < tau_grid.size(); ++i) {
        const double x = std::log(tau_grid[i]);
        const double y = std::log(w[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-30) throw ParameterError("estimate_kappa: degenerate tau grid");
    const double kappa = (n * sxy - sx * sy) / denom;
    const double logc = (sy - kappa * sx) / n;

    double ss = 0;
    for (size_t i = 0; i < tau_grid.size(); ++i) {
        const double r = std::log(w[i]) - (logc + kappa * std::log(tau_grid[i]));
        ss += r * r;
    }
    return {kappa, std::exp(logc), std::sqrt(ss / n)};
}

double equivalent_pucci_2d(const EigenvalueMap& f, const EllipticityPair& ell) {
    // Spot-check the stated structure: 1-homogeneity and strict monotonicity.
    const double f0 = f(1.0, -1.0);
    for (double t : {0.5, 2.0}) {
        if (std::abs(f(t, -t) - t * f0) > 1e-8 * (1.0 + std::abs(f0))) {
            throw ParameterError("equivalent_pucci_2d: eigenvalue map is not 1-homogeneous");
        }
    }
    const double eps = 1e-3;
    if (!(f(1.0 + eps, -1.0) > f0) || !(f(1.0, -1.0 + eps) > f0)) {
        throw ParameterError("equivalent_pucci_2d: eigenvalue map is not strictly increasing");
    }

    const double wmax = ell.omega();
    auto g = [&](double w) { return f(1.0, -w); };
    double lo = 1.0, hi = wmax;
    double glo = g(lo), ghi = g(hi);
    const double zero_tol = 1e-14 * (1.0 + std::abs(f(1.0, 0.0)));
    if (std::abs(glo) <= zero_tol) return lo;
    if (std::abs(ghi) <= zero_tol) return hi;
    if (glo * ghi > 0.0) {
        throw NotEquivalentToPucci(
            "zero level set of the eigenvalue map does not cross [1, Lam/lam]");
    }
    // g is strictly decreasing, so glo > 0 > ghi here.
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (gm == 0.0) return mid;
        if ((gm > 0.0) == (glo > 0.0)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double lambda_f_bound(const std::vector<double>& subgradient) {
    if (subgradient.empty()) throw ParameterError("lambda_f_bound: empty subgradient list");
    for (size_t i = 0; i < subgradient.size(); ++i) {
        if (!(subgradient[i] > 0.0)) {
            throw ParameterError("lambda_f_bound: entries must be strictly positive");
        }
        if (i > 0 && subgradient[i] < subgradient[i - 1]) {
            throw ParameterError("lambda_f_bound: list must be nondecreasing");
        }
    }
    const double n = static_cast<double>(subgradient.size());
    return 1.0 + (std::sqrt(subgradient.back() / subgradient.front()) - 1.0) / n;
}

namespace {

// Minimal tokenizer for the operator config grammar.
struct SpecParser {
    std::string s;
    size_t pos = 0;

    explicit SpecParser(std::string text) : s(std::move(text)) {}

    void skip_ws() {
        while (pos < s.size()) {
            char c = s[pos];
            if (std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == ';') {
                ++pos;
            } else if (c == '#') {
                while (pos < s.size() && s[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
    }

    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!eat(c)) {
            throw ParameterError(std::string("operator spec: expected '") + c + "' near offset " +
                                 std::to_string(pos));
        }
    }

    std::string ident() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) {
            ++pos;
        }
        if (start == pos) throw ParameterError("operator spec: expected identifier");
        return s.substr(start, pos - start);
    }

    double number() {
        skip_ws();
        size_t consumed = 0;
        double v;
        try {
            v = std::stod(s.substr(pos), &consumed);
        } catch (const std::exception&) {
            throw ParameterError("operator spec: expected number near offset " + std::to_string(pos));
        }
        pos += consumed;
        return v;
    }

    std::vector<double> number_list() {
        expect('[');
        std::vector<double> out;
        while (!eat(']')) out.push_back(number());
        return out;
    }

    std::vector<std::vector<double>> tuple_list() {
        expect('[');
        std::vector<std::vector<double>> out;
        while (!eat(']')) {
            expect('(');
            std::vector<double> tup;
            while (!eat(')')) tup.push_back(number());
            out.push_back(std::move(tup));
        }
        return out;
    }

    bool at_end() {
        skip_ws();
        return pos >= s.size();
    }
};

} // namespace

ConvexOperator parse_operator_spec(const std::string& text) {
    SpecParser p(text);
    const std::string head = p.ident();

    if (head == "laplacian" || head == "trace") {
        if (!p.at_end() && !(p.eat('{') && p.eat('}'))) {
            throw ParameterError("operator spec: '" + head + "' takes no parameters");
        }
        return ConvexOperator::sup_form({LinearTerm{SymMat2::identity(), 0.0}});
    }

    if (head == "pucci") {
        double lam = 1.0, Lam = 1.0;
        bool have_lam = false, have_Lam = false;
        p.expect('{');
        while (!p.eat('}')) {
            const std::string key = p.ident();
            p.expect('=');
            if (key == "lam") {
                lam = p.number();
                have_lam = true;
            } else if (key == "Lam") {
                Lam = p.number();
                have_Lam = true;
            } else {
                throw ParameterError("operator spec: unknown pucci key '" + key + "'");
            }
        }
        if (!have_lam || !have_Lam) throw ParameterError("operator spec: pucci needs lam and Lam");
        return ConvexOperator::pucci(EllipticityPair(lam, Lam));
    }

    if (head == "supform") {
        p.expect('{');
        std::vector<LinearTerm> terms;
        while (!p.eat('}')) {
            const std::string key = p.ident();
            p.expect('=');
            if (key != "terms") throw ParameterError("operator spec: unknown supform key '" + key + "'");
            for (const auto& tup : p.tuple_list()) {
                if (tup.size() != 4) {
                    throw ParameterError("operator spec: supform terms are (L11, L12, L22, c)");
                }
                terms.push_back({SymMat2{tup[0], tup[1], tup[2]}, tup[3]});
            }
        }
        return ConvexOperator::sup_form(std::move(terms));
    }

    if (head == "thm17") {
        p.expect('{');
        int i = -1;
        std::vector<double> Lambdas, offsets;
        while (!p.eat('}')) {
            const std::string key = p.ident();
            p.expect('=');
            if (key == "i") {
                i = static_cast<int>(p.number());
            } else if (key == "Lambdas") {
                Lambdas = p.number_list();
            } else if (key == "offsets") {
                offsets = p.number_list();
            } else {
                throw ParameterError("operator spec: unknown thm17 key '" + key + "'");
            }
        }
        if (i < 0) {
            if (Lambdas.empty()) throw ParameterError("operator spec: thm17 needs i or Lambdas");
            i = static_cast<int>(Lambdas.size()) - 1;
        }
        return ConvexOperator::thm17_family(i, Lambdas, offsets);
    }

    throw ParameterError("operator spec: unknown operator '" + head + "'");
}

ConvexOperator load_operator_spec(const std::string& path_or_inline) {
    std::ifstream in(path_or_inline);
    if (in.good()) {
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse_operator_spec(ss.str());
    }
    return parse_operator_spec(path_or_inline);
}

} // namespace thinfree
