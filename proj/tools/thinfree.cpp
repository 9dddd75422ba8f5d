// Command-line front end: exponents, blow-up profiles, thin obstacle solves,
// growth-exponent estimation, the scale-dependent counterexample run, field
// comparability, and the self-check suite. Data goes to stdout or files,
// diagnostics to stderr. Exit codes: 0 success, 1 numerical failure, 2 usage.

#include "thinfree/analysis.hpp"
#include "thinfree/csv.hpp"
#include "thinfree/svg.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

using json = nlohmann::ordered_json;
using namespace thinfree;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kSchemaVersion = 1;

json make_envelope(const std::string& subcommand, const json& config, const json& results,
                   double elapsed_ms) {
    json env;
    env["tool"] = "thinfree";
    env["version"] = kVersion;
    env["schema"] = kSchemaVersion;
    env["subcommand"] = subcommand;
    env["config"] = config;
    env["results"] = results;
    env["timing_ms"] = elapsed_ms; // excluded from the determinism contract
    return env;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path);
    if (!os) throw NumericalError("cannot open output file '" + path + "'");
    os << content;
}

class Stopwatch {
public:
    double ms() const {
        return std::chrono::duration<double, std::milli>(clock::now() - start_).count();
    }

private:
    using clock = std::chrono::steady_clock;
    clock::time_point start_ = clock::now();
};

int resolve_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("THINFREE_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) return t;
    }
    return 1;
}

BoundaryData resolve_bc(const std::string& spec, const Grid2D& grid) {
    if (spec.rfind("file:", 0) == 0) {
        const std::string path = spec.substr(5);
        std::ifstream in(path);
        if (!in) throw ParameterError("cannot open boundary file '" + path + "'");
        struct Row {
            double x1, x2, v;
        };
        std::vector<Row> rows;
        std::string line;
        std::getline(in, line); // header
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            Row r;
            if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &r.x1, &r.x2, &r.v) != 3) {
                throw ParameterError("boundary file: malformed row '" + line + "'");
            }
            rows.push_back(r);
        }
        const double tol = 0.25 * grid.h;
        return BoundaryData::function([rows, tol](double x1, double x2) {
            for (const auto& r : rows) {
                if (std::abs(r.x1 - x1) <= tol && std::abs(r.x2 - x2) <= tol) return r.v;
            }
            throw ParameterError("boundary file: no value for a boundary node");
        });
    }
    return BoundaryData::preset(spec);
}

// ---------------------------------------------------------------------------
// alpha

struct AlphaOpts {
    std::string omega;
    std::string table;
    bool as_json = false;
    bool as_csv = false;
    std::string out;
};

int run_alpha(const AlphaOpts& o) {
    Stopwatch timer;
    if (!o.omega.empty()) {
        json cfg{{"omega", o.omega}};
        double alpha, residual = 0.0;
        if (o.omega == "inf" || o.omega == "infinity") {
            alpha = alpha_infinity();
        } else {
            const auto r = alpha_pucci(std::stod(o.omega));
            alpha = r.alpha;
            residual = r.residual;
        }
        if (o.as_json) {
            json res{{"alpha", alpha}, {"homogeneity", 1.0 + alpha}, {"residual", residual}};
            std::cout << make_envelope("alpha", cfg, res, timer.ms()).dump(2) << '\n';
        } else {
            std::cout << format_double(alpha) << '\n';
        }
        return 0;
    }

    std::vector<double> omegas;
    std::stringstream ss(o.table);
    std::string tok;
    while (std::getline(ss, tok, ',')) omegas.push_back(std::stod(tok));
    const auto rows = alpha_table(omegas);

    std::ostringstream csv;
    write_alpha_csv(csv, rows);
    if (o.as_json) {
        json res = json::array();
        for (const auto& r : rows) {
            res.push_back({{"omega", r.omega},
                           {"alpha", r.alpha},
                           {"homogeneity", 1.0 + r.alpha},
                           {"residual", r.residual},
                           {"iterations", r.iterations}});
        }
        std::cout << make_envelope("alpha", json{{"table", o.table}}, res, timer.ms()).dump(2)
                  << '\n';
    } else if (!o.out.empty()) {
        write_text_file(o.out, csv.str());
    } else {
        std::cout << csv.str();
    }
    return 0;
}

// ---------------------------------------------------------------------------
// profile

struct ProfileOpts {
    double omega = 1.0;
    std::string angular_csv;
    std::string field_csv;
    int grid = 129;
    std::string svg;
};

int run_profile(const ProfileOpts& o) {
    Stopwatch timer;
    const BlowupProfile p = build_profile(o.omega);

    if (!o.angular_csv.empty()) {
        std::ostringstream os;
        write_angular_csv(os, p);
        write_text_file(o.angular_csv, os.str());
    }
    if (!o.field_csv.empty()) {
        Grid2D g(o.grid);
        std::vector<double> u(g.size());
        for (int i = 0; i < g.n; ++i) {
            for (int j = 0; j < g.n; ++j) u[g.idx(i, j)] = eval_profile(p, g.x1(j), g.x2(i));
        }
        std::ostringstream os;
        write_field_csv(os, g, u);
        write_text_file(o.field_csv, os.str());
    }
    if (!o.svg.empty()) emit_svg_angular(p, o.svg);

    json cfg{{"omega", o.omega}, {"grid", o.grid}};
    json res{{"alpha_G", p.alpha_G}, {"homogeneity", p.homogeneity()}, {"theta1", p.theta1},
             {"theta2", p.theta2},   {"c1", p.c1},                     {"c3", p.c3}};
    std::cout << make_envelope("profile", cfg, res, timer.ms()).dump(2) << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// solve

struct SolveOpts {
    std::string operator_spec = "laplacian";
    std::string bc = "thm17";
    int n = 257;
    int directions = 16;
    double tol = 1e-8;
    int threads = 0;
    std::string out;
    std::string svg;
    std::string report;
};

int run_solve(const SolveOpts& o) {
    Stopwatch timer;
    const auto op = load_operator_spec(o.operator_spec);
    const auto stencil = build_stencil(op, o.directions);
    const Grid2D grid(o.n);
    const BoundaryData bc = resolve_bc(o.bc, grid);

    SolveConfig cfg;
    cfg.tol = o.tol;
    cfg.threads = resolve_threads(o.threads);
    const SolveResult result = solve_thin_obstacle(grid, bc, stencil, cfg);
    const ResidualReport rep = residual_report(result);

    if (!o.out.empty()) {
        std::ostringstream os;
        write_field_csv(os, grid, result.u);
        write_text_file(o.out, os.str());
    }
    if (!o.svg.empty()) emit_svg_field(grid, result.u, o.svg);

    json cfgj{{"operator", o.operator_spec}, {"bc", o.bc},   {"n", o.n},
              {"directions", o.directions},  {"tol", o.tol}, {"threads", cfg.threads}};
    json res{{"iterations", result.iterations},
             {"residual_interior", result.residual_interior},
             {"complementarity_gap", result.complementarity_gap},
             {"thin_min_increment", rep.thin_min_increment},
             {"evenness_gap", rep.evenness_gap}};
    if (result.fb_point) res["fb_point"] = *result.fb_point;
    const json env = make_envelope("solve", cfgj, res, timer.ms());
    if (!o.report.empty()) write_text_file(o.report, env.dump(2) + "\n");
    std::cout << env.dump(2) << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateOpts {
    std::string in;
    std::string z = "auto";
    double r_max = 0.0; // 0 = auto
    double r_min = 0.0;
    std::string csv;
    std::string svg;
};

int run_estimate(const EstimateOpts& o) {
    Stopwatch timer;
    auto [grid, u] = read_field_csv(o.in);

    double z;
    if (o.z == "auto") {
        const auto zopt = detect_free_boundary(grid, u);
        if (!zopt) throw NoFreeBoundary("estimate: no free boundary point on the thin line");
        z = *zopt;
    } else {
        z = std::stod(o.z);
    }
    const double dist = std::min(1.0 - z, 1.0 + z);
    const double r_max = o.r_max > 0.0 ? o.r_max : 0.5 * dist;
    const double r_min = o.r_min > 0.0 ? o.r_min : 4.0 * grid.h;
    const ExponentFit fit = estimate_exponent(grid, u, z, r_max, r_min);

    if (!o.csv.empty()) {
        std::ostringstream os;
        write_fit_csv(os, fit);
        write_text_file(o.csv, os.str());
    }
    if (!o.svg.empty()) emit_svg_loglog(fit, o.svg);

    json cfg{{"in", o.in}, {"z", o.z}, {"r_max", r_max}, {"r_min", r_min}};
    json res{{"z", z},
             {"global_slope", fit.global_slope},
             {"alpha", fit.global_slope - 1.0},
             {"fit_residual", fit.fit_residual},
             {"radii", fit.radii},
             {"sup_values", fit.sup_values},
             {"local_slopes", fit.local_slopes}};
    std::cout << make_envelope("estimate", cfg, res, timer.ms()).dump(2) << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// counterexample

struct CounterOpts {
    double Lambda1 = 1.5;
    double offset = 0.0;
    int n = 513;
    int directions = 16;
    double tol = 1e-8;
    int threads = 0;
    std::string report;
};

int run_counterexample(const CounterOpts& o) {
    Stopwatch timer;
    CounterexampleScenario sc;
    sc.Lambda1 = o.Lambda1;
    sc.offset = o.offset;
    sc.n = o.n;
    sc.directions = o.directions;
    sc.tol = o.tol;
    sc.threads = resolve_threads(o.threads);
    const ScaleReport rep = run_counterexample(sc);

    json cfg{{"Lambda1", o.Lambda1}, {"offset", o.offset},         {"n", o.n},
             {"directions", o.directions}, {"tol", o.tol}, {"threads", sc.threads}};
    json res{{"z", rep.z},
             {"global_slope", rep.fit.global_slope},
             {"coarse_slope", rep.coarse_slope},
             {"fine_slope", rep.fine_slope},
             {"slope_spread", rep.slope_spread},
             {"recession_slope", rep.recession_slope},
             {"scale_dependent", rep.scale_dependent},
             {"iterations", rep.iterations},
             {"radii", rep.fit.radii},
             {"sup_values", rep.fit.sup_values},
             {"local_slopes", rep.fit.local_slopes}};
    const json env = make_envelope("counterexample", cfg, res, timer.ms());
    if (!o.report.empty()) write_text_file(o.report, env.dump(2) + "\n");
    std::cout << env.dump(2) << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// compare

struct CompareOpts {
    std::string a;
    std::string b;
    double z = std::numeric_limits<double>::quiet_NaN();
    double r_in = 0.05;
    double r_out = 0.25;
};

int run_compare(const CompareOpts& o) {
    Stopwatch timer;
    auto [ga, ua] = read_field_csv(o.a);
    auto [gb, ub] = read_field_csv(o.b);
    if (ga.n != gb.n) throw ParameterError("compare: fields live on different grids");

    std::vector<size_t> region;
    if (std::isnan(o.z)) {
        for (size_t k = 0; k < ua.size(); ++k) region.push_back(k);
    } else {
        region = annulus_region(ga, o.z, o.r_in, o.r_out, 3.0 * ga.h);
    }
    const auto [lo, hi] = comparability_check(ua, ub, region);

    json cfg{{"a", o.a}, {"b", o.b}, {"r_in", o.r_in}, {"r_out", o.r_out}};
    if (!std::isnan(o.z)) cfg["z"] = o.z;
    json res{{"min_ratio", lo}, {"max_ratio", hi}, {"nodes", region.size()}};
    std::cout << make_envelope("compare", cfg, res, timer.ms()).dump(2) << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyOpts {
    std::string suite = "quick";
    unsigned seed = 42;
};

struct CheckRunner {
    int failures = 0;

    void check(const std::string& name, bool ok, const std::string& detail = "") {
        std::cout << (ok ? "[ok]   " : "[FAIL] ") << name;
        if (!detail.empty()) std::cout << "  (" << detail << ")";
        std::cout << '\n';
        if (!ok) ++failures;
    }
};

SymMat2 random_mat(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    return {d(rng), d(rng), d(rng)};
}

int run_verify(const VerifyOpts& o) {
    CheckRunner r;
    std::mt19937_64 rng(o.seed);
    const EllipticityPair ell12(1.0, 2.0);

    // Pucci sandwich and rotation invariance.
    {
        const auto family = ConvexOperator::thm17_family(1, {1.0, 1.5}, {0.0, 0.5});
        double worst = 0.0;
        bool sandwich = true;
        for (int k = 0; k < 100; ++k) {
            const SymMat2 m = random_mat(rng);
            const double v = family.eval(m);
            if (v > pucci_plus(m, family.ell()) + 1e-12 ||
                v < pucci_minus(m, family.ell()) - 1e-12) {
                sandwich = false;
            }
            std::uniform_real_distribution<double> ang(0.0, M_PI);
            const double rot = std::abs(pucci_plus(m.rotated(ang(rng)), ell12) - pucci_plus(m, ell12));
            worst = std::max(worst, rot);
        }
        r.check("pucci sandwich on random matrices", sandwich);
        r.check("pucci rotation invariance", worst < 1e-12, "max dev " + format_double(worst));
    }

    // Exponents.
    {
        const auto a1 = alpha_pucci(1.0);
        r.check("alpha(1) = 1/2", std::abs(a1.alpha - 0.5) < 1e-12 && std::abs(a1.residual) < 1e-12);
        const double ai = alpha_infinity();
        r.check("alpha_infinity to 8 digits", std::abs(ai - 0.64306995) < 5e-9,
                format_double(ai));
        bool master_ok = true;
        for (double w : {1.0, 1.5, 2.0, 4.0, 10.0, 100.0}) {
            if (std::abs(master_equation(alpha_pucci(w).alpha, w)) > 1e-12) master_ok = false;
        }
        r.check("master equation residuals over omega grid", master_ok);
    }

    // Shooting against the implicit equations.
    {
        const double w = 2.0;
        const double alpha = alpha_pucci(w).alpha;
        const double ap_neg = shoot_sector(1.0 + alpha, w, ConeSign::Negative);
        const double ap_pos = shoot_sector(1.0 + alpha, w, ConeSign::Positive);
        r.check("shoot vs 2g (omega=2)", std::abs(ap_neg - 2.0 * g(alpha, w)) < 1e-4,
                format_double(std::abs(ap_neg - 2.0 * g(alpha, w))));
        r.check("shoot vs 2h (omega=2)", std::abs(ap_pos - 2.0 * h(alpha, w)) < 1e-4,
                format_double(std::abs(ap_pos - 2.0 * h(alpha, w))));
        r.check("apertures close up to 2 pi",
                std::abs(2.0 * ap_neg + ap_pos - 2.0 * M_PI) < 2e-4);
    }

    // Profile construction.
    {
        const BlowupProfile p = build_profile(2.0);
        const bool order = p.theta1 < M_PI && p.theta2 > M_PI && p.theta2 < 2.0 * M_PI;
        r.check("profile sector geometry (omega=2)", order && p.c1 > 0.0 && p.c3 > 0.0);
        const auto rep = verify_profile(p, 1e-3);
        r.check("profile equation residual <= 1e-3", rep.residual_pass,
                format_double(rep.max_residual_rel));
        r.check("profile sign structure", rep.sign_pass);
    }

    // Stencil exactness and a small solve.
    {
        const auto stencil = build_stencil(ConvexOperator::pucci(ell12), 16);
        const Grid2D grid(33);
        std::vector<double> q(grid.size());
        for (int i = 0; i < grid.n; ++i) {
            for (int j = 0; j < grid.n; ++j) q[grid.idx(i, j)] = grid.x1(j) * grid.x1(j);
        }
        const double fh = stencil.apply(grid, q, grid.thin_row, grid.thin_row);
        r.check("stencil exact on aligned quadratic", std::abs(fh - 4.0) < 1e-9,
                format_double(fh));

        SolveConfig cfg;
        cfg.tol = 1e-9;
        const auto solved = solve_thin_obstacle(
            grid, BoundaryData::thm17(), build_stencil(parse_operator_spec("laplacian"), 4), cfg);
        r.check("small solve complementarity", solved.complementarity_gap < 1e-6,
                format_double(solved.complementarity_gap));
        r.check("small solve has a free boundary", solved.fb_point.has_value());
    }

    if (o.suite == "full") {
        bool shoot_ok = true;
        for (double w : {1.0, 1.5, 5.0, 20.0}) {
            const double alpha = alpha_pucci(w).alpha;
            if (std::abs(shoot_sector(1.0 + alpha, w, ConeSign::Negative) - 2.0 * g(alpha, w)) >
                1e-4) {
                shoot_ok = false;
            }
        }
        r.check("shooting across the omega grid", shoot_ok);

        const BlowupProfile p1 = build_profile(1.0);
        double worst = 0.0;
        for (int k = 1; k < 512; ++k) {
            const double theta = 2.0 * M_PI * k / 512.0;
            worst = std::max(worst, std::abs(profile_angular_value(p1, theta) -
                                             std::cos(1.5 * (theta - M_PI))));
        }
        r.check("omega=1 profile matches the harmonic closed form", worst < 1e-4,
                format_double(worst));

        const Grid2D g65(65);
        SolveConfig cfg;
        cfg.tol = 1e-9;
        const auto pu = solve_thin_obstacle(g65, BoundaryData::thm17(),
                                            build_stencil(ConvexOperator::pucci(ell12), 16), cfg);
        r.check("pucci solve complementarity (n=65)", pu.complementarity_gap < 1e-6);
    }

    std::cout << (r.failures == 0 ? "all checks passed\n"
                                  : std::to_string(r.failures) + " check(s) failed\n");
    return r.failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fully nonlinear thin obstacle problem: exponents, profiles, discrete solves"};
    app.require_subcommand(1);

    AlphaOpts alpha_opts;
    auto* alpha_cmd = app.add_subcommand("alpha", "optimal exponent alpha(omega)");
    alpha_cmd->add_option("--omega", alpha_opts.omega, "ellipticity ratio, or 'inf'");
    alpha_cmd->add_option("--table", alpha_opts.table, "comma-separated omega list");
    alpha_cmd->add_flag("--json", alpha_opts.as_json, "emit a JSON envelope");
    alpha_cmd->add_flag("--csv", alpha_opts.as_csv, "emit CSV (default for --table)");
    alpha_cmd->add_option("--out", alpha_opts.out, "write table CSV here");

    ProfileOpts profile_opts;
    auto* profile_cmd = app.add_subcommand("profile", "three-sector blow-up profile");
    profile_cmd->add_option("--omega", profile_opts.omega, "ellipticity ratio")->required();
    profile_cmd->add_option("--angular-csv", profile_opts.angular_csv, "angular profile CSV");
    profile_cmd->add_option("--field-csv", profile_opts.field_csv, "sampled field CSV");
    profile_cmd->add_option("--grid", profile_opts.grid, "field sampling grid size");
    profile_cmd->add_option("--svg", profile_opts.svg, "angular plot");

    SolveOpts solve_opts;
    auto* solve_cmd = app.add_subcommand("solve", "discrete thin obstacle solve on Q1");
    solve_cmd->add_option("--operator", solve_opts.operator_spec, "operator config file or inline");
    solve_cmd->add_option("--bc", solve_opts.bc, "thm17 | const:<v> | linear-x2 | file:<csv>");
    solve_cmd->add_option("--n", solve_opts.n, "grid points per side (odd)");
    solve_cmd->add_option("--directions", solve_opts.directions, "stencil directions (4/8/16/32)");
    solve_cmd->add_option("--tol", solve_opts.tol, "termination tolerance");
    solve_cmd->add_option("--threads", solve_opts.threads, "worker threads (or THINFREE_THREADS)");
    solve_cmd->add_option("--out", solve_opts.out, "field CSV");
    solve_cmd->add_option("--svg", solve_opts.svg, "field heatmap SVG");
    solve_cmd->add_option("--report", solve_opts.report, "JSON report path");

    EstimateOpts est_opts;
    auto* est_cmd = app.add_subcommand("estimate", "growth exponent from a field CSV");
    est_cmd->add_option("--in", est_opts.in, "field CSV")->required();
    est_cmd->add_option("--z", est_opts.z, "free boundary abscissa or 'auto'");
    est_cmd->add_option("--rmax", est_opts.r_max, "largest radius");
    est_cmd->add_option("--rmin", est_opts.r_min, "smallest radius");
    est_cmd->add_option("--csv", est_opts.csv, "fit CSV");
    est_cmd->add_option("--svg", est_opts.svg, "log-log plot");

    CounterOpts counter_opts;
    auto* counter_cmd = app.add_subcommand("counterexample", "two-term scale-dependence run");
    counter_cmd->add_option("--Lambda1", counter_opts.Lambda1, "second ellipticity constant");
    counter_cmd->add_option("--offset", counter_opts.offset, "offset of the second term");
    counter_cmd->add_option("--n", counter_opts.n, "grid points per side");
    counter_cmd->add_option("--directions", counter_opts.directions, "stencil directions");
    counter_cmd->add_option("--tol", counter_opts.tol, "solver tolerance");
    counter_cmd->add_option("--threads", counter_opts.threads, "worker threads");
    counter_cmd->add_option("--report", counter_opts.report, "JSON report path");

    CompareOpts cmp_opts;
    auto* cmp_cmd = app.add_subcommand("compare", "extremal ratios of two fields");
    cmp_cmd->add_option("--a", cmp_opts.a, "numerator field CSV")->required();
    cmp_cmd->add_option("--b", cmp_opts.b, "denominator field CSV")->required();
    cmp_cmd->add_option("--z", cmp_opts.z, "annulus center abscissa");
    cmp_cmd->add_option("--rin", cmp_opts.r_in, "inner radius");
    cmp_cmd->add_option("--rout", cmp_opts.r_out, "outer radius");

    VerifyOpts verify_opts;
    auto* verify_cmd = app.add_subcommand("verify", "invariant self-checks");
    verify_cmd->add_option("--suite", verify_opts.suite, "quick | full");
    verify_cmd->add_option("--seed", verify_opts.seed, "sampling seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    try {
        if (*alpha_cmd) {
            if (alpha_opts.omega.empty() == alpha_opts.table.empty()) {
                std::cerr << "alpha: exactly one of --omega / --table is required\n";
                return 2;
            }
            return run_alpha(alpha_opts);
        }
        if (*profile_cmd) return run_profile(profile_opts);
        if (*solve_cmd) return run_solve(solve_opts);
        if (*est_cmd) return run_estimate(est_opts);
        if (*counter_cmd) return run_counterexample(counter_opts);
        if (*cmp_cmd) return run_compare(cmp_opts);
        if (*verify_cmd) return run_verify(verify_opts);
    } catch (const ParameterError& e) {
        std::cerr << "parameter error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
