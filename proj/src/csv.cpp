#include "thinfree/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace thinfree {

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_alpha_csv(std::ostream& os, const std::vector<ExponentResult>& rows) {
    os << "omega,alpha,homogeneity,residual,iterations\n";
    for (const auto& r : rows) {
        os << format_double(r.omega) << ',' << format_double(r.alpha) << ','
           << format_double(1.0 + r.alpha) << ',' << format_double(r.residual) << ','
           << r.iterations << '\n';
    }
}

void write_angular_csv(std::ostream& os, const BlowupProfile& p) {
    os << "theta,phi,phi_prime,sector_index\n";
    for (int s = 0; s < 3; ++s) {
        const auto& sec = p.sectors[s];
        const size_t last = sec.theta_grid.size() - 1;
        for (size_t k = 0; k <= last; k += 8) {
            const size_t idx = std::min(k, last);
            os << format_double(sec.theta_grid[idx]) << ',' << format_double(sec.phi[idx]) << ','
               << format_double(sec.phi_prime[idx]) << ',' << s << '\n';
        }
        if (last % 8 != 0) {
            os << format_double(sec.theta_grid[last]) << ',' << format_double(sec.phi[last])
               << ',' << format_double(sec.phi_prime[last]) << ',' << s << '\n';
        }
    }
}

void write_field_csv(std::ostream& os, const Grid2D& grid, const std::vector<double>& u) {
    os << "x1,x2,u\n";
    for (int i = 0; i < grid.n; ++i) {
        for (int j = 0; j < grid.n; ++j) {
            os << format_double(grid.x1(j)) << ',' << format_double(grid.x2(i)) << ','
               << format_double(u[grid.idx(i, j)]) << '\n';
        }
    }
}

void write_fit_csv(std::ostream& os, const ExponentFit& fit) {
    os << "r,sup,local_slope\n";
    for (size_t k = 0; k < fit.radii.size(); ++k) {
        os << format_double(fit.radii[k]) << ',' << format_double(fit.sup_values[k]) << ',';
        if (k < fit.local_slopes.size()) os << format_double(fit.local_slopes[k]);
        os << '\n';
    }
}

std::pair<Grid2D, std::vector<double>> read_field_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open field CSV '" + path + "'");

    std::string line;
    std::getline(in, line); // header
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const size_t c1 = line.find(',');
        const size_t c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
            throw ParameterError("field CSV: malformed row '" + line + "'");
        }
        values.push_back(std::stod(line.substr(c2 + 1)));
    }
    const double sz = std::sqrt(static_cast<double>(values.size()));
    const int n = static_cast<int>(std::lround(sz));
    if (static_cast<size_t>(n) * n != values.size() || n < 5 || n % 2 == 0) {
        throw ParameterError("field CSV: row count is not an odd square grid");
    }
    return {Grid2D(n), std::move(values)};
}

} // namespace thinfree
