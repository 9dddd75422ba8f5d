#include "thinfree/svg.hpp"

#include "thinfree/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace thinfree {

namespace {

std::ofstream open_svg(const std::string& path, int w, int h) {
    std::ofstream os(path);
    if (!os) throw NumericalError("cannot open SVG output '" + path + "'");
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
       << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";
    os << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
    return os;
}

void text(std::ofstream& os, double x, double y, const std::string& s, int size = 12) {
    os << "<text x=\"" << x << "\" y=\"" << y << "\" font-family=\"monospace\" font-size=\""
       << size << "\">" << s << "</text>\n";
}

std::string heat_color(double t) {
    // Diverging blue-white-red, t in [-1, 1].
    t = std::clamp(t, -1.0, 1.0);
    int r, g, b;
    if (t >= 0.0) {
        r = 255;
        g = static_cast<int>(255 * (1.0 - t));
        b = static_cast<int>(255 * (1.0 - t));
    } else {
        r = static_cast<int>(255 * (1.0 + t));
        g = static_cast<int>(255 * (1.0 + t));
        b = 255;
    }
    char buf[10];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

} // namespace

void emit_svg_angular(const BlowupProfile& p, const std::string& path) {
    const int W = 760, H = 420;
    const double ml = 60, mr = 20, mt = 24, mb = 40;
    auto px = [&](double theta) { return ml + (W - ml - mr) * theta / (2.0 * M_PI); };
    auto py = [&](double phi) { return mt + (H - mt - mb) * (1.0 - (phi + 1.0) / 2.0); };

    auto os = open_svg(path, W, H);
    // Axes and the phi = 0 line.
    os << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(2 * M_PI)
       << "\" y2=\"" << py(0) << "\" stroke=\"#888\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
       << "\" stroke=\"#333\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\""
       << H - mb << "\" stroke=\"#333\"/>\n";

    for (double theta : {p.theta1, p.theta2}) {
        os << "<line x1=\"" << px(theta) << "\" y1=\"" << mt << "\" x2=\"" << px(theta)
           << "\" y2=\"" << H - mb << "\" stroke=\"#c33\" stroke-dasharray=\"4 3\"/>\n";
    }
    text(os, px(p.theta1) - 14, mt + 14, "theta1");
    text(os, px(p.theta2) - 14, mt + 14, "theta2");
    text(os, px(0.5 * p.theta1) - 12, py(-0.55), "S1 (-)");
    text(os, px(0.5 * (p.theta1 + p.theta2)) - 12, py(0.85), "S2 (+)");
    text(os, px(0.5 * (p.theta2 + 2 * M_PI)) - 12, py(-0.55), "S3 (-)");
    text(os, ml - 46, py(1.0) + 4, "+1");
    text(os, ml - 46, py(-1.0) + 4, "-1");
    text(os, W / 2 - 40, H - 10, "theta (rad)");

    const char* colors[3] = {"#1f5fbf", "#1fa03f", "#1f5fbf"};
    for (int s = 0; s < 3; ++s) {
        const auto& sec = p.sectors[s];
        os << "<polyline fill=\"none\" stroke=\"" << colors[s] << "\" stroke-width=\"1.5\" points=\"";
        for (size_t k = 0; k < sec.theta_grid.size(); k += 8) {
            os << px(sec.theta_grid[k]) << ',' << py(sec.phi[k]) << ' ';
        }
        os << px(sec.theta_grid.back()) << ',' << py(sec.phi.back());
        os << "\"/>\n";
    }
    os << "</svg>\n";
}

void emit_svg_field(const Grid2D& grid, const std::vector<double>& u, const std::string& path) {
    const int cells = std::min(grid.n, 257);
    const int stride = (grid.n - 1) / (cells - 1);
    const double side = 640.0;
    const double cell = side / cells;
    const int W = static_cast<int>(side) + 60, H = static_cast<int>(side) + 40;

    double amax = 1e-300;
    for (double v : u) amax = std::max(amax, std::abs(v));

    auto os = open_svg(path, W, H);
    for (int ci = 0; ci < cells; ++ci) {
        for (int cj = 0; cj < cells; ++cj) {
            const int i = std::min(grid.n - 1, ci * stride);
            const int j = std::min(grid.n - 1, cj * stride);
            const double v = u[grid.idx(i, j)] / amax;
            os << "<rect x=\"" << 30 + cj * cell << "\" y=\"" << 20 + (cells - 1 - ci) * cell
               << "\" width=\"" << cell + 0.5 << "\" height=\"" << cell + 0.5 << "\" fill=\""
               << heat_color(v) << "\"/>\n";
        }
    }
    // Thin line, with the contact set (u = 0) drawn solid.
    const double ymid = 20 + (cells - 1 - (grid.thin_row / stride)) * cell + cell / 2;
    os << "<line x1=\"30\" y1=\"" << ymid << "\" x2=\"" << 30 + side << "\" y2=\"" << ymid
       << "\" stroke=\"#555\" stroke-dasharray=\"2 3\"/>\n";
    int j_contact_end = -1;
    for (int j = 0; j < grid.n; ++j) {
        if (u[grid.idx(grid.thin_row, j)] <= 0.0) j_contact_end = j;
    }
    if (j_contact_end > 0) {
        const double xe = 30 + (static_cast<double>(j_contact_end) / (grid.n - 1)) * side;
        os << "<line x1=\"30\" y1=\"" << ymid << "\" x2=\"" << xe << "\" y2=\"" << ymid
           << "\" stroke=\"black\" stroke-width=\"3\"/>\n";
    }
    text(os, 30, 14, "field on Q1, thin line contact set in black");
    os << "</svg>\n";
}

void emit_svg_loglog(const ExponentFit& fit, const std::string& path) {
    const int W = 720, H = 420;
    const double ml = 70, mr = 200, mt = 24, mb = 44;

    std::vector<double> lx, ly;
    for (size_t k = 0; k < fit.radii.size(); ++k) {
        lx.push_back(std::log10(fit.radii[k]));
        ly.push_back(std::log10(fit.sup_values[k]));
    }
    const auto [xlo, xhi] = std::minmax_element(lx.begin(), lx.end());
    const auto [ylo, yhi] = std::minmax_element(ly.begin(), ly.end());
    const double xpad = 0.05 * (*xhi - *xlo + 1e-12), ypad = 0.05 * (*yhi - *ylo + 1e-12);
    auto px = [&](double x) { return ml + (W - ml - mr) * (x - *xlo + xpad) / (*xhi - *xlo + 2 * xpad); };
    auto py = [&](double y) { return mt + (H - mt - mb) * (1.0 - (y - *ylo + ypad) / (*yhi - *ylo + 2 * ypad)); };

    auto os = open_svg(path, W, H);
    os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
       << "\" stroke=\"#333\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\""
       << H - mb << "\" stroke=\"#333\"/>\n";
    text(os, W / 2 - 60, H - 10, "log10 r");
    text(os, 8, H / 2, "log10 sup");

    // Fitted line through the mean point with the global slope.
    double mx = 0, my = 0;
    for (size_t k = 0; k < lx.size(); ++k) {
        mx += lx[k];
        my += ly[k];
    }
    mx /= lx.size();
    my /= ly.size();
    const double y0 = my + fit.global_slope * (*xlo - mx), y1 = my + fit.global_slope * (*xhi - mx);
    os << "<line x1=\"" << px(*xlo) << "\" y1=\"" << py(y0) << "\" x2=\"" << px(*xhi) << "\" y2=\""
       << py(y1) << "\" stroke=\"#c33\"/>\n";

    for (size_t k = 0; k < lx.size(); ++k) {
        os << "<circle cx=\"" << px(lx[k]) << "\" cy=\"" << py(ly[k])
           << "\" r=\"3.5\" fill=\"#1f5fbf\"/>\n";
    }

    text(os, W - mr + 12, mt + 12, "slope " + format_double(fit.global_slope));
    text(os, W - mr + 12, mt + 30, "local slopes:");
    for (size_t k = 0; k < fit.local_slopes.size(); ++k) {
        text(os, W - mr + 12, mt + 48 + 16 * static_cast<double>(k),
             format_double(fit.local_slopes[k]));
    }
    os << "</svg>\n";
}

} // namespace thinfree
