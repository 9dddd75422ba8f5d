#pragma once

#include "thinfree/analysis.hpp"
#include "thinfree/profiles.hpp"

#include <string>

namespace thinfree {

/// Angular profile phi(theta) with the sector interfaces theta1, theta2
/// marked and the three sectors labeled.
void emit_svg_angular(const BlowupProfile& p, const std::string& path);

/// Heatmap of a grid field with the thin-line contact set overlaid.
void emit_svg_field(const Grid2D& grid, const std::vector<double>& u, const std::string& path);

/// Log-log growth plot: sup values, fitted line, and the local slopes listed
/// beside the data.
void emit_svg_loglog(const ExponentFit& fit, const std::string& path);

} // namespace thinfree
