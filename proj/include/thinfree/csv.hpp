#pragma once

#include "thinfree/analysis.hpp"
#include "thinfree/exponents.hpp"
#include "thinfree/profiles.hpp"
#include "thinfree/solver.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace thinfree {

/// Shortest decimal representation that round-trips to the same double.
/// Keeps golden CSV files stable across runs and platforms.
std::string format_double(double v);

void write_alpha_csv(std::ostream& os, const std::vector<ExponentResult>& rows);
void write_angular_csv(std::ostream& os, const BlowupProfile& p);
void write_field_csv(std::ostream& os, const Grid2D& grid, const std::vector<double>& u);
void write_fit_csv(std::ostream& os, const ExponentFit& fit);

/// Read a field CSV (x1, x2, u row-major on a full square grid) back into a
/// grid and values. Throws ParameterError on malformed input.
std::pair<Grid2D, std::vector<double>> read_field_csv(const std::string& path);

} // namespace thinfree
