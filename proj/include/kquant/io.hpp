#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "kquant/potential.hpp"

namespace kquant {

/// Two-column text format for potentials:
///
///   # grid s_min=-40 s_max=40 n=2001
///   -40 0
///   ...
///
/// One node per line, abscissa then value, both printed with 17 significant
/// digits. Lines starting with '#' after the header are comments.
void write_potential(std::ostream& out, const ReducedPotential& u);
void write_potential(const std::string& path, const ReducedPotential& u);

/// Reads the format above. If `grid` is given, the header must describe the
/// same grid (GridMismatch otherwise); if not, a grid is built from the header.
/// Throws ParseError on malformed input.
ReducedPotential read_potential(std::istream& in, GridPtr grid = nullptr);
ReducedPotential read_potential(const std::string& path, GridPtr grid = nullptr);

/// Plot data: a '# x y' style header line naming the columns, then pairs.
void write_series(const std::string& path, const std::string& x_name, const std::string& y_name,
                  const std::vector<std::pair<double, double>>& points);

}  // namespace kquant
