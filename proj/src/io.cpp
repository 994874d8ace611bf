#include "kquant/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace kquant {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::PreconditionViolated, "cannot write '" + path + "'");
  out << std::setprecision(17);
  return out;
}

double header_field(const std::string& header, const std::string& key) {
  const std::string tag = " " + key + "=";
  const auto pos = header.find(tag);
  if (pos == std::string::npos) throw Error(ErrorCode::ParseError, "grid header lacks '" + key + "'");
  std::istringstream in(header.substr(pos + tag.size()));
  double value = 0.0;
  if (!(in >> value)) throw Error(ErrorCode::ParseError, "bad value for '" + key + "' in grid header");
  return value;
}

}  // namespace

void write_potential(std::ostream& out, const ReducedPotential& u) {
  const SGrid& g = u.grid();
  const auto old = out.precision(17);
  out << "# grid s_min=" << g.s_min() << " s_max=" << g.s_max() << " n=" << g.size() << '\n';
  for (Index k = 0; k < g.size(); ++k) out << g[k] << ' ' << u[k] << '\n';
  out.precision(old);
}

void write_potential(const std::string& path, const ReducedPotential& u) {
  std::ofstream out = open_out(path);
  write_potential(out, u);
}

ReducedPotential read_potential(std::istream& in, GridPtr grid) {
  std::string header;
  if (!std::getline(in, header) || header.rfind("# grid", 0) != 0) {
    throw Error(ErrorCode::ParseError, "missing '# grid' header line");
  }
  const double s_min = header_field(header, "s_min");
  const double s_max = header_field(header, "s_max");
  const double n_raw = header_field(header, "n");
  if (n_raw < 3 || n_raw != std::floor(n_raw)) throw Error(ErrorCode::ParseError, "grid size must be an integer >= 3");
  const auto n = static_cast<Index>(n_raw);
  GridPtr header_grid = SGrid::make(s_min, s_max, n);
  if (grid) {
    if (!grid->same_as(*header_grid)) throw Error(ErrorCode::GridMismatch, "file grid differs from the requested grid");
  } else {
    grid = header_grid;
  }
  Vector values(n);
  Index k = 0;
  std::string line;
  const double tol = 1e-9 * std::max(1.0, grid->spacing());
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    double s = 0.0;
    double v = 0.0;
    if (!(fields >> s >> v)) throw Error(ErrorCode::ParseError, "expected two columns: '" + line + "'");
    if (k >= n) throw Error(ErrorCode::ParseError, "more rows than the header's n");
    if (std::abs(s - (*grid)[k]) > tol) throw Error(ErrorCode::GridMismatch, "abscissa off the header grid: '" + line + "'");
    values[k++] = v;
  }
  if (k != n) throw Error(ErrorCode::ParseError, "fewer rows than the header's n");
  return ReducedPotential(grid, std::move(values));
}

ReducedPotential read_potential(const std::string& path, GridPtr grid) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::PreconditionViolated, "cannot read '" + path + "'");
  return read_potential(in, std::move(grid));
}

void write_series(const std::string& path, const std::string& x_name, const std::string& y_name,
                  const std::vector<std::pair<double, double>>& points) {
  std::ofstream out = open_out(path);
  out << "# " << x_name << ' ' << y_name << '\n';
  for (const auto& [x, y] : points) out << x << ' ' << y << '\n';
}

}  // namespace kquant
