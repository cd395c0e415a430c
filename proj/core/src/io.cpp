#include "qpb/io.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

namespace qpb {

std::string csv_number(double v) {
  if (v == 0.0) return "0";
  if (std::isfinite(v) && v == std::nearbyint(v) && std::abs(v) < 1e15) return fmt::format("{:.0f}", v);
  return fmt::format("{:.12g}", v);
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path.string()));
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_number(row[i]);
    out << '\n';
  }
  if (!out) throw std::runtime_error(fmt::format("failed writing '{}'", path.string()));
}

void write_grid_csv(std::ostream& out, const Grid2D<double>& grid) {
  for (int i = 0; i < grid.rows(); ++i) {
    for (int j = 0; j < grid.cols(); ++j) out << (j ? "," : "") << csv_number(grid(i, j));
    out << '\n';
  }
}

}  // namespace qpb
