#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "qpb/grid2d.hpp"

namespace qpb {

// Shortest text of at least 12 significant digits; integers stay integral.
std::string csv_number(double v);

// Writes header + rows with LF endings; throws std::runtime_error on I/O failure.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

void write_grid_csv(std::ostream& out, const Grid2D<double>& grid);

}  // namespace qpb
