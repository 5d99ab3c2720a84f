#pragma once

#include "plap/mesh.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace plap {

/// Two-column "x,value" CSV with a one-line header. Values are printed with
/// up to 17 significant digits so a read-back reproduces every double exactly.
void write_field_csv(std::ostream& os, const Field& f, const std::string& value_name = "value");
void write_field_csv(const std::string& path, const Field& f, const std::string& value_name = "value");

/// Reads a field CSV back onto `grid`; the x column must match the grid nodes.
Field read_field_csv(std::istream& is, GridPtr grid);
Field read_field_csv(const std::string& path, GridPtr grid);

/// "x,mask" CSV with 0/1 entries.
void write_mask_csv(const std::string& path, const Grid1D& grid, const std::vector<bool>& mask,
                    const std::string& column = "mask");

/// Shortest %g text (at most 17 significant digits) that round-trips through strtod.
std::string format_double(double v);

}  // namespace plap
