#include "plap/field_io.hpp"

#include "plap/errors.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace plap {

std::string format_double(double v) {
    char buf[40];
    for (int digits = 1; digits <= 17; ++digits) {
        std::snprintf(buf, sizeof buf, "%.*g", digits, v);
        if (std::strtod(buf, nullptr) == v || std::isnan(v)) break;
    }
    return buf;
}

void write_field_csv(std::ostream& os, const Field& f, const std::string& value_name) {
    os << "x," << value_name << '\n';
    for (std::size_t i = 0; i < f.size(); ++i)
        os << format_double(f.grid->node(i)) << ',' << format_double(f[i]) << '\n';
}

void write_field_csv(const std::string& path, const Field& f, const std::string& value_name) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path + " for writing");
    write_field_csv(os, f, value_name);
}

Field read_field_csv(std::istream& is, GridPtr grid) {
    std::string line;
    if (!std::getline(is, line)) throw ParseError(1, "missing header");
    Field f(grid);
    std::size_t i = 0;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError(lineno, "expected x,value");
        if (i >= f.size()) throw GridMismatch("more rows than grid nodes");
        const double x = std::strtod(line.c_str(), nullptr);
        const double v = std::strtod(line.c_str() + comma + 1, nullptr);
        if (std::abs(x - grid->node(i)) > 1e-12 * (1.0 + std::abs(x)))
            throw GridMismatch("row " + std::to_string(lineno) + " x does not match grid node");
        f[i++] = v;
    }
    if (i != f.size()) throw GridMismatch("fewer rows than grid nodes");
    return f;
}

Field read_field_csv(const std::string& path, GridPtr grid) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open " + path);
    return read_field_csv(is, std::move(grid));
}

void write_mask_csv(const std::string& path, const Grid1D& grid, const std::vector<bool>& mask,
                    const std::string& column) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path + " for writing");
    os << "x," << column << '\n';
    for (std::size_t i = 0; i < grid.size(); ++i)
        os << format_double(grid.node(i)) << ',' << (mask[i] ? 1 : 0) << '\n';
}

}  // namespace plap
