#include "plap/mesh.hpp"

#include "plap/errors.hpp"
#include "plap/field_io.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace plap {

Grid1D::Grid1D(double x_left, double x_right, int n_cells)
    : x_left_(x_left), x_right_(x_right), n_cells_(n_cells) {
    if (!(x_left < x_right) || !std::isfinite(x_left) || !std::isfinite(x_right))
        throw InvalidDomain("need finite x_left < x_right");
    if (n_cells < 4) throw InvalidDomain("n_cells must be >= 4, got " + std::to_string(n_cells));
    const double width = x_right - x_left;
    h_ = width / n_cells;
    nodes_.resize(static_cast<std::size_t>(n_cells) + 1);
    // width * i / n rather than i * h: doubling n reproduces every coarse node bit-for-bit.
    for (int i = 0; i <= n_cells; ++i) nodes_[i] = x_left + width * i / n_cells;
    nodes_.back() = x_right;
}

bool Grid1D::same_as(const Grid1D& other) const noexcept {
    return x_left_ == other.x_left_ && x_right_ == other.x_right_ && n_cells_ == other.n_cells_;
}

GridPtr build_grid(double x_left, double x_right, int n_cells) {
    return std::make_shared<const Grid1D>(x_left, x_right, n_cells);
}

Field::Field(GridPtr g, double fill) : grid(std::move(g)), values(grid->size(), fill) {}

Field::Field(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != grid->size())
        throw GridMismatch("field has " + std::to_string(values.size()) + " values for " +
                           std::to_string(grid->size()) + " nodes");
}

void require_same_grid(const Field& a, const Field& b, const char* where) {
    if (!a.grid || !b.grid) throw GridMismatch(std::string(where) + ": field without grid");
    if (a.grid != b.grid && !a.grid->same_as(*b.grid))
        throw GridMismatch(std::string(where) + ": fields live on different grids");
    if (a.size() != b.size()) throw GridMismatch(std::string(where) + ": length mismatch");
}

NodeRange SubdomainMask::range() const {
    const auto first = std::find(inside.begin(), inside.end(), true);
    const auto last = std::find(inside.rbegin(), inside.rend(), true);
    return {static_cast<std::size_t>(first - inside.begin()),
            inside.size() - 1 - static_cast<std::size_t>(last - inside.rbegin())};
}

std::size_t SubdomainMask::count() const {
    return static_cast<std::size_t>(std::count(inside.begin(), inside.end(), true));
}

SubdomainMask subdomain_mask(GridPtr grid, double a0, double b0) {
    if (!(grid->x_left() < a0 && a0 < b0 && b0 < grid->x_right()))
        throw InvalidSubdomain("need x_left < a0 < b0 < x_right");
    SubdomainMask mask{grid, std::vector<bool>(grid->size(), false), a0, b0};
    bool any = false;
    for (std::size_t i = 1; i + 1 < grid->size(); ++i) {
        const double x = grid->node(i);
        mask.inside[i] = a0 < x && x < b0;
        any = any || mask.inside[i];
    }
    if (!any) throw InvalidSubdomain("no grid node falls inside (a0, b0)");
    return mask;
}

namespace {

std::vector<double> parse_numbers(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw RangeError("bad number '" + item + "' in coefficient descriptor");
        }
        if (item.find_first_not_of(" \t", used) != std::string::npos)
            throw RangeError("bad number '" + item + "' in coefficient descriptor");
        out.push_back(v);
    }
    return out;
}

}  // namespace

CoefficientDescriptor parse_coefficient(const std::string& text) {
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
    const auto nums = parse_numbers(args);
    if (kind == "constant" && nums.size() == 1) return ConstantCoefficient{nums[0]};
    if (kind == "vanishing" && (nums.size() == 3 || nums.size() == 4)) {
        VanishingCoefficient v{nums[0], nums[1], nums[2]};
        if (nums.size() == 4) v.ramp = nums[3];
        return v;
    }
    throw RangeError("coefficient descriptor must be constant:<c> or "
                     "vanishing:<a0>,<b0>,<level>[,<ramp>], got '" + text + "'");
}

std::string to_string(const CoefficientDescriptor& d) {
    if (const auto* c = std::get_if<ConstantCoefficient>(&d)) return "constant:" + format_double(c->value);
    const auto& v = std::get<VanishingCoefficient>(d);
    return "vanishing:" + format_double(v.a0) + ',' + format_double(v.b0) + ',' +
           format_double(v.level) + ',' + format_double(v.ramp);
}

Field coefficient_field(GridPtr grid, const CoefficientDescriptor& d) {
    Field b(grid);
    if (const auto* c = std::get_if<ConstantCoefficient>(&d)) {
        if (!(c->value >= 0.0)) throw NegativeCoefficient("constant coefficient must be >= 0");
        std::fill(b.values.begin(), b.values.end(), c->value);
        return b;
    }
    const auto& v = std::get<VanishingCoefficient>(d);
    if (!(v.level > 0.0)) throw NegativeCoefficient("outside level must be > 0");
    if (!(v.ramp > 0.0)) throw RangeError("ramp width must be > 0");
    if (!(grid->x_left() < v.a0 && v.a0 < v.b0 && v.b0 < grid->x_right()))
        throw InvalidSubdomain("vanishing set must satisfy x_left < a0 < b0 < x_right");
    for (std::size_t i = 0; i < grid->size(); ++i) {
        const double x = grid->node(i);
        const double dist = std::max({0.0, v.a0 - x, x - v.b0});
        const double t = std::min(1.0, dist / v.ramp);
        b[i] = v.level * t * t;
    }
    return b;
}

std::vector<NodeRange> zero_runs(const Field& b) {
    std::vector<NodeRange> runs;
    const std::size_t n = b.size();
    std::size_t i = 1;
    while (i + 1 < n) {
        if (b[i] == 0.0) {
            std::size_t j = i;
            while (j + 2 < n && b[j + 1] == 0.0) ++j;
            runs.push_back({i, j});
            i = j + 1;
        } else {
            ++i;
        }
    }
    return runs;
}

GridPtr run_grid(const Grid1D& grid, NodeRange range) {
    if (range.first == 0 || range.last + 1 >= grid.size() || range.first > range.last)
        throw InvalidSubdomain("run must consist of interior nodes");
    return build_grid(grid.node(range.first - 1), grid.node(range.last + 1),
                      static_cast<int>(range.count() + 1));
}

}  // namespace plap
