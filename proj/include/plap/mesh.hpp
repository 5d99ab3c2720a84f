#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace plap {

/// Uniform partition of [x_left, x_right] into n_cells cells. Node 0 and
/// node n_cells are the Dirichlet boundary nodes.
class Grid1D {
public:
    Grid1D(double x_left, double x_right, int n_cells);

    double x_left() const noexcept { return x_left_; }
    double x_right() const noexcept { return x_right_; }
    int n_cells() const noexcept { return n_cells_; }
    double h() const noexcept { return h_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    std::size_t interior_size() const noexcept { return nodes_.size() - 2; }
    double node(std::size_t i) const { return nodes_[i]; }
    std::span<const double> nodes() const noexcept { return nodes_; }

    bool same_as(const Grid1D& other) const noexcept;

private:
    double x_left_;
    double x_right_;
    int n_cells_;
    double h_;
    std::vector<double> nodes_;
};

using GridPtr = std::shared_ptr<const Grid1D>;

/// Throws InvalidDomain unless x_left < x_right and n_cells >= 4.
GridPtr build_grid(double x_left, double x_right, int n_cells);

/// Grid function. Several fields may share one immutable grid.
struct Field {
    GridPtr grid;
    std::vector<double> values;

    Field() = default;
    explicit Field(GridPtr g, double fill = 0.0);
    Field(GridPtr g, std::vector<double> v);

    std::size_t size() const noexcept { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    std::span<const double> span() const noexcept { return values; }
    std::span<double> span() noexcept { return values; }
};

/// Throws GridMismatch when the fields live on different grids.
void require_same_grid(const Field& a, const Field& b, const char* where);

/// Contiguous closed index range [first, last] of grid nodes.
struct NodeRange {
    std::size_t first = 0;
    std::size_t last = 0;
    std::size_t count() const noexcept { return last - first + 1; }
    bool operator==(const NodeRange&) const = default;
};

/// Nodes strictly inside (a_0, b_0) for a compactly contained subinterval.
struct SubdomainMask {
    GridPtr grid;
    std::vector<bool> inside;
    double a0 = 0.0;
    double b0 = 0.0;

    NodeRange range() const;
    std::size_t count() const;
};

SubdomainMask subdomain_mask(GridPtr grid, double a0, double b0);

/// b(x) = c everywhere.
struct ConstantCoefficient {
    double value = 1.0;
};

/// b vanishes on [a0, b0] and rises as level * min(1, (d / ramp)^2) with d
/// the distance to [a0, b0].
struct VanishingCoefficient {
    double a0 = 0.4;
    double b0 = 0.6;
    double level = 1.0;
    double ramp = 0.1;
};

using CoefficientDescriptor = std::variant<ConstantCoefficient, VanishingCoefficient>;

/// Accepts "constant:<c>" and "vanishing:<a0>,<b0>,<level>[,<ramp>]".
CoefficientDescriptor parse_coefficient(const std::string& text);
std::string to_string(const CoefficientDescriptor& d);

Field coefficient_field(GridPtr grid, const CoefficientDescriptor& d);

/// Maximal runs of interior nodes where b == 0 exactly.
std::vector<NodeRange> zero_runs(const Field& b);

/// Nodes of `range` as a standalone grid whose two extra end nodes are the
/// Dirichlet neighbours of the run.
GridPtr run_grid(const Grid1D& grid, NodeRange range);

}  // namespace plap
