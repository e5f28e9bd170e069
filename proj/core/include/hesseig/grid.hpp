#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hesseig/domain.hpp"

namespace hesseig {

/// Uniform node lattice x_i = x0 + i h, y_j = y0 + j h, node index j * nx + i.
/// Grids built from a domain always place a node at the origin.
struct GridGeometry {
    int nx = 0;
    int ny = 0;
    double h = 0.0;
    double x0 = 0.0;
    double y0 = 0.0;

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(nx) * ny; }
    [[nodiscard]] double x(int i) const noexcept { return x0 + i * h; }
    [[nodiscard]] double y(int j) const noexcept { return y0 + j * h; }
    [[nodiscard]] int index(int i, int j) const noexcept { return j * nx + i; }

    bool operator==(const GridGeometry&) const = default;
};

/// Smallest origin-centred lattice covering the domain with one spare ring.
[[nodiscard]] GridGeometry covering_geometry(const DomainDescriptor& domain, double h);

/// Node values on a grid. Nodes outside the domain (mask 0) carry the
/// Dirichlet boundary value.
class GridField {
public:
    GridField() = default;
    GridField(GridGeometry geometry, std::vector<std::uint8_t> inside, double boundary_value = 0.0);

    [[nodiscard]] const GridGeometry& geometry() const noexcept { return geometry_; }
    [[nodiscard]] bool inside(std::size_t node) const { return inside_[node] != 0; }
    [[nodiscard]] const std::vector<std::uint8_t>& mask() const noexcept { return inside_; }
    [[nodiscard]] double boundary_value() const noexcept { return boundary_value_; }

    [[nodiscard]] std::vector<double>& values() noexcept { return values_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
    double& operator[](std::size_t node) { return values_[node]; }
    double operator[](std::size_t node) const { return values_[node]; }

    /// Max |u| over interior nodes.
    [[nodiscard]] double sup_norm() const;
    /// Min u over interior nodes.
    [[nodiscard]] double min_value() const;

    /// "x,y,u" rows for interior nodes.
    void write_csv(std::ostream& out) const;
    void write_csv(const std::string& path) const;

    /// Little-endian binary snapshot: magic "HSGF", u32 version, i32 nx, i32 ny,
    /// f64 h, x0, y0, boundary value, LSB-first packed mask, f64 values.
    void write_binary(std::ostream& out) const;
    void write_binary(const std::string& path) const;
    [[nodiscard]] static GridField read_binary(std::istream& in);
    [[nodiscard]] static GridField read_binary(const std::string& path);

private:
    GridGeometry geometry_;
    std::vector<std::uint8_t> inside_;
    std::vector<double> values_;
    double boundary_value_ = 0.0;
};

}  // namespace hesseig
