#pragma once

#include <string>

namespace hesseig {

enum class DomainKind { disk, ellipse, square };

/// Convex 2-D domain centred at the origin: disk(R), ellipse with semi-axes
/// (a along x, b along y), or the square [-L/2, L/2]^2 of side L.
class DomainDescriptor {
public:
    static DomainDescriptor disk(double radius);
    static DomainDescriptor ellipse(double a, double b);
    static DomainDescriptor square(double side);

    [[nodiscard]] DomainKind kind() const noexcept { return kind_; }
    [[nodiscard]] double a() const noexcept { return a_; }
    [[nodiscard]] double b() const noexcept { return b_; }

    /// Strict interior membership.
    [[nodiscard]] bool contains(double x, double y) const;

    /// Smallest t > 0 with (x, y) + t (dx, dy) on the boundary, for interior (x, y).
    [[nodiscard]] double ray_hit(double x, double y, double dx, double dy) const;

    /// Euclidean distance from an interior point to the boundary.
    [[nodiscard]] double distance_to_boundary(double x, double y) const;

    [[nodiscard]] double half_extent_x() const noexcept;
    [[nodiscard]] double half_extent_y() const noexcept;
    [[nodiscard]] double area() const noexcept;

    /// Same domain dilated by t > 0.
    [[nodiscard]] DomainDescriptor scaled(double t) const;

    /// "disk(1)", "ellipse(1.2,1)", "square(2)".
    [[nodiscard]] std::string describe() const;

    bool operator==(const DomainDescriptor&) const = default;

private:
    DomainDescriptor(DomainKind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

    DomainKind kind_;
    double a_;
    double b_;
};

/// Parses the `describe()` syntax back into a descriptor.
[[nodiscard]] DomainDescriptor parse_domain(const std::string& text);

}  // namespace hesseig
