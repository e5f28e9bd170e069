#pragma once

// Cell quadrature on domain grids: every node owns the square cell of side h
// centred on it, weighted by the area of that cell inside the domain.

#include <memory>
#include <vector>

#include "hesseig/domain.hpp"
#include "hesseig/grid.hpp"
#include "hesseig/stencil.hpp"

namespace hesseig {

/// Area of [xc - h/2, xc + h/2] x [yc - h/2, yc + h/2] inside the domain.
[[nodiscard]] double cell_area_inside(const DomainDescriptor& domain, double xc, double yc, double h);

/// Cut-cell weights for every node of the geometry (zero for cells missing
/// the domain). Areas are exact up to rounding.
[[nodiscard]] std::vector<double> cell_weights(const DomainDescriptor& domain, const GridGeometry& geometry);

/// int over [-h/2, h/2]^2 of |x|^a dx in closed polar form, a > -2.
[[nodiscard]] double origin_cell_power_integral(double h, double a);

/// A grid field together with its domain, discretization and cell weights.
class QuadratureField {
public:
    QuadratureField(GridField field, const DomainDescriptor& domain);

    [[nodiscard]] const GridField& field() const noexcept { return field_; }
    [[nodiscard]] const DomainDescriptor& domain() const noexcept { return disc_->domain(); }
    [[nodiscard]] const Discretization& discretization() const noexcept { return *disc_; }
    /// Unknown-indexed values.
    [[nodiscard]] const Eigen::VectorXd& values() const noexcept { return u_; }
    /// Weight of each unknown's cell.
    [[nodiscard]] const Eigen::VectorXd& weights() const noexcept { return w_; }
    /// Sum over all node cells, including cells whose centre lies outside.
    [[nodiscard]] double total_weight() const noexcept { return total_; }

    /// sum_i w_i g_i <|x|^a>_i with the cell mean of |x|^a taken at 4 x 4
    /// Gauss points; the origin cell integrates |x|^a in closed form.
    [[nodiscard]] double integrate_power_weighted(const Eigen::VectorXd& g, double a) const;
    [[nodiscard]] double integrate(const Eigen::VectorXd& g) const { return w_.dot(g); }

private:
    GridField field_;
    std::shared_ptr<const Discretization> disc_;
    Eigen::VectorXd u_;
    Eigen::VectorXd w_;
    double total_ = 0.0;
};

}  // namespace hesseig
