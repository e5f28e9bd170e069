#pragma once

// Finite-difference operators on a domain grid. Second differences are taken
// along the two axes and the two diagonals; where a neighbour falls outside the
// domain the arm is shortened to the exact boundary crossing (Shortley-Weller),
// with the Dirichlet value zero there.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <array>
#include <memory>
#include <vector>

#include "hesseig/domain.hpp"
#include "hesseig/grid.hpp"

namespace hesseig {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Second-difference directions: x, y, (1,1) and (1,-1).
enum class Line { x = 0, y = 1, diag = 2, anti = 3 };

struct DiscreteHessian {
    Eigen::VectorXd xx;
    Eigen::VectorXd yy;
    Eigen::VectorXd xy;
};

/// Interior unknowns of a domain grid with their difference operators. Vectors
/// passed to the operators are indexed by unknown, not by node.
class Discretization {
public:
    Discretization(const DomainDescriptor& domain, double h);

    [[nodiscard]] const DomainDescriptor& domain() const noexcept { return domain_; }
    [[nodiscard]] const GridGeometry& geometry() const noexcept { return geometry_; }
    [[nodiscard]] double h() const noexcept { return geometry_.h; }
    [[nodiscard]] int unknowns() const noexcept { return static_cast<int>(nodes_.size()); }

    /// Node index of unknown u.
    [[nodiscard]] int node(int u) const { return nodes_[static_cast<std::size_t>(u)]; }
    /// Unknown index of a node, -1 outside the domain.
    [[nodiscard]] int unknown_at(int node) const { return unknown_of_[static_cast<std::size_t>(node)]; }
    /// Unknown at the origin.
    [[nodiscard]] int origin() const noexcept { return origin_; }

    [[nodiscard]] double x(int u) const { return xs_[static_cast<std::size_t>(u)]; }
    [[nodiscard]] double y(int u) const { return ys_[static_cast<std::size_t>(u)]; }
    [[nodiscard]] double radius(int u) const { return rs_[static_cast<std::size_t>(u)]; }
    [[nodiscard]] const Eigen::VectorXd& radii() const noexcept { return rs_; }
    [[nodiscard]] double boundary_distance(int u) const { return dist_[static_cast<std::size_t>(u)]; }

    /// Arm lengths (Euclidean) and neighbour unknowns (-1 = boundary) in the
    /// eight directions E, W, N, S, NE, SW, SE, NW.
    [[nodiscard]] double arm(int u, int dir) const { return arms_[static_cast<std::size_t>(u)][static_cast<std::size_t>(dir)]; }
    [[nodiscard]] int neighbor(int u, int dir) const { return nbrs_[static_cast<std::size_t>(u)][static_cast<std::size_t>(dir)]; }

    [[nodiscard]] const SparseMatrix& second_difference(Line line) const { return d2_[static_cast<int>(line)]; }
    /// Shortley-Weller five-point Laplacian (M-matrix up to sign).
    [[nodiscard]] const SparseMatrix& laplacian() const noexcept { return lap_; }

    /// Solves laplacian() * u = rhs with the factorization computed at construction.
    [[nodiscard]] Eigen::VectorXd solve_laplacian(const Eigen::VectorXd& rhs) const;

    /// xx = D_x u, yy = D_y u, xy = (D_diag u - D_anti u) / 2.
    [[nodiscard]] DiscreteHessian hessian(const Eigen::VectorXd& u) const;

    [[nodiscard]] std::vector<std::uint8_t> mask() const;
    [[nodiscard]] GridField to_field(const Eigen::VectorXd& u) const;
    [[nodiscard]] Eigen::VectorXd from_field(const GridField& field) const;

private:
    DomainDescriptor domain_;
    GridGeometry geometry_;
    std::vector<int> nodes_;
    std::vector<int> unknown_of_;
    int origin_ = -1;
    Eigen::VectorXd xs_, ys_, rs_, dist_;
    std::vector<std::array<double, 8>> arms_;
    std::vector<std::array<int, 8>> nbrs_;
    std::array<SparseMatrix, 4> d2_;
    SparseMatrix lap_;
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lap_lu_;
};

/// Shared discretization for (domain, h); built once and cached.
[[nodiscard]] std::shared_ptr<const Discretization> discretization_for(const DomainDescriptor& domain, double h);

}  // namespace hesseig
