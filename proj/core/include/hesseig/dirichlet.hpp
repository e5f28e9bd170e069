#pragma once

#include <Eigen/Core>

#include "hesseig/grid.hpp"
#include "hesseig/problem.hpp"
#include "hesseig/stencil.hpp"

namespace hesseig {

/// Delta_h u = source on interior nodes, u = 0 outside.
[[nodiscard]] GridField solve_poisson(const ProblemSpec& spec, const GridField& source);

/// Convex discrete solution of det D^2 u = source >= 0, u = 0 outside, with the
/// scheme selected in spec.controls.
[[nodiscard]] GridField solve_monge_ampere_2d(const ProblemSpec& spec, const GridField& source);

/// Discrete det D^2 u (centred Hessian) per unknown.
[[nodiscard]] Eigen::VectorXd discrete_det(const Discretization& disc, const Eigen::VectorXd& u);

/// Wide-stencil operator: min over the two frames of clamped directional products.
[[nodiscard]] Eigen::VectorXd wide_stencil_det(const Discretization& disc, const Eigen::VectorXd& u);

/// Smallest eigenvalue of the centred discrete Hessian over all unknowns; a
/// discretely convex field has this >= -tol.
[[nodiscard]] double min_hessian_eigenvalue(const Discretization& disc, const Eigen::VectorXd& u);

struct MaStats {
    int iterations = 0;
    double increment = 0.0;
    /// Jacobian factorizations performed during the call.
    int factorizations = 0;
    /// The Newton path failed and the Laplacian fixed-point iteration was used.
    bool fell_back = false;
};

/// Lagged Jacobian of the centred scheme, kept between related solves (for
/// example successive Picard iterates) so it need not be refactored each time.
struct MaWorkspace {
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> jacobian_lu;
    bool analyzed = false;
    bool factored = false;
    /// ||u||_inf where the Jacobian was formed; the Jacobian is linear in u,
    /// so steps are rescaled by the norm ratio.
    double reference_norm = 1.0;
};

/// Vector-level Monge-Ampere solve. The centred scheme runs Newton steps with a
/// lagged Jacobian (refactored when the contraction stalls) and falls back to
/// the fixed-point iteration (Delta u)^2 = (u_xx - u_yy)^2 + 4 u_xy^2 + 4 f.
/// `warm` (may be null) seeds the centred solve; the wide-stencil sweep always
/// starts from the zero supersolution.
[[nodiscard]] Eigen::VectorXd monge_ampere_solve(const Discretization& disc, const Eigen::VectorXd& source,
                                                 const SolverControls& controls, const Eigen::VectorXd* warm = nullptr,
                                                 MaStats* stats = nullptr, MaWorkspace* workspace = nullptr);

/// Regularized source [(|x|^2+delta^2)^s (1 - lambda u)]^k per unknown.
[[nodiscard]] Eigen::VectorXd regularized_source(const Discretization& disc, const ProblemSpec& spec, double lambda,
                                                 const Eigen::VectorXd& u);

enum class PicardStatus { converged, blow_up };

struct PicardResult {
    PicardStatus status = PicardStatus::converged;
    /// Fixed point (converged) or the last iterate (blow-up).
    GridField field;
    int iterations = 0;
    /// Last ||u_{m+1} - u_m||_inf.
    double increment = 0.0;
    /// Bounds of the nodewise increment ratio d_{m+1}/d_m at exit. For k = 1
    /// they enclose the spectral radius of the linearised iteration.
    double ratio_low = 0.0;
    double ratio_high = 0.0;
    /// Largest positive nodewise increment seen (relative).
    double monotone_violation = 0.0;
    /// The converged field was completed by summing the geometric tail of the
    /// increments instead of iterating to tolerance.
    bool extrapolated = false;
};

/// Picard iteration u_{m+1} = S^{-1}(source(x, u_m)) from u_0 = 0, where S is
/// the discrete Laplacian (k = 1) or Monge-Ampere operator (k = 2). A
/// workspace may be shared between runs on the same grid to reuse the
/// Monge-Ampere Jacobian.
[[nodiscard]] PicardResult solve_regularized_dirichlet(const ProblemSpec& spec, double lambda,
                                                       MaWorkspace* workspace = nullptr);

}  // namespace hesseig
