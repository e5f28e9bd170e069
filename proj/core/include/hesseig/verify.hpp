#pragma once

// Numerical checks of a-priori estimates, regularity, fundamental solutions,
// Wolff potentials, scaling and the linearized eigenproblem.

#include <functional>
#include <string>
#include <vector>

#include "hesseig/grid.hpp"
#include "hesseig/problem.hpp"

namespace hesseig {

struct EstimateReport {
    /// sup |x| |Du|
    double K = 0.0;
    /// sup |x|^{2 beta} |D^2 u|
    double L_beta = 0.0;
    double beta = 1.5;
    /// sup |Du|
    double K_hat = 0.0;
    /// sup |D^2 u| (spectral norm)
    double L_hat = 0.0;
    std::string field_id;
    double delta = 0.0;
    int nodes = 0;
};

/// Central differences on interior nodes whose full 3x3 stencil lies inside
/// the domain at least 2h from the boundary; for s < 0 a 2h collar around the
/// origin is excluded as well.
[[nodiscard]] EstimateReport estimate_norms(const GridField& u, const ProblemSpec& spec, double beta,
                                            const std::string& field_id = "");

/// w_k(|x|): |x|^{2-n/k} (k > n/2), log|x| (k = n/2), -|x|^{2-n/k} (k < n/2).
/// At |x| = 0 with k <= n/2 returns -infinity.
[[nodiscard]] double fundamental_solution(double x_norm, int n, int k);

/// max over radii of |S_k(D^2 w_k)| evaluated by the radial formula with
/// analytic derivatives.
[[nodiscard]] double fundamental_residual(int n, int k, const std::vector<double>& radii);

/// W_k(0, r) = int_0^r (mu(B_t) / t^{n-2k})^{1/k} dt / t for n/2 < k < n, by
/// Simpson's rule in log t with a power-law tail correction. Returns +infinity
/// when the integrand does not decay towards t = 0.
[[nodiscard]] double wolff_potential(const std::function<double(double)>& mu_of_ball, int n, int k, double r);

struct HolderFit {
    double alpha = 0.0;
    /// Realized radii (largest |x| of a node inside each ball).
    std::vector<double> radii;
    std::vector<double> oscillations;
    /// RMS residual of the log-log fit.
    double residual = 0.0;
};

/// Least-squares slope of log osc_{B_r}(u) against log r over the dyadic radii
/// 2^{-j} R / 4, j = 0..5 (R the inradius), keeping radii whose annulus holds
/// at least 8 nodes; at least 5 are required.
[[nodiscard]] HolderFit holder_probe(const GridField& u, const ProblemSpec& spec);

struct ScalingCheck {
    double ratio = 0.0;
    double expected = 0.0;
    double lambda_base = 0.0;
    double lambda_scaled = 0.0;
};

/// Solves on Omega and t*Omega (delta scaled by t, grid spacing unchanged) and
/// compares the eigenvalue ratio with t^{-2(1+s)}.
[[nodiscard]] ScalingCheck scaling_law_check(const ProblemSpec& spec, double t);

struct LinearizedEigen {
    double lambda_phi = 0.0;
    /// Principal eigenvector is one-signed on the mask.
    bool one_signed = false;
    int iterations = 0;
};

/// Principal eigenvalue of F^{ij}(D^2_h u) d_ij v = -lambda w v with the
/// coefficients of F = S_k^{1/k} frozen at u, by inverse power iteration.
[[nodiscard]] LinearizedEigen linearized_eigen(const GridField& u, const ProblemSpec& spec);

struct BoundarySlope {
    /// min over boundary-adjacent nodes of (-u) / dist(x, boundary).
    double theta = 0.0;
    double max_ratio = 0.0;
    int nodes = 0;
    /// u vanishes identically on the boundary ring.
    bool degenerate = false;
};

[[nodiscard]] BoundarySlope boundary_slope_check(const GridField& u, const ProblemSpec& spec);

}  // namespace hesseig
