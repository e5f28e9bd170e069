#pragma once

// First eigenpair of S_k(D^2 u) = ((|x|^2+delta^2)^s lambda |u|)^k on a grid,
// located as the boundary between convergence and blow-up of the Picard
// iteration for the regularized Dirichlet problem, plus the delta -> 0
// continuation and an inverse power iteration used as a cross-check.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hesseig/grid.hpp"
#include "hesseig/problem.hpp"
#include "hesseig/verify.hpp"

namespace hesseig {

struct EigenDiagnostics {
    /// Picard runs (bisection) or outer iterations (inverse power).
    int solves = 0;
    /// Picard iterations summed over runs, or inner solver iterations.
    int inner_iterations = 0;
    /// Final bracket; both equal lambda for inverse power.
    double bracket_low = 0.0;
    double bracket_high = 0.0;
    /// The convergent endpoint was completed by the geometric-tail sum.
    bool tail_extrapolated = false;
    bool converged = true;
};

struct EigenResult {
    double lambda = 0.0;
    /// Normalized eigenfunction: max |field| = 1, field <= 0.
    GridField field;
    double delta = 0.0;
    /// ||u||_inf of the Picard solution at the convergent bracket end.
    double sup_norm_at_bracket = 0.0;
    /// eigen_residual of the field; NaN when undefined.
    double residual = 0.0;
    std::string method;
    EigenDiagnostics iterations;
};

/// Result of the lambda search: lambda_delta is the bracket midpoint and
/// `result` carries the normalized solution at the last convergent lambda.
struct LambdaSearch {
    double lambda_delta = 0.0;
    EigenResult result;
};

[[nodiscard]] LambdaSearch find_lambda_delta(const ProblemSpec& spec);

/// Relative max-norm residual of S_k(D^2_h u) = (w lambda |u|)^k over interior
/// nodes at least 2h from the origin and the boundary. NaN (0/0) for u = 0.
[[nodiscard]] double eigen_residual(const EigenResult& result, const ProblemSpec& spec);

/// Optional starting pair for inverse_power_iteration.
struct InitialGuess {
    double lambda = 1.0;
    GridField field;
};

/// u_{m+1} solves S_k(D^2 u) = (w lambda_m |u_m|)^k, then lambda_{m+1} =
/// lambda_m / ||u_{m+1}||_inf and u_{m+1} is renormalized. Non-convergence is
/// reported through iterations.converged, not thrown.
[[nodiscard]] EigenResult inverse_power_iteration(const ProblemSpec& spec, int max_outer,
                                                  const std::optional<InitialGuess>& initial = std::nullopt);

struct SweepRow {
    double delta = 0.0;
    double lambda = 0.0;
    double bracket_width = 0.0;
    EstimateReport norms;
    double residual = 0.0;
    double sup_norm_at_bracket = 0.0;
};

struct SweepReport {
    std::vector<SweepRow> rows;
    double lambda1 = 0.0;
    /// "richardson" or "smallest_delta".
    std::string method;
    double exponent_q = 0.0;
    double fit_residual = 0.0;
    bool extrapolation_reliable = false;
    /// "increasing", "decreasing" or "none" as delta shrinks, from sign(s).
    std::string expected_direction;
    int monotonicity_violations = 0;
    double max_relative_spread = 0.0;
    /// Eigenfunction at the smallest delta.
    GridField last_field;

    void write_csv(std::ostream& out) const;
};

/// Runs find_lambda_delta for each delta (strictly decreasing, all > 0),
/// records estimate norms, checks the sign(s) monotonicity rule and
/// extrapolates lambda_1 by Richardson on the last three points.
[[nodiscard]] SweepReport sweep_delta(const ProblemSpec& spec, const std::vector<double>& deltas, int jobs = 1);

struct Extrapolation {
    double lambda1 = 0.0;
    double q = 0.0;
    double fit_residual = 0.0;
    bool reliable = false;
};

/// Fit lambda(delta) = lambda1 + c delta^q through the last three points,
/// q in [0.5, 2]; the residual is measured on the fourth-last point if present.
[[nodiscard]] Extrapolation richardson(const std::vector<double>& deltas, const std::vector<double>& lambdas);

}  // namespace hesseig
