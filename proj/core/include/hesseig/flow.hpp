#pragma once

// Descent flow u_t = log S_k(D^2 u) - log psi(x, u) for the truncated
// functional J_{M,delta}, psi = (|x|^2+delta^2)^{sk} f_M(u), with u = 0 on the
// boundary. Steps that leave the cone or raise J are retried with half the
// time step.

#include <iosfwd>
#include <string>
#include <vector>

#include "hesseig/errors.hpp"
#include "hesseig/problem.hpp"
#include "hesseig/quadrature.hpp"
#include "hesseig/radial.hpp"

namespace hesseig {

enum class FlowScheme {
    /// u += dt g(u)
    explicit_euler,
    /// (I - dt A) du = dt g(u) with A the linearization of g at u.
    linearly_implicit,
};

[[nodiscard]] std::string to_string(FlowScheme scheme);
[[nodiscard]] FlowScheme parse_flow_scheme(const std::string& text);

struct FlowOptions {
    double M = 10.0;
    double p = 0.0;
    double t_end = 10.0;
    /// Initial step; 0 picks h^2 / 4 (grid) or dr^2 / 4 (radial).
    double dt0 = 0.0;
    double dt_max = 1.0;
    double dt_min = 1e-12;
    int max_steps = 100000;
    /// Stop early once the relative residual falls below this.
    double residual_tol = 1e-10;
    /// Accepted steps may raise J by at most this much.
    double descent_slack = 1e-10;
    FlowScheme scheme = FlowScheme::linearly_implicit;
};

struct FlowSample {
    double t = 0.0;
    double J = 0.0;
    double dt = 0.0;
    /// ||S_k - psi|| / ||psi|| in the cell-weighted L2 norm.
    double residual = 0.0;
};

struct FlowTrajectory {
    /// One row per accepted step, starting with the initial state (dt = 0).
    std::vector<FlowSample> samples;
    int accepted = 0;
    int rejected = 0;

    /// "t,J,dt,residual"
    void write_csv(std::ostream& out) const;
};

/// Grid flow end state.
struct FlowState {
    GridField u;
    double t = 0.0;
    double J = 0.0;
    double dt = 0.0;
};

struct GridFlowResult {
    FlowState state;
    FlowTrajectory trajectory;
};

/// Radial flow end state on B_R in R^n.
struct RadialFlowResult {
    RadialProfile u;
    double t = 0.0;
    double J = 0.0;
    double dt = 0.0;
    FlowTrajectory trajectory;
};

/// Raised when the step falls below dt_min; carries the trajectory so far.
class FlowStiffnessError : public NumericalError {
public:
    FlowStiffnessError(const std::string& what, FlowTrajectory trajectory)
        : NumericalError(what), trajectory_(std::move(trajectory)) {}

    [[nodiscard]] const FlowTrajectory& trajectory() const noexcept { return trajectory_; }

private:
    FlowTrajectory trajectory_;
};

/// Grid flow for k in {1, 2}; needs spec.delta > 0 and an admissible u0.
[[nodiscard]] GridFlowResult gradient_flow(const QuadratureField& u0, const ProblemSpec& spec,
                                           const FlowOptions& options);

/// Radial flow for general 1 <= k <= n on a uniform r grid; u0.u(R) must be 0
/// and u0.du is ignored (derivatives are taken by differences of u).
[[nodiscard]] RadialFlowResult gradient_flow_radial(const RadialProfile& u0, int n, int k, double s, double delta,
                                                    const FlowOptions& options);

}  // namespace hesseig
