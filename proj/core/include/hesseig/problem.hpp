#pragma once

#include <string>

#include "hesseig/domain.hpp"

namespace hesseig {

enum class MongeAmpereScheme {
    /// det of the centred discrete Hessian, solved by lagged-Jacobian Newton
    /// with a Laplacian fixed-point fallback.
    centered,
    /// min over the axis and diagonal frames of clamped directional products,
    /// solved by nonlinear Gauss-Seidel. Monotone but only consistent when the
    /// Hessian is diagonal in one of the two frames.
    wide_stencil,
};

[[nodiscard]] std::string to_string(MongeAmpereScheme scheme);
[[nodiscard]] MongeAmpereScheme parse_ma_scheme(const std::string& text);

/// Iteration caps and tolerances. Relative tolerances are measured against
/// max(1, ||u||_inf) unless noted.
struct SolverControls {
    double picard_tol = 1e-10;
    int max_picard = 4000;
    double blowup_cap = 1e6;
    int growth_window = 25;
    /// Consecutive iterations the increment-ratio test must agree before a
    /// run is classified early.
    int ratio_confirm = 3;
    /// Non-monotone increments larger than this (relative) are an error.
    double monotone_tol = 1e-6;
    double bracket_tol = 1e-6;
    double lambda_ceiling = 1e6;
    int max_bisections = 100;
    double ma_tol = 1e-11;
    int ma_max_iter = 5000;
    MongeAmpereScheme ma_scheme = MongeAmpereScheme::centered;
    double power_tol = 1e-9;
    int power_max_outer = 200;
    double beta = 1.5;
};

/// Weighted eigenproblem S_k(D^2 u) = (w lambda |u|)^k on a domain, with the
/// regularized weight w = (|x|^2 + delta^2)^s.
struct ProblemSpec {
    int n = 2;
    int k = 1;
    double s = 0.0;
    double delta = 0.0;
    DomainDescriptor domain = DomainDescriptor::disk(1.0);
    double h = 1.0 / 64.0;
    SolverControls controls;

    /// Checks 1 <= k <= n, the weight-exponent floor and delta >= 0.
    void validate() const;
    /// Additionally checks n = 2, k in {1, 2} and delta > 0 when s < 0.
    void validate_grid() const;

    [[nodiscard]] double weight(double r) const;
};

}  // namespace hesseig
