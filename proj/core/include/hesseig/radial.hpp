#pragma once

// Radially symmetric ground truth on balls B_R in R^n: the radial form of
// S_k, a marching/bisection shooter for the weighted eigenproblem, and the
// closed-form Bessel eigenvalue for k = 1.

#include <vector>

namespace hesseig {

/// Sampled radial function on [0, R]. u <= 0 and non-decreasing, du >= 0.
struct RadialProfile {
    double R = 0.0;
    std::vector<double> r;
    std::vector<double> u;
    std::vector<double> du;
};

struct RadialEigen {
    double lambda1 = 0.0;
    RadialProfile profile;
    double bisection_width = 0.0;
    /// First-zero radius was observed to decrease in lambda on every sampled
    /// bracket point.
    bool monotone_bracket = true;
    /// Fitted exponent of u'(r) ~ r^gamma over the innermost samples; recorded
    /// for diagnostics only.
    double origin_slope_exponent = 0.0;
};

/// Options for the radial shooter. `steps` is the number of uniform marching
/// steps on [0, R].
struct ShootOptions {
    int steps = 4096;
    int max_bisections = 200;
    int max_expansions = 20;
};

/// S_k(D^2 u) for radial u with u'(r) = du, u''(r) = ddu:
/// C(n-1,k) (du/r)^k + C(n-1,k-1) ddu (du/r)^{k-1}.
[[nodiscard]] double radial_sk(double du, double ddu, double r, int n, int k);

/// Marches u(0) = -1 outward for fixed lambda through the integral form
///   u'(r) = [ (k / C(n-1,k-1)) r^{k-n} int_0^r t^{n-1} (t^{2s} lambda (-u))^k dt ]^{1/k}
/// using product integration that treats the power weights exactly.
[[nodiscard]] RadialProfile march_radial(int n, int k, double s, double R, double lambda, int steps);

/// First eigenvalue on B_R by bisection on lambda until u(R) = 0 (relative
/// bracket width <= tol).
[[nodiscard]] RadialEigen shoot_eigen(int n, int k, double s, double R, double tol,
                                      const ShootOptions& options = {});

/// Bessel function of the first kind J_nu(x), nu > -1, x >= 0, by power series.
[[nodiscard]] double bessel_j(double nu, double x);

/// First positive zero of J_nu, located by scanning and bisection to relative tol.
[[nodiscard]] double bessel_j_first_zero(double nu, double tol = 1e-14);

/// Closed-form k = 1 eigenvalue: ((1+s) j_{nu,1})^2 / R^{2(1+s)}, nu = (n-2)/(2(1+s)).
[[nodiscard]] double bessel_weighted_eigen(int n, double s, double R, double tol = 1e-14);

/// Admissibility bound on the weight exponent: s must exceed -min(1, n/(2k)).
[[nodiscard]] double weight_exponent_floor(int n, int k);

}  // namespace hesseig
