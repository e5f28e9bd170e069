#pragma once

// Energy functionals of the k-Hessian eigenproblem on grids (n = 2) and on
// radial profiles (general n), the truncated source f_M and the critical
// embedding exponent.

#include "hesseig/problem.hpp"
#include "hesseig/quadrature.hpp"
#include "hesseig/radial.hpp"

namespace hesseig {

struct IkValue {
    /// int (-u) S_k(D^2 u)
    double value = 0.0;
    /// (1/k) int u_i u_j S_k^{ij}, the integrated-by-parts form.
    double by_parts = 0.0;
};

/// Throws ConeError when u > 0 somewhere (beyond 1e-8 of max|u|) or the
/// discrete Hessian leaves the closed cone
/// (relative tolerance 1e-8 of the largest Hessian entry). k in {1, 2}.
[[nodiscard]] IkValue functional_Ik(const QuadratureField& u, int k);

/// (int |x|^{2sk} |u|^{p+1})^{1/(p+1)}; requires 2 + 2sk > 0.
[[nodiscard]] double weighted_norm(const QuadratureField& u, double p, double s, int k);

/// I_k(u) / ||u||_{L^{k+1}(|x|^{2sk})}^{k+1}.
[[nodiscard]] double rayleigh_quotient(const QuadratureField& u, const ProblemSpec& spec);

/// f_M(z) = (1+|z|)^p for |z| <= M, |z|^{-2} for |z| >= 2M; on (M, 2M) log f_M
/// is the cubic Hermite interpolant in log|z| matching value and slope at both
/// ends. F_M(u) = int_0^{|u|} f_M.
class TruncatedSource {
public:
    /// p >= 0, M > 1.
    TruncatedSource(double M, double p);

    [[nodiscard]] double M() const noexcept { return M_; }
    [[nodiscard]] double p() const noexcept { return p_; }
    [[nodiscard]] double f(double z) const;
    [[nodiscard]] double F(double u) const;

private:
    double M_;
    double p_;
    double F_at_M_;
    double F_at_2M_;
};

/// J_{M,delta}(u) = int (-u) S_k / (k+1) - (|x|^2+delta^2)^{sk} F_M(u),
/// p in [0, k).
[[nodiscard]] double functional_J(const QuadratureField& u, double M, double delta, const ProblemSpec& spec,
                                  double p);

/// Radial counterparts on B_R in R^n; the profile's r grid must be uniform.
[[nodiscard]] IkValue functional_Ik(const RadialProfile& u, int n, int k);
[[nodiscard]] double weighted_norm(const RadialProfile& u, int n, double p, double s, int k);
[[nodiscard]] double rayleigh_quotient(const RadialProfile& u, int n, int k, double s);
[[nodiscard]] double functional_J(const RadialProfile& u, int n, int k, double s, double M, double delta, double p);

enum class ExponentKind {
    finite,
    /// Finite but not given by a formula (2k = n).
    finite_unspecified,
    infinite,
};

struct CriticalExponent {
    ExponentKind kind = ExponentKind::finite;
    /// Set only for ExponentKind::finite.
    double value = 0.0;
};

[[nodiscard]] CriticalExponent critical_exponent(int n, int k, double s);

}  // namespace hesseig
