#pragma once

// Elementary symmetric polynomials, Garding cones and the derived quantities
// used by the k-Hessian operator S_k(D^2 u) = sigma_k(lambda(D^2 u)).

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace hesseig {

/// Eigenvalues (lambda_1, ..., lambda_n) of a symmetric matrix. Always
/// non-empty with finite entries.
class SpectrumPoint {
public:
    SpectrumPoint(std::initializer_list<double> values);
    explicit SpectrumPoint(std::vector<double> values);

    [[nodiscard]] int size() const noexcept { return static_cast<int>(values_.size()); }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

private:
    std::vector<double> values_;
};

/// Largest k with sigma_1, ..., sigma_k all strictly positive (0 if sigma_1 <= 0).
struct ConeMembership {
    int k_max = 0;

    [[nodiscard]] bool in_cone(int k) const noexcept { return k <= k_max; }
};

/// Dense symmetric n x n matrix; only the upper triangle is stored, so
/// symmetry holds by construction.
class SymMatrix {
public:
    explicit SymMatrix(int n);

    static SymMatrix identity(int n);
    static SymMatrix diagonal(std::span<const double> d);
    /// 2x2 convenience constructor [[a, b], [b, c]].
    static SymMatrix from_2x2(double a, double b, double c);

    [[nodiscard]] int dim() const noexcept { return n_; }
    [[nodiscard]] double operator()(int i, int j) const;
    void set(int i, int j, double v);

    [[nodiscard]] SymMatrix scaled(double c) const;

private:
    [[nodiscard]] std::size_t index(int i, int j) const;

    int n_;
    std::vector<double> upper_;
};

/// Eigen-decomposition produced by cyclic Jacobi rotations. `vectors` is
/// column-major: column j is the unit eigenvector of values[j].
struct SymEigenDecomposition {
    std::vector<double> values;
    std::vector<double> vectors;
};

/// Binomial coefficient C(n, k) as a double; 0 outside 0 <= k <= n.
[[nodiscard]] double binomial(int n, int k);

/// All elementary symmetric values e_0 = 1, e_1, ..., e_n via the O(n^2)
/// prefix recurrence e_j <- e_j + x e_{j-1}.
[[nodiscard]] std::vector<double> elementary_symmetric(std::span<const double> lambda);

/// sigma_k(lambda). Accepts 0 <= k <= n (sigma_0 = 1); throws ParameterError otherwise.
[[nodiscard]] double sigma(const SpectrumPoint& lambda, int k);

/// sigma_{k;i}(lambda): sigma_k with lambda_i removed (zero-based i).
/// Satisfies sigma_k = sigma_{k;i} + lambda_i sigma_{k-1;i}.
[[nodiscard]] double sigma_partial(const SpectrumPoint& lambda, int k, std::size_t i);

/// Exact (tolerance-free) classification of lambda into the nested cones Gamma_k.
[[nodiscard]] ConeMembership cone_classify(const SpectrumPoint& lambda);

/// Cyclic Jacobi eigen-decomposition; off-diagonal threshold 1e-14 relative
/// to the Frobenius norm. Throws NumericalError if the sweep cap is hit.
[[nodiscard]] SymEigenDecomposition jacobi_eigen(const SymMatrix& a);

/// S_k(H) = sigma_k(lambda(H)).
[[nodiscard]] double hessian_sk(const SymMatrix& h, int k);

/// S_k^{ij}(H) = dS_k/dh_ij, assembled in the eigenbasis as
/// Q diag(sigma_{k-1;i}(lambda)) Q^T. Requires lambda(H) in Gamma_k.
[[nodiscard]] SymMatrix linearized_coeffs(const SymMatrix& h, int k);

/// rho_k(xi) = (sigma_k(xi) / C(n,k))^{1/k}; requires xi in Gamma_k.
[[nodiscard]] double rho_k(const SpectrumPoint& xi, int k);

/// rho_k^*(A) = inf{ lambda(A).xi / n : xi in Gamma_k, rho_k(xi) >= 1 }.
/// Solved as the concave program max log sigma_k(xi) subject to
/// lambda(A).xi = 1 by Newton steps with backtracking inside the cone, giving
/// rho_k^* = 1 / (n rho_k(xi*)); `tol` bounds the Newton decrement. Throws
/// ConeError when A is not in the interior of the dual cone and
/// NumericalError on hitting the iteration cap.
[[nodiscard]] double rho_k_star(const SymMatrix& a, int k, double tol = 1e-10);
[[nodiscard]] double rho_k_star(const SpectrumPoint& a, int k, double tol = 1e-10);

}  // namespace hesseig
