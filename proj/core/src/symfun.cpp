#include "hesseig/symfun.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <string>

#include "hesseig/errors.hpp"

namespace hesseig {

namespace {

void require_order(int n, int k, int k_min = 0)
{
    if (k < k_min || k > n) {
        throw ParameterError("order k=" + std::to_string(k) + " outside [" + std::to_string(k_min) +
                             ", " + std::to_string(n) + "]");
    }
}

// sigma_j of lambda with entry `skip` removed, for j = 0..n-1.
std::vector<double> elementary_symmetric_without(std::span<const double> lambda, std::size_t skip)
{
    const std::size_t n = lambda.size();
    std::vector<double> e(n, 0.0);
    e[0] = 1.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == skip) {
            continue;
        }
        ++used;
        for (std::size_t j = used; j >= 1; --j) {
            e[j] += lambda[i] * e[j - 1];
        }
    }
    return e;
}

}  // namespace

SpectrumPoint::SpectrumPoint(std::initializer_list<double> values) : SpectrumPoint(std::vector<double>(values)) {}

SpectrumPoint::SpectrumPoint(std::vector<double> values) : values_(std::move(values))
{
    if (values_.empty()) {
        throw ParameterError("spectrum must have at least one entry");
    }
    if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); })) {
        throw ParameterError("spectrum entries must be finite");
    }
}

SymMatrix::SymMatrix(int n) : n_(n), upper_(static_cast<std::size_t>(n) * (n + 1) / 2, 0.0)
{
    if (n < 1) {
        throw ParameterError("matrix dimension must be positive");
    }
}

SymMatrix SymMatrix::identity(int n)
{
    SymMatrix m(n);
    for (int i = 0; i < n; ++i) {
        m.set(i, i, 1.0);
    }
    return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> d)
{
    SymMatrix m(static_cast<int>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) {
        m.set(static_cast<int>(i), static_cast<int>(i), d[i]);
    }
    return m;
}

SymMatrix SymMatrix::from_2x2(double a, double b, double c)
{
    SymMatrix m(2);
    m.set(0, 0, a);
    m.set(0, 1, b);
    m.set(1, 1, c);
    return m;
}

std::size_t SymMatrix::index(int i, int j) const
{
    if (i > j) {
        std::swap(i, j);
    }
    if (i < 0 || j >= n_) {
        throw ParameterError("matrix index out of range");
    }
    // Row-major packed upper triangle.
    return static_cast<std::size_t>(i) * n_ - static_cast<std::size_t>(i) * (i - 1) / 2 + (j - i);
}

double SymMatrix::operator()(int i, int j) const { return upper_[index(i, j)]; }

void SymMatrix::set(int i, int j, double v) { upper_[index(i, j)] = v; }

SymMatrix SymMatrix::scaled(double c) const
{
    SymMatrix m = *this;
    for (double& v : m.upper_) {
        v *= c;
    }
    return m;
}

double binomial(int n, int k)
{
    if (k < 0 || k > n) {
        return 0.0;
    }
    k = std::min(k, n - k);
    double c = 1.0;
    for (int i = 1; i <= k; ++i) {
        c = c * (n - k + i) / i;
    }
    return std::round(c);
}

std::vector<double> elementary_symmetric(std::span<const double> lambda)
{
    const std::size_t n = lambda.size();
    std::vector<double> e(n + 1, 0.0);
    e[0] = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j >= 1; --j) {
            e[j] += lambda[i] * e[j - 1];
        }
    }
    return e;
}

double sigma(const SpectrumPoint& lambda, int k)
{
    require_order(lambda.size(), k);
    if (k == 0) {
        return 1.0;
    }
    return elementary_symmetric(lambda.values())[static_cast<std::size_t>(k)];
}

double sigma_partial(const SpectrumPoint& lambda, int k, std::size_t i)
{
    const int n = lambda.size();
    require_order(n, k);
    if (i >= static_cast<std::size_t>(n)) {
        throw ParameterError("index " + std::to_string(i) + " outside spectrum of size " + std::to_string(n));
    }
    if (k == n) {
        return 0.0;
    }
    return elementary_symmetric_without(lambda.values(), i)[static_cast<std::size_t>(k)];
}

ConeMembership cone_classify(const SpectrumPoint& lambda)
{
    const auto e = elementary_symmetric(lambda.values());
    ConeMembership m;
    for (std::size_t j = 1; j < e.size(); ++j) {
        if (!(e[j] > 0.0)) {
            break;
        }
        m.k_max = static_cast<int>(j);
    }
    return m;
}

SymEigenDecomposition jacobi_eigen(const SymMatrix& input)
{
    const int n = input.dim();
    std::vector<double> a(static_cast<std::size_t>(n) * n);
    auto at = [&](std::vector<double>& m, int i, int j) -> double& { return m[static_cast<std::size_t>(j) * n + i]; };
    std::vector<double> v(a.size(), 0.0);
    double frob = 0.0;
    for (int i = 0; i < n; ++i) {
        at(v, i, i) = 1.0;
        for (int j = 0; j < n; ++j) {
            at(a, i, j) = input(i, j);
            frob += input(i, j) * input(i, j);
        }
    }
    frob = std::sqrt(frob);
    const double threshold = 1e-14 * frob;

    constexpr int max_sweeps = 100;
    for (int sweep = 0; sweep <= max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                off += at(a, p, q) * at(a, p, q);
            }
        }
        if (std::sqrt(off) <= threshold) {
            SymEigenDecomposition out;
            out.values.resize(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                out.values[static_cast<std::size_t>(i)] = at(a, i, i);
            }
            out.vectors = std::move(v);
            return out;
        }
        if (sweep == max_sweeps) {
            break;
        }
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(a, p, q);
                if (std::abs(apq) <= 1e-300) {
                    continue;
                }
                const double theta = (at(a, q, q) - at(a, p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int r = 0; r < n; ++r) {
                    const double arp = at(a, r, p);
                    const double arq = at(a, r, q);
                    at(a, r, p) = c * arp - s * arq;
                    at(a, r, q) = s * arp + c * arq;
                }
                for (int r = 0; r < n; ++r) {
                    const double apr = at(a, p, r);
                    const double aqr = at(a, q, r);
                    at(a, p, r) = c * apr - s * aqr;
                    at(a, q, r) = s * apr + c * aqr;
                }
                for (int r = 0; r < n; ++r) {
                    const double vrp = at(v, r, p);
                    const double vrq = at(v, r, q);
                    at(v, r, p) = c * vrp - s * vrq;
                    at(v, r, q) = s * vrp + c * vrq;
                }
            }
        }
    }
    throw NumericalError("Jacobi eigen-decomposition did not converge");
}

double hessian_sk(const SymMatrix& h, int k)
{
    require_order(h.dim(), k);
    return sigma(SpectrumPoint(jacobi_eigen(h).values), k);
}

SymMatrix linearized_coeffs(const SymMatrix& h, int k)
{
    const int n = h.dim();
    require_order(n, k, 1);
    const auto eig = jacobi_eigen(h);
    const SpectrumPoint lambda(eig.values);
    if (!cone_classify(lambda).in_cone(k)) {
        throw ConeError("matrix is not k-admissible for k=" + std::to_string(k));
    }
    std::vector<double> d(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        d[static_cast<std::size_t>(i)] = (k == 1) ? 1.0 : sigma_partial(lambda, k - 1, static_cast<std::size_t>(i));
    }
    SymMatrix out(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double acc = 0.0;
            for (int m = 0; m < n; ++m) {
                acc += eig.vectors[static_cast<std::size_t>(m) * n + i] * d[static_cast<std::size_t>(m)] *
                       eig.vectors[static_cast<std::size_t>(m) * n + j];
            }
            out.set(i, j, acc);
        }
    }
    return out;
}

double rho_k(const SpectrumPoint& xi, int k)
{
    require_order(xi.size(), k, 1);
    if (!cone_classify(xi).in_cone(k)) {
        throw ConeError("rho_k requires xi in Gamma_k");
    }
    return std::pow(sigma(xi, k) / binomial(xi.size(), k), 1.0 / k);
}

double rho_k_star(const SymMatrix& a, int k, double tol)
{
    return rho_k_star(SpectrumPoint(jacobi_eigen(a).values), k, tol);
}

double rho_k_star(const SpectrumPoint& a, int k, double tol)
{
    const int n = a.size();
    require_order(n, k, 1);
    if (!(tol > 0.0)) {
        throw ParameterError("rho_k_star tolerance must be positive");
    }
    const auto av = a.values();
    double abs_scale = 0.0;
    for (double v : av) {
        abs_scale = std::max(abs_scale, std::abs(v));
    }

    if (std::accumulate(av.begin(), av.end(), 0.0) <= 0.0) {
        throw ConeError("matrix is outside the dual cone Gamma_k^*");
    }
    if (k == 1) {
        // Gamma_1^* is the ray through (1, ..., 1).
        for (double v : av) {
            if (std::abs(v - av[0]) > tol * abs_scale) {
                throw ConeError("matrix is outside the dual cone Gamma_1^* (a.xi unbounded below)");
            }
        }
        return av[0];
    }

    // Equivalent concave program: maximize log sigma_k(xi) on {a.xi = 1};
    // then rho_k^* = 1 / (n rho_k(xi*)). Newton steps on the KKT system.
    const double a_sum = std::accumulate(av.begin(), av.end(), 0.0);
    std::vector<double> xi(static_cast<std::size_t>(n), 1.0 / a_sum);
    auto log_sk = [&](const std::vector<double>& x) {
        const SpectrumPoint p(x);
        return cone_classify(p).in_cone(k) ? std::log(sigma(p, k)) : -std::numeric_limits<double>::infinity();
    };

    Eigen::MatrixXd kkt(n + 1, n + 1);
    Eigen::VectorXd rhs(n + 1);
    std::vector<double> trial(static_cast<std::size_t>(n));
    std::vector<double> pair(static_cast<std::size_t>(n));
    double phi = log_sk(xi);
    constexpr int max_iter = 500;
    for (int iter = 0; iter < max_iter; ++iter) {
        const SpectrumPoint cur(xi);
        const double sk = sigma(cur, k);
        Eigen::VectorXd g(n);
        for (int i = 0; i < n; ++i) {
            g(i) = sigma_partial(cur, k - 1, static_cast<std::size_t>(i)) / sk;
        }
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                double d2 = 0.0;
                if (i != j) {
                    // sigma_{k-2} with entries i and j removed.
                    pair = xi;
                    pair[static_cast<std::size_t>(i)] = 0.0;
                    pair[static_cast<std::size_t>(j)] = 0.0;
                    d2 = sigma(SpectrumPoint(pair), k - 2);
                }
                kkt(i, j) = d2 / sk - g(i) * g(j);
            }
            kkt(i, n) = av[static_cast<std::size_t>(i)];
            kkt(n, i) = av[static_cast<std::size_t>(i)];
            rhs(i) = -g(i);
        }
        kkt(n, n) = 0.0;
        rhs(n) = 0.0;
        const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
        const Eigen::VectorXd d = sol.head(n);
        const double decrement = g.dot(d);
        if (!std::isfinite(decrement)) {
            throw NumericalError("rho_k_star: singular Newton system");
        }
        if (decrement <= tol) {
            return 1.0 / (n * rho_k(cur, k));
        }

        double t = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt, t *= 0.5) {
            for (int i = 0; i < n; ++i) {
                trial[static_cast<std::size_t>(i)] = xi[static_cast<std::size_t>(i)] + t * d(i);
            }
            const double next = log_sk(trial);
            if (next >= phi + 0.25 * t * decrement) {
                xi.swap(trial);
                phi = next;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            return 1.0 / (n * rho_k(cur, k));
        }
        // sigma_k unbounded on the slice: the infimum is not attained.
        if (1.0 / (n * rho_k(SpectrumPoint(xi), k)) < 1e-14) {
            throw ConeError("matrix is not in the interior of the dual cone Gamma_k^*");
        }
    }
    throw NumericalError("rho_k_star did not converge within the iteration cap");
}

}  // namespace hesseig
