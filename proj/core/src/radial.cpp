#include "hesseig/radial.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hesseig/errors.hpp"
#include "hesseig/symfun.hpp"

namespace hesseig {

namespace {

// int_a^b t^p dt for p > -1.
double power_moment(double a, double b, double p)
{
    return (std::pow(b, p + 1.0) - std::pow(a, p + 1.0)) / (p + 1.0);
}

// int_a^b t^p (fa + (fb - fa)(t - a)/(b - a)) dt.
double product_integral(double a, double b, double p, double fa, double fb)
{
    const double m0 = power_moment(a, b, p);
    const double m1 = power_moment(a, b, p + 1.0);
    return fa * m0 + (fb - fa) * (m1 - a * m0) / (b - a);
}

void validate_radial(int n, int k, double s, double R)
{
    if (n < 1 || k < 1 || k > n) {
        throw ParameterError("radial problem needs 1 <= k <= n (n=" + std::to_string(n) +
                             ", k=" + std::to_string(k) + ")");
    }
    if (!(R > 0.0)) {
        throw ParameterError("ball radius must be positive");
    }
    if (n + 2.0 * s * k <= 0.0) {
        throw ParameterError("weight |x|^{2sk} is not integrable: n + 2sk <= 0");
    }
}

}  // namespace

double weight_exponent_floor(int n, int k) { return -std::min(1.0, static_cast<double>(n) / (2.0 * k)); }

double radial_sk(double du, double ddu, double r, int n, int k)
{
    const double q = du / r;
    return binomial(n - 1, k) * std::pow(q, k) + binomial(n - 1, k - 1) * ddu * std::pow(q, k - 1);
}

RadialProfile march_radial(int n, int k, double s, double R, double lambda, int steps)
{
    validate_radial(n, k, s, R);
    if (steps < 4) {
        throw ParameterError("radial march needs at least 4 steps");
    }
    const double c = binomial(n - 1, k - 1);
    const double p = n - 1.0 + 2.0 * s * k;  // source weight exponent, > -1
    const double q = 1.0 + 2.0 * s;          // u' ~ r^q m(r), q > -1
    const double dr = R / steps;

    auto source = [&](double u) { return std::pow(lambda * std::max(-u, 0.0), k); };
    // m = [ (k/c) I(r) / r^{p+1} ]^{1/k}, with the r -> 0 limit g(0)/(p+1).
    auto slope_factor = [&](double integral, double r) { return std::pow((k / c) * integral / std::pow(r, p + 1.0), 1.0 / k); };

    RadialProfile prof;
    prof.R = R;
    prof.r.resize(static_cast<std::size_t>(steps) + 1);
    prof.u.resize(prof.r.size());
    prof.du.resize(prof.r.size());

    double u = -1.0;
    double integral = 0.0;
    double g = source(u);
    double m = std::pow((k / c) * g / (p + 1.0), 1.0 / k);
    prof.r[0] = 0.0;
    prof.u[0] = u;
    prof.du[0] = (q > 0.0) ? 0.0 : (q == 0.0 ? m : INFINITY);

    for (int i = 0; i < steps; ++i) {
        const double a = i * dr;
        const double b = (i + 1 == steps) ? R : (i + 1) * dr;
        // Predictor: freeze the slope factor over the cell.
        double ub = u + m * power_moment(a, b, q);
        double gb = g;
        double ib = integral;
        double mb = m;
        for (int it = 0; it < 4; ++it) {
            gb = source(ub);
            ib = integral + product_integral(a, b, p, g, gb);
            mb = slope_factor(ib, b);
            ub = u + product_integral(a, b, q, m, mb);
        }
        u = ub;
        g = gb;
        integral = ib;
        m = mb;
        const auto idx = static_cast<std::size_t>(i) + 1;
        prof.r[idx] = b;
        prof.u[idx] = u;
        prof.du[idx] = std::pow(b, q) * m;
    }
    return prof;
}

RadialEigen shoot_eigen(int n, int k, double s, double R, double tol, const ShootOptions& options)
{
    validate_radial(n, k, s, R);
    if (!(s > weight_exponent_floor(n, k))) {
        throw ParameterError("weight exponent s must exceed -min(1, n/2k)");
    }
    if (!(tol > 0.0)) {
        throw ParameterError("shoot tolerance must be positive");
    }

    auto end_value = [&](double lambda) { return march_radial(n, k, s, R, lambda, options.steps).u.back(); };

    // Order of magnitude from the k = 1 closed form (homogeneity gives the
    // same R-scaling for every k).
    double estimate = (n >= 2 && s > -1.0) ? bessel_weighted_eigen(n, s, R) : 10.0 * std::pow(R, -2.0 * (1.0 + s));
    double lo = 0.1 * estimate;
    double hi = 10.0 * estimate;
    int expansions = 0;
    while (end_value(lo) >= 0.0) {
        if (++expansions > options.max_expansions) {
            throw BracketError("no lower eigenvalue bracket found for radial shoot");
        }
        lo *= 0.5;
    }
    expansions = 0;
    while (end_value(hi) <= 0.0) {
        if (++expansions > options.max_expansions) {
            throw BracketError("no upper eigenvalue bracket found for radial shoot");
        }
        hi *= 2.0;
    }

    RadialEigen out;
    // Coarse monotonicity audit of the zero radius in lambda.
    constexpr int audit_points = 9;
    bool seen_positive = false;
    for (int i = 0; i < audit_points; ++i) {
        const double lam = lo * std::pow(hi / lo, static_cast<double>(i) / (audit_points - 1));
        const bool positive = end_value(lam) > 0.0;
        if (seen_positive && !positive) {
            out.monotone_bracket = false;
        }
        seen_positive = seen_positive || positive;
    }

    int iter = 0;
    while ((hi - lo) > tol * hi) {
        if (++iter > options.max_bisections) {
            throw NumericalError("radial bisection exceeded its iteration cap", (hi - lo) / hi);
        }
        const double mid = 0.5 * (lo + hi);
        (end_value(mid) > 0.0 ? hi : lo) = mid;
    }
    out.lambda1 = 0.5 * (lo + hi);
    out.bisection_width = (hi - lo) / out.lambda1;
    out.profile = march_radial(n, k, s, R, out.lambda1, options.steps);

    // u'(r) ~ r^gamma near the origin: least squares over samples 1..16.
    {
        const std::size_t m = std::min<std::size_t>(16, out.profile.r.size() - 1);
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        std::size_t cnt = 0;
        for (std::size_t i = 1; i <= m; ++i) {
            if (out.profile.du[i] <= 0.0) {
                continue;
            }
            const double x = std::log(out.profile.r[i]);
            const double y = std::log(out.profile.du[i]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++cnt;
        }
        if (cnt >= 2) {
            out.origin_slope_exponent = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
        }
    }
    return out;
}

double bessel_j(double nu, double x)
{
    if (!(nu > -1.0)) {
        throw ParameterError("bessel_j requires nu > -1");
    }
    if (x < 0.0) {
        throw ParameterError("bessel_j requires x >= 0");
    }
    if (x == 0.0) {
        return nu == 0.0 ? 1.0 : 0.0;
    }
    const double half = 0.5 * x;
    double term = std::exp(nu * std::log(half) - std::lgamma(nu + 1.0));
    double sum = term;
    const double h2 = half * half;
    for (int m = 0; m < 500; ++m) {
        term *= -h2 / ((m + 1.0) * (m + 1.0 + nu));
        sum += term;
        if (m > half && std::abs(term) <= 1e-17 * std::abs(sum)) {
            break;
        }
    }
    return sum;
}

double bessel_j_first_zero(double nu, double tol)
{
    if (!(nu > -1.0)) {
        throw ParameterError("bessel zero requires nu > -1");
    }
    const double step = 0.05;
    const double x_max = 2.0 * std::max(nu, 0.0) + 30.0;
    double a = step;
    double fa = bessel_j(nu, a);
    double b = a;
    bool found = false;
    while (b < x_max) {
        b = a + step;
        const double fb = bessel_j(nu, b);
        if ((fa > 0.0) != (fb > 0.0)) {
            found = true;
            break;
        }
        a = b;
        fa = fb;
    }
    if (!found) {
        throw NumericalError("first Bessel zero not bracketed");
    }
    for (int i = 0; i < 200 && (b - a) > tol * b; ++i) {
        const double mid = 0.5 * (a + b);
        const double fm = bessel_j(nu, mid);
        if ((fm > 0.0) == (fa > 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

double bessel_weighted_eigen(int n, double s, double R, double tol)
{
    if (n < 2) {
        throw ParameterError("bessel_weighted_eigen requires n >= 2");
    }
    if (!(s > -1.0)) {
        throw ParameterError("bessel_weighted_eigen requires s > -1");
    }
    if (!(R > 0.0)) {
        throw ParameterError("ball radius must be positive");
    }
    const double nu = (n - 2.0) / (2.0 * (1.0 + s));
    const double j = bessel_j_first_zero(nu, tol);
    return std::pow((1.0 + s) * j, 2.0) / std::pow(R, 2.0 * (1.0 + s));
}

}  // namespace hesseig
