#include "hesseig/variational.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "hesseig/dirichlet.hpp"
#include "hesseig/errors.hpp"
#include "hesseig/symfun.hpp"

namespace hesseig {

namespace {

constexpr double kConeTol = 1e-8;

// Directional first difference with Shortley-Weller arms; `plus`/`minus` are
// the E/W or N/S direction codes.
double first_difference(const Discretization& disc, const Eigen::VectorXd& u, int i, int plus, int minus)
{
    const double a = disc.arm(i, plus);
    const double b = disc.arm(i, minus);
    const int ip = disc.neighbor(i, plus);
    const int im = disc.neighbor(i, minus);
    const double up = ip >= 0 ? u[ip] : 0.0;
    const double um = im >= 0 ? u[im] : 0.0;
    return (b * b * (up - u[i]) + a * a * (u[i] - um)) / (a * b * (a + b));
}

void check_grid_k(int k)
{
    if (k != 1 && k != 2) {
        throw ParameterError("grid functionals support k = 1 and k = 2 only");
    }
}

// S_k(D^2_h u) per unknown, after checking the closed-cone condition.
Eigen::VectorXd checked_sk(const Discretization& disc, const Eigen::VectorXd& u, int k)
{
    const DiscreteHessian hess = disc.hessian(u);
    const double scale =
        std::max({1e-300, hess.xx.lpNorm<Eigen::Infinity>(), hess.yy.lpNorm<Eigen::Infinity>(), hess.xy.lpNorm<Eigen::Infinity>()});
    const double tol = kConeTol * scale;
    for (int i = 0; i < disc.unknowns(); ++i) {
        const double trace = hess.xx[i] + hess.yy[i];
        const double det = hess.xx[i] * hess.yy[i] - hess.xy[i] * hess.xy[i];
        if (trace < -tol || (k == 2 && (det < -tol * scale || std::min(hess.xx[i], hess.yy[i]) < -tol))) {
            throw ConeError("discrete Hessian leaves the closed Garding cone at (" + std::to_string(disc.x(i)) + ", " +
                            std::to_string(disc.y(i)) + ")");
        }
    }
    if (k == 1) {
        return disc.laplacian() * u;
    }
    return discrete_det(disc, u);
}

double sphere_area(int n)
{
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

double uniform_step(const RadialProfile& u)
{
    if (u.r.size() < 3 || u.u.size() != u.r.size() || u.du.size() != u.r.size() || u.r.front() != 0.0) {
        throw ParameterError("radial profile needs >= 3 samples starting at r = 0 with matching u and du");
    }
    return u.r[1] - u.r[0];
}

// int_0^R g(r) r^e dr on the profile grid: trapezoid, with the first panel
// integrating r^e exactly against the mean of g.
double radial_integral(const RadialProfile& prof, const std::vector<double>& g, double e)
{
    if (!(e > -1.0)) {
        throw ParameterError("radial integrand is not integrable at the origin");
    }
    const double dr = uniform_step(prof);
    double sum = 0.5 * (g[0] + g[1]) * std::pow(dr, e + 1.0) / (e + 1.0);
    for (std::size_t i = 1; i + 1 < prof.r.size(); ++i) {
        sum += 0.5 * dr * (g[i] * std::pow(prof.r[i], e) + g[i + 1] * std::pow(prof.r[i + 1], e));
    }
    return sum;
}

// S_k of a radial profile per sample; u'' by differences of u'. At r = 0 the
// Hessian is u''(0) I. Eigenprofiles have S_k = 0 at r = R, so the cone check
// allows a relative slack of dr for the differencing error.
std::vector<double> radial_sk_samples(const RadialProfile& prof, int n, int k)
{
    const double dr = uniform_step(prof);
    const std::size_t m = prof.r.size();
    std::vector<double> out(m);
    for (std::size_t i = 0; i < m; ++i) {
        double ddu;
        if (i == 0) {
            ddu = (-3.0 * prof.du[0] + 4.0 * prof.du[1] - prof.du[2]) / (2.0 * dr);
        } else if (i + 1 == m) {
            ddu = (3.0 * prof.du[i] - 4.0 * prof.du[i - 1] + prof.du[i - 2]) / (2.0 * dr);
        } else {
            ddu = (prof.du[i + 1] - prof.du[i - 1]) / (2.0 * dr);
        }
        if (i == 0) {
            out[i] = binomial(n, k) * std::pow(ddu, k);
            continue;
        }
        std::vector<double> eig(static_cast<std::size_t>(n), prof.du[i] / prof.r[i]);
        eig[0] = ddu;
        const ConeMembership cone = cone_classify(SpectrumPoint(eig));
        const double sk = radial_sk(prof.du[i], ddu, prof.r[i], n, k);
        const double scale = std::pow(std::abs(ddu) + std::abs(prof.du[i] / prof.r[i]), k);
        if (!cone.in_cone(k) && sk < -std::max(kConeTol, dr) * std::max(1.0, scale)) {
            throw ConeError("radial profile leaves the Garding cone at r = " + std::to_string(prof.r[i]));
        }
        out[i] = sk;
    }
    return out;
}

}  // namespace

IkValue functional_Ik(const QuadratureField& q, int k)
{
    check_grid_k(k);
    const Discretization& disc = q.discretization();
    const Eigen::VectorXd& u = q.values();
    if (u.size() > 0 && u.maxCoeff() > kConeTol * u.cwiseAbs().maxCoeff()) {
        throw ConeError("functional I_k needs u <= 0");
    }
    const Eigen::VectorXd sk = checked_sk(disc, u, k);
    IkValue out;
    out.value = q.integrate(Eigen::VectorXd((-u).cwiseProduct(sk)));

    Eigen::VectorXd grad_term(disc.unknowns());
    const DiscreteHessian hess = disc.hessian(u);
    for (int i = 0; i < disc.unknowns(); ++i) {
        const double ux = first_difference(disc, u, i, 0, 1);
        const double uy = first_difference(disc, u, i, 2, 3);
        if (k == 1) {
            grad_term[i] = ux * ux + uy * uy;
        } else {
            grad_term[i] = 0.5 * (ux * ux * hess.yy[i] - 2.0 * ux * uy * hess.xy[i] + uy * uy * hess.xx[i]);
        }
    }
    out.by_parts = q.integrate(grad_term);
    return out;
}

double weighted_norm(const QuadratureField& q, double p, double s, int k)
{
    const double a = 2.0 * s * k;
    if (!(2.0 + a > 0.0)) {
        throw ParameterError("weight |x|^{2sk} is not integrable: need 2 + 2sk > 0");
    }
    if (!(p >= 0.0)) {
        throw ParameterError("weighted_norm needs p >= 0");
    }
    const Eigen::VectorXd g = q.values().cwiseAbs().array().pow(p + 1.0).matrix();
    return std::pow(q.integrate_power_weighted(g, a), 1.0 / (p + 1.0));
}

double rayleigh_quotient(const QuadratureField& q, const ProblemSpec& spec)
{
    const double norm = weighted_norm(q, spec.k, spec.s, spec.k);
    const double den = std::pow(norm, spec.k + 1);
    if (!(den > 0.0)) {
        throw DegenerateInputError("Rayleigh quotient of the zero field");
    }
    return functional_Ik(q, spec.k).value / den;
}

TruncatedSource::TruncatedSource(double M, double p) : M_(M), p_(p)
{
    if (!(M > 1.0) || !std::isfinite(M)) {
        throw ParameterError("truncation level M must exceed 1");
    }
    if (!(p >= 0.0) || !std::isfinite(p)) {
        throw ParameterError("source exponent p must be >= 0");
    }
    F_at_M_ = (std::pow(1.0 + M, p + 1.0) - 1.0) / (p + 1.0);
    auto f_of = [this](double z) { return f(z); };
    F_at_2M_ = F_at_M_ + boost::math::quadrature::gauss<double, 30>::integrate(f_of, M, 2.0 * M);
}

double TruncatedSource::f(double z) const
{
    const double a = std::abs(z);
    if (a <= M_) {
        return std::pow(1.0 + a, p_);
    }
    if (a >= 2.0 * M_) {
        return 1.0 / (a * a);
    }
    // Cubic Hermite for log f against y = log|z| on [log M, log 2M].
    const double L = std::numbers::ln2;
    const double t = (std::log(a) - std::log(M_)) / L;
    const double v0 = p_ * std::log1p(M_);
    const double d0 = p_ * M_ / (1.0 + M_);
    const double v1 = -2.0 * std::log(2.0 * M_);
    const double d1 = -2.0;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double g = (2 * t3 - 3 * t2 + 1) * v0 + (t3 - 2 * t2 + t) * L * d0 + (-2 * t3 + 3 * t2) * v1 + (t3 - t2) * L * d1;
    return std::exp(g);
}

double TruncatedSource::F(double u) const
{
    const double a = std::abs(u);
    if (a <= M_) {
        return (std::pow(1.0 + a, p_ + 1.0) - 1.0) / (p_ + 1.0);
    }
    if (a >= 2.0 * M_) {
        return F_at_2M_ + 1.0 / (2.0 * M_) - 1.0 / a;
    }
    auto f_of = [this](double z) { return f(z); };
    return F_at_M_ + boost::math::quadrature::gauss<double, 30>::integrate(f_of, M_, a);
}

namespace {

void check_J_params(const ProblemSpec& spec, double p, double delta)
{
    if (!(p >= 0.0 && p < spec.k)) {
        throw ParameterError("functional J needs p in [0, k)");
    }
    if (!(delta >= 0.0)) {
        throw ParameterError("delta must be >= 0");
    }
    if (delta == 0.0 && !(spec.n + 2.0 * spec.s * spec.k > 0.0)) {
        throw ParameterError("weight |x|^{2sk} is not integrable at delta = 0");
    }
}

}  // namespace

double functional_J(const QuadratureField& q, double M, double delta, const ProblemSpec& spec, double p)
{
    check_grid_k(spec.k);
    check_J_params(spec, p, delta);
    const TruncatedSource source(M, p);
    const Eigen::VectorXd& u = q.values();
    const Discretization& disc = q.discretization();
    const Eigen::VectorXd sk = checked_sk(disc, u, spec.k);
    Eigen::VectorXd F(u.size());
    for (int i = 0; i < u.size(); ++i) {
        F[i] = source.F(u[i]);
    }
    const double energy = q.integrate(Eigen::VectorXd((-u).cwiseProduct(sk))) / (spec.k + 1);
    double mass;
    if (delta == 0.0) {
        mass = q.integrate_power_weighted(F, 2.0 * spec.s * spec.k);
    } else {
        Eigen::VectorXd wF(u.size());
        for (int i = 0; i < u.size(); ++i) {
            const double r = disc.radius(i);
            wF[i] = std::pow(r * r + delta * delta, spec.s * spec.k) * F[i];
        }
        mass = q.integrate(wF);
    }
    return energy - mass;
}

IkValue functional_Ik(const RadialProfile& prof, int n, int k)
{
    if (k < 1 || k > n) {
        throw ParameterError("need 1 <= k <= n");
    }
    const std::vector<double> sk = radial_sk_samples(prof, n, k);
    const std::size_t m = prof.r.size();
    std::vector<double> value(m);
    std::vector<double> grad(m);
    double sup = 0.0;
    for (double v : prof.u) sup = std::max(sup, std::abs(v));
    for (std::size_t i = 0; i < m; ++i) {
        if (prof.u[i] > kConeTol * sup) {
            throw ConeError("functional I_k needs u <= 0");
        }
        value[i] = -prof.u[i] * sk[i];
        const double q = i == 0 ? 0.0 : prof.du[i] / prof.r[i];
        grad[i] = binomial(n - 1, k - 1) * prof.du[i] * prof.du[i] * std::pow(q, k - 1) / k;
    }
    const double area = sphere_area(n);
    return {area * radial_integral(prof, value, n - 1.0), area * radial_integral(prof, grad, n - 1.0)};
}

double weighted_norm(const RadialProfile& prof, int n, double p, double s, int k)
{
    if (!(n + 2.0 * s * k > 0.0)) {
        throw ParameterError("weight |x|^{2sk} is not integrable: need n + 2sk > 0");
    }
    std::vector<double> g(prof.u.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] = std::pow(std::abs(prof.u[i]), p + 1.0);
    }
    return std::pow(sphere_area(n) * radial_integral(prof, g, n - 1.0 + 2.0 * s * k), 1.0 / (p + 1.0));
}

double rayleigh_quotient(const RadialProfile& prof, int n, int k, double s)
{
    const double den = std::pow(weighted_norm(prof, n, k, s, k), k + 1);
    if (!(den > 0.0)) {
        throw DegenerateInputError("Rayleigh quotient of the zero profile");
    }
    return functional_Ik(prof, n, k).value / den;
}

double functional_J(const RadialProfile& prof, int n, int k, double s, double M, double delta, double p)
{
    ProblemSpec spec;
    spec.n = n;
    spec.k = k;
    spec.s = s;
    check_J_params(spec, p, delta);
    const TruncatedSource source(M, p);
    const double energy = functional_Ik(prof, n, k).value / (k + 1);
    std::vector<double> g(prof.u.size());
    double e = n - 1.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] = source.F(prof.u[i]);
        if (delta > 0.0) {
            g[i] *= std::pow(prof.r[i] * prof.r[i] + delta * delta, s * k);
        }
    }
    if (delta == 0.0) {
        e += 2.0 * s * k;
    }
    return energy - sphere_area(n) * radial_integral(prof, g, e);
}

CriticalExponent critical_exponent(int n, int k, double s)
{
    if (k < 1 || k > n) {
        throw ParameterError("need 1 <= k <= n");
    }
    if (2 * k > n) {
        return {ExponentKind::infinite, std::numeric_limits<double>::infinity()};
    }
    if (2 * k == n) {
        return {ExponentKind::finite_unspecified, 0.0};
    }
    const double num = s <= 0.0 ? (k + 1.0) * (n + 2.0 * s * k) : (k + 1.0) * n;
    return {ExponentKind::finite, num / (n - 2.0 * k)};
}

}  // namespace hesseig
