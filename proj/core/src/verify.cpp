#include "hesseig/verify.hpp"

#include <algorithm>
#include <cmath>

#include "hesseig/eigensolve.hpp"
#include "hesseig/errors.hpp"
#include "hesseig/radial.hpp"
#include "hesseig/stencil.hpp"

namespace hesseig {

namespace {

enum Dir { E = 0, W = 1, N = 2, S = 3, NE = 4, SW = 5, SE = 6, NW = 7 };

double inradius(const DomainDescriptor& d)
{
    return std::min(d.half_extent_x(), d.half_extent_y());
}

}  // namespace

EstimateReport estimate_norms(const GridField& field, const ProblemSpec& spec, double beta, const std::string& field_id)
{
    if (!(beta > 1.0)) {
        throw ParameterError("estimate exponent beta must exceed 1");
    }
    const auto disc = discretization_for(spec.domain, spec.h);
    const Eigen::VectorXd u = disc->from_field(field);
    const double h = disc->h();

    EstimateReport rep;
    rep.beta = beta;
    rep.field_id = field_id;
    rep.delta = spec.delta;
    for (int i = 0; i < disc->unknowns(); ++i) {
        if (disc->boundary_distance(i) < 2.0 * h || (spec.s < 0.0 && disc->radius(i) < 2.0 * h)) {
            continue;
        }
        bool full = true;
        for (int d = 0; d < 8; ++d) {
            full = full && disc->neighbor(i, d) >= 0;
        }
        if (!full) {
            continue;
        }
        auto at = [&](int d) { return u[disc->neighbor(i, d)]; };
        const double ux = (at(E) - at(W)) / (2.0 * h);
        const double uy = (at(N) - at(S)) / (2.0 * h);
        const double uxx = (at(E) - 2.0 * u[i] + at(W)) / (h * h);
        const double uyy = (at(N) - 2.0 * u[i] + at(S)) / (h * h);
        const double uxy = (at(NE) - at(SE) - at(NW) + at(SW)) / (4.0 * h * h);
        const double grad = std::hypot(ux, uy);
        const double mean = 0.5 * (uxx + uyy);
        const double rad = std::hypot(0.5 * (uxx - uyy), uxy);
        const double hess = std::max(std::abs(mean + rad), std::abs(mean - rad));
        const double r = disc->radius(i);
        rep.K = std::max(rep.K, r * grad);
        rep.L_beta = std::max(rep.L_beta, std::pow(r, 2.0 * beta) * hess);
        rep.K_hat = std::max(rep.K_hat, grad);
        rep.L_hat = std::max(rep.L_hat, hess);
        rep.nodes += 1;
    }
    return rep;
}

double fundamental_solution(double x_norm, int n, int k)
{
    if (n < 1 || k < 1 || k > n) {
        throw ParameterError("fundamental solution needs 1 <= k <= n");
    }
    if (x_norm < 0.0) {
        throw ParameterError("|x| must be non-negative");
    }
    if (2 * k > n) {
        return std::pow(x_norm, 2.0 - static_cast<double>(n) / k);
    }
    if (x_norm == 0.0) {
        return -INFINITY;
    }
    if (2 * k == n) {
        return std::log(x_norm);
    }
    return -std::pow(x_norm, 2.0 - static_cast<double>(n) / k);
}

double fundamental_residual(int n, int k, const std::vector<double>& radii)
{
    if (n < 1 || k < 1 || k > n) {
        throw ParameterError("fundamental solution needs 1 <= k <= n");
    }
    const double a = 2.0 - static_cast<double>(n) / k;
    double worst = 0.0;
    for (double r : radii) {
        if (!(r > 0.0)) {
            throw ParameterError("fundamental residual radii must be positive");
        }
        double d1, d2;
        if (2 * k == n) {
            d1 = 1.0 / r;
            d2 = -1.0 / (r * r);
        } else {
            const double sign = 2 * k > n ? 1.0 : -1.0;
            d1 = sign * a * std::pow(r, a - 1.0);
            d2 = sign * a * (a - 1.0) * std::pow(r, a - 2.0);
        }
        worst = std::max(worst, std::abs(radial_sk(d1, d2, r, n, k)));
    }
    return worst;
}

double wolff_potential(const std::function<double(double)>& mu_of_ball, int n, int k, double r)
{
    if (!(2 * k > n && k < n)) {
        throw ParameterError("Wolff potential is evaluated for n/2 < k < n");
    }
    if (!(r > 0.0)) {
        throw ParameterError("Wolff potential radius must be positive");
    }
    auto integrand = [&](double y) {
        const double t = std::exp(y);
        const double mu = mu_of_ball(t);
        if (mu < 0.0 || !std::isfinite(mu)) {
            throw ParameterError("ball measure must be finite and non-negative");
        }
        return std::pow(mu / std::pow(t, n - 2.0 * k), 1.0 / k);
    };
    constexpr double span = 40.0;
    constexpr int intervals = 4000;
    const double top = std::log(r);
    const double bottom = top - span;
    const double dy = span / intervals;
    double sum = integrand(bottom) + integrand(top);
    for (int i = 1; i < intervals; ++i) {
        sum += (i % 2 ? 4.0 : 2.0) * integrand(bottom + i * dy);
    }
    double value = sum * dy / 3.0;

    // Tail below t = r e^{-span}, assuming a local power law t^gamma.
    const double g0 = integrand(bottom);
    const double g1 = integrand(bottom + 1.0);
    if (g0 > 0.0) {
        if (!(g1 > g0)) {
            return INFINITY;
        }
        value += g0 / std::log(g1 / g0);
    }
    return value;
}

HolderFit holder_probe(const GridField& u, const ProblemSpec& spec)
{
    const auto& g = u.geometry();
    const double R = inradius(spec.domain);
    struct NodeSample {
        double r;
        double v;
    };
    std::vector<NodeSample> samples;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const auto node = static_cast<std::size_t>(g.index(i, j));
            if (u.inside(node)) {
                samples.push_back({std::hypot(g.x(i), g.y(j)), u[node]});
            }
        }
    }

    HolderFit fit;
    for (int j = 0; j <= 5; ++j) {
        const double rj = std::ldexp(R / 4.0, -j);
        int annulus = 0;
        double realized = 0.0;
        double vmin = INFINITY, vmax = -INFINITY;
        for (const auto& s : samples) {
            if (s.r <= rj) {
                realized = std::max(realized, s.r);
                vmin = std::min(vmin, s.v);
                vmax = std::max(vmax, s.v);
                if (s.r > 0.5 * rj) {
                    ++annulus;
                }
            }
        }
        if (annulus >= 8 && vmax > vmin) {
            fit.radii.push_back(realized);
            fit.oscillations.push_back(vmax - vmin);
        }
    }
    const auto m = fit.radii.size();
    if (m < 5) {
        throw ParameterError("Hölder probe needs at least 5 resolved dyadic radii, found " + std::to_string(m));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double x = std::log(fit.radii[i]);
        const double y = std::log(fit.oscillations[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double dm = static_cast<double>(m);
    fit.alpha = (dm * sxy - sx * sy) / (dm * sxx - sx * sx);
    const double intercept = (sy - fit.alpha * sx) / dm;
    double ss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double e = std::log(fit.oscillations[i]) - (intercept + fit.alpha * std::log(fit.radii[i]));
        ss += e * e;
    }
    fit.residual = std::sqrt(ss / dm);
    return fit;
}

ScalingCheck scaling_law_check(const ProblemSpec& spec, double t)
{
    if (!(t > 0.0)) {
        throw ParameterError("scaling factor must be positive");
    }
    ScalingCheck out;
    out.expected = std::pow(t, -2.0 * (1.0 + spec.s));
    out.lambda_base = find_lambda_delta(spec).lambda_delta;
    if (t == 1.0) {
        out.lambda_scaled = out.lambda_base;
    } else {
        ProblemSpec scaled = spec;
        scaled.domain = spec.domain.scaled(t);
        scaled.delta = spec.delta * t;
        out.lambda_scaled = find_lambda_delta(scaled).lambda_delta;
    }
    out.ratio = out.lambda_scaled / out.lambda_base;
    return out;
}

LinearizedEigen linearized_eigen(const GridField& field, const ProblemSpec& spec)
{
    spec.validate_grid();
    const auto disc_ptr = discretization_for(spec.domain, spec.h);
    const Discretization& disc = *disc_ptr;
    const Eigen::VectorXd u = disc.from_field(field);
    const int n = disc.unknowns();

    SparseMatrix op;
    if (spec.k == 1) {
        op = disc.laplacian();
    } else {
        // F = det^{1/2}: F^{ij} = cof(D^2 u)^{ij} / (2 sqrt(det)).
        const auto hess = disc.hessian(u);
        Eigen::VectorXd cxx(n), cyy(n), cxy(n);
        for (int i = 0; i < n; ++i) {
            const double det = hess.xx[i] * hess.yy[i] - hess.xy[i] * hess.xy[i];
            if (!(det > 0.0) || !(hess.xx[i] + hess.yy[i] > 0.0)) {
                throw ConeError("linearized operator is not elliptic at node " + std::to_string(i));
            }
            const double scale = 0.5 / std::sqrt(det);
            cxx[i] = hess.yy[i] * scale;
            cyy[i] = hess.xx[i] * scale;
            cxy[i] = -hess.xy[i] * scale;
        }
        const SparseMatrix cross = disc.second_difference(Line::diag) - disc.second_difference(Line::anti);
        op = SparseMatrix(cxx.asDiagonal() * disc.second_difference(Line::x));
        op += SparseMatrix(cyy.asDiagonal() * disc.second_difference(Line::y));
        op += SparseMatrix(cxy.asDiagonal() * cross);
    }
    SparseMatrix neg = -op;
    neg.makeCompressed();
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(neg);
    lu.factorize(neg);
    if (lu.info() != Eigen::Success) {
        throw ConeError("linearized operator is singular on the mask");
    }
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) {
        w[i] = spec.weight(disc.radius(i));
    }

    LinearizedEigen out;
    Eigen::VectorXd phi = u.cwiseAbs();
    if (!(phi.maxCoeff() > 0.0)) {
        phi.setOnes();
    }
    phi /= phi.lpNorm<Eigen::Infinity>();
    double lambda = 0.0;
    for (int it = 1; it <= 1000; ++it) {
        Eigen::VectorXd next = lu.solve(w.cwiseProduct(phi));
        const double scale = next.lpNorm<Eigen::Infinity>();
        if (!(scale > 0.0)) {
            throw NumericalError("linearized inverse power iterate vanished");
        }
        // Keep the sign of the dominant entry so phi stays comparable.
        Eigen::Index imax = 0;
        next.cwiseAbs().maxCoeff(&imax);
        const double signed_scale = next[imax] > 0.0 ? scale : -scale;
        next /= signed_scale;
        const double lambda_next = 1.0 / signed_scale;
        const double change = (next - phi).lpNorm<Eigen::Infinity>();
        phi = next;
        out.iterations = it;
        if (it > 1 && std::abs(lambda_next - lambda) <= 1e-13 * std::abs(lambda_next) && change <= 1e-10) {
            lambda = lambda_next;
            break;
        }
        lambda = lambda_next;
    }
    if (!(lambda > 0.0)) {
        throw ConeError("linearized principal eigenvalue is not positive");
    }
    out.lambda_phi = lambda;
    out.one_signed = phi.minCoeff() >= -1e-10;
    return out;
}

BoundarySlope boundary_slope_check(const GridField& field, const ProblemSpec& spec)
{
    const auto disc = discretization_for(spec.domain, spec.h);
    const Eigen::VectorXd u = disc->from_field(field);
    BoundarySlope out;
    out.theta = INFINITY;
    double ring_max = 0.0;
    for (int i = 0; i < disc->unknowns(); ++i) {
        bool adjacent = false;
        for (int d = 0; d < 4; ++d) {
            adjacent = adjacent || disc->neighbor(i, d) < 0;
        }
        if (!adjacent) {
            continue;
        }
        const double dist = disc->boundary_distance(i);
        if (!(dist > 0.0)) {
            continue;
        }
        const double ratio = -u[i] / dist;
        out.theta = std::min(out.theta, ratio);
        out.max_ratio = std::max(out.max_ratio, ratio);
        ring_max = std::max(ring_max, std::abs(u[i]));
        out.nodes += 1;
    }
    if (out.nodes == 0 || ring_max == 0.0) {
        out.theta = 0.0;
        out.max_ratio = 0.0;
        out.degenerate = true;
    }
    return out;
}

}  // namespace hesseig
