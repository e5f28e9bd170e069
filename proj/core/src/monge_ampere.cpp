#include <algorithm>
#include <cmath>

#include "hesseig/dirichlet.hpp"
#include "hesseig/errors.hpp"

namespace hesseig {

namespace {

struct LineCoeffs {
    double alpha;  // neighbour contribution
    double beta;   // diagonal weight (positive)
};

LineCoeffs line_coeffs(const Discretization& disc, const Eigen::VectorXd& u, int node, int line)
{
    const double a = disc.arm(node, 2 * line);
    const double b = disc.arm(node, 2 * line + 1);
    const double scale = 2.0 / (a + b);
    const int fa = disc.neighbor(node, 2 * line);
    const int fb = disc.neighbor(node, 2 * line + 1);
    const double ua = fa >= 0 ? u[fa] : 0.0;
    const double ub = fb >= 0 ? u[fb] : 0.0;
    return {scale * (ua / a + ub / b), scale * (1.0 / a + 1.0 / b)};
}

// Largest t with (alpha1 - beta1 t)(alpha2 - beta2 t) = f on the branch where
// both factors are non-negative.
double frame_root(LineCoeffs p, LineCoeffs q, double f)
{
    const double A = p.alpha * q.beta;
    const double B = q.alpha * p.beta;
    const double disc = (A - B) * (A - B) + 4.0 * p.beta * q.beta * f;
    return ((A + B) - std::sqrt(disc)) / (2.0 * p.beta * q.beta);
}

// Fixed point of (Delta u)^2 = (u_xx - u_yy)^2 + 4 u_xy^2 + 4 f with Delta u >= 0,
// which is det_h u = f.
Eigen::VectorXd fixed_point_solve(const Discretization& disc, const Eigen::VectorXd& f, const SolverControls& controls,
                                  Eigen::VectorXd u, MaStats& stats)
{
    for (int it = 1; it <= controls.ma_max_iter; ++it) {
        const auto hess = disc.hessian(u);
        const Eigen::VectorXd diff = hess.xx - hess.yy;
        const Eigen::VectorXd rhs = (diff.cwiseAbs2() + 4.0 * hess.xy.cwiseAbs2() + 4.0 * f).cwiseSqrt();
        Eigen::VectorXd next = disc.solve_laplacian(rhs);
        const double inc = (next - u).lpNorm<Eigen::Infinity>();
        u.swap(next);
        stats.iterations += 1;
        stats.increment = inc;
        if (inc <= controls.ma_tol * u.lpNorm<Eigen::Infinity>()) {
            return u;
        }
    }
    throw NumericalError("Monge-Ampere iteration did not converge", stats.increment);
}

void factor_jacobian(const Discretization& disc, const Eigen::VectorXd& u, MaWorkspace& ws, MaStats& stats)
{
    const auto hess = disc.hessian(u);
    const Eigen::VectorXd cross = -hess.xy;
    SparseMatrix jac = SparseMatrix(hess.yy.asDiagonal() * disc.second_difference(Line::x));
    jac += SparseMatrix(hess.xx.asDiagonal() * disc.second_difference(Line::y));
    jac += SparseMatrix(cross.asDiagonal() * disc.second_difference(Line::diag));
    jac -= SparseMatrix(cross.asDiagonal() * disc.second_difference(Line::anti));
    jac.makeCompressed();
    if (!ws.analyzed) {
        ws.jacobian_lu.analyzePattern(jac);
        ws.analyzed = true;
    }
    ws.jacobian_lu.factorize(jac);
    ws.factored = ws.jacobian_lu.info() == Eigen::Success;
    ws.reference_norm = u.lpNorm<Eigen::Infinity>();
    stats.factorizations += 1;
}

// Newton steps with a lagged Jacobian. Returns false when the iteration does
// not contract, leaving the caller to fall back.
bool newton_solve(const Discretization& disc, const Eigen::VectorXd& f, const SolverControls& controls,
                  Eigen::VectorXd& u, MaWorkspace& ws, MaStats& stats)
{
    constexpr int kMaxSteps = 60;
    constexpr double kStallRate = 0.3;
    double prev_inc = INFINITY;
    bool fresh = false;
    for (int step = 0; step < kMaxSteps; ++step) {
        const Eigen::VectorXd residual = discrete_det(disc, u) - f;
        if (residual.lpNorm<Eigen::Infinity>() == 0.0) {
            return true;
        }
        if (!ws.factored) {
            factor_jacobian(disc, u, ws, stats);
            if (!ws.factored) {
                return false;
            }
            fresh = true;
        }
        const double unorm = u.lpNorm<Eigen::Infinity>();
        const double rescale = (unorm > 0.0 && ws.reference_norm > 0.0) ? ws.reference_norm / unorm : 1.0;
        const Eigen::VectorXd du = rescale * ws.jacobian_lu.solve(-residual);
        const double inc = du.lpNorm<Eigen::Infinity>();
        if (!std::isfinite(inc)) {
            ws.factored = false;
            return false;
        }
        if (inc > kStallRate * prev_inc) {
            if (fresh && inc > prev_inc) {
                return false;
            }
            // Contraction stalled on a stale Jacobian: refactor at u and retry.
            if (!fresh) {
                ws.factored = false;
                prev_inc = INFINITY;
                continue;
            }
        }
        u += du;
        stats.iterations += 1;
        stats.increment = inc;
        prev_inc = inc;
        fresh = false;
        if (inc <= controls.ma_tol * u.lpNorm<Eigen::Infinity>()) {
            return true;
        }
    }
    return false;
}

Eigen::VectorXd centered_solve(const Discretization& disc, const Eigen::VectorXd& f, const SolverControls& controls,
                               const Eigen::VectorXd* warm, MaStats& stats, MaWorkspace* workspace)
{
    // Exact for f constant on a disk; a convex start for Newton otherwise.
    const Eigen::VectorXd start = warm ? *warm : disc.solve_laplacian(2.0 * f.cwiseSqrt());
    MaWorkspace local;
    MaWorkspace& ws = workspace ? *workspace : local;
    Eigen::VectorXd u = start;
    if (newton_solve(disc, f, controls, u, ws, stats)) {
        return u;
    }
    ws.factored = false;
    stats.fell_back = true;
    return fixed_point_solve(disc, f, controls, start, stats);
}

Eigen::VectorXd wide_solve(const Discretization& disc, const Eigen::VectorXd& f, const SolverControls& controls,
                           MaStats& stats)
{
    const int n = disc.unknowns();
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    for (int sweep = 1; sweep <= controls.ma_max_iter; ++sweep) {
        double change = 0.0;
        for (int i = 0; i < n; ++i) {
            const double t_axis = frame_root(line_coeffs(disc, u, i, 0), line_coeffs(disc, u, i, 1), f[i]);
            const double t_diag = frame_root(line_coeffs(disc, u, i, 2), line_coeffs(disc, u, i, 3), f[i]);
            const double t = std::min(t_axis, t_diag);
            change = std::max(change, std::abs(t - u[i]));
            u[i] = t;
        }
        stats.iterations = sweep;
        stats.increment = change;
        if (change <= controls.ma_tol * u.lpNorm<Eigen::Infinity>()) {
            return u;
        }
    }
    throw NumericalError("wide-stencil Monge-Ampere sweeps did not converge", stats.increment);
}

}  // namespace

Eigen::VectorXd discrete_det(const Discretization& disc, const Eigen::VectorXd& u)
{
    const auto hess = disc.hessian(u);
    return hess.xx.cwiseProduct(hess.yy) - hess.xy.cwiseAbs2();
}

Eigen::VectorXd wide_stencil_det(const Discretization& disc, const Eigen::VectorXd& u)
{
    Eigen::VectorXd out(disc.unknowns());
    for (int i = 0; i < disc.unknowns(); ++i) {
        double best = INFINITY;
        for (int frame = 0; frame < 2; ++frame) {
            const auto p = line_coeffs(disc, u, i, 2 * frame);
            const auto q = line_coeffs(disc, u, i, 2 * frame + 1);
            const double dp = std::max(p.alpha - p.beta * u[i], 0.0);
            const double dq = std::max(q.alpha - q.beta * u[i], 0.0);
            best = std::min(best, dp * dq);
        }
        out[i] = best;
    }
    return out;
}

double min_hessian_eigenvalue(const Discretization& disc, const Eigen::VectorXd& u)
{
    const auto hess = disc.hessian(u);
    double m = INFINITY;
    for (int i = 0; i < disc.unknowns(); ++i) {
        const double mean = 0.5 * (hess.xx[i] + hess.yy[i]);
        const double half = 0.5 * (hess.xx[i] - hess.yy[i]);
        m = std::min(m, mean - std::hypot(half, hess.xy[i]));
    }
    return m;
}

Eigen::VectorXd monge_ampere_solve(const Discretization& disc, const Eigen::VectorXd& source,
                                   const SolverControls& controls, const Eigen::VectorXd* warm, MaStats* stats,
                                   MaWorkspace* workspace)
{
    if (source.size() != disc.unknowns()) {
        throw ParameterError("Monge-Ampere source size does not match the grid");
    }
    if (!source.allFinite()) {
        throw ParameterError("Monge-Ampere source must be finite");
    }
    if (source.minCoeff() < 0.0) {
        throw ParameterError("Monge-Ampere source must be non-negative");
    }
    MaStats local;
    MaStats& st = stats ? *stats : local;
    st = MaStats{};
    if (controls.ma_scheme == MongeAmpereScheme::wide_stencil) {
        return wide_solve(disc, source, controls, st);
    }
    return centered_solve(disc, source, controls, warm, st, workspace);
}

GridField solve_monge_ampere_2d(const ProblemSpec& spec, const GridField& source)
{
    if (!(spec.h > 0.0)) {
        throw ParameterError("grid spacing h must be positive");
    }
    const auto disc = discretization_for(spec.domain, spec.h);
    const Eigen::VectorXd f = disc->from_field(source);
    return disc->to_field(monge_ampere_solve(*disc, f, spec.controls));
}

}  // namespace hesseig
