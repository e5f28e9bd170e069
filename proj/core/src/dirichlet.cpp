#include "hesseig/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hesseig/errors.hpp"

namespace hesseig {

namespace {

// Iterations before the increment-ratio test may classify a run.
constexpr int kRatioWarmup = 5;
// A run whose ratio test predicts more remaining iterations than this is
// completed by summing the geometric tail.
constexpr double kTailIterations = 30.0;
// For k = 2 the norm ratio approaches its limit rho from below like
// gamma / ||u||^2; the correction is fitted between iterations m/2 and m.
constexpr int kCurvedWarmup = 10;
constexpr double kCurvedMargin = 0.25;

Eigen::VectorXd checked_poisson(const Discretization& disc, const Eigen::VectorXd& f)
{
    Eigen::VectorXd u = disc.solve_laplacian(f);
    const double residual = (disc.laplacian() * u - f).lpNorm<Eigen::Infinity>();
    const double scale = f.lpNorm<Eigen::Infinity>();
    if (!(residual <= 1e-10 * scale) && !(scale == 0.0 && residual == 0.0)) {
        throw NumericalError("Poisson solve residual above 1e-10 of the source norm", residual);
    }
    return u;
}

}  // namespace

GridField solve_poisson(const ProblemSpec& spec, const GridField& source)
{
    const auto disc = discretization_for(spec.domain, spec.h);
    const Eigen::VectorXd f = disc->from_field(source);
    if (!f.allFinite()) {
        throw ParameterError("Poisson source must be finite on the mask");
    }
    return disc->to_field(checked_poisson(*disc, f));
}

Eigen::VectorXd regularized_source(const Discretization& disc, const ProblemSpec& spec, double lambda,
                                   const Eigen::VectorXd& u)
{
    Eigen::VectorXd f(disc.unknowns());
    for (int i = 0; i < disc.unknowns(); ++i) {
        const double base = spec.weight(disc.radius(i)) * (1.0 - lambda * u[i]);
        f[i] = spec.k == 1 ? base : std::pow(base, spec.k);
    }
    return f;
}

PicardResult solve_regularized_dirichlet(const ProblemSpec& spec, double lambda, MaWorkspace* shared)
{
    spec.validate_grid();
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw ParameterError("lambda must be finite and >= 0");
    }
    const auto disc_ptr = discretization_for(spec.domain, spec.h);
    const Discretization& disc = *disc_ptr;
    const auto& c = spec.controls;
    const int n = disc.unknowns();

    MaWorkspace local;
    MaWorkspace& workspace = shared ? *shared : local;
    auto apply_solver = [&](const Eigen::VectorXd& f, const Eigen::VectorXd& current, bool first) {
        if (spec.k == 1) {
            return checked_poisson(disc, f);
        }
        return monge_ampere_solve(disc, f, c, first ? nullptr : &current, nullptr, &workspace);
    };

    PicardResult out;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd prev_d;
    double prev_inc = 0.0;
    int growth_run = 0;
    int up_run = 0;
    int down_run = 0;
    std::vector<double> norm_hist;
    std::vector<double> ratio_hist;
    double prev_rho = NAN;

    auto finish = [&](PicardStatus status, const Eigen::VectorXd& field) {
        out.status = status;
        out.field = disc.to_field(field);
        return out;
    };

    for (int m = 1; m <= c.max_picard; ++m) {
        Eigen::VectorXd next = apply_solver(regularized_source(disc, spec, lambda, u), u, m == 1);
        Eigen::VectorXd d = u - next;  // non-negative for a monotone run
        const double unorm = u.lpNorm<Eigen::Infinity>();
        const double next_norm = next.lpNorm<Eigen::Infinity>();
        const double inc = d.lpNorm<Eigen::Infinity>();
        out.iterations = m;
        out.increment = inc;
        out.monotone_violation = std::max(out.monotone_violation, std::max(0.0, -d.minCoeff()) / std::max(1.0, next_norm));
        if (out.monotone_violation > c.monotone_tol) {
            throw NumericalError("Picard iterates are not monotone (lambda = " + std::to_string(lambda) + ")",
                                 out.monotone_violation);
        }
        if (!next.allFinite() || next.minCoeff() < -c.blowup_cap) {
            return finish(PicardStatus::blow_up, next);
        }
        growth_run = (m > 1 && next_norm > 2.0 * unorm) ? growth_run + 1 : 0;
        if (growth_run >= c.growth_window) {
            return finish(PicardStatus::blow_up, next);
        }
        if (inc <= c.picard_tol * std::max(1.0, next_norm)) {
            out.ratio_low = out.ratio_high = prev_inc > 0.0 ? inc / prev_inc : 0.0;
            return finish(PicardStatus::converged, next);
        }

        if (prev_d.size() == n) {
            const double floor = 1e-12 * prev_d.lpNorm<Eigen::Infinity>();
            double lo = INFINITY;
            double hi = -INFINITY;
            for (int i = 0; i < n; ++i) {
                if (prev_d[i] > floor) {
                    const double r = d[i] / prev_d[i];
                    lo = std::min(lo, r);
                    hi = std::max(hi, r);
                }
            }
            out.ratio_low = lo;
            out.ratio_high = hi;
            if (spec.k == 1 && m > kRatioWarmup) {
                up_run = lo > 1.0 ? up_run + 1 : 0;
                down_run = hi < 1.0 ? down_run + 1 : 0;
                if (up_run >= c.ratio_confirm) {
                    return finish(PicardStatus::blow_up, next);
                }
                if (down_run >= c.ratio_confirm) {
                    const double rate = inc / prev_inc;
                    const double remaining = std::log(c.picard_tol * std::max(1.0, next_norm) / inc) / std::log(hi);
                    if (rate < 1.0 && remaining > kTailIterations) {
                        out.extrapolated = true;
                        return finish(PicardStatus::converged, next - d * (rate / (1.0 - rate)));
                    }
                }
            }
            if (spec.k != 1) {
                norm_hist.push_back(next_norm);
                ratio_hist.push_back(inc / prev_inc);
                const auto last = norm_hist.size() - 1;
                if (m >= kCurvedWarmup) {
                    const auto mid = last / 2;
                    const double tm = norm_hist[last];
                    const double tj = norm_hist[mid];
                    const double span = 1.0 / (tj * tj) - 1.0 / (tm * tm);
                    const double gamma = span > 0.0 ? std::max(0.0, (ratio_hist[last] - ratio_hist[mid]) / span) : 0.0;
                    const double corr = gamma / (tm * tm);
                    const double rho = ratio_hist[last] + corr;
                    const double margin = kCurvedMargin * corr + (std::isnan(prev_rho) ? corr : std::abs(rho - prev_rho));
                    prev_rho = rho;
                    out.ratio_low = rho - margin;
                    out.ratio_high = rho + margin;
                    up_run = (lo > 1.0 || rho - margin > 1.0) ? up_run + 1 : 0;
                    down_run = rho + margin < 1.0 ? down_run + 1 : 0;
                    if (up_run >= c.ratio_confirm) {
                        return finish(PicardStatus::blow_up, next);
                    }
                    if (down_run >= c.ratio_confirm) {
                        const double remaining = std::log(c.picard_tol * std::max(1.0, next_norm) / inc) / std::log(rho);
                        if (remaining > kTailIterations) {
                            Eigen::VectorXd tail = next - d * (rho / (1.0 - rho));
                            const double scale = tail.lpNorm<Eigen::Infinity>();
                            if (min_hessian_eigenvalue(disc, tail) >= -1e-8 * scale) {
                                out.extrapolated = true;
                                return finish(PicardStatus::converged, tail);
                            }
                            return finish(PicardStatus::converged, next);
                        }
                    }
                }
            }
        }
        prev_d = std::move(d);
        prev_inc = inc;
        u = std::move(next);
    }
    throw NumericalError("Picard iteration hit its cap without settling (lambda = " + std::to_string(lambda) + ")",
                         out.increment);
}

}  // namespace hesseig
