#include "hesseig/eigensolve.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "hesseig/dirichlet.hpp"
#include "hesseig/errors.hpp"
#include "hesseig/stencil.hpp"

namespace hesseig {

namespace {

// Trial points are placed this fraction of the bracket tolerance either side
// of the ratio estimate, so an accurate estimate closes the bracket in two runs.
constexpr double kEstimateOffset = 0.45;

double ratio_estimate(const PicardResult& run)
{
    const double lo = run.ratio_low;
    const double hi = run.ratio_high;
    if (!(lo > 0.0) || !std::isfinite(lo) || !std::isfinite(hi)) {
        return NAN;
    }
    return 0.5 * (lo + hi);
}

GridField normalized_nonpositive(const Discretization& disc, const Eigen::VectorXd& u, double& sup)
{
    sup = u.lpNorm<Eigen::Infinity>();
    if (!(sup > 0.0)) {
        throw DegenerateInputError("eigenfunction candidate vanishes identically");
    }
    Eigen::VectorXd v = u / sup;
    if (v.maxCoeff() > -v.minCoeff()) {
        v = -v;
    }
    v = v.cwiseMin(0.0);
    return disc.to_field(v);
}

Eigen::VectorXd weights(const Discretization& disc, const ProblemSpec& spec)
{
    Eigen::VectorXd w(disc.unknowns());
    for (int i = 0; i < disc.unknowns(); ++i) {
        w[i] = spec.weight(disc.radius(i));
    }
    return w;
}

std::string format_g(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

LambdaSearch find_lambda_delta(const ProblemSpec& spec)
{
    spec.validate_grid();
    const auto disc = discretization_for(spec.domain, spec.h);
    const auto& c = spec.controls;
    MaWorkspace workspace;
    EigenDiagnostics diag;

    auto run = [&](double lambda) {
        PicardResult r = solve_regularized_dirichlet(spec, lambda, &workspace);
        diag.solves += 1;
        diag.inner_iterations += r.iterations;
        return r;
    };

    PicardResult lo_run = run(0.0);
    if (lo_run.status != PicardStatus::converged) {
        throw NumericalError("Picard iteration does not converge at lambda = 0");
    }
    const double eta_norm = lo_run.field.sup_norm();
    if (!(eta_norm > 0.0)) {
        throw DegenerateInputError("solution at lambda = 0 vanishes");
    }

    double lo = 0.0;
    double hi = INFINITY;
    double estimate = NAN;
    // Relative half-width of the ratio interval behind `estimate`.
    double spread = 0.0;
    std::vector<double> widths;
    const double tol = c.bracket_tol;

    for (int step = 0;; ++step) {
        if (std::isfinite(hi) && hi - lo <= tol * hi) {
            break;
        }
        if (step >= c.max_bisections) {
            throw NumericalError("lambda bracket did not close within the bisection cap", (hi - lo) / hi);
        }
        double trial;
        if (!std::isfinite(hi)) {
            if (step == 0) {
                trial = 0.5 / eta_norm;
            } else if (std::isfinite(estimate) && estimate > lo) {
                trial = estimate * (1.0 + std::max(kEstimateOffset * tol, 2.0 * spread));
            } else {
                trial = 2.0 * lo;
            }
            // Guard against estimates that stall just above lo.
            trial = std::max(trial, lo * (1.0 + tol));
            if (lo >= c.lambda_ceiling) {
                throw BracketError("no blow-up found below the lambda ceiling " + format_g(c.lambda_ceiling));
            }
            trial = std::min(trial, c.lambda_ceiling);
        } else {
            const double mid = 0.5 * (lo + hi);
            trial = mid;
            const bool stalled = widths.size() >= 2 && (hi - lo) > 0.5 * widths[widths.size() - 2];
            const double offset = std::max(kEstimateOffset * tol, 2.0 * spread) * estimate;
            // A trial next to the threshold takes the longest to classify.
            const bool near = std::abs(mid - estimate) < offset;
            if ((!stalled || near) && std::isfinite(estimate) && estimate > lo && estimate < hi) {
                trial = (estimate - lo > hi - estimate) ? estimate - offset : estimate + offset;
                if (!(trial > lo && trial < hi)) {
                    trial = mid;
                }
            }
        }

        PicardResult r = run(trial);
        const double q = ratio_estimate(r);
        if (r.status == PicardStatus::converged) {
            lo = trial;
            lo_run = std::move(r);
        } else {
            hi = trial;
        }
        if (std::isfinite(q) && q > 0.0) {
            estimate = trial / q;
            spread = 0.5 * (r.ratio_high - r.ratio_low) / q;
        }
        if (std::isfinite(hi)) {
            widths.push_back(hi - lo);
        }
    }

    LambdaSearch out;
    out.lambda_delta = 0.5 * (lo + hi);
    EigenResult& res = out.result;
    res.lambda = out.lambda_delta;
    res.delta = spec.delta;
    res.method = "bisection";
    const Eigen::VectorXd u = disc->from_field(lo_run.field);
    res.field = normalized_nonpositive(*disc, u, res.sup_norm_at_bracket);
    diag.bracket_low = lo;
    diag.bracket_high = hi;
    diag.tail_extrapolated = lo_run.extrapolated;
    res.iterations = diag;
    res.residual = eigen_residual(res, spec);
    return out;
}

double eigen_residual(const EigenResult& result, const ProblemSpec& spec)
{
    const auto disc = discretization_for(spec.domain, spec.h);
    const Eigen::VectorXd v = disc->from_field(result.field);
    if (v.lpNorm<Eigen::Infinity>() == 0.0) {
        return NAN;
    }
    const Eigen::VectorXd lhs = spec.k == 1 ? Eigen::VectorXd(disc->laplacian() * v) : discrete_det(*disc, v);
    const double h = disc->h();
    double num = 0.0;
    double den = 0.0;
    for (int i = 0; i < disc->unknowns(); ++i) {
        if (disc->boundary_distance(i) < 2.0 * h || disc->radius(i) < 2.0 * h) {
            continue;
        }
        const double rhs = std::pow(spec.weight(disc->radius(i)) * result.lambda * std::abs(v[i]), spec.k);
        num = std::max(num, std::abs(lhs[i] - rhs));
        den = std::max(den, rhs);
    }
    return den > 0.0 ? num / den : NAN;
}

EigenResult inverse_power_iteration(const ProblemSpec& spec, int max_outer, const std::optional<InitialGuess>& initial)
{
    spec.validate_grid();
    if (max_outer < 1) {
        throw ParameterError("max_outer must be positive");
    }
    const auto disc_ptr = discretization_for(spec.domain, spec.h);
    const Discretization& disc = *disc_ptr;
    const auto& c = spec.controls;
    const Eigen::VectorXd w = weights(disc, spec);
    MaWorkspace workspace;
    EigenDiagnostics diag;
    diag.converged = false;

    auto solve = [&](const Eigen::VectorXd& f, const Eigen::VectorXd* warm) -> Eigen::VectorXd {
        if (spec.k == 1) {
            return disc.solve_laplacian(f);
        }
        MaStats stats;
        Eigen::VectorXd out = monge_ampere_solve(disc, f, c, warm, &stats, &workspace);
        diag.inner_iterations += stats.iterations;
        return out;
    };

    Eigen::VectorXd u;
    double lambda = 1.0;
    if (initial) {
        u = disc.from_field(initial->field);
        lambda = initial->lambda;
        if (!(lambda > 0.0)) {
            throw ParameterError("initial lambda must be positive");
        }
    } else {
        u = solve(w.array().pow(spec.k).matrix(), nullptr);
    }
    const double norm0 = u.lpNorm<Eigen::Infinity>();
    if (!(norm0 > 0.0)) {
        throw DegenerateInputError("initial field vanishes identically");
    }
    u = -(u / norm0).cwiseAbs();

    for (int m = 1; m <= max_outer; ++m) {
        const Eigen::VectorXd f = (lambda * w.cwiseProduct(u.cwiseAbs())).array().pow(spec.k).matrix();
        const Eigen::VectorXd next = solve(f, &u);
        const double scale = next.lpNorm<Eigen::Infinity>();
        if (!(scale > 0.0) || !std::isfinite(scale)) {
            throw NumericalError("inverse power iterate vanished or overflowed", scale);
        }
        const double lambda_next = lambda / scale;
        const Eigen::VectorXd u_next = next / scale;
        const double du = (u_next - u).lpNorm<Eigen::Infinity>();
        const double dl = std::abs(lambda_next - lambda) / lambda_next;
        u = u_next;
        lambda = lambda_next;
        diag.solves = m;
        if (dl <= c.power_tol && du <= c.power_tol) {
            diag.converged = true;
            break;
        }
    }

    EigenResult res;
    res.lambda = lambda;
    res.delta = spec.delta;
    res.method = "inverse_power";
    double sup = 0.0;
    res.field = normalized_nonpositive(disc, u, sup);
    res.sup_norm_at_bracket = sup;
    diag.bracket_low = diag.bracket_high = lambda;
    res.iterations = diag;
    res.residual = eigen_residual(res, spec);
    return res;
}

Extrapolation richardson(const std::vector<double>& deltas, const std::vector<double>& lambdas)
{
    if (deltas.size() != lambdas.size() || deltas.empty()) {
        throw ParameterError("richardson needs matching, non-empty delta and lambda lists");
    }
    Extrapolation ex;
    const std::size_t n = deltas.size();
    ex.lambda1 = lambdas.back();
    if (n < 3) {
        return ex;
    }
    const double da = deltas[n - 3], db = deltas[n - 2], dc = deltas[n - 1];
    const double la = lambdas[n - 3], lb = lambdas[n - 2], lc = lambdas[n - 1];
    const double d1 = la - lb;
    const double d2 = lb - lc;
    if (!(d1 * d2 > 0.0)) {
        return ex;
    }
    const double target = d1 / d2;
    auto g = [&](double q) {
        return (std::pow(da, q) - std::pow(db, q)) / (std::pow(db, q) - std::pow(dc, q)) - target;
    };
    double qlo = 0.05, qhi = 8.0;
    if (g(qlo) * g(qhi) > 0.0) {
        return ex;
    }
    for (int i = 0; i < 200 && qhi - qlo > 1e-14; ++i) {
        const double mid = 0.5 * (qlo + qhi);
        ((g(mid) > 0.0) == (g(qhi) > 0.0) ? qhi : qlo) = mid;
    }
    const double q = 0.5 * (qlo + qhi);
    const double coef = d1 / (std::pow(da, q) - std::pow(db, q));
    ex.q = q;
    ex.lambda1 = lc - coef * std::pow(dc, q);
    ex.reliable = q >= 0.5 && q <= 2.0;
    if (n >= 4) {
        const double pred = ex.lambda1 + coef * std::pow(deltas[n - 4], q);
        ex.fit_residual = std::abs(pred - lambdas[n - 4]) / std::abs(lambdas[n - 4]);
        if (ex.fit_residual > 0.1) {
            ex.reliable = false;
        }
    }
    if (!ex.reliable) {
        ex.lambda1 = lc;
    }
    return ex;
}

SweepReport sweep_delta(const ProblemSpec& spec, const std::vector<double>& deltas, int jobs)
{
    spec.validate();
    if (deltas.empty()) {
        throw ParameterError("delta sweep needs at least one delta");
    }
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0)) {
            throw ParameterError("sweep deltas must all be positive");
        }
        if (i > 0 && !(deltas[i] < deltas[i - 1])) {
            throw ParameterError("sweep deltas must be strictly decreasing");
        }
    }

    std::vector<LambdaSearch> results(deltas.size());
    std::vector<std::exception_ptr> errors(deltas.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < deltas.size(); i = next++) {
            try {
                ProblemSpec local = spec;
                local.delta = deltas[i];
                results[i] = find_lambda_delta(local);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int threads = std::clamp(jobs, 1, static_cast<int>(deltas.size()));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }

    SweepReport report;
    std::vector<double> lambdas;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        ProblemSpec local = spec;
        local.delta = deltas[i];
        const auto& r = results[i].result;
        SweepRow row;
        row.delta = deltas[i];
        row.lambda = results[i].lambda_delta;
        row.bracket_width = r.iterations.bracket_high - r.iterations.bracket_low;
        row.norms = estimate_norms(r.field, local, spec.controls.beta, "delta=" + format_g(deltas[i]));
        row.residual = r.residual;
        row.sup_norm_at_bracket = r.sup_norm_at_bracket;
        report.rows.push_back(row);
        lambdas.push_back(row.lambda);
    }
    report.last_field = results.back().result.field;

    report.expected_direction = spec.s > 0.0 ? "increasing" : (spec.s < 0.0 ? "decreasing" : "none");
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        const auto& a = report.rows[i - 1];
        const auto& b = report.rows[i];
        const double slack = a.bracket_width + b.bracket_width;
        if ((spec.s > 0.0 && b.lambda < a.lambda - slack) || (spec.s < 0.0 && b.lambda > a.lambda + slack)) {
            report.monotonicity_violations += 1;
        }
    }
    const auto [mn, mx] = std::minmax_element(lambdas.begin(), lambdas.end());
    double mean = 0.0;
    for (double l : lambdas) {
        mean += l / static_cast<double>(lambdas.size());
    }
    report.max_relative_spread = (*mx - *mn) / mean;

    const Extrapolation ex = richardson(deltas, lambdas);
    report.lambda1 = ex.lambda1;
    report.exponent_q = ex.q;
    report.fit_residual = ex.fit_residual;
    report.extrapolation_reliable = ex.reliable;
    report.method = ex.reliable ? "richardson" : "smallest_delta";
    return report;
}

void SweepReport::write_csv(std::ostream& out) const
{
    out << "delta,lambda,K,L,Khat,Lhat\n";
    for (const auto& r : rows) {
        out << format_g(r.delta) << ',' << format_g(r.lambda) << ',' << format_g(r.norms.K) << ','
            << format_g(r.norms.L_beta) << ',' << format_g(r.norms.K_hat) << ',' << format_g(r.norms.L_hat) << '\n';
    }
    out << "# lambda1=" << format_g(lambda1) << " method=" << method << " q=" << format_g(exponent_q)
        << " fit_residual=" << format_g(fit_residual) << '\n';
    out << "# direction=" << expected_direction << " monotonicity_violations=" << monotonicity_violations
        << " beta=" << format_g(rows.empty() ? 0.0 : rows.front().norms.beta) << '\n';
}

}  // namespace hesseig
