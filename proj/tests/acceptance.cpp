// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Expensive fields are computed once and shared.

#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/bessel.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "hesseig/dirichlet.hpp"
#include "hesseig/eigensolve.hpp"
#include "hesseig/flow.hpp"
#include "hesseig/radial.hpp"
#include "hesseig/run.hpp"
#include "hesseig/symfun.hpp"
#include "hesseig/variational.hpp"
#include "hesseig/verify.hpp"
#include "support/generators.hpp"

namespace {

using namespace hesseig;
using testing::Gen;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

const double j01 = boost::math::cyl_bessel_j_zero(0.0, 1);

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* pattern, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

ProblemSpec spec_of(int k, double s, double delta, double h)
{
    ProblemSpec spec;
    spec.k = k;
    spec.s = s;
    spec.delta = delta;
    spec.h = h;
    return spec;
}

double rel(double a, double b)
{
    return std::abs(a / b - 1.0);
}

// Shared solves.
struct Fine {
    ProblemSpec spec;
    LambdaSearch search;
    double seconds = 0.0;
    double oracle = 0.0;
};

Fine& fine(int k)
{
    static std::map<int, Fine> cache;
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;
    Fine f;
    f.spec = spec_of(k, 0.0, 0.0, 1.0 / 128);
    if (k == 2) f.spec.controls.bracket_tol = 1e-5;
    const auto t0 = Clock::now();
    f.search = find_lambda_delta(f.spec);
    f.seconds = seconds_since(t0);
    f.oracle = k == 1 ? j01 * j01 : shoot_eigen(2, 2, 0.0, 1.0, 1e-12).lambda1;
    return cache.emplace(k, std::move(f)).first->second;
}

const std::vector<double> kDeltas{0.2, 0.1, 0.05, 0.025};

struct Sweep {
    SweepReport report;
    double seconds = 0.0;
};

Sweep& sweep(int k, double s)
{
    static std::map<std::pair<int, double>, Sweep> cache;
    const auto key = std::make_pair(k, s);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    Sweep sw;
    const auto t0 = Clock::now();
    sw.report = sweep_delta(spec_of(k, s, 0.0, k == 1 ? 1.0 / 128 : 1.0 / 32), kDeltas);
    sw.seconds = seconds_since(t0);
    return cache.emplace(key, std::move(sw)).first->second;
}

Verdict bessel_match()
{
    const Fine& f = fine(1);
    const double err = rel(f.search.lambda_delta, f.oracle);
    return {err <= 5e-3 && f.seconds <= 60.0,
            fmt("lambda=%.6f oracle=%.6f rel=%.2e time=%.1fs (tol 0.5%%, 60s)", f.search.lambda_delta, f.oracle, err,
                f.seconds)};
}

Verdict weighted_bessel_match()
{
    const Sweep& sw = sweep(1, -0.25);
    const double oracle = bessel_weighted_eigen(2, -0.25, 1.0);
    const double err = rel(sw.report.lambda1, oracle);
    return {err <= 2e-2 && sw.seconds <= 300.0,
            fmt("lambda1=%.5f (%s, q=%.2f) oracle=%.5f rel=%.2e time=%.1fs (tol 2%%, 300s)", sw.report.lambda1,
                sw.report.method.c_str(), sw.report.exponent_q, oracle, err, sw.seconds)};
}

Verdict monge_ampere_match()
{
    const Fine& f = fine(2);
    const double err = rel(f.search.lambda_delta, f.oracle);
    return {err <= 1e-2, fmt("lambda=%.6f shoot=%.6f rel=%.2e time=%.1fs (tol 1%%)", f.search.lambda_delta, f.oracle,
                             err, f.seconds)};
}

Verdict delta_monotonicity()
{
    std::string detail;
    bool pass = true;
    for (int k : {1, 2}) {
        for (double s : {-0.25, 0.5}) {
            const SweepReport& rep = sweep(k, s).report;
            pass = pass && rep.monotonicity_violations == 0 && rep.expected_direction != "none";
            detail += fmt("k=%d s=%+.2f %s violations=%d; ", k, s, rep.expected_direction.c_str(),
                          rep.monotonicity_violations);
        }
    }
    return {pass, detail};
}

Verdict scaling_law()
{
    std::string detail;
    bool pass = true;
    for (double s : {-0.25, 0.0}) {
        for (double t : {0.5, 2.0}) {
            const ScalingCheck c = scaling_law_check(spec_of(1, s, s < 0 ? 0.1 : 0.0, 1.0 / 64), t);
            const double err = rel(c.ratio, c.expected);
            pass = pass && err <= 2e-2;
            detail += fmt("s=%+.2f t=%.1f ratio=%.5f expected=%.5f; ", s, t, c.ratio, c.expected);
        }
    }
    return {pass, detail + "(tol 2%)"};
}

Verdict domain_monotonicity()
{
    std::string detail;
    bool pass = true;
    const std::vector<DomainDescriptor> chain{DomainDescriptor::disk(1.0), DomainDescriptor::ellipse(1.2, 1.0),
                                              DomainDescriptor::disk(1.2)};
    for (int k : {1, 2}) {
        ProblemSpec spec = spec_of(k, 0.0, 0.0, k == 1 ? 1.0 / 64 : 1.0 / 32);
        std::vector<double> lambda;
        for (const auto& d : chain) {
            spec.domain = d;
            lambda.push_back(find_lambda_delta(spec).lambda_delta);
        }
        // Each bracket is relative width <= bracket_tol; allow both.
        const double slack = 2 * spec.controls.bracket_tol;
        for (std::size_t i = 1; i < lambda.size(); ++i) pass = pass && lambda[i] <= lambda[i - 1] * (1 + slack);
        detail += fmt("k=%d: %.5f >= %.5f >= %.5f; ", k, lambda[0], lambda[1], lambda[2]);
    }
    return {pass, detail};
}

QuadratureField mix(const QuadratureField& a, double t, const GridField& b)
{
    GridField f = a.field();
    for (std::size_t n = 0; n < f.values().size(); ++n) f[n] = (1 - t) * a.field()[n] + t * b[n];
    return QuadratureField(f, a.domain());
}

Verdict rayleigh()
{
    std::string detail;
    bool pass = true;
    Gen gen(2024);
    int violations = 0;
    for (int k : {1, 2}) {
        const Fine& f = fine(k);
        const QuadratureField phi(f.search.result.field, f.spec.domain);
        const double target = std::pow(f.oracle, k);
        const double at_phi = rayleigh_quotient(phi, f.spec);
        const double err = rel(at_phi, target);
        pass = pass && err <= 1e-2;
        // Measured discretization error of the eigenvalue and of the quotient.
        const double tol =
            std::max({f.spec.controls.bracket_tol, rel(f.search.lambda_delta, f.oracle), err});
        const double floor = target * (1 - 3 * tol);
        const auto disc = discretization_for(f.spec.domain, f.spec.h);
        double worst = std::numeric_limits<double>::infinity();
        for (int trial = 0; trial < 10; ++trial) {
            const double a = gen.uniform(0.5, 2.0), b = gen.uniform(-0.4, 0.4), c = gen.uniform(-0.4, 0.4),
                         d = gen.uniform(0.0, 1.0);
            Eigen::VectorXd src(disc->unknowns());
            for (int i = 0; i < src.size(); ++i)
                src[i] = a + b * disc->x(i) + c * disc->y(i) + d * disc->radius(i) * disc->radius(i);
            const GridField rhs = disc->to_field(src);
            const GridField v = k == 1 ? solve_poisson(f.spec, rhs) : solve_monge_ampere_2d(f.spec, rhs);
            const double q = rayleigh_quotient(mix(phi, gen.uniform(0.02, 1.0), v), f.spec);
            worst = std::min(worst, q / target);
            violations += q < floor;
        }
        detail += fmt("k=%d quotient/lambda^k=%.5f tol=%.2e min perturbed=%.5f; ", k, at_phi / target, tol, worst);
    }
    return {pass && violations == 0, detail + fmt("violations=%d of 20", violations)};
}

Verdict symfun_properties()
{
    constexpr int kSamples = 10000;
    Gen gen(7);
    int violations = 0;
    auto point = [](const std::vector<double>& v) { return SpectrumPoint(v); };
    for (int trial = 0; trial < kSamples; ++trial) {
        // Enumeration, exact on integers.
        {
            const int n = gen.integer(1, 8), k = gen.integer(0, n);
            const auto l = gen.integers(n, -9, 9);
            violations += sigma(point(l), k) != testing::sigma_by_subsets(l, k);
        }
        // (i) sum_i sigma_{k-1}(l|i) = (n-k+1) sigma_{k-1}(l).
        {
            const int n = gen.integer(1, 8), k = gen.integer(1, n);
            const auto l = gen.vector(n, -2.0, 2.0);
            double sum = 0.0, scale = 0.0;
            for (int i = 0; i < n; ++i) sum += sigma_partial(point(l), k - 1, static_cast<std::size_t>(i));
            for (int i = 0; i < n; ++i) scale += std::abs(sigma_partial(point(l), k - 1, static_cast<std::size_t>(i)));
            violations += std::abs(sum - (n - k + 1) * sigma(point(l), k - 1)) > 1e-12 * std::max(1.0, scale);
        }
        const int n = gen.integer(2, 8), k = gen.integer(1, n);
        auto l = gen.cone_point(n, k);
        const auto m = gen.cone_point(n, k);
        // (ii) sigma_{k-1}(l|i) > 0 and ordered opposite to l.
        {
            std::vector<double> sorted = l;
            std::sort(sorted.begin(), sorted.end(), std::greater<>());
            double prev = 0.0;
            for (int i = 0; i < n; ++i) {
                const double v = sigma_partial(point(sorted), k - 1, static_cast<std::size_t>(i));
                violations += !(v > 0.0) || v < prev - 1e-12 * std::abs(v);
                prev = v;
            }
        }
        // (iv) Maclaurin.
        if (k >= 2) {
            const double lhs = std::pow(sigma(point(l), k - 1) / binomial(n, k - 1), 1.0 / (k - 1));
            const double rhs = std::pow(sigma(point(l), k) / binomial(n, k), 1.0 / k);
            violations += lhs < rhs * (1 - 1e-12);
        }
        // (v) Garding.
        {
            double lhs = 0.0;
            for (int i = 0; i < n; ++i)
                lhs += m[static_cast<std::size_t>(i)] * sigma_partial(point(l), k - 1, static_cast<std::size_t>(i));
            const double rhs = k * std::pow(sigma(point(l), k), (k - 1.0) / k) * std::pow(sigma(point(m), k), 1.0 / k);
            violations += lhs < rhs * (1 - 1e-12);
        }
        // Concavity of sigma_k^{1/k}.
        {
            const double t = gen.uniform(0.0, 1.0);
            std::vector<double> c(l.size());
            for (std::size_t i = 0; i < l.size(); ++i) c[i] = t * l[i] + (1 - t) * m[i];
            auto root = [k, &point](const std::vector<double>& v) { return std::pow(sigma(point(v), k), 1.0 / k); };
            const double rhs = t * root(l) + (1 - t) * root(m);
            violations += root(c) < rhs * (1 - 1e-12);
        }
        // det(F^{ij}) > 0 for the linearized coefficients of an admissible Hessian.
        {
            const SymMatrix h = gen.admissible_matrix(std::min(n, 5), std::min(k, std::min(n, 5)));
            const SymMatrix a = linearized_coeffs(h, std::min(k, std::min(n, 5)));
            Eigen::MatrixXd dense(a.dim(), a.dim());
            for (int i = 0; i < a.dim(); ++i)
                for (int j = 0; j < a.dim(); ++j) dense(i, j) = a(i, j);
            violations += !(dense.determinant() > 0.0);
        }
    }
    return {violations == 0, fmt("%d samples per property, violations=%d", kSamples, violations)};
}

QuadratureField paraboloid(const ProblemSpec& spec)
{
    const auto disc = discretization_for(spec.domain, spec.h);
    Eigen::VectorXd v(disc->unknowns());
    for (int i = 0; i < v.size(); ++i) v(i) = 0.5 * (disc->radius(i) * disc->radius(i) - 1);
    return QuadratureField(disc->to_field(v), spec.domain);
}

Verdict gradient_flow_descent()
{
    const ProblemSpec spec = spec_of(1, 0.0, 0.1, 1.0 / 32);
    FlowOptions o;
    o.M = 10.0;
    o.p = 0.5;
    o.t_end = 10.0;
    const GridFlowResult r = gradient_flow(paraboloid(spec), spec, o);
    const auto& s = r.trajectory.samples;
    int rises = 0;
    for (std::size_t i = 1; i < s.size(); ++i) rises += s[i].J > s[i - 1].J + 1e-10;
    const double drop = s.front().residual / s.back().residual;
    return {rises == 0 && drop >= 10.0,
            fmt("steps=%d J %.6f -> %.6f rises=%d residual %.2e -> %.2e (drop %.1fx, need 10x)", r.trajectory.accepted,
                s.front().J, s.back().J, rises, s.front().residual, s.back().residual, drop)};
}

Verdict fundamental_and_wolff()
{
    const std::vector<double> radii{0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0};
    double worst = 0.0;
    for (int n = 2; n <= 5; ++n)
        for (int k = 1; k <= n; ++k) worst = std::max(worst, fundamental_residual(n, k, radii));
    double wolff = 0.0;
    for (int n = 3; n <= 6; ++n) {
        for (int k = n / 2 + 1; k < n; ++k) {
            for (double s : {-0.25, 0.0, 0.5}) {
                for (double r : {0.5, 1.0, 2.0}) {
                    const double a = n + 2 * s * k, c = 1.7;
                    const double e = (a - n + 2.0 * k) / k;
                    const double exact = std::pow(c, 1.0 / k) * std::pow(r, e) / e;
                    const double got = wolff_potential([&](double t) { return c * std::pow(t, a); }, n, k, r);
                    wolff = std::max(wolff, rel(got, exact));
                }
            }
        }
    }
    return {worst <= 1e-10 && wolff <= 1e-6,
            fmt("max |S_k(D^2 w_k)|=%.2e (tol 1e-10), Wolff max rel=%.2e (tol 1e-6)", worst, wolff)};
}

GridField lattice_field(const DomainDescriptor& domain, double h, const std::function<double(double, double)>& fn)
{
    const GridGeometry g = covering_geometry(domain, h);
    std::vector<std::uint8_t> mask(g.size());
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) mask[static_cast<std::size_t>(g.index(i, j))] = domain.contains(g.x(i), g.y(j));
    GridField f(g, mask);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const auto node = static_cast<std::size_t>(g.index(i, j));
            if (f.inside(node)) f[node] = fn(g.x(i), g.y(j));
        }
    return f;
}

Verdict holder()
{
    ProblemSpec spec = spec_of(2, -0.25, 0.025, 1.0 / 128);
    double synthetic = 0.0;
    for (double alpha : {0.5, 1.0, 1.5, 2.0, 2.5}) {
        const GridField u =
            lattice_field(spec.domain, spec.h, [&](double x, double y) { return std::pow(std::hypot(x, y), alpha) - 1; });
        synthetic = std::max(synthetic, std::abs(holder_probe(u, spec).alpha - alpha));
    }
    // Only the field is needed; a loose bracket suffices.
    spec.controls.bracket_tol = 1e-3;
    const HolderFit fit = holder_probe(find_lambda_delta(spec).result.field, spec);
    return {synthetic <= 0.05 && fit.alpha > 1.0,
            fmt("synthetic max |error|=%.3f (tol 0.05); eigenfunction k=2 s=-0.25 delta=%.3f alpha=%.3f > 1 "
                "(fit residual %.2e, %zu radii)",
                synthetic, spec.delta, fit.alpha, fit.residual, fit.radii.size())};
}

double spread(const SweepReport& rep, const std::function<double(const EstimateReport&)>& get)
{
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& row : rep.rows) {
        lo = std::min(lo, get(row.norms));
        hi = std::max(hi, get(row.norms));
    }
    return hi / lo;
}

Verdict estimate_uniformity()
{
    const SweepReport& neg = sweep(1, -0.25).report;
    const SweepReport& pos = sweep(1, 0.5).report;
    const double k = spread(neg, [](const EstimateReport& e) { return e.K; });
    const double l = spread(neg, [](const EstimateReport& e) { return e.L_beta; });
    const double kh = spread(pos, [](const EstimateReport& e) { return e.K_hat; });
    const double lh = spread(pos, [](const EstimateReport& e) { return e.L_hat; });
    return {k < 2 && l < 2 && kh < 2 && lh < 2,
            fmt("s=-0.25: K %.3f, L_beta %.3f; s=+0.5: K_hat %.3f, L_hat %.3f (max/min, need < 2)", k, l, kh, lh)};
}

Verdict linearized()
{
    std::string detail;
    bool pass = true;
    for (int k : {1, 2}) {
        const Fine& f = fine(k);
        const LinearizedEigen e = linearized_eigen(f.search.result.field, f.spec);
        const double err = rel(e.lambda_phi, f.search.lambda_delta);
        pass = pass && err <= 3e-2 && e.one_signed;
        detail += fmt("k=%d lambda_phi=%.5f lambda=%.5f rel=%.2e one-signed=%s; ", k, e.lambda_phi,
                      f.search.lambda_delta, err, e.one_signed ? "yes" : "no");
    }
    return {pass, detail + "(tol 3%)"};
}

std::map<std::string, std::string> csv_files(const std::string& dir)
{
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() != ".csv") continue;
        std::ifstream f(entry.path(), std::ios::binary);
        std::stringstream ss;
        ss << f.rdbuf();
        out[entry.path().filename().string()] = ss.str();
    }
    return out;
}

Verdict determinism()
{
    const fs::path root = fs::temp_directory_path() / "hesseig-acceptance-determinism";
    fs::remove_all(root);
    const std::vector<std::string> configs = {
        "[run]\nmode = sweep\n[problem]\nn = 2\nk = 2\ns = -0.25\ndelta = 0.2, 0.1\n[solver]\nh = 1/32\n",
        "[run]\nmode = eigen\n[problem]\nn = 2\nk = 1\ns = 0.5\n[solver]\nh = 1/64\n",
        "[run]\nmode = flow\n[problem]\nn = 2\nk = 1\ndelta = 0.1\n[solver]\nh = 1/32\n[flow]\np = 0.5\n",
    };
    int files = 0, mismatches = 0;
    std::ostringstream sink;
    for (std::size_t c = 0; c < configs.size(); ++c) {
        std::map<std::string, std::string> first;
        for (int rep = 0; rep < 2; ++rep) {
            const std::string dir = (root / (std::to_string(c) + "-" + std::to_string(rep))).string();
            if (run(parse_config(configs[c]), sink, sink, RunOptions{dir}).exit_code != 0) {
                return {false, "run failed: " + sink.str()};
            }
            const auto now = csv_files(dir);
            if (rep == 0) {
                first = now;
                files += static_cast<int>(now.size());
            } else {
                mismatches += now != first;
            }
        }
    }
    fs::remove_all(root);
    return {files > 0 && mismatches == 0, fmt("%d CSV files over %zu configurations, mismatching runs=%d", files,
                                             configs.size(), mismatches)};
}

}  // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"Bessel oracle match (k=1, h=1/128)", bessel_match},
        {"weighted Bessel match (s=-1/4 sweep)", weighted_bessel_match},
        {"Monge-Ampere cross-oracle (h=1/128)", monge_ampere_match},
        {"delta-monotonicity sign rule", delta_monotonicity},
        {"scaling law", scaling_law},
        {"domain monotonicity", domain_monotonicity},
        {"Rayleigh characterization", rayleigh},
        {"symmetric-function properties", symfun_properties},
        {"gradient flow descent (k=1 disk)", gradient_flow_descent},
        {"fundamental solutions and Wolff potential", fundamental_and_wolff},
        {"Hoelder probe", holder},
        {"estimate uniformity across delta", estimate_uniformity},
        {"linearized eigenproblem", linearized},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = Clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += !v.pass;
        std::printf("%s %2zu %s: %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    v.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
