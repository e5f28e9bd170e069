#include "hesseig/run.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <ostream>

#include "hesseig/dirichlet.hpp"
#include "hesseig/eigensolve.hpp"
#include "hesseig/flow.hpp"
#include "hesseig/radial.hpp"
#include "hesseig/variational.hpp"
#include "hesseig/verify.hpp"

namespace hesseig {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

Json config_json(const RunConfig& c)
{
    Json out = Json::object();
    for (const auto& [name, value] : config_entries(c)) {
        const auto dot = name.find('.');
        out[name.substr(0, dot)][name.substr(dot + 1)] = value;
    }
    return out;
}

Json diagnostics_json(const EigenDiagnostics& d)
{
    return {{"solves", d.solves},
            {"inner_iterations", d.inner_iterations},
            {"bracket_low", d.bracket_low},
            {"bracket_high", d.bracket_high},
            {"tail_extrapolated", d.tail_extrapolated},
            {"converged", d.converged}};
}

Json norms_json(const EstimateReport& e)
{
    return {{"K", e.K}, {"L_beta", e.L_beta}, {"beta", e.beta}, {"K_hat", e.K_hat},
            {"L_hat", e.L_hat}, {"field_id", e.field_id}, {"delta", e.delta}, {"nodes", e.nodes}};
}

std::string format_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

class Writer {
public:
    Writer(std::string dir, const OutputConfig& outputs) : dir_(std::move(dir)), outputs_(outputs) {}

    void ensure_dir()
    {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec || !fs::is_directory(dir_)) {
            throw IoError("cannot create output directory '" + dir_ + "'");
        }
    }

    std::string path(const std::string& name) const { return (fs::path(dir_) / name).string(); }

    void json(const std::string& name, const Json& body)
    {
        if (!outputs_.json) {
            return;
        }
        write_text(name, body.dump(2) + "\n");
    }

    template <class Fn>
    void csv(const std::string& name, Fn&& fill)
    {
        if (!outputs_.csv) {
            return;
        }
        std::ofstream f(path(name), std::ios::binary);
        if (!f) {
            throw IoError("cannot write '" + path(name) + "'");
        }
        fill(f);
        artifacts.push_back(path(name));
    }

    void field(const std::string& stem, const GridField& u)
    {
        csv(stem + ".csv", [&](std::ostream& o) { u.write_csv(o); });
        if (outputs_.binary) {
            u.write_binary(path(stem + ".hsgf"));
            artifacts.push_back(path(stem + ".hsgf"));
        }
    }

    void write_text(const std::string& name, const std::string& text)
    {
        std::ofstream f(path(name), std::ios::binary);
        if (!f) {
            throw IoError("cannot write '" + path(name) + "'");
        }
        f << text;
        artifacts.push_back(path(name));
    }

    std::vector<std::string> artifacts;

private:
    std::string dir_;
    OutputConfig outputs_;
};

Json report_header(const RunConfig& c)
{
    return {{"status", "ok"}, {"mode", to_string(c.mode)}, {"config", config_json(c)}};
}

void run_eigen(const RunConfig& c, Writer& w, std::ostream& out)
{
    ProblemSpec spec = c.spec;
    spec.delta = c.deltas.front();
    EigenResult res;
    if (c.method == EigenMethod::bisection) {
        res = find_lambda_delta(spec).result;
    } else {
        res = inverse_power_iteration(spec, spec.controls.power_max_outer);
        if (!res.iterations.converged) {
            throw NumericalError("inverse power iteration did not converge within power_max_outer", res.residual);
        }
    }
    Json body = report_header(c);
    body["result"] = {{"lambda", res.lambda},
                      {"delta", res.delta},
                      {"method", res.method},
                      {"residual", res.residual},
                      {"sup_norm_at_bracket", res.sup_norm_at_bracket},
                      {"diagnostics", diagnostics_json(res.iterations)}};
    body["norms"] = norms_json(estimate_norms(res.field, spec, spec.controls.beta, "eigenfunction"));
    w.field("eigenfunction", res.field);
    w.json("eigen.json", body);
    out << "lambda = " << format_number(res.lambda) << "\n";
}

void run_oracle(const RunConfig& c, Writer& w, std::ostream& out)
{
    const double R = c.spec.domain.a();
    ShootOptions opts;
    opts.steps = c.radial_steps;
    const RadialEigen e = shoot_eigen(c.spec.n, c.spec.k, c.spec.s, R, c.oracle_tol, opts);
    Json body = report_header(c);
    body["result"] = {{"lambda1", e.lambda1},
                      {"method", "shoot"},
                      {"bisection_width", e.bisection_width},
                      {"monotone_bracket", e.monotone_bracket},
                      {"origin_slope_exponent", e.origin_slope_exponent}};
    if (c.spec.k == 1) {
        body["result"]["bessel"] = bessel_weighted_eigen(c.spec.n, c.spec.s, R);
    }
    w.csv("oracle_profile.csv", [&](std::ostream& o) {
        o << "r,u,du\n";
        char line[96];
        for (std::size_t i = 0; i < e.profile.r.size(); ++i) {
            std::snprintf(line, sizeof line, "%.10g,%.15g,%.15g\n", e.profile.r[i], e.profile.u[i], e.profile.du[i]);
            o << line;
        }
    });
    w.json("oracle.json", body);
    out << "lambda1 = " << format_number(c.spec.k == 1 ? body["result"]["bessel"].get<double>() : e.lambda1) << "\n";
}

void run_sweep(const RunConfig& c, Writer& w, std::ostream& out)
{
    const SweepReport rep = sweep_delta(c.spec, c.deltas, c.jobs);
    Json rows = Json::array();
    for (const auto& r : rep.rows) {
        rows.push_back({{"delta", r.delta},
                        {"lambda", r.lambda},
                        {"bracket_width", r.bracket_width},
                        {"residual", r.residual},
                        {"sup_norm_at_bracket", r.sup_norm_at_bracket},
                        {"norms", norms_json(r.norms)}});
    }
    Json body = report_header(c);
    body["rows"] = rows;
    body["extrapolation"] = {{"lambda1", rep.lambda1},
                             {"method", rep.method},
                             {"q", rep.exponent_q},
                             {"fit_residual", rep.fit_residual},
                             {"reliable", rep.extrapolation_reliable}};
    body["monotonicity"] = {{"expected_direction", rep.expected_direction},
                            {"violations", rep.monotonicity_violations}};
    body["max_relative_spread"] = rep.max_relative_spread;
    w.csv("sweep.csv", [&](std::ostream& o) { rep.write_csv(o); });
    w.field("sweep_field", rep.last_field);
    w.json("sweep.json", body);
    for (const auto& r : rep.rows) {
        out << "delta = " << format_number(r.delta) << "  lambda = " << format_number(r.lambda) << "\n";
    }
    out << "lambda1 = " << format_number(rep.lambda1) << " (" << rep.method << ")\n";
}

// Runs `fn`, storing its value or the error message under `name`.
template <class Fn>
void checked(Json& into, const std::string& name, Fn&& fn)
{
    try {
        into[name] = fn();
    } catch (const Error& e) {
        into[name] = {{"error", e.kind()}, {"message", e.what()}};
    }
}

void run_verify(const RunConfig& c, Writer& w, std::ostream& out)
{
    if (!fs::exists(c.verify.snapshot)) {
        throw IoError("snapshot not found: '" + c.verify.snapshot + "'");
    }
    const GridField field = GridField::read_binary(c.verify.snapshot);
    ProblemSpec spec = c.spec;
    spec.delta = c.deltas.front();
    const QuadratureField q(field, spec.domain);
    Json checks = Json::object();
    checks["norms"] = norms_json(estimate_norms(field, spec, spec.controls.beta, c.verify.snapshot));
    checked(checks, "holder", [&] {
        const HolderFit fit = holder_probe(field, spec);
        return Json{{"alpha", fit.alpha}, {"radii", fit.radii}, {"oscillations", fit.oscillations},
                    {"residual", fit.residual}, {"threshold", 2.0 - static_cast<double>(spec.n) / spec.k}};
    });
    checked(checks, "boundary_slope", [&] {
        const BoundarySlope b = boundary_slope_check(field, spec);
        return Json{{"theta", b.theta}, {"max_ratio", b.max_ratio}, {"nodes", b.nodes}, {"degenerate", b.degenerate}};
    });
    checked(checks, "linearized", [&] {
        const LinearizedEigen l = linearized_eigen(field, spec);
        return Json{{"lambda_phi", l.lambda_phi}, {"one_signed", l.one_signed}, {"iterations", l.iterations}};
    });
    checked(checks, "rayleigh", [&] {
        const double rq = rayleigh_quotient(q, spec);
        Json j{{"quotient", rq}};
        if (c.verify.lambda > 0.0) {
            const double ref = std::pow(c.verify.lambda, spec.k);
            j["lambda_k"] = ref;
            j["relative_gap"] = rq / ref - 1.0;
        }
        return j;
    });
    checked(checks, "functional_Ik", [&] {
        const IkValue v = functional_Ik(q, spec.k);
        return Json{{"value", v.value}, {"by_parts", v.by_parts}};
    });
    Json fundamental = Json::array();
    const std::vector<double> radii = {0.1, 0.25, 0.5, 1.0, 2.0, 4.0};
    for (int n = 2; n <= 5; ++n) {
        for (int k = 1; k <= n; ++k) {
            fundamental.push_back({{"n", n}, {"k", k}, {"residual", fundamental_residual(n, k, radii)}});
        }
    }
    checks["fundamental"] = fundamental;
    Json scaling = Json::array();
    for (double t : c.verify.scaling) {
        const ScalingCheck s = scaling_law_check(spec, t);
        scaling.push_back({{"t", t}, {"ratio", s.ratio}, {"expected", s.expected},
                           {"lambda_base", s.lambda_base}, {"lambda_scaled", s.lambda_scaled}});
    }
    checks["scaling"] = scaling;
    Json body = report_header(c);
    body["checks"] = checks;
    w.json("verify.json", body);
    const Json& n = checks["norms"];
    out << "K = " << format_number(n["K"].get<double>()) << "  L_beta = " << format_number(n["L_beta"].get<double>())
        << "\n";
    if (checks["holder"].contains("alpha")) {
        out << "alpha = " << format_number(checks["holder"]["alpha"].get<double>()) << "\n";
    }
    if (checks["linearized"].contains("lambda_phi")) {
        out << "lambda_phi = " << format_number(checks["linearized"]["lambda_phi"].get<double>()) << "\n";
    }
}

Json trajectory_summary(const FlowTrajectory& t)
{
    return {{"accepted", t.accepted},
            {"rejected", t.rejected},
            {"initial_J", t.samples.front().J},
            {"final_J", t.samples.back().J},
            {"initial_residual", t.samples.front().residual},
            {"final_residual", t.samples.back().residual},
            {"final_t", t.samples.back().t}};
}

void run_flow(const RunConfig& c, Writer& w, std::ostream& out)
{
    ProblemSpec spec = c.spec;
    spec.delta = c.deltas.front();
    const bool radial = c.flow.radial || spec.n != 2;
    Json body = report_header(c);
    FlowTrajectory traj;
    try {
        if (radial) {
            RadialProfile u0;
            const double R = spec.domain.a();
            u0.R = R;
            for (int i = 0; i <= c.flow.radial_samples; ++i) {
                const double r = R * i / c.flow.radial_samples;
                u0.r.push_back(r);
                u0.u.push_back(i == c.flow.radial_samples ? 0.0 : 0.5 * (r * r - R * R));
                u0.du.push_back(r);
            }
            const RadialFlowResult res = gradient_flow_radial(u0, spec.n, spec.k, spec.s, spec.delta, c.flow.options);
            traj = res.trajectory;
            w.csv("flow_final.csv", [&](std::ostream& o) {
                o << "r,u\n";
                char line[64];
                for (std::size_t i = 0; i < res.u.r.size(); ++i) {
                    std::snprintf(line, sizeof line, "%.10g,%.15g\n", res.u.r[i], res.u.u[i]);
                    o << line;
                }
            });
        } else {
            // Start from the solution of S_k(D^2 u) = 1, admissible on any convex domain.
            const auto disc = discretization_for(spec.domain, spec.h);
            GridField one = disc->to_field(Eigen::VectorXd::Ones(disc->unknowns()));
            const GridField u0 = spec.k == 1 ? solve_poisson(spec, one) : solve_monge_ampere_2d(spec, one);
            const QuadratureField q(u0, spec.domain);
            const GridFlowResult res = gradient_flow(q, spec, c.flow.options);
            traj = res.trajectory;
            w.field("flow_final", res.state.u);
        }
    } catch (const FlowStiffnessError& e) {
        w.csv("flow.csv", [&](std::ostream& o) { e.trajectory().write_csv(o); });
        throw;
    }
    w.csv("flow.csv", [&](std::ostream& o) { traj.write_csv(o); });
    body["result"] = trajectory_summary(traj);
    body["result"]["geometry"] = radial ? "radial" : "grid";
    w.json("flow.json", body);
    out << "J: " << format_number(traj.samples.front().J) << " -> " << format_number(traj.samples.back().J)
        << "  residual: " << format_number(traj.samples.front().residual) << " -> "
        << format_number(traj.samples.back().residual) << "\n";
}

}  // namespace

std::string resolve_output_dir(const RunConfig& config, const RunOptions& options)
{
    if (options.out_dir && !options.out_dir->empty()) {
        return *options.out_dir;
    }
    if (const char* env = std::getenv("HESSEIG_OUT"); env && *env) {
        return env;
    }
    return config.outputs.dir;
}

std::string error_json(const std::string& kind, const std::string& message,
                       const std::vector<std::pair<std::string, std::string>>& context)
{
    Json j = {{"status", "error"}, {"kind", kind}, {"message", message}};
    for (const auto& [k, v] : context) {
        j[k] = v;
    }
    return j.dump();
}

RunOutcome run(const RunConfig& config, std::ostream& out, std::ostream& err, const RunOptions& options)
{
    RunOutcome outcome;
    outcome.output_dir = resolve_output_dir(config, options);
    Writer writer(outcome.output_dir, config.outputs);
    std::vector<std::pair<std::string, std::string>> context = {{"mode", to_string(config.mode)},
                                                                {"delta", format_number(config.deltas.front())}};
    auto fail = [&](const std::string& kind, const std::string& message, double residual) {
        auto ctx = context;
        if (std::isfinite(residual)) {
            ctx.emplace_back("residual", format_number(residual));
        }
        const std::string text = error_json(kind, message, ctx);
        err << text << "\n";
        try {
            writer.ensure_dir();
            writer.write_text("error.json", text + "\n");
        } catch (const Error&) {
            // The error line on `err` is the report of record.
        }
        outcome.exit_code = 1;
    };
    try {
        writer.ensure_dir();
        switch (config.mode) {
        case RunMode::eigen:
            run_eigen(config, writer, out);
            break;
        case RunMode::oracle:
            run_oracle(config, writer, out);
            break;
        case RunMode::sweep:
            run_sweep(config, writer, out);
            break;
        case RunMode::verify:
            run_verify(config, writer, out);
            break;
        case RunMode::flow:
            run_flow(config, writer, out);
            break;
        }
    } catch (const NumericalError& e) {
        fail(e.kind(), e.what(), e.residual());
    } catch (const Error& e) {
        fail(e.kind(), e.what(), NAN);
    } catch (const std::exception& e) {
        fail("internal", e.what(), NAN);
    }
    outcome.artifacts = writer.artifacts;
    return outcome;
}

}  // namespace hesseig
