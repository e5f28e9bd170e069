#include "hesseig/flow.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "hesseig/dirichlet.hpp"
#include "hesseig/symfun.hpp"
#include "hesseig/variational.hpp"

namespace hesseig {

namespace {

constexpr double kGrow = 2.0;

// d/du log f_M(|u|) for u <= 0, by a central difference in |u|.
double dlog_source(const TruncatedSource& source, double u)
{
    const double a = std::abs(u);
    const double eps = 1e-6 * (1.0 + a);
    const double lo = std::max(0.0, a - eps);
    const double slope = (std::log(source.f(a + eps)) - std::log(source.f(lo))) / (a + eps - lo);
    return u <= 0.0 ? -slope : slope;
}

void check_options(const FlowOptions& o, double delta)
{
    if (!(delta > 0.0)) {
        throw ParameterError("the flow needs delta > 0");
    }
    if (!(o.t_end > 0.0) || !(o.dt_max > 0.0) || !(o.dt_min > 0.0) || o.max_steps < 1 || !(o.dt0 >= 0.0)) {
        throw ParameterError("flow options need t_end, dt_max, dt_min > 0, dt0 >= 0 and max_steps >= 1");
    }
}

// Shared driver: `State` carries the unknowns and cached evaluation.
template <class Model>
FlowTrajectory run_flow(Model& model, const FlowOptions& o, double& t, double& dt)
{
    FlowTrajectory traj;
    auto current = model.evaluate(model.initial());
    if (!current.admissible) {
        throw ConeError("initial state of the flow is not admissible");
    }
    traj.samples.push_back({0.0, current.J, 0.0, current.residual});
    t = 0.0;
    dt = o.dt0 > 0.0 ? o.dt0 : model.default_dt();
    int steps = 0;
    while (t < o.t_end && steps < o.max_steps && current.residual > o.residual_tol) {
        const double step = std::min(dt, o.t_end - t);
        Eigen::VectorXd next = model.advance(current, step, o.scheme);
        auto trial = model.evaluate(next);
        if (trial.admissible && next.allFinite() && trial.J <= current.J + o.descent_slack) {
            t += step;
            ++steps;
            ++traj.accepted;
            traj.samples.push_back({t, trial.J, step, trial.residual});
            current = std::move(trial);
            dt = std::min(kGrow * dt, o.dt_max);
            continue;
        }
        ++traj.rejected;
        dt *= 0.5;
        if (dt < o.dt_min) {
            model.commit(current);
            throw FlowStiffnessError("flow step fell below dt_min at t = " + std::to_string(t), std::move(traj));
        }
    }
    model.commit(current);
    return traj;
}

struct Evaluation {
    Eigen::VectorXd u;
    Eigen::VectorXd sk;
    Eigen::VectorXd log_psi;
    bool admissible = false;
    double J = 0.0;
    double residual = 0.0;
};

class GridModel {
public:
    GridModel(const QuadratureField& q, const ProblemSpec& spec, const FlowOptions& o)
        : q_(q), disc_(q.discretization()), spec_(spec), source_(o.M, o.p)
    {
        const int m = disc_.unknowns();
        weight_.resize(m);
        for (int i = 0; i < m; ++i) {
            const double r = disc_.radius(i);
            weight_[i] = std::pow(r * r + spec.delta * spec.delta, spec.s * spec.k);
        }
    }

    Eigen::VectorXd initial() const { return q_.values(); }
    double default_dt() const { return 0.25 * disc_.h() * disc_.h(); }

    Evaluation evaluate(const Eigen::VectorXd& u) const
    {
        Evaluation e;
        e.u = u;
        const int m = disc_.unknowns();
        const DiscreteHessian hess = disc_.hessian(u);
        e.sk = spec_.k == 1 ? Eigen::VectorXd(hess.xx + hess.yy)
                            : Eigen::VectorXd(hess.xx.cwiseProduct(hess.yy) - hess.xy.cwiseProduct(hess.xy));
        e.admissible = u.maxCoeff() <= 0.0;
        for (int i = 0; i < m && e.admissible; ++i) {
            e.admissible = e.sk[i] > 0.0 && hess.xx[i] + hess.yy[i] > 0.0;
        }
        if (!e.admissible) {
            return e;
        }
        e.log_psi.resize(m);
        Eigen::VectorXd psi(m);
        Eigen::VectorXd energy(m);
        for (int i = 0; i < m; ++i) {
            psi[i] = weight_[i] * source_.f(u[i]);
            e.log_psi[i] = std::log(psi[i]);
            energy[i] = -u[i] * e.sk[i] / (spec_.k + 1) - weight_[i] * source_.F(u[i]);
        }
        e.J = q_.integrate(energy);
        const Eigen::VectorXd diff = e.sk - psi;
        e.residual = std::sqrt(q_.integrate(Eigen::VectorXd(diff.cwiseProduct(diff))) /
                               q_.integrate(Eigen::VectorXd(psi.cwiseProduct(psi))));
        return e;
    }

    Eigen::VectorXd advance(const Evaluation& e, double dt, FlowScheme scheme) const
    {
        const Eigen::VectorXd g = e.sk.array().log().matrix() - e.log_psi;
        if (scheme == FlowScheme::explicit_euler) {
            return e.u + dt * g;
        }
        const int m = disc_.unknowns();
        SparseMatrix lin;
        if (spec_.k == 1) {
            lin = disc_.laplacian();
        } else {
            const DiscreteHessian hess = disc_.hessian(e.u);
            const SparseMatrix mixed = disc_.second_difference(Line::diag) - disc_.second_difference(Line::anti);
            SparseMatrix a = hess.yy.asDiagonal() * disc_.second_difference(Line::x);
            SparseMatrix b = hess.xx.asDiagonal() * disc_.second_difference(Line::y);
            SparseMatrix c = (-hess.xy).asDiagonal() * mixed;
            lin = a + b + c;
        }
        Eigen::VectorXd diag(m);
        for (int i = 0; i < m; ++i) {
            diag[i] = dlog_source(source_, e.u[i]);
        }
        SparseMatrix id(m, m);
        id.setIdentity();
        SparseMatrix scaled = e.sk.cwiseInverse().asDiagonal() * lin;
        SparseMatrix dshift = diag.asDiagonal() * id;
        SparseMatrix system = id - dt * (scaled - dshift);
        Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
        lu.compute(system);
        if (lu.info() != Eigen::Success) {
            return Eigen::VectorXd::Constant(m, NAN);
        }
        return e.u + lu.solve(Eigen::VectorXd(dt * g));
    }

    void commit(const Evaluation& e) { final_ = e.u; }
    const Eigen::VectorXd& final_values() const { return final_; }

private:
    const QuadratureField& q_;
    const Discretization& disc_;
    const ProblemSpec& spec_;
    TruncatedSource source_;
    Eigen::VectorXd weight_;
    Eigen::VectorXd final_;
};

class RadialModel {
public:
    RadialModel(const RadialProfile& u0, int n, int k, double s, double delta, const FlowOptions& o)
        : n_(n), k_(k), s_(s), delta_(delta), source_(o.M, o.p), R_(u0.R)
    {
        const std::size_t size = u0.r.size();
        if (size < 4 || u0.u.size() != size || u0.r.front() != 0.0) {
            throw ParameterError("radial flow needs >= 4 samples from r = 0");
        }
        dr_ = u0.r[1] - u0.r[0];
        for (std::size_t i = 1; i < size; ++i) {
            if (std::abs(u0.r[i] - i * dr_) > 1e-9 * u0.R) {
                throw ParameterError("radial flow needs a uniform r grid");
            }
        }
        if (u0.u.back() != 0.0) {
            throw ParameterError("radial flow needs u(R) = 0");
        }
        r_ = u0.r;
        m_ = static_cast<int>(size) - 1;
        u0_ = Eigen::Map<const Eigen::VectorXd>(u0.u.data(), m_);
        // Trapezoid weights times |S^{n-1}| r^{n-1}.
        const double area = 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
        quad_.resize(m_);
        weight_.resize(m_);
        for (int i = 0; i < m_; ++i) {
            quad_[i] = area * (i == 0 ? 0.5 : 1.0) * dr_ * std::pow(r_[static_cast<std::size_t>(i)], n - 1);
            const double r = r_[static_cast<std::size_t>(i)];
            weight_[i] = std::pow(r * r + delta * delta, s * k);
        }
        if (n == 1) {
            quad_[0] = area * 0.5 * dr_;
        }
    }

    Eigen::VectorXd initial() const { return u0_; }
    double default_dt() const { return 0.25 * dr_ * dr_; }

    double at(const Eigen::VectorXd& u, int i) const { return i >= m_ ? 0.0 : u[i]; }

    // q = u'/r and u'' at node i; at r = 0 both equal u''(0).
    std::pair<double, double> derivatives(const Eigen::VectorXd& u, int i) const
    {
        if (i == 0) {
            const double dd = 2.0 * (at(u, 1) - u[0]) / (dr_ * dr_);
            return {dd, dd};
        }
        const double du = (at(u, i + 1) - at(u, i - 1)) / (2.0 * dr_);
        const double dd = (at(u, i + 1) - 2.0 * u[i] + at(u, i - 1)) / (dr_ * dr_);
        return {du / r_[static_cast<std::size_t>(i)], dd};
    }

    Evaluation evaluate(const Eigen::VectorXd& u) const
    {
        Evaluation e;
        e.u = u;
        e.sk.resize(m_);
        e.admissible = u.maxCoeff() <= 0.0;
        for (int i = 0; i < m_ && e.admissible; ++i) {
            const auto [q, dd] = derivatives(u, i);
            std::vector<double> eig(static_cast<std::size_t>(n_), q);
            eig[0] = dd;
            e.admissible = cone_classify(SpectrumPoint(eig)).in_cone(k_);
            e.sk[i] = binomial(n_ - 1, k_) * std::pow(q, k_) + binomial(n_ - 1, k_ - 1) * dd * std::pow(q, k_ - 1);
        }
        if (!e.admissible) {
            return e;
        }
        e.log_psi.resize(m_);
        double J = 0.0;
        double num = 0.0;
        double den = 0.0;
        for (int i = 0; i < m_; ++i) {
            const double psi = weight_[i] * source_.f(u[i]);
            e.log_psi[i] = std::log(psi);
            J += quad_[i] * (-u[i] * e.sk[i] / (k_ + 1) - weight_[i] * source_.F(u[i]));
            num += quad_[i] * (e.sk[i] - psi) * (e.sk[i] - psi);
            den += quad_[i] * psi * psi;
        }
        e.J = J;
        e.residual = std::sqrt(num / den);
        return e;
    }

    Eigen::VectorXd advance(const Evaluation& e, double dt, FlowScheme scheme) const
    {
        const Eigen::VectorXd g = e.sk.array().log().matrix() - e.log_psi;
        if (scheme == FlowScheme::explicit_euler) {
            return e.u + dt * g;
        }
        const double c1 = binomial(n_ - 1, k_);
        const double c2 = binomial(n_ - 1, k_ - 1);
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(static_cast<std::size_t>(3 * m_));
        auto add = [&](int i, int j, double v) {
            if (j < m_) {
                trip.emplace_back(i, j, v);
            }
        };
        for (int i = 0; i < m_; ++i) {
            const double inv = 1.0 / e.sk[i];
            double diag = -dlog_source(source_, e.u[i]);
            if (i == 0) {
                const double dd = 2.0 * (at(e.u, 1) - e.u[0]) / (dr_ * dr_);
                const double dS = binomial(n_, k_) * k_ * std::pow(dd, k_ - 1) * 2.0 / (dr_ * dr_);
                add(0, 1, inv * dS);
                diag -= inv * dS;
            } else {
                const auto [q, dd] = derivatives(e.u, i);
                const double r = r_[static_cast<std::size_t>(i)];
                double dSdq = k_ * c1 * std::pow(q, k_ - 1);
                if (k_ >= 2) {
                    dSdq += (k_ - 1) * c2 * dd * std::pow(q, k_ - 2);
                }
                const double dSdd = c2 * std::pow(q, k_ - 1);
                const double dq = dSdq / (2.0 * dr_ * r);
                const double ddd = dSdd / (dr_ * dr_);
                add(i, i - 1, inv * (ddd - dq));
                add(i, i + 1, inv * (ddd + dq));
                diag -= inv * 2.0 * ddd;
            }
            trip.emplace_back(i, i, diag);
        }
        SparseMatrix lin(m_, m_);
        lin.setFromTriplets(trip.begin(), trip.end());
        SparseMatrix id(m_, m_);
        id.setIdentity();
        SparseMatrix system = id - dt * lin;
        Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
        lu.compute(system);
        if (lu.info() != Eigen::Success) {
            return Eigen::VectorXd::Constant(m_, NAN);
        }
        return e.u + lu.solve(Eigen::VectorXd(dt * g));
    }

    void commit(const Evaluation& e) { final_ = e.u; }

    RadialProfile profile() const
    {
        RadialProfile out;
        out.R = R_;
        out.r = r_;
        out.u.assign(final_.data(), final_.data() + m_);
        out.u.push_back(0.0);
        out.du.resize(out.u.size());
        const std::size_t last = out.u.size() - 1;
        for (std::size_t i = 0; i <= last; ++i) {
            if (i == 0) {
                out.du[i] = 0.0;
            } else if (i == last) {
                out.du[i] = (3.0 * out.u[i] - 4.0 * out.u[i - 1] + out.u[i - 2]) / (2.0 * dr_);
            } else {
                out.du[i] = (out.u[i + 1] - out.u[i - 1]) / (2.0 * dr_);
            }
        }
        return out;
    }

private:
    int n_;
    int k_;
    double s_;
    double delta_;
    TruncatedSource source_;
    double R_;
    double dr_ = 0.0;
    int m_ = 0;
    std::vector<double> r_;
    Eigen::VectorXd u0_;
    Eigen::VectorXd quad_;
    Eigen::VectorXd weight_;
    Eigen::VectorXd final_;
};

}  // namespace

std::string to_string(FlowScheme scheme)
{
    return scheme == FlowScheme::explicit_euler ? "explicit" : "linearly_implicit";
}

FlowScheme parse_flow_scheme(const std::string& text)
{
    if (text == "explicit") {
        return FlowScheme::explicit_euler;
    }
    if (text == "linearly_implicit") {
        return FlowScheme::linearly_implicit;
    }
    throw ParameterError("unknown flow scheme '" + text + "' (expected explicit or linearly_implicit)");
}

void FlowTrajectory::write_csv(std::ostream& out) const
{
    out << "t,J,dt,residual\n";
    char line[128];
    for (const auto& s : samples) {
        std::snprintf(line, sizeof line, "%.12g,%.15g,%.6g,%.6g\n", s.t, s.J, s.dt, s.residual);
        out << line;
    }
}

GridFlowResult gradient_flow(const QuadratureField& u0, const ProblemSpec& spec, const FlowOptions& options)
{
    spec.validate_grid();
    check_options(options, spec.delta);
    if (!(u0.discretization().h() == spec.h) || !(u0.domain() == spec.domain)) {
        throw ParameterError("initial field does not live on the spec's grid");
    }
    GridModel model(u0, spec, options);
    GridFlowResult out;
    out.trajectory = run_flow(model, options, out.state.t, out.state.dt);
    out.state.u = u0.discretization().to_field(model.final_values());
    out.state.J = out.trajectory.samples.back().J;
    return out;
}

RadialFlowResult gradient_flow_radial(const RadialProfile& u0, int n, int k, double s, double delta,
                                      const FlowOptions& options)
{
    if (k < 1 || k > n) {
        throw ParameterError("need 1 <= k <= n");
    }
    if (!(s > weight_exponent_floor(n, k))) {
        throw ParameterError("weight exponent below the admissible floor");
    }
    check_options(options, delta);
    RadialModel model(u0, n, k, s, delta, options);
    RadialFlowResult out;
    out.trajectory = run_flow(model, options, out.t, out.dt);
    out.u = model.profile();
    out.J = out.trajectory.samples.back().J;
    return out;
}

}  // namespace hesseig
