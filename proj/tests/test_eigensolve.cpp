#include <gtest/gtest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "hesseig/dirichlet.hpp"
#include "hesseig/eigensolve.hpp"
#include "hesseig/errors.hpp"
#include "hesseig/radial.hpp"
#include "support/generators.hpp"

namespace hesseig {
namespace {

using testing::Gen;

const double j01 = boost::math::cyl_bessel_j_zero(0.0, 1);

ProblemSpec spec_of(int k, double s, double delta, double h)
{
    ProblemSpec spec;
    spec.k = k;
    spec.s = s;
    spec.delta = delta;
    spec.h = h;
    return spec;
}

void expect_normalized(const GridField& f)
{
    double lo = 0.0, hi = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < f.values().size(); ++n) {
        if (!f.inside(n)) continue;
        lo = std::min(lo, f[n]);
        hi = std::max(hi, f[n]);
    }
    EXPECT_EQ(lo, -1.0);
    EXPECT_LE(hi, 0.0);
    EXPECT_EQ(f.sup_norm(), 1.0);
}

void expect_valid_bracket(const ProblemSpec& spec, const EigenResult& r)
{
    EXPECT_LT(r.iterations.bracket_low, r.iterations.bracket_high);
    EXPECT_LE((r.iterations.bracket_high - r.iterations.bracket_low) / r.iterations.bracket_high,
              spec.controls.bracket_tol * 1.0000001);
    EXPECT_EQ(solve_regularized_dirichlet(spec, r.iterations.bracket_low).status, PicardStatus::converged);
    EXPECT_EQ(solve_regularized_dirichlet(spec, r.iterations.bracket_high).status, PicardStatus::blow_up);
}

TEST(FindLambda, LaplacianMatchesBessel)
{
    const ProblemSpec spec = spec_of(1, 0.0, 0.0, 1.0 / 32);
    const LambdaSearch s = find_lambda_delta(spec);
    EXPECT_NEAR(s.lambda_delta / (j01 * j01), 1.0, 1e-2);
    expect_normalized(s.result.field);
    expect_valid_bracket(spec, s.result);
}

TEST(FindLambda, LargerDiskFollowsScaling)
{
    ProblemSpec spec = spec_of(1, 0.0, 0.0, 1.0 / 16);
    spec.domain = DomainDescriptor::disk(2.0);
    EXPECT_NEAR(find_lambda_delta(spec).lambda_delta / (j01 * j01 / 4), 1.0, 1e-2);
}

TEST(FindLambda, MongeAmpereMatchesRadialShooter)
{
    const ProblemSpec spec = spec_of(2, 0.0, 0.0, 1.0 / 32);
    const LambdaSearch s = find_lambda_delta(spec);
    const double ref = shoot_eigen(2, 2, 0.0, 1.0, 1e-10).lambda1;
    EXPECT_NEAR(s.lambda_delta / ref, 1.0, 1e-2);
    expect_normalized(s.result.field);
    expect_valid_bracket(spec, s.result);
}

TEST(FindLambda, CeilingWithoutBlowUpIsReported)
{
    ProblemSpec spec = spec_of(1, 0.0, 0.0, 1.0 / 16);
    spec.controls.lambda_ceiling = 2.0;
    EXPECT_THROW((void)find_lambda_delta(spec), BracketError);
}

class CrossMethod : public ::testing::TestWithParam<std::tuple<int, double>> {};

TEST_P(CrossMethod, BisectionAndInversePowerAgree)
{
    const auto [k, s] = GetParam();
    const ProblemSpec spec = spec_of(k, s, s < 0 ? 0.1 : 0.0, 1.0 / 24);
    const LambdaSearch bis = find_lambda_delta(spec);
    const EigenResult pow = inverse_power_iteration(spec, spec.controls.power_max_outer);
    ASSERT_TRUE(pow.iterations.converged);
    const double tol = spec.controls.bracket_tol + spec.controls.power_tol;
    EXPECT_NEAR(pow.lambda / bis.lambda_delta, 1.0, 2 * tol) << "k=" << k << " s=" << s;
    double diff = 0.0;
    for (std::size_t n = 0; n < pow.field.values().size(); ++n)
        diff = std::max(diff, std::abs(pow.field[n] - bis.result.field[n]));
    EXPECT_LE(diff, 1e-2);
    expect_normalized(pow.field);
}

INSTANTIATE_TEST_SUITE_P(Eigen, CrossMethod,
                         ::testing::Combine(::testing::Values(1, 2), ::testing::Values(-0.25, 0.0, 0.5)));

TEST(InversePower, LaplacianMatchesBessel)
{
    const ProblemSpec spec = spec_of(1, 0.0, 0.0, 1.0 / 32);
    const EigenResult r = inverse_power_iteration(spec, 200);
    EXPECT_NEAR(r.lambda / (j01 * j01), 1.0, 1e-2);
    EXPECT_EQ(r.method, "inverse_power");
}

TEST(InversePower, EigenfunctionIsAFixedPoint)
{
    for (int k : {1, 2}) {
        const ProblemSpec spec = spec_of(k, 0.0, 0.0, 1.0 / 24);
        const EigenResult first = inverse_power_iteration(spec, 200);
        const EigenResult again = inverse_power_iteration(spec, 200, InitialGuess{first.lambda, first.field});
        EXPECT_TRUE(again.iterations.converged);
        EXPECT_LE(again.iterations.solves, 2) << "k=" << k;
        EXPECT_NEAR(again.lambda / first.lambda, 1.0, spec.controls.power_tol * 10);
    }
}

EigenResult bessel_interpolant(const ProblemSpec& spec)
{
    const auto disc = discretization_for(spec.domain, spec.h);
    Eigen::VectorXd u(disc->unknowns());
    for (int i = 0; i < u.size(); ++i) u(i) = -boost::math::cyl_bessel_j(0, j01 * disc->radius(i));
    EigenResult r;
    r.lambda = j01 * j01;
    r.field = disc->to_field(u);
    return r;
}

TEST(Residual, ExactEigenfunctionResidualShrinksUnderRefinement)
{
    double prev = std::numeric_limits<double>::infinity();
    for (int n : {16, 32, 64}) {
        const ProblemSpec spec = spec_of(1, 0.0, 0.0, 1.0 / n);
        const double r = eigen_residual(bessel_interpolant(spec), spec);
        EXPECT_LT(r, prev);
        EXPECT_LT(r, 5.0 / n);
        prev = r;
    }
}

TEST(Residual, ScaleInvariantAndUndefinedOnZero)
{
    const ProblemSpec spec = spec_of(2, 0.0, 0.0, 1.0 / 24);
    const LambdaSearch s = find_lambda_delta(spec);
    EigenResult scaled = s.result;
    for (double& v : scaled.field.values()) v *= 3.7;
    EXPECT_NEAR(eigen_residual(scaled, spec), eigen_residual(s.result, spec), 1e-12);
    EigenResult zero = s.result;
    for (double& v : zero.field.values()) v = 0.0;
    EXPECT_TRUE(std::isnan(eigen_residual(zero, spec)));
}

TEST(Sweep, UnweightedProblemIsIndependentOfDelta)
{
    const ProblemSpec spec = spec_of(1, 0.0, 0.0, 1.0 / 16);
    const SweepReport rep = sweep_delta(spec, {0.2, 0.1, 0.05});
    ASSERT_EQ(rep.rows.size(), 3u);
    for (const auto& row : rep.rows) EXPECT_NEAR(row.lambda / rep.rows.front().lambda, 1.0, 2e-6);
    EXPECT_EQ(rep.expected_direction, "none");
}

TEST(Sweep, PositiveExponentIncreasesAsDeltaShrinks)
{
    const ProblemSpec spec = spec_of(1, 0.5, 0.0, 1.0 / 16);
    const SweepReport rep = sweep_delta(spec, {0.2, 0.1, 0.05, 0.025});
    EXPECT_EQ(rep.expected_direction, "increasing");
    EXPECT_EQ(rep.monotonicity_violations, 0);
    for (std::size_t i = 1; i < rep.rows.size(); ++i) EXPECT_GE(rep.rows[i].lambda, rep.rows[i - 1].lambda);

    std::stringstream csv;
    rep.write_csv(csv);
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "delta,lambda,K,L,Khat,Lhat");
    int rows = 0;
    while (std::getline(csv, line) && line[0] != '#') ++rows;
    EXPECT_EQ(rows, 4);
}

TEST(Sweep, RejectsBadDeltaLists)
{
    const ProblemSpec spec = spec_of(1, 0.5, 0.0, 1.0 / 16);
    EXPECT_THROW((void)sweep_delta(spec, {0.1, 0.2}), ParameterError);
    EXPECT_THROW((void)sweep_delta(spec, {0.1, 0.0}), ParameterError);
    EXPECT_THROW((void)sweep_delta(spec, {}), ParameterError);
}

TEST(RichardsonProperty, RecoversSyntheticPowerLaws)
{
    Gen gen(401);
    for (int trial = 0; trial < 500; ++trial) {
        const double l1 = gen.uniform(1.0, 10.0), c = gen.uniform(-3.0, 3.0), q = gen.uniform(0.5, 2.0);
        if (std::abs(c) < 0.05) continue;
        const std::vector<double> deltas{0.2, 0.1, 0.05, 0.025};
        std::vector<double> lambdas;
        for (double d : deltas) lambdas.push_back(l1 + c * std::pow(d, q));
        const Extrapolation ex = richardson(deltas, lambdas);
        ASSERT_TRUE(ex.reliable);
        ASSERT_NEAR(ex.lambda1, l1, 1e-8);
        ASSERT_NEAR(ex.q, q, 1e-6);
        ASSERT_LT(ex.fit_residual, 1e-9);
    }
}

TEST(Richardson, FallsBackToSmallestDelta)
{
    // Non-monotone data has no power-law fit.
    const Extrapolation ex = richardson({0.2, 0.1, 0.05}, {3.0, 3.2, 3.1});
    EXPECT_FALSE(ex.reliable);
    EXPECT_EQ(ex.lambda1, 3.1);
    EXPECT_EQ(richardson({0.1}, {2.0}).lambda1, 2.0);
}

}  // namespace
}  // namespace hesseig
