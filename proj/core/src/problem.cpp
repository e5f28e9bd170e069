#include "hesseig/problem.hpp"

#include <cmath>

#include "hesseig/errors.hpp"
#include "hesseig/radial.hpp"

namespace hesseig {

std::string to_string(MongeAmpereScheme scheme)
{
    return scheme == MongeAmpereScheme::centered ? "centered" : "wide_stencil";
}

MongeAmpereScheme parse_ma_scheme(const std::string& text)
{
    if (text == "centered") {
        return MongeAmpereScheme::centered;
    }
    if (text == "wide_stencil" || text == "wide") {
        return MongeAmpereScheme::wide_stencil;
    }
    throw ParameterError("unknown Monge-Ampere scheme '" + text + "' (centered, wide_stencil)");
}

void ProblemSpec::validate() const
{
    if (n < 1 || k < 1 || k > n) {
        throw ParameterError("need 1 <= k <= n (n=" + std::to_string(n) + ", k=" + std::to_string(k) + ")");
    }
    if (!std::isfinite(s) || !(s > weight_exponent_floor(n, k))) {
        throw ParameterError("weight exponent s must exceed -min(1, n/2k) = " +
                             std::to_string(weight_exponent_floor(n, k)));
    }
    if (!std::isfinite(delta) || delta < 0.0) {
        throw ParameterError("regularization delta must be >= 0");
    }
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw ParameterError("grid spacing h must be positive");
    }
    const auto& c = controls;
    if (!(c.picard_tol > 0.0) || !(c.bracket_tol > 0.0) || !(c.ma_tol > 0.0) || !(c.power_tol > 0.0)) {
        throw ParameterError("tolerances must be positive");
    }
    if (c.max_picard < 1 || c.max_bisections < 1 || c.ma_max_iter < 1 || c.power_max_outer < 1 ||
        c.growth_window < 1 || c.ratio_confirm < 1) {
        throw ParameterError("iteration caps must be positive");
    }
    if (!(c.blowup_cap > 0.0) || !(c.lambda_ceiling > 0.0)) {
        throw ParameterError("blow-up cap and lambda ceiling must be positive");
    }
    if (!(c.beta > 1.0)) {
        throw ParameterError("Hessian-estimate exponent beta must exceed 1");
    }
}

void ProblemSpec::validate_grid() const
{
    validate();
    if (n != 2 || (k != 1 && k != 2)) {
        throw ParameterError("grid solvers support n = 2 with k in {1, 2}");
    }
    if (s < 0.0 && delta <= 0.0) {
        throw ParameterError("s < 0 on a grid needs delta > 0 (the weight is singular at the origin node)");
    }
}

double ProblemSpec::weight(double r) const
{
    if (s == 0.0) {
        return 1.0;
    }
    return std::pow(r * r + delta * delta, s);
}

}  // namespace hesseig
