#include "hesseig/quadrature.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "hesseig/errors.hpp"

namespace hesseig {

namespace {

double half_chord(const DomainDescriptor& domain, double x)
{
    if (std::abs(x) >= domain.half_extent_x()) {
        return 0.0;
    }
    return domain.ray_hit(x, 0.0, 0.0, 1.0);
}

// Antiderivative of half_chord on [-half_extent_x, half_extent_x].
double half_chord_integral(const DomainDescriptor& domain, double x)
{
    if (domain.kind() == DomainKind::square) {
        return x * domain.half_extent_y();
    }
    const double a = domain.half_extent_x();
    const double t = std::clamp(x / a, -1.0, 1.0);
    return 0.5 * a * domain.half_extent_y() * (t * std::sqrt(1.0 - t * t) + std::asin(t));
}

// x >= 0 where the chord's half length equals |y|, or -1 when it never does.
double chord_level_crossing(const DomainDescriptor& domain, double y)
{
    if (domain.kind() == DomainKind::square) {
        return -1.0;
    }
    const double b = domain.half_extent_y();
    if (std::abs(y) >= b) {
        return -1.0;
    }
    return domain.half_extent_x() * std::sqrt(1.0 - (y / b) * (y / b));
}

// Mean of |x|^a over a cell away from the origin, by 4 x 4 Gauss-Legendre.
double cell_mean_power(double xc, double yc, double h, double a)
{
    static constexpr std::array<double, 4> node = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                                   0.8611363115940526};
    static constexpr std::array<double, 4> weight = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                                     0.3478548451374538};
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const double x = xc + 0.5 * h * node[i];
            const double y = yc + 0.5 * h * node[j];
            sum += weight[i] * weight[j] * std::pow(x * x + y * y, 0.5 * a);
        }
    }
    return 0.25 * sum;
}

}  // namespace

double cell_area_inside(const DomainDescriptor& domain, double xc, double yc, double h)
{
    const double x0 = xc - 0.5 * h;
    const double x1 = xc + 0.5 * h;
    const double y0 = yc - 0.5 * h;
    const double y1 = yc + 0.5 * h;
    // Convex domain: all four corners inside means the whole cell is.
    if (domain.contains(x0, y0) && domain.contains(x0, y1) && domain.contains(x1, y0) && domain.contains(x1, y1)) {
        return h * h;
    }
    const double lo = std::max(x0, -domain.half_extent_x());
    const double hi = std::min(x1, domain.half_extent_x());
    if (!(hi > lo)) {
        return 0.0;
    }
    // Between breakpoints the overlap of [y0, y1] with [-c(x), c(x)] has a
    // fixed form, integrated exactly through the chord antiderivative.
    std::vector<double> cuts{lo, hi};
    for (double y : {y0, y1}) {
        const double x = chord_level_crossing(domain, y);
        for (double c : {-x, x}) {
            if (x > 0.0 && c > lo && c < hi) {
                cuts.push_back(c);
            }
        }
    }
    std::sort(cuts.begin(), cuts.end());
    double area = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double p = cuts[i];
        const double q = cuts[i + 1];
        if (!(q > p)) {
            continue;
        }
        const double c = half_chord(domain, 0.5 * (p + q));
        if (std::min(y1, c) <= std::max(y0, -c)) {
            continue;
        }
        const double chord = half_chord_integral(domain, q) - half_chord_integral(domain, p);
        const double top = (c < y1) ? chord : y1 * (q - p);
        const double bottom = (-c > y0) ? -chord : y0 * (q - p);
        area += top - bottom;
    }
    return area;
}

std::vector<double> cell_weights(const DomainDescriptor& domain, const GridGeometry& g)
{
    std::vector<double> w(g.size(), 0.0);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            w[static_cast<std::size_t>(g.index(i, j))] = cell_area_inside(domain, g.x(i), g.y(j), g.h);
        }
    }
    return w;
}

double origin_cell_power_integral(double h, double a)
{
    if (!(a > -2.0)) {
        throw ParameterError("|x|^a is not integrable at the origin for a <= -2");
    }
    const double c = 0.5 * h;
    auto sec_power = [a](double theta) { return std::pow(1.0 / std::cos(theta), a + 2.0); };
    const double angular = boost::math::quadrature::gauss<double, 20>::integrate(sec_power, 0.0, std::numbers::pi / 4);
    return 8.0 * std::pow(c, a + 2.0) / (a + 2.0) * angular;
}

QuadratureField::QuadratureField(GridField field, const DomainDescriptor& domain)
    : field_(std::move(field)), disc_(discretization_for(domain, field_.geometry().h))
{
    if (!(disc_->geometry() == field_.geometry())) {
        throw ParameterError("field grid does not match the grid of " + domain.describe());
    }
    u_ = disc_->from_field(field_);
    const std::vector<double> all = cell_weights(domain, field_.geometry());
    w_.resize(disc_->unknowns());
    for (int i = 0; i < disc_->unknowns(); ++i) {
        w_[i] = all[static_cast<std::size_t>(disc_->node(i))];
    }
    for (double v : all) {
        total_ += v;
    }
}

double QuadratureField::integrate_power_weighted(const Eigen::VectorXd& g, double a) const
{
    double sum = 0.0;
    const int o = disc_->origin();
    for (int i = 0; i < disc_->unknowns(); ++i) {
        if (i == o) {
            sum += g[i] * origin_cell_power_integral(disc_->h(), a);
        } else if (a == 0.0) {
            sum += w_[i] * g[i];
        } else {
            sum += w_[i] * g[i] * cell_mean_power(disc_->x(i), disc_->y(i), disc_->h(), a);
        }
    }
    return sum;
}

}  // namespace hesseig
