#include "hesseig/domain.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "hesseig/errors.hpp"

namespace hesseig {

namespace {

std::string format_number(double v)
{
    std::ostringstream os;
    os << v;
    return os.str();
}

// Distance from an interior point to the ellipse x^2/a^2 + y^2/b^2 = 1:
// coarse angular scan followed by golden-section refinement.
double ellipse_distance(double a, double b, double x, double y)
{
    auto dist2 = [&](double t) {
        const double ex = a * std::cos(t) - x;
        const double ey = b * std::sin(t) - y;
        return ex * ex + ey * ey;
    };
    constexpr int samples = 256;
    int best = 0;
    double best_val = dist2(0.0);
    for (int i = 1; i < samples; ++i) {
        const double v = dist2(2.0 * std::numbers::pi * i / samples);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    double lo = 2.0 * std::numbers::pi * (best - 1) / samples;
    double hi = 2.0 * std::numbers::pi * (best + 1) / samples;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 64; ++it) {
        const double m1 = hi - g * (hi - lo);
        const double m2 = lo + g * (hi - lo);
        if (dist2(m1) < dist2(m2)) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    return std::sqrt(dist2(0.5 * (lo + hi)));
}

}  // namespace

DomainDescriptor DomainDescriptor::disk(double radius)
{
    if (!(radius > 0.0)) {
        throw ParameterError("disk radius must be positive");
    }
    return {DomainKind::disk, radius, radius};
}

DomainDescriptor DomainDescriptor::ellipse(double a, double b)
{
    if (!(a > 0.0) || !(b > 0.0)) {
        throw ParameterError("ellipse semi-axes must be positive");
    }
    return {DomainKind::ellipse, a, b};
}

DomainDescriptor DomainDescriptor::square(double side)
{
    if (!(side > 0.0)) {
        throw ParameterError("square side must be positive");
    }
    return {DomainKind::square, side, side};
}

bool DomainDescriptor::contains(double x, double y) const
{
    switch (kind_) {
    case DomainKind::disk:
    case DomainKind::ellipse:
        return (x / a_) * (x / a_) + (y / b_) * (y / b_) < 1.0;
    case DomainKind::square:
        return std::abs(x) < 0.5 * a_ && std::abs(y) < 0.5 * a_;
    }
    return false;
}

double DomainDescriptor::ray_hit(double x, double y, double dx, double dy) const
{
    switch (kind_) {
    case DomainKind::disk:
    case DomainKind::ellipse: {
        const double px = x / a_, py = y / b_;
        const double qx = dx / a_, qy = dy / b_;
        const double qq = qx * qx + qy * qy;
        const double pq = px * qx + py * qy;
        const double pp = px * px + py * py;
        const double disc = std::max(0.0, pq * pq - qq * (pp - 1.0));
        // Stable root of qq t^2 + 2 pq t + (pp - 1) = 0 with t > 0.
        const double root = pq >= 0.0 ? (1.0 - pp) / (pq + std::sqrt(disc)) : (-pq + std::sqrt(disc)) / qq;
        return root;
    }
    case DomainKind::square: {
        const double half = 0.5 * a_;
        double t = INFINITY;
        if (dx != 0.0) {
            t = std::min(t, ((dx > 0 ? half : -half) - x) / dx);
        }
        if (dy != 0.0) {
            t = std::min(t, ((dy > 0 ? half : -half) - y) / dy);
        }
        return t;
    }
    }
    return INFINITY;
}

double DomainDescriptor::distance_to_boundary(double x, double y) const
{
    switch (kind_) {
    case DomainKind::disk:
        return a_ - std::hypot(x, y);
    case DomainKind::ellipse:
        return ellipse_distance(a_, b_, x, y);
    case DomainKind::square:
        return std::min(0.5 * a_ - std::abs(x), 0.5 * a_ - std::abs(y));
    }
    return 0.0;
}

double DomainDescriptor::half_extent_x() const noexcept { return kind_ == DomainKind::square ? 0.5 * a_ : a_; }

double DomainDescriptor::half_extent_y() const noexcept { return kind_ == DomainKind::square ? 0.5 * a_ : b_; }

double DomainDescriptor::area() const noexcept
{
    return kind_ == DomainKind::square ? a_ * a_ : std::numbers::pi * a_ * b_;
}

DomainDescriptor DomainDescriptor::scaled(double t) const
{
    if (!(t > 0.0)) {
        throw ParameterError("domain scale factor must be positive");
    }
    return {kind_, a_ * t, b_ * t};
}

std::string DomainDescriptor::describe() const
{
    switch (kind_) {
    case DomainKind::disk:
        return "disk(" + format_number(a_) + ")";
    case DomainKind::ellipse:
        return "ellipse(" + format_number(a_) + "," + format_number(b_) + ")";
    case DomainKind::square:
        return "square(" + format_number(a_) + ")";
    }
    return "unknown";
}

DomainDescriptor parse_domain(const std::string& text)
{
    auto open = text.find('(');
    auto close = text.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open) {
        throw ParameterError("domain must look like disk(R), ellipse(a,b) or square(L): '" + text + "'");
    }
    std::string name = text.substr(0, open);
    name.erase(std::remove_if(name.begin(), name.end(), [](unsigned char c) { return std::isspace(c); }), name.end());
    std::vector<double> args;
    std::stringstream ss(text.substr(open + 1, close - open - 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            args.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) {
                throw std::invalid_argument(item);
            }
        } catch (const std::exception&) {
            throw ParameterError("bad domain argument '" + item + "' in '" + text + "'");
        }
    }
    if (name == "disk" && args.size() == 1) {
        return DomainDescriptor::disk(args[0]);
    }
    if (name == "ellipse" && args.size() == 2) {
        return DomainDescriptor::ellipse(args[0], args[1]);
    }
    if (name == "square" && args.size() == 1) {
        return DomainDescriptor::square(args[0]);
    }
    throw ParameterError("unknown domain '" + text + "'");
}

}  // namespace hesseig
