#include "hesseig/stencil.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "hesseig/errors.hpp"

namespace hesseig {

namespace {

constexpr std::array<std::array<int, 2>, 8> kDirections = {{
    {1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}, {1, -1}, {-1, 1},
}};

// Shortest arm kept, as a fraction of the full arm; nodes closer to the
// boundary than this would make the difference weights unbounded.
constexpr double kMinArmFraction = 1e-6;

}  // namespace

Discretization::Discretization(const DomainDescriptor& domain, double h)
    : domain_(domain), geometry_(covering_geometry(domain, h))
{
    const auto total = geometry_.size();
    unknown_of_.assign(total, -1);
    for (int j = 0; j < geometry_.ny; ++j) {
        for (int i = 0; i < geometry_.nx; ++i) {
            const double x = geometry_.x(i);
            const double y = geometry_.y(j);
            // Nodes on the boundary up to rounding carry the boundary value.
            if (domain_.contains(x, y) && domain_.distance_to_boundary(x, y) > kMinArmFraction * h) {
                const int node = geometry_.index(i, j);
                unknown_of_[static_cast<std::size_t>(node)] = static_cast<int>(nodes_.size());
                nodes_.push_back(node);
            }
        }
    }
    const int n = unknowns();
    if (n < 9) {
        throw ParameterError("grid spacing too coarse: fewer than 9 interior nodes");
    }
    origin_ = unknown_of_[static_cast<std::size_t>(geometry_.index(geometry_.nx / 2, geometry_.ny / 2))];

    xs_.resize(n);
    ys_.resize(n);
    rs_.resize(n);
    dist_.resize(n);
    arms_.resize(static_cast<std::size_t>(n));
    nbrs_.resize(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u) {
        const int node = nodes_[static_cast<std::size_t>(u)];
        const int i = node % geometry_.nx;
        const int j = node / geometry_.nx;
        const double x = geometry_.x(i);
        const double y = geometry_.y(j);
        xs_[u] = x;
        ys_[u] = y;
        rs_[u] = std::hypot(x, y);
        dist_[u] = domain_.distance_to_boundary(x, y);
        for (int d = 0; d < 8; ++d) {
            const int di = kDirections[static_cast<std::size_t>(d)][0];
            const int dj = kDirections[static_cast<std::size_t>(d)][1];
            const double full = h * std::hypot(di, dj);
            const int ii = i + di;
            const int jj = j + dj;
            int nb = -1;
            if (ii >= 0 && ii < geometry_.nx && jj >= 0 && jj < geometry_.ny) {
                nb = unknown_of_[static_cast<std::size_t>(geometry_.index(ii, jj))];
            }
            double len = full;
            if (nb < 0) {
                const double t = domain_.ray_hit(x, y, di * h, dj * h);
                len = full * std::clamp(t, kMinArmFraction, 1.0);
            }
            arms_[static_cast<std::size_t>(u)][static_cast<std::size_t>(d)] = len;
            nbrs_[static_cast<std::size_t>(u)][static_cast<std::size_t>(d)] = nb;
        }
    }

    using Triplet = Eigen::Triplet<double>;
    for (int line = 0; line < 4; ++line) {
        std::vector<Triplet> trip;
        trip.reserve(static_cast<std::size_t>(3 * n));
        const int fwd = 2 * line;
        const int bwd = 2 * line + 1;
        for (int u = 0; u < n; ++u) {
            const double a = arm(u, fwd);
            const double b = arm(u, bwd);
            const double scale = 2.0 / (a + b);
            trip.emplace_back(u, u, -scale * (1.0 / a + 1.0 / b));
            if (const int nb = neighbor(u, fwd); nb >= 0) {
                trip.emplace_back(u, nb, scale / a);
            }
            if (const int nb = neighbor(u, bwd); nb >= 0) {
                trip.emplace_back(u, nb, scale / b);
            }
        }
        auto& m = d2_[static_cast<std::size_t>(line)];
        m.resize(n, n);
        m.setFromTriplets(trip.begin(), trip.end());
        m.makeCompressed();
    }
    lap_ = d2_[0] + d2_[1];
    lap_.makeCompressed();
    lap_lu_.analyzePattern(lap_);
    lap_lu_.factorize(lap_);
    if (lap_lu_.info() != Eigen::Success) {
        throw NumericalError("Laplacian factorization failed");
    }
}

Eigen::VectorXd Discretization::solve_laplacian(const Eigen::VectorXd& rhs) const
{
    if (rhs.size() != unknowns()) {
        throw ParameterError("right-hand side size does not match the grid");
    }
    return lap_lu_.solve(rhs);
}

DiscreteHessian Discretization::hessian(const Eigen::VectorXd& u) const
{
    DiscreteHessian hess;
    hess.xx = d2_[0] * u;
    hess.yy = d2_[1] * u;
    hess.xy = 0.5 * (d2_[2] * u - d2_[3] * u);
    return hess;
}

std::vector<std::uint8_t> Discretization::mask() const
{
    std::vector<std::uint8_t> m(geometry_.size(), 0);
    for (int node : nodes_) {
        m[static_cast<std::size_t>(node)] = 1;
    }
    return m;
}

GridField Discretization::to_field(const Eigen::VectorXd& u) const
{
    if (u.size() != unknowns()) {
        throw ParameterError("vector size does not match the grid");
    }
    GridField field(geometry_, mask(), 0.0);
    for (int k = 0; k < unknowns(); ++k) {
        field[static_cast<std::size_t>(nodes_[static_cast<std::size_t>(k)])] = u[k];
    }
    return field;
}

Eigen::VectorXd Discretization::from_field(const GridField& field) const
{
    if (!(field.geometry() == geometry_)) {
        throw ParameterError("grid field geometry does not match the discretization");
    }
    Eigen::VectorXd u(unknowns());
    for (int k = 0; k < unknowns(); ++k) {
        const auto node = static_cast<std::size_t>(nodes_[static_cast<std::size_t>(k)]);
        if (!field.inside(node)) {
            throw ParameterError("grid field mask does not match the discretization");
        }
        u[k] = field[node];
    }
    return u;
}

std::shared_ptr<const Discretization> discretization_for(const DomainDescriptor& domain, double h)
{
    using Key = std::tuple<int, double, double, double>;
    static std::mutex mutex;
    static std::map<Key, std::shared_ptr<const Discretization>> cache;
    const Key key{static_cast<int>(domain.kind()), domain.a(), domain.b(), h};
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) {
            return it->second;
        }
    }
    auto built = std::make_shared<const Discretization>(domain, h);
    std::lock_guard lock(mutex);
    if (cache.size() >= 8) {
        cache.clear();
    }
    return cache.emplace(key, std::move(built)).first->second;
}

}  // namespace hesseig
