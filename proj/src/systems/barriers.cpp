#include "scenver/systems/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "scenver/systems/unicycle.hpp"

namespace scenver {

double obstacle_barrier(const Eigen::Vector2d& x, std::span<const Eigen::Vector2d> obstacles, double radius)
{
    if (obstacles.empty()) throw Error("obstacle_barrier: need at least one obstacle");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& o : obstacles) best = std::min(best, (x - o).norm());
    return best - radius;
}

BarrierFunction make_fleet_distance_barrier(double r_s, double m, double M, DomainBox domain)
{
    if (domain.state.size() < 6 || domain.state.size() % 3 != 0) {
        throw Error("fleet distance barrier needs a state of 3 coordinates per robot and at least two robots");
    }
    return BarrierFunction(
        "fleet_distance", [r_s](const StateVector& x, const ParamVector&) { return fleet_barrier(x, r_s); }, m, M,
        std::move(domain));
}

BarrierFunction make_obstacle_distance_barrier(double radius, double m, double M, DomainBox domain)
{
    if (domain.state.size() < 2) throw Error("obstacle distance barrier needs a planar position");
    const auto n_cont = domain.params.continuous.size();
    if (n_cont < 2 || n_cont % 2 != 0) throw Error("obstacle distance barrier needs obstacle (x, y) pairs in theta");
    return BarrierFunction(
        "obstacle_distance",
        [radius](const StateVector& x, const ParamVector& theta) {
            std::vector<Eigen::Vector2d> obstacles;
            for (Eigen::Index i = 0; i + 1 < theta.continuous.size(); i += 2) {
                obstacles.emplace_back(theta.continuous[i], theta.continuous[i + 1]);
            }
            return obstacle_barrier(Eigen::Vector2d(x[0], x[1]), obstacles, radius);
        },
        m, M, std::move(domain));
}

BarrierFunction make_constant_barrier(double value, double m, double M, DomainBox domain)
{
    return BarrierFunction(
        "constant", [value](const StateVector&, const ParamVector&) { return value; }, m, M, std::move(domain));
}

BarrierFunction make_affine_barrier(Eigen::Index dim, double scale, double offset, double m, double M,
                                    DomainBox domain)
{
    if (dim < 0 || static_cast<std::size_t>(dim) >= domain.state.size()) throw Error("affine barrier: bad dimension");
    return BarrierFunction(
        "affine", [=](const StateVector& x, const ParamVector&) { return scale * x[dim] + offset; }, m, M,
        std::move(domain));
}

BarrierFunction make_interval_barrier(Eigen::Index dim, double lo, double hi, double m, double M, DomainBox domain)
{
    if (dim < 0 || static_cast<std::size_t>(dim) >= domain.state.size()) {
        throw Error("interval barrier: bad dimension");
    }
    if (!(lo < hi)) throw Error("interval barrier: need lo < hi");
    return BarrierFunction(
        "interval", [=](const StateVector& x, const ParamVector&) { return std::min(x[dim] - lo, hi - x[dim]); }, m,
        M, std::move(domain));
}

}  // namespace scenver
