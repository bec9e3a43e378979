#pragma once

#include <span>

#include <Eigen/Dense>

#include "scenver/barrier_core.hpp"

namespace scenver {

/// min over obstacles of ‖x - o_i‖ - radius (planar).
double obstacle_barrier(const Eigen::Vector2d& x, std::span<const Eigen::Vector2d> obstacles, double radius = 0.35);

// Factories for the candidate barriers the CLI knows about. Each takes the declared range
// (m, M) and the domain box used for sampling.

/// Pairwise robot separation: fleet_barrier(x, r_s).
BarrierFunction make_fleet_distance_barrier(double r_s, double m, double M, DomainBox domain);

/// Distance of the planar position (x[0], x[1]) to obstacles stored as consecutive
/// (x, y) pairs in θ's continuous part, minus radius.
BarrierFunction make_obstacle_distance_barrier(double radius, double m, double M, DomainBox domain);

BarrierFunction make_constant_barrier(double value, double m, double M, DomainBox domain);

/// h = scale · x[dim] + offset.
BarrierFunction make_affine_barrier(Eigen::Index dim, double scale, double offset, double m, double M,
                                    DomainBox domain);

/// h = min(x[dim] - lo, hi - x[dim]): nonnegative exactly on [lo, hi].
BarrierFunction make_interval_barrier(Eigen::Index dim, double lo, double hi, double m, double M, DomainBox domain);

}  // namespace scenver
