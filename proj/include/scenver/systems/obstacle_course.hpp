#pragma once

#include <string>

#include <Eigen/Dense>

#include "scenver/barrier_core.hpp"

namespace scenver {

struct ObstacleCourseConfig {
    int n_obstacles = 4;
    Eigen::Vector2d goal{3.0, 0.5};
    double gain = 1.0;
    double v_max = 0.5;
    double alpha = 100.0;          // cubic class-K gain of the obstacle filter
    double filter_radius = 0.45;   // radius kept by the filter around each obstacle
    int substeps = 10;
    Eigen::Vector2d start_lower{-1.5, -1.0};
    Eigen::Vector2d start_upper{-0.5, 2.0};
    Eigen::Vector2d obstacle_lower{0.0, -1.0};
    Eigen::Vector2d obstacle_upper{2.0, 2.0};
};

/// A planar single-integrator walker steered to a fixed goal past obstacles whose
/// positions form the parameter θ = (o_1, ..., o_n). A proportional command is passed
/// through a CBF-QP against every obstacle.
class ObstacleCourse final : public ClosedLoopSystem {
public:
    explicit ObstacleCourse(ObstacleCourseConfig config);

    const ObstacleCourseConfig& config() const { return config_; }

    std::string name() const override { return "obstacle_course"; }
    std::size_t state_dim() const override { return 2; }
    Box state_box() const override;
    ParamSpec param_spec() const override;
    StateVector step(const StateVector& x, const ParamVector& theta, double dt) const override;

private:
    ObstacleCourseConfig config_;
};

}  // namespace scenver
