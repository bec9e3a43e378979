#pragma once

#include <string>

#include <Eigen/Dense>

#include "scenver/barrier_core.hpp"

namespace scenver {

struct PoseGains {
    double k_rho = 0.8;
    double k_alpha = 2.0;
    double stop_radius = 0.03;  // inside this distance only the heading is corrected
};

struct ControlLimits {
    double v_max = 0.2;      // m/s
    double omega_max = 3.6;  // rad/s
};

/// CBF-QP safety filter settings. The filter acts on lookahead points
/// p_i = (x_i, y_i) + l (cos ψ_i, sin ψ_i) treated as single integrators.
struct FilterParams {
    bool enabled = true;
    double lookahead = 0.05;      // l, m
    double alpha = 100.0;         // gain of the cubic class-K term α b³
    double safety_radius = 0.27;  // pairwise radius between lookahead points, m
    double center_radius = 0.16;  // pairwise radius between robot centers; 0 disables that row
    bool box_bounds = true;       // bound each lookahead velocity component by v_max + l ω_max
};

struct UnicycleConfig {
    int n_robots = 3;
    PoseGains gains;
    ControlLimits limits;
    FilterParams filter;
    int substeps = 10;
    Eigen::Vector3d workspace_lower{-1.2, -0.6, 0.0};
    Eigen::Vector3d workspace_upper{1.2, 0.6, 6.283185307179586};
};

/// Polar-coordinate pose regulator. With ρ the distance to the goal position and α the
/// heading error to the line of sight: v = k_ρ ρ cos α clipped to [0, v_max] and
/// ω = k_α α + k_ρ sin α cos α clipped to ±ω_max. Within stop_radius the robot stops
/// and turns to the goal heading. Returns (v, ω).
Eigen::Vector2d lyapunov_pose_control(const Eigen::Vector3d& robot, const Eigen::Vector3d& goal,
                                      const PoseGains& gains, const ControlLimits& limits);

/// Minimally modifies the nominal inputs u_nom = (v_1, ω_1, ..., v_N, ω_N) so that every
/// pair of lookahead points satisfies ∇b_ij · u_p >= -α b_ij³ with
/// b_ij = ‖p_i - p_j‖² - R², plus the same cubic condition on the robot centers with
/// radius center_radius (center velocities are v_i times the heading). If the QP with box bounds is infeasible it is retried
/// without them; a second failure raises StepError naming the blocking pair. Output is
/// clipped to the control limits.
Eigen::VectorXd cbf_qp_filter(const StateVector& fleet_state, const Eigen::VectorXd& u_nom,
                              const FilterParams& filter, const ControlLimits& limits);

/// min over pairs i < j of ‖P(x^i - x^j)‖ - r_s, P dropping the heading.
double fleet_barrier(const StateVector& fleet_state, double r_s);

/// N_R unicycles driven to goal poses θ = (x_d^1, ..., x_d^N) by the pose regulator,
/// optionally through the CBF-QP filter. Inputs are held over each observation
/// interval and the flow is integrated with RK4. Headings are wrapped to [0, 2π).
class UnicycleFleet final : public ClosedLoopSystem {
public:
    explicit UnicycleFleet(UnicycleConfig config);

    const UnicycleConfig& config() const { return config_; }

    std::string name() const override { return "unicycle_fleet"; }
    std::size_t state_dim() const override { return 3 * static_cast<std::size_t>(config_.n_robots); }
    Box state_box() const override;
    ParamSpec param_spec() const override;
    StateVector step(const StateVector& x, const ParamVector& theta, double dt) const override;

    /// Inputs the closed loop applies at state x: nominal control, then the filter.
    Eigen::VectorXd control(const StateVector& x, const ParamVector& theta) const;

private:
    UnicycleConfig config_;
};

}  // namespace scenver
