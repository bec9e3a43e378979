#include "scenver/systems/unicycle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "scenver/systems/integrator.hpp"
#include "scenver/systems/qp.hpp"

namespace scenver {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_pi(double a)
{
    a = std::fmod(a + kPi, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    return a - kPi;
}

double wrap_two_pi(double a)
{
    double w = std::fmod(a, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    return w >= kTwoPi ? 0.0 : w;
}

std::vector<std::pair<int, int>> robot_pairs(int n)
{
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    return pairs;
}

}  // namespace

Eigen::Vector2d lyapunov_pose_control(const Eigen::Vector3d& robot, const Eigen::Vector3d& goal,
                                      const PoseGains& gains, const ControlLimits& limits)
{
    const double dx = goal.x() - robot.x();
    const double dy = goal.y() - robot.y();
    const double rho = std::hypot(dx, dy);

    double v = 0.0;
    double w = 0.0;
    if (rho < gains.stop_radius) {
        w = gains.k_alpha * wrap_pi(goal.z() - robot.z());
    } else {
        const double alpha = wrap_pi(std::atan2(dy, dx) - robot.z());
        v = std::clamp(gains.k_rho * rho * std::cos(alpha), 0.0, limits.v_max);
        w = gains.k_alpha * alpha + gains.k_rho * std::sin(alpha) * std::cos(alpha);
    }
    return {v, std::clamp(w, -limits.omega_max, limits.omega_max)};
}

Eigen::VectorXd cbf_qp_filter(const StateVector& fleet_state, const Eigen::VectorXd& u_nom,
                              const FilterParams& filter, const ControlLimits& limits)
{
    const auto n_robots = static_cast<int>(fleet_state.size() / 3);
    if (fleet_state.size() != 3 * n_robots || u_nom.size() != 2 * n_robots) {
        throw Error("cbf_qp_filter: state and input sizes do not match");
    }
    const double l = filter.lookahead;
    const double R2 = filter.safety_radius * filter.safety_radius;
    const double r2 = filter.center_radius * filter.center_radius;

    // Decision variable z_i = (v_i, l ω_i). The lookahead velocity is the rotation
    // R(ψ_i) z_i, so ‖z - z_nom‖ equals the distance between lookahead velocities and
    // the box on z is exactly the control limits.
    std::vector<Eigen::Vector2d> points(static_cast<std::size_t>(n_robots));
    std::vector<Eigen::Vector2d> centers(points.size());
    std::vector<Eigen::Matrix2d> rot(points.size());
    QPProblem qp;
    qp.u_nom.resize(2 * n_robots);
    for (int i = 0; i < n_robots; ++i) {
        const double psi = fleet_state[3 * i + 2];
        const double c = std::cos(psi), s = std::sin(psi);
        rot[i] << c, -s, s, c;
        centers[i] = Eigen::Vector2d(fleet_state[3 * i], fleet_state[3 * i + 1]);
        points[i] = centers[i] + l * rot[i].col(0);
        qp.u_nom[2 * i] = u_nom[2 * i];
        qp.u_nom[2 * i + 1] = l * u_nom[2 * i + 1];
    }

    const auto pairs = robot_pairs(n_robots);
    const auto n_pairs = static_cast<Eigen::Index>(pairs.size());
    const bool guard_centers = filter.center_radius > 0.0;
    const Eigen::Index rows_per_pair = guard_centers ? 2 : 1;
    qp.A.setZero(rows_per_pair * n_pairs, 2 * n_robots);
    qp.b.resize(rows_per_pair * n_pairs);
    for (Eigen::Index k = 0; k < n_pairs; ++k) {
        const auto [i, j] = pairs[static_cast<std::size_t>(k)];
        // 2 diffᵀ(ṗ_i - ṗ_j) >= -α b³, written as a row of A z <= b
        const Eigen::Vector2d diff = points[i] - points[j];
        const double b = diff.squaredNorm() - R2;
        qp.A.block<1, 2>(rows_per_pair * k, 2 * i) = -2.0 * diff.transpose() * rot[i];
        qp.A.block<1, 2>(rows_per_pair * k, 2 * j) = 2.0 * diff.transpose() * rot[j];
        qp.b(rows_per_pair * k) = filter.alpha * b * b * b;
        if (guard_centers) {
            // centers move along the heading: ċ_i = v_i (cos ψ_i, sin ψ_i)
            const Eigen::Vector2d gap = centers[i] - centers[j];
            const double bc = gap.squaredNorm() - r2;
            qp.A(2 * k + 1, 2 * i) = -2.0 * gap.dot(rot[i].col(0));
            qp.A(2 * k + 1, 2 * j) = 2.0 * gap.dot(rot[j].col(0));
            qp.b(2 * k + 1) = filter.alpha * bc * bc * bc;
        }
    }

    Eigen::VectorXd z;
    if (n_pairs == 0) {
        z = qp.u_nom;
    } else {
        if (filter.box_bounds) {
            qp.upper.emplace(2 * n_robots);
            for (int i = 0; i < n_robots; ++i) {
                (*qp.upper)[2 * i] = limits.v_max;
                (*qp.upper)[2 * i + 1] = l * limits.omega_max;
            }
            qp.lower = -*qp.upper;
        }
        try {
            z = solve_qp_active_set(qp).u;
        } catch (const QpError&) {
            qp.upper.reset();
            qp.lower.reset();
            try {
                z = solve_qp_active_set(qp).u;
            } catch (const QpError& e) {
                const Eigen::Index k = e.blocking_constraint();
                std::string who = "unknown constraint";
                if (k >= 0 && k < qp.A.rows()) {
                    const auto [i, j] = pairs[static_cast<std::size_t>(k / rows_per_pair)];
                    who = "robots " + std::to_string(i) + " and " + std::to_string(j);
                }
                throw StepError("CBF-QP infeasible after dropping box bounds; blocking pair: " + who + " (" +
                                e.what() + ")");
            }
        }
    }

    Eigen::VectorXd u_safe(2 * n_robots);
    for (int i = 0; i < n_robots; ++i) {
        u_safe[2 * i] = std::clamp(z[2 * i], -limits.v_max, limits.v_max);
        u_safe[2 * i + 1] = std::clamp(z[2 * i + 1] / l, -limits.omega_max, limits.omega_max);
    }
    return u_safe;
}

double fleet_barrier(const StateVector& fleet_state, double r_s)
{
    const Eigen::Index n = fleet_state.size() / 3;
    if (n < 2 || fleet_state.size() != 3 * n) throw Error("fleet_barrier: need at least two robots");
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d = std::hypot(fleet_state[3 * i] - fleet_state[3 * j],
                                        fleet_state[3 * i + 1] - fleet_state[3 * j + 1]);
            best = std::min(best, d);
        }
    }
    return best - r_s;
}

UnicycleFleet::UnicycleFleet(UnicycleConfig config) : config_(std::move(config))
{
    if (config_.n_robots < 1) throw Error("unicycle fleet needs at least one robot");
    if (config_.substeps < 1) throw Error("unicycle fleet: substeps must be >= 1");
    if (!(config_.filter.lookahead > 0.0)) throw Error("unicycle fleet: lookahead must be positive");
    if (!(config_.limits.v_max > 0.0) || !(config_.limits.omega_max > 0.0)) {
        throw Error("unicycle fleet: control limits must be positive");
    }
}

Box UnicycleFleet::state_box() const
{
    const int n = config_.n_robots;
    Eigen::VectorXd lo(3 * n), hi(3 * n);
    for (int i = 0; i < n; ++i) {
        lo.segment<3>(3 * i) = config_.workspace_lower;
        hi.segment<3>(3 * i) = config_.workspace_upper;
    }
    return Box(lo, hi);
}

ParamSpec UnicycleFleet::param_spec() const
{
    ParamSpec spec;
    spec.continuous = state_box();
    return spec;
}

Eigen::VectorXd UnicycleFleet::control(const StateVector& x, const ParamVector& theta) const
{
    const int n = config_.n_robots;
    if (theta.continuous.size() != 3 * n) throw DomainError("unicycle fleet: parameter must hold one goal per robot");
    Eigen::VectorXd u(2 * n);
    for (int i = 0; i < n; ++i) {
        u.segment<2>(2 * i) = lyapunov_pose_control(x.segment<3>(3 * i), theta.continuous.segment<3>(3 * i),
                                                    config_.gains, config_.limits);
    }
    if (config_.filter.enabled && n >= 2) u = cbf_qp_filter(x, u, config_.filter, config_.limits);
    return u;
}

StateVector UnicycleFleet::step(const StateVector& x, const ParamVector& theta, double dt) const
{
    const int n = config_.n_robots;
    if (x.size() != 3 * n) throw DomainError("unicycle fleet: state has wrong dimension");
    const Eigen::VectorXd u = control(x, theta);

    auto field = [&](const StateVector& s) {
        StateVector d(s.size());
        for (int i = 0; i < n; ++i) {
            const double v = u[2 * i];
            d[3 * i] = v * std::cos(s[3 * i + 2]);
            d[3 * i + 1] = v * std::sin(s[3 * i + 2]);
            d[3 * i + 2] = u[2 * i + 1];
        }
        return d;
    };
    StateVector next = integrate_rk4(field, x, dt, config_.substeps);
    for (int i = 0; i < n; ++i) next[3 * i + 2] = wrap_two_pi(next[3 * i + 2]);
    return next;
}

}  // namespace scenver
