#include "scenver/systems/obstacle_course.hpp"

#include "scenver/systems/integrator.hpp"
#include "scenver/systems/qp.hpp"

namespace scenver {

ObstacleCourse::ObstacleCourse(ObstacleCourseConfig config) : config_(std::move(config))
{
    if (config_.n_obstacles < 1) throw Error("obstacle course needs at least one obstacle");
    if (config_.substeps < 1) throw Error("obstacle course: substeps must be >= 1");
}

Box ObstacleCourse::state_box() const
{
    return Box(config_.start_lower, config_.start_upper);
}

ParamSpec ObstacleCourse::param_spec() const
{
    const int n = config_.n_obstacles;
    Eigen::VectorXd lo(2 * n), hi(2 * n);
    for (int i = 0; i < n; ++i) {
        lo.segment<2>(2 * i) = config_.obstacle_lower;
        hi.segment<2>(2 * i) = config_.obstacle_upper;
    }
    ParamSpec spec;
    spec.continuous = Box(lo, hi);
    return spec;
}

StateVector ObstacleCourse::step(const StateVector& x, const ParamVector& theta, double dt) const
{
    const int n = config_.n_obstacles;
    if (x.size() != 2 || theta.continuous.size() != 2 * n) throw DomainError("obstacle course: bad dimensions");

    QPProblem qp;
    qp.u_nom = config_.gain * (config_.goal - x.head<2>());
    const double speed = qp.u_nom.norm();
    if (speed > config_.v_max) qp.u_nom *= config_.v_max / speed;

    const double R2 = config_.filter_radius * config_.filter_radius;
    qp.A.resize(n, 2);
    qp.b.resize(n);
    for (int i = 0; i < n; ++i) {
        const Eigen::Vector2d diff = x.head<2>() - theta.continuous.segment<2>(2 * i);
        const double b = diff.squaredNorm() - R2;
        qp.A.row(i) = -2.0 * diff.transpose();
        qp.b(i) = config_.alpha * b * b * b;
    }

    Eigen::VectorXd u;
    try {
        u = solve_qp_active_set(qp).u;
    } catch (const QpError& e) {
        throw StepError(std::string("obstacle filter infeasible: ") + e.what());
    }
    auto field = [&](const StateVector&) -> StateVector { return u; };
    return integrate_rk4(field, x, dt, config_.substeps);
}

}  // namespace scenver
