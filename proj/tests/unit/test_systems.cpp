#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "scenver/sampling.hpp"
#include "scenver/systems/analytic.hpp"
#include "scenver/systems/barriers.hpp"
#include "scenver/systems/integrator.hpp"
#include "scenver/systems/obstacle_course.hpp"
#include "scenver/systems/qp.hpp"
#include "scenver/systems/unicycle.hpp"

using namespace scenver;

namespace {

constexpr double kPi = std::numbers::pi;

StateVector scalar(double v) { return Eigen::VectorXd::Constant(1, v); }

ParamVector discrete(double v)
{
    ParamVector p;
    p.discrete = {v};
    return p;
}

StateVector fleet(std::initializer_list<double> values)
{
    StateVector x(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double v : values) x[i++] = v;
    return x;
}

}  // namespace

TEST_CASE("analytic flows")
{
    const auto c = analytic_step(AnalyticVariant::circle, Eigen::Vector2d(1.0, 1.0), {}, 0.05);
    CHECK(c[0] == 1.0);
    CHECK(c[1] == doctest::Approx(1.005).epsilon(1e-15));

    // wraps into [0, 2π)
    const auto w = analytic_step(AnalyticVariant::circle, Eigen::Vector2d(1.0, 2 * kPi - 0.001), {}, 0.05);
    CHECK(w[1] == doctest::Approx(0.004).epsilon(1e-9));

    CHECK(analytic_step(AnalyticVariant::decay, scalar(1.0), {}, 0.05)[0] == doctest::Approx(0.97531).epsilon(1e-5));
    CHECK(analytic_step(AnalyticVariant::decay, scalar(-0.4), {}, 0.05)[0] ==
          doctest::Approx(-0.4 * std::exp(-0.025)).epsilon(1e-15));

    for (double th : {-1.5, 0.0, 1.5}) {
        CHECK(analytic_step(AnalyticVariant::param_decay, scalar(th), discrete(th), 0.37)[0] == th);
    }
    const double x = analytic_step(AnalyticVariant::param_decay, scalar(2.0), discrete(-1.5), 0.1)[0];
    CHECK(x == doctest::Approx(-1.5 + 3.5 * std::exp(-0.3)).epsilon(1e-15));
    CHECK_THROWS(analytic_step(AnalyticVariant::param_decay, scalar(0.0), {}, 0.1));
}

TEST_CASE("analytic system metadata")
{
    AnalyticSystem a(AnalyticVariant::circle), b(AnalyticVariant::decay), c(AnalyticVariant::param_decay);
    CHECK(a.state_dim() == 2);
    CHECK(a.state_box().lower[0] == 1.0);
    CHECK(a.state_box().upper[0] == 1.0);
    CHECK(b.state_box().lower[0] == -1.0);
    CHECK(c.param_spec().discrete.at(0) == std::vector<double>{-1.5, 0.0, 1.5});
    CHECK(parse_analytic_variant("param_decay") == AnalyticVariant::param_decay);
    CHECK_THROWS(parse_analytic_variant("spiral"));
}

TEST_CASE("rk4 examples")
{
    auto zero = [](const StateVector& s) { return StateVector(StateVector::Zero(s.size())); };
    CHECK(integrate_rk4(zero, scalar(0.3), 0.1, 4)[0] == 0.3);

    auto one = [](const StateVector& s) { return StateVector(StateVector::Ones(s.size())); };
    CHECK(integrate_rk4(one, scalar(2.0), 0.1, 1)[0] == doctest::Approx(2.1).epsilon(1e-15));

    auto decay = [](const StateVector& s) { return StateVector(-0.5 * s); };
    CHECK(std::abs(integrate_rk4(decay, scalar(1.0), 0.05, 10)[0] - std::exp(-0.025)) <= 1e-10);

    // ẋ = 4t³ with t carried as a second state: exact for quartic solutions
    auto poly = [](const StateVector& s) {
        StateVector d(2);
        d << 4.0 * s[1] * s[1] * s[1], 1.0;
        return d;
    };
    const auto p = integrate_rk4(poly, Eigen::Vector2d(0.0, 0.0), 0.5, 1);
    CHECK(p[0] == doctest::Approx(std::pow(0.5, 4)).epsilon(1e-14));
}

TEST_CASE("rk4 is fourth order")
{
    auto decay = [](const StateVector& s) { return StateVector(-0.5 * s); };
    const double exact = std::exp(-0.5 * 2.0);
    const double e1 = std::abs(integrate_rk4(decay, scalar(1.0), 2.0, 4)[0] - exact);
    const double e2 = std::abs(integrate_rk4(decay, scalar(1.0), 2.0, 8)[0] - exact);
    const double order = std::log2(e1 / e2);
    CHECK(order >= 3.8);
    CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.1));
}

TEST_CASE("rk4 rejects non-finite derivatives and bad substeps")
{
    auto nan = [](const StateVector& s) { return StateVector(StateVector::Constant(s.size(), NAN)); };
    CHECK_THROWS_AS(integrate_rk4(nan, scalar(1.0), 0.1, 2), StepError);
    auto zero = [](const StateVector& s) { return StateVector(StateVector::Zero(s.size())); };
    CHECK_THROWS(integrate_rk4(zero, scalar(1.0), 0.1, 0));
}

TEST_CASE("lyapunov pose control")
{
    PoseGains gains;
    ControlLimits limits;
    const auto at_goal = lyapunov_pose_control({0.2, 0.1, 1.0}, {0.2, 0.1, 1.0}, gains, limits);
    CHECK(std::abs(at_goal[0]) <= 1e-12);
    CHECK(std::abs(at_goal[1]) <= 1e-12);

    const auto ahead = lyapunov_pose_control({0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, gains, limits);
    CHECK(ahead[0] > 0.0);
    CHECK(ahead[0] <= limits.v_max);
    CHECK(std::abs(ahead[1]) <= 1e-12);

    const auto behind = lyapunov_pose_control({0.0, 0.0, 0.0}, {-1.0, 1e-9, 0.0}, gains, limits);
    CHECK(std::abs(behind[1]) > 0.0);
    CHECK(behind[0] >= 0.0);

    // inside the stop radius only the heading is corrected
    const auto turn = lyapunov_pose_control({0.0, 0.0, 0.0}, {0.01, 0.0, 1.0}, gains, limits);
    CHECK(turn[0] == 0.0);
    CHECK(turn[1] > 0.0);

    // limits are respected
    for (double ang = 0; ang < 2 * kPi; ang += 0.3) {
        const auto u = lyapunov_pose_control({0.0, 0.0, ang}, {1.0, 0.5, 0.0}, gains, limits);
        CHECK(u[0] >= 0.0);
        CHECK(u[0] <= limits.v_max);
        CHECK(std::abs(u[1]) <= limits.omega_max);
    }
}

TEST_CASE("fleet barrier")
{
    CHECK(fleet_barrier(fleet({0, 0, 0, 0.5, 0, 1}), 0.2) == doctest::Approx(0.3));
    CHECK(fleet_barrier(fleet({0, 0, 0, 0.3, 0.4, 0, 1, 1, 0}), 0.15) == doctest::Approx(0.35));
    CHECK(fleet_barrier(fleet({0.1, 0.1, 0, 0.1, 0.1, 2, 0.1, 0.1, 4}), 0.15) == doctest::Approx(-0.15));
    CHECK_THROWS(fleet_barrier(fleet({0, 0, 0}), 0.15));

    // relabeling invariance
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int rep = 0; rep < 50; ++rep) {
        StateVector x(12);
        for (auto& v : x) v = u(rng);
        const double base = fleet_barrier(x, 0.15);
        std::array<int, 4> perm{0, 1, 2, 3};
        while (std::next_permutation(perm.begin(), perm.end())) {
            StateVector y(12);
            for (int i = 0; i < 4; ++i) y.segment<3>(3 * i) = x.segment<3>(3 * perm[i]);
            CHECK(fleet_barrier(y, 0.15) == base);
        }
    }
}

TEST_CASE("obstacle barrier")
{
    const std::vector<Eigen::Vector2d> one{{1, 0}};
    CHECK(obstacle_barrier({0, 0}, one) == doctest::Approx(0.65));
    CHECK(obstacle_barrier({1, 0}, one) == doctest::Approx(-0.35));

    const std::vector<Eigen::Vector2d> corners{{-1, -1}, {-1, 2}, {2, -1}, {2, 2}};
    const double center_distance = std::hypot(1.5, 1.5);
    CHECK(obstacle_barrier({0.5, 0.5}, corners) == doctest::Approx(center_distance - 0.35).epsilon(1e-14));
    CHECK(obstacle_barrier({0.5, 0.5}, corners) == doctest::Approx(1.7713).epsilon(1e-4));
}

TEST_CASE("qp without constraints returns the nominal input")
{
    QPProblem qp;
    qp.u_nom = Eigen::Vector3d(1, -2, 3);
    qp.A.resize(0, 3);
    qp.b.resize(0);
    const auto sol = solve_qp_active_set(qp);
    CHECK(sol.u == qp.u_nom);
    CHECK(sol.active.empty());
}

TEST_CASE("qp with one violated halfspace is a projection")
{
    QPProblem qp;
    qp.u_nom = Eigen::Vector2d(2, 1);
    qp.A.resize(1, 2);
    qp.A << 1, 2;
    qp.b = Eigen::VectorXd::Constant(1, 1.0);
    const Eigen::Vector2d a = qp.A.row(0).transpose();
    const Eigen::Vector2d expected = qp.u_nom - ((a.dot(qp.u_nom) - 1.0) / a.squaredNorm()) * a;
    const auto sol = solve_qp_active_set(qp);
    CHECK((sol.u - expected).norm() <= 1e-12);
    CHECK(sol.multipliers[0] > 0.0);
}

TEST_CASE("qp matches exhaustive enumeration and satisfies KKT")
{
    std::mt19937_64 rng(99);
    for (int rep = 0; rep < 1000; ++rep) {
        auto qp = oracle::random_feasible_qp(rng);
        const auto sol = solve_qp_active_set(qp);
        const auto ref = oracle::qp_by_enumeration(qp);
        REQUIRE(ref.has_value());
        CHECK((sol.u - *ref).norm() <= 1e-6);
        const auto r = kkt_residuals(qp, sol);
        CHECK(r.primal <= 1e-8);
        CHECK(r.dual <= 1e-10);
        CHECK(r.stationarity <= 1e-6);
        CHECK(r.complementarity <= 1e-8);
    }
}

TEST_CASE("qp box bounds")
{
    QPProblem qp;
    qp.u_nom = Eigen::Vector2d(3, -3);
    qp.A.resize(0, 2);
    qp.b.resize(0);
    qp.lower = Eigen::Vector2d(-1, -1);
    qp.upper = Eigen::Vector2d(1, 1);
    const auto sol = solve_qp_active_set(qp);
    CHECK(sol.u.isApprox(Eigen::Vector2d(1, -1)));
    CHECK(qp.constraint_count() == 4);
}

TEST_CASE("infeasible qp reports a blocking constraint")
{
    QPProblem qp;
    qp.u_nom = Eigen::Vector2d(0, 0);
    qp.A.resize(2, 2);
    qp.A << 1, 0, -1, 0;
    qp.b = Eigen::Vector2d(-1, -1);  // x <= -1 and x >= 1
    try {
        solve_qp_active_set(qp);
        FAIL("expected QpError");
    } catch (const QpError& e) {
        CHECK(e.blocking_constraint() >= 0);
    }
}

TEST_CASE("filter leaves inactive inputs alone")
{
    FilterParams filter;
    ControlLimits limits;
    const auto x = fleet({-1.0, -0.5, 0.3, 1.0, 0.5, 2.0, 0.0, 0.0, 4.0});
    const Eigen::VectorXd u_nom = (Eigen::VectorXd(6) << 0.1, 0.5, 0.2, -1.0, 0.05, 0.0).finished();
    CHECK((cbf_qp_filter(x, u_nom, filter, limits) - u_nom).norm() <= 1e-8);

    const auto single = fleet({0.0, 0.0, 1.0});
    const Eigen::Vector2d u1(0.15, 2.0);
    CHECK((cbf_qp_filter(single, u1, filter, limits) - u1).norm() <= 1e-8);
}

TEST_CASE("filter keeps two robots driven head-on apart")
{
    UnicycleConfig cfg;
    cfg.n_robots = 2;
    UnicycleFleet sys(cfg);
    ParamVector goals;
    goals.continuous = fleet({0.8, 0.0, 0.0, -0.8, 0.0, kPi});
    StateVector x = fleet({-0.8, 0.0, 0.0, 0.8, 0.0, kPi});
    double min_points = 1e9, min_centers = 1e9;
    for (int k = 0; k < 600; ++k) {
        x = sys.step(x, goals, 0.03);
        const Eigen::Vector2d p0 = x.segment<2>(0) + cfg.filter.lookahead * Eigen::Vector2d(std::cos(x[2]), std::sin(x[2]));
        const Eigen::Vector2d p1 = x.segment<2>(3) + cfg.filter.lookahead * Eigen::Vector2d(std::cos(x[5]), std::sin(x[5]));
        min_points = std::min(min_points, (p0 - p1).norm());
        min_centers = std::min(min_centers, fleet_barrier(x, 0.0));
    }
    CHECK(min_points >= cfg.filter.safety_radius - 5e-3);
    CHECK(min_centers >= 0.15);
}

TEST_CASE("without the filter the same robots collide")
{
    UnicycleConfig cfg;
    cfg.n_robots = 2;
    cfg.filter.enabled = false;
    UnicycleFleet sys(cfg);
    ParamVector goals;
    goals.continuous = fleet({0.8, 0.0, 0.0, -0.8, 0.0, kPi});
    StateVector x = fleet({-0.8, 0.0, 0.0, 0.8, 0.0, kPi});
    double min_h = 1e9;
    for (int k = 0; k < 300; ++k) {
        x = sys.step(x, goals, 0.03);
        min_h = std::min(min_h, fleet_barrier(x, 0.15));
    }
    CHECK(min_h < 0.0);
}

TEST_CASE("filtered fleet stays safe from random starts in C")
{
    UnicycleConfig cfg;
    UnicycleFleet sys(cfg);
    const auto h = make_fleet_distance_barrier(0.15, 0.15, 3.0, {sys.state_box(), sys.param_spec()});
    SamplingPlan plan;
    plan.n_trials = 200;
    plan.horizon = 100;
    plan.dt = 0.03;
    plan.seed = 77;
    const auto ts = collect_transitions(plan, sys, h, 0);
    CHECK(ts.aborted.empty());
    double worst = 1e9;
    for (const auto& t : ts.trajectories) worst = std::min(worst, t.min_barrier());
    CHECK(worst >= 0.0);
}

TEST_CASE("fleet metadata and determinism")
{
    UnicycleConfig cfg;
    cfg.n_robots = 4;
    UnicycleFleet sys(cfg);
    CHECK(sys.state_dim() == 12);
    CHECK(sys.param_spec().continuous.size() == 12);
    CHECK(sys.state_box().upper[2] == doctest::Approx(2 * kPi));
    ParamVector goals;
    goals.continuous = fleet({0.5, 0.2, 1.0, -0.5, 0.2, 2.0, 0.5, -0.3, 3.0, -0.5, -0.3, 4.0});
    const auto x0 = fleet({-0.9, -0.4, 0.1, 0.9, -0.4, 3.0, -0.9, 0.4, 5.0, 0.9, 0.4, 1.0});
    const auto a = sys.step(x0, goals, 0.03);
    const auto b = sys.step(x0, goals, 0.03);
    CHECK(a == b);
    for (int i = 0; i < 4; ++i) {
        CHECK(a[3 * i + 2] >= 0.0);
        CHECK(a[3 * i + 2] < 2 * kPi);
    }
}

TEST_CASE("obstacle course keeps clear of the obstacles")
{
    ObstacleCourse sys(ObstacleCourseConfig{});
    CHECK(sys.param_spec().continuous.size() == 8);
    const auto h = make_obstacle_distance_barrier(0.35, 0.35, 10.0, {sys.state_box(), sys.param_spec()});
    SamplingPlan plan;
    plan.n_trials = 50;
    plan.horizon = 150;
    plan.dt = 0.05;
    plan.seed = 4;
    const auto ts = collect_transitions(plan, sys, h, 0);
    CHECK(ts.size() == 7500);
    double worst = 1e9;
    for (const auto& t : ts.trajectories) worst = std::min(worst, t.min_barrier());
    CHECK(worst >= 0.0);
}
