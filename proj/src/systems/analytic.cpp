#include "scenver/systems/analytic.hpp"

#include <cmath>
#include <numbers>

namespace scenver {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a)
{
    double w = std::fmod(a, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    return w >= kTwoPi ? 0.0 : w;
}

}  // namespace

AnalyticVariant parse_analytic_variant(const std::string& name)
{
    if (name == "circle") return AnalyticVariant::circle;
    if (name == "decay") return AnalyticVariant::decay;
    if (name == "param_decay") return AnalyticVariant::param_decay;
    throw Error("unknown analytic system variant '" + name + "'");
}

std::string to_string(AnalyticVariant v)
{
    switch (v) {
    case AnalyticVariant::circle: return "circle";
    case AnalyticVariant::decay: return "decay";
    case AnalyticVariant::param_decay: return "param_decay";
    }
    return "unknown";
}

StateVector analytic_step(AnalyticVariant variant, const StateVector& x, const ParamVector& theta, double dt)
{
    StateVector next = x;
    switch (variant) {
    case AnalyticVariant::circle:
        next[0] = 1.0;
        next[1] = wrap_angle(x[1] + 0.1 * dt);
        break;
    case AnalyticVariant::decay:
        next[0] = x[0] * std::exp(-0.5 * dt);
        break;
    case AnalyticVariant::param_decay: {
        if (theta.discrete.size() != 1) throw DomainError("param_decay expects one discrete parameter");
        const double target = theta.discrete[0];
        next[0] = target + (x[0] - target) * std::exp(-3.0 * dt);
        break;
    }
    }
    return next;
}

std::size_t AnalyticSystem::state_dim() const
{
    return variant_ == AnalyticVariant::circle ? 2 : 1;
}

Box AnalyticSystem::state_box() const
{
    switch (variant_) {
    case AnalyticVariant::circle: return Box(Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(1.0, kTwoPi));
    case AnalyticVariant::decay: return Box(Eigen::VectorXd::Constant(1, -1.0), Eigen::VectorXd::Constant(1, 1.0));
    case AnalyticVariant::param_decay:
        return Box(Eigen::VectorXd::Constant(1, -3.0), Eigen::VectorXd::Constant(1, 3.0));
    }
    return {};
}

ParamSpec AnalyticSystem::param_spec() const
{
    ParamSpec spec;
    spec.continuous = Box(Eigen::VectorXd(0), Eigen::VectorXd(0));
    if (variant_ == AnalyticVariant::param_decay) spec.discrete = {{-1.5, 0.0, 1.5}};
    return spec;
}

StateVector AnalyticSystem::step(const StateVector& x, const ParamVector& theta, double dt) const
{
    return analytic_step(variant_, x, theta, dt);
}

}  // namespace scenver
