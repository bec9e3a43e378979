#include "scenver/barrier_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace scenver {

namespace {

std::string format_point(const StateVector& x, const ParamVector& theta)
{
    std::ostringstream os;
    os.precision(17);
    os << "x=(";
    for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << "), theta=(";
    const auto flat = theta.flattened();
    for (std::size_t i = 0; i < flat.size(); ++i) os << (i ? ", " : "") << flat[i];
    os << ")";
    return os.str();
}

}  // namespace

std::vector<double> ParamVector::flattened() const
{
    std::vector<double> out(continuous.data(), continuous.data() + continuous.size());
    out.insert(out.end(), discrete.begin(), discrete.end());
    return out;
}

bool ParamVector::operator==(const ParamVector& other) const
{
    return continuous.size() == other.continuous.size() && continuous == other.continuous &&
           discrete == other.discrete;
}

Box::Box(Eigen::VectorXd lo, Eigen::VectorXd hi) : lower(std::move(lo)), upper(std::move(hi))
{
    if (lower.size() != upper.size()) throw DomainError("box bounds have mismatched dimensions");
    for (Eigen::Index i = 0; i < lower.size(); ++i) {
        if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || lower[i] > upper[i]) {
            throw DomainError("box dimension " + std::to_string(i) + " has invalid bounds");
        }
    }
}

bool Box::contains(const Eigen::VectorXd& x) const
{
    if (x.size() != lower.size()) return false;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
    }
    return true;
}

bool ParamSpec::contains(const ParamVector& theta) const
{
    if (!continuous.contains(theta.continuous)) return false;
    if (theta.discrete.size() != discrete.size()) return false;
    for (std::size_t i = 0; i < discrete.size(); ++i) {
        if (std::find(discrete[i].begin(), discrete[i].end(), theta.discrete[i]) == discrete[i].end()) {
            return false;
        }
    }
    return true;
}

BarrierFunction::BarrierFunction(std::string name, Evaluator evaluator, double m, double M, DomainBox domain)
    : name_(std::move(name)), evaluator_(std::move(evaluator)), m_(m), M_(M), domain_(std::move(domain))
{
    if (!evaluator_) throw Error("barrier '" + name_ + "' has no evaluator");
    if (!(m_ > 0.0) || !(M_ > 0.0) || !std::isfinite(m_) || !std::isfinite(M_)) {
        throw Error("barrier '" + name_ + "' range bounds m, M must be positive and finite");
    }
}

void BarrierFunction::check_domain(const StateVector& x, const ParamVector& theta) const
{
    if (static_cast<std::size_t>(x.size()) != domain_.state.size()) {
        throw DomainError("barrier '" + name_ + "': state has dimension " + std::to_string(x.size()) +
                          ", expected " + std::to_string(domain_.state.size()));
    }
    if (!x.allFinite()) throw DomainError("barrier '" + name_ + "': non-finite state " + format_point(x, theta));
    if (!domain_.params.contains(theta)) {
        throw DomainError("barrier '" + name_ + "': parameter outside declared space " + format_point(x, theta));
    }
}

double BarrierFunction::evaluate(const StateVector& x, const ParamVector& theta) const
{
    check_domain(x, theta);
    const double value = evaluator_(x, theta);
    if (!(value >= -m_ && value <= M_)) {
        std::ostringstream os;
        os.precision(17);
        os << "barrier '" << name_ << "' evaluated to " << value << " outside declared range [" << -m_ << ", " << M_
           << "] at " << format_point(x, theta);
        throw RangeError(os.str());
    }
    return value;
}

double evaluate_barrier(const BarrierFunction& h, const StateVector& x, const ParamVector& theta)
{
    return h.evaluate(x, theta);
}

bool in_superlevel_set(const BarrierFunction& h, const StateVector& x, const ParamVector& theta)
{
    return h.evaluate(x, theta) >= 0.0;
}

double Trajectory::min_barrier() const
{
    if (barrier_values.empty()) throw Error("trajectory has no barrier values");
    return *std::min_element(barrier_values.begin(), barrier_values.end());
}

}  // namespace scenver
