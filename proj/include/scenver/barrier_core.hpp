#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace scenver {

/// Base of every error raised by the library. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside the declared domain (wrong dimension, non-finite entry, parameter outside Θ).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Barrier evaluation left the declared range [-m, M].
class RangeError : public Error {
public:
    using Error::Error;
};

/// A closed-loop system could not advance (for instance an infeasible safety filter).
/// The sampler treats it like a non-finite state and aborts the trial.
class StepError : public Error {
public:
    using Error::Error;
};

using StateVector = Eigen::VectorXd;

/// Parameter θ: a continuous part inside a box plus categorical slots, each holding
/// one value from a declared finite set.
struct ParamVector {
    Eigen::VectorXd continuous;
    std::vector<double> discrete;

    std::size_t size() const { return static_cast<std::size_t>(continuous.size()) + discrete.size(); }

    /// Continuous entries followed by discrete ones.
    std::vector<double> flattened() const;

    bool operator==(const ParamVector& other) const;
};

/// Axis-aligned box. Zero-width dimensions are allowed and act as fixed coordinates.
struct Box {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    Box() = default;
    Box(Eigen::VectorXd lo, Eigen::VectorXd hi);

    std::size_t size() const { return static_cast<std::size_t>(lower.size()); }
    bool contains(const Eigen::VectorXd& x) const;
};

struct ParamSpec {
    Box continuous;
    std::vector<std::vector<double>> discrete;

    bool contains(const ParamVector& theta) const;
    std::size_t size() const { return continuous.size() + discrete.size(); }
};

/// Domain of a barrier: a box over X and the parameter space Θ.
struct DomainBox {
    Box state;
    ParamSpec params;
};

/// User-supplied candidate barrier h: X × Θ → [-m, M].
///
/// The range bounds are declared, not inferred. Every evaluation is checked against
/// them and a value outside [-m, M] raises RangeError naming the point.
class BarrierFunction {
public:
    using Evaluator = std::function<double(const StateVector&, const ParamVector&)>;

    BarrierFunction(std::string name, Evaluator evaluator, double m, double M, DomainBox domain);

    const std::string& name() const { return name_; }
    double lower_bound() const { return m_; }
    double upper_bound() const { return M_; }
    const DomainBox& domain() const { return domain_; }

    /// Checks dimensions, finiteness and parameter membership. The state box is not
    /// enforced here: rollouts are allowed to leave it.
    void check_domain(const StateVector& x, const ParamVector& theta) const;

    double evaluate(const StateVector& x, const ParamVector& theta) const;

private:
    std::string name_;
    Evaluator evaluator_;
    double m_;
    double M_;
    DomainBox domain_;
};

double evaluate_barrier(const BarrierFunction& h, const StateVector& x, const ParamVector& theta);

/// True iff h(x, θ) >= 0; the boundary belongs to the set.
bool in_superlevel_set(const BarrierFunction& h, const StateVector& x, const ParamVector& theta);

/// Black-box closed-loop flow sampled at a fixed observation interval.
///
/// Implementations must be deterministic and `step` must be callable concurrently
/// from several threads (const and free of hidden mutable state).
class ClosedLoopSystem {
public:
    virtual ~ClosedLoopSystem() = default;

    virtual std::string name() const = 0;
    virtual std::size_t state_dim() const = 0;
    /// Natural sampling box over X for this system.
    virtual Box state_box() const = 0;
    virtual ParamSpec param_spec() const = 0;

    /// Advance the closed loop from x by one observation interval dt with θ held fixed.
    virtual StateVector step(const StateVector& x, const ParamVector& theta, double dt) const = 0;
};

/// One sampled constraint δ = (x_k, x_{k+1}, θ) with its cached barrier values.
struct Transition {
    StateVector x_k;
    StateVector x_k1;
    ParamVector theta;
    double h_k = 0.0;
    double h_k1 = 0.0;
    std::int64_t trial_id = 0;
    std::int64_t step_index = 0;
};

struct Trajectory {
    std::int64_t trial_id = 0;
    ParamVector theta;
    std::vector<StateVector> states;
    std::vector<double> barrier_values;

    std::size_t horizon() const { return states.empty() ? 0 : states.size() - 1; }
    const StateVector& initial() const { return states.front(); }
    double min_barrier() const;
};

}  // namespace scenver
