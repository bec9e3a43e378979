#pragma once

#include <string>

#include "scenver/barrier_core.hpp"

namespace scenver {

/// Classical fourth-order Runge-Kutta over [0, dt] in n_substeps equal steps. The field
/// is autonomous: f(x) -> ẋ. Throws StepError on a non-finite derivative.
template <typename Field>
StateVector integrate_rk4(Field&& field, StateVector x, double dt, int n_substeps)
{
    if (n_substeps < 1) throw Error("integrate_rk4: n_substeps must be >= 1");
    const double h = dt / n_substeps;
    auto eval = [&](const StateVector& at) {
        StateVector d = field(at);
        if (!d.allFinite()) throw StepError("integrate_rk4: non-finite derivative");
        return d;
    };
    for (int s = 0; s < n_substeps; ++s) {
        const StateVector k1 = eval(x);
        const StateVector k2 = eval(x + 0.5 * h * k1);
        const StateVector k3 = eval(x + 0.5 * h * k2);
        const StateVector k4 = eval(x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return x;
}

}  // namespace scenver
