#pragma once

#include <Eigen/Dense>

namespace scenver {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    Eigen::VectorXd z;
    double objective = 0.0;
};

/// Dense dictionary simplex for
///
///     maximize cᵀz  subject to  A z <= b,  z free,
///
/// using the split z = z⁺ - z⁻, a single auxiliary variable for phase one and Bland's
/// rule against cycling. On optimality z is recomputed from the original rows of the
/// final active set, so rounding from the pivot sequence does not accumulate.
LpResult solve_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

}  // namespace scenver
