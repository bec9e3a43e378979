#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scenver/barrier_core.hpp"

namespace scenver {

/// minimize ‖u - u_nom‖²  subject to  A u <= b  and optional  lower <= u <= upper.
struct QPProblem {
    Eigen::VectorXd u_nom;
    Eigen::MatrixXd A;  // rows a_jᵀ; may have zero rows
    Eigen::VectorXd b;
    std::optional<Eigen::VectorXd> lower;
    std::optional<Eigen::VectorXd> upper;

    /// Number of inequality rows after expanding the box bounds. Box rows follow the
    /// rows of A: first u_i <= upper_i for every i, then -u_i <= -lower_i.
    Eigen::Index constraint_count() const;
    /// The expanded system [A; I; -I] u <= [b; upper; -lower].
    void expanded(Eigen::MatrixXd& A_all, Eigen::VectorXd& b_all) const;
};

struct QPSolution {
    Eigen::VectorXd u;
    Eigen::VectorXd multipliers;  // one per expanded row, >= 0, zero off the active set
    std::vector<Eigen::Index> active;
    int iterations = 0;
};

class QpError : public Error {
public:
    QpError(const std::string& what, Eigen::Index blocking) : Error(what), blocking_(blocking) {}
    /// Expanded row index of the constraint that could not be added, or -1.
    Eigen::Index blocking_constraint() const { return blocking_; }

private:
    Eigen::Index blocking_;
};

/// Dual active-set method (Goldfarb-Idnani) specialised to an identity Hessian. Starts at
/// the unconstrained minimiser u_nom, repeatedly adds the most violated constraint and
/// drops active constraints whose multipliers would turn negative. Throws QpError when the
/// problem is infeasible or the iteration cap is hit.
QPSolution solve_qp_active_set(const QPProblem& qp, int max_iterations = 100);

struct KktResiduals {
    double primal = 0.0;          // max(0, max_j a_jᵀu - b_j)
    double dual = 0.0;            // max(0, -min_j λ_j)
    double stationarity = 0.0;    // ‖u - u_nom + Aᵀλ‖∞
    double complementarity = 0.0; // max_j |λ_j (a_jᵀu - b_j)|
};

KktResiduals kkt_residuals(const QPProblem& qp, const QPSolution& sol);

}  // namespace scenver
