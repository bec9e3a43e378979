#include "scenver/systems/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace scenver {

namespace {

constexpr double kViolationTol = 1e-12;
constexpr double kDirectionTol = 1e-14;
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

Eigen::Index QPProblem::constraint_count() const
{
    return A.rows() + (upper ? upper->size() : 0) + (lower ? lower->size() : 0);
}

void QPProblem::expanded(Eigen::MatrixXd& A_all, Eigen::VectorXd& b_all) const
{
    const Eigen::Index n = u_nom.size();
    const Eigen::Index m = constraint_count();
    A_all.setZero(m, n);
    b_all.setZero(m);
    Eigen::Index row = 0;
    if (A.rows() > 0) {
        A_all.topRows(A.rows()) = A;
        b_all.head(A.rows()) = b;
        row = A.rows();
    }
    if (upper) {
        A_all.block(row, 0, n, n).setIdentity();
        b_all.segment(row, n) = *upper;
        row += n;
    }
    if (lower) {
        A_all.block(row, 0, n, n) = -Eigen::MatrixXd::Identity(n, n);
        b_all.segment(row, n) = -*lower;
    }
}

QPSolution solve_qp_active_set(const QPProblem& qp, int max_iterations)
{
    const Eigen::Index n = qp.u_nom.size();
    if (qp.A.rows() > 0 && (qp.A.cols() != n || qp.b.size() != qp.A.rows())) {
        throw Error("solve_qp_active_set: constraint dimensions do not match");
    }
    if ((qp.upper && qp.upper->size() != n) || (qp.lower && qp.lower->size() != n)) {
        throw Error("solve_qp_active_set: box bound dimensions do not match");
    }

    // Work with constraints in the form n_jᵀu >= d_j, n_j = -a_j, d_j = -b_j.
    Eigen::MatrixXd A_all;
    Eigen::VectorXd b_all;
    qp.expanded(A_all, b_all);
    const Eigen::Index m = A_all.rows();
    const Eigen::MatrixXd normals = -A_all.transpose();  // column j is n_j
    const Eigen::VectorXd rhs = -b_all;
    Eigen::VectorXd row_norm(m);
    for (Eigen::Index j = 0; j < m; ++j) row_norm(j) = std::max(normals.col(j).norm(), 1e-300);

    QPSolution sol;
    sol.u = qp.u_nom;
    std::vector<Eigen::Index> active;
    std::vector<double> lambda;  // multipliers of `active`
    std::vector<char> is_active(static_cast<std::size_t>(m), 0);

    auto slack = [&](Eigen::Index j) { return normals.col(j).dot(sol.u) - rhs(j); };
    auto fail = [&](const std::string& why, Eigen::Index blocking) {
        std::ostringstream os;
        os << "QP " << why << " (constraint " << blocking << ", " << active.size() << " active of " << m
           << ", iterations " << sol.iterations << ")";
        throw QpError(os.str(), blocking);
    };

    while (true) {
        // Most violated constraint, measured as a distance.
        Eigen::Index p = -1;
        double worst = -kViolationTol;
        for (Eigen::Index j = 0; j < m; ++j) {
            if (is_active[static_cast<std::size_t>(j)]) continue;
            const double s = slack(j) / row_norm(j);
            if (s < worst) {
                worst = s;
                p = j;
            }
        }
        if (p < 0) break;

        double lambda_p = 0.0;
        while (true) {
            if (++sol.iterations > max_iterations) fail("iteration cap exceeded", p);

            const Eigen::VectorXd np = normals.col(p);
            const auto q = static_cast<Eigen::Index>(active.size());
            Eigen::VectorXd r(q);
            Eigen::VectorXd z = np;
            if (q > 0) {
                Eigen::MatrixXd N(n, q);
                for (Eigen::Index k = 0; k < q; ++k) N.col(k) = normals.col(active[static_cast<std::size_t>(k)]);
                r = (N.transpose() * N).ldlt().solve(N.transpose() * np);
                z = np - N * r;
            }

            // Partial step: largest move keeping active multipliers nonnegative.
            double t1 = kInf;
            Eigen::Index drop = -1;
            for (Eigen::Index k = 0; k < q; ++k) {
                if (r(k) > 0.0) {
                    const double t = lambda[static_cast<std::size_t>(k)] / r(k);
                    if (t < t1) {
                        t1 = t;
                        drop = k;
                    }
                }
            }
            // Full step: makes constraint p tight.
            const double zn = z.dot(np);
            const double t2 = z.squaredNorm() <= kDirectionTol * np.squaredNorm() ? kInf : -slack(p) / zn;
            const double t = std::min(t1, t2);
            if (t == kInf) fail("infeasible", p);

            for (Eigen::Index k = 0; k < q; ++k) lambda[static_cast<std::size_t>(k)] -= t * r(k);
            lambda_p += t;
            if (t2 < kInf) sol.u += t * z;

            if (t2 <= t1) {
                active.push_back(p);
                lambda.push_back(lambda_p);
                is_active[static_cast<std::size_t>(p)] = 1;
                break;
            }
            is_active[static_cast<std::size_t>(active[static_cast<std::size_t>(drop)])] = 0;
            active.erase(active.begin() + drop);
            lambda.erase(lambda.begin() + drop);
        }
    }

    sol.multipliers = Eigen::VectorXd::Zero(m);
    for (std::size_t k = 0; k < active.size(); ++k) sol.multipliers(active[k]) = std::max(0.0, lambda[k]);
    sol.active = active;
    return sol;
}

KktResiduals kkt_residuals(const QPProblem& qp, const QPSolution& sol)
{
    Eigen::MatrixXd A_all;
    Eigen::VectorXd b_all;
    qp.expanded(A_all, b_all);
    KktResiduals res;
    if (A_all.rows() == 0) {
        res.stationarity = (sol.u - qp.u_nom).cwiseAbs().maxCoeff();
        return res;
    }
    const Eigen::VectorXd g = A_all * sol.u - b_all;
    res.primal = std::max(0.0, g.maxCoeff());
    res.dual = std::max(0.0, -sol.multipliers.minCoeff());
    res.stationarity = (sol.u - qp.u_nom + A_all.transpose() * sol.multipliers).cwiseAbs().maxCoeff();
    res.complementarity = sol.multipliers.cwiseProduct(g).cwiseAbs().maxCoeff();
    return res;
}

}  // namespace scenver
