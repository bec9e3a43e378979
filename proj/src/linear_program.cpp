#include "scenver/linear_program.hpp"

#include <limits>
#include <vector>

#include "scenver/barrier_core.hpp"

namespace scenver {

namespace {

constexpr double kPivotTol = 1e-12;
constexpr double kFeasTol = 1e-9;

// Dictionary form: x_B(i) = d(i) + Σ_j D(i, j) x_N(j); objective = obj0 + Σ_j obj(j) x_N(j).
struct Dictionary {
    Eigen::MatrixXd D;
    Eigen::VectorXd d;
    Eigen::VectorXd obj;
    double obj0 = 0.0;
    std::vector<int> basic;
    std::vector<int> nonbasic;

    void pivot(Eigen::Index r, Eigen::Index e)
    {
        const double a = D(r, e);
        // Solve row r for the entering variable.
        Eigen::RowVectorXd row = -D.row(r) / a;
        row(e) = 1.0 / a;
        const double dr = -d(r) / a;

        for (Eigen::Index i = 0; i < D.rows(); ++i) {
            if (i == r) continue;
            const double coef = D(i, e);
            if (coef == 0.0) continue;
            d(i) += coef * dr;
            D(i, e) = 0.0;
            D.row(i) += coef * row;
        }
        const double oc = obj(e);
        if (oc != 0.0) {
            obj0 += oc * dr;
            obj(e) = 0.0;
            obj += oc * row.transpose();
        }
        D.row(r) = row;
        d(r) = dr;
        std::swap(basic[static_cast<std::size_t>(r)], nonbasic[static_cast<std::size_t>(e)]);
    }

    // Bland's rule. Returns false if unbounded.
    bool optimize()
    {
        const std::size_t cap = 50 * (basic.size() + nonbasic.size()) + 100;
        for (std::size_t iter = 0; iter < cap; ++iter) {
            Eigen::Index enter = -1;
            for (Eigen::Index j = 0; j < obj.size(); ++j) {
                if (obj(j) > kPivotTol && (enter < 0 || nonbasic[j] < nonbasic[enter])) enter = j;
            }
            if (enter < 0) return true;

            Eigen::Index leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < D.rows(); ++i) {
                if (D(i, enter) < -kPivotTol) {
                    const double ratio = d(i) / -D(i, enter);
                    if (ratio < best || (ratio == best && basic[i] < basic[leave])) {
                        best = ratio;
                        leave = i;
                    }
                }
            }
            if (leave < 0) return false;
            pivot(leave, enter);
        }
        throw Error("simplex iteration cap exceeded");
    }

    void drop_column(Eigen::Index e)
    {
        const Eigen::Index last = D.cols() - 1;
        if (e != last) {
            D.col(e) = D.col(last);
            obj(e) = obj(last);
            nonbasic[static_cast<std::size_t>(e)] = nonbasic.back();
        }
        D.conservativeResize(Eigen::NoChange, last);
        obj.conservativeResize(last);
        nonbasic.pop_back();
    }
};

}  // namespace

LpResult solve_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b)
{
    const Eigen::Index m = A.rows();
    const Eigen::Index n = A.cols();
    if (c.size() != n || b.size() != m) throw Error("solve_lp: dimension mismatch");

    // Variables: [0, n) z⁺, [n, 2n) z⁻, [2n, 2n+m) slacks, 2n+m auxiliary w.
    const int aux = static_cast<int>(2 * n + m);
    Dictionary dict;
    dict.D.resize(m, 2 * n + 1);
    dict.D.leftCols(n) = -A;
    dict.D.middleCols(n, n) = A;
    dict.D.col(2 * n).setOnes();
    dict.d = b;
    dict.obj = Eigen::VectorXd::Zero(2 * n + 1);
    for (int j = 0; j < 2 * n + 1; ++j) dict.nonbasic.push_back(j < 2 * n ? j : aux);
    for (int i = 0; i < m; ++i) dict.basic.push_back(static_cast<int>(2 * n) + i);

    LpResult result;

    Eigen::Index worst = -1;
    if (m > 0) b.minCoeff(&worst);
    if (m > 0 && b(worst) < 0.0) {
        // Phase one: maximize -w after making the dictionary feasible with one pivot.
        dict.obj(2 * n) = -1.0;
        dict.pivot(worst, 2 * n);
        if (!dict.optimize()) throw Error("solve_lp: phase one unbounded");
        if (dict.obj0 < -kFeasTol) return result;

        for (Eigen::Index i = 0; i < m; ++i) {
            if (dict.basic[static_cast<std::size_t>(i)] != aux) continue;
            Eigen::Index e = -1;
            for (Eigen::Index j = 0; j < dict.D.cols(); ++j) {
                if (std::abs(dict.D(i, j)) > kPivotTol) {
                    e = j;
                    break;
                }
            }
            if (e < 0) throw Error("solve_lp: cannot remove auxiliary variable");
            dict.pivot(i, e);
        }
    }
    for (Eigen::Index j = 0; j < dict.D.cols(); ++j) {
        if (dict.nonbasic[static_cast<std::size_t>(j)] == aux) {
            dict.drop_column(j);
            break;
        }
    }

    // Phase two objective in terms of the current nonbasic variables.
    dict.obj.setZero(dict.D.cols());
    dict.obj0 = 0.0;
    auto cost = [&](int var) -> double {
        if (var < n) return c(var);
        if (var < 2 * n) return -c(var - n);
        return 0.0;
    };
    for (Eigen::Index j = 0; j < dict.D.cols(); ++j) dict.obj(j) += cost(dict.nonbasic[static_cast<std::size_t>(j)]);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double ci = cost(dict.basic[static_cast<std::size_t>(i)]);
        if (ci == 0.0) continue;
        dict.obj0 += ci * dict.d(i);
        dict.obj += ci * dict.D.row(i).transpose();
    }
    if (!dict.optimize()) {
        result.status = LpStatus::unbounded;
        return result;
    }

    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < m; ++i) {
        const int var = dict.basic[static_cast<std::size_t>(i)];
        if (var < n) z(var) += dict.d(i);
        else if (var < 2 * n) z(var - n) -= dict.d(i);
    }

    // Re-solve on the rows whose slack is nonbasic (tight).
    std::vector<Eigen::Index> tight;
    for (int var : dict.nonbasic) {
        if (var >= 2 * n && var < 2 * n + m) tight.push_back(var - 2 * n);
    }
    if (static_cast<Eigen::Index>(tight.size()) >= n && n > 0) {
        Eigen::MatrixXd At(static_cast<Eigen::Index>(tight.size()), n);
        Eigen::VectorXd bt(static_cast<Eigen::Index>(tight.size()));
        for (std::size_t k = 0; k < tight.size(); ++k) {
            At.row(static_cast<Eigen::Index>(k)) = A.row(tight[k]);
            bt(static_cast<Eigen::Index>(k)) = b(tight[k]);
        }
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(At);
        if (qr.rank() == n) z = qr.solve(bt);
    }

    result.status = LpStatus::optimal;
    result.z = z;
    result.objective = c.dot(z);
    return result;
}

}  // namespace scenver
