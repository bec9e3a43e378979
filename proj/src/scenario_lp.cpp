#include "scenver/scenario_lp.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "scenver/linear_program.hpp"

namespace scenver {

namespace {

bool precedes(const Transition& a, const Transition& b)
{
    return a.trial_id != b.trial_id ? a.trial_id < b.trial_id : a.step_index < b.step_index;
}

void check_bound_args(std::int64_t N, double beta, std::int64_t d)
{
    if (N < 1) throw Error("epsilon_for_confidence: N must be >= 1");
    if (!(beta > 0.0 && beta < 1.0)) throw Error("epsilon_for_confidence: beta must lie in (0, 1)");
    if (d < 1 || d > N) throw Error("epsilon_for_confidence: need 1 <= d <= N");
}

nlohmann::ordered_json vector_json(const Eigen::VectorXd& v)
{
    auto arr = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

}  // namespace

ScenarioSolution solve_scenario(std::span<const Transition> transitions, double zero_tol, bool keep_bounds)
{
    if (transitions.empty()) throw Error("solve_scenario: no constraints");
    if (!(zero_tol > 0.0)) throw Error("solve_scenario: zero_tol must be positive");

    ScenarioSolution sol;
    const Transition* active = nullptr;
    for (const auto& t : transitions) {
        const double denom = std::abs(t.h_k);
        if (denom < zero_tol) {
            ++sol.n_discarded;
            continue;
        }
        const double bound = t.h_k1 / denom;
        if (keep_bounds) sol.per_constraint_bounds.push_back(bound);
        ++sol.n_constraints;
        if (!active || bound < sol.gamma_star || (bound == sol.gamma_star && precedes(t, *active))) {
            sol.gamma_star = bound;
            active = &t;
        }
    }
    if (!active) {
        throw Error("solve_scenario: all constraints degenerate (|h_k| < " + std::to_string(zero_tol) + " for all " +
                    std::to_string(transitions.size()) + ")");
    }
    sol.active_transition = *active;
    return sol;
}

ScenarioSolution solve_scenario(const TransitionSet& ts, double zero_tol, bool keep_bounds)
{
    return solve_scenario(std::span<const Transition>(ts.transitions), zero_tol, keep_bounds);
}

double solve_scenario_lp(std::span<const Transition> transitions, double zero_tol)
{
    std::vector<const Transition*> kept;
    for (const auto& t : transitions) {
        if (std::abs(t.h_k) >= zero_tol) kept.push_back(&t);
    }
    if (kept.empty()) throw Error("solve_scenario_lp: all constraints degenerate");

    const auto m = static_cast<Eigen::Index>(kept.size());
    Eigen::MatrixXd A(m, 1);
    Eigen::VectorXd b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        A(i, 0) = std::abs(kept[static_cast<std::size_t>(i)]->h_k);
        b(i) = kept[static_cast<std::size_t>(i)]->h_k1;
    }
    const LpResult res = solve_lp(Eigen::VectorXd::Ones(1), A, b);
    if (res.status != LpStatus::optimal) throw Error("solve_scenario_lp: linear program not solved to optimality");
    return res.z(0);
}

std::optional<Transition> extract_counterexample(const ScenarioSolution& sol)
{
    if (sol.gamma_star >= 0.0) return std::nullopt;
    if (!(sol.active_transition.h_k1 < 0.0)) {
        throw std::logic_error("negative decay rate without a violating transition: solver inconsistency");
    }
    return sol.active_transition;
}

double binomial_tail(std::int64_t N, std::int64_t d, double epsilon)
{
    if (epsilon <= 0.0) return d >= 1 ? 1.0 : 0.0;
    if (epsilon >= 1.0) return d > N ? 1.0 : 0.0;
    const double log_eps = std::log(epsilon);
    const double log_rest = std::log1p(-epsilon);
    const double lgN = std::lgamma(static_cast<double>(N) + 1.0);
    double sum = 0.0;
    for (std::int64_t i = 0; i < d && i <= N; ++i) {
        const double di = static_cast<double>(i);
        const double log_term = lgN - std::lgamma(di + 1.0) - std::lgamma(static_cast<double>(N - i) + 1.0) +
                                di * log_eps + static_cast<double>(N - i) * log_rest;
        sum += std::exp(log_term);
    }
    return sum;
}

double epsilon_by_bisection(std::int64_t N, double beta, std::int64_t d)
{
    check_bound_args(N, beta, d);
    double lo = 0.0;
    double hi = 1.0;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (binomial_tail(N, d, mid) <= beta) hi = mid;
        else lo = mid;
    }
    return hi;
}

double epsilon_for_confidence(std::int64_t N, double beta, std::int64_t d)
{
    check_bound_args(N, beta, d);
    if (d > 1) return epsilon_by_bisection(N, beta, d);

    const double n = static_cast<double>(N);
    const double log_beta = std::log(beta);
    double eps = -std::expm1(log_beta / n);
    for (int guard = 0; guard < 1000000; ++guard) {
        if (n * std::log1p(-eps) <= log_beta && std::pow(1.0 - eps, n) <= beta) break;
        eps = std::nextafter(eps, 1.0);
    }
    return eps;
}

double round_up(double value, int decimals)
{
    const double scale = std::pow(10.0, decimals);
    return std::ceil(value * scale - 1e-9) / scale;
}

std::string to_string(Verdict v)
{
    return v == Verdict::verified_probabilistic ? "VERIFIED_PROBABILISTIC" : "COUNTEREXAMPLE";
}

std::string Certificate::statement() const
{
    std::ostringstream os;
    if (verdict == Verdict::verified_probabilistic) {
        os << "with probability >= 1 - " << beta << " over sampling, the probability that a uniformly sampled "
           << "(x0, theta) in the safe set keeps h >= 0 for " << K << " steps is >= " << 1.0 - epsilon;
    } else {
        os << "counterexample: sampled transition (trial " << active_transition.trial_id << ", step "
           << active_transition.step_index << ") drives h to " << active_transition.h_k1 << " < 0";
    }
    return os.str();
}

Certificate certify(const ScenarioSolution& sol, double beta, std::int64_t K)
{
    if (sol.n_constraints < 1) throw Error("certify: solution has no retained constraints");
    Certificate cert;
    cert.gamma_star = sol.gamma_star;
    cert.verdict = sol.gamma_star >= 0.0 ? Verdict::verified_probabilistic : Verdict::counterexample;
    cert.N = sol.n_constraints;
    cert.K = K;
    cert.beta = beta;
    cert.n_discarded = sol.n_discarded;
    cert.epsilon = epsilon_for_confidence(static_cast<std::int64_t>(cert.N), beta, 1);
    cert.confidence = 1.0 - std::pow(1.0 - cert.epsilon, static_cast<double>(cert.N));
    cert.active_transition = sol.active_transition;
    if (cert.verdict == Verdict::counterexample) (void)extract_counterexample(sol);
    return cert;
}

nlohmann::ordered_json transition_to_json(const Transition& t)
{
    nlohmann::ordered_json j;
    j["trial_id"] = t.trial_id;
    j["step_index"] = t.step_index;
    j["h_k"] = t.h_k;
    j["h_k1"] = t.h_k1;
    j["x_k"] = vector_json(t.x_k);
    j["x_k1"] = vector_json(t.x_k1);
    j["theta"] = {{"continuous", vector_json(t.theta.continuous)}, {"discrete", t.theta.discrete}};
    return j;
}

nlohmann::ordered_json certificate_to_json(const Certificate& cert)
{
    nlohmann::ordered_json j;
    j["verdict"] = to_string(cert.verdict);
    j["gamma_star"] = cert.gamma_star;
    j["epsilon"] = cert.epsilon;
    j["epsilon_reported"] = round_up(cert.epsilon, 4);
    j["beta"] = cert.beta;
    j["confidence"] = cert.confidence;
    j["N"] = cert.N;
    j["K"] = cert.K;
    j["discarded"] = cert.n_discarded;
    j["statement"] = cert.statement();
    j["active_transition"] = transition_to_json(cert.active_transition);
    return j;
}

}  // namespace scenver
