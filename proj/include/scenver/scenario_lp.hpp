#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenver/barrier_core.hpp"
#include "scenver/sampling.hpp"

namespace scenver {

inline constexpr double kDefaultZeroTol = 1e-9;
inline constexpr double kDefaultBeta = 1e-6;

/// Solution of the sampled decay-rate program
///
///     γ*_N = max γ  s.t.  h(x_{k+1}, θ) >= γ |h(x_k, θ)|  for every retained sample.
///
/// Constraints with |h_k| < zero_tol are discarded and counted.
struct ScenarioSolution {
    double gamma_star = 0.0;
    Transition active_transition;
    std::size_t n_constraints = 0;  // retained
    std::size_t n_discarded = 0;
    std::vector<double> per_constraint_bounds;  // b_i = h_k1 / |h_k|, filled on request, retained order
};

/// Closed-form solve: the program only bounds γ from above, so γ*_N is the least upper
/// bound b_i. Ties go to the lowest (trial_id, step_index).
ScenarioSolution solve_scenario(std::span<const Transition> transitions, double zero_tol = kDefaultZeroTol,
                                bool keep_bounds = false);
ScenarioSolution solve_scenario(const TransitionSet& ts, double zero_tol = kDefaultZeroTol, bool keep_bounds = false);

/// Same program posed explicitly (max γ s.t. |h_k| γ <= h_k1) and handed to the generic
/// simplex solver. Used to cross-check the closed form.
double solve_scenario_lp(std::span<const Transition> transitions, double zero_tol = kDefaultZeroTol);

/// The active transition when γ*_N < 0, which then must have h_k1 < 0. Throws
/// std::logic_error if that does not hold.
std::optional<Transition> extract_counterexample(const ScenarioSolution& sol);

/// Σ_{i<d} C(N,i) εⁱ (1-ε)^{N-i}.
double binomial_tail(std::int64_t N, std::int64_t d, double epsilon);

/// Smallest ε with binomial_tail(N, d, ε) <= beta. Closed form 1 - beta^{1/N} for d = 1
/// (nudged up until (1-ε)^N <= beta holds in floating point), bisection to 1e-12 otherwise.
double epsilon_for_confidence(std::int64_t N, double beta, std::int64_t d = 1);

/// ε by bisection for any d; exposed so the d = 1 closed form can be checked against it.
double epsilon_by_bisection(std::int64_t N, double beta, std::int64_t d);

/// Rounds up to the given number of decimals; an upper bound never gets smaller.
double round_up(double value, int decimals);

enum class Verdict { verified_probabilistic, counterexample };

std::string to_string(Verdict v);

struct Certificate {
    Verdict verdict = Verdict::counterexample;
    double gamma_star = 0.0;
    double epsilon = 1.0;
    double beta = kDefaultBeta;
    double confidence = 0.0;  // 1 - (1-ε)^N
    std::size_t N = 0;
    std::int64_t K = 0;
    std::size_t n_discarded = 0;
    Transition active_transition;

    std::string statement() const;
};

Certificate certify(const ScenarioSolution& sol, double beta = kDefaultBeta, std::int64_t K = 0);

nlohmann::ordered_json transition_to_json(const Transition& t);
nlohmann::ordered_json certificate_to_json(const Certificate& cert);

}  // namespace scenver
