#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenver/barrier_core.hpp"
#include "scenver/sampling.hpp"
#include "scenver/scenario_lp.hpp"

namespace scenver {

/// Validation streams are offset from certification streams so the two never share a
/// seed for any campaign shorter than 2^32 runs.
inline constexpr std::uint64_t kValidationSeedOffset = std::uint64_t{1} << 32;

inline std::uint64_t validation_seed(std::uint64_t certification_seed)
{
    return certification_seed + kValidationSeedOffset;
}

struct TrialMinimum {
    std::int64_t trial_id = 0;
    double min_h = 0.0;
    std::int64_t first_violation_step = -1;  // first k with h(x_k) < 0, -1 if none
};

struct ValidationReport {
    std::size_t n_validation_trials = 0;  // trajectories that completed
    double gamma_star = 0.0;
    double epsilon = 1.0;

    /// Fraction of trajectories holding a transition with h_k1 < γ*·|h_k|.
    double v_hat = 0.0;
    /// Fraction of trajectories with h >= 0 at all K+1 observations.
    double s_hat = 0.0;
    /// Fraction of individual transitions with h_k1 < γ*·|h_k| (diagnostic).
    double v_hat_transitions = 0.0;

    std::size_t n_violating_trajectories = 0;
    std::size_t n_violating_transitions = 0;
    std::size_t n_transitions = 0;
    std::size_t n_unsafe_trajectories = 0;
    bool bound_held = false;  // v_hat <= epsilon

    std::vector<TrialMinimum> min_barrier_per_trial;
    std::vector<AbortedTrial> aborted;
};

/// True iff the transition lies outside Γ_δ for the given decay rate.
bool violates_decay(const Transition& t, double gamma);

/// Checks a decay rate against trajectories already sampled.
ValidationReport validate_trajectories(const std::vector<Trajectory>& trajectories, double gamma_star,
                                       double epsilon);

/// Samples plan_v.n_trials fresh trajectories and measures how often γ* is violated.
/// plan_v must use a seed independent of the certification run.
ValidationReport estimate_violation(const ClosedLoopSystem& sys, const BarrierFunction& h, double gamma_star,
                                    const SamplingPlan& plan_v, double epsilon, std::size_t jobs = 0);

struct CampaignRun {
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    double gamma_star = 0.0;
    Verdict verdict = Verdict::counterexample;
    double epsilon = 1.0;
    std::size_t n_constraints = 0;
    std::size_t n_discarded = 0;
    ValidationReport validation;
};

struct CampaignResult {
    std::size_t n_runs = 0;
    std::vector<CampaignRun> runs;
    std::vector<double> gamma_stars;  // successful runs, in run order
    std::vector<double> v_hats;
    double epsilon = 1.0;
    double fraction_bound_violated = 0.0;  // mean(v_hat > ε) over successful runs
};

/// Run i uses certification seed plan.seed + i and validation seed validation_seed(plan.seed + i).
/// A failing run is recorded and the campaign continues.
CampaignResult run_campaign(std::size_t n_runs, const SamplingPlan& plan, const SamplingPlan& plan_v,
                            const ClosedLoopSystem& sys, const BarrierFunction& h, double beta,
                            double zero_tol = kDefaultZeroTol, std::size_t jobs = 0);

/// Scenario-theory consistency check on a synthetic constraint source: each run draws N
/// ratios i.i.d. uniform on [0, 1] (h_k = 1, h_k1 = U), so the exact violation probability
/// of γ*_N is γ*_N itself and P[V > ε] = (1 - ε)^N.
struct SyntheticCheck {
    std::size_t n_runs = 0;
    std::int64_t N = 0;
    double epsilon = 0.0;
    std::size_t n_exceeding = 0;
    double frequency = 0.0;
    double expected = 0.0;  // (1 - ε)^N
    double sigma = 0.0;     // binomial standard deviation of the frequency
};

SyntheticCheck run_synthetic_check(std::size_t n_runs, std::int64_t N, double epsilon, std::uint64_t seed,
                                   std::size_t jobs = 0);

nlohmann::ordered_json validation_report_to_json(const ValidationReport& report);
nlohmann::ordered_json campaign_to_json(const CampaignResult& result);

/// Columns: trial_id, min_h, first_violation_step
void write_min_barrier_csv(std::ostream& os, const ValidationReport& report);

}  // namespace scenver
