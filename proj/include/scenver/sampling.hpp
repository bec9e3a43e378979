#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "scenver/barrier_core.hpp"

namespace scenver {

using Rng = std::mt19937_64;

/// Deterministic per-trial stream keyed by (seed, trial index).
Rng trial_stream(std::uint64_t seed, std::uint64_t trial_index);

struct SamplingPlan {
    std::int64_t n_trials = 1;
    std::int64_t horizon = 1;
    double dt = 0.05;
    std::uint64_t seed = 0;
    std::int64_t max_rejections = 10000;

    /// Throws Error unless n_trials >= 1, horizon >= 1, dt > 0, max_rejections >= 1.
    void validate() const;
};

/// Raised when rejection sampling cannot find a point of 𝒞 within the draw budget.
class SamplingError : public Error {
public:
    SamplingError(const std::string& what, double acceptance_rate)
        : Error(what), acceptance_rate_(acceptance_rate)
    {
    }
    /// Upper estimate of the acceptance rate observed before giving up.
    double acceptance_rate() const { return acceptance_rate_; }

private:
    double acceptance_rate_;
};

/// A rollout produced a non-finite state or the system refused to step.
class TrialAborted : public Error {
public:
    TrialAborted(std::int64_t trial_id, std::int64_t step, const std::string& reason);
    std::int64_t trial_id() const { return trial_id_; }
    std::int64_t step() const { return step_; }
    const std::string& reason() const { return reason_; }

private:
    std::int64_t trial_id_;
    std::int64_t step_;
    std::string reason_;
};

struct AbortedTrial {
    std::int64_t trial_id = 0;
    std::int64_t step = 0;
    std::string reason;
};

struct InitialSample {
    StateVector x0;
    ParamVector theta;
    std::int64_t draws = 0;  // candidates drawn, including the accepted one
};

/// Uniform draw over 𝒞 = {h >= 0} by rejection from h's domain box. Continuous
/// dimensions are uniform, discrete slots equiprobable.
InitialSample sample_initial(const BarrierFunction& h, Rng& rng, std::int64_t max_rejections = 10000);

/// Rolls the closed loop K steps of length dt from (x0, θ) ∈ 𝒞.
Trajectory rollout(const ClosedLoopSystem& sys, const BarrierFunction& h, const StateVector& x0,
                   const ParamVector& theta, std::int64_t K, double dt, std::int64_t trial_id = 0);

struct TransitionSet {
    std::vector<Transition> transitions;
    std::vector<Trajectory> trajectories;
    std::vector<AbortedTrial> aborted;
    SamplingPlan plan;

    std::size_t size() const { return transitions.size(); }
    bool empty() const { return transitions.empty(); }
};

/// Every consecutive pair of a trajectory, in step order.
std::vector<Transition> extract_transitions(const Trajectory& trajectory);

/// Samples plan.n_trials initial pairs, rolls each out and gathers all K transitions per
/// trajectory. Trials that abort are dropped whole and listed in `aborted`. Output is a
/// function of the plan only; `jobs` (0 = hardware concurrency) affects speed alone.
TransitionSet collect_transitions(const SamplingPlan& plan, const ClosedLoopSystem& sys, const BarrierFunction& h,
                                  std::size_t jobs = 0);

struct Histogram {
    std::vector<double> edges;  // n_bins + 1
    std::vector<std::int64_t> counts;
    std::vector<double> relative_frequency;

    std::size_t bins() const { return counts.size(); }
    double bin_center(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }
};

/// Histogram of component `dim` of x_k over every transition. Without an explicit range
/// the observed [min, max] is used; the last bin is closed on the right.
Histogram state_histogram(const TransitionSet& ts, std::size_t dim, std::size_t n_bins = 50,
                          std::optional<std::pair<double, double>> range = std::nullopt);

/// Columns: trial_id, step_index, h_k, h_k1, x_k_i..., x_k1_i..., theta_i...
void write_transitions_csv(std::ostream& os, const TransitionSet& ts);

/// Columns: bin_left, bin_right, relative_frequency
void write_histogram_csv(std::ostream& os, const Histogram& hist);

}  // namespace scenver
