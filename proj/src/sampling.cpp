#include "scenver/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "scenver/io.hpp"
#include "scenver/parallel.hpp"

namespace scenver {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double draw_uniform(Rng& rng, double lo, double hi)
{
    if (lo == hi) return lo;
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

Rng trial_stream(std::uint64_t seed, std::uint64_t trial_index)
{
    return Rng(splitmix64(splitmix64(seed) ^ splitmix64(~trial_index)));
}

void SamplingPlan::validate() const
{
    if (n_trials < 1) throw Error("sampling plan: n_trials must be >= 1");
    if (horizon < 1) throw Error("sampling plan: horizon K must be >= 1");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error("sampling plan: dt must be positive and finite");
    if (max_rejections < 1) throw Error("sampling plan: max_rejections must be >= 1");
}

TrialAborted::TrialAborted(std::int64_t trial_id, std::int64_t step, const std::string& reason)
    : Error("trial " + std::to_string(trial_id) + " aborted at step " + std::to_string(step) + ": " + reason),
      trial_id_(trial_id),
      step_(step),
      reason_(reason)
{
}

InitialSample sample_initial(const BarrierFunction& h, Rng& rng, std::int64_t max_rejections)
{
    const DomainBox& dom = h.domain();
    for (const auto& set : dom.params.discrete) {
        if (set.empty()) throw DomainError("barrier '" + h.name() + "': empty discrete parameter set");
    }

    InitialSample sample;
    sample.x0.resize(static_cast<Eigen::Index>(dom.state.size()));
    sample.theta.continuous.resize(static_cast<Eigen::Index>(dom.params.continuous.size()));
    sample.theta.discrete.resize(dom.params.discrete.size());

    for (std::int64_t draw = 1; draw <= max_rejections; ++draw) {
        for (Eigen::Index i = 0; i < sample.x0.size(); ++i) {
            sample.x0[i] = draw_uniform(rng, dom.state.lower[i], dom.state.upper[i]);
        }
        for (Eigen::Index i = 0; i < sample.theta.continuous.size(); ++i) {
            sample.theta.continuous[i] =
                draw_uniform(rng, dom.params.continuous.lower[i], dom.params.continuous.upper[i]);
        }
        for (std::size_t i = 0; i < dom.params.discrete.size(); ++i) {
            const auto& set = dom.params.discrete[i];
            std::uniform_int_distribution<std::size_t> pick(0, set.size() - 1);
            sample.theta.discrete[i] = set[pick(rng)];
        }
        if (in_superlevel_set(h, sample.x0, sample.theta)) {
            sample.draws = draw;
            return sample;
        }
    }

    // Nothing accepted: the rate is below 1 / max_rejections.
    const double rate = 1.0 / static_cast<double>(max_rejections);
    std::ostringstream os;
    os << "superlevel set too thin in declared box: no point with h >= 0 in " << max_rejections
       << " draws (estimated acceptance rate < " << rate << ")";
    throw SamplingError(os.str(), rate);
}

Trajectory rollout(const ClosedLoopSystem& sys, const BarrierFunction& h, const StateVector& x0,
                   const ParamVector& theta, std::int64_t K, double dt, std::int64_t trial_id)
{
    if (K < 0) throw Error("rollout: horizon must be non-negative");
    if (static_cast<std::size_t>(x0.size()) != sys.state_dim()) {
        throw DomainError("rollout: initial state has dimension " + std::to_string(x0.size()) + ", system '" +
                          sys.name() + "' expects " + std::to_string(sys.state_dim()));
    }
    const double h0 = evaluate_barrier(h, x0, theta);
    if (!(h0 >= 0.0)) throw DomainError("rollout: initial pair lies outside the superlevel set");

    Trajectory traj;
    traj.trial_id = trial_id;
    traj.theta = theta;
    traj.states.reserve(static_cast<std::size_t>(K) + 1);
    traj.barrier_values.reserve(static_cast<std::size_t>(K) + 1);
    traj.states.push_back(x0);
    traj.barrier_values.push_back(h0);

    for (std::int64_t k = 0; k < K; ++k) {
        StateVector next;
        try {
            next = sys.step(traj.states.back(), theta, dt);
        } catch (const StepError& e) {
            throw TrialAborted(trial_id, k, e.what());
        }
        if (static_cast<std::size_t>(next.size()) != sys.state_dim()) {
            throw Error("system '" + sys.name() + "' returned a state of wrong dimension");
        }
        if (!next.allFinite()) throw TrialAborted(trial_id, k + 1, "non-finite state");
        traj.barrier_values.push_back(evaluate_barrier(h, next, theta));
        traj.states.push_back(std::move(next));
    }
    return traj;
}

std::vector<Transition> extract_transitions(const Trajectory& trajectory)
{
    std::vector<Transition> out;
    const std::size_t K = trajectory.horizon();
    out.reserve(K);
    for (std::size_t k = 0; k < K; ++k) {
        Transition t;
        t.x_k = trajectory.states[k];
        t.x_k1 = trajectory.states[k + 1];
        t.theta = trajectory.theta;
        t.h_k = trajectory.barrier_values[k];
        t.h_k1 = trajectory.barrier_values[k + 1];
        t.trial_id = trajectory.trial_id;
        t.step_index = static_cast<std::int64_t>(k);
        out.push_back(std::move(t));
    }
    return out;
}

TransitionSet collect_transitions(const SamplingPlan& plan, const ClosedLoopSystem& sys, const BarrierFunction& h,
                                  std::size_t jobs)
{
    plan.validate();
    const auto n = static_cast<std::size_t>(plan.n_trials);

    struct Slot {
        std::optional<Trajectory> trajectory;
        std::optional<AbortedTrial> aborted;
    };
    std::vector<Slot> slots(n);

    parallel_for(n, jobs, [&](std::size_t i) {
        Rng rng = trial_stream(plan.seed, i);
        const auto id = static_cast<std::int64_t>(i);
        const InitialSample init = sample_initial(h, rng, plan.max_rejections);
        try {
            slots[i].trajectory = rollout(sys, h, init.x0, init.theta, plan.horizon, plan.dt, id);
        } catch (const TrialAborted& e) {
            slots[i].aborted = AbortedTrial{e.trial_id(), e.step(), e.reason()};
        }
    });

    TransitionSet ts;
    ts.plan = plan;
    ts.transitions.reserve(n * static_cast<std::size_t>(plan.horizon));
    for (auto& slot : slots) {
        if (slot.aborted) {
            ts.aborted.push_back(std::move(*slot.aborted));
            continue;
        }
        auto transitions = extract_transitions(*slot.trajectory);
        ts.transitions.insert(ts.transitions.end(), std::make_move_iterator(transitions.begin()),
                              std::make_move_iterator(transitions.end()));
        ts.trajectories.push_back(std::move(*slot.trajectory));
    }
    return ts;
}

Histogram state_histogram(const TransitionSet& ts, std::size_t dim, std::size_t n_bins,
                          std::optional<std::pair<double, double>> range)
{
    if (ts.empty()) throw Error("state_histogram: transition set is empty");
    if (n_bins == 0) throw Error("state_histogram: need at least one bin");
    if (dim >= static_cast<std::size_t>(ts.transitions.front().x_k.size())) {
        throw Error("state_histogram: dimension " + std::to_string(dim) + " out of range");
    }
    const auto d = static_cast<Eigen::Index>(dim);

    double lo, hi;
    if (range) {
        std::tie(lo, hi) = *range;
        if (!(lo < hi)) throw Error("state_histogram: empty range");
    } else {
        lo = hi = ts.transitions.front().x_k[d];
        for (const auto& t : ts.transitions) {
            lo = std::min(lo, t.x_k[d]);
            hi = std::max(hi, t.x_k[d]);
        }
        if (lo == hi) {
            lo -= 0.5;
            hi += 0.5;
        }
    }

    Histogram hist;
    hist.edges.resize(n_bins + 1);
    const double width = (hi - lo) / static_cast<double>(n_bins);
    for (std::size_t i = 0; i <= n_bins; ++i) hist.edges[i] = lo + width * static_cast<double>(i);
    hist.edges.back() = hi;
    hist.counts.assign(n_bins, 0);

    std::int64_t total = 0;
    for (const auto& t : ts.transitions) {
        const double v = t.x_k[d];
        if (v < lo || v > hi) continue;
        auto bin = static_cast<std::size_t>((v - lo) / width);
        bin = std::min(bin, n_bins - 1);
        ++hist.counts[bin];
        ++total;
    }
    hist.relative_frequency.resize(n_bins);
    for (std::size_t i = 0; i < n_bins; ++i) {
        hist.relative_frequency[i] = total > 0 ? static_cast<double>(hist.counts[i]) / static_cast<double>(total) : 0.0;
    }
    return hist;
}

void write_transitions_csv(std::ostream& os, const TransitionSet& ts)
{
    const Eigen::Index n = ts.empty() ? 0 : ts.transitions.front().x_k.size();
    const std::size_t p = ts.empty() ? 0 : ts.transitions.front().theta.size();

    os << "trial_id,step_index,h_k,h_k1";
    for (Eigen::Index i = 0; i < n; ++i) os << ",x_k_" << i;
    for (Eigen::Index i = 0; i < n; ++i) os << ",x_k1_" << i;
    for (std::size_t i = 0; i < p; ++i) os << ",theta_" << i;
    os << '\n';

    for (const auto& t : ts.transitions) {
        os << t.trial_id << ',' << t.step_index << ',' << format_double(t.h_k) << ',' << format_double(t.h_k1);
        for (Eigen::Index i = 0; i < n; ++i) os << ',' << format_double(t.x_k[i]);
        for (Eigen::Index i = 0; i < n; ++i) os << ',' << format_double(t.x_k1[i]);
        for (double v : t.theta.flattened()) os << ',' << format_double(v);
        os << '\n';
    }
}

void write_histogram_csv(std::ostream& os, const Histogram& hist)
{
    os << "bin_left,bin_right,relative_frequency\n";
    for (std::size_t i = 0; i < hist.bins(); ++i) {
        os << format_double(hist.edges[i]) << ',' << format_double(hist.edges[i + 1]) << ','
           << format_double(hist.relative_frequency[i]) << '\n';
    }
}

}  // namespace scenver
