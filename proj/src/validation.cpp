#include "scenver/validation.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "scenver/io.hpp"
#include "scenver/parallel.hpp"

namespace scenver {

bool violates_decay(const Transition& t, double gamma)
{
    if (std::isinf(gamma) && gamma < 0.0) return false;
    return t.h_k1 < gamma * std::abs(t.h_k);
}

ValidationReport validate_trajectories(const std::vector<Trajectory>& trajectories, double gamma_star,
                                       double epsilon)
{
    ValidationReport report;
    report.gamma_star = gamma_star;
    report.epsilon = epsilon;
    report.n_validation_trials = trajectories.size();
    report.min_barrier_per_trial.reserve(trajectories.size());

    for (const auto& traj : trajectories) {
        bool violated = false;
        for (const auto& t : extract_transitions(traj)) {
            ++report.n_transitions;
            if (violates_decay(t, gamma_star)) {
                ++report.n_violating_transitions;
                violated = true;
            }
        }
        if (violated) ++report.n_violating_trajectories;

        TrialMinimum tm;
        tm.trial_id = traj.trial_id;
        tm.min_h = traj.min_barrier();
        for (std::size_t k = 0; k < traj.barrier_values.size(); ++k) {
            if (traj.barrier_values[k] < 0.0) {
                tm.first_violation_step = static_cast<std::int64_t>(k);
                break;
            }
        }
        if (tm.min_h < 0.0) ++report.n_unsafe_trajectories;
        report.min_barrier_per_trial.push_back(tm);
    }

    if (!trajectories.empty()) {
        const auto n = static_cast<double>(trajectories.size());
        report.v_hat = static_cast<double>(report.n_violating_trajectories) / n;
        report.s_hat = static_cast<double>(trajectories.size() - report.n_unsafe_trajectories) / n;
    }
    if (report.n_transitions > 0) {
        report.v_hat_transitions =
            static_cast<double>(report.n_violating_transitions) / static_cast<double>(report.n_transitions);
    }
    report.bound_held = report.v_hat <= epsilon;
    return report;
}

ValidationReport estimate_violation(const ClosedLoopSystem& sys, const BarrierFunction& h, double gamma_star,
                                    const SamplingPlan& plan_v, double epsilon, std::size_t jobs)
{
    TransitionSet ts = collect_transitions(plan_v, sys, h, jobs);
    ValidationReport report = validate_trajectories(ts.trajectories, gamma_star, epsilon);
    report.aborted = std::move(ts.aborted);
    return report;
}

CampaignResult run_campaign(std::size_t n_runs, const SamplingPlan& plan, const SamplingPlan& plan_v,
                            const ClosedLoopSystem& sys, const BarrierFunction& h, double beta, double zero_tol,
                            std::size_t jobs)
{
    if (n_runs < 1) throw Error("run_campaign: need at least one run");
    CampaignResult result;
    result.n_runs = n_runs;
    result.runs.resize(n_runs);

    std::size_t exceeded = 0;
    for (std::size_t i = 0; i < n_runs; ++i) {
        CampaignRun& run = result.runs[i];
        SamplingPlan cert_plan = plan;
        cert_plan.seed = plan.seed + i;
        SamplingPlan val_plan = plan_v;
        val_plan.seed = validation_seed(cert_plan.seed);
        run.seed = cert_plan.seed;
        try {
            const TransitionSet ts = collect_transitions(cert_plan, sys, h, jobs);
            const ScenarioSolution sol = solve_scenario(ts, zero_tol);
            const Certificate cert = certify(sol, beta, cert_plan.horizon);
            run.gamma_star = cert.gamma_star;
            run.verdict = cert.verdict;
            run.epsilon = cert.epsilon;
            run.n_constraints = cert.N;
            run.n_discarded = cert.n_discarded;
            run.validation = estimate_violation(sys, h, cert.gamma_star, val_plan, cert.epsilon, jobs);
            run.ok = true;
        } catch (const std::exception& e) {
            run.error = e.what();
            continue;
        }
        result.gamma_stars.push_back(run.gamma_star);
        result.v_hats.push_back(run.validation.v_hat);
        result.epsilon = run.epsilon;
        if (run.validation.v_hat > run.epsilon) ++exceeded;
    }
    if (!result.v_hats.empty()) {
        result.fraction_bound_violated = static_cast<double>(exceeded) / static_cast<double>(result.v_hats.size());
    }
    return result;
}

SyntheticCheck run_synthetic_check(std::size_t n_runs, std::int64_t N, double epsilon, std::uint64_t seed,
                                   std::size_t jobs)
{
    if (n_runs < 1 || N < 1) throw Error("run_synthetic_check: need n_runs >= 1 and N >= 1");
    std::vector<char> exceeds(n_runs, 0);
    parallel_for(n_runs, jobs, [&](std::size_t run) {
        Rng rng = trial_stream(seed, run);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<Transition> constraints(static_cast<std::size_t>(N));
        for (std::int64_t i = 0; i < N; ++i) {
            Transition& t = constraints[static_cast<std::size_t>(i)];
            t.h_k = 1.0;
            t.h_k1 = unit(rng);
            t.trial_id = static_cast<std::int64_t>(run);
            t.step_index = i;
        }
        // V(γ) = P[U < γ] = γ for γ ∈ [0, 1].
        const double violation = solve_scenario(constraints).gamma_star;
        exceeds[run] = violation > epsilon ? 1 : 0;
    });

    SyntheticCheck check;
    check.n_runs = n_runs;
    check.N = N;
    check.epsilon = epsilon;
    for (char e : exceeds) check.n_exceeding += static_cast<std::size_t>(e);
    check.frequency = static_cast<double>(check.n_exceeding) / static_cast<double>(n_runs);
    check.expected = std::pow(1.0 - epsilon, static_cast<double>(N));
    check.sigma = std::sqrt(check.expected * (1.0 - check.expected) / static_cast<double>(n_runs));
    return check;
}

nlohmann::ordered_json validation_report_to_json(const ValidationReport& report)
{
    nlohmann::ordered_json j;
    j["n_validation_trials"] = report.n_validation_trials;
    j["gamma_star"] = report.gamma_star;
    j["epsilon"] = report.epsilon;
    j["v_hat"] = report.v_hat;
    j["s_hat"] = report.s_hat;
    j["v_hat_transitions"] = report.v_hat_transitions;
    j["violating_trajectories"] = report.n_violating_trajectories;
    j["violating_transitions"] = report.n_violating_transitions;
    j["transitions"] = report.n_transitions;
    j["unsafe_trajectories"] = report.n_unsafe_trajectories;
    j["bound_held"] = report.bound_held;
    auto aborted = nlohmann::ordered_json::array();
    for (const auto& a : report.aborted) {
        aborted.push_back({{"trial_id", a.trial_id}, {"step", a.step}, {"reason", a.reason}});
    }
    j["aborted"] = aborted;
    auto mins = nlohmann::ordered_json::array();
    for (const auto& m : report.min_barrier_per_trial) mins.push_back(m.min_h);
    j["min_barrier_per_trial"] = mins;
    return j;
}

nlohmann::ordered_json campaign_to_json(const CampaignResult& result)
{
    nlohmann::ordered_json j;
    j["n_runs"] = result.n_runs;
    j["epsilon"] = result.epsilon;
    j["fraction_bound_violated"] = result.fraction_bound_violated;
    j["gamma_stars"] = result.gamma_stars;
    j["v_hats"] = result.v_hats;
    auto runs = nlohmann::ordered_json::array();
    for (const auto& r : result.runs) {
        nlohmann::ordered_json jr;
        jr["seed"] = r.seed;
        jr["ok"] = r.ok;
        if (!r.ok) {
            jr["error"] = r.error;
        } else {
            jr["verdict"] = to_string(r.verdict);
            jr["gamma_star"] = r.gamma_star;
            jr["epsilon"] = r.epsilon;
            jr["N"] = r.n_constraints;
            jr["discarded"] = r.n_discarded;
            jr["v_hat"] = r.validation.v_hat;
            jr["v_hat_transitions"] = r.validation.v_hat_transitions;
            jr["s_hat"] = r.validation.s_hat;
            jr["unsafe_trajectories"] = r.validation.n_unsafe_trajectories;
            jr["bound_held"] = r.validation.bound_held;
        }
        runs.push_back(jr);
    }
    j["runs"] = runs;
    return j;
}

void write_min_barrier_csv(std::ostream& os, const ValidationReport& report)
{
    os << "trial_id,min_h,first_violation_step\n";
    for (const auto& m : report.min_barrier_per_trial) {
        os << m.trial_id << ',' << format_double(m.min_h) << ',' << m.first_violation_step << '\n';
    }
}

}  // namespace scenver
