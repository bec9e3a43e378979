#include "scenver/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>

#include <CLI11.hpp>

#include "scenver/scenario_lp.hpp"
#include "scenver/validation.hpp"

namespace scenver {

namespace fs = std::filesystem;

namespace {

void apply_seed(RunConfig& cfg, const std::optional<std::uint64_t>& seed)
{
    if (seed) {
        cfg.plan.seed = *seed;
        return;
    }
    if (const char* env = std::getenv("SCENVER_SEED")) {
        try {
            std::size_t used = 0;
            const std::string text(env);
            const auto value = std::stoull(text, &used);
            if (used != text.size()) throw std::invalid_argument("trailing characters");
            cfg.plan.seed = value;
        } catch (const std::exception&) {
            throw ConfigError(std::string("SCENVER_SEED is not an unsigned integer: '") + env + "'");
        }
    }
}

fs::path prepare_output(const RunConfig& cfg, const std::optional<std::string>& override_dir)
{
    const fs::path dir = override_dir ? *override_dir : cfg.output_directory;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());
    return dir;
}

std::ofstream open_output(const fs::path& path)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot write '" + path.string() + "'");
    return os;
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j)
{
    auto os = open_output(path);
    os << j.dump(2) << '\n';
}

void write_histogram(const fs::path& dir, const TransitionSet& ts, std::size_t dim, std::size_t bins,
                     std::ostream& out)
{
    const Histogram hist = state_histogram(ts, dim, bins);
    const fs::path path = dir / ("hist_" + std::to_string(dim) + ".csv");
    auto os = open_output(path);
    write_histogram_csv(os, hist);
    out << "histogram of x_k[" << dim << "] written to " << path.string() << '\n';
}

}  // namespace

int cmd_verify(RunConfig cfg, const VerifyOptions& opts, std::ostream& out)
{
    apply_seed(cfg, opts.seed);
    const fs::path dir = prepare_output(cfg, opts.output_directory);
    const auto sys = make_system(cfg.system);
    const BarrierFunction h = make_barrier(cfg.barrier, *sys);
    const auto provenance = resolved_config_json(cfg);

    const TransitionSet ts = collect_transitions(cfg.plan, *sys, h, opts.jobs);
    if (ts.empty()) throw Error("every trial aborted; no transitions to build the scenario program from");
    const ScenarioSolution sol = solve_scenario(ts, cfg.zero_tol);
    const Certificate cert = certify(sol, cfg.beta, cfg.plan.horizon);
    const auto counterexample = extract_counterexample(sol);

    nlohmann::ordered_json report = certificate_to_json(cert);
    report["trials"] = cfg.plan.n_trials;
    auto aborted = nlohmann::ordered_json::array();
    for (const auto& a : ts.aborted) {
        aborted.push_back({{"trial_id", a.trial_id}, {"step", a.step}, {"reason", a.reason}});
    }
    report["aborted_trials"] = aborted;
    if (counterexample) report["counterexample"] = transition_to_json(*counterexample);
    report["config"] = provenance;
    write_json(dir / "certificate.json", report);

    if (cfg.write_transitions) {
        auto os = open_output(dir / "transitions.csv");
        write_transitions_csv(os, ts);
    }

    out << to_string(cert.verdict) << ": gamma*_N = " << std::setprecision(6) << cert.gamma_star
        << ", N = " << cert.N << " (" << cert.n_discarded << " discarded, " << ts.aborted.size()
        << " trials aborted), epsilon = " << cert.epsilon << " at beta = " << cert.beta << '\n';
    out << cert.statement() << '\n';

    SamplingPlan plan_v = cfg.plan;
    plan_v.n_trials = cfg.validation_trials;
    plan_v.seed = validation_seed(cfg.plan.seed);

    if (opts.validate || cfg.validation_enabled) {
        const ValidationReport vr = estimate_violation(*sys, h, cert.gamma_star, plan_v, cert.epsilon, opts.jobs);
        nlohmann::ordered_json vj = validation_report_to_json(vr);
        vj["config"] = provenance;
        write_json(dir / "validation.json", vj);
        auto os = open_output(dir / "min_barrier.csv");
        write_min_barrier_csv(os, vr);
        out << "validation: v_hat = " << vr.v_hat << " (per transition " << vr.v_hat_transitions
            << "), s_hat = " << vr.s_hat << ", bound " << (vr.bound_held ? "held" : "exceeded") << '\n';
    }

    if (opts.campaign_runs > 0) {
        const CampaignResult cr =
            run_campaign(opts.campaign_runs, cfg.plan, plan_v, *sys, h, cfg.beta, cfg.zero_tol, opts.jobs);
        nlohmann::ordered_json cj = campaign_to_json(cr);
        cj["config"] = provenance;
        write_json(dir / "campaign.json", cj);
        out << "campaign: " << cr.v_hats.size() << " of " << cr.n_runs
            << " runs completed, fraction with v_hat > epsilon = " << cr.fraction_bound_violated << '\n';
    }

    if (opts.hist_dim) write_histogram(dir, ts, *opts.hist_dim, 50, out);

    return cert.verdict == Verdict::verified_probabilistic ? kExitCertified : kExitCounterexample;
}

void cmd_hist(RunConfig cfg, std::size_t dim, std::size_t bins, std::optional<std::uint64_t> seed, std::size_t jobs,
              const std::optional<std::string>& output_directory, std::ostream& out)
{
    apply_seed(cfg, seed);
    const fs::path dir = prepare_output(cfg, output_directory);
    const auto sys = make_system(cfg.system);
    const BarrierFunction h = make_barrier(cfg.barrier, *sys);
    const TransitionSet ts = collect_transitions(cfg.plan, *sys, h, jobs);
    write_histogram(dir, ts, dim, bins, out);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"scenver: sampling-based safety verification of black-box closed-loop systems"};
    app.require_subcommand(1);

    std::string config_path;
    VerifyOptions vopts;
    std::uint64_t seed = 0;
    std::string output;

    auto* verify = app.add_subcommand("verify", "Certify a candidate barrier or find a counterexample");
    verify->add_option("--config", config_path, "Configuration file (JSON)")->required();
    verify->add_option("--seed", seed, "Master seed (overrides SCENVER_SEED and the config)");
    verify->add_option("--jobs", vopts.jobs, "Worker threads; 0 uses every core. Never changes results");
    verify->add_flag("--validate", vopts.validate, "Estimate the violation probability on fresh trajectories");
    verify->add_option("--campaign", vopts.campaign_runs, "Repeat certification and validation N times");
    verify->add_option("--hist", vopts.hist_dim, "Also write the histogram of x_k[DIM]");
    verify->add_option("--output", output, "Output directory (overrides the config)");

    std::string hist_config;
    std::size_t hist_dim = 0;
    std::size_t hist_bins = 50;
    std::size_t hist_jobs = 0;
    std::uint64_t hist_seed = 0;
    std::string hist_output;
    auto* hist = app.add_subcommand("hist", "Histogram of sampled transition start states");
    hist->add_option("--config", hist_config, "Configuration file (JSON)")->required();
    hist->add_option("--dim", hist_dim, "State component")->required();
    hist->add_option("--bins", hist_bins, "Number of bins")->check(CLI::PositiveNumber);
    hist->add_option("--seed", hist_seed, "Master seed");
    hist->add_option("--jobs", hist_jobs, "Worker threads");
    hist->add_option("--output", hist_output, "Output directory");

    std::vector<std::string> argv_store;
    argv_store.emplace_back("scenver");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitCertified;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }

    try {
        if (verify->parsed()) {
            if (verify->count("--seed")) vopts.seed = seed;
            if (verify->count("--output")) vopts.output_directory = output;
            return cmd_verify(load_config(config_path), vopts, out);
        }
        std::optional<std::uint64_t> hs;
        if (hist->count("--seed")) hs = hist_seed;
        std::optional<std::string> ho;
        if (hist->count("--output")) ho = hist_output;
        cmd_hist(load_config(hist_config), hist_dim, hist_bins, hs, hist_jobs, ho, out);
        return kExitCertified;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
}

}  // namespace scenver
