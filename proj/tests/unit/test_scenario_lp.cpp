#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "scenver/linear_program.hpp"
#include "scenver/scenario_lp.hpp"

using namespace scenver;
using oracle::make_transition;

TEST_CASE("closed-form examples")
{
    std::vector<Transition> two{make_transition(1.0, 0.5, 0, 0), make_transition(2.0, 1.9, 0, 1)};
    auto sol = solve_scenario(two);
    CHECK(sol.gamma_star == 0.5);
    CHECK(sol.active_transition.step_index == 0);
    CHECK(sol.n_constraints == 2);

    std::vector<Transition> same{make_transition(0.7, 0.7)};
    CHECK(solve_scenario(same).gamma_star == 1.0);

    std::vector<Transition> neg{make_transition(1.0, -0.1), make_transition(1.0, 0.9, 0, 1)};
    CHECK(solve_scenario(neg).gamma_star == doctest::Approx(-0.1));
}

TEST_CASE("negative h_k uses its absolute value")
{
    std::vector<Transition> ts{make_transition(-0.5, -0.25)};
    CHECK(solve_scenario(ts).gamma_star == doctest::Approx(-0.5));
    std::vector<Transition> rec{make_transition(-0.5, 0.25)};
    CHECK(solve_scenario(rec).gamma_star == doctest::Approx(0.5));
}

TEST_CASE("near-zero denominators are discarded and counted")
{
    std::vector<Transition> ts{make_transition(1e-12, -5.0), make_transition(1.0, 0.8, 0, 1)};
    const auto sol = solve_scenario(ts);
    CHECK(sol.n_discarded == 1);
    CHECK(sol.n_constraints == 1);
    CHECK(sol.gamma_star == doctest::Approx(0.8));
    CHECK(certify(sol).N == 1);

    std::vector<Transition> all_bad{make_transition(0.0, 1.0), make_transition(-1e-10, 1.0)};
    try {
        solve_scenario(all_bad);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("all constraints degenerate") != std::string::npos);
    }
    CHECK_THROWS(solve_scenario(std::span<const Transition>{}));
}

TEST_CASE("ties go to the lowest (trial, step)")
{
    std::vector<Transition> ts{make_transition(1.0, 0.5, 3, 1), make_transition(2.0, 1.0, 1, 9),
                               make_transition(4.0, 2.0, 1, 4), make_transition(1.0, 0.9, 0, 0)};
    const auto sol = solve_scenario(ts);
    CHECK(sol.active_transition.trial_id == 1);
    CHECK(sol.active_transition.step_index == 4);
}

TEST_CASE("random sets agree with the brute-force minimum and the explicit LP")
{
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 200; ++rep) {
        const auto ts = oracle::random_constraints(rng, 200);
        const auto sol = solve_scenario(ts, 1e-9, true);
        const double brute = oracle::min_ratio(ts);
        CHECK(sol.gamma_star == brute);
        CHECK(solve_scenario_lp(ts) == doctest::Approx(brute).epsilon(1e-12));
        for (double b : sol.per_constraint_bounds) CHECK(sol.gamma_star <= b);
        CHECK(sol.active_transition.h_k1 / std::abs(sol.active_transition.h_k) == sol.gamma_star);
    }
}

TEST_CASE("adding a constraint never increases the solution")
{
    std::mt19937_64 rng(8);
    auto ts = oracle::random_constraints(rng, 50);
    double prev = solve_scenario(std::span(ts).first(1)).gamma_star;
    for (std::size_t n = 2; n <= ts.size(); ++n) {
        const double g = solve_scenario(std::span(ts).first(n)).gamma_star;
        CHECK(g <= prev);
        prev = g;
    }
}

TEST_CASE("scaling the barrier leaves the solution unchanged")
{
    std::mt19937_64 rng(9);
    const auto ts = oracle::random_constraints(rng, 100);
    const auto base = solve_scenario(ts);
    for (double c : {0.25, 3.0, 1e3}) {
        auto scaled = ts;
        for (auto& t : scaled) {
            t.h_k *= c;
            t.h_k1 *= c;
        }
        const auto sol = solve_scenario(scaled);
        CHECK(sol.gamma_star == doctest::Approx(base.gamma_star).epsilon(1e-14));
        CHECK(certify(sol).verdict == certify(base).verdict);
    }
}

TEST_CASE("negative solution iff some constraint has h_k1 < 0")
{
    std::mt19937_64 rng(10);
    for (int rep = 0; rep < 300; ++rep) {
        const auto ts = oracle::random_constraints(rng, 1 + rep % 20, -0.3, 2.0);
        const bool any_negative = std::any_of(ts.begin(), ts.end(), [](const auto& t) { return t.h_k1 < 0; });
        const auto sol = solve_scenario(ts);
        CHECK((sol.gamma_star < 0) == any_negative);
        const auto cx = extract_counterexample(sol);
        CHECK(cx.has_value() == any_negative);
        if (cx) CHECK(cx->h_k1 < 0.0);
    }
}

TEST_CASE("counterexample extraction")
{
    std::vector<Transition> bad{make_transition(1.0, -3.057, 4, 12), make_transition(1.0, 0.99, 0, 0)};
    const auto cx = extract_counterexample(solve_scenario(bad));
    REQUIRE(cx.has_value());
    CHECK(cx->h_k1 < 0.0);
    CHECK(cx->trial_id == 4);

    std::vector<Transition> good{make_transition(1.0, 0.953)};
    CHECK_FALSE(extract_counterexample(solve_scenario(good)).has_value());

    std::vector<Transition> zero{make_transition(1.0, 0.0)};
    const auto zs = solve_scenario(zero);
    CHECK(zs.gamma_star == 0.0);
    CHECK_FALSE(extract_counterexample(zs).has_value());
    CHECK(certify(zs).verdict == Verdict::verified_probabilistic);

    ScenarioSolution broken;
    broken.gamma_star = -1.0;
    broken.n_constraints = 1;
    broken.active_transition = make_transition(1.0, 0.5);
    CHECK_THROWS_AS(extract_counterexample(broken), std::logic_error);
}

TEST_CASE("bound inversion reproduces the printed values")
{
    CHECK(round_up(epsilon_for_confidence(10000, 1e-6), 4) == doctest::Approx(0.0014).epsilon(1e-12));
    CHECK(round_up(epsilon_for_confidence(7500, 1e-6), 4) == doctest::Approx(0.0019).epsilon(1e-12));
    CHECK(round_up(epsilon_for_confidence(20000, 1e-6), 4) == doctest::Approx(0.0007).epsilon(1e-12));
    // closed form 1 - beta^(1/N)
    CHECK(epsilon_for_confidence(10000, 1e-6) == doctest::Approx(1.0 - std::pow(1e-6, 1e-4)).epsilon(1e-12));
    CHECK(epsilon_for_confidence(1, 0.5) == doctest::Approx(0.5));
    CHECK(epsilon_for_confidence(100, 1.0 - 1e-12) < 1e-13);
}

TEST_CASE("bound inversion is tight and conservative")
{
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::int64_t> nd(1, 200000);
    std::uniform_real_distribution<double> ld(-12.0, -0.1);
    for (int rep = 0; rep < 2000; ++rep) {
        const auto N = nd(rng);
        const double beta = std::pow(10.0, ld(rng));
        const double eps = epsilon_for_confidence(N, beta);
        CHECK(std::pow(1.0 - eps, double(N)) <= beta);
        CHECK(std::pow(1.0 - eps * (1.0 - 1e-9), double(N)) > beta);
    }
}

TEST_CASE("bisection handles d > 1 and agrees with the closed form at d = 1")
{
    for (std::int64_t d : {2, 3, 5}) {
        const double eps = epsilon_by_bisection(1000, 1e-6, d);
        CHECK(binomial_tail(1000, d, eps) <= 1e-6);
        CHECK(binomial_tail(1000, d, eps - 2e-12) > 1e-6);
        CHECK(epsilon_for_confidence(1000, 1e-6, d) == eps);
    }
    CHECK(epsilon_by_bisection(5000, 1e-6, 1) == doctest::Approx(epsilon_for_confidence(5000, 1e-6)).epsilon(1e-8));
    // larger d needs a larger epsilon
    CHECK(epsilon_by_bisection(1000, 1e-6, 2) < epsilon_by_bisection(1000, 1e-6, 3));
}

TEST_CASE("binomial tail at d = 1 is (1 - eps)^N")
{
    CHECK(binomial_tail(100, 1, 0.05) == doctest::Approx(std::pow(0.95, 100)).epsilon(1e-12));
    CHECK(binomial_tail(10, 2, 0.1) == doctest::Approx(std::pow(0.9, 10) + 10 * 0.1 * std::pow(0.9, 9)).epsilon(1e-12));
}

TEST_CASE("bound inversion rejects invalid arguments")
{
    CHECK_THROWS(epsilon_for_confidence(0, 1e-6));
    CHECK_THROWS(epsilon_for_confidence(10, 0.0));
    CHECK_THROWS(epsilon_for_confidence(10, 1.0));
    CHECK_THROWS(epsilon_for_confidence(10, 1e-6, 0));
    CHECK_THROWS(epsilon_for_confidence(10, 1e-6, 11));
}

TEST_CASE("certificates")
{
    std::vector<Transition> ts;
    for (int i = 0; i < 10000; ++i) ts.push_back(make_transition(1.0, i == 5 ? 0.953 : 0.99, i / 100, i % 100));
    const auto cert = certify(solve_scenario(ts), 1e-6, 100);
    CHECK(cert.verdict == Verdict::verified_probabilistic);
    CHECK(cert.N == 10000);
    CHECK(round_up(cert.epsilon, 4) == doctest::Approx(0.0014));
    CHECK(std::pow(1.0 - cert.epsilon, double(cert.N)) <= 1.0 - cert.confidence + 1e-15);
    CHECK(cert.statement().find("100 steps") != std::string::npos);

    ts[5].h_k1 = -3.057;
    const auto bad = certify(solve_scenario(ts), 1e-6, 100);
    CHECK(bad.verdict == Verdict::counterexample);
    CHECK(bad.gamma_star == doctest::Approx(-3.057));

    std::vector<Transition> one{make_transition(1.0, 1.0)};
    const auto tiny = certify(solve_scenario(one), 0.5, 1);
    CHECK(tiny.verdict == Verdict::verified_probabilistic);
    CHECK(tiny.epsilon == doctest::Approx(0.5));
}

TEST_CASE("certificate json")
{
    std::vector<Transition> ts{make_transition(1.0, 0.9)};
    const auto j = certificate_to_json(certify(solve_scenario(ts), 1e-6, 5));
    for (const char* key : {"verdict", "gamma_star", "epsilon", "confidence", "N", "K", "discarded", "active_transition"}) {
        CHECK_MESSAGE(j.contains(key), key);
    }
    CHECK(j["verdict"] == "VERIFIED_PROBABILISTIC");
    CHECK(j["active_transition"]["h_k1"] == 0.9);
}

TEST_CASE("generic LP solver")
{
    // max x + y  s.t. x <= 2, y <= 3, x + y <= 4
    Eigen::MatrixXd A(3, 2);
    A << 1, 0, 0, 1, 1, 1;
    const auto r = solve_lp(Eigen::Vector2d(1, 1), A, Eigen::Vector3d(2, 3, 4));
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.objective == doctest::Approx(4.0));

    // free variable with negative optimum: max x s.t. x <= -7
    Eigen::MatrixXd B(1, 1);
    B << 1;
    const auto neg = solve_lp(Eigen::VectorXd::Ones(1), B, Eigen::VectorXd::Constant(1, -7));
    REQUIRE(neg.status == LpStatus::optimal);
    CHECK(neg.z(0) == doctest::Approx(-7.0));

    // max x s.t. -x <= 0 is unbounded
    B << -1;
    CHECK(solve_lp(Eigen::VectorXd::Ones(1), B, Eigen::VectorXd::Zero(1)).status == LpStatus::unbounded);

    // x <= -1 and -x <= 0 is infeasible
    Eigen::MatrixXd C(2, 1);
    C << 1, -1;
    CHECK(solve_lp(Eigen::VectorXd::Ones(1), C, Eigen::Vector2d(-1, 0)).status == LpStatus::infeasible);
}
