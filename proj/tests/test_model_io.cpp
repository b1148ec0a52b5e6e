#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "mdpmat/evaluation.hpp"
#include "mdpmat/model_io.hpp"

using namespace mdpmat;

TEST_CASE("random mdp generation is deterministic and valid") {
    const MdpInstance a = generate_random_mdp(1234, 6, 3, 0.9, -2.0, 2.0);
    const MdpInstance b = generate_random_mdp(1234, 6, 3, 0.9, -2.0, 2.0);
    CHECK(a.transitions() == b.transitions()); // bitwise
    CHECK(a.rewards() == b.rewards());
    CHECK(a.initial_distribution() == b.initial_distribution());

    const MdpInstance c = generate_random_mdp(1235, 6, 3, 0.9, -2.0, 2.0);
    CHECK(a.transitions() != c.transitions());

    SUBCASE("single-state instances have a column of ones") {
        const MdpInstance tiny = generate_random_mdp(7, 1, 3, 0.5);
        CHECK((tiny.transitions() - Matrix::Ones(3, 1)).lpNorm<Eigen::Infinity>() <=
              1e-15);
    }

    SUBCASE("rewards respect the requested range") {
        CHECK(a.rewards().minCoeff() >= -2.0);
        CHECK(a.rewards().maxCoeff() <= 2.0);
    }
}

TEST_CASE("builtin instance matches its frozen definition") {
    const MdpInstance m1 = builtin_m1();
    CHECK(m1.num_states() == 2);
    CHECK(m1.num_actions() == 2);
    CHECK(m1.gamma() == 0.5);
    CHECK(m1.initial_distribution()[0] == 1.0);
    CHECK(m1.transitions()(0, 0) == 1.0);
    CHECK(m1.transitions()(1, 1) == 1.0);
    CHECK(m1.transitions()(2, 0) == 1.0);
    CHECK(m1.transitions()(3, 1) == 1.0);
    CHECK(m1.rewards()[0] == 1.0);
    CHECK(m1.rewards()[3] == 1.0);
    CHECK(objective(m1, uniform_policy(2, 2)) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(objective(m1, deterministic_policy({0, 1}, 2)) ==
          doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("mdp documents round-trip bit-exactly") {
    const MdpInstance m1 = builtin_m1();
    const MdpInstance back = parse_mdp(write_mdp(m1));
    CHECK(back.transitions() == m1.transitions());
    CHECK(back.rewards() == m1.rewards());
    CHECK(back.gamma() == m1.gamma());
    CHECK(back.initial_distribution() == m1.initial_distribution());

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const MdpInstance mdp =
            generate_random_mdp(seed, 4, 3, 0.31 + 0.03 * seed, -1.5, 2.5);
        const MdpInstance rt = parse_mdp(write_mdp(mdp));
        CHECK(rt.transitions() == mdp.transitions());
        CHECK(rt.rewards() == mdp.rewards());
        CHECK(rt.gamma() == mdp.gamma());
        CHECK(rt.initial_distribution() == mdp.initial_distribution());
        // Writing again produces the identical document.
        CHECK(write_mdp(rt) == write_mdp(mdp));
    }
}

TEST_CASE("mdp document errors") {
    const std::string good = write_mdp(builtin_m1());

    SUBCASE("a row that sums to 0.9 names the row") {
        std::string bad = good;
        const auto key = bad.find("\"transitions\"");
        REQUIRE(key != std::string::npos);
        const auto pos = bad.find("1.0", key);
        REQUIRE(pos != std::string::npos);
        bad.replace(pos, 3, "0.9");
        CHECK_THROWS_WITH_AS(parse_mdp(bad), doctest::Contains("transition row 0"),
                             SimplexViolation);
    }

    SUBCASE("missing fields are parse errors") {
        CHECK_THROWS_AS(parse_mdp(R"({"format_version": 1, "num_states": 2})"),
                        ParseError);
    }

    SUBCASE("unknown keys are rejected") {
        std::string extra = good;
        extra.insert(extra.find('{') + 1, "\"extra_key\": 3,");
        CHECK_THROWS_WITH_AS(parse_mdp(extra), doctest::Contains("extra_key"),
                             ParseError);
    }

    SUBCASE("malformed json is a parse error") {
        CHECK_THROWS_AS(parse_mdp("{not json"), ParseError);
    }

    SUBCASE("wrong format version is rejected") {
        std::string v2 = good;
        const auto pos = v2.find("\"format_version\": 1");
        REQUIRE(pos != std::string::npos);
        v2.replace(pos, 19, "\"format_version\": 2");
        CHECK_THROWS_AS(parse_mdp(v2), ParseError);
    }
}

TEST_CASE("policy documents round-trip") {
    const Policy policy = generate_random_policy(99, 3, 4);
    const Policy back = parse_policy(write_policy(policy));
    CHECK(back.probabilities() == policy.probabilities());
    CHECK_THROWS_AS(parse_policy(R"({"format_version": 1})"), ParseError);
}

TEST_CASE("sample documents round-trip") {
    const MdpInstance m1 = builtin_m1();
    const auto samples = sample_transitions(m1, 5, 3);
    const std::string text = write_samples(samples, 2, 2);
    int ns = 0, na = 0;
    const auto back = parse_samples(text, ns, na);
    CHECK(ns == 2);
    CHECK(na == 2);
    REQUIRE(back.size() == samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        CHECK(back[i].state == samples[i].state);
        CHECK(back[i].action == samples[i].action);
        CHECK(back[i].next_state == samples[i].next_state);
    }
}

TEST_CASE("transition estimation") {
    SUBCASE("exact empirical frequencies with zero smoothing") {
        const std::vector<TransitionSample> samples = {
            {0, 0, 0}, {0, 0, 1}, {0, 0, 1}, {0, 0, 1}, // (0,0): 1/4, 3/4
            {0, 1, 0}, {0, 1, 0},                       // (0,1): 1, 0
        };
        const TransitionEstimate est = estimate_transitions(samples, 2, 2, 0.0);
        CHECK(est.transitions(0, 0) == 0.25);
        CHECK(est.transitions(0, 1) == 0.75);
        CHECK(est.transitions(1, 0) == 1.0);
        CHECK_FALSE(est.unvisited[0]);
        CHECK_FALSE(est.unvisited[1]);
        CHECK(est.unvisited[2]); // (1,0) never observed
        CHECK(est.unvisited[3]);
        CHECK(est.transitions(2, 0) == 0.5); // unvisited rows filled uniform
    }

    SUBCASE("no samples with smoothing one is uniform and flagged") {
        const TransitionEstimate est = estimate_transitions({}, 3, 2, 1.0);
        for (int row = 0; row < 6; ++row) {
            CHECK(est.unvisited[row]);
            for (int col = 0; col < 3; ++col)
                CHECK(est.transitions(row, col) ==
                      doctest::Approx(1.0 / 3.0).epsilon(1e-15));
        }
    }

    SUBCASE("degenerate dynamics are recovered exactly") {
        const MdpInstance m1 = builtin_m1();
        const auto samples = sample_transitions(m1, 11, 1000);
        const TransitionEstimate est = estimate_transitions(samples, 2, 2, 0.0);
        CHECK((est.transitions - m1.transitions()).lpNorm<Eigen::Infinity>() ==
              0.0);
    }

    SUBCASE("out-of-range samples are rejected") {
        CHECK_THROWS_AS(estimate_transitions({{2, 0, 0}}, 2, 2, 0.0),
                        IndexOutOfRange);
        CHECK_THROWS_AS(estimate_transitions({{0, 0, 5}}, 2, 2, 0.0),
                        IndexOutOfRange);
    }

    SUBCASE("estimates pass row-stochastic validation") {
        const MdpInstance mdp = generate_random_mdp(21, 4, 2, 0.9);
        const auto samples = sample_transitions(mdp, 22, 500);
        const TransitionEstimate est = estimate_transitions(samples, 4, 2, 0.0);
        // Constructing an instance from the estimate revalidates every row.
        const MdpInstance rebuilt(4, 2, est.transitions, mdp.rewards(),
                                  mdp.gamma(), mdp.initial_distribution());
        CHECK(rebuilt.num_states() == 4);
    }

    SUBCASE("ten thousand samples per pair pin the dynamics to 0.05") {
        const MdpInstance mdp = generate_random_mdp(31, 5, 3, 0.9);
        const auto samples = sample_transitions(mdp, 32, 10000);
        const TransitionEstimate est = estimate_transitions(samples, 5, 3, 0.0);
        CHECK((est.transitions - mdp.transitions()).lpNorm<Eigen::Infinity>() <=
              0.05);
    }
}

TEST_CASE("value error under the estimated dynamics shrinks with sample size") {
    std::vector<double> medians;
    for (int n : {100, 1000, 10000}) {
        std::vector<double> errors;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const MdpInstance mdp =
                generate_random_mdp(derive_seed(seed, 51), 5, 2, 0.9);
            const auto samples =
                sample_transitions(mdp, derive_seed(seed, 52), n);
            const TransitionEstimate est =
                estimate_transitions(samples, 5, 2, 0.0);
            const MdpInstance estimated(5, 2, est.transitions, mdp.rewards(),
                                        mdp.gamma(), mdp.initial_distribution());
            const Policy policy = uniform_policy(5, 2);
            const Vector true_values = value_function(mdp, policy);
            const Vector est_values = value_function(estimated, policy);
            errors.push_back(
                (true_values - est_values).lpNorm<Eigen::Infinity>());
        }
        std::sort(errors.begin(), errors.end());
        medians.push_back(0.5 * (errors[4] + errors[5]));
    }
    CHECK(medians[1] < medians[0]);
    CHECK(medians[2] < medians[1]);
}

TEST_CASE("derived seeds decorrelate streams deterministically") {
    CHECK(derive_seed(1, 2) == derive_seed(1, 2));
    CHECK(derive_seed(1, 2) != derive_seed(1, 3));
    CHECK(derive_seed(1, 2) != derive_seed(2, 2));
}
